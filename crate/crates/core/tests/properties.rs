//! Property tests for the invariants of each module.

use num_bigint::BigInt;
use num_integer::Integer;
use proptest::prelude::*;

use weilrep::exact::{rat, rint, ExactScalar, Rational};
use weilrep::jordan::{gauss_sum_brute, gauss_sum_closed, jordan_decompose, weil_index_lattice};
use weilrep::lattice::GramLattice;
use weilrep::metaplectic::{branch_sign, sigma, word_element, word_matrix, MpElement, Token, SL2Z};
use weilrep::numth::{eps_bit, hilbert, legendre, sigma_bit, vp, Place};
use weilrep::weilrep::WeilRep;

fn places() -> impl Strategy<Value = Place> {
    prop_oneof![Just(Place::Real), Just(Place::Prime(2)), Just(Place::Prime(3)), Just(Place::Prime(5)), Just(Place::Prime(7))]
}

fn nonzero(lim: i64) -> impl Strategy<Value = i64> {
    (-lim..=lim).prop_filter("nonzero", |x| *x != 0)
}

fn odd(lim: i64) -> impl Strategy<Value = i64> {
    (-lim..=lim).prop_filter("odd", |x| x % 2 != 0)
}

fn nonzero_rat() -> impl Strategy<Value = Rational> {
    (nonzero(60), 1i64..=20).prop_map(|(n, d)| rat(n, d))
}

/// Words `T^{k₀} S T^{k₁} S …` as matrices.
fn sl2z() -> impl Strategy<Value = SL2Z> {
    prop::collection::vec(-4i64..=4, 1..7).prop_map(|ks| {
        let mut w = Vec::new();
        for (i, k) in ks.into_iter().enumerate() {
            if i > 0 {
                w.push(Token::S);
            }
            w.push(Token::T(k));
        }
        word_matrix(&w)
    })
}

fn mp() -> impl Strategy<Value = MpElement> {
    (sl2z(), any::<bool>()).prop_map(|(mat, s)| MpElement { mat, eps: if s { 1 } else { -1 } })
}

/// Even lattices of rank at most 2 with `|Δ| ≤ max_delta`.
fn even_lattice(max_delta: i64) -> impl Strategy<Value = GramLattice> {
    prop_oneof![
        nonzero(6).prop_map(|a| vec![vec![2 * a]]),
        (nonzero(4), -4i64..=4, nonzero(4)).prop_map(|(a, b, c)| vec![vec![2 * a, b], vec![b, 2 * c]]),
    ]
    .prop_filter_map("nondegenerate and small", move |g| {
        let l = GramLattice::new(g).ok()?;
        (l.delta() as i64 <= max_delta).then_some(l)
    })
}

/// Odd lattices of rank at most 2 with `|Δ| ≤ max_delta`.
fn odd_lattice(max_delta: i64) -> impl Strategy<Value = GramLattice> {
    prop_oneof![
        nonzero(7).prop_map(|a| vec![vec![a]]),
        (nonzero(5), -3i64..=3, nonzero(5)).prop_map(|(a, b, c)| vec![vec![a, b], vec![b, c]]),
    ]
    .prop_filter_map("odd, nondegenerate and small", move |g| {
        let l = GramLattice::new(g).ok()?;
        (!l.is_even() && l.delta() as i64 <= max_delta).then_some(l)
    })
}

mod exact {
    use super::*;

    proptest! {
        #[test]
        fn roots_of_unity_have_their_order(n in 1u64..=120, k in 0i64..120) {
            let z = ExactScalar::root_of_unity(k % n as i64, n);
            prop_assert_eq!(z.pow(n as i64).unwrap(), ExactScalar::one());
        }

        #[test]
        fn square_roots_square_back(n in 1i64..=50, d in 1i64..=50) {
            let s = ExactScalar::sqrt_rat(&rat(n, d)).unwrap();
            prop_assert_eq!(&s * &s, ExactScalar::from_rational(&rat(n, d)));
        }

        #[test]
        fn norms_of_monomials_are_rational(k in 0i64..24, n in 1i64..=30) {
            let a = &ExactScalar::root_of_unity(k, 24) * &ExactScalar::sqrt_rat(&rint(n)).unwrap();
            prop_assert_eq!((&a * &a.conj()).as_rational(), Some(rint(n)));
        }

        #[test]
        fn ring_laws(a in 0i64..12, b in 0i64..10, c in 0i64..8, r in 1i64..9) {
            let x = &ExactScalar::root_of_unity(a, 12) * &ExactScalar::from_int(r);
            let y = ExactScalar::root_of_unity(b, 10);
            let z = &ExactScalar::root_of_unity(c, 8) + &ExactScalar::sqrt_rat(&rint(r)).unwrap();
            prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
            prop_assert_eq!(&(&x + &y) * &z, &(&x * &z) + &(&y * &z));
        }
    }
}

mod numth {
    use super::*;

    proptest! {
        #[test]
        fn legendre_is_multiplicative(x in nonzero(99), z in nonzero(99), y in odd(99)) {
            prop_assume!(x.gcd(&y) == 1 && z.gcd(&y) == 1);
            let lhs = legendre(&rint(x * z), y).unwrap();
            prop_assert_eq!(lhs, legendre(&rint(x), y).unwrap() * legendre(&rint(z), y).unwrap());
        }

        #[test]
        fn reciprocity_in_signed_convention(x in odd(99), y in odd(99)) {
            prop_assume!(x.gcd(&y) == 1);
            let (xr, yr) = (rint(x), rint(y));
            let lhs = legendre(&xr, y).unwrap() * legendre(&yr, x).unwrap();
            let k = eps_bit(&xr).unwrap() * eps_bit(&yr).unwrap() + sigma_bit(&xr) * sigma_bit(&yr);
            prop_assert_eq!(lhs, if k.is_multiple_of(2) { 1 } else { -1 });
        }

        #[test]
        fn hilbert_symbol_laws(a in nonzero_rat(), b in nonzero_rat(), c in nonzero_rat(), place in places()) {
            let h = |x: &Rational, y: &Rational| hilbert(x, y, place).unwrap();
            prop_assert_eq!(h(&a, &b), h(&b, &a));
            prop_assert_eq!(h(&(&a * &c), &b), h(&a, &b) * h(&c, &b));
            prop_assert_eq!(h(&a, &-a.clone()), 1);
            let one = rint(1);
            if a != one {
                prop_assert_eq!(h(&a, &(&one - &a)), 1);
            }
        }

        #[test]
        fn hilbert_product_formula(a in nonzero(300), b in nonzero(300)) {
            prop_assert!(weilrep::numth::hilbert_product_check(a, b).unwrap());
        }
    }
}

mod lattice {
    use super::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn direct_sums_multiply(l in even_lattice(20), m in even_lattice(20)) {
            let s = l.direct_sum(&m);
            prop_assert_eq!(s.delta(), l.delta() * m.delta());
            let (dl, dm, ds) = (l.discriminant_form().unwrap(), m.discriminant_form().unwrap(), s.discriminant_form().unwrap());
            prop_assert_eq!(ds.milgram_sum().unwrap(), &dl.milgram_sum().unwrap() * &dm.milgram_sum().unwrap());
        }

        #[test]
        fn milgram(l in even_lattice(60)) {
            let d = l.discriminant_form().unwrap();
            let rhs = &ExactScalar::zeta8(l.signature()) * &ExactScalar::sqrt_rat(&rint(l.delta() as i64)).unwrap();
            prop_assert_eq!(d.milgram_sum().unwrap(), rhs);
        }

        #[test]
        fn kernel_and_image_sizes(l in even_lattice(60), c in -12i64..=12) {
            let d = l.discriminant_form().unwrap();
            let (ker, img) = d.subsets_c(c).unwrap();
            prop_assert_eq!((ker.len() * img.len()) as u64, d.delta());
        }

        #[test]
        fn level_divides(l in even_lattice(60)) {
            let d = l.discriminant_form().unwrap();
            prop_assert_eq!((2 * d.delta()) % d.level(), 0);
            prop_assert_eq!(d.delta() % d.exponent(), 0);
            for p in [2u64, 3, 5, 7, 11, 13] {
                prop_assert_eq!(d.delta() % p == 0, d.level() % p == 0);
            }
            if l.rank() % 2 == 1 {
                prop_assert_eq!(d.level() % 4, 0);
            }
        }

        #[test]
        fn beta_c_is_well_defined(l in even_lattice(40), c in nonzero(12)) {
            let d = l.discriminant_form().unwrap();
            let jd = jordan_decompose(&l, 2).unwrap();
            let xc = weilrep::jordan::choose_xc(&l, &jd, &d, c).unwrap().element;
            let value = |alpha: &weilrep::lattice::DFElement| frac(d.q_lift(alpha) * BigInt::from(c) + d.bil_lift(&xc, alpha));
            let (ker, _) = d.subsets_c(c).unwrap();
            for alpha in d.elements().unwrap() {
                for mu in &ker {
                    prop_assert_eq!(value(&d.add(&alpha, mu)), value(&alpha));
                }
            }
        }
    }

    fn frac(r: Rational) -> Rational {
        &r - Rational::from_integer(r.floor().to_integer())
    }
}

mod jordan {
    use super::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn gauss_sums(l in prop_oneof![even_lattice(40), odd_lattice(40)], p in prop_oneof![Just(2u64), Just(3), Just(5)],
                      a in -8i64..=8, c in nonzero(8)) {
            prop_assume!(a % p as i64 != 0 || c % p as i64 != 0);
            prop_assert_eq!(gauss_sum_closed(&l, p, a, c).unwrap(), gauss_sum_brute(&l, p, a, c).unwrap());
        }

        #[test]
        fn negation_conjugates(l in prop_oneof![even_lattice(60), odd_lattice(60)], p in prop_oneof![Just(2u64), Just(3), Just(5), Just(7)]) {
            let neg = l.scaled(-1).unwrap();
            prop_assert_eq!(weil_index_lattice(&neg, p).unwrap(), weil_index_lattice(&l, p).unwrap().conj());
        }

        #[test]
        fn odd_squares(l in even_lattice(60), p in prop_oneof![Just(3u64), Just(5), Just(7)]) {
            let g = weil_index_lattice(&l, p).unwrap();
            let dp = (p as i64).pow(vp(l.delta() as i64, p) as u32);
            let s = legendre(&rint(-1), dp).unwrap();
            prop_assert_eq!(&g * &g, ExactScalar::from_int(s as i64));
        }

        #[test]
        fn p_squared_scaling(l in even_lattice(40), p in prop_oneof![Just(2u64), Just(3), Just(5)]) {
            let scaled = l.scaled((p * p) as i64).unwrap();
            prop_assert_eq!(weil_index_lattice(&scaled, p).unwrap(), weil_index_lattice(&l, p).unwrap());
        }

        #[test]
        fn multiplicative(l in even_lattice(20), m in odd_lattice(20), p in prop_oneof![Just(2u64), Just(3), Just(5)]) {
            let s = l.direct_sum(&m);
            let lhs = weil_index_lattice(&s, p).unwrap();
            prop_assert_eq!(lhs, &weil_index_lattice(&l, p).unwrap() * &weil_index_lattice(&m, p).unwrap());
        }

        #[test]
        fn reciprocity(l in prop_oneof![even_lattice(60), odd_lattice(60)]) {
            let mut primes = l.interesting_primes();
            if !primes.contains(&2) {
                primes.push(2);
            }
            let prod = primes.iter().fold(ExactScalar::one(), |acc, &p| &acc * &weil_index_lattice(&l, p).unwrap());
            prop_assert_eq!(prod, ExactScalar::zeta8(l.signature()));
        }

        #[test]
        fn closed_sums_follow_the_basis(l in even_lattice(40), u in -3i64..=3, p in prop_oneof![Just(2u64), Just(3)], a in nonzero(7), c in nonzero(8)) {
            prop_assume!(l.rank() == 2 && (a % p as i64 != 0 || c % p as i64 != 0));
            // the sums depend on x_c, which moves with the Jordan basis
            let moved = l.change_basis(&[vec![1, u], vec![0, 1]]).unwrap();
            prop_assert_eq!(gauss_sum_closed(&moved, p, a, c).unwrap(), gauss_sum_brute(&moved, p, a, c).unwrap());
        }
    }
}

mod metaplectic {
    use super::*;

    proptest! {
        #[test]
        fn group_axioms(x in mp(), y in mp(), z in mp()) {
            prop_assert_eq!(x.mul(&y).mul(&z), x.mul(&y.mul(&z)));
            prop_assert_eq!(x.mul(&x.inv()), MpElement::identity());
            prop_assert_eq!(x.mul(&MpElement::z()), MpElement::z().mul(&x));
            prop_assert_eq!(MpElement::z().pow(4), MpElement::identity());
        }

        #[test]
        fn cocycle_identity(a in sl2z(), b in sl2z(), c in sl2z(), place in places()) {
            let lhs = sigma(&a, &b, place) * sigma(&a.mul(&b), &c, place);
            prop_assert_eq!(lhs, sigma(&a, &b.mul(&c), place) * sigma(&b, &c, place));
        }

        #[test]
        fn real_cocycle_is_the_branch_sign(a in sl2z(), b in sl2z()) {
            prop_assert_eq!(branch_sign(&a, &b), sigma(&a, &b, Place::Real));
        }

        #[test]
        fn words_multiply_back(x in mp()) {
            let w = weilrep::metaplectic::decompose_st(&x.mat);
            prop_assert_eq!(word_element(&w).mat, x.mat);
        }
    }
}

mod representation {
    use super::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn closed_formula_is_the_oracle(l in even_lattice(12), x in mp()) {
            let r = WeilRep::new(&l).unwrap();
            prop_assert!(r.rho(&x).unwrap().exact_eq(&r.rho_oracle(&x).unwrap()).unwrap());
        }

        #[test]
        fn odd_closed_formula_is_the_oracle(l in odd_lattice(12), x in mp()) {
            let r = WeilRep::new(&l).unwrap();
            let x = if weilrep::metaplectic::gamma_odd_member(&x.mat) { x } else { MpElement::s() };
            prop_assert!(r.rho(&x).unwrap().exact_eq(&r.rho_oracle(&x).unwrap()).unwrap());
        }

        #[test]
        fn homomorphism_and_unitarity(l in even_lattice(12), x in mp(), y in mp()) {
            let r = WeilRep::new(&l).unwrap();
            let lhs = r.rho(&x.mul(&y)).unwrap();
            prop_assert!(lhs.exact_eq(&r.rho(&x).unwrap().mul(&r.rho(&y).unwrap()).unwrap()).unwrap());
            prop_assert!(lhs.is_unitary().unwrap());
        }

        #[test]
        fn traces_ignore_the_basis(l in even_lattice(12), u in -3i64..=3, x in mp()) {
            prop_assume!(l.rank() == 2);
            let moved = l.change_basis(&[vec![1, u], vec![0, 1]]).unwrap();
            let trace = |l: &GramLattice| {
                let r = WeilRep::new(l).unwrap();
                let op = r.rho(&x).unwrap();
                (0..r.dim()).fold(ExactScalar::zero(), |acc, i| &acc + &op.entry(i, i).unwrap())
            };
            prop_assert_eq!(trace(&l), trace(&moved));
        }

        #[test]
        fn central_element(l in even_lattice(12)) {
            let r = WeilRep::new(&l).unwrap();
            let z2 = r.rho_z().mul(&r.rho_z()).unwrap();
            let expected = if l.signature() % 2 == 0 { z2.is_identity().unwrap() } else { z2.neg().is_identity().unwrap() };
            prop_assert!(expected);
        }

        #[test]
        fn local_factors(l in even_lattice(12), x in mp()) {
            let r = WeilRep::new(&l).unwrap();
            for p in r.local_primes() {
                if l.delta() % p != 0 {
                    prop_assert_eq!(r.xi_p(&x, p).unwrap(), ExactScalar::one());
                }
            }
            let s = MpElement::s();
            prop_assert_eq!(ExactScalar::zeta8(r.xi_total_exponent(&s).unwrap()), ExactScalar::zeta8(-l.signature()));
        }

        #[test]
        fn column_support(l in even_lattice(12), x in mp()) {
            let r = WeilRep::new(&l).unwrap();
            let form = r.form();
            let c = x.mat.c;
            let op = r.rho(&x).unwrap();
            let support = if c == 0 { vec![form.zero()] } else { form.coset_dcstar(c).unwrap() };
            for (j, g) in r.elements().iter().enumerate() {
                let dg = form.mul(x.mat.d, g);
                let rows: Vec<usize> = support.iter().map(|b| form.index(&form.add(b, &dg))).collect();
                for i in 0..r.dim() {
                    prop_assert_eq!(!op.is_zero_entry(i, j), rows.contains(&i));
                }
            }
        }

        #[test]
        fn direct_sums_up_to_a_unit(l in even_lattice(6), x in mp()) {
            prop_assume!(x.mat.c != 0 && x.mat.c.abs() <= 6);
            let r = WeilRep::new(&l).unwrap();
            prop_assert!(r.r0_ratio(&x).unwrap().is_some());
        }

        #[test]
        fn phi_is_a_character(l in even_lattice(12), ks in prop::collection::vec(-3i64..=3, 4), s in any::<(bool, bool)>()) {
            let r = WeilRep::new(&l).unwrap();
            let n = r.form().level() as i64;
            // S T^{kN} S⁻¹ and T^k lie over Γ₀(N)
            let g = |k: i64, j: i64, e: bool| {
                let m = SL2Z::S.mul(&SL2Z::t(-k * n)).mul(&SL2Z::S.inv()).mul(&SL2Z::t(j));
                MpElement { mat: m, eps: if e { 1 } else { -1 } }
            };
            let (x, y) = (g(ks[0], ks[1], s.0), g(ks[2], ks[3], s.1));
            prop_assert_eq!(r.phi_char(&x.mul(&y)).unwrap(), &r.phi_char(&x).unwrap() * &r.phi_char(&y).unwrap());
        }
    }
}
