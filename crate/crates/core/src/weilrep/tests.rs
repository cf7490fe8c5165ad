use super::*;
use crate::exact::rat;
use crate::metaplectic::SL2Z;

fn rep(gram: Vec<Vec<i64>>) -> WeilRep {
    WeilRep::new(&GramLattice::new(gram).unwrap()).unwrap()
}

fn mp(a: i64, b: i64, c: i64, d: i64, eps: i8) -> MpElement {
    MpElement::new(SL2Z::new(a, b, c, d).unwrap(), eps).unwrap()
}

fn even_corpus() -> Vec<WeilRep> {
    [
        vec![vec![2]],
        vec![vec![-2]],
        vec![vec![4]],
        vec![vec![6]],
        vec![vec![2, 1], vec![1, 2]],
        vec![vec![0, 1], vec![1, 0]],
        vec![vec![2, 0], vec![0, 4]],
        vec![vec![2, 1], vec![1, 4]],
        vec![vec![0, 2], vec![2, 0]],
    ]
    .into_iter()
    .map(rep)
    .collect()
}

fn odd_corpus() -> Vec<WeilRep> {
    [vec![vec![1]], vec![vec![3]], vec![vec![5]], vec![vec![1, 0], vec![0, 2]], vec![vec![1, 0], vec![0, 1]]]
        .into_iter()
        .map(rep)
        .collect()
}

fn small_matrices(bound: i64) -> Vec<SL2Z> {
    let mut out = Vec::new();
    for a in -bound..=bound {
        for b in -bound..=bound {
            for c in -bound..=bound {
                for d in -bound..=bound {
                    if a * d - b * c == 1 {
                        out.push(SL2Z { a, b, c, d });
                    }
                }
            }
        }
    }
    out
}

#[test]
fn a1_generators() {
    let r = rep(vec![vec![2]]);
    let t = r.rho_t().unwrap().entries().unwrap();
    assert_eq!(t[0][0], ExactScalar::one());
    assert_eq!(t[1][1], ExactScalar::e(&rat(1, 4)));
    let s = r.rho_s().unwrap().entries().unwrap();
    let h = ExactScalar::sqrt_rat(&rat(1, 2)).unwrap();
    let z = ExactScalar::zeta8(-1);
    assert_eq!(s[0][0], &z * &h);
    assert_eq!(s[1][1], &(&z * &h) * &ExactScalar::from_int(-1));
    let zz = r.rho_z().entries().unwrap();
    let mi = -&ExactScalar::i();
    assert_eq!(zz[0][0], mi);
    assert_eq!(zz[1][1], mi);
}

#[test]
fn odd_unimodular_s() {
    let r = rep(vec![vec![1]]);
    let s = r.rho_oracle(&MpElement::s()).unwrap().entries().unwrap();
    assert_eq!(s[0][0], ExactScalar::zeta8(-1));
    let c = r.rho(&MpElement::s()).unwrap().entries().unwrap();
    assert_eq!(c[0][0], ExactScalar::zeta8(-1));
}

#[test]
fn closed_matches_oracle_even() {
    for r in even_corpus() {
        for m in small_matrices(3) {
            for eps in [1, -1] {
                let x = MpElement::new(m, eps).unwrap();
                let closed = r.rho(&x).unwrap();
                let oracle = r.rho_oracle(&x).unwrap();
                assert!(closed.exact_eq(&oracle).unwrap(), "{:?} at {x}", r.lattice().gram());
            }
        }
    }
}

#[test]
fn closed_matches_oracle_odd() {
    for r in odd_corpus() {
        for m in small_matrices(4).into_iter().filter(gamma_odd_member) {
            for eps in [1, -1] {
                let x = MpElement::new(m, eps).unwrap();
                let closed = r.rho(&x).unwrap();
                let oracle = r.rho_oracle(&x).unwrap();
                assert!(closed.exact_eq(&oracle).unwrap(), "{:?} at {x}", r.lattice().gram());
            }
        }
    }
}

#[test]
fn odd_lattice_rejects_t() {
    let r = rep(vec![vec![1]]);
    assert!(r.rho(&MpElement::t(1)).is_err());
    assert!(r.rho_t().is_err());
}

#[test]
fn global_checks() {
    for r in even_corpus() {
        assert!(r.milgram_check().unwrap());
        assert!(r.weil_reciprocity_check().unwrap());
        assert!(r.tensor_check().unwrap(), "{:?}", r.lattice().gram());
    }
    for r in odd_corpus() {
        assert!(r.milgram_check().is_err());
        assert!(r.weil_reciprocity_check().unwrap());
    }
}

#[test]
fn kernel_descriptors() {
    let a1 = rep(vec![vec![2]]).kernel_descriptor().unwrap();
    assert_eq!((a1.base, a1.cover, a1.level, a1.exponent), (KernelBase::GammaN, Cover::Lift, 4, 2));
    let a2 = rep(vec![vec![2, 1], vec![1, 2]]).kernel_descriptor().unwrap();
    assert_eq!((a2.base, a2.cover, a2.level), (KernelBase::Gamma, Cover::DoubleCover, 3));
    let d = rep(vec![vec![2, 0], vec![0, 4]]).kernel_descriptor().unwrap();
    assert_eq!((d.base, d.level), (KernelBase::GammaN, 8));
}

#[test]
fn braun_examples() {
    let a1 = GramLattice::new(vec![vec![2]]).unwrap();
    for c in [4, 8, -4, 12] {
        assert!(braun_check(&a1, c).unwrap(), "c = {c}");
    }
    let a2 = GramLattice::new(vec![vec![2, 1], vec![1, 2]]).unwrap();
    for c in [3, -3, 6, 9] {
        assert!(braun_check(&a2, c).unwrap(), "c = {c}");
    }
    assert!(braun_check(&a1, 2).is_err());
}

#[test]
fn direct_sums_agree_up_to_unit() {
    for r in even_corpus().into_iter().take(5) {
        for m in small_matrices(2).into_iter().filter(|m| m.c != 0) {
            let x = MpElement::new(m, 1).unwrap();
            assert!(r.r0_ratio(&x).unwrap().is_some(), "{:?} at {x}", r.lattice().gram());
        }
    }
}

#[test]
fn phi_on_gamma0() {
    let r = rep(vec![vec![2]]);
    let x = mp(1, 0, 4, 1, 1);
    let lhs = r.rho(&x).unwrap().entries().unwrap();
    assert_eq!(lhs[0][0], r.phi_char(&x).unwrap());
}

#[test]
fn residue_lifts_cover_sl2() {
    assert_eq!(sl2_residue_lifts(4, 2).len(), 48);
    assert_eq!(sl2_residue_lifts(3, 2).len(), 24);
    assert!(sl2_residue_lifts(4, 2).iter().all(|v| v.len() == 2));
}
