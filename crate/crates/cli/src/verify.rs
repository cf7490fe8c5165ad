//! The `verify` command: every property suite that applies to one lattice,
//! plus the lattice-independent cocycle and lift identities.
//!
//! Suites run concurrently when the library's `parallel` feature is on; the
//! report lists them in a fixed order either way.

use num_integer::Integer;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;
use weilrep::batch::{closed_vs_oracle_sweep, homomorphism_sweep, map_ordered, sample_elements, sample_gamma0, sample_mp, sample_sl2z, SweepReport};
use weilrep::exact::{rat, rint, Rational};
use weilrep::jordan::{gauss_sum_brute, gauss_sum_closed, odd_part};
use weilrep::metaplectic::{cgxde_form, gamma4_lift, i_map, iota_lift, sigma, MpElement, SL2Z};
use weilrep::numth::{hilbert, is_prime, legendre, vp, Place};
use weilrep::weilrep::{braun_check, sl2_residue_lifts, Cover, WeilRep};
use weilrep::{Error, Result};

/// Failures listed in full up to this many per suite.
const SHOWN: usize = 10;
/// Largest level whose residue classes the kernel suite exhausts.
const KERNEL_LEVEL_CAP: u64 = 12;

/// Outcome of one suite.
#[derive(Clone, Debug, Serialize)]
pub struct Suite {
    pub name: &'static str,
    /// The identity being checked.
    pub identity: &'static str,
    pub ok: bool,
    pub checked: usize,
    pub failed: usize,
    /// First few failing instances.
    pub failures: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
}

impl Suite {
    fn new(name: &'static str, identity: &'static str) -> Self {
        Suite { name, identity, ok: true, checked: 0, failed: 0, failures: Vec::new(), skipped: None }
    }

    fn skip(mut self, why: &str) -> Self {
        self.skipped = Some(why.to_string());
        self
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.fail(what());
        }
    }

    fn fail(&mut self, what: String) {
        self.ok = false;
        self.failed += 1;
        if self.failures.len() < SHOWN {
            self.failures.push(what);
        }
    }

    /// Folds a library error into the suite as a failure.
    fn record<T>(&mut self, r: Result<T>, ctx: impl FnOnce() -> String) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.checked += 1;
                self.fail(format!("{}: {e}", ctx()));
                None
            }
        }
    }

    fn absorb(&mut self, r: Result<SweepReport>) {
        if let Some(rep) = self.record(r, || "sweep".into()) {
            self.checked += rep.checked;
            for f in rep.failures {
                self.fail(f);
            }
        }
    }
}

/// Full `verify` output.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub gram: Vec<Vec<i64>>,
    pub even: bool,
    pub ok: bool,
    pub suites: Vec<Suite>,
}

type SuiteFn = fn(&WeilRep) -> Suite;

/// Suites in report order.
pub const SUITES: [(&str, SuiteFn); 14] = [
    ("closed_vs_oracle", closed_vs_oracle),
    ("homomorphism", homomorphism),
    ("relations", relations),
    ("milgram", milgram),
    ("reciprocity", reciprocity),
    ("gauss_sums", gauss_sums),
    ("braun", braun),
    ("tensor", tensor),
    ("kernel", kernel),
    ("phi", phi),
    ("direct_sum", direct_sum),
    ("predicates", predicates),
    ("cocycles", cocycles),
    ("lifts", lifts),
];

/// Runs every suite on `rep`.
pub fn run_all(rep: &WeilRep) -> Report {
    let suites = map_ordered(&SUITES, |(_, f)| f(rep));
    Report {
        gram: rep.lattice().gram().to_vec(),
        even: rep.is_even(),
        ok: suites.iter().all(|s| s.ok),
        suites,
    }
}

fn closed_vs_oracle(rep: &WeilRep) -> Suite {
    let mut s = Suite::new("closed_vs_oracle", "ρ(x) from the closed formula = product of generator images along a word for x");
    let count = if rep.is_even() { 200 } else { 100 };
    let xs = sample_elements(rep, count, 50, 0xA1);
    s.absorb(closed_vs_oracle_sweep(rep, &xs));
    s
}

fn homomorphism(rep: &WeilRep) -> Suite {
    let mut s = Suite::new("homomorphism", "ρ(xy) = ρ(x)ρ(y) and ρ(x)ρ(x)† = I");
    let pairs: Vec<_> = sample_elements(rep, 100, 50, 0xC3).into_iter().zip(sample_elements(rep, 100, 50, 0xC4)).collect();
    s.absorb(homomorphism_sweep(rep, &pairs));
    s
}

fn relations(rep: &WeilRep) -> Suite {
    let mut s = Suite::new("relations", "ρ(S)² = ρ((ST)³) = ρ(Z), ρ(Z)⁴ = I");
    let even = rep.is_even();
    let check = || -> Result<Vec<(&'static str, bool)>> {
        let sop = rep.rho_s()?;
        let z = rep.rho_z();
        let s2 = sop.mul(&sop)?;
        let z2 = z.mul(&z)?;
        let mut out = vec![
            ("ρ(S)² = ρ(Z)", s2.exact_eq(&z)?),
            ("ρ(Z)⁴ = I", z2.mul(&z2)?.is_identity()?),
            ("closed ρ(Z) = ρ(Z)", rep.rho(&MpElement::z())?.exact_eq(&z)?),
        ];
        if even {
            let st = sop.mul(&rep.rho_t()?)?;
            out.push(("ρ((ST)³) = ρ(S)²", st.mul(&st)?.mul(&st)?.exact_eq(&s2)?));
        }
        Ok(out)
    };
    if let Some(results) = s.record(check(), || "generators".into()) {
        for (what, ok) in results {
            s.check(ok, || what.to_string());
        }
    }
    s
}

fn milgram(rep: &WeilRep) -> Suite {
    let s = Suite::new("milgram", "Σ_γ e(q(γ)) = ζ₈^sgn √Δ");
    if !rep.is_even() {
        return s.skip("odd lattice: q is not defined on the discriminant group");
    }
    let mut s = s;
    if let Some(ok) = s.record(rep.milgram_check(), || "milgram sum".into()) {
        s.check(ok, || "Milgram sum".into());
    }
    s
}

fn reciprocity(rep: &WeilRep) -> Suite {
    let mut s = Suite::new("reciprocity", "Π_p γ_p = ζ₈^sgn");
    if let Some(ok) = s.record(rep.weil_reciprocity_check(), || "local indices".into()) {
        s.check(ok, || "product of local Weil indices".into());
    }
    s
}

fn gauss_sums(rep: &WeilRep) -> Suite {
    let mut s = Suite::new("gauss_sums", "closed Gauss sum = brute-force sum, p ∈ {2,3,5}, gcd(a,c) = 1, |a|,|c| ≤ 8");
    let l = rep.lattice();
    let mut capped = 0;
    for p in [2u64, 3, 5] {
        for a in -8i64..=8 {
            for c in (-8i64..=8).filter(|&c| c != 0 && a.gcd(&c) == 1) {
                match (gauss_sum_closed(l, p, a, c), gauss_sum_brute(l, p, a, c)) {
                    (_, Err(Error::EnumerationCap { .. })) => capped += 1,
                    (Ok(x), Ok(y)) => s.check(x == y, || format!("p={p} a={a} c={c}: {x} ≠ {y}")),
                    (x, y) => s.check(false, || format!("p={p} a={a} c={c}: {x:?} vs {y:?}")),
                }
            }
        }
    }
    if capped > 0 {
        s.skipped = Some(format!("{capped} sums above the enumeration cap"));
    }
    s
}

fn braun(rep: &WeilRep) -> Suite {
    let mut s = Suite::new("braun", "Σ_{v ∈ M/cM} e(c·q(v)) matches the Braun closed form for N | c");
    let l = rep.lattice();
    let n = l.level() as i64;
    let top = n.max(12);
    for c in (1..=top).filter(|c| c % n == 0) {
        match braun_check(l, c) {
            Err(Error::EnumerationCap { .. }) => {
                s.skipped = Some(format!("c = {c} above the enumeration cap"));
            }
            r => {
                if let Some(ok) = s.record(r, || format!("c={c}")) {
                    s.check(ok, || format!("c={c}"));
                }
            }
        }
    }
    s
}

fn tensor(rep: &WeilRep) -> Suite {
    let s = Suite::new("tensor", "ρ(S), ρ(T) = ⊗_p of the p-part generators");
    if !rep.is_even() {
        return s.skip("odd lattice: T has no image");
    }
    let mut s = s;
    if let Some(ok) = s.record(rep.tensor_check(), || "tensor product".into()) {
        s.check(ok, || "tensor decomposition over the primes dividing Δ".into());
    }
    s
}

fn kernel(rep: &WeilRep) -> Suite {
    let s = Suite::new("kernel", "ρ(A, ε) = I exactly for the lifts the kernel descriptor predicts");
    if !rep.is_even() {
        return s.skip("odd lattice");
    }
    let mut s = s;
    let Some(desc) = s.record(rep.kernel_descriptor(), || "descriptor".into()) else {
        return s;
    };
    if desc.level > KERNEL_LEVEL_CAP {
        return s.skip(&format!("level {} above {KERNEL_LEVEL_CAP}", desc.level));
    }
    for class in sl2_residue_lifts(desc.level as i64, 2) {
        for a in &class {
            let trivial = [1i8, -1].map(|eps| rep.is_in_kernel(&MpElement { mat: *a, eps }));
            let mut count = 0;
            for t in trivial {
                if let Some(true) = s.record(t, || format!("{a}")) {
                    count += 1;
                }
            }
            let expected = match (desc.base_contains(a), desc.cover) {
                (false, _) => 0,
                (true, Cover::Lift) => 1,
                (true, Cover::DoubleCover) => 2,
            };
            s.check(count == expected, || format!("{a}: {count} trivial lifts, expected {expected}"));
        }
    }
    s
}

fn phi(rep: &WeilRep) -> Suite {
    let s = Suite::new("phi", "ρ(x)e₀ = φ(x)e₀ and φ(xy) = φ(x)φ(y) on Γ₀(N)");
    if !rep.is_even() {
        return s.skip("odd lattice");
    }
    let mut s = s;
    let n = rep.form().level() as i64;
    let zero = rep.form().index(&rep.form().zero());
    let mut rng = StdRng::seed_from_u64(0x17);
    let draw = |rng: &mut StdRng| MpElement { mat: sample_gamma0(rng, n, 50), eps: if rng.gen_bool(0.5) { 1 } else { -1 } };
    for _ in 0..50 {
        let (x, y) = (draw(&mut rng), draw(&mut rng));
        let check = || -> Result<bool> {
            let (px, py) = (rep.phi_char(&x)?, rep.phi_char(&y)?);
            let mult = rep.phi_char(&x.mul(&y))? == &px * &py;
            let op = rep.rho(&x)?;
            let column = op.entry(zero, zero)? == px && (0..rep.dim()).all(|r| r == zero || op.is_zero_entry(r, zero));
            Ok(mult && column)
        };
        if let Some(ok) = s.record(check(), || format!("{x}, {y}")) {
            s.check(ok, || format!("{x}, {y}"));
        }
    }
    s
}

fn direct_sum(rep: &WeilRep) -> Suite {
    let s = Suite::new("direct_sum", "the r₀ operator summed over M/cM is a unit multiple of ρ(A, ε)");
    if !rep.is_even() {
        return s.skip("odd lattice");
    }
    let mut s = s;
    let mut rng = StdRng::seed_from_u64(0x20);
    let m = rep.rank() as u32;
    let mut done = 0;
    while done < 20 {
        let x = sample_mp(&mut rng, 6, false);
        let c = x.mat.c.unsigned_abs();
        if c == 0 || c.pow(m) > 10_000 {
            continue;
        }
        done += 1;
        if let Some(mu) = s.record(rep.r0_ratio(&x), || format!("{x}")) {
            s.check(mu.is_some(), || format!("{x}"));
        }
    }
    s
}

fn predicates(rep: &WeilRep) -> Suite {
    let s = Suite::new("predicates", "p | Δ ⇔ p | N, and odd rank forces 4 | N");
    if !rep.is_even() {
        return s.skip("odd lattice");
    }
    let mut s = s;
    let l = rep.lattice();
    let (delta, n) = (l.delta(), l.level());
    for p in (2..=50u64).filter(|&p| is_prime(p)) {
        s.check((delta % p == 0) == (n % p == 0), || format!("p={p} divides only one of Δ={delta}, N={n}"));
    }
    s.check(l.rank().is_multiple_of(2) || n % 4 == 0, || format!("odd rank with N={n}"));
    s
}

fn random_rat<R: Rng>(rng: &mut R, zero_ok: bool) -> Rational {
    loop {
        let n = rng.gen_range(-40i64..=40);
        if zero_ok || n != 0 {
            return rat(n, rng.gen_range(1i64..=12));
        }
    }
}

const PLACES: [Place; 4] = [Place::Real, Place::Prime(2), Place::Prime(3), Place::Prime(5)];

fn hil(x: &Rational, y: &Rational, p: Place) -> Option<i8> {
    hilbert(x, y, p).ok()
}

fn cocycles(_: &WeilRep) -> Suite {
    let mut s = Suite::new("cocycles", "σ is a 2-cocycle; σ on (c,g,x,d,e) as Hilbert symbols; Jacobi reciprocity; Hilbert symbols of units");
    let mut rng = StdRng::seed_from_u64(0xE5);
    for _ in 0..500 {
        let (a, b, c) = (sample_sl2z(&mut rng, 30), sample_sl2z(&mut rng, 30), sample_sl2z(&mut rng, 30));
        for place in PLACES {
            let lhs = sigma(&a, &b, place) * sigma(&a.mul(&b), &c, place);
            let rhs = sigma(&a, &b.mul(&c), place) * sigma(&b, &c, place);
            s.check(lhs == rhs, || format!("σ cocycle at {place:?}: {a}, {b}, {c}"));
        }
    }
    let mut tuples = 0;
    while tuples < 200 {
        let (c, g) = (random_rat(&mut rng, false), random_rat(&mut rng, false));
        let (d, e) = (random_rat(&mut rng, true), random_rat(&mut rng, true));
        let x = &c * &e + &d * &g;
        if x == rint(0) {
            continue;
        }
        tuples += 1;
        for place in PLACES {
            let expected = hil(&c, &g, place).zip(hil(&x, &-(&c * &g), place)).map(|(u, v)| u * v);
            s.check(cgxde_form(&c, &g, &d, &e, place).ok() == expected, || format!("cgxde {c} {g} {d} {e} at {place:?}"));
        }
    }
    let mut pairs = 0;
    while pairs < 500 {
        let (r, t) = (rng.gen_range(-200i64..=200), rng.gen_range(-200i64..=200));
        if r == 0 || t == 0 || r.gcd(&t) != 1 {
            continue;
        }
        pairs += 1;
        let lhs = legendre(&rint(r), odd_part(t)).ok().zip(legendre(&rint(t), odd_part(r)).ok()).map(|(u, v)| u * v);
        let rhs = hil(&rint(r), &rint(t), Place::Prime(2)).zip(hil(&rint(r), &rint(t), Place::Real)).map(|(u, v)| u * v);
        s.check(lhs.is_some() && lhs == rhs, || format!("Jacobi reciprocity via Hilbert symbols at ({r}, {t})"));
    }
    for p in [2i64, 3, 5, 7] {
        let place = Place::Prime(p as u64);
        let unit = |x: i64| x != 0 && x % p != 0;
        let mut done = 0;
        while done < 100 {
            let (u, v, y) = (rng.gen_range(-500i64..=500), rng.gen_range(-500i64..=500), rng.gen_range(-500i64..=500));
            let t = rng.gen_range(-50i64..=50);
            if !unit(u) || !unit(v) || y == 0 || (p == 2 && u.rem_euclid(4) != 1) {
                continue;
            }
            done += 1;
            let (ur, vr, yr) = (rint(u), rint(v), rint(y));
            let pv = rint(p.pow(vp(y, p as u64) as u32));
            let mut ok = hil(&ur, &vr, place) == Some(1) && hil(&ur, &yr, place) == hil(&ur, &pv, place);
            let w = u + t * y;
            let y4 = y % 4 == 0;
            let side = (y4 && (y / 4) % p == 0) || y == p.pow(vp(y, p as u64) as u32) || unit(w);
            if y4 && side && w != 0 {
                ok &= hil(&rint(w), &yr, place) == hil(&ur, &yr, place);
            }
            s.check(ok, || format!("Hilbert symbols of units at p={p}: u={u} v={v} y={y} t={t}"));
        }
    }
    s
}

fn gamma1_4(rng: &mut StdRng) -> SL2Z {
    let m = sample_gamma0(rng, 4, 50);
    if m.a.rem_euclid(4) == 1 {
        m
    } else {
        m.neg()
    }
}

fn lifts(_: &WeilRep) -> Suite {
    let mut s = Suite::new("lifts", "ι_p(AB) = ι_p(A)ι_p(B)σ_p(A,B); Γ₁(4) splitting and i-map are multiplicative");
    let mut rng = StdRng::seed_from_u64(0xF6);
    let iota_ok = |a: &SL2Z, b: &SL2Z, p: u64| {
        let lhs = iota_lift(&a.mul(b), p);
        let rhs = iota_lift(a, p).and_then(|x| Ok(x * iota_lift(b, p)? * sigma(a, b, Place::Prime(p))));
        lhs.is_ok() && lhs.ok() == rhs.ok()
    };
    for p in [3u64, 5] {
        for _ in 0..200 {
            let (a, b) = (sample_sl2z(&mut rng, 50), sample_sl2z(&mut rng, 50));
            s.check(iota_ok(&a, &b, p), || format!("ι at p={p} on {a}, {b}"));
        }
    }
    for _ in 0..200 {
        let (a, b) = (gamma1_4(&mut rng), gamma1_4(&mut rng));
        s.check(iota_ok(&a, &b, 2), || format!("ι at p=2 on {a}, {b}"));
        let prod = gamma4_lift(&a.mul(&b));
        let split = gamma4_lift(&a).and_then(|x| Ok(x.mul(&gamma4_lift(&b)?)));
        s.check(prod.is_ok() && prod.ok() == split.ok(), || format!("Γ₁(4) lift on {a}, {b}"));
    }
    for _ in 0..200 {
        let (x, y) = (sample_mp(&mut rng, 50, false), sample_mp(&mut rng, 50, false));
        let (ix, iy, ixy) = (i_map(&x), i_map(&y), i_map(&x.mul(&y)));
        s.check(ixy.1 == sigma(&x.mat, &y.mat, Place::Prime(2)) * ix.1 * iy.1, || format!("i-map on {x}, {y}"));
    }
    s
}
