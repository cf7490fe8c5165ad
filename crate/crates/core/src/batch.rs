//! Seeded sampling of group elements and batch comparison sweeps.
//!
//! Every sweep evaluates independent `(lattice, element)` pairs. With the
//! `parallel` feature the work is spread over rayon's pool; the sequential
//! versions are always available and produce identical reports.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::error::Result;
use crate::metaplectic::{gamma_odd_member, MpElement, SL2Z};
use crate::weilrep::WeilRep;

/// Uniform sample from `SL₂(ℤ)` with all entries bounded by `bound` in absolute value.
pub fn sample_sl2z<R: Rng>(rng: &mut R, bound: i64) -> SL2Z {
    sample_with_column(rng, bound, |rng| (rng.gen_range(-bound..=bound), rng.gen_range(-bound..=bound)))
}

/// Uniform sample from the matrices of `Γ₀(n)` with entries bounded by `bound`.
pub fn sample_gamma0<R: Rng>(rng: &mut R, n: i64, bound: i64) -> SL2Z {
    let k = bound / n;
    sample_with_column(rng, bound, |rng| (rng.gen_range(-bound..=bound), n * rng.gen_range(-k..=k)))
}

/// Draws a first column from `column` and completes it. Each column admits at
/// most `2·bound + 1` completions, so accepting slot `i` of that many gives
/// every matrix the same weight.
fn sample_with_column<R: Rng>(rng: &mut R, bound: i64, column: impl Fn(&mut R) -> (i64, i64)) -> SL2Z {
    use num_integer::Integer;
    let bound = bound.max(1);
    let slots = (2 * bound + 1) as usize;
    loop {
        let (a, c) = column(rng);
        let e = a.extended_gcd(&c);
        if e.gcd != 1 {
            continue;
        }
        // all solutions: d = x + t·c, b = y + t·a
        let (x, y) = (e.x, -e.y);
        let ts: Vec<i64> = (-2 * bound - 2..=2 * bound + 2)
            .filter(|&t| (x + t * c).abs() <= bound && (y + t * a).abs() <= bound)
            .collect();
        let i = rng.gen_range(0..slots);
        if let Some(&t) = ts.get(i) {
            return SL2Z { a, b: y + t * a, c, d: x + t * c };
        }
    }
}

/// Uniform sample from `Γ_odd` with bounded entries.
pub fn sample_gamma_odd<R: Rng>(rng: &mut R, bound: i64) -> SL2Z {
    loop {
        let m = sample_sl2z(rng, bound);
        if gamma_odd_member(&m) {
            return m;
        }
    }
}

/// Random `(A, ε)` over [`sample_sl2z`] or, for `odd`, [`sample_gamma_odd`].
pub fn sample_mp<R: Rng>(rng: &mut R, bound: i64, odd: bool) -> MpElement {
    let mat = if odd { sample_gamma_odd(rng, bound) } else { sample_sl2z(rng, bound) };
    let eps = if rng.gen_bool(0.5) { 1 } else { -1 };
    MpElement { mat, eps }
}

/// `count` elements from a fixed seed, in the domain of `rep`.
pub fn sample_elements(rep: &WeilRep, count: usize, bound: i64, seed: u64) -> Vec<MpElement> {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..count).map(|_| sample_mp(&mut rng, bound, !rep.is_even())).collect()
}

/// Outcome of comparing two evaluation routes over a sample.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SweepReport {
    pub checked: usize,
    pub failures: Vec<String>,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn collect(results: Vec<Result<Option<String>>>) -> Result<Self> {
        let mut report = SweepReport { checked: results.len(), failures: Vec::new() };
        for r in results {
            if let Some(f) = r? {
                report.failures.push(f);
            }
        }
        Ok(report)
    }
}

fn closed_vs_oracle(rep: &WeilRep, x: &MpElement) -> Result<Option<String>> {
    let ok = rep.rho(x)?.exact_eq(&rep.rho_oracle(x)?)?;
    Ok((!ok).then(|| x.to_string()))
}

fn homomorphism(rep: &WeilRep, (x, y): &(MpElement, MpElement)) -> Result<Option<String>> {
    let lhs = rep.rho(&x.mul(y))?;
    let rhs = rep.rho(x)?.mul(&rep.rho(y)?)?;
    let ok = lhs.exact_eq(&rhs)? && lhs.is_unitary()?;
    Ok((!ok).then(|| format!("{x} · {y}")))
}

/// Closed formula against the word oracle, one element at a time.
pub fn closed_vs_oracle_seq(rep: &WeilRep, xs: &[MpElement]) -> Result<SweepReport> {
    SweepReport::collect(xs.iter().map(|x| closed_vs_oracle(rep, x)).collect())
}

/// `ρ(xy) = ρ(x)ρ(y)` and unitarity, one pair at a time.
pub fn homomorphism_seq(rep: &WeilRep, pairs: &[(MpElement, MpElement)]) -> Result<SweepReport> {
    SweepReport::collect(pairs.iter().map(|p| homomorphism(rep, p)).collect())
}

#[cfg(feature = "parallel")]
mod par {
    use rayon::prelude::*;

    use super::*;

    /// Closed formula against the word oracle on rayon's pool.
    pub fn closed_vs_oracle_par(rep: &WeilRep, xs: &[MpElement]) -> Result<SweepReport> {
        SweepReport::collect(xs.par_iter().map(|x| closed_vs_oracle(rep, x)).collect())
    }

    /// Homomorphism and unitarity on rayon's pool.
    pub fn homomorphism_par(rep: &WeilRep, pairs: &[(MpElement, MpElement)]) -> Result<SweepReport> {
        SweepReport::collect(pairs.par_iter().map(|p| homomorphism(rep, p)).collect())
    }
}

#[cfg(feature = "parallel")]
pub use par::{closed_vs_oracle_par, homomorphism_par};

/// Closed formula against the word oracle, in parallel when available.
pub fn closed_vs_oracle_sweep(rep: &WeilRep, xs: &[MpElement]) -> Result<SweepReport> {
    #[cfg(feature = "parallel")]
    return closed_vs_oracle_par(rep, xs);
    #[cfg(not(feature = "parallel"))]
    return closed_vs_oracle_seq(rep, xs);
}

/// Homomorphism and unitarity, in parallel when available.
pub fn homomorphism_sweep(rep: &WeilRep, pairs: &[(MpElement, MpElement)]) -> Result<SweepReport> {
    #[cfg(feature = "parallel")]
    return homomorphism_par(rep, pairs);
    #[cfg(not(feature = "parallel"))]
    return homomorphism_seq(rep, pairs);
}

/// Maps `f` over `items`, in parallel when available, keeping the input order.
pub fn map_ordered<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::GramLattice;

    #[test]
    fn samples_stay_in_range() {
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..500 {
            let m = sample_sl2z(&mut rng, 50);
            assert_eq!(m.a * m.d - m.b * m.c, 1);
            assert!([m.a, m.b, m.c, m.d].iter().all(|x| x.abs() <= 50));
            assert!(gamma_odd_member(&sample_gamma_odd(&mut rng, 20)));
            assert!(sample_gamma0(&mut rng, 4, 50).in_gamma0(4));
        }
    }

    #[test]
    fn seeded_samples_repeat() {
        let rep = WeilRep::new(&GramLattice::new(vec![vec![2]]).unwrap()).unwrap();
        assert_eq!(sample_elements(&rep, 20, 30, 1), sample_elements(&rep, 20, 30, 1));
    }

    #[test]
    fn sequential_and_default_sweeps_agree() {
        let rep = WeilRep::new(&GramLattice::new(vec![vec![2, 1], vec![1, 2]]).unwrap()).unwrap();
        let xs = sample_elements(&rep, 30, 20, 3);
        let a = closed_vs_oracle_seq(&rep, &xs).unwrap();
        let b = closed_vs_oracle_sweep(&rep, &xs).unwrap();
        assert_eq!(a, b);
        assert!(a.passed());
    }
}
