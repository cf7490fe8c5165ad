//! Kernel predictions, the direct `r₀` sums, and global consistency checks.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use serde::Serialize;

use super::{zeta8_exponent, PhaseMatrix, WeilRep};
use crate::error::{Error, Result};
use crate::exact::{ExactScalar, Rational};
use crate::lattice::{GramLattice, PPart};
use crate::metaplectic::{MpElement, SL2Z};
use crate::numth::vp;

/// Largest `|c|^m` summed over directly.
pub const DIRECT_SUM_CAP: u128 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum KernelBase {
    /// `Γ₀⁰(N)` with `a ≡ d ≡ 1 (mod Ñ)`.
    Gamma,
    /// `Γ(N)`.
    GammaN,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Cover {
    Lift,
    DoubleCover,
}

/// Predicted shape of `ker ρ_M` for an even lattice.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KernelDescriptor {
    pub base: KernelBase,
    pub cover: Cover,
    pub level: u64,
    pub exponent: u64,
}

impl KernelDescriptor {
    /// Whether `A` lies in the predicted base group.
    pub fn base_contains(&self, a: &SL2Z) -> bool {
        let (n, e) = (self.level as i64, self.exponent as i64);
        match self.base {
            KernelBase::GammaN => a.in_gamma(n),
            KernelBase::Gamma => {
                a.b.rem_euclid(n) == 0
                    && a.c.rem_euclid(n) == 0
                    && (a.a - 1).rem_euclid(e) == 0
                    && (a.d - 1).rem_euclid(e) == 0
            }
        }
    }
}

fn cap_check(c: i64, m: usize) -> Result<u64> {
    let size = (c.unsigned_abs() as u128).checked_pow(m as u32).unwrap_or(u128::MAX);
    if size > DIRECT_SUM_CAP {
        return Err(Error::EnumerationCap { what: "M/cM".into(), size, cap: DIRECT_SUM_CAP });
    }
    Ok(size as u64)
}

/// Calls `f` on every integer vector in `[0, c)^m`.
fn for_each_residue(c: u64, m: usize, mut f: impl FnMut(&[i64])) {
    let mut v = vec![0i64; m];
    loop {
        f(&v);
        let mut i = 0;
        loop {
            if i == m {
                return;
            }
            v[i] += 1;
            if (v[i] as u64) < c {
                break;
            }
            v[i] = 0;
            i += 1;
        }
    }
}

/// `Σ_k counts[k]·ζ_order^k` as an exact scalar.
fn group_ring_sum(counts: &[i64]) -> ExactScalar {
    let order = counts.len() as u32;
    let ring = super::Ring::new(order);
    let mut acc = vec![0i128; ring.phi()];
    for (k, &n) in counts.iter().enumerate() {
        if n != 0 {
            for (a, m) in acc.iter_mut().zip(ring.monomial(k as u32)) {
                *a += n as i128 * m;
            }
        }
    }
    let coeffs: Vec<Rational> = acc.iter().map(|&c| Rational::from_integer(BigInt::from(c))).collect();
    ExactScalar::from_coeffs(order, &coeffs).expect("φ(order) coefficients")
}

fn quad(g: &[Vec<i64>], x: &[i64], y: &[i64]) -> i64 {
    let mut s = 0;
    for (i, xi) in x.iter().enumerate() {
        for (j, yj) in y.iter().enumerate() {
            s += xi * g[i][j] * yj;
        }
    }
    s
}

/// Braun's formula `Σ_{η∈M/cM} e(η²/2c) = ζ₈^{sgn} c^{m/2} √Δ_M` for `N | c`,
/// with the complex conjugate on the right for `c < 0`.
pub fn braun_check(lat: &GramLattice, c: i64) -> Result<bool> {
    let n = lat.level() as i64;
    if c == 0 || c % n != 0 {
        return Err(Error::Validation(format!("Braun's formula needs N = {n} to divide c = {c}")));
    }
    let m = lat.rank();
    let size = cap_check(c, m)?;
    let den = 2 * c.unsigned_abs();
    let mut counts = vec![0i64; den as usize];
    let g = lat.gram();
    for_each_residue(c.unsigned_abs(), m, |eta| {
        let q = quad(g, eta, eta).rem_euclid(den as i64);
        counts[q as usize] += 1;
    });
    // counts were taken against e(·/2|c|), so for c < 0 both sides are conjugated
    let lhs = group_ring_sum(&counts);
    let rhs = &ExactScalar::zeta8(lat.signature())
        * &ExactScalar::sqrt_rat(&Rational::from_integer(BigInt::from(size) * BigInt::from(lat.delta())))?;
    Ok(lhs == rhs)
}

impl WeilRep {
    /// `(T_p, S_p)` on `D_{M_p}` and the projection data.
    pub fn rho_p_generators(&self, p: u64) -> Result<(PhaseMatrix, PhaseMatrix, PPart)> {
        if !self.is_even() {
            return Err(Error::Validation("p-part generators need an even lattice".into()));
        }
        let part = self.form().p_part(p);
        let f = &part.form;
        let elems = f.elements()?;
        let n = elems.len();
        let w = match self.jordan_at(p) {
            Some((_, w)) => w,
            None => zeta8_exponent(&crate::jordan::weil_index_lattice(self.lattice(), p)?)?,
        };
        let root = self.zeta8_phase(-w);
        let mut t = vec![None; n * n];
        let mut s = vec![None; n * n];
        for (i, d) in elems.iter().enumerate() {
            t[i * n + i] = Some(self.phase(&f.q(d))?);
            for (j, g) in elems.iter().enumerate() {
                s[i * n + j] = Some((self.phase(&-f.bil(g, d))? + root) % self.order());
            }
        }
        let one = Rational::from_integer(1.into());
        Ok((PhaseMatrix::new(n, one, t), PhaseMatrix::new(n, Rational::new(1.into(), BigInt::from(n)), s), part))
    }

    /// Tensor product over the interesting primes of the local generators,
    /// compared with `ρ(T)` and `ρ(S)`.
    pub fn tensor_check(&self) -> Result<bool> {
        let n = self.dim();
        let mut t_ph = vec![Some(0u32); n * n];
        let mut s_ph = vec![Some(0u32); n * n];
        let mut s_scale = Rational::from_integer(1.into());
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    t_ph[i * n + j] = None;
                }
            }
        }
        let primes = crate::numth::prime_divisors(self.form().delta());
        for p in primes {
            let (tp, sp, part) = self.rho_p_generators(p)?;
            let f = &part.form;
            let idx: Vec<usize> = self.elements().iter().map(|g| f.index(&part.project(g))).collect();
            s_scale *= &sp.scale;
            for i in 0..n {
                for j in 0..n {
                    let k = i * n + j;
                    let (pi, pj) = (idx[i], idx[j]);
                    t_ph[k] = match (t_ph[k], tp.at(pi, pj)) {
                        (Some(x), Some(y)) => Some((x + y) % self.order()),
                        _ => None,
                    };
                    s_ph[k] = match (s_ph[k], sp.at(pi, pj)) {
                        (Some(x), Some(y)) => Some((x + y) % self.order()),
                        _ => None,
                    };
                }
            }
        }
        let one = Rational::from_integer(1.into());
        let t = PhaseMatrix::new(n, one, t_ph).to_operator(self.ring());
        let s = PhaseMatrix::new(n, s_scale, s_ph).to_operator(self.ring());
        Ok(t.exact_eq(&self.rho_t()?)? && s.exact_eq(&self.rho_s()?)?)
    }

    /// `Π_p γ(f_p) = ζ₈^{sgn}`.
    pub fn weil_reciprocity_check(&self) -> Result<bool> {
        let mut k = 0;
        for p in self.local_primes() {
            let (_, w) = self.jordan_at(p).expect("listed prime");
            k += w;
        }
        Ok((k - self.signature()).rem_euclid(8) == 0)
    }

    /// `Σ_γ e(γ²/2) = ζ₈^{sgn} √Δ`.
    pub fn milgram_check(&self) -> Result<bool> {
        let lhs = self.form().milgram_sum()?;
        let rhs = &ExactScalar::zeta8(self.signature())
            * &ExactScalar::sqrt_rat(&Rational::from_integer(BigInt::from(self.dim())))?;
        Ok(lhs == rhs)
    }

    /// Matrix of the tensored `r₀` operators for `c ≠ 0`:
    /// `(|c|^{m/2}√Δ)⁻¹ Σ_{η∈M/cM} e(d/c·γ²/2 − (γ,δ+η)/c + a/c·(δ+η)²/2)` at `(δ, γ)`.
    pub fn r0_direct(&self, a: &SL2Z) -> Result<Vec<Vec<ExactScalar>>> {
        let (aa, c, d) = (a.a, a.c, a.d);
        if c == 0 {
            return Err(Error::Validation("the direct sum needs c ≠ 0".into()));
        }
        let m = self.rank();
        let size = cap_check(c, m)?;
        let form = self.form();
        let e = form.exponent() as i64;
        // lifts are (integer vector)/Ñ
        let lifts: Vec<Vec<i64>> = self
            .elements()
            .iter()
            .map(|g| {
                form.lift(g)
                    .iter()
                    .map(|x| {
                        let y = x * Rational::from_integer(BigInt::from(e));
                        i64::try_from(y.to_integer()).expect("lift numerator fits")
                    })
                    .collect()
            })
            .collect();
        let g = self.lattice().gram();
        // value · 2cÑ² = d·γ² − 2(γ, δ+η) + a·(δ+η)² with γ, δ scaled by Ñ
        let den = (2 * c.abs() * e * e) as usize;
        let sgn = c.signum();
        let n = self.dim();
        let norm = ExactScalar::sqrt_rat(&Rational::new(1.into(), BigInt::from(size) * BigInt::from(n)))?;
        let mut out = vec![vec![ExactScalar::zero(); n]; n];
        let mut cache: BTreeMap<Vec<i64>, ExactScalar> = BTreeMap::new();
        for (j, gl) in lifts.iter().enumerate() {
            let gg = quad(g, gl, gl);
            for (i, dl) in lifts.iter().enumerate() {
                let mut counts = vec![0i64; den];
                let mut shifted = vec![0i64; m];
                for_each_residue(c.unsigned_abs(), m, |eta| {
                    for k in 0..m {
                        shifted[k] = dl[k] + e * eta[k];
                    }
                    let v = d * gg - 2 * quad(g, gl, &shifted) + aa * quad(g, &shifted, &shifted);
                    let k = (sgn * v).rem_euclid(den as i64);
                    counts[k as usize] += 1;
                });
                let s = cache.entry(counts.clone()).or_insert_with(|| group_ring_sum(&counts)).clone();
                out[i][j] = &s * &norm;
            }
        }
        Ok(out)
    }

    /// `μ` with `r₀(A) = μ·ρ(A, ε)`, provided it exists and `|μ| = 1`.
    pub fn r0_ratio(&self, x: &MpElement) -> Result<Option<ExactScalar>> {
        let r0 = self.r0_direct(&x.mat)?;
        let rho = self.rho(x)?.entries()?;
        let Some(mu) = super::proportional(&r0, &rho)? else {
            return Ok(None);
        };
        Ok((&mu * &mu.conj() == ExactScalar::one()).then_some(mu))
    }

    /// `ρ(x)` is the identity.
    pub fn is_in_kernel(&self, x: &MpElement) -> Result<bool> {
        self.rho(x)?.is_identity()
    }

    /// Predicted kernel shape for an even lattice.
    pub fn kernel_descriptor(&self) -> Result<KernelDescriptor> {
        if !self.is_even() {
            return Err(Error::Validation("the kernel descriptor covers even lattices".into()));
        }
        let exponent = self.form().exponent();
        let level = self.form().level();
        let m = self.rank();
        let (_, w2) = self.jordan_at(2).expect("2-adic data is always present");
        let gamma_sq_nontrivial = (2 * w2).rem_euclid(8) != 0;
        let v2e = vp(exponent as i64, 2);
        let v2d = vp(self.form().delta() as i64, 2);
        let narrow = (v2e == 1 && gamma_sq_nontrivial) || (m.is_multiple_of(2) && v2e == 2 && v2d % 2 == 1);
        Ok(KernelDescriptor {
            base: if narrow { KernelBase::GammaN } else { KernelBase::Gamma },
            cover: if m % 2 == 1 { Cover::Lift } else { Cover::DoubleCover },
            level,
            exponent,
        })
    }
}

/// Every residue class of `SL₂(ℤ/n)` with up to `per_class` small integer lifts.
pub fn sl2_residue_lifts(n: i64, per_class: usize) -> Vec<Vec<SL2Z>> {
    let mut classes: BTreeMap<(i64, i64, i64, i64), Vec<SL2Z>> = BTreeMap::new();
    let bound = 3 * n + 3;
    for a in -bound..=bound {
        for c in -bound..=bound {
            if a.gcd(&c) != 1 {
                continue;
            }
            // all (b, d) with ad − bc = 1 and small entries
            let (g, x, y) = ext_gcd(a, c);
            debug_assert_eq!(g, 1);
            // a·x + c·y = 1 → d = x + t·c, b = −y + t·a
            for t in -bound..=bound {
                let d = x + t * c;
                let b = -y + t * a;
                if d.abs() > bound || b.abs() > bound {
                    continue;
                }
                let key = (a.rem_euclid(n), b.rem_euclid(n), c.rem_euclid(n), d.rem_euclid(n));
                let v = classes.entry(key).or_default();
                if v.len() < per_class {
                    v.push(SL2Z { a, b, c, d });
                }
            }
        }
    }
    classes.into_values().collect()
}

fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let e = a.extended_gcd(&b);
    (e.gcd, e.x, e.y)
}
