//! Operators on `ℂ[D_M]` with entries in `√r · ℤ[ζ_L]`.
//!
//! An operator is a positive rational `r` and a body matrix whose entries are
//! integer vectors in the reduced power basis of `ℚ(ζ_L)`. The value of the
//! operator is `√r · body`. Generator matrices and closed-formula matrices have
//! a single root of unity per nonzero entry; those are kept as [`PhaseMatrix`]
//! so products with them are rotations rather than polynomial products.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exact::{ExactScalar, Rational};

/// Coefficients above this bound are treated as runaway growth.
const COEFF_LIMIT: i128 = 1 << 100;

/// Arithmetic context: `ℤ[ζ_L]` in the power basis modulo `Φ_L`.
#[derive(Debug)]
pub struct Ring {
    order: u32,
    phi: usize,
    /// Φ_L as sparse `(degree, coefficient)` pairs below the leading term.
    poly: Vec<(usize, i128)>,
}

impl Ring {
    pub fn new(order: u32) -> Arc<Ring> {
        let full = crate::exact::cyclotomic_poly(order);
        let phi = full.len() - 1;
        let poly = full[..phi].iter().enumerate().filter(|(_, &c)| c != 0).map(|(i, &c)| (i, c as i128)).collect();
        Arc::new(Ring { order, phi, poly })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn phi(&self) -> usize {
        self.phi
    }

    /// Folds a buffer of any length `≥ φ` down to `φ` coefficients.
    fn reduce(&self, buf: &mut Vec<i128>) {
        let phi = self.phi;
        for n in (phi..buf.len()).rev() {
            let top = buf[n];
            if top != 0 {
                buf[n] = 0;
                // x^n = x^{n−φ}·x^φ and x^φ = −Σ poly_i x^i
                for &(i, c) in &self.poly {
                    buf[n - phi + i] -= top * c;
                }
            }
        }
        buf.truncate(phi);
    }

    /// Reduced coefficients of `ζ_L^k`.
    pub fn monomial(&self, k: u32) -> Vec<i128> {
        let mut buf = vec![0i128; (k % self.order) as usize + 1];
        buf[(k % self.order) as usize] = 1;
        if buf.len() < self.phi {
            buf.resize(self.phi, 0);
        }
        self.reduce(&mut buf);
        buf
    }

    fn conj(&self, v: &[i128]) -> Vec<i128> {
        let l = self.order as usize;
        let mut buf = vec![0i128; l.max(self.phi)];
        for (k, &c) in v.iter().enumerate() {
            if c != 0 {
                buf[(l - k) % l] += c;
            }
        }
        self.reduce(&mut buf);
        buf
    }

    fn to_scalar(&self, v: &[i128]) -> ExactScalar {
        let coeffs: Vec<Rational> = v.iter().map(|&c| Rational::from_integer(BigInt::from(c))).collect();
        ExactScalar::from_coeffs(self.order, &coeffs).expect("coefficient vector of length φ(L)")
    }
}

/// Square-root-scaled matrix over `ℤ[ζ_L]`; entry `(row, col)` is the
/// `e_row`-coefficient of the image of `e_col`.
#[derive(Clone, Debug)]
pub struct WeilOperator {
    ring: Arc<Ring>,
    dim: usize,
    scale: Rational,
    body: Vec<i128>,
}

/// Matrix whose nonzero entries are single powers of `ζ_L`, times `√r`.
#[derive(Clone, Debug)]
pub struct PhaseMatrix {
    pub dim: usize,
    pub scale: Rational,
    /// Row-major exponents of `ζ_L`; `None` for zero entries.
    pub phases: Vec<Option<u32>>,
}

impl PhaseMatrix {
    pub fn new(dim: usize, scale: Rational, phases: Vec<Option<u32>>) -> Self {
        assert_eq!(phases.len(), dim * dim);
        PhaseMatrix { dim, scale, phases }
    }

    pub fn at(&self, row: usize, col: usize) -> Option<u32> {
        self.phases[row * self.dim + col]
    }

    /// Multiplies every entry by `ζ_L^k`.
    pub fn twist(&mut self, k: u32, order: u32) {
        for p in self.phases.iter_mut().flatten() {
            *p = (*p + k) % order;
        }
    }

    pub fn to_operator(&self, ring: &Arc<Ring>) -> WeilOperator {
        let phi = ring.phi;
        let mut body = vec![0i128; self.dim * self.dim * phi];
        for (idx, p) in self.phases.iter().enumerate() {
            if let Some(k) = p {
                body[idx * phi..(idx + 1) * phi].copy_from_slice(&ring.monomial(*k));
            }
        }
        WeilOperator { ring: ring.clone(), dim: self.dim, scale: self.scale.clone(), body }
    }

    /// `self · op`.
    pub fn mul_left(&self, op: &WeilOperator) -> Result<WeilOperator> {
        let ring = &op.ring;
        let (n, phi, l) = (self.dim, ring.phi, ring.order as usize);
        let mut body = vec![0i128; n * n * phi];
        let mut buf = vec![0i128; l + phi];
        for i in 0..n {
            for k in 0..n {
                buf.iter_mut().for_each(|x| *x = 0);
                let mut any = false;
                for j in 0..n {
                    let Some(e) = self.at(i, j) else { continue };
                    let src = op.entry_slice(j, k);
                    let e = e as usize;
                    for (t, &c) in src.iter().enumerate() {
                        if c != 0 {
                            buf[e + t] += c;
                            any = true;
                        }
                    }
                }
                if any {
                    // ζ^L = 1 folds the upper half back before reducing
                    for t in l..buf.len() {
                        let v = std::mem::take(&mut buf[t]);
                        buf[t - l] += v;
                    }
                    let mut v = buf[..l.max(phi)].to_vec();
                    ring.reduce(&mut v);
                    body[(i * n + k) * phi..(i * n + k + 1) * phi].copy_from_slice(&v);
                }
            }
        }
        let out = WeilOperator { ring: ring.clone(), dim: n, scale: &self.scale * &op.scale, body }.normalized();
        out.check_growth()?;
        Ok(out)
    }
}

impl WeilOperator {
    pub fn identity(ring: &Arc<Ring>, dim: usize) -> Self {
        let phases = (0..dim * dim).map(|i| if i / dim == i % dim { Some(0) } else { None }).collect();
        PhaseMatrix::new(dim, Rational::one(), phases).to_operator(ring)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> u32 {
        self.ring.order
    }

    /// `r` in `√r · body`.
    pub fn scale(&self) -> &Rational {
        &self.scale
    }

    fn entry_slice(&self, row: usize, col: usize) -> &[i128] {
        let phi = self.ring.phi;
        let i = (row * self.dim + col) * phi;
        &self.body[i..i + phi]
    }

    /// Exact value of one entry.
    pub fn entry(&self, row: usize, col: usize) -> Result<ExactScalar> {
        let v = self.entry_slice(row, col);
        if v.iter().all(|&c| c == 0) {
            return Ok(ExactScalar::zero());
        }
        Ok(&self.ring.to_scalar(v) * &ExactScalar::sqrt_rat(&self.scale)?)
    }

    /// All entries, row-major.
    pub fn entries(&self) -> Result<Vec<Vec<ExactScalar>>> {
        let root = ExactScalar::sqrt_rat(&self.scale)?;
        Ok((0..self.dim)
            .map(|r| {
                (0..self.dim)
                    .map(|c| {
                        let v = self.entry_slice(r, c);
                        if v.iter().all(|&x| x == 0) {
                            ExactScalar::zero()
                        } else {
                            &self.ring.to_scalar(v) * &root
                        }
                    })
                    .collect()
            })
            .collect())
    }

    pub fn is_zero_entry(&self, row: usize, col: usize) -> bool {
        self.entry_slice(row, col).iter().all(|&c| c == 0)
    }

    /// Moves the content of the body into the scale.
    fn normalized(mut self) -> Self {
        let g = self.body.iter().fold(0i128, |g, &c| g.gcd(&c));
        if g > 1 {
            self.body.iter_mut().for_each(|c| *c /= g);
            let g = BigInt::from(g);
            self.scale = &self.scale * Rational::from_integer(&g * &g);
        }
        self
    }

    fn check_growth(&self) -> Result<()> {
        if self.body.iter().any(|c| c.abs() > COEFF_LIMIT) {
            return Err(Error::Invariant("operator coefficients exceeded the i128 working range".into()));
        }
        Ok(())
    }

    /// `self · other`.
    pub fn mul(&self, other: &WeilOperator) -> Result<WeilOperator> {
        if self.dim != other.dim || self.ring.order != other.ring.order {
            return Err(Error::Validation("operators act on different spaces".into()));
        }
        let ring = &self.ring;
        let (n, phi) = (self.dim, ring.phi);
        let mut body = vec![0i128; n * n * phi];
        let mut buf = vec![0i128; 2 * phi];
        for i in 0..n {
            for k in 0..n {
                buf.iter_mut().for_each(|x| *x = 0);
                for j in 0..n {
                    let a = self.entry_slice(i, j);
                    let b = other.entry_slice(j, k);
                    for (s, &x) in a.iter().enumerate() {
                        if x == 0 {
                            continue;
                        }
                        for (t, &y) in b.iter().enumerate() {
                            buf[s + t] += x * y;
                        }
                    }
                }
                let mut v = buf.clone();
                ring.reduce(&mut v);
                body[(i * n + k) * phi..(i * n + k + 1) * phi].copy_from_slice(&v);
            }
        }
        let out = WeilOperator { ring: ring.clone(), dim: n, scale: &self.scale * &other.scale, body }.normalized();
        out.check_growth()?;
        Ok(out)
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> WeilOperator {
        let (n, phi) = (self.dim, self.ring.phi);
        let mut body = vec![0i128; n * n * phi];
        for i in 0..n {
            for j in 0..n {
                let v = self.ring.conj(self.entry_slice(j, i));
                body[(i * n + j) * phi..(i * n + j + 1) * phi].copy_from_slice(&v);
            }
        }
        WeilOperator { ring: self.ring.clone(), dim: n, scale: self.scale.clone(), body }
    }

    pub fn neg(&self) -> WeilOperator {
        let mut out = self.clone();
        out.body.iter_mut().for_each(|c| *c = -*c);
        out
    }

    /// Multiplies by `ζ_L^k`.
    pub fn twist(&self, k: u32) -> WeilOperator {
        let phases = (0..self.dim * self.dim).map(|i| if i / self.dim == i % self.dim { Some(k) } else { None }).collect();
        PhaseMatrix::new(self.dim, Rational::one(), phases).mul_left(self).expect("diagonal twist")
    }

    /// Exact equality of the operators `√r·body`.
    pub fn exact_eq(&self, other: &WeilOperator) -> Result<bool> {
        if self.dim != other.dim {
            return Ok(false);
        }
        let z1 = self.body.iter().all(|&c| c == 0);
        let z2 = other.body.iter().all(|&c| c == 0);
        if z1 || z2 {
            return Ok(z1 && z2);
        }
        if self.ring.order == other.ring.order {
            if self.scale == other.scale {
                return Ok(self.body == other.body);
            }
            // √(r₂/r₁) rational: compare bodies after clearing it
            let ratio = &other.scale / &self.scale;
            if let (Some(n), Some(d)) = (exact_sqrt(ratio.numer()), exact_sqrt(ratio.denom())) {
                let (n, d) = (i128::try_from(n), i128::try_from(d));
                if let (Ok(n), Ok(d)) = (n, d) {
                    return Ok(self.body.iter().zip(&other.body).all(|(&x, &y)| x * d == y * n));
                }
            }
        }
        let (a, b) = (self.entries()?, other.entries()?);
        Ok(a == b)
    }

    /// `self = μ·other` for some scalar `μ`; returns `μ` when it exists.
    pub fn proportionality(&self, other: &WeilOperator) -> Result<Option<ExactScalar>> {
        let (a, b) = (self.entries()?, other.entries()?);
        proportional(&a, &b)
    }

    pub fn is_identity(&self) -> Result<bool> {
        self.exact_eq(&WeilOperator::identity(&self.ring, self.dim))
    }

    /// `X·X† = I`.
    pub fn is_unitary(&self) -> Result<bool> {
        self.mul(&self.adjoint())?.is_identity()
    }

    /// `{"dim": Δ, "entries": [[scalar]]}`, with a numeric mirror when `precision` is set.
    pub fn to_json(&self, precision: Option<u32>) -> Result<Value> {
        let entries = self.entries()?;
        let mut doc = json!({
            "dim": self.dim,
            "entries": entries,
        });
        if let Some(bits) = precision {
            let numeric: Vec<Vec<Value>> = entries
                .iter()
                .map(|row| row.iter().map(|e| numeric_json(e, bits)).collect())
                .collect();
            doc["numeric"] = json!(numeric);
        }
        Ok(doc)
    }
}

/// Midpoints of `re` and `im` with the enclosing box as decimal strings.
pub fn numeric_json(e: &ExactScalar, bits: u32) -> Value {
    use crate::exact::to_decimal_directed as dir;
    let iv = e.eval_numeric(bits);
    let digits = (bits as usize * 3) / 10 + 2;
    json!({
        "re": iv.re_mid(),
        "im": iv.im_mid(),
        "re_bounds": [dir(&iv.re_lo, digits, false), dir(&iv.re_hi, digits, true)],
        "im_bounds": [dir(&iv.im_lo, digits, false), dir(&iv.im_hi, digits, true)],
        "width": dir(&iv.width(), digits, true),
    })
}

fn exact_sqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

/// Scalar `μ` with `a = μ·b` entrywise, if any.
pub fn proportional(a: &[Vec<ExactScalar>], b: &[Vec<ExactScalar>]) -> Result<Option<ExactScalar>> {
    let mut mu: Option<ExactScalar> = None;
    for (ra, rb) in a.iter().zip(b) {
        for (x, y) in ra.iter().zip(rb) {
            match (x.is_zero(), y.is_zero()) {
                (true, true) => {}
                (false, false) => {
                    let q = x * &y.inv()?;
                    match &mu {
                        None => mu = Some(q),
                        Some(m) if *m == q => {}
                        Some(_) => return Ok(None),
                    }
                }
                _ => return Ok(None),
            }
        }
    }
    Ok(Some(mu.unwrap_or_else(ExactScalar::one)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    #[test]
    fn monomials_reduce() {
        let r = Ring::new(8);
        assert_eq!(r.monomial(0), vec![1, 0, 0, 0]);
        assert_eq!(r.monomial(4), vec![-1, 0, 0, 0]);
        assert_eq!(r.monomial(5), vec![0, -1, 0, 0]);
        let r = Ring::new(12);
        for k in 0..12 {
            assert_eq!(r.to_scalar(&r.monomial(k)), ExactScalar::root_of_unity(k as i64, 12));
        }
    }

    #[test]
    fn hadamard_products() {
        // (ζ₈⁻¹/√2)[[1,1],[1,−1]] squared is ζ₈⁻²·I
        let ring = Ring::new(8);
        let s = PhaseMatrix::new(2, rat(1, 2), vec![Some(7), Some(7), Some(7), Some(3)]);
        let op = s.to_operator(&ring);
        let sq = op.mul(&op).unwrap();
        let expected = WeilOperator::identity(&ring, 2).twist(6);
        assert!(sq.exact_eq(&expected).unwrap());
        assert!(s.mul_left(&op).unwrap().exact_eq(&expected).unwrap());
        assert!(op.is_unitary().unwrap());
        assert_eq!(op.entry(0, 0).unwrap(), &ExactScalar::zeta8(-1) * &ExactScalar::sqrt_rat(&rat(1, 2)).unwrap());
    }

    #[test]
    fn equality_across_scales() {
        // √2·I written two ways
        let ring = Ring::new(8);
        let a = WeilOperator { ring: ring.clone(), dim: 1, scale: rat(2, 1), body: vec![1, 0, 0, 0] };
        let b = WeilOperator { ring: ring.clone(), dim: 1, scale: rat(1, 1), body: vec![0, 1, 0, -1] };
        let c = WeilOperator { ring: ring.clone(), dim: 1, scale: rat(1, 2), body: vec![2, 0, 0, 0] };
        assert!(a.exact_eq(&b).unwrap());
        assert!(a.exact_eq(&c).unwrap());
        assert!(!a.exact_eq(&a.neg()).unwrap());
        let mu = a.proportionality(&a.neg()).unwrap().unwrap();
        assert_eq!(mu, ExactScalar::from_int(-1));
    }
}
