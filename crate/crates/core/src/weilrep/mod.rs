//! The Weil representation `ρ_M` of `Mp₂(ℤ)` (or of the metaplectic `Γ_odd`
//! for odd lattices) on `ℂ[D_M]`.
//!
//! [`WeilRep`] caches everything that depends only on the lattice. Operators
//! come from three independent routes: products of generator matrices along a
//! word ([`WeilRep::rho_oracle`]), the closed formula built from local Jordan
//! data ([`WeilRep::rho_closed`]), and the finite sums of the `r₀` operators
//! ([`WeilRep::r0_direct`]).

mod checks;
mod closed;
mod operator;

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::exact::{ExactScalar, Rational};
use crate::jordan::{jordan_decompose, JordanDecomposition};
use crate::lattice::{DFElement, DiscriminantForm, GramLattice};
use crate::metaplectic::{decompose_st, decompose_t2s, gamma_odd_member, word_element, MpElement, Token};
use crate::numth::prime_divisors;

pub use checks::{braun_check, sl2_residue_lifts, Cover, KernelBase, KernelDescriptor, DIRECT_SUM_CAP};
pub use operator::{numeric_json, proportional, PhaseMatrix, Ring, WeilOperator};

/// Lattice data shared by every operator of one representation.
#[derive(Debug)]
pub struct WeilRep {
    lattice: GramLattice,
    form: DiscriminantForm,
    elements: Vec<DFElement>,
    ring: Arc<Ring>,
    /// `γ(f_p)` as a power of `ζ₈`, for the primes in `jordan`.
    weil_exp: Vec<i64>,
    /// Jordan decompositions at 2 and at every prime dividing `Δ_M`.
    jordan: Vec<JordanDecomposition>,
    neg: Vec<usize>,
}

/// Exponent `k` with `s = ζ₈^k`.
pub(crate) fn zeta8_exponent(s: &ExactScalar) -> Result<i64> {
    (0..8)
        .find(|&k| ExactScalar::zeta8(k) == *s)
        .ok_or_else(|| Error::Invariant(format!("{s} is not an eighth root of unity")))
}

impl WeilRep {
    pub fn new(lattice: &GramLattice) -> Result<Self> {
        let form = lattice.discriminant_form()?;
        let elements = form.elements()?;
        let order = (form.level() as u32).lcm(&8);
        let mut primes = prime_divisors(form.delta());
        if !primes.contains(&2) {
            primes.insert(0, 2);
        }
        let jordan: Vec<JordanDecomposition> =
            primes.iter().map(|&p| jordan_decompose(lattice, p)).collect::<Result<_>>()?;
        let weil_exp = jordan.iter().map(|jd| zeta8_exponent(&jd.weil_index())).collect::<Result<_>>()?;
        let neg = elements.iter().map(|g| form.index(&form.neg(g))).collect();
        Ok(WeilRep { lattice: lattice.clone(), form, elements, ring: Ring::new(order), weil_exp, jordan, neg })
    }

    pub fn lattice(&self) -> &GramLattice {
        &self.lattice
    }

    pub fn form(&self) -> &DiscriminantForm {
        &self.form
    }

    pub fn elements(&self) -> &[DFElement] {
        &self.elements
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn dim(&self) -> usize {
        self.elements.len()
    }

    pub fn rank(&self) -> usize {
        self.lattice.rank()
    }

    pub fn signature(&self) -> i64 {
        self.lattice.signature()
    }

    pub fn is_even(&self) -> bool {
        self.lattice.is_even()
    }

    /// `L`, the order of the roots of unity in operator bodies.
    pub fn order(&self) -> u32 {
        self.ring.order()
    }

    pub(crate) fn jordan_at(&self, p: u64) -> Option<(&JordanDecomposition, i64)> {
        self.jordan.iter().zip(&self.weil_exp).find(|(jd, _)| jd.p == p).map(|(jd, &w)| (jd, w))
    }

    /// Primes carrying local data: 2 and the divisors of `Δ_M`.
    pub fn local_primes(&self) -> Vec<u64> {
        self.jordan.iter().map(|jd| jd.p).collect()
    }

    /// `ζ_L`-exponent of `e(r)`.
    pub(crate) fn phase(&self, r: &Rational) -> Result<u32> {
        let l = BigInt::from(self.order());
        let x = r * Rational::from_integer(l.clone());
        if !x.is_integer() {
            return Err(Error::Invariant(format!("e({r}) is not an L-th root of unity for L = {l}")));
        }
        Ok(x.to_integer().mod_floor(&l).to_u32().expect("reduced exponent"))
    }

    /// `ζ_L`-exponent of `ζ₈^k`.
    pub(crate) fn zeta8_phase(&self, k: i64) -> u32 {
        let l = self.order() as i64;
        (k.rem_euclid(8) * (l / 8)) as u32
    }

    /// `ρ(T^k)`: diagonal `e(k·γ²/2)`; odd lattices need even `k`.
    pub fn rho_t_power(&self, k: i64) -> Result<PhaseMatrix> {
        if !self.is_even() && k % 2 != 0 {
            return Err(Error::Validation(format!("T^{k} is not in Γ_odd")));
        }
        let n = self.dim();
        let mut phases = vec![None; n * n];
        for (i, g) in self.elements.iter().enumerate() {
            let v = self.form.q_lift(g) * BigInt::from(k);
            phases[i * n + i] = Some(self.phase(&v)?);
        }
        Ok(PhaseMatrix::new(n, Rational::from_integer(1.into()), phases))
    }

    /// `ρ(T)`, diagonal with `e(γ²/2)`; rejects odd lattices.
    pub fn rho_t(&self) -> Result<WeilOperator> {
        Ok(self.rho_t_power(1)?.to_operator(&self.ring))
    }

    fn s_phases(&self, sign: i64) -> Result<PhaseMatrix> {
        let n = self.dim();
        let mut phases = vec![None; n * n];
        let root = self.zeta8_phase(-sign * self.signature());
        for (i, d) in self.elements.iter().enumerate() {
            for (j, g) in self.elements.iter().enumerate() {
                let v = -self.form.bil(g, d) * BigInt::from(sign);
                phases[i * n + j] = Some((self.phase(&v)? + root) % self.order());
            }
        }
        Ok(PhaseMatrix::new(n, Rational::new(1.into(), BigInt::from(n)), phases))
    }

    /// `ρ(S)`: entry `(δ, γ)` is `ζ₈^{−sgn} e(−(γ,δ)) / √Δ`.
    pub fn rho_s(&self) -> Result<WeilOperator> {
        Ok(self.s_phases(1)?.to_operator(&self.ring))
    }

    /// `ρ(Z)`: `e_γ ↦ ζ₈^{−2 sgn} e_{−γ}`.
    pub fn rho_z_phases(&self) -> PhaseMatrix {
        let n = self.dim();
        let mut phases = vec![None; n * n];
        let root = self.zeta8_phase(-2 * self.signature());
        for j in 0..n {
            phases[self.neg[j] * n + j] = Some(root);
        }
        PhaseMatrix::new(n, Rational::from_integer(1.into()), phases)
    }

    pub fn rho_z(&self) -> WeilOperator {
        self.rho_z_phases().to_operator(&self.ring)
    }

    fn token_matrix(&self, t: &Token) -> Result<PhaseMatrix> {
        match t {
            Token::T(k) => self.rho_t_power(*k),
            Token::S => self.s_phases(1),
            Token::SInv => self.s_phases(-1),
        }
    }

    /// Word used by the oracle: `T, S` for even lattices, `T², S` for odd ones.
    pub fn oracle_word(&self, x: &MpElement) -> Result<Vec<Token>> {
        if self.is_even() {
            Ok(decompose_st(&x.mat))
        } else {
            decompose_t2s(&x.mat)
        }
    }

    /// `ρ(x)` as a product of generator matrices along a word for `x`.
    pub fn rho_oracle(&self, x: &MpElement) -> Result<WeilOperator> {
        let word = self.oracle_word(x)?;
        let mut acc = WeilOperator::identity(&self.ring, self.dim());
        for t in word.iter().rev() {
            acc = self.token_matrix(t)?.mul_left(&acc)?;
        }
        let w = word_element(&word);
        if w.mat != x.mat {
            return Err(Error::Invariant(format!("word multiplies to {} instead of {}", w.mat, x.mat)));
        }
        // the word lands on x or on x·Z², and ρ(Z²) = (−1)^{sgn}
        if w.eps != x.eps && self.signature().rem_euclid(2) == 1 {
            acc = acc.neg();
        }
        Ok(acc)
    }

    /// Checks that `x` is in the group the representation is defined on.
    pub(crate) fn check_domain(&self, x: &MpElement) -> Result<()> {
        if !self.is_even() && !gamma_odd_member(&x.mat) {
            return Err(Error::Validation(format!("{} is not in Γ_odd", x.mat)));
        }
        Ok(())
    }

    /// `|D_{M,c}|`.
    pub fn delta_c(&self, c: i64) -> u64 {
        self.form.orders().iter().map(|&d| if c == 0 { d } else { c.unsigned_abs().gcd(&d) }).product()
    }
}

#[cfg(test)]
mod tests;
