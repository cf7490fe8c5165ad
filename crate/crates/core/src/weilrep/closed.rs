//! Closed formula for `ρ_M(A, ε)` from the local Jordan data.

use num_bigint::BigInt;

use super::{zeta8_exponent, PhaseMatrix, WeilOperator, WeilRep};
use crate::error::{Error, Result};
use crate::exact::{rint, ExactScalar, Rational};
use crate::jordan::{choose_xc, odd_part, weil_index_component};
use crate::metaplectic::MpElement;
use crate::numth::{eps_bit, legendre, legendre_int, two_power_over, unit_part, vp};

fn unit_or_one(x: i64, p: u64) -> i64 {
    if x == 0 {
        1
    } else {
        unit_part(x, p)
    }
}

fn sign_exp(s: i8) -> i64 {
    if s < 0 {
        4
    } else {
        0
    }
}

/// Sign of `√j(A, τ)` on the branch with argument in `(−π/2, π/2]`, which
/// the local formulas use. It differs from the stored one only on `c = 0, d < 0`.
fn upper_branch_eps(x: &MpElement) -> i8 {
    if x.mat.c == 0 && x.mat.d < 0 {
        -x.eps
    } else {
        x.eps
    }
}

impl WeilRep {
    /// `ξ_p` as a power of `ζ₈`. For odd lattices `ξ₂` carries the extra
    /// `ζ₈^{(a−a₂)c₂t₁}`.
    pub(crate) fn xi_exponent(&self, x: &MpElement, p: u64) -> Result<i64> {
        let Some((jd, w)) = self.jordan_at(p) else {
            return Ok(0);
        };
        let (a, c) = (x.mat.a, x.mat.c);
        let ap = unit_or_one(a, p);
        let dp: i64 = jd.components.iter().map(|k| (k.e as usize * k.n) as i64).sum();
        let mut k = 0i64;
        if p != 2 {
            if dp % 2 == 1 {
                k += sign_exp(legendre_int(ap, p as i64));
            }
        } else {
            let m = self.rank() as i64;
            let c2 = odd_part(c);
            let (ar, c2r) = (rint(ap), rint(c2));
            if m % 2 == 1 {
                k += sign_exp(upper_branch_eps(x));
                k += sign_exp(legendre(&rint(a), c2)?);
                if eps_bit(&ar)? == 1 && eps_bit(&c2r)? == 1 {
                    k += 4;
                }
                let v2c = if c == 0 { 0 } else { vp(c, 2) };
                k += sign_exp(two_power_over(v2c, &ar)?);
            }
            k += sign_exp(two_power_over(dp, &ar)?);
            k += w * (ap - 1);
            if !self.is_even() {
                k += (a - ap) * c2 * jd.t1() as i64;
            }
        }
        if c != 0 {
            let v = vp(c, p) as u32;
            let scale = rint(ap * c);
            for comp in jd.components.iter().filter(|comp| comp.e > v) {
                k -= zeta8_exponent(&weil_index_component(&comp.scaled(&scale)?))?;
            }
        }
        Ok(k.rem_euclid(8))
    }

    /// `ξ_p` of the closed formula.
    pub fn xi_p(&self, x: &MpElement, p: u64) -> Result<ExactScalar> {
        Ok(ExactScalar::zeta8(self.xi_exponent(x, p)?))
    }

    /// `Π_p ξ_p` as a power of `ζ₈`.
    pub fn xi_total_exponent(&self, x: &MpElement) -> Result<i64> {
        let mut k = 0;
        for p in self.local_primes() {
            k += self.xi_exponent(x, p)?;
        }
        Ok(k.rem_euclid(8))
    }

    /// Closed-formula matrix as phases times `√(Δ_{M,c}/Δ_M)`.
    pub fn closed_phases(&self, x: &MpElement) -> Result<PhaseMatrix> {
        self.check_domain(x)?;
        let (a, b, c, d) = (x.mat.a, x.mat.b, x.mat.c, x.mat.d);
        let form = &self.form;
        let n = self.dim();
        let mut root = self.xi_total_exponent(x)?;
        let (betas, beta_phase): (Vec<_>, Vec<Rational>) = if c == 0 {
            (vec![form.zero()], vec![Rational::from_integer(0.into())])
        } else {
            let (jd2, _) = self.jordan_at(2).expect("2-adic data is always present");
            let xc = choose_xc(&self.lattice, jd2, form, c)?;
            if !self.is_even() && c % 2 != 0 {
                // β_c²/2 := (β²/2 − x_c²/2)/c with x_c²/2 ≡ t₁/8 at 2
                root -= a * c * jd2.t1() as i64;
            }
            let betas = form.coset_dcstar(c)?;
            let phases = betas
                .iter()
                .map(|beta| Ok(form.beta_c_sq_half(c, &xc.element, beta)? * BigInt::from(a)))
                .collect::<Result<Vec<_>>>()?;
            (betas, phases)
        };
        let root = self.zeta8_phase(root);
        let mut phases = vec![None; n * n];
        for (j, g) in self.elements.iter().enumerate() {
            let dg = form.mul(d, g);
            let tail = form.q_lift(g) * BigInt::from(b * d);
            for (beta, bp) in betas.iter().zip(&beta_phase) {
                let row = form.index(&form.add(beta, &dg));
                let v = bp + form.bil(g, beta) * BigInt::from(b) + &tail;
                let slot = &mut phases[row * n + j];
                if slot.is_some() {
                    return Err(Error::Invariant("closed formula hit one basis vector twice".into()));
                }
                *slot = Some((self.phase(&v)? + root) % self.order());
            }
        }
        let scale = Rational::new(BigInt::from(self.delta_c(c)), BigInt::from(n));
        Ok(PhaseMatrix::new(n, scale, phases))
    }

    /// Closed formula for even lattices.
    pub fn rho_closed(&self, x: &MpElement) -> Result<WeilOperator> {
        if !self.is_even() {
            return Err(Error::Validation("rho_closed needs an even lattice; use rho_closed_odd".into()));
        }
        Ok(self.closed_phases(x)?.to_operator(self.ring()))
    }

    /// Closed formula for odd lattices on `Γ_odd`.
    pub fn rho_closed_odd(&self, x: &MpElement) -> Result<WeilOperator> {
        if self.is_even() {
            return Err(Error::Validation("rho_closed_odd needs an odd lattice".into()));
        }
        Ok(self.closed_phases(x)?.to_operator(self.ring()))
    }

    /// Closed formula for either parity.
    pub fn rho(&self, x: &MpElement) -> Result<WeilOperator> {
        Ok(self.closed_phases(x)?.to_operator(self.ring()))
    }

    /// `φ(x)` on the inverse image of `Γ₀(N)`.
    pub fn phi_char(&self, x: &MpElement) -> Result<ExactScalar> {
        if !self.is_even() {
            return Err(Error::Validation("φ is defined for even lattices".into()));
        }
        let n = self.form.level() as i64;
        let (a, c) = (x.mat.a, x.mat.c);
        if c % n != 0 {
            return Err(Error::Validation(format!("N = {n} does not divide c = {c}")));
        }
        let m = self.rank() as i64;
        let c2 = odd_part(c);
        let ar = rint(a);
        let mut k = 0i64;
        if m % 2 == 1 {
            k += sign_exp(upper_branch_eps(x));
            k += sign_exp(legendre(&ar, c2)?);
            if eps_bit(&ar)? == 1 && eps_bit(&rint(c2))? == 1 {
                k += 4;
            }
            let v2c = if c == 0 { 0 } else { vp(c, 2) };
            k += sign_exp(two_power_over(v2c, &ar)?);
        }
        let delta = self.form.delta() as i64;
        let v2d = vp(delta, 2);
        if v2d % 2 == 1 {
            k += sign_exp(two_power_over(v2d, &ar)?);
        }
        k += sign_exp(legendre(&ar, odd_part(delta))?);
        let (_, w) = self.jordan_at(2).expect("2-adic data is always present");
        k += w * (a - 1);
        Ok(ExactScalar::zeta8(k))
    }
}
