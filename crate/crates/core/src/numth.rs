//! Valuations, Legendre symbols, the ε/σ bookkeeping for odd numbers, and
//! Hilbert symbols over ℝ and ℚ_p.
//!
//! Legendre symbols follow the convention `(x/y) = (x/|y|)` with `(x/±1) = 1`,
//! extended to p-adic unit rationals by reducing modulo the relevant prime.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{ExactScalar, Rational};

/// A place of ℚ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Place {
    Real,
    Prime(u64),
}

/// `x = p^valuation · unit_part`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValUnit {
    pub valuation: i64,
    pub unit_part: Rational,
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Prime factorisation by trial division.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Distinct prime divisors.
pub fn prime_divisors(n: u64) -> Vec<u64> {
    factorize(n).into_iter().map(|(p, _)| p).collect()
}

/// `v_p(n)` for a nonzero integer.
pub fn vp_int(n: &BigInt, p: u64) -> i64 {
    assert!(!n.is_zero(), "valuation of zero");
    let pb = BigInt::from(p);
    let mut m = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = m.div_rem(&pb);
        if !r.is_zero() {
            return v;
        }
        m = q;
        v += 1;
    }
}

/// `v_p(n)` for a nonzero machine integer.
pub fn vp(n: i64, p: u64) -> i64 {
    vp_int(&BigInt::from(n), p)
}

pub fn valuation_split(x: &Rational, p: u64) -> Result<ValUnit> {
    if x.is_zero() {
        return Err(Error::Validation("valuation of zero".into()));
    }
    if !is_prime(p) {
        return Err(Error::Validation(format!("{p} is not prime")));
    }
    let vn = vp_int(x.numer(), p);
    let vd = vp_int(x.denom(), p);
    let pb = BigInt::from(p);
    let n = x.numer() / num_traits::pow(pb.clone(), vn as usize);
    let d = x.denom() / num_traits::pow(pb, vd as usize);
    Ok(ValUnit { valuation: vn - vd, unit_part: Rational::new(n, d) })
}

/// Unit part `n / p^{v_p(n)}` of a nonzero integer, keeping its sign.
pub fn unit_part(n: i64, p: u64) -> i64 {
    let mut m = n;
    while m != 0 && m % p as i64 == 0 {
        m /= p as i64;
    }
    m
}

/// Residue of a rational with denominator coprime to `m`, as an integer in `[0, m)`.
pub fn residue_mod(x: &Rational, m: u64) -> Option<u64> {
    let mb = BigInt::from(m);
    let d = x.denom().mod_floor(&mb);
    let inv = mod_inverse(&d, &mb)?;
    let r = (x.numer().mod_floor(&mb) * inv).mod_floor(&mb);
    r.to_u64()
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    if m.is_one() {
        return Some(BigInt::zero());
    }
    let e = a.extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}

/// Modular inverse for machine integers.
pub fn inv_mod(a: i64, m: u64) -> Option<u64> {
    mod_inverse(&BigInt::from(a), &BigInt::from(m)).and_then(|x| x.to_u64())
}

/// Euler's criterion for an odd prime and an integer.
pub fn legendre_int(x: i64, p: i64) -> i8 {
    let p = p.unsigned_abs();
    let r = x.rem_euclid(p as i64) as u64;
    if r == 0 {
        return 0;
    }
    let e = pow_mod(r, (p - 1) / 2, p);
    if e == 1 {
        1
    } else {
        -1
    }
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u128;
    let mut base = (b % m) as u128;
    let m128 = m as u128;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % m128;
        }
        base = base * base % m128;
        e >>= 1;
    }
    b = acc as u64;
    b
}

/// `(x/y)` in the `(x/|y|)` convention; `y` odd and nonzero.
///
/// `x` may be any rational whose denominator is prime to `y`.
pub fn legendre(x: &Rational, y: i64) -> Result<i8> {
    if y % 2 == 0 {
        return Err(Error::Validation(format!("legendre symbol needs an odd modulus, got {y}")));
    }
    let mut acc = 1i8;
    for (p, k) in factorize(y.unsigned_abs()) {
        let r = residue_mod(x, p).ok_or_else(|| {
            Error::Validation(format!("{x} is not a {p}-adic integer"))
        })?;
        let s = legendre_int(r as i64, p as i64);
        if k % 2 == 1 || s == 0 {
            acc *= s;
        }
    }
    Ok(acc)
}

/// `(2/u)` for an odd 2-adic unit `u`: `+1` iff `u ≡ ±1 (mod 8)`.
pub fn two_over(u: &Rational) -> Result<i8> {
    let r = residue_mod(u, 8)
        .filter(|r| r % 2 == 1)
        .ok_or_else(|| Error::Validation(format!("{u} is not a 2-adic unit")))?;
    Ok(if r == 1 || r == 7 { 1 } else { -1 })
}

/// `(2^k / u)`.
pub fn two_power_over(k: i64, u: &Rational) -> Result<i8> {
    let s = two_over(u)?;
    Ok(if k.rem_euclid(2) == 1 { s } else { 1 })
}

/// ε-bit of a 2-adic unit: 1 iff `u ≡ 3 (mod 4)`.
pub fn eps_bit(u: &Rational) -> Result<u8> {
    let r = residue_mod(u, 4)
        .filter(|r| r % 2 == 1)
        .ok_or_else(|| Error::Validation(format!("{u} is not a 2-adic unit")))?;
    Ok(if r == 3 { 1 } else { 0 })
}

/// σ-bit: 1 iff negative.
pub fn sigma_bit(x: &Rational) -> u8 {
    u8::from(x.is_negative())
}

/// `(ε_K, ε(K), σ(K))` for an odd integer `K`.
pub fn eps_data(k: i64) -> Result<(ExactScalar, u8, u8)> {
    if k % 2 == 0 {
        return Err(Error::Validation(format!("eps_data needs an odd integer, got {k}")));
    }
    let e = u8::from(k.rem_euclid(4) == 3);
    let eps_k = if e == 0 { ExactScalar::one() } else { ExactScalar::i() };
    Ok((eps_k, e, u8::from(k < 0)))
}

/// Self-test of `(2/x)·ε_x = ζ_8^{1-x}`.
pub fn zeta8_identity_check(x: i64) -> Result<bool> {
    let (eps_x, _, _) = eps_data(x)?;
    let lhs = eps_x.scale(&crate::exact::rint(two_over(&crate::exact::rint(x))? as i64));
    Ok(lhs == ExactScalar::zeta8(1 - x))
}

/// Representative of `r mod 1` in `[0, 1)`.
pub fn frac(r: &Rational) -> Rational {
    r - r.floor()
}

/// Representative of `r mod 1/2` in `[0, 1/2)`.
pub fn frac_half(r: &Rational) -> Rational {
    let two = Rational::from_integer(BigInt::from(2));
    let t = r * &two;
    (&t - t.floor()) / two
}

/// The `p`-primary component of `r` in `ℚ/ℤ = ⊕_p ℚ_p/ℤ_p`, in `[0, 1)`.
pub fn primary_part(r: &Rational, p: u64) -> Rational {
    let d = r.denom();
    let v = vp_int(d, p);
    if v == 0 {
        return Rational::zero();
    }
    let pk = num_traits::pow(BigInt::from(p), v as usize);
    let other = d / &pk;
    let inv = mod_inverse(&other.mod_floor(&pk), &pk).expect("cofactor is prime to p");
    let n = (r.numer().mod_floor(&pk) * inv).mod_floor(&pk);
    Rational::new(n, pk)
}

/// `χ_p(r) = e(p-primary part of r)`, the standard character of `ℚ_p` with kernel `ℤ_p`.
pub fn chi_p(r: &Rational, p: u64) -> ExactScalar {
    ExactScalar::e(&primary_part(r, p))
}

fn sign(b: bool) -> i8 {
    if b {
        -1
    } else {
        1
    }
}

/// Hilbert symbol `(a, b)` at a place of ℚ.
pub fn hilbert(a: &Rational, b: &Rational, place: Place) -> Result<i8> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::Validation("hilbert symbol of zero".into()));
    }
    match place {
        Place::Real => Ok(sign(a.is_negative() && b.is_negative())),
        Place::Prime(2) => {
            let x = valuation_split(a, 2)?;
            let y = valuation_split(b, 2)?;
            let mut s = sign(eps_bit(&x.unit_part)? == 1 && eps_bit(&y.unit_part)? == 1);
            s *= two_power_over(y.valuation, &x.unit_part)?;
            s *= two_power_over(x.valuation, &y.unit_part)?;
            Ok(s)
        }
        Place::Prime(p) => {
            if !is_prime(p) {
                return Err(Error::Validation(format!("{p} is not prime")));
            }
            let x = valuation_split(a, p)?;
            let y = valuation_split(b, p)?;
            let eps_p = (p % 4 == 3) as i64;
            let mut s = sign((eps_p * x.valuation * y.valuation).rem_euclid(2) == 1);
            if y.valuation.rem_euclid(2) == 1 {
                s *= legendre(&x.unit_part, p as i64)?;
            }
            if x.valuation.rem_euclid(2) == 1 {
                s *= legendre(&y.unit_part, p as i64)?;
            }
            Ok(s)
        }
    }
}

/// Integer convenience wrapper around [`hilbert`].
pub fn hilbert_int(a: i64, b: i64, place: Place) -> Result<i8> {
    hilbert(&crate::exact::rint(a), &crate::exact::rint(b), place)
}

/// Product formula self-test over ℝ and the primes dividing `2ab`.
pub fn hilbert_product_check(a: i64, b: i64) -> Result<bool> {
    if a == 0 || b == 0 {
        return Err(Error::Validation("hilbert product needs nonzero arguments".into()));
    }
    let mut primes = prime_divisors(2 * a.unsigned_abs() * b.unsigned_abs());
    primes.dedup();
    let mut prod = hilbert_int(a, b, Place::Real)?;
    for p in primes {
        prod *= hilbert_int(a, b, Place::Prime(p))?;
    }
    Ok(prod == 1)
}
