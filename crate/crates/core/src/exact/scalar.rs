//! The cyclotomic scalar type.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::numeric::{enclose, ComplexInterval};
use super::tables::{tables, totient};
use crate::error::{Error, Result};

/// Arbitrary-precision rational number.
pub type Rational = BigRational;

/// Element of `Q(ζ_L)` stored in the reduced power basis.
///
/// Coefficients share one positive denominator; `num[k] / den` is the
/// coefficient of `ζ_L^k`. Two scalars of different orders compare equal when
/// they agree after embedding into the compositum.
#[derive(Clone)]
pub struct ExactScalar {
    order: u32,
    num: Vec<BigInt>,
    den: BigInt,
}

fn lcm(a: u32, b: u32) -> u32 {
    a.lcm(&b)
}

impl ExactScalar {
    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn from_int(n: i64) -> Self {
        ExactScalar { order: 1, num: vec![BigInt::from(n)], den: BigInt::one() }
    }

    pub fn from_rational(r: &Rational) -> Self {
        ExactScalar { order: 1, num: vec![r.numer().clone()], den: r.denom().clone() }.normalized()
    }

    /// Builds an element from rational power-basis coefficients.
    pub fn from_coeffs(order: u32, coeffs: &[Rational]) -> Result<Self> {
        if order == 0 {
            return Err(Error::Validation("cyclotomic order must be positive".into()));
        }
        let phi = totient(order);
        if coeffs.len() != phi {
            return Err(Error::Validation(format!(
                "order {order} needs {phi} coefficients, got {}",
                coeffs.len()
            )));
        }
        let den = coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let num = coeffs.iter().map(|c| c.numer() * (&den / c.denom())).collect();
        Ok(ExactScalar { order, num, den }.normalized())
    }

    /// `e(num/den)` as an element of `Q(ζ_den)`.
    pub fn root_of_unity(num: i64, den: u64) -> Self {
        assert!(den >= 1, "root of unity needs a positive denominator");
        let g = (num.rem_euclid(den as i64) as u64).gcd(&den);
        let (k, n) = if g == 0 {
            (0, 1)
        } else {
            ((num.rem_euclid(den as i64) as u64) / g, den / g)
        };
        Self::zeta_power(n as u32, k)
    }

    /// `ζ_order^k`.
    pub fn zeta_power(order: u32, k: u64) -> Self {
        let t = tables(order);
        let row = &t.pow[(k % order as u64) as usize];
        ExactScalar {
            order,
            num: row.iter().map(|&c| BigInt::from(c)).collect(),
            den: BigInt::one(),
        }
        .normalized()
    }

    /// `e(r) = exp(2πi r)` for a rational `r`.
    pub fn e(r: &Rational) -> Self {
        let den = r.denom().to_u64().expect("root of unity order too large");
        let num = r.numer().mod_floor(r.denom()).to_i64().expect("reduced numerator fits");
        Self::root_of_unity(num, den)
    }

    /// `ζ_8^k`, accepting any integer exponent.
    pub fn zeta8(k: i64) -> Self {
        Self::root_of_unity(k, 8)
    }

    /// `i = ζ_4`.
    pub fn i() -> Self {
        Self::root_of_unity(1, 4)
    }

    /// Positive square root of a positive rational.
    ///
    /// `√(a/b) = √(ab)/b`; the squarefree part of `ab` is a product of primes,
    /// each embedded through its quadratic Gauss sum.
    pub fn sqrt_rat(r: &Rational) -> Result<Self> {
        if !r.is_positive() {
            return Err(Error::Validation(format!("square root of non-positive rational {r}")));
        }
        let n = r.numer() * r.denom();
        let (square, free) = split_square(&n);
        let mut acc = ExactScalar::from_rational(&Rational::new(square, r.denom().clone()));
        for p in factor_small(&free) {
            acc = &acc * &sqrt_prime(p);
        }
        let iv = acc.eval_numeric(64);
        if !(iv.re_positive() && iv.im_contains_zero()) {
            return Err(Error::Invariant(format!("square root of {r} left the positive real axis")));
        }
        Ok(acc)
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Power-basis coefficients as reduced rationals.
    pub fn coeffs(&self) -> Vec<Rational> {
        self.num.iter().map(|n| Rational::new(n.clone(), self.den.clone())).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(Zero::is_zero)
    }

    /// `Some(r)` when the element is rational.
    pub fn as_rational(&self) -> Option<Rational> {
        if self.num.iter().skip(1).all(Zero::is_zero) {
            Some(Rational::new(self.num[0].clone(), self.den.clone()))
        } else {
            None
        }
    }

    fn normalized(mut self) -> Self {
        if self.den.is_negative() {
            self.den = -self.den;
            for n in &mut self.num {
                *n = -&*n;
            }
        }
        let mut g = self.den.clone();
        for n in &self.num {
            if g.is_one() {
                break;
            }
            if !n.is_zero() {
                g = g.gcd(n);
            }
        }
        if self.is_zero() {
            return ExactScalar { order: 1, num: vec![BigInt::zero()], den: BigInt::one() };
        }
        if !g.is_one() {
            self.den = &self.den / &g;
            for n in &mut self.num {
                *n = &*n / &g;
            }
        }
        if self.order > 1 && self.num.iter().skip(1).all(Zero::is_zero) {
            let c = self.num.swap_remove(0);
            self.num = vec![c];
            self.order = 1;
        }
        self
    }

    /// Re-expresses the element in `Q(ζ_target)`; `target` must be a multiple of the order.
    pub fn embed(&self, target: u32) -> Self {
        assert!(target.is_multiple_of(self.order), "cannot embed order {} into {target}", self.order);
        if target == self.order {
            return self.clone();
        }
        let step = (target / self.order) as usize;
        let t = tables(target);
        let mut out = vec![BigInt::zero(); t.phi];
        for (k, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            accumulate_row(&mut out, &t.pow[(k * step) % target as usize], c);
        }
        ExactScalar { order: target, num: out, den: self.den.clone() }
    }

    fn unify(&self, other: &Self) -> (Self, Self) {
        let l = lcm(self.order, other.order);
        (self.embed(l), other.embed(l))
    }

    pub fn add_ref(&self, other: &Self) -> Self {
        let (a, b) = self.unify(other);
        let den = a.den.lcm(&b.den);
        let fa = &den / &a.den;
        let fb = &den / &b.den;
        let num = a.num.iter().zip(&b.num).map(|(x, y)| x * &fa + y * &fb).collect();
        ExactScalar { order: a.order, num, den }.normalized()
    }

    pub fn mul_ref(&self, other: &Self) -> Self {
        if self.order == 1 {
            return other.scale_big(&self.num[0], &self.den);
        }
        if other.order == 1 {
            return self.scale_big(&other.num[0], &other.den);
        }
        let (a, b) = self.unify(other);
        let l = a.order as usize;
        let t = tables(a.order);
        let mut prod = vec![BigInt::zero(); 2 * t.phi - 1];
        for (i, x) in a.num.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.num.iter().enumerate() {
                if !y.is_zero() {
                    prod[i + j] += x * y;
                }
            }
        }
        let mut out: Vec<BigInt> = prod.drain(..t.phi).collect();
        for (k, c) in prod.iter().enumerate() {
            if !c.is_zero() {
                accumulate_row(&mut out, &t.pow[(k + t.phi) % l], c);
            }
        }
        ExactScalar { order: a.order, num: out, den: &a.den * &b.den }.normalized()
    }

    fn scale_big(&self, n: &BigInt, d: &BigInt) -> Self {
        ExactScalar {
            order: self.order,
            num: self.num.iter().map(|x| x * n).collect(),
            den: &self.den * d,
        }
        .normalized()
    }

    pub fn scale(&self, r: &Rational) -> Self {
        self.scale_big(r.numer(), r.denom())
    }

    /// Image under `ζ_L ↦ ζ_L^j` for `j` coprime to the order.
    pub fn galois(&self, j: u64) -> Self {
        let l = self.order as u64;
        let t = tables(self.order);
        let mut out = vec![BigInt::zero(); t.phi];
        for (k, c) in self.num.iter().enumerate() {
            if !c.is_zero() {
                accumulate_row(&mut out, &t.pow[((k as u64 * j) % l) as usize], c);
            }
        }
        ExactScalar { order: self.order, num: out, den: self.den.clone() }.normalized()
    }

    /// Complex conjugation, `ζ_L ↦ ζ_L^{-1}`.
    pub fn conj(&self) -> Self {
        if self.order <= 2 {
            return self.clone();
        }
        self.galois(self.order as u64 - 1)
    }

    /// Multiplicative inverse via the product of the nontrivial Galois conjugates.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::Validation("inverse of zero".into()));
        }
        let l = self.order as u64;
        let mut others = ExactScalar::one();
        for j in 2..l {
            if j.gcd(&l) == 1 {
                others = &others * &self.galois(j);
            }
        }
        let norm = (self * &others)
            .as_rational()
            .ok_or_else(|| Error::Invariant("field norm is not rational".into()))?;
        Ok(others.scale(&norm.recip()))
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = ExactScalar::one();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &sq;
            }
            e >>= 1;
            if e > 0 {
                sq = &sq * &sq;
            }
        }
        Ok(acc)
    }

    /// Rigorous enclosure of the standard complex embedding.
    pub fn eval_numeric(&self, precision_bits: u32) -> ComplexInterval {
        enclose(self.order, &self.coeffs(), precision_bits)
    }

    /// `Some(k)` when the element equals `ζ_order^k` in its own order.
    pub fn as_root_of_unity(&self) -> Option<(u32, u32)> {
        let l = lcm(self.order, 2);
        let me = self.embed(l);
        (0..l).find(|&k| ExactScalar::zeta_power(l, k as u64) == me).map(|k| (k, l))
    }
}

/// `out += c · row`.
fn accumulate_row(out: &mut [BigInt], row: &[i64], c: &BigInt) {
    for (o, &r) in out.iter_mut().zip(row) {
        match r {
            0 => {}
            1 => *o += c,
            -1 => *o -= c,
            _ => *o += c * BigInt::from(r),
        }
    }
}

/// `n = s² · f` with `f` squarefree.
fn split_square(n: &BigInt) -> (BigInt, BigInt) {
    let mut square = BigInt::one();
    let mut free = BigInt::one();
    for (p, e) in factor_with_mult(n) {
        let pb = BigInt::from(p);
        square *= num_traits::pow(pb.clone(), (e / 2) as usize);
        if e % 2 == 1 {
            free *= pb;
        }
    }
    (square, free)
}

fn factor_with_mult(n: &BigInt) -> Vec<(u64, u32)> {
    let mut m = n.abs().to_u64().expect("sqrt_rat argument too large to factor");
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= m {
        if m.is_multiple_of(p) {
            let mut e = 0;
            while m.is_multiple_of(p) {
                m /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if m > 1 {
        out.push((m, 1));
    }
    out
}

fn factor_small(n: &BigInt) -> Vec<u64> {
    factor_with_mult(n).into_iter().map(|(p, _)| p).collect()
}

/// `√p` for a prime `p`.
fn sqrt_prime(p: u64) -> ExactScalar {
    if p == 2 {
        return &ExactScalar::zeta8(1) + &ExactScalar::zeta8(-1);
    }
    // g = Σ (k/p) ζ_p^k equals √p for p ≡ 1 (4) and i√p for p ≡ 3 (4)
    let mut g = ExactScalar::zero();
    for k in 1..p {
        let term = ExactScalar::root_of_unity(k as i64, p);
        if crate::numth::legendre_int(k as i64, p as i64) == 1 {
            g = &g + &term;
        } else {
            g = &g - &term;
        }
    }
    if p % 4 == 1 {
        g
    } else {
        &g * &ExactScalar::root_of_unity(-1, 4)
    }
}

impl PartialEq for ExactScalar {
    fn eq(&self, other: &Self) -> bool {
        if self.order == other.order {
            return self.den == other.den && self.num == other.num;
        }
        let (a, b) = self.unify(other);
        a.num.iter().zip(&b.num).all(|(x, y)| x * &b.den == y * &a.den)
    }
}

impl Eq for ExactScalar {}

impl fmt::Debug for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (k, c) in self.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            match k {
                0 => parts.push(format!("{c}")),
                _ => parts.push(format!("({c})·ζ{}^{k}", self.order)),
            }
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl<'a> $tr<&'a ExactScalar> for &'a ExactScalar {
            type Output = ExactScalar;
            fn $m(self, rhs: &'a ExactScalar) -> ExactScalar {
                $body(self, rhs)
            }
        }
        impl $tr<ExactScalar> for ExactScalar {
            type Output = ExactScalar;
            fn $m(self, rhs: ExactScalar) -> ExactScalar {
                $body(&self, &rhs)
            }
        }
    };
}

binop!(Add, add, |a: &ExactScalar, b: &ExactScalar| a.add_ref(b));
binop!(Sub, sub, |a: &ExactScalar, b: &ExactScalar| a.add_ref(&-b));
binop!(Mul, mul, |a: &ExactScalar, b: &ExactScalar| a.mul_ref(b));

impl Neg for &ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        ExactScalar {
            order: self.order,
            num: self.num.iter().map(|x| -x).collect(),
            den: self.den.clone(),
        }
    }
}

impl Neg for ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        -&self
    }
}

#[derive(Serialize, Deserialize)]
struct ScalarRepr {
    order: u32,
    coeffs: Vec<String>,
}

impl Serialize for ExactScalar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ScalarRepr { order: self.order, coeffs: self.coeffs().iter().map(|c| c.to_string()).collect() }
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ExactScalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = ScalarRepr::deserialize(d)?;
        let coeffs = repr
            .coeffs
            .iter()
            .map(|s| s.parse::<Rational>().map_err(|e| D::Error::custom(format!("bad rational {s:?}: {e}"))))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        ExactScalar::from_coeffs(repr.order, &coeffs).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn roots_of_unity_basics() {
        assert_eq!(ExactScalar::root_of_unity(0, 1), ExactScalar::one());
        assert_eq!(ExactScalar::root_of_unity(1, 2), ExactScalar::from_int(-1));
        let z8 = ExactScalar::root_of_unity(1, 8);
        assert_eq!(z8.pow(4).unwrap(), ExactScalar::from_int(-1));
        assert_eq!(ExactScalar::root_of_unity(-3, 8), ExactScalar::root_of_unity(5, 8));
    }

    #[test]
    fn vanishing_sum() {
        let s = &(&ExactScalar::one() + &ExactScalar::root_of_unity(1, 3)) + &ExactScalar::root_of_unity(2, 3);
        assert!(s.is_zero());
        assert_eq!(s, ExactScalar::zero());
    }

    #[test]
    fn conj_of_zeta8() {
        assert_eq!(ExactScalar::zeta8(1).conj(), ExactScalar::zeta8(-1));
    }

    #[test]
    fn square_roots() {
        assert_eq!(ExactScalar::sqrt_rat(&rat(4, 1)).unwrap(), ExactScalar::from_int(2));
        let s2 = ExactScalar::sqrt_rat(&rat(2, 1)).unwrap();
        assert_eq!(s2, &ExactScalar::zeta8(1) + &ExactScalar::zeta8(-1));
        assert_eq!(&s2 * &s2, ExactScalar::from_int(2));
        let h = ExactScalar::sqrt_rat(&rat(1, 2)).unwrap();
        assert_eq!(h, s2.scale(&rat(1, 2)));
        for (n, d) in [(3, 1), (7, 5), (12, 7), (48, 1), (1, 6)] {
            let s = ExactScalar::sqrt_rat(&rat(n, d)).unwrap();
            assert_eq!(&s * &s, ExactScalar::from_rational(&rat(n, d)), "√({n}/{d})");
        }
        assert!(ExactScalar::sqrt_rat(&rat(0, 1)).is_err());
        assert!(ExactScalar::sqrt_rat(&rat(-2, 1)).is_err());
    }

    #[test]
    fn numeric_examples() {
        let z8 = ExactScalar::zeta8(1).eval_numeric(64);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((z8.re_mid() - h).abs() < 1e-15 && (z8.im_mid() - h).abs() < 1e-15);
        let s2 = ExactScalar::sqrt_rat(&rat(2, 1)).unwrap().eval_numeric(64);
        assert!((s2.re_mid() - std::f64::consts::SQRT_2).abs() < 1e-15);
        let w = ExactScalar::root_of_unity(1, 3).eval_numeric(64);
        assert!((w.re_mid() + 0.5).abs() < 1e-15 && (w.im_mid() - 0.8660254037844386).abs() < 1e-15);
    }

    #[test]
    fn inverse_and_embedding() {
        let x = &ExactScalar::root_of_unity(1, 12) + &ExactScalar::from_int(3);
        let y = x.inv().unwrap();
        assert_eq!(&x * &y, ExactScalar::one());
        let e = x.embed(24);
        assert_eq!(e, x);
        assert_eq!(e.order(), 24);
    }

    #[test]
    fn serde_round_trip() {
        let x = &ExactScalar::sqrt_rat(&rat(3, 2)).unwrap() + &ExactScalar::root_of_unity(5, 7);
        let js = serde_json::to_string(&x).unwrap();
        let back: ExactScalar = serde_json::from_str(&js).unwrap();
        assert_eq!(back, x);
        assert_eq!(back.order(), x.order());
    }

    #[test]
    fn root_of_unity_detection() {
        assert_eq!(ExactScalar::zeta8(3).as_root_of_unity(), Some((3, 8)));
        assert_eq!(ExactScalar::sqrt_rat(&rat(2, 1)).unwrap().as_root_of_unity(), None);
    }
}
