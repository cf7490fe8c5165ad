//! Rigorous numeric enclosures of cyclotomic elements.
//!
//! Values are fixed-point balls `mid ± rad` in units of `2^-w`. Every rounding
//! step widens the radius, so the final box contains the exact value.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

/// Closed rectangle in the complex plane with dyadic-rational corners.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexInterval {
    pub re_lo: BigRational,
    pub re_hi: BigRational,
    pub im_lo: BigRational,
    pub im_hi: BigRational,
}

impl ComplexInterval {
    pub fn contains(&self, re: f64, im: f64) -> bool {
        let (re, im) = (rat_from_f64(re), rat_from_f64(im));
        self.re_lo <= re && re <= self.re_hi && self.im_lo <= im && im <= self.im_hi
    }

    pub fn re_mid(&self) -> f64 {
        rat_to_f64(&((&self.re_lo + &self.re_hi) / BigInt::from(2)))
    }

    pub fn im_mid(&self) -> f64 {
        rat_to_f64(&((&self.im_lo + &self.im_hi) / BigInt::from(2)))
    }

    /// Largest side length.
    pub fn width(&self) -> BigRational {
        let a = &self.re_hi - &self.re_lo;
        let b = &self.im_hi - &self.im_lo;
        if a > b {
            a
        } else {
            b
        }
    }

    /// True when zero is excluded from the real axis side and the real part is positive.
    pub fn re_positive(&self) -> bool {
        self.re_lo > BigRational::zero()
    }

    pub fn im_contains_zero(&self) -> bool {
        self.im_lo <= BigRational::zero() && BigRational::zero() <= self.im_hi
    }
}

pub(crate) fn rat_to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

fn rat_from_f64(x: f64) -> BigRational {
    BigRational::from_float(x).unwrap_or_else(BigRational::zero)
}

/// Fixed-point ball at scale `2^-w`.
#[derive(Clone, Debug)]
struct Ball {
    mid: BigInt,
    rad: BigInt,
}

struct Ctx {
    w: u32,
}

impl Ctx {
    fn one(&self) -> BigInt {
        BigInt::one() << self.w
    }

    fn exact_int(&self, n: i64) -> Ball {
        Ball { mid: BigInt::from(n) << self.w, rad: BigInt::zero() }
    }

    fn from_rational(&self, r: &BigRational) -> Ball {
        let scaled = r.numer() << self.w;
        let (q, rem) = scaled.div_mod_floor(r.denom());
        let rad = if rem.is_zero() { BigInt::zero() } else { BigInt::one() };
        Ball { mid: q, rad }
    }

    fn add(&self, a: &Ball, b: &Ball) -> Ball {
        Ball { mid: &a.mid + &b.mid, rad: &a.rad + &b.rad }
    }

    fn neg(&self, a: &Ball) -> Ball {
        Ball { mid: -&a.mid, rad: a.rad.clone() }
    }

    fn mul(&self, a: &Ball, b: &Ball) -> Ball {
        let mid = (&a.mid * &b.mid) >> self.w;
        let err = a.mid.abs() * &b.rad + b.mid.abs() * &a.rad + &a.rad * &b.rad;
        let rad = (err >> self.w) + BigInt::from(2);
        Ball { mid, rad }
    }

    fn div_int(&self, a: &Ball, n: u64) -> Ball {
        let n = BigInt::from(n);
        Ball { mid: a.mid.div_floor(&n), rad: &a.rad / &n + BigInt::one() }
    }

    /// atan(1/x) by its alternating series.
    fn atan_inv(&self, x: u64) -> Ball {
        let x2 = BigInt::from(x) * BigInt::from(x);
        let mut power = BigInt::from(x); // x^(2k+1)
        let mut sum = BigInt::zero();
        let mut terms = 0u64;
        let mut k = 0u64;
        loop {
            let t = self.one() / (&power * BigInt::from(2 * k + 1));
            if t.is_zero() {
                break;
            }
            if k.is_multiple_of(2) {
                sum += &t;
            } else {
                sum -= &t;
            }
            terms += 1;
            power *= &x2;
            k += 1;
        }
        Ball { mid: sum, rad: BigInt::from(terms + 2) }
    }

    fn pi(&self) -> Ball {
        let a = self.atan_inv(5);
        let b = self.atan_inv(239);
        let a16 = Ball { mid: a.mid * 16, rad: a.rad * 16 };
        let b4 = Ball { mid: b.mid * 4, rad: b.rad * 4 };
        self.add(&a16, &self.neg(&b4))
    }

    /// (cos θ, sin θ) for 0 ≤ θ ≤ 1 via Taylor series with a tail bound.
    fn cos_sin_small(&self, theta: &Ball) -> (Ball, Ball) {
        let th2 = self.mul(theta, theta);
        let tiny = BigInt::one();
        let series = |start: Ball, first_den: u64| -> Ball {
            let mut term = start;
            let mut sum = term.clone();
            let mut j = 0u64;
            loop {
                let a = first_den + 2 * j;
                let next = self.div_int(&self.mul(&term, &th2), a * (a + 1));
                j += 1;
                let mag = next.mid.abs() + &next.rad;
                let next = self.neg(&next);
                if mag <= tiny {
                    // alternating with decreasing terms: tail bounded by first omitted term
                    sum.rad += mag + BigInt::one();
                    return sum;
                }
                sum = self.add(&sum, &next);
                term = next;
            }
        };
        let cos = series(self.exact_int(1), 1);
        let sin = series(theta.clone(), 2);
        (cos, sin)
    }

    /// (cos, sin) of 2π·k/n, using octant symmetry so the series argument stays below π/4.
    fn cos_sin_frac(&self, pi: &Ball, k: u64, n: u64) -> (Ball, Ball) {
        let k = k % n;
        // position in eighths: 8k = oct*n + r, 0 ≤ r < n
        let oct = (8 * k) / n;
        let r = (8 * k) % n;
        // angle inside the octant is (π/4)·(r/n); odd octants are mirrored
        let (num, den) = if oct % 2 == 1 { (n - r, n) } else { (r, n) };
        let base = self.div_int(&Ball { mid: &pi.mid * BigInt::from(num), rad: &pi.rad * BigInt::from(num) }, 4 * den);
        let (c, s) = self.cos_sin_small(&base);
        // map back: angle = oct·π/4 ± base
        match oct {
            0 => (c, s),
            1 => (s, c),
            2 => (self.neg(&s), c),
            3 => (self.neg(&c), s),
            4 => (self.neg(&c), self.neg(&s)),
            5 => (self.neg(&s), self.neg(&c)),
            6 => (s, self.neg(&c)),
            _ => (c, self.neg(&s)),
        }
    }

    fn to_bounds(&self, b: &Ball) -> (BigRational, BigRational) {
        let den = self.one();
        (
            BigRational::new(&b.mid - &b.rad, den.clone()),
            BigRational::new(&b.mid + &b.rad, den),
        )
    }
}

/// Enclosure of `Σ coeffs[k] ζ_order^k` under `ζ_order ↦ e(1/order)`.
pub fn enclose(order: u32, coeffs: &[BigRational], precision_bits: u32) -> ComplexInterval {
    let ctx = Ctx { w: precision_bits.max(32) + 24 };
    let pi = ctx.pi();
    let mut re = ctx.exact_int(0);
    let mut im = ctx.exact_int(0);
    for (k, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let cb = ctx.from_rational(c);
        let (cs, sn) = ctx.cos_sin_frac(&pi, k as u64, order as u64);
        re = ctx.add(&re, &ctx.mul(&cb, &cs));
        im = ctx.add(&im, &ctx.mul(&cb, &sn));
    }
    let (re_lo, re_hi) = ctx.to_bounds(&re);
    let (im_lo, im_hi) = ctx.to_bounds(&im);
    ComplexInterval { re_lo, re_hi, im_lo, im_hi }
}

/// Decimal rendering of a rational with `digits` fractional digits (truncated toward zero).
pub fn to_decimal(r: &BigRational, digits: usize) -> String {
    let neg = r.is_negative();
    let a = r.abs();
    let scale = num_traits::pow(BigInt::from(10), digits);
    let scaled = (a.numer() * &scale) / a.denom();
    let (ip, fp) = scaled.div_rem(&scale);
    let mut s = String::new();
    if neg && !scaled.is_zero() {
        s.push('-');
    }
    s.push_str(&ip.to_string());
    if digits > 0 {
        let f = fp.to_string();
        s.push('.');
        for _ in f.len()..digits {
            s.push('0');
        }
        s.push_str(&f);
    }
    s
}

/// Decimal string of `r` rounded down (or up) to `digits` places, so lower
/// and upper bounds stay enclosures after printing.
pub fn to_decimal_directed(r: &BigRational, digits: usize, up: bool) -> String {
    let scale = BigRational::from_integer(num_traits::pow(BigInt::from(10), digits));
    let scaled = r * &scale;
    let k = if up { scaled.ceil() } else { scaled.floor() };
    to_decimal(&(k / scale), digits)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn pi_is_enclosed() {
        let ctx = Ctx { w: 100 };
        let (lo, hi) = ctx.to_bounds(&ctx.pi());
        assert!(rat_to_f64(&lo) <= std::f64::consts::PI && std::f64::consts::PI <= rat_to_f64(&hi));
        assert!(&hi - &lo < rat(1, 1 << 30));
    }

    #[test]
    fn unit_circle_points() {
        for n in [1u32, 2, 3, 5, 8, 12, 56] {
            for k in 0..n {
                let mut coeffs = vec![BigRational::zero(); k as usize + 1];
                coeffs[k as usize] = rat(1, 1);
                let iv = enclose(n, &coeffs, 64);
                let ang = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                assert!((iv.re_mid() - ang.cos()).abs() < 1e-12, "n={n} k={k}");
                assert!((iv.im_mid() - ang.sin()).abs() < 1e-12, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn width_shrinks() {
        let coeffs = vec![rat(0, 1), rat(1, 3)];
        let w64 = enclose(7, &coeffs, 64).width();
        let w200 = enclose(7, &coeffs, 200).width();
        assert!(w200 < w64);
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(to_decimal(&rat(-3, 2), 3), "-1.500");
        assert_eq!(to_decimal(&rat(1, 3), 4), "0.3333");
        assert_eq!(to_decimal(&rat(7, 1), 0), "7");
        assert_eq!(to_decimal_directed(&rat(1, 3), 2, true), "0.34");
        assert_eq!(to_decimal_directed(&rat(-1, 3), 2, false), "-0.34");
        assert_eq!(to_decimal_directed(&rat(-1, 3), 2, true), "-0.33");
    }
}
