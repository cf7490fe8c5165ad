//! `SL₂(ℤ)`, the metaplectic double cover `Mp₂(ℤ)` as pairs `(A, ε)` with the
//! real Kubota cocycle, words in `T` and `S`, and the lifts into `Mp₂(ℚ_p)`.
//!
//! `(A, ε)` stands for `(A, ε√j(A,τ))` with the branch of `√j` whose argument
//! lies in `[−π/2, π/2)`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{rint, Rational};
use crate::jordan::odd_part;
use crate::numth::{hilbert, legendre, two_power_over, unit_part, vp, Place};

/// Integer matrix `[[a, b], [c, d]]` of determinant one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SL2Z {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl SL2Z {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        if a as i128 * d as i128 - b as i128 * c as i128 != 1 {
            return Err(Error::Validation(format!("[[{a},{b}],[{c},{d}]] does not have determinant 1")));
        }
        Ok(SL2Z { a, b, c, d })
    }

    pub const IDENTITY: SL2Z = SL2Z { a: 1, b: 0, c: 0, d: 1 };
    pub const S: SL2Z = SL2Z { a: 0, b: -1, c: 1, d: 0 };
    pub const S_INV: SL2Z = SL2Z { a: 0, b: 1, c: -1, d: 0 };
    pub const MINUS_I: SL2Z = SL2Z { a: -1, b: 0, c: 0, d: -1 };

    pub fn t(k: i64) -> Self {
        SL2Z { a: 1, b: k, c: 0, d: 1 }
    }

    pub fn mul(&self, o: &SL2Z) -> SL2Z {
        SL2Z {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }

    pub fn inv(&self) -> SL2Z {
        SL2Z { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    pub fn neg(&self) -> SL2Z {
        SL2Z { a: -self.a, b: -self.b, c: -self.c, d: -self.d }
    }

    /// Entries as rationals, for the cocycle over a field.
    pub fn to_rat(&self) -> RatMat {
        [rint(self.a), rint(self.b), rint(self.c), rint(self.d)]
    }

    /// `A ∈ Γ₁(4)`: `c ≡ 0`, `a ≡ d ≡ 1 (mod 4)`.
    pub fn in_gamma1_4(&self) -> bool {
        self.c.rem_euclid(4) == 0 && self.a.rem_euclid(4) == 1 && self.d.rem_euclid(4) == 1
    }

    /// `A ≡ I (mod n)`.
    pub fn in_gamma(&self, n: i64) -> bool {
        let n = n.abs();
        n == 1
            || ((self.a - 1).rem_euclid(n) == 0
                && self.b.rem_euclid(n) == 0
                && self.c.rem_euclid(n) == 0
                && (self.d - 1).rem_euclid(n) == 0)
    }

    /// `n | c`.
    pub fn in_gamma0(&self, n: i64) -> bool {
        self.c.rem_euclid(n.abs().max(1)) == 0
    }
}

impl fmt::Display for SL2Z {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{},{}],[{},{}]]", self.a, self.b, self.c, self.d)
    }
}

/// `[a, b, c, d]` over ℚ.
pub type RatMat = [Rational; 4];

fn hil(x: &Rational, y: &Rational, place: Place) -> i8 {
    hilbert(x, y, place).expect("Hilbert symbol of nonzero rationals")
}

/// Kubota cocycle `σ(A, B)` at a place, for determinant-one matrices over ℚ.
pub fn kubota_cocycle(a_m: &RatMat, b_m: &RatMat, place: Place) -> i8 {
    let [_, _, c, d] = a_m;
    let [e, _, g, h] = b_m;
    let x = c * e + d * g;
    match (c == &rint(0), g == &rint(0)) {
        (true, true) => hil(d, h, place),
        (true, false) => hil(d, g, place),
        (false, true) => hil(c, h, place),
        (false, false) => {
            if x == rint(0) {
                hil(&-c.clone(), &-g.clone(), place)
            } else {
                hil(c, g, place) * hil(&x, &-(c * g), place)
            }
        }
    }
}

/// `σ(A, B)` for integer matrices.
pub fn sigma(a: &SL2Z, b: &SL2Z, place: Place) -> i8 {
    kubota_cocycle(&a.to_rat(), &b.to_rat(), place)
}

/// The alternative forms of `(c,g)(ce+dg,−cg)`.
pub fn cgxde_form(c: &Rational, g: &Rational, d: &Rational, e: &Rational, place: Place) -> Result<i8> {
    let zero = rint(0);
    let x = c * e + d * g;
    if *c == zero || *g == zero || x == zero {
        return Err(Error::Validation("c, g and ce+dg must be nonzero".into()));
    }
    let mcg = -(c * g);
    Ok(if *d == zero {
        hil(e, &mcg, place)
    } else if *e == zero {
        hil(d, &mcg, place)
    } else {
        hil(d, &(c * &x), place) * hil(e, &(g * &x), place) * hil(d, e, place)
    })
}

/// `(A, ε)` in `Mp₂(ℤ)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MpElement {
    pub mat: SL2Z,
    pub eps: i8,
}

impl MpElement {
    pub fn new(mat: SL2Z, eps: i8) -> Result<Self> {
        if eps != 1 && eps != -1 {
            return Err(Error::Validation(format!("metaplectic sign must be ±1, got {eps}")));
        }
        Ok(MpElement { mat, eps })
    }

    pub fn identity() -> Self {
        MpElement { mat: SL2Z::IDENTITY, eps: 1 }
    }

    pub fn t(k: i64) -> Self {
        MpElement { mat: SL2Z::t(k), eps: 1 }
    }

    pub fn s() -> Self {
        MpElement { mat: SL2Z::S, eps: 1 }
    }

    /// `(S⁻¹, +1)`, the inverse of `(S, +1)` since `σ(S, S⁻¹) = 1`.
    pub fn s_inv() -> Self {
        MpElement { mat: SL2Z::S_INV, eps: 1 }
    }

    /// `Z = S² = (−I, −1)`.
    pub fn z() -> Self {
        MpElement { mat: SL2Z::MINUS_I, eps: -1 }
    }

    /// `Z² = (I, −1)`.
    pub fn z2() -> Self {
        MpElement { mat: SL2Z::IDENTITY, eps: -1 }
    }

    pub fn mul(&self, o: &MpElement) -> MpElement {
        mp_mul(self, o)
    }

    pub fn inv(&self) -> MpElement {
        mp_inv(self)
    }

    pub fn pow(&self, k: u32) -> MpElement {
        (0..k).fold(MpElement::identity(), |acc, _| acc.mul(self))
    }
}

impl fmt::Display for MpElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.mat, if self.eps > 0 { "+1" } else { "-1" })
    }
}

/// `(A, ε)(B, δ) = (AB, σ_ℝ(A, B)εδ)`.
pub fn mp_mul(x: &MpElement, y: &MpElement) -> MpElement {
    MpElement { mat: x.mat.mul(&y.mat), eps: sigma(&x.mat, &y.mat, Place::Real) * x.eps * y.eps }
}

pub fn mp_inv(x: &MpElement) -> MpElement {
    let inv = x.mat.inv();
    MpElement { mat: inv, eps: sigma(&x.mat, &inv, Place::Real) * x.eps }
}

/// Generator token of a word.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Token {
    T(i64),
    S,
    SInv,
}

impl Token {
    pub fn matrix(&self) -> SL2Z {
        match self {
            Token::T(k) => SL2Z::t(*k),
            Token::S => SL2Z::S,
            Token::SInv => SL2Z::S_INV,
        }
    }

    pub fn element(&self) -> MpElement {
        match self {
            Token::T(k) => MpElement::t(*k),
            Token::S => MpElement::s(),
            Token::SInv => MpElement::s_inv(),
        }
    }
}

pub type Word = Vec<Token>;

pub fn word_matrix(w: &[Token]) -> SL2Z {
    w.iter().fold(SL2Z::IDENTITY, |acc, t| acc.mul(&t.matrix()))
}

/// Product of the tokens' metaplectic elements.
pub fn word_element(w: &[Token]) -> MpElement {
    w.iter().fold(MpElement::identity(), |acc, t| acc.mul(&t.element()))
}

fn euclid(a: &SL2Z, step: i64) -> Word {
    let mut m = *a;
    let mut suffix: Vec<Token> = Vec::new();
    while m.c != 0 {
        let c = m.c;
        let modulus = step * c.abs();
        // d' ≡ d (mod step·|c|) with |d'| < |c|
        let mut dn = m.d.rem_euclid(modulus);
        if dn > modulus / 2 {
            dn -= modulus;
        }
        let k = (dn - m.d) / c;
        m = m.mul(&SL2Z::t(k)).mul(&SL2Z::S);
        suffix.push(Token::T(-k));
        suffix.push(Token::SInv);
    }
    let mut word = Vec::new();
    if m.a == -1 {
        word.push(Token::S);
        word.push(Token::S);
        m = m.neg();
    }
    if m.b != 0 {
        word.push(Token::T(m.b));
    }
    word.extend(suffix.into_iter().rev().filter(|t| *t != Token::T(0)));
    word
}

/// Word in `T^k, S, S⁻¹` with product `A`.
pub fn decompose_st(a: &SL2Z) -> Word {
    euclid(a, 1)
}

/// `ac` and `bd` even, i.e. `A ∈ Γ(2) ∪ SΓ(2)`.
pub fn gamma_odd_member(a: &SL2Z) -> bool {
    (a.a * a.c) % 2 == 0 && (a.b * a.d) % 2 == 0
}

/// Word in `T^{2k}, S, S⁻¹` with product `A ∈ Γ_odd`.
pub fn decompose_t2s(a: &SL2Z) -> Result<Word> {
    if !gamma_odd_member(a) {
        return Err(Error::Validation(format!("{a} is not in Γ_odd")));
    }
    Ok(euclid(a, 2))
}

/// `ι(A) = (a_p, p^{v_p(c)})_{ℚ_p}`, or `1` when `c = 0`.
pub fn iota_lift(a: &SL2Z, p: u64) -> Result<i8> {
    if p == 2 && !a.in_gamma1_4() {
        return Err(Error::Validation(format!("{a} is not in Γ₁(4)")));
    }
    if a.c == 0 {
        return Ok(1);
    }
    let v = vp(a.c, p);
    if v == 0 || a.a == 0 {
        return Ok(1);
    }
    let pv = num_traits::pow(num_bigint::BigInt::from(p), v as usize);
    hilbert(&rint(unit_part(a.a, p)), &Rational::from_integer(pv), Place::Prime(p))
}

/// The injection `Mp₂(ℤ) → Mp₂(ℚ₂)`: sign `ε` if `c = 0`, else `(a/c₂)ε`.
pub fn i_map(x: &MpElement) -> (SL2Z, i8) {
    let m = x.mat;
    if m.c == 0 {
        return (m, x.eps);
    }
    let s = legendre(&rint(m.a), odd_part(m.c)).expect("a is prime to c₂");
    (m, s * x.eps)
}

/// Lift `Γ₁(4) → Mp₂(ℤ)`: `(A, (2/a)^{v₂(c)}(a/c₂))`.
pub fn gamma4_lift(a: &SL2Z) -> Result<MpElement> {
    if !a.in_gamma1_4() {
        return Err(Error::Validation(format!("{a} is not in Γ₁(4)")));
    }
    if a.c == 0 {
        return Ok(MpElement { mat: *a, eps: 1 });
    }
    let ar = rint(a.a);
    let s = two_power_over(vp(a.c, 2), &ar)? * legendre(&ar, odd_part(a.c))?;
    Ok(MpElement { mat: *a, eps: s })
}

/// `√z` with argument in `[−π/2, π/2)`.
fn sqrt_branch(re: f64, im: f64) -> (f64, f64) {
    let r = re.hypot(im).sqrt();
    let mut arg = im.atan2(re);
    // atan2 returns +π on the negative real axis
    if im == 0.0 && re < 0.0 {
        arg = -std::f64::consts::PI;
    }
    let h = arg / 2.0;
    (r * h.cos(), r * h.sin())
}

fn cmul(x: (f64, f64), y: (f64, f64)) -> (f64, f64) {
    (x.0 * y.0 - x.1 * y.1, x.0 * y.1 + x.1 * y.0)
}

/// Sign of `√j(A, Bτ)√j(B, τ) / √j(AB, τ)` at `τ = i`, in floating point.
pub fn branch_sign(a: &SL2Z, b: &SL2Z) -> i8 {
    let j = |m: &SL2Z, tau: (f64, f64)| (m.c as f64 * tau.0 + m.d as f64, m.c as f64 * tau.1);
    let tau = (0.0, 1.0);
    // Bτ = (eτ + f)/(gτ + h)
    let num = (b.a as f64 * tau.0 + b.b as f64, b.a as f64 * tau.1);
    let den = j(b, tau);
    let dd = den.0 * den.0 + den.1 * den.1;
    let btau = cmul(num, (den.0 / dd, -den.1 / dd));
    let lhs = cmul(sqrt_branch(j(a, btau).0, j(a, btau).1), sqrt_branch(den.0, den.1));
    let ab = a.mul(b);
    let r = sqrt_branch(j(&ab, tau).0, j(&ab, tau).1);
    let dot = lhs.0 * r.0 + lhs.1 * r.1;
    if dot >= 0.0 {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(a: i64, b: i64, c: i64, d: i64) -> SL2Z {
        SL2Z::new(a, b, c, d).unwrap()
    }

    #[test]
    fn cocycle_examples() {
        let places = [Place::Real, Place::Prime(2), Place::Prime(3), Place::Prime(5)];
        for pl in places {
            assert_eq!(sigma(&SL2Z::S, &SL2Z::S_INV, pl), 1);
            assert_eq!(sigma(&SL2Z::S_INV, &SL2Z::S, pl), 1);
            for a in [m(2, 1, 5, 3), SL2Z::S, m(-1, 0, 0, -1), m(1, 0, 4, 1)] {
                assert_eq!(sigma(&SL2Z::t(3), &a, pl), 1);
                assert_eq!(sigma(&a, &SL2Z::t(-2), pl), 1);
            }
        }
        assert_eq!(sigma(&SL2Z::MINUS_I, &SL2Z::MINUS_I, Place::Real), -1);
    }

    #[test]
    fn group_relations() {
        let s = MpElement::s();
        let t = MpElement::t(1);
        let z = MpElement::z();
        assert_eq!(s.mul(&s), z);
        assert_eq!(z.mul(&z), MpElement::z2());
        assert_eq!(z.pow(4), MpElement::identity());
        assert_eq!(s.mul(&t).pow(3), z);
        let x = MpElement::new(m(5, 2, 7, 3), -1).unwrap();
        assert_eq!(x.mul(&x.inv()), MpElement::identity());
        assert_eq!(s.mul(&MpElement::s_inv()), MpElement::identity());
    }

    #[test]
    fn words() {
        assert_eq!(decompose_st(&SL2Z::t(1)), vec![Token::T(1)]);
        assert_eq!(word_matrix(&decompose_st(&SL2Z::S)), SL2Z::S);
        for a in [m(1, 0, 4, 1), m(5, 2, 7, 3), m(-1, 0, 0, -1), m(-3, 7, 5, -12), m(0, 1, -1, 5)] {
            assert_eq!(word_matrix(&decompose_st(&a)), a);
        }
        assert!(!gamma_odd_member(&SL2Z::t(1)));
        assert!(gamma_odd_member(&SL2Z::t(2)));
        assert!(gamma_odd_member(&SL2Z::S));
        for a in [m(1, 0, 2, 1), SL2Z::S, m(3, 4, 2, 3), m(-1, 0, 0, -1), m(0, 1, -1, 6), m(4, 1, -9, -2)] {
            let w = decompose_t2s(&a).unwrap();
            assert_eq!(word_matrix(&w), a);
            assert!(w.iter().all(|t| match t {
                Token::T(k) => k % 2 == 0,
                _ => true,
            }));
        }
        assert!(decompose_t2s(&SL2Z::t(1)).is_err());
    }

    #[test]
    fn lifts() {
        assert_eq!(iota_lift(&SL2Z::t(4), 2).unwrap(), 1);
        assert_eq!(iota_lift(&m(1, 0, 4, 1), 2).unwrap(), 1);
        assert_eq!(iota_lift(&m(2, 1, 5, 3), 3).unwrap(), 1);
        assert!(iota_lift(&SL2Z::S, 2).is_err());
        assert_eq!(i_map(&MpElement::t(1)), (SL2Z::t(1), 1));
        assert_eq!(i_map(&MpElement::s()), (SL2Z::S, 1));
        assert_eq!(i_map(&MpElement::z()), (SL2Z::MINUS_I, -1));
        assert_eq!(gamma4_lift(&SL2Z::IDENTITY).unwrap(), MpElement::identity());
        assert_eq!(gamma4_lift(&m(1, 0, 4, 1)).unwrap().eps, 1);
    }

    #[test]
    fn cgxde_cases() {
        let r = |x| rint(x);
        assert_eq!(
            cgxde_form(&r(3), &r(5), &r(0), &r(7), Place::Prime(3)).unwrap(),
            hil(&r(7), &r(-15), Place::Prime(3))
        );
        assert!(cgxde_form(&r(0), &r(1), &r(1), &r(1), Place::Real).is_err());
    }

    #[test]
    fn branch_matches_real_cocycle() {
        let ms = [SL2Z::S, SL2Z::t(1), SL2Z::MINUS_I, m(2, 1, 5, 3), m(-3, 7, 5, -12), m(1, 0, -4, 1)];
        for a in &ms {
            for b in &ms {
                assert_eq!(branch_sign(a, b), sigma(a, b, Place::Real), "{a} {b}");
            }
        }
    }
}
