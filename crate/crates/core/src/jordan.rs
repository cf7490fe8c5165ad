//! p-adic Jordan decompositions, their symbols and Weil indices, and the
//! generalised quadratic Gauss sums `Σ_{η∈M/cM} χ_p(a/c·η²/2 + a(x_c,η)/c)`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{ExactScalar, Rational};
use crate::lattice::{DFElement, DiscriminantForm, GramLattice};
use crate::numth::{chi_p, is_prime, legendre, residue_mod, two_over, valuation_split, vp};

/// Largest number of terms a brute-force Gauss sum may have.
pub const GAUSS_CAP: u64 = 1_000_000;

/// Type of a 2-adic component: odd with trace index `t mod 8`, or even (`II`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Parity {
    Odd(u8),
    Even,
}

impl Parity {
    /// `t`, with `0` for `II`.
    pub fn t(&self) -> u8 {
        match self {
            Parity::Odd(t) => *t,
            Parity::Even => 0,
        }
    }
}

/// One constituent `q^{εn}` (odd `p`) or `q^{εn}_{t/II}` (`p = 2`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JordanComponent {
    pub p: u64,
    pub e: u32,
    pub n: usize,
    pub eps: i8,
    /// `None` for odd `p`.
    pub parity: Option<Parity>,
}

impl JordanComponent {
    pub fn q(&self) -> u64 {
        self.p.pow(self.e)
    }

    /// Cardinality `q^n` of the component's discriminant group.
    pub fn delta(&self) -> BigInt {
        num_traits::pow(BigInt::from(self.p), self.e as usize * self.n)
    }

    pub fn t(&self) -> u8 {
        self.parity.map_or(0, |p| p.t())
    }

    pub fn is_odd_type(&self) -> bool {
        matches!(self.parity, Some(Parity::Odd(_)))
    }

    /// Check the symbol rules for 2-adic components.
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || !(self.eps == 1 || self.eps == -1) {
            return Err(Error::Invariant(format!("malformed component {self}")));
        }
        match (self.p, self.parity) {
            (2, Some(Parity::Odd(t))) => {
                let t = t as usize;
                let bad = t % 2 != self.n % 2
                    || (self.n == 1 && !matches!((t, self.eps), (1 | 7, 1) | (3 | 5, -1)))
                    || (self.n == 2 && ((t == 0 && self.eps != 1) || (t == 4 && self.eps != -1)));
                if bad {
                    return Err(Error::Invariant(format!("inconsistent 2-adic symbol {self}")));
                }
            }
            (2, Some(Parity::Even)) if self.n % 2 == 1 => {
                return Err(Error::Invariant(format!("even component of odd rank {self}")));
            }
            (2, None) => return Err(Error::Invariant("2-adic component without parity".into())),
            _ => {}
        }
        Ok(())
    }

    /// The component of `M(k)` for a nonzero `k` with nonnegative `p`-adic valuation shift.
    pub fn scaled(&self, k: &Rational) -> Result<JordanComponent> {
        let vu = valuation_split(k, self.p)?;
        let e = self.e as i64 + vu.valuation;
        if e < 0 {
            return Err(Error::Validation(format!("scaling {self} by {k} leaves ℤ_p")));
        }
        let u = &vu.unit_part;
        let (s, parity) = if self.p == 2 {
            let r = residue_mod(u, 8).expect("2-adic unit") as u64;
            let parity = self.parity.map(|par| match par {
                Parity::Odd(t) => Parity::Odd(((t as u64 * r) % 8) as u8),
                Parity::Even => Parity::Even,
            });
            (two_over(u)?, parity)
        } else {
            (legendre(u, self.p as i64)?, None)
        };
        let eps = if self.n % 2 == 1 { self.eps * s } else { self.eps };
        Ok(JordanComponent { p: self.p, e: e as u32, n: self.n, eps, parity })
    }
}

impl fmt::Display for JordanComponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.eps > 0 { '+' } else { '-' };
        write!(f, "{}^{}{}", self.q(), sign, self.n)?;
        match self.parity {
            Some(Parity::Odd(t)) => write!(f, "_{t}"),
            Some(Parity::Even) => write!(f, "_II"),
            None => Ok(()),
        }
    }
}

/// Jordan decomposition of `M ⊗ ℤ_p` with an explicit splitting basis.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JordanDecomposition {
    pub p: u64,
    pub components: Vec<JordanComponent>,
    /// Columns are the new basis vectors written in the basis of `M`; the
    /// columns of each component are contiguous and in component order.
    pub basis: Vec<Vec<Rational>>,
    /// Column range of each component.
    pub ranges: Vec<(usize, usize)>,
}

fn dot(g: &[Vec<Rational>], u: &[Rational], v: &[Rational]) -> Rational {
    let mut s = Rational::zero();
    for (i, ui) in u.iter().enumerate() {
        if ui.is_zero() {
            continue;
        }
        for (j, vj) in v.iter().enumerate() {
            if !vj.is_zero() && !g[i][j].is_zero() {
                s += ui * &g[i][j] * vj;
            }
        }
    }
    s
}

fn axpy(y: &mut [Rational], a: &Rational, x: &[Rational]) {
    if a.is_zero() {
        return;
    }
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi -= a * xi;
    }
}

fn val(x: &Rational, p: u64) -> Option<i64> {
    valuation_split(x, p).ok().map(|v| v.valuation)
}

fn add_vec(u: &[Rational], v: &[Rational]) -> Vec<Rational> {
    u.iter().zip(v).map(|(a, b)| a + b).collect()
}

/// One split-off piece: scale exponent and one or two vectors.
struct Piece {
    e: i64,
    vecs: Vec<Vec<Rational>>,
}

fn greedy_split(g: &[Vec<Rational>], p: u64) -> Vec<Piece> {
    let m = g.len();
    let mut rest: Vec<Vec<Rational>> = (0..m)
        .map(|i| (0..m).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect())
        .collect();
    let mut pieces = Vec::new();
    while !rest.is_empty() {
        let k = rest.len();
        let a: Vec<Vec<Rational>> = (0..k).map(|i| (0..k).map(|j| dot(g, &rest[i], &rest[j])).collect()).collect();
        let minv = (0..k)
            .flat_map(|i| (0..k).map(move |j| (i, j)))
            .filter_map(|(i, j)| val(&a[i][j], p))
            .min()
            .expect("nondegenerate form has a nonzero entry");
        let diag = (0..k).find(|&i| val(&a[i][i], p) == Some(minv));
        let (i, j) = (0..k)
            .flat_map(|i| (0..k).map(move |j| (i, j)))
            .find(|&(i, j)| i != j && val(&a[i][j], p) == Some(minv))
            .unwrap_or((usize::MAX, usize::MAX));
        if let Some(i) = diag {
            pieces.push(pivot_one(g, &mut rest, i, minv));
        } else if p != 2 {
            // 2(u,v) dominates: u + v has minimal valuation
            let s = add_vec(&rest[i], &rest[j]);
            rest[i] = s;
            pieces.push(pivot_one(g, &mut rest, i, minv));
        } else {
            pieces.push(pivot_two(g, &mut rest, i, j, minv));
        }
    }
    pieces
}

fn pivot_one(g: &[Vec<Rational>], rest: &mut Vec<Vec<Rational>>, i: usize, e: i64) -> Piece {
    let v = rest.remove(i);
    let n = dot(g, &v, &v);
    for w in rest.iter_mut() {
        let c = dot(g, w, &v) / &n;
        axpy(w, &c, &v);
    }
    Piece { e, vecs: vec![v] }
}

fn pivot_two(g: &[Vec<Rational>], rest: &mut Vec<Vec<Rational>>, i: usize, j: usize, e: i64) -> Piece {
    let (hi, lo) = if i > j { (i, j) } else { (j, i) };
    let v2 = rest.remove(hi);
    let v1 = rest.remove(lo);
    let (a, b, d) = (dot(g, &v1, &v1), dot(g, &v1, &v2), dot(g, &v2, &v2));
    let det = &a * &d - &b * &b;
    for w in rest.iter_mut() {
        let (x1, x2) = (dot(g, w, &v1), dot(g, w, &v2));
        let c1 = (&d * &x1 - &b * &x2) / &det;
        let c2 = (&a * &x2 - &b * &x1) / &det;
        axpy(w, &c1, &v1);
        axpy(w, &c2, &v2);
    }
    Piece { e, vecs: vec![v1, v2] }
}

/// Orthogonal basis of an odd 2-adic unimodular block (scaled by `q`).
///
/// Odd diagonal entries are pivoted directly; when only an even pair is
/// left, an already pivoted odd vector `f` is replaced by `f + r₁`, after
/// which the projection of `r₂` has odd norm.
fn diagonalize_odd(g: &[Vec<Rational>], vecs: Vec<Vec<Rational>>) -> Vec<Vec<Rational>> {
    let mut rest = vecs;
    let mut done: Vec<Vec<Rational>> = Vec::new();
    while !rest.is_empty() {
        let q_val = rest
            .iter()
            .flat_map(|u| rest.iter().map(move |v| (u, v)))
            .filter_map(|(u, v)| val(&dot(g, u, v), 2))
            .min()
            .expect("unimodular block");
        if let Some(i) = (0..rest.len()).find(|&i| val(&dot(g, &rest[i], &rest[i]), 2) == Some(q_val)) {
            done.push(pivot_one(g, &mut rest, i, 0).vecs.remove(0));
            continue;
        }
        let f = done.pop().expect("odd block starts with an odd vector");
        let i = (0..rest.len())
            .find(|&i| (0..rest.len()).any(|j| j != i && val(&dot(g, &rest[i], &rest[j]), 2) == Some(q_val)))
            .expect("unimodular block has an odd pairing");
        let f2 = add_vec(&f, &rest[i]);
        rest.insert(0, f2);
        done.push(pivot_one(g, &mut rest, 0, 0).vecs.remove(0));
    }
    done
}

fn det_rat(a: &[Vec<Rational>]) -> Rational {
    let n = a.len();
    let mut m = a.to_vec();
    let mut det = Rational::one();
    for c in 0..n {
        let Some(r) = (c..n).find(|&r| !m[r][c].is_zero()) else {
            return Rational::zero();
        };
        if r != c {
            m.swap(r, c);
            det = -det;
        }
        det *= &m[c][c];
        for r in c + 1..n {
            let f = &m[r][c] / &m[c][c];
            for k in c..n {
                let t = &f * &m[c][k];
                m[r][k] -= t;
            }
        }
    }
    det
}

/// Jordan decomposition of `L ⊗ ℤ_p`.
pub fn jordan_decompose(lat: &GramLattice, p: u64) -> Result<JordanDecomposition> {
    if !is_prime(p) {
        return Err(Error::Validation(format!("{p} is not prime")));
    }
    let g = lat.gram_rat();
    let pieces = greedy_split(&g, p);
    let mut exps: Vec<i64> = pieces.iter().map(|pc| pc.e).collect();
    exps.sort_unstable();
    exps.dedup();
    let mut components = Vec::new();
    let mut columns: Vec<Vec<Rational>> = Vec::new();
    let mut ranges = Vec::new();
    for &e in &exps {
        let group: Vec<&Piece> = pieces.iter().filter(|pc| pc.e == e).collect();
        let has_odd = group.iter().any(|pc| pc.vecs.len() == 1);
        let mut vecs: Vec<Vec<Rational>> = group.iter().flat_map(|pc| pc.vecs.iter().cloned()).collect();
        let q = Rational::from_integer(num_traits::pow(BigInt::from(p), e as usize));
        let parity = if p == 2 {
            if has_odd {
                vecs = diagonalize_odd(&g, vecs);
                let tr = vecs.iter().fold(Rational::zero(), |s, v| s + dot(&g, v, v) / &q);
                Some(Parity::Odd(residue_mod(&tr, 8).expect("2-adic unit trace") as u8))
            } else {
                Some(Parity::Even)
            }
        } else {
            None
        };
        let unit: Vec<Vec<Rational>> =
            vecs.iter().map(|u| vecs.iter().map(|v| dot(&g, u, v) / &q).collect()).collect();
        let disc = det_rat(&unit);
        let eps = if p == 2 { two_over(&disc)? } else { legendre(&disc, p as i64)? };
        let comp = JordanComponent { p, e: e as u32, n: vecs.len(), eps, parity };
        comp.validate()?;
        ranges.push((columns.len(), columns.len() + vecs.len()));
        columns.extend(vecs);
        components.push(comp);
    }
    let m = g.len();
    let basis = (0..m).map(|r| (0..m).map(|c| columns[c][r].clone()).collect()).collect();
    Ok(JordanDecomposition { p, components, basis, ranges })
}

impl JordanDecomposition {
    /// Basis vectors of component `k` as vectors in the basis of `M`.
    pub fn component_vectors(&self, k: usize) -> Vec<Vec<Rational>> {
        let (lo, hi) = self.ranges[k];
        (lo..hi).map(|c| self.basis.iter().map(|row| row[c].clone()).collect()).collect()
    }

    pub fn component_at(&self, e: u32) -> Option<(usize, &JordanComponent)> {
        self.components.iter().enumerate().find(|(_, c)| c.e == e)
    }

    pub fn rank(&self) -> usize {
        self.components.iter().map(|c| c.n).sum()
    }

    /// `p^{v_p(Δ)}`.
    pub fn delta_p(&self) -> BigInt {
        self.components.iter().map(|c| c.delta()).product()
    }

    /// Product of all component signs.
    pub fn total_sign(&self) -> i8 {
        self.components.iter().map(|c| c.eps).product()
    }

    /// `t` of the unimodular component at `p = 2`, `0` if it is even or absent.
    pub fn t1(&self) -> u8 {
        self.component_at(0).map_or(0, |(_, c)| c.t())
    }

    /// Weil index of `M ⊗ ℤ_p`.
    pub fn weil_index(&self) -> ExactScalar {
        self.components.iter().fold(ExactScalar::one(), |acc, c| &acc * &weil_index_component(c))
    }

    /// Weil index of `M(k) ⊗ ℤ_p`, component by component.
    pub fn weil_index_scaled_by(&self, k: &Rational) -> Result<ExactScalar> {
        let mut acc = ExactScalar::one();
        for c in &self.components {
            acc = &acc * &weil_index_component(&c.scaled(k)?);
        }
        Ok(acc)
    }

    /// `|D_{M_p,c}|`.
    pub fn delta_c(&self, c: i64) -> BigInt {
        let v = if c == 0 { u32::MAX } else { vp(c, self.p) as u32 };
        self.components
            .iter()
            .map(|comp| num_traits::pow(BigInt::from(self.p), comp.e.min(v) as usize * comp.n))
            .product()
    }

    /// Gram matrix of the splitting basis, `Bᵀ G B`.
    pub fn block_gram(&self, lat: &GramLattice) -> Vec<Vec<Rational>> {
        let g = lat.gram_rat();
        let m = g.len();
        let cols: Vec<Vec<Rational>> =
            (0..m).map(|c| self.basis.iter().map(|row| row[c].clone()).collect()).collect();
        (0..m).map(|i| (0..m).map(|j| dot(&g, &cols[i], &cols[j])).collect()).collect()
    }
}

/// `ε^e ζ₈^{n(1−q)}` for odd `p`, `ε^e ζ₈^t` for `p = 2`.
pub fn weil_index_component(comp: &JordanComponent) -> ExactScalar {
    let sign = if comp.eps < 0 && comp.e % 2 == 1 { 4 } else { 0 };
    let k = if comp.p == 2 {
        comp.t() as i64
    } else {
        let q8 = (comp.p % 8).pow(comp.e % 2) as i64;
        comp.n as i64 * (1 - q8)
    };
    ExactScalar::zeta8(k + sign)
}

/// `γ(comp(a))`: `(a/Δ)γ` for odd `p`, `(Δ/a)γ^a` for `p = 2`.
pub fn weil_index_scaled(comp: &JordanComponent, a: i64) -> Result<ExactScalar> {
    if a == 0 || a % comp.p as i64 == 0 {
        return Err(Error::Validation(format!("scaling factor {a} is not a {}-adic unit", comp.p)));
    }
    let gamma = weil_index_component(comp);
    let ar = Rational::from_integer(BigInt::from(a));
    if comp.p == 2 {
        // (2^{en}/a)
        let s = crate::numth::two_power_over((comp.e as usize * comp.n) as i64, &ar)?;
        let pw = gamma.pow(a)?;
        Ok(pw.scale(&Rational::from_integer(BigInt::from(s))))
    } else {
        let s = if (comp.e as usize * comp.n) % 2 == 1 { legendre(&ar, comp.p as i64)? } else { 1 };
        Ok(gamma.scale(&Rational::from_integer(BigInt::from(s))))
    }
}

/// Weil index `γ(M ⊗ ℤ_p)`.
pub fn weil_index_lattice(lat: &GramLattice, p: u64) -> Result<ExactScalar> {
    Ok(jordan_decompose(lat, p)?.weil_index())
}

/// `x_c` with its lift, and the index `t_c` of the component at `2^{v₂(c)}`.
#[derive(Clone, Debug)]
pub struct XcChoice {
    /// Class in `D_M`; zero when the lift is not in `M*` (odd `c`, odd lattice).
    pub element: DFElement,
    /// Half the sum of the component's orthogonal basis, in the basis of `M`.
    pub lift: Vec<Rational>,
    pub t: Option<u8>,
    pub in_dual: bool,
}

/// `x_c` for a 2-adic decomposition.
pub fn choose_xc(lat: &GramLattice, jd: &JordanDecomposition, form: &DiscriminantForm, c: i64) -> Result<XcChoice> {
    if jd.p != 2 {
        return Err(Error::Validation("x_c needs the 2-adic decomposition".into()));
    }
    if c == 0 {
        return Err(Error::Validation("x_c is defined for nonzero c".into()));
    }
    let m = lat.rank();
    let zero = XcChoice { element: form.zero(), lift: vec![Rational::zero(); m], t: None, in_dual: true };
    let e = vp(c, 2) as u32;
    let Some((k, comp)) = jd.component_at(e) else {
        return Ok(zero);
    };
    let Some(Parity::Odd(t)) = comp.parity else {
        return Ok(zero);
    };
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let mut lift = vec![Rational::zero(); m];
    for v in jd.component_vectors(k) {
        for (l, x) in lift.iter_mut().zip(&v) {
            *l += x * &half;
        }
    }
    if e == 0 {
        return Ok(XcChoice { element: form.zero(), lift, t: Some(t), in_dual: false });
    }
    let g = lat.gram_rat();
    let y: Vec<Rational> = (0..m).map(|i| lift.iter().enumerate().fold(Rational::zero(), |s, (j, x)| s + &g[i][j] * x)).collect();
    let element = form.class_of_dual_coords(&y, Some(2))?;
    if !form.in_dcstar(c, &element) {
        return Err(Error::Invariant(format!("x_c for c = {c} is not in D_M^{{c*}}")));
    }
    Ok(XcChoice { element, lift, t: Some(t), in_dual: true })
}

/// `χ₂(a/c · x_c²/2) = ζ₈^{a·c₂·t_c}`.
pub fn xc_phase(jd: &JordanDecomposition, a: i64, c: i64) -> Result<ExactScalar> {
    if c == 0 {
        return Err(Error::Validation("x_c is defined for nonzero c".into()));
    }
    if a % 2 == 0 && c % 2 == 0 {
        return Err(Error::Validation(format!("a = {a} and c = {c} are both even")));
    }
    let e = vp(c, 2) as u32;
    let t = jd.component_at(e).map_or(0, |(_, comp)| comp.t()) as i64;
    let c2 = c >> e;
    Ok(ExactScalar::zeta8(a * c2 * t))
}

/// `χ₂(a/c · x_c²/2)` from the lift of `x_c`.
pub fn xc_phase_direct(lat: &GramLattice, xc: &XcChoice, a: i64, c: i64) -> ExactScalar {
    let g = lat.gram_rat();
    let v = dot(&g, &xc.lift, &xc.lift) * Rational::new(BigInt::from(a), BigInt::from(2 * c));
    chi_p(&v, 2)
}

fn check_coprime(p: u64, a: i64, c: i64) -> Result<()> {
    if c == 0 {
        return Err(Error::Validation("Gauss sum needs nonzero c".into()));
    }
    if a % p as i64 == 0 && c % p as i64 == 0 {
        return Err(Error::Validation(format!("a = {a} and c = {c} are both divisible by {p}")));
    }
    Ok(())
}

/// `p^{m·v_p(c)/2} √Δ_{M_p,c} Π_{pq|c} γ(q^{εn}(a_p c))`.
pub fn gauss_sum_closed(lat: &GramLattice, p: u64, a: i64, c: i64) -> Result<ExactScalar> {
    check_coprime(p, a, c)?;
    let jd = jordan_decompose(lat, p)?;
    let v = vp(c, p) as u32;
    let m = lat.rank();
    let ap = if a == 0 { 1 } else { crate::numth::unit_part(a, p) };
    let size = num_traits::pow(BigInt::from(p), m * v as usize) * jd.delta_c(c);
    let mut acc = ExactScalar::sqrt_rat(&Rational::from_integer(size))?;
    let k = Rational::from_integer(BigInt::from(ap) * BigInt::from(c));
    for comp in jd.components.iter().filter(|comp| comp.e < v) {
        acc = &acc * &weil_index_component(&comp.scaled(&k)?);
    }
    Ok(acc)
}

/// Direct summation over `(ℤ/p^{v_p(c)})^m`.
pub fn gauss_sum_brute(lat: &GramLattice, p: u64, a: i64, c: i64) -> Result<ExactScalar> {
    check_coprime(p, a, c)?;
    let v = vp(c, p) as u32;
    let m = lat.rank();
    let k = p.pow(v);
    let terms = (k as u128).pow(m as u32);
    if terms > GAUSS_CAP as u128 {
        return Err(Error::EnumerationCap { what: "Gauss sum".into(), size: terms, cap: GAUSS_CAP as u128 });
    }
    let g = lat.gram_rat();
    let xc = if p == 2 {
        let jd = jordan_decompose(lat, 2)?;
        let form = lat.discriminant_form()?;
        choose_xc(lat, &jd, &form, c)?.lift
    } else {
        vec![Rational::zero(); m]
    };
    let ac2 = Rational::new(BigInt::from(a), BigInt::from(2 * c));
    let ac = Rational::new(BigInt::from(a), BigInt::from(c));
    // collect exponents of e(·) with a common denominator, then sum once
    let mut counts: std::collections::HashMap<Rational, u64> = std::collections::HashMap::new();
    let mut eta = vec![0u64; m];
    for _ in 0..terms {
        let er: Vec<Rational> = eta.iter().map(|&x| Rational::from_integer(BigInt::from(x))).collect();
        let arg = dot(&g, &er, &er) * &ac2 + dot(&g, &xc, &er) * &ac;
        *counts.entry(crate::numth::primary_part(&arg, p)).or_default() += 1;
        for x in eta.iter_mut() {
            *x += 1;
            if *x < k {
                break;
            }
            *x = 0;
        }
    }
    let mut keys: Vec<_> = counts.into_iter().collect();
    keys.sort();
    let mut acc = ExactScalar::zero();
    for (r, n) in keys {
        acc = &acc + &ExactScalar::e(&r).scale(&Rational::from_integer(BigInt::from(n)));
    }
    Ok(acc)
}

/// Signed `c₂ = c / 2^{v₂(c)}`, with `c₂ = 1` for `c = 0`.
pub fn odd_part(c: i64) -> i64 {
    if c == 0 {
        1
    } else {
        c >> c.trailing_zeros()
    }
}

/// `true` if `x` is a `p`-adic unit integer.
pub fn is_unit_at(x: i64, p: u64) -> bool {
    x != 0 && !x.unsigned_abs().is_multiple_of(p)
}
