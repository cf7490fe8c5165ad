//! Integer lattices given by Gram matrices, and their basic invariants.

mod discform;
mod snf;

pub use discform::{DFElement, DiscriminantForm, PPart, ENUM_CAP};
pub use snf::{smith_normal_form, IntMat, Snf};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::Rational;

/// Nondegenerate symmetric integer matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GramJson", into = "GramJson")]
pub struct GramLattice {
    gram: Vec<Vec<i64>>,
    is_even: bool,
}

#[derive(Serialize, Deserialize)]
struct GramJson {
    gram: Vec<Vec<i64>>,
}

impl TryFrom<GramJson> for GramLattice {
    type Error = Error;
    fn try_from(g: GramJson) -> Result<Self> {
        GramLattice::new(g.gram)
    }
}

impl From<GramLattice> for GramJson {
    fn from(l: GramLattice) -> Self {
        GramJson { gram: l.gram }
    }
}

impl GramLattice {
    pub fn new(gram: Vec<Vec<i64>>) -> Result<Self> {
        let m = gram.len();
        if m == 0 {
            return Err(Error::Validation("empty Gram matrix".into()));
        }
        for (i, row) in gram.iter().enumerate() {
            if row.len() != m {
                return Err(Error::Validation(format!("Gram row {i} has length {}, expected {m}", row.len())));
            }
            for j in 0..m {
                if gram[i][j] != gram[j][i] {
                    return Err(Error::Validation(format!("Gram matrix not symmetric at ({i},{j})")));
                }
            }
        }
        let is_even = (0..m).all(|i| gram[i][i] % 2 == 0);
        let l = GramLattice { gram, is_even };
        if l.det().is_zero() {
            return Err(Error::Validation("Gram matrix is singular".into()));
        }
        Ok(l)
    }

    /// Diagonal lattice.
    pub fn diagonal(entries: &[i64]) -> Result<Self> {
        let m = entries.len();
        let mut g = vec![vec![0; m]; m];
        for (i, &e) in entries.iter().enumerate() {
            g[i][i] = e;
        }
        Self::new(g)
    }

    pub fn gram(&self) -> &[Vec<i64>] {
        &self.gram
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn is_even(&self) -> bool {
        self.is_even
    }

    pub fn gram_big(&self) -> IntMat {
        self.gram.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    pub fn gram_rat(&self) -> Vec<Vec<Rational>> {
        self.gram.iter().map(|r| r.iter().map(|&x| Rational::from_integer(BigInt::from(x))).collect()).collect()
    }

    /// Determinant by fraction-free elimination.
    pub fn det(&self) -> BigInt {
        snf::bareiss_det(&self.gram_big())
    }

    /// `Δ_M = |det|`.
    pub fn delta(&self) -> u64 {
        self.det().abs().to_u64().expect("discriminant does not fit in u64")
    }

    /// Inverse Gram matrix over ℚ.
    pub fn gram_inverse(&self) -> Vec<Vec<Rational>> {
        invert(&self.gram_rat()).expect("Gram matrix is nonsingular")
    }

    /// `p − q` for the inertia `(p, q)` of the form over ℝ.
    pub fn signature(&self) -> i64 {
        let mut a = self.gram_rat();
        let mut n = a.len();
        let mut sig = 0i64;
        while n > 0 {
            // move a nonzero diagonal entry to position 0
            if let Some(i) = (0..n).find(|&i| !a[i][i].is_zero()) {
                swap_sym(&mut a, 0, i);
                let piv = a[0][0].clone();
                sig += if piv.is_positive() { 1 } else { -1 };
                let rest = schur(&a, 1, |i, j, a| &a[i][j] - &a[i][0] * &a[0][j] / &piv);
                a = rest;
                n -= 1;
                continue;
            }
            // zero diagonal: a nonzero off-diagonal entry spans a hyperbolic plane
            let (i, j) = match (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).find(|&(i, j)| !a[i][j].is_zero()) {
                Some(x) => x,
                None => break,
            };
            swap_sym(&mut a, 0, i);
            let j = if j == 0 { i } else { j };
            swap_sym(&mut a, 1, j);
            // block [[0,b],[b,0]] contributes (+1,-1); eliminate it
            let b = a[0][1].clone();
            let rest = schur(&a, 2, |i, j, a| {
                // subtract [a_i0 a_i1] B^{-1} [a_0j a_1j]^T with B^{-1} = [[0,1/b],[1/b,0]]
                &a[i][j] - (&a[i][0] * &a[1][j] + &a[i][1] * &a[0][j]) / &b
            });
            a = rest;
            n -= 2;
        }
        sig
    }

    /// Smallest `N` with `N·γ²/2 ∈ ℤ` for all `γ ∈ M*`.
    pub fn level(&self) -> u64 {
        let inv = self.gram_inverse();
        let m = inv.len();
        let mut n = BigInt::one();
        let two = BigInt::from(2);
        for i in 0..m {
            for j in 0..m {
                let v = if i == j { &inv[i][j] / &two } else { inv[i][j].clone() };
                n = n.lcm(v.denom());
            }
        }
        n.to_u64().expect("level does not fit in u64")
    }

    /// Primes dividing `Δ_M`.
    pub fn interesting_primes(&self) -> Vec<u64> {
        crate::numth::prime_divisors(self.delta())
    }

    /// Orthogonal direct sum.
    pub fn direct_sum(&self, other: &GramLattice) -> GramLattice {
        let (m, n) = (self.rank(), other.rank());
        let mut g = vec![vec![0; m + n]; m + n];
        for i in 0..m {
            for j in 0..m {
                g[i][j] = self.gram[i][j];
            }
        }
        for i in 0..n {
            for j in 0..n {
                g[m + i][m + j] = other.gram[i][j];
            }
        }
        GramLattice::new(g).expect("direct sum of nondegenerate lattices")
    }

    /// Lattice with Gram matrix scaled by `k`.
    pub fn scaled(&self, k: i64) -> Result<GramLattice> {
        GramLattice::new(self.gram.iter().map(|r| r.iter().map(|&x| x * k).collect()).collect())
    }

    /// Gram matrix `Bᵀ G B` in a new basis.
    pub fn change_basis(&self, b: &[Vec<i64>]) -> Result<GramLattice> {
        let m = self.rank();
        let mut out = vec![vec![0i64; m]; m];
        for i in 0..m {
            for j in 0..m {
                let mut s = 0i64;
                for k in 0..m {
                    for l in 0..m {
                        s += b[k][i] * self.gram[k][l] * b[l][j];
                    }
                }
                out[i][j] = s;
            }
        }
        GramLattice::new(out)
    }

    pub fn discriminant_form(&self) -> Result<DiscriminantForm> {
        DiscriminantForm::new(self)
    }
}

fn swap_sym(a: &mut [Vec<Rational>], i: usize, j: usize) {
    if i == j {
        return;
    }
    a.swap(i, j);
    for row in a.iter_mut() {
        row.swap(i, j);
    }
}

fn schur<F>(a: &[Vec<Rational>], k: usize, f: F) -> Vec<Vec<Rational>>
where
    F: Fn(usize, usize, &[Vec<Rational>]) -> Rational,
{
    let n = a.len();
    (k..n).map(|i| (k..n).map(|j| f(i, j, a)).collect()).collect()
}

/// Gauss–Jordan inverse over ℚ.
pub fn invert(a: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let n = a.len();
    let mut m: Vec<Vec<Rational>> = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            row
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, piv);
        let inv = m[col][col].recip();
        for x in m[col].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                let pivot_row = m[col].clone();
                for (x, y) in m[r].iter_mut().zip(pivot_row.iter()) {
                    *x = &*x - &f * y;
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lat(g: &[&[i64]]) -> GramLattice {
        GramLattice::new(g.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn validation() {
        assert!(GramLattice::new(vec![vec![1, 2], vec![3, 4]]).is_err());
        assert!(GramLattice::new(vec![vec![1, 1], vec![1, 1]]).is_err());
        assert!(GramLattice::new(vec![]).is_err());
        assert!(lat(&[&[2]]).is_even());
        assert!(!lat(&[&[1]]).is_even());
        assert!(!lat(&[&[0, 1], &[1, 1]]).is_even());
    }

    #[test]
    fn signatures() {
        assert_eq!(lat(&[&[2]]).signature(), 1);
        assert_eq!(lat(&[&[0, 1], &[1, 0]]).signature(), 0);
        assert_eq!(lat(&[&[-2]]).signature(), -1);
        assert_eq!(lat(&[&[2, 1], &[1, 2]]).signature(), 2);
        assert_eq!(lat(&[&[0, 2, 0], &[2, 0, 0], &[0, 0, -4]]).signature(), -1);
        assert_eq!(lat(&[&[0, 1, 1], &[1, 0, 1], &[1, 1, 0]]).signature(), -1);
    }

    #[test]
    fn levels() {
        assert_eq!(lat(&[&[2]]).level(), 4);
        assert_eq!(lat(&[&[0, 1], &[1, 0]]).level(), 1);
        assert_eq!(lat(&[&[2, 1], &[1, 2]]).level(), 3);
        assert_eq!(lat(&[&[6]]).level(), 12);
        assert_eq!(lat(&[&[1]]).level(), 2);
    }

    #[test]
    fn primes() {
        assert_eq!(lat(&[&[2]]).interesting_primes(), vec![2]);
        assert!(lat(&[&[0, 1], &[1, 0]]).interesting_primes().is_empty());
        assert_eq!(lat(&[&[2, 1], &[1, 2]]).interesting_primes(), vec![3]);
    }
}
