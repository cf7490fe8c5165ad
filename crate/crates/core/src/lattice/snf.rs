//! Smith normal form over ℤ with unimodular transforms.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type IntMat = Vec<Vec<BigInt>>;

/// `U·A·V = D` with `D` diagonal, `d_i | d_{i+1}`, `U` and `V` unimodular.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Snf {
    pub u: IntMat,
    pub d: IntMat,
    pub v: IntMat,
}

impl Snf {
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.len()).map(|i| self.d[i][i].clone()).collect()
    }
}

pub fn identity(n: usize) -> IntMat {
    (0..n).map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect()
}

#[cfg(test)]
pub fn mat_mul(a: &IntMat, b: &IntMat) -> IntMat {
    let n = a.len();
    let m = b[0].len();
    let k = b.len();
    (0..n)
        .map(|i| (0..m).map(|j| (0..k).fold(BigInt::zero(), |s, l| s + &a[i][l] * &b[l][j])).collect())
        .collect()
}

/// Determinant by Bareiss elimination.
pub fn bareiss_det(a: &IntMat) -> BigInt {
    let n = a.len();
    let mut m = a.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    if n == 0 {
        return BigInt::one();
    }
    sign * &m[n - 1][n - 1]
}

fn row_op(m: &mut IntMat, dst: usize, src: usize, f: &BigInt) {
    // row dst -= f * row src
    let src_row = m[src].clone();
    for (x, y) in m[dst].iter_mut().zip(src_row.iter()) {
        *x -= f * y;
    }
}

fn col_op(m: &mut IntMat, dst: usize, src: usize, f: &BigInt) {
    for row in m.iter_mut() {
        let y = row[src].clone();
        row[dst] -= f * y;
    }
}

fn swap_cols(m: &mut IntMat, i: usize, j: usize) {
    for row in m.iter_mut() {
        row.swap(i, j);
    }
}

/// Smith normal form of a nonsingular square integer matrix.
pub fn smith_normal_form(a: &IntMat) -> Result<Snf> {
    let n = a.len();
    if a.iter().any(|r| r.len() != n) {
        return Err(Error::Validation("smith_normal_form needs a square matrix".into()));
    }
    if bareiss_det(a).is_zero() {
        return Err(Error::Validation("smith_normal_form needs a nonsingular matrix".into()));
    }
    let mut d = a.clone();
    let mut u = identity(n);
    let mut v = identity(n);
    for t in 0..n {
        loop {
            // pivot: smallest nonzero |entry| in the trailing block
            let (pi, pj) = (t..n)
                .flat_map(|i| (t..n).map(move |j| (i, j)))
                .filter(|&(i, j)| !d[i][j].is_zero())
                .min_by_key(|&(i, j)| d[i][j].abs())
                .expect("nonsingular matrix has a nonzero entry");
            d.swap(t, pi);
            u.swap(t, pi);
            swap_cols(&mut d, t, pj);
            swap_cols(&mut v, t, pj);
            let mut clean = true;
            for i in t + 1..n {
                if !d[i][t].is_zero() {
                    let q = d[i][t].div_floor(&d[t][t]);
                    row_op(&mut d, i, t, &q);
                    row_op(&mut u, i, t, &q);
                    if !d[i][t].is_zero() {
                        clean = false;
                    }
                }
            }
            for j in t + 1..n {
                if !d[t][j].is_zero() {
                    let q = d[t][j].div_floor(&d[t][t]);
                    col_op(&mut d, j, t, &q);
                    col_op(&mut v, j, t, &q);
                    if !d[t][j].is_zero() {
                        clean = false;
                    }
                }
            }
            if !clean {
                continue;
            }
            // divisibility: fold an offending row into row t and retry
            let bad = (t + 1..n)
                .flat_map(|i| (t + 1..n).map(move |j| (i, j)))
                .find(|&(i, j)| !d[i][j].is_multiple_of(&d[t][t]));
            match bad {
                Some((i, _)) => {
                    let m1 = -BigInt::one();
                    row_op(&mut d, t, i, &m1);
                    row_op(&mut u, t, i, &m1);
                }
                None => break,
            }
        }
        if d[t][t].is_negative() {
            for x in d[t].iter_mut() {
                *x = -&*x;
            }
            for x in u[t].iter_mut() {
                *x = -&*x;
            }
        }
    }
    Ok(Snf { u, d, v })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(m: &[&[i64]]) -> IntMat {
        m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    fn check(a: &IntMat) -> Snf {
        let s = smith_normal_form(a).unwrap();
        assert_eq!(mat_mul(&mat_mul(&s.u, a), &s.v), s.d);
        assert_eq!(bareiss_det(&s.u).abs(), BigInt::one());
        assert_eq!(bareiss_det(&s.v).abs(), BigInt::one());
        let diag = s.diagonal();
        for i in 0..diag.len() {
            for j in 0..diag.len() {
                if i != j {
                    assert!(s.d[i][j].is_zero());
                }
            }
            assert!(diag[i].is_positive());
            if i + 1 < diag.len() {
                assert!(diag[i + 1].is_multiple_of(&diag[i]));
            }
        }
        s
    }

    #[test]
    fn examples() {
        let s = check(&big(&[&[1, 0], &[0, 1]]));
        assert_eq!(s.u, identity(2));
        assert_eq!(s.v, identity(2));
        assert_eq!(check(&big(&[&[2, 0], &[0, 4]])).diagonal(), vec![BigInt::from(2), BigInt::from(4)]);
        assert_eq!(check(&big(&[&[2, 1], &[1, 2]])).diagonal(), vec![BigInt::from(1), BigInt::from(3)]);
        assert_eq!(check(&big(&[&[4, 0], &[0, 6]])).diagonal(), vec![BigInt::from(2), BigInt::from(12)]);
        check(&big(&[&[2, -1, 0], &[-1, 2, -1], &[0, -1, 2]]));
        check(&big(&[&[0, 2], &[2, 0]]));
        assert!(smith_normal_form(&big(&[&[1, 2], &[2, 4]])).is_err());
    }

    #[test]
    fn determinants() {
        assert_eq!(bareiss_det(&big(&[&[2, 1], &[1, 2]])), BigInt::from(3));
        assert_eq!(bareiss_det(&big(&[&[0, 1], &[1, 0]])), BigInt::from(-1));
        assert_eq!(bareiss_det(&big(&[&[2, 1, 0], &[1, 2, 1], &[0, 1, 2]])), BigInt::from(4));
    }
}
