//! Cyclotomic polynomials and per-order reduction tables.
//!
//! For an order `L` the table stores `x^k mod Φ_L` for `0 <= k < L`, so any
//! power of `ζ_L` can be pushed into the power basis by a single lookup.

use std::collections::HashMap;
use std::sync::{Arc, LazyLock, RwLock};

/// Reduction data for `Q(ζ_L)`.
#[derive(Debug)]
pub struct FieldTables {
    pub phi: usize,
    /// `pow[k]` = coefficients of `x^k mod Φ_L`, length `phi`.
    pub pow: Vec<Vec<i64>>,
}

static POLY_CACHE: LazyLock<RwLock<HashMap<u32, Arc<Vec<i64>>>>> =
    LazyLock::new(|| RwLock::new(HashMap::new()));
static TABLE_CACHE: LazyLock<RwLock<HashMap<u32, Arc<FieldTables>>>> =
    LazyLock::new(|| RwLock::new(HashMap::new()));

/// Φ_n with coefficients from low to high degree.
///
/// Obtained by dividing `x^n - 1` by `Φ_d` for every proper divisor `d`.
pub fn cyclotomic_poly(n: u32) -> Arc<Vec<i64>> {
    assert!(n >= 1, "cyclotomic order must be positive");
    if let Some(p) = POLY_CACHE.read().unwrap().get(&n) {
        return p.clone();
    }
    let mut num = vec![0i64; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    for d in 1..n {
        if n.is_multiple_of(d) {
            let div = cyclotomic_poly(d);
            num = exact_div_monic(&num, &div);
        }
    }
    let out = Arc::new(num);
    POLY_CACHE.write().unwrap().insert(n, out.clone());
    out
}

fn exact_div_monic(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dn = den.len() - 1;
    let nn = rem.len() - 1;
    let mut quot = vec![0i64; nn - dn + 1];
    for i in (0..=nn - dn).rev() {
        let c = rem[i + dn];
        quot[i] = c;
        if c != 0 {
            for (j, &dj) in den.iter().enumerate() {
                rem[i + j] = rem[i + j]
                    .checked_sub(c.checked_mul(dj).expect("cyclotomic coefficient overflow"))
                    .expect("cyclotomic coefficient overflow");
            }
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0), "non-exact cyclotomic division");
    quot
}

/// Euler's totient.
pub fn totient(mut n: u32) -> usize {
    let mut result = n as u64;
    let mut p = 2u32;
    while (p as u64) * (p as u64) <= n as u64 {
        if n.is_multiple_of(p) {
            while n.is_multiple_of(p) {
                n /= p;
            }
            result -= result / p as u64;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n as u64;
    }
    result as usize
}

/// Cached reduction tables for order `order`.
pub fn tables(order: u32) -> Arc<FieldTables> {
    if let Some(t) = TABLE_CACHE.read().unwrap().get(&order) {
        return t.clone();
    }
    let poly = cyclotomic_poly(order);
    let phi = poly.len() - 1;
    let mut pow: Vec<Vec<i64>> = Vec::with_capacity(order as usize);
    let mut cur = vec![0i64; phi];
    if phi > 0 {
        cur[0] = 1;
    }
    for _ in 0..order {
        pow.push(cur.clone());
        // multiply by x, folding the overflow through x^phi = -Σ poly_i x^i
        let top = cur[phi - 1];
        let mut next = vec![0i64; phi];
        next[1..phi].copy_from_slice(&cur[..(phi - 1)]);
        if top != 0 {
            for i in 0..phi {
                next[i] -= top * poly[i];
            }
        }
        cur = next;
    }
    let t = Arc::new(FieldTables { phi, pow });
    TABLE_CACHE.write().unwrap().insert(order, t.clone());
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cyclotomics() {
        assert_eq!(*cyclotomic_poly(1), vec![-1, 1]);
        assert_eq!(*cyclotomic_poly(2), vec![1, 1]);
        assert_eq!(*cyclotomic_poly(4), vec![1, 0, 1]);
        assert_eq!(*cyclotomic_poly(8), vec![1, 0, 0, 0, 1]);
        assert_eq!(*cyclotomic_poly(12), vec![1, 0, -1, 0, 1]);
        // Φ_105 is the first with a coefficient outside {-1,0,1}
        assert!(cyclotomic_poly(105).contains(&-2));
    }

    #[test]
    fn degree_is_totient() {
        for n in 1..=120 {
            assert_eq!(cyclotomic_poly(n).len() - 1, totient(n), "n = {n}");
        }
    }

    #[test]
    fn table_wraps_to_one() {
        for n in [1u32, 3, 8, 12, 24, 56] {
            let t = tables(n);
            // x^n = 1: multiplying the last row by x must give the unit vector
            let last = &t.pow[n as usize - 1];
            let poly = cyclotomic_poly(n);
            let phi = t.phi;
            let mut next = vec![0i64; phi];
            next[1..phi].copy_from_slice(&last[..phi - 1]);
            for i in 0..phi {
                next[i] -= last[phi - 1] * poly[i];
            }
            assert_eq!(next, t.pow[0]);
        }
    }
}
