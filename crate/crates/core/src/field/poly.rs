//! Polynomials with coefficients in a finite field, stored as ascending
//! coefficient vectors of packed field elements. These are the raw
//! ingredients of curve equations, so the operations stay deliberately
//! simple and allocation-friendly: degrees never exceed a few dozen.

use super::Gf;

pub fn trim(mut c: Vec<u64>) -> Vec<u64> {
    while matches!(c.last(), Some(0)) {
        c.pop();
    }
    c
}

/// Degree, or `None` for the zero polynomial. Ignores high zero padding.
pub fn degree(c: &[u64]) -> Option<usize> {
    c.iter().rposition(|&x| x != 0)
}

pub fn add(gf: &Gf, a: &[u64], b: &[u64]) -> Vec<u64> {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| {
            gf.add(
                a.get(i).copied().unwrap_or(0),
                b.get(i).copied().unwrap_or(0),
            )
        })
        .collect();
    trim(out)
}

pub fn mul(gf: &Gf, a: &[u64], b: &[u64]) -> Vec<u64> {
    if degree(a).is_none() || degree(b).is_none() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            if y != 0 {
                out[i + j] = gf.add(out[i + j], gf.mul(x, y));
            }
        }
    }
    trim(out)
}

pub fn scale(gf: &Gf, a: &[u64], c: u64) -> Vec<u64> {
    trim(a.iter().map(|&x| gf.mul(x, c)).collect())
}

/// Formal derivative in characteristic `p`.
pub fn derivative(gf: &Gf, a: &[u64]) -> Vec<u64> {
    let out = a
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| gf.mul(gf.scalar(i as i64), c))
        .collect();
    trim(out)
}

/// Remainder of `a` by nonzero `b`.
pub fn rem(gf: &Gf, a: &[u64], b: &[u64]) -> Vec<u64> {
    let db = degree(b).expect("division by zero polynomial");
    let lead_inv = gf.inv(b[db]);
    let mut r = trim(a.to_vec());
    while let Some(dr) = degree(&r) {
        if dr < db {
            break;
        }
        let c = gf.mul(r[dr], lead_inv);
        let shift = dr - db;
        for (j, &m) in b.iter().enumerate().take(db + 1) {
            if m != 0 {
                r[shift + j] = gf.sub(r[shift + j], gf.mul(c, m));
            }
        }
        r = trim(r);
    }
    r
}

/// Monic greatest common divisor; `gcd(f, 0) = monic(f)`.
pub fn gcd(gf: &Gf, a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut x = trim(a.to_vec());
    let mut y = trim(b.to_vec());
    while !y.is_empty() {
        let r = rem(gf, &x, &y);
        x = y;
        y = r;
    }
    match degree(&x) {
        None => x,
        Some(d) => scale(gf, &x, gf.inv(x[d])),
    }
}

pub fn gcd_is_constant(gf: &Gf, a: &[u64], b: &[u64]) -> bool {
    matches!(degree(&gcd(gf, a, b)), Some(0))
}

/// Square-freeness over the algebraic closure: no repeated irreducible
/// factor. Detected by `gcd(f, f')`; a vanishing derivative means `f` is a
/// `p`-th power, which is never square-free for nonconstant `f`.
pub fn is_square_free(gf: &Gf, f: &[u64]) -> bool {
    match degree(f) {
        None | Some(0) => degree(f).is_some(),
        Some(_) => gcd_is_constant(gf, f, &derivative(gf, f)),
    }
}

pub fn eval(gf: &Gf, f: &[u64], x: u64) -> u64 {
    let mut acc = 0u64;
    for &c in f.iter().rev() {
        acc = gf.add(gf.mul(acc, x), c);
    }
    acc
}

/// `t^n * f(1/t)` as an ascending coefficient vector of length `n + 1`;
/// requires `deg f <= n`.
pub fn reverse_into_degree(f: &[u64], n: usize) -> Vec<u64> {
    debug_assert!(degree(f).map_or(true, |d| d <= n));
    let mut out = vec![0u64; n + 1];
    for (i, &c) in f.iter().enumerate().take(n + 1) {
        out[n - i] = c;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Gf, TABLE_CAP};
    use std::sync::Arc;

    fn gf(p: u64, n: u32) -> Arc<Gf> {
        Gf::new(p, n, TABLE_CAP).unwrap()
    }

    /// Independent square-freeness oracle: trial division by every monic
    /// square `g^2` with `2 deg g <= deg f`.
    fn brute_square_free(gf: &Gf, f: &[u64]) -> bool {
        let d = match degree(f) {
            None => return false,
            Some(0) => return true,
            Some(d) => d,
        };
        for dg in 1..=d / 2 {
            let count = gf.size.pow(dg as u32);
            for code in 0..count {
                let mut g = Vec::with_capacity(dg + 1);
                let mut c = code;
                for _ in 0..dg {
                    g.push(c % gf.size);
                    c /= gf.size;
                }
                g.push(1);
                let gg = mul(gf, &g, &g);
                if degree(&rem(gf, f, &gg)).is_none() {
                    return false;
                }
            }
        }
        true
    }

    #[test]
    fn degree_and_trim() {
        assert_eq!(degree(&[0, 0, 0]), None);
        assert_eq!(degree(&[5]), Some(0));
        assert_eq!(degree(&[1, 2, 0, 3, 0]), Some(3));
        assert_eq!(trim(vec![1, 2, 0, 3, 0]), vec![1, 2, 0, 3]);
    }

    #[test]
    fn mul_and_rem_are_consistent() {
        let f = gf(5, 1);
        let a = vec![1, 2, 3];
        let b = vec![4, 1];
        let prod = mul(&f, &a, &b);
        assert_eq!(degree(&prod), Some(3));
        assert!(degree(&rem(&f, &prod, &b)).is_none());
        assert!(degree(&rem(&f, &prod, &a)).is_none());
        let shifted = add(&f, &prod, &[2]);
        assert_eq!(rem(&f, &shifted, &b), vec![2]);
    }

    #[test]
    fn derivative_in_characteristic_p() {
        let f3 = gf(3, 1);
        // d/dx (x^3 + 2x + 1) = 3x^2 + 2 = 2 over GF(3).
        assert_eq!(derivative(&f3, &[1, 2, 0, 1]), vec![2]);
        let f2 = gf(2, 1);
        // d/dx (x^4 + x^2 + x) = 1 over GF(2).
        assert_eq!(derivative(&f2, &[0, 1, 1, 0, 1]), vec![1]);
    }

    #[test]
    fn square_free_detection() {
        let f3 = gf(3, 1);
        // x^2 (x + 1): repeated factor.
        let sq = mul(&f3, &[0, 0, 1], &[1, 1]);
        assert!(!is_square_free(&f3, &sq));
        // x^3 + 2x = x(x+1)(x+2): square-free.
        assert!(is_square_free(&f3, &[0, 2, 0, 1]));
        // (x^2 + 1)^3 = x^6 + 1 over GF(3): derivative vanishes.
        assert!(!is_square_free(&f3, &[1, 0, 0, 0, 0, 0, 1]));
        // Characteristic 2: x^2 + 1 = (x + 1)^2.
        let f2 = gf(2, 1);
        assert!(!is_square_free(&f2, &[1, 0, 1]));
        assert!(is_square_free(&f2, &[0, 1, 1]));
    }

    #[test]
    fn square_free_matches_brute_oracle() {
        for (p, n) in [(3u64, 1u32), (5, 1), (2, 2)] {
            let f = gf(p, n);
            let q = f.size;
            // All monic quartics.
            for code in 0..q.pow(4) {
                let mut poly = Vec::with_capacity(5);
                let mut c = code;
                for _ in 0..4 {
                    poly.push(c % q);
                    c /= q;
                }
                poly.push(1);
                assert_eq!(
                    is_square_free(&f, &poly),
                    brute_square_free(&f, &poly),
                    "GF({}^{}) poly {:?}",
                    p,
                    n,
                    poly
                );
            }
        }
    }

    #[test]
    fn square_free_counts_match_formula() {
        // Monic square-free polynomials of degree d >= 2 number q^d - q^{d-1}.
        for (p, n, d) in [(3u64, 1u32, 3u32), (5, 1, 2), (2, 1, 4), (2, 2, 3)] {
            let f = gf(p, n);
            let q = f.size;
            let mut count = 0u64;
            for code in 0..q.pow(d) {
                let mut poly = Vec::with_capacity(d as usize + 1);
                let mut c = code;
                for _ in 0..d {
                    poly.push(c % q);
                    c /= q;
                }
                poly.push(1);
                if is_square_free(&f, &poly) {
                    count += 1;
                }
            }
            assert_eq!(count, q.pow(d) - q.pow(d - 1));
        }
    }

    #[test]
    fn eval_matches_power_expansion() {
        let f = gf(7, 1);
        let poly = vec![3, 0, 5, 1];
        for x in 0..7 {
            let mut expect = 0u64;
            for (i, &c) in poly.iter().enumerate() {
                expect = f.add(expect, f.mul(c, f.pow(x, i as u64)));
            }
            assert_eq!(eval(&f, &poly, x), expect);
        }
    }

    #[test]
    fn reversal_examples() {
        // t^4 * f(1/t) for f = x^3 + 2x + 1.
        assert_eq!(reverse_into_degree(&[1, 2, 0, 1], 4), vec![0, 1, 0, 2, 1]);
        // Padding degree equal to actual degree just reverses.
        assert_eq!(reverse_into_degree(&[1, 2, 3], 2), vec![3, 2, 1]);
    }
}
