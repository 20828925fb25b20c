//! Fast genus-one moment oracle for odd field sizes.
//!
//! Genus-one trace moments reduce to a histogram of the first trace `a_1`
//! over the family: higher traces follow from the two-term recurrence
//! `a_m = a_1 a_{m-1} - q a_{m-2}` with `a_0 = 2`, so a full enumeration
//! only needs monic quartic and cubic polynomials, with non-monic members
//! folded in by quadratic-character scaling.

use super::EnumBudget;
use crate::field::{poly, Gf};
use crate::tuples::AExpr;
use crate::{Error, Result};
use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::One;
use rayon::prelude::*;
use std::collections::BTreeMap;

use super::ORACLE_TABLE_CAP;

/// Histogram of `a_1` over the whole genus-one family (all square-free
/// polynomials of degree 3 or 4, any leading coefficient) over GF(q),
/// odd `q`.
pub fn genus1_a1_histogram(q: u64, budget: &EnumBudget) -> Result<BTreeMap<i64, u64>> {
    let pp = crate::field::PrimePower::new(q)?;
    if pp.p == 2 {
        return Err(Error::Unsupported(
            "the scaled histogram needs an odd field size".to_string(),
        ));
    }
    let candidates = (q as u128).pow(3) + (q as u128).pow(4);
    if candidates > budget.max_curves as u128 {
        return Err(Error::Budget {
            task: format!("genus-one enumeration over GF({})", q),
            needed: candidates,
            budget: budget.max_curves as u128,
        });
    }
    let base = Gf::new(pp.p, pp.k, ORACLE_TABLE_CAP)?;

    // Histogram over monic polynomials first.
    let mut monic: BTreeMap<i64, u64> = [(3u32, 0u64), (4, 1)]
        .into_par_iter()
        .flat_map(|(deg, lead_chi_arg)| {
            (0..q.pow(deg)).into_par_iter().map(move |code| (deg, lead_chi_arg, code))
        })
        .fold(BTreeMap::new, |mut acc: BTreeMap<i64, u64>, (deg, top, code)| {
            let mut f = Vec::with_capacity(deg as usize + 1);
            let mut c = code;
            for _ in 0..deg {
                f.push(c % q);
                c /= q;
            }
            f.push(1);
            if poly::is_square_free(&base, &f) {
                // a_1 = -(value at infinity + sum over affine points).
                let mut s = base.chi(top) as i64;
                for x in 0..q {
                    s += base.chi(poly::eval(&base, &f, x)) as i64;
                }
                *acc.entry(-s).or_insert(0) += 1;
            }
            acc
        })
        .reduce(BTreeMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            a
        });
    monic.retain(|_, v| *v > 0);

    // Scaling f -> c f multiplies a_1 by the character of c, so the full
    // family histogram symmetrizes the monic one with weight (q-1)/2 on
    // each sign.
    let half = (q - 1) / 2;
    let mut full: BTreeMap<i64, u64> = BTreeMap::new();
    for (&t, &count) in &monic {
        *full.entry(t).or_insert(0) += half * count;
        *full.entry(-t).or_insert(0) += half * count;
    }
    full.retain(|_, v| *v > 0);
    Ok(full)
}

/// Exact genus-one trace moments over GF(q), odd `q`, evaluated from a
/// precomputed `a_1` histogram via the trace recurrence.
pub fn genus1_moments_from_histogram(
    q: u64,
    hist: &BTreeMap<i64, u64>,
    exprs: &[AExpr],
) -> Result<Vec<BigRational>> {
    let max_n = exprs
        .iter()
        .flat_map(|e| e.factors().iter().map(|&(n, _)| n))
        .max()
        .unwrap_or(0) as usize;
    let mut totals = vec![0i128; exprs.len()];
    for (&t, &count) in hist {
        // Trace sequence from the recurrence.
        let mut a = vec![0i128; max_n.max(1) + 1];
        a[0] = 2;
        if max_n >= 1 {
            a[1] = t as i128;
        }
        for m in 2..=max_n {
            a[m] = t as i128 * a[m - 1] - q as i128 * a[m - 2];
        }
        for (e, total) in exprs.iter().zip(totals.iter_mut()) {
            let mut term = 1i128;
            for &(n, r) in e.factors() {
                for _ in 0..r {
                    term = term
                        .checked_mul(a[n as usize])
                        .ok_or_else(|| Error::Internal("genus-one moment overflow".to_string()))?;
                }
            }
            *total = total
                .checked_add(term.checked_mul(count as i128).ok_or_else(|| {
                    Error::Internal("genus-one moment overflow".to_string())
                })?)
                .ok_or_else(|| Error::Internal("genus-one moment overflow".to_string()))?;
        }
    }
    let qb = BigInt::from(q);
    let group = (qb.pow(3) - &qb) * (&qb - BigInt::one());
    Ok(totals
        .into_iter()
        .map(|t| BigRational::new(BigInt::from(t), group.clone()))
        .collect())
}

/// Exact genus-one trace moment over GF(q), odd `q`.
pub fn genus1_moment(q: u64, e: &AExpr, budget: &EnumBudget) -> Result<BigRational> {
    let hist = genus1_a1_histogram(q, budget)?;
    Ok(genus1_moments_from_histogram(q, &hist, std::slice::from_ref(e))?.remove(0))
}
