//! Brute-force enumeration oracle.
//!
//! For a small base field and genus, this module enumerates every curve in
//! the hyperelliptic family (square-free `f` with `y^2 = f` in odd
//! characteristic; admissible pairs `(h, f)` with `y^2 + h y = f` in
//! characteristic two) and records, per curve and per exact degree `d`, how
//! many Frobenius orbits of degree-`d` points carry character value `+1`
//! and `-1`. Every moment the symbolic engine can produce is then a finite
//! exact sum over these per-curve profiles, giving a fully independent
//! cross-check of the engine.

mod even_structure;
mod genus1;

pub use even_structure::{equivalence_class_probe, StructureReport};
pub use genus1::{genus1_a1_histogram, genus1_moment, genus1_moments_from_histogram};

use crate::arith::{divisors, moebius};
use crate::field::{poly, Ext, Gf, PointUniverse, PrimePower, ProjPoint};
use crate::tuples::{AExpr, BCExpr, CycleType, UTuple};
use crate::{Error, Parity, Result};
use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::One;
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::sync::Arc;

/// Size cap for the extension-field tables an oracle may build.
pub const ORACLE_TABLE_CAP: u64 = 1 << 24;

/// Limits on how much work an enumeration may attempt. Checked before any
/// enumeration starts, so an over-budget request fails fast.
#[derive(Debug, Clone, Copy)]
pub struct EnumBudget {
    /// Maximum number of candidate curves (before validity filtering).
    pub max_curves: u64,
    /// Maximum number of point evaluations across the whole enumeration.
    pub max_points: u64,
}

impl Default for EnumBudget {
    fn default() -> Self {
        EnumBudget {
            max_curves: 20_000_000,
            max_points: 4_000_000_000,
        }
    }
}

/// Per-curve orbit statistics: for each exact degree `d` (1-based), the
/// number of degree-`d` orbits with character value `+1` and `-1`.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Profile {
    counts: Vec<(u32, u32)>,
}

impl Profile {
    fn plus(&self, d: u32) -> i128 {
        self.counts[d as usize - 1].0 as i128
    }

    fn minus(&self, d: u32) -> i128 {
        self.counts[d as usize - 1].1 as i128
    }

    /// Trace sum `a_m = -(sum over points of degree dividing m)`.
    fn a(&self, m: u32) -> i128 {
        let mut total = 0i128;
        for d in divisors(m as u64) {
            let d = d as u32;
            // Value of a degree-d orbit raised to the power m/d: -1 survives
            // odd powers, becomes +1 under even ones.
            let sign = if (m / d) % 2 == 1 { -1 } else { 1 };
            total += d as i128 * (self.plus(d) + sign * self.minus(d));
        }
        -total
    }

    /// Point count of the curve over the degree-`d` extension.
    fn curve_points(&self, d: u32, q: u64) -> i128 {
        (q as i128).pow(d) + 1 - self.a(d)
    }
}

/// The brute-force oracle for one `(q, parity, genus)` family.
pub struct Oracle {
    pub q: u64,
    pub parity: Parity,
    pub genus: u32,
    pub max_degree: u32,
    group_order: BigInt,
    profiles: Vec<Profile>,
}

impl Oracle {
    pub fn new(
        q: u64,
        parity: Parity,
        genus: u32,
        max_degree: u32,
        budget: &EnumBudget,
    ) -> Result<Oracle> {
        let pp = PrimePower::new(q)?;
        match parity {
            Parity::Odd if pp.p == 2 => {
                return Err(Error::Unsupported(format!(
                    "field size {} has characteristic two, not odd",
                    q
                )))
            }
            Parity::Even if pp.p != 2 => {
                return Err(Error::Unsupported(format!(
                    "field size {} has odd characteristic",
                    q
                )))
            }
            _ => {}
        }
        assert!(max_degree >= 1);

        let g = genus as u64;
        let candidates: u128 = match parity {
            // All degree 2g+1 and 2g+2 polynomials with nonzero lead.
            Parity::Odd => {
                (q as u128 - 1) * ((q as u128).pow(2 * genus + 1) + (q as u128).pow(2 * genus + 2))
            }
            // All (h, f) with deg h <= g+1, deg f <= 2g+2.
            Parity::Even => (q as u128).pow((g + 2) as u32) * (q as u128).pow(2 * genus + 3),
        };
        if candidates > budget.max_curves as u128 {
            return Err(Error::Budget {
                task: format!("curve enumeration over GF({}) at genus {}", q, genus),
                needed: candidates,
                budget: budget.max_curves as u128,
            });
        }

        let base = Gf::new(pp.p, pp.k, ORACLE_TABLE_CAP)?;
        let degrees: Vec<u32> = (1..=max_degree).collect();
        let universe = PointUniverse::new(base.clone(), &degrees, ORACLE_TABLE_CAP)?;
        let reps: Vec<(Arc<Ext>, Vec<u64>)> = degrees
            .iter()
            .map(|&d| {
                let ext = universe.ext(d).clone();
                let affine: Vec<u64> = ext
                    .orbit_reps_of_full_degree()
                    .into_iter()
                    .filter_map(|p| match p {
                        ProjPoint::Affine(a) => Some(a),
                        ProjPoint::Infinity => None,
                    })
                    .collect();
                (ext, affine)
            })
            .collect();
        let evals_per_curve: u128 = reps.iter().map(|(_, v)| v.len() as u128 + 1).sum();
        let work = candidates.saturating_mul(evals_per_curve);
        if work > budget.max_points as u128 {
            return Err(Error::Budget {
                task: format!(
                    "point evaluation over GF({}) at genus {} to degree {}",
                    q, genus, max_degree
                ),
                needed: work,
                budget: budget.max_points as u128,
            });
        }

        let profiles = match parity {
            Parity::Odd => enumerate_odd(&base, genus, &reps),
            Parity::Even => enumerate_even(&base, genus, &reps),
        };

        let qb = BigInt::from(q);
        let mut group_order = (qb.pow(3) - &qb) * (&qb - BigInt::one());
        if parity == Parity::Even {
            group_order *= qb.pow(genus + 2);
        }

        Ok(Oracle {
            q,
            parity,
            genus,
            max_degree,
            group_order,
            profiles,
        })
    }

    /// Number of curves (equations) in the enumerated family.
    pub fn curve_count(&self) -> u64 {
        self.profiles.len() as u64
    }

    /// The normalizing group order `|G|`.
    pub fn group_order(&self) -> &BigInt {
        &self.group_order
    }

    fn check_degree(&self, d: u32, what: &str) -> Result<()> {
        if d > self.max_degree || d == 0 {
            return Err(Error::Unsupported(format!(
                "{} needs degree {} but the oracle holds degrees 1..={}",
                what, d, self.max_degree
            )));
        }
        Ok(())
    }

    fn normalized(&self, sum: i128) -> BigRational {
        BigRational::new(BigInt::from(sum), self.group_order.clone())
    }

    /// The primitive tuple sum: over curves and over tuples of pairwise
    /// distinct orbits matching the slot degrees, the product of character
    /// values raised to the slot exponents, normalized by `|G|`.
    pub fn moment_u(&self, t: &UTuple) -> Result<BigRational> {
        // Group slots by degree: (degree, odd-exponent count, even count).
        let mut groups: BTreeMap<u32, (u32, u32)> = BTreeMap::new();
        for &(n, r) in t.slots() {
            self.check_degree(n, "tuple sum")?;
            let e = groups.entry(n).or_insert((0, 0));
            if r == 1 {
                e.0 += 1;
            } else {
                e.1 += 1;
            }
        }
        let mut total = 0i128;
        for p in &self.profiles {
            let mut term = 1i128;
            for (&d, &(t1, t2)) in &groups {
                let w = signed_orbit_assignments(p.plus(d), p.minus(d), t1, t2);
                term = term
                    .checked_mul(w)
                    .and_then(|x| x.checked_mul((d as i128).pow(t1 + t2)))
                    .ok_or_else(|| Error::Internal("tuple sum overflow".to_string()))?;
                if term == 0 {
                    break;
                }
            }
            total = total
                .checked_add(term)
                .ok_or_else(|| Error::Internal("tuple sum overflow".to_string()))?;
        }
        Ok(self.normalized(total))
    }

    /// Moment of a product of trace sums, normalized by `|G|`.
    pub fn moment_a(&self, e: &AExpr) -> Result<BigRational> {
        for &(n, _) in e.factors() {
            self.check_degree(n, "trace moment")?;
        }
        let mut total = 0i128;
        for p in &self.profiles {
            let mut term = 1i128;
            for &(n, r) in e.factors() {
                let a = p.a(n);
                for _ in 0..r {
                    term = term
                        .checked_mul(a)
                        .ok_or_else(|| Error::Internal("trace moment overflow".to_string()))?;
                }
            }
            total += term;
        }
        Ok(self.normalized(total))
    }

    /// Moment of a product of signed orbit counts `b_i = i * (plus orbits)`,
    /// `c_i = i * (minus orbits)`, normalized by `|G|`.
    pub fn moment_bc(&self, e: &BCExpr) -> Result<BigRational> {
        for &(n, _) in e.b.iter().chain(&e.c) {
            self.check_degree(n, "orbit-count moment")?;
        }
        let mut total = 0i128;
        for p in &self.profiles {
            let mut term = 1i128;
            for &(n, r) in &e.b {
                let v = n as i128 * p.plus(n);
                for _ in 0..r {
                    term = term
                        .checked_mul(v)
                        .ok_or_else(|| Error::Internal("orbit moment overflow".to_string()))?;
                }
            }
            for &(n, r) in &e.c {
                let v = n as i128 * p.minus(n);
                for _ in 0..r {
                    term = term
                        .checked_mul(v)
                        .ok_or_else(|| Error::Internal("orbit moment overflow".to_string()))?;
                }
            }
            total += term;
        }
        Ok(self.normalized(total))
    }

    /// Stacky number of configurations fixed by a permutation of the given
    /// cycle type: each cycle of length `N` must map to a Frobenius orbit
    /// of exact degree `N` on the curve, distinct cycles to distinct
    /// orbits.
    pub fn fixed_points(&self, mu: &CycleType) -> Result<BigRational> {
        for &(part, _) in &mu.counts() {
            self.check_degree(part, "fixed-point count")?;
        }
        let mut total = 0i128;
        for p in &self.profiles {
            let mut term = 1i128;
            for (part, count) in mu.counts() {
                // Number of curve points of exact degree `part`.
                let exact: i128 = divisors(part as u64)
                    .into_iter()
                    .map(|d| moebius(part as u64 / d) as i128 * p.curve_points(d as u32, self.q))
                    .sum();
                for j in 0..count {
                    term = term
                        .checked_mul(exact - (j as i128) * part as i128)
                        .ok_or_else(|| Error::Internal("fixed-point overflow".to_string()))?;
                }
            }
            total += term;
        }
        Ok(self.normalized(total))
    }

    /// Largest trace magnitude across the family, for Weil-bound checks.
    pub fn max_abs_a(&self, m: u32) -> Result<i128> {
        self.check_degree(m, "trace bound")?;
        Ok(self
            .profiles
            .iter()
            .map(|p| p.a(m).abs())
            .max()
            .unwrap_or(0))
    }

    /// The zero-weight moment `sum 1/|G|` times `|G|`: just the family size,
    /// exposed as an exact rational for convenience.
    pub fn mass(&self) -> BigRational {
        self.normalized(self.profiles.len() as i128)
    }
}

/// Number of ways to choose, in order, `t1 + t2` pairwise distinct orbits
/// (first `t1` from odd-exponent slots, then `t2` from even slots) from a
/// pool of `p` orbits valued `+1` and `n` valued `-1`, weighted by the
/// product of the character values. Zero-valued orbits never contribute.
fn signed_orbit_assignments(p: i128, n: i128, t1: u32, t2: u32) -> i128 {
    let m = t1 + t2;
    let mut total = 0i128;
    for j1 in 0..=t1 {
        for j2 in 0..=t2 {
            let sign = if j1 % 2 == 0 { 1i128 } else { -1 };
            let ways = binomial(t1, j1) * binomial(t2, j2);
            let term = sign * ways * falling(n, j1 + j2) * falling(p, m - j1 - j2);
            total += term;
        }
    }
    total
}

fn binomial(n: u32, k: u32) -> i128 {
    let mut acc = 1i128;
    for i in 0..k {
        acc = acc * (n - i) as i128 / (i + 1) as i128;
    }
    acc
}

fn falling(x: i128, k: u32) -> i128 {
    let mut acc = 1i128;
    for i in 0..k as i128 {
        acc *= x - i;
    }
    acc
}

/// Evaluates the profile of one odd-characteristic curve `y^2 = f`.
fn profile_odd(
    base: &Gf,
    f: &[u64],
    lead_2g2: u64,
    reps: &[(Arc<Ext>, Vec<u64>)],
) -> Profile {
    let mut counts = Vec::with_capacity(reps.len());
    for (i, (ext, affine)) in reps.iter().enumerate() {
        let mut plus = 0u32;
        let mut minus = 0u32;
        if i == 0 {
            // The point at infinity: value of the leading coefficient.
            match base.chi(lead_2g2) {
                1 => plus += 1,
                -1 => minus += 1,
                _ => {}
            }
        }
        for &alpha in affine {
            match ext.chi2(ext.eval_poly(f, alpha)) {
                1 => plus += 1,
                -1 => minus += 1,
                _ => {}
            }
        }
        counts.push((plus, minus));
    }
    Profile { counts }
}

fn enumerate_odd(base: &Arc<Gf>, genus: u32, reps: &[(Arc<Ext>, Vec<u64>)]) -> Vec<Profile> {
    let q = base.size;
    let mut jobs: Vec<(u32, u64)> = Vec::new();
    for deg in [2 * genus + 1, 2 * genus + 2] {
        let span = (q - 1) * q.pow(deg);
        for code in 0..span {
            jobs.push((deg, code));
        }
    }
    jobs.par_iter()
        .filter_map(|&(deg, code)| {
            // Decode: lower coefficients then a nonzero leading one.
            let mut f = Vec::with_capacity(deg as usize + 1);
            let mut c = code;
            for _ in 0..deg {
                f.push(c % q);
                c /= q;
            }
            f.push(1 + c);
            debug_assert!(f[deg as usize] >= 1 && f[deg as usize] < q);
            if !poly::is_square_free(base, &f) {
                return None;
            }
            let lead_2g2 = if deg == 2 * genus + 2 { f[deg as usize] } else { 0 };
            Some(profile_odd(base, &f, lead_2g2, reps))
        })
        .collect()
}

/// Evaluates the profile of one characteristic-two curve `y^2 + h y = f`.
fn profile_even(
    h: &[u64],
    f: &[u64],
    h_top: u64,
    f_top: u64,
    reps: &[(Arc<Ext>, Vec<u64>)],
) -> Profile {
    let mut counts = Vec::with_capacity(reps.len());
    for (i, (ext, affine)) in reps.iter().enumerate() {
        let mut plus = 0u32;
        let mut minus = 0u32;
        if i == 0 {
            match ext.tau(ext.embed(h_top), ext.embed(f_top)) {
                1 => plus += 1,
                -1 => minus += 1,
                _ => {}
            }
        }
        for &alpha in affine {
            let hv = ext.eval_poly(h, alpha);
            let fv = ext.eval_poly(f, alpha);
            match ext.tau(hv, fv) {
                1 => plus += 1,
                -1 => minus += 1,
                _ => {}
            }
        }
        counts.push((plus, minus));
    }
    Profile { counts }
}

/// Admissibility of a characteristic-two pair `(h, f)`: `h` nonzero (the
/// cover must be separable), correct degree range, no affine
/// singularities, and no singularity at infinity.
pub(crate) fn even_pair_is_admissible(base: &Gf, genus: u32, h: &[u64], f: &[u64]) -> bool {
    let g = genus as usize;
    let dh = poly::degree(h);
    let df = poly::degree(f);
    if dh.is_none() {
        return false;
    }
    // Degree window: max(2 deg h, deg f) must reach 2g+1.
    let reach = dh.map_or(0, |d| 2 * d).max(df.map_or(0, |d| d));
    if reach < 2 * g + 1 {
        return false;
    }
    // Affine nonsingularity: h coprime to f'^2 + f h'^2.
    let fp = poly::derivative(base, f);
    let hp = poly::derivative(base, h);
    let disc = poly::add(
        base,
        &poly::mul(base, &fp, &fp),
        &poly::mul(base, f, &poly::mul(base, &hp, &hp)),
    );
    if !poly::gcd_is_constant(base, h, &disc) {
        return false;
    }
    // Nonsingularity at infinity: in the reversed chart the pair
    // (h_inf, f_inf) must not vanish to order one jointly at t = 0, which
    // reduces to the top coefficients.
    let h_top = h.get(g + 1).copied().unwrap_or(0);
    let f_top1 = f.get(2 * g + 1).copied().unwrap_or(0);
    let f_top2 = f.get(2 * g + 2).copied().unwrap_or(0);
    let probe = base.add(
        base.mul(f_top1, f_top1),
        base.mul(f_top2, base.mul(h.get(g).copied().unwrap_or(0), h.get(g).copied().unwrap_or(0))),
    );
    !(h_top == 0 && probe == 0)
}

/// Same admissibility predicate, but with the infinity condition checked
/// literally in the reversed chart: `t` must not divide
/// `gcd(h_inf, f_inf'^2 + f_inf h_inf'^2)` where `h_inf = t^{g+1} h(1/t)`
/// and `f_inf = t^{2g+2} f(1/t)`. Used to cross-check the coefficient
/// shortcut in `even_pair_is_admissible`.
#[cfg(test)]
fn even_pair_is_admissible_literal(base: &Gf, genus: u32, h: &[u64], f: &[u64]) -> bool {
    let g = genus as usize;
    if poly::degree(h).is_none() {
        return false;
    }
    let reach = poly::degree(h)
        .map_or(0, |d| 2 * d)
        .max(poly::degree(f).map_or(0, |d| d));
    if reach < 2 * g + 1 {
        return false;
    }
    let fp = poly::derivative(base, f);
    let hp = poly::derivative(base, h);
    let disc = poly::add(
        base,
        &poly::mul(base, &fp, &fp),
        &poly::mul(base, f, &poly::mul(base, &hp, &hp)),
    );
    if !poly::gcd_is_constant(base, h, &disc) {
        return false;
    }
    let h_inf = poly::reverse_into_degree(h, g + 1);
    let f_inf = poly::reverse_into_degree(f, 2 * g + 2);
    let fip = poly::derivative(base, &f_inf);
    let hip = poly::derivative(base, &h_inf);
    let disc_inf = poly::add(
        base,
        &poly::mul(base, &fip, &fip),
        &poly::mul(base, &f_inf, &poly::mul(base, &hip, &hip)),
    );
    let gcd = poly::gcd(base, &h_inf, &disc_inf);
    // Admissible iff t does not divide the gcd, i.e. its constant term is
    // nonzero (the zero polynomial counts as divisible).
    gcd.first().copied().unwrap_or(0) != 0
}

fn enumerate_even(base: &Arc<Gf>, genus: u32, reps: &[(Arc<Ext>, Vec<u64>)]) -> Vec<Profile> {
    let q = base.size;
    let g = genus as usize;
    let h_span = q.pow(g as u32 + 2);
    let f_span = q.pow(2 * genus + 3);
    (0..h_span)
        .into_par_iter()
        .flat_map_iter(|h_code| {
            let mut h = Vec::with_capacity(g + 2);
            let mut c = h_code;
            for _ in 0..g + 2 {
                h.push(c % q);
                c /= q;
            }
            let base = base.clone();
            (0..f_span).filter_map(move |f_code| {
                let mut f = Vec::with_capacity(2 * g + 3);
                let mut c = f_code;
                for _ in 0..2 * g + 3 {
                    f.push(c % q);
                    c /= q;
                }
                if !even_pair_is_admissible(&base, genus, &h, &f) {
                    return None;
                }
                let h_top = h[g + 1];
                let f_top = f[2 * g + 2];
                Some((h.clone(), f, h_top, f_top))
            })
        })
        .map(|(h, f, h_top, f_top)| profile_even(&h, &f, h_top, f_top, reps))
        .collect()
}
