//! Exhaustive structural checks of the characteristic-two curve family.
//!
//! The even-characteristic count rests on a small amount of structure
//! theory for pairs `(h, f)` defining `y^2 + h y = f`:
//!
//! * the twist relation `(h, f) ~ (h, f + h l + l^2)` over polynomials `l`
//!   of degree at most `g+1` partitions the unrestricted pair set `Q_g`
//!   into classes of size exactly `q^{g+2}/2`;
//! * the sets `V_z` — classes of `(m h, m^2 f)` over monic `m`, one set per
//!   twist class `z` of an admissible pair at some genus `i <= g` — are
//!   pairwise disjoint and cover `Q_g/~`, mirroring the square-free/square
//!   factorization used in odd characteristic;
//! * local reducibility has two equivalent formulations: an irreducible
//!   `m` divides `gcd(h, f'^2 + f h'^2)` exactly when `m | h` and
//!   `m^2 | f + h l + l^2` for some `l` of degree at most `g+1`.
//!
//! This module verifies all three claims by brute force over every pair in
//! `Q_g` for tiny fields, which is what makes the even-characteristic
//! engine checks trustworthy.

use crate::field::{poly, Gf};
use crate::oracle::{even_pair_is_admissible, EnumBudget, ORACLE_TABLE_CAP};
use crate::{Error, Result};
use serde::Serialize;
use std::collections::BTreeMap;
use std::sync::Arc;

/// Outcome of one exhaustive structure probe.
#[derive(Debug, Clone, Serialize)]
pub struct StructureReport {
    pub q: u64,
    pub genus: u32,
    /// `|Q_g|`: pairs with `h` nonzero inside the degree bounds.
    pub pair_count: u64,
    /// `q^{g+2}/2`.
    pub expected_class_size: u64,
    /// Number of twist classes found.
    pub class_count: u64,
    /// Every class has exactly the expected size.
    pub class_sizes_ok: bool,
    /// No class mixes admissible and inadmissible pairs.
    pub classes_respect_admissibility: bool,
    /// `|P_g|`: admissible pairs.
    pub admissible_pair_count: u64,
    /// Total number of `(z, class)` incidences over all `V_z`.
    pub vz_label_total: u64,
    /// No class of `Q_g` lies in two different `V_z`.
    pub vz_disjoint: bool,
    /// Every class of `Q_g` lies in some `V_z`.
    pub vz_cover: bool,
    /// Number of `(h, f, m)` triples compared in the reformulation check.
    pub reform_triples: u64,
    /// Both formulations of local reducibility agreed on every triple.
    pub reform_ok: bool,
}

impl StructureReport {
    pub fn all_ok(&self) -> bool {
        self.class_sizes_ok
            && self.classes_respect_admissibility
            && self.vz_disjoint
            && self.vz_cover
            && self.reform_ok
    }
}

fn decode(q: u64, len: usize, mut code: u64) -> Vec<u64> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push(code % q);
        code /= q;
    }
    out
}

fn encode(q: u64, len: usize, coeffs: &[u64]) -> u64 {
    debug_assert!(coeffs.len() <= len);
    let mut code = 0u64;
    for &c in coeffs.iter().rev() {
        code = code * q + c;
    }
    code
}

/// Smallest `f`-code in the twist class of `(h, f)` at genus context `G`
/// (twists by all `l` of degree at most `G+1`), plus the class size.
fn class_min_and_size(gf: &Gf, ctx_genus: i64, h: &[u64], f: &[u64]) -> (u64, u64) {
    let q = gf.size;
    let l_len = (ctx_genus + 2) as usize;
    let f_len = (2 * ctx_genus + 3) as usize;
    let mut members = std::collections::BTreeSet::new();
    for l_code in 0..q.pow(l_len as u32) {
        let l = decode(q, l_len, l_code);
        let twist = poly::add(gf, &poly::mul(gf, h, &l), &poly::mul(gf, &l, &l));
        let fx = poly::add(gf, f, &twist);
        members.insert(encode(q, f_len, &fx));
    }
    let min = *members.iter().next().expect("class is nonempty");
    (min, members.len() as u64)
}

/// Admissible pairs at genus `i >= -1`, as coefficient vectors.
fn admissible_pairs(gf: &Gf, i: i64) -> Vec<(Vec<u64>, Vec<u64>)> {
    let q = gf.size;
    let mut out = Vec::new();
    if i == -1 {
        // Constant pairs: any nonzero h and any f satisfy all three
        // conditions trivially at genus -1.
        for a in 1..q {
            for b in 0..q {
                out.push((vec![a], vec![b]));
            }
        }
        return out;
    }
    let h_len = (i + 2) as usize;
    let f_len = (2 * i + 3) as usize;
    for h_code in 1..q.pow(h_len as u32) {
        let h = decode(q, h_len, h_code);
        for f_code in 0..q.pow(f_len as u32) {
            let f = decode(q, f_len, f_code);
            if even_pair_is_admissible(gf, i as u32, &h, &f) {
                out.push((h.clone(), f));
            }
        }
    }
    out
}

/// All monic polynomials of degree exactly `d`.
fn monic_of_degree(q: u64, d: usize) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    for code in 0..q.pow(d as u32) {
        let mut m = decode(q, d, code);
        m.push(1);
        out.push(m);
    }
    out
}

/// All monic irreducible polynomials of degree 1..=max_d.
fn monic_irreducibles(gf: &Gf, max_d: usize) -> Vec<Vec<u64>> {
    let q = gf.size;
    let mut irreducible: Vec<Vec<u64>> = Vec::new();
    for d in 1..=max_d {
        'cand: for m in monic_of_degree(q, d) {
            for div in &irreducible {
                let dd = poly::degree(div).unwrap();
                if dd <= d / 2 && poly::rem(gf, &m, div).is_empty() {
                    continue 'cand;
                }
            }
            irreducible.push(m);
        }
    }
    irreducible
}

fn divides(gf: &Gf, d: &[u64], a: &[u64]) -> bool {
    poly::rem(gf, a, d).is_empty()
}

/// `f'^2 + f h'^2`, the affine singularity locus paired against `h`.
fn discriminant(gf: &Gf, h: &[u64], f: &[u64]) -> Vec<u64> {
    let fp = poly::derivative(gf, f);
    let hp = poly::derivative(gf, h);
    poly::add(
        gf,
        &poly::mul(gf, &fp, &fp),
        &poly::mul(gf, f, &poly::mul(gf, &hp, &hp)),
    )
}

/// Runs the exhaustive probe at one `(q, genus)`.
pub fn equivalence_class_probe(
    q: u64,
    genus: u32,
    budget: &EnumBudget,
) -> Result<StructureReport> {
    let pp = crate::field::PrimePower::new(q)?;
    if !pp.is_even() {
        return Err(Error::Unsupported(format!(
            "structure probe needs characteristic two, got q = {}",
            q
        )));
    }
    let g = genus as i64;
    let h_len = (g + 2) as usize;
    let f_len = (2 * g + 3) as usize;
    let h_span = q.pow(h_len as u32);
    let f_span = q.pow(f_len as u32);
    let pair_count = (h_span - 1) * f_span;
    let l_span = q.pow(h_len as u32);
    // Class construction touches every pair once per twist; budget the
    // product so a misconfigured call fails fast instead of spinning.
    let work = (pair_count as u128) * (l_span as u128);
    if work > budget.max_points as u128 {
        return Err(Error::Budget {
            task: format!("structure probe at q={} genus={}", q, genus),
            needed: work,
            budget: budget.max_points as u128,
        });
    }
    let gf = Gf::new(pp.p, pp.k, ORACLE_TABLE_CAP)?;
    probe_with(&gf, genus)
}

fn probe_with(gf: &Arc<Gf>, genus: u32) -> Result<StructureReport> {
    let q = gf.size;
    let g = genus as i64;
    let h_len = (g + 2) as usize;
    let f_len = (2 * g + 3) as usize;
    let h_span = q.pow(h_len as u32);
    let f_span = q.pow(f_len as u32);
    let expected_class_size = q.pow(h_len as u32) / 2;

    // Partition Q_g into twist classes, checking sizes and admissibility
    // coherence along the way. Classes are keyed by (h-code, min f-code).
    let mut class_sizes_ok = true;
    let mut classes_respect_admissibility = true;
    let mut admissible_pair_count = 0u64;
    let mut class_admissible: BTreeMap<(u64, u64), bool> = BTreeMap::new();
    for h_code in 1..h_span {
        let h = decode(q, h_len, h_code);
        let mut seen: Vec<bool> = vec![false; f_span as usize];
        for f_code in 0..f_span {
            let f = decode(q, f_len, f_code);
            let adm = even_pair_is_admissible(gf, genus, &h, &f);
            if adm {
                admissible_pair_count += 1;
            }
            if seen[f_code as usize] {
                // Class already built from an earlier member; just check
                // admissibility coherence.
                let (min, _) = class_min_and_size(gf, g, &h, &f);
                if class_admissible[&(h_code, min)] != adm {
                    classes_respect_admissibility = false;
                }
                continue;
            }
            let (min, size) = class_min_and_size(gf, g, &h, &f);
            if size != expected_class_size {
                class_sizes_ok = false;
            }
            // Mark all members as visited.
            let l_len = h_len;
            for l_code in 0..q.pow(l_len as u32) {
                let l = decode(q, l_len, l_code);
                let twist = poly::add(gf, &poly::mul(gf, &h, &l), &poly::mul(gf, &l, &l));
                let fx = poly::add(gf, &f, &twist);
                seen[encode(q, f_len, &fx) as usize] = true;
            }
            class_admissible.insert((h_code, min), adm);
        }
    }
    let class_count = class_admissible.len() as u64;

    // Build the V_z labelling: for each genus level i and each twist class
    // z of an admissible pair at level i, the classes of (m h, m^2 f) over
    // monic m of degree <= g - i.
    let mut label: BTreeMap<(u64, u64), (i64, usize)> = BTreeMap::new();
    let mut vz_disjoint = true;
    let mut vz_label_total = 0u64;
    for i in -1..=g {
        let pairs = admissible_pairs(gf, i);
        // Twist classes of P_i: keep one representative per class.
        let mut reps: Vec<(Vec<u64>, Vec<u64>)> = Vec::new();
        let mut seen_classes = std::collections::BTreeSet::new();
        let i_h_len = (i + 2) as usize;
        for (h, f) in pairs {
            let (min, _) = class_min_and_size(gf, i, &h, &f);
            let key = (encode(q, i_h_len, &h), min);
            if seen_classes.insert(key) {
                reps.push((h, f));
            }
        }
        for (z_index, (h0, f0)) in reps.iter().enumerate() {
            for d in 0..=(g - i) as usize {
                for m in monic_of_degree(q, d) {
                    let mh = poly::mul(gf, &m, h0);
                    let mmf = poly::mul(gf, &poly::mul(gf, &m, &m), f0);
                    let (min, _) = class_min_and_size(gf, g, &mh, &mmf);
                    let key = (encode(q, h_len, &mh), min);
                    vz_label_total += 1;
                    if let Some(prev) = label.insert(key, (i, z_index)) {
                        if prev != (i, z_index) {
                            vz_disjoint = false;
                        }
                    }
                }
            }
        }
    }
    let vz_cover = label.len() as u64 == class_count
        && label.keys().all(|k| class_admissible.contains_key(k));

    // Local reducibility reformulation on every (h, f, m) triple.
    let irreducibles = monic_irreducibles(gf, h_len - 1);
    let mut reform_triples = 0u64;
    let mut reform_ok = true;
    for h_code in 1..h_span {
        let h = decode(q, h_len, h_code);
        for f_code in 0..f_span {
            let f = decode(q, f_len, f_code);
            let disc = discriminant(gf, &h, &f);
            for m in &irreducibles {
                reform_triples += 1;
                let direct = divides(gf, m, &h) && divides(gf, m, &disc);
                let msq = poly::mul(gf, m, m);
                let mut lifted = false;
                if divides(gf, m, &h) {
                    'l: for l_code in 0..q.pow(h_len as u32) {
                        let l = decode(q, h_len, l_code);
                        let twist =
                            poly::add(gf, &poly::mul(gf, &h, &l), &poly::mul(gf, &l, &l));
                        let fx = poly::add(gf, &f, &twist);
                        if divides(gf, &msq, &fx) {
                            lifted = true;
                            break 'l;
                        }
                    }
                }
                if direct != lifted {
                    reform_ok = false;
                }
            }
        }
    }

    Ok(StructureReport {
        q,
        genus,
        pair_count: (h_span - 1) * f_span,
        expected_class_size,
        class_count,
        class_sizes_ok,
        classes_respect_admissibility,
        admissible_pair_count,
        vz_label_total,
        vz_disjoint,
        vz_cover,
        reform_triples,
        reform_ok,
    })
}
