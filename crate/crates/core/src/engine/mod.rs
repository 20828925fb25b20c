//! The symbolic engine: exact evaluation of character-sum moments over
//! hyperelliptic families as rational functions of the field size `q`.
//!
//! The central quantity is the tuple sum `u_g(T)`: for each curve in the
//! genus-`g` family, sum the product of character values over tuples of
//! pairwise distinct Frobenius orbits matching the slots of `T`, then
//! normalize by the group order. These satisfy a genus recursion whose
//! coefficients are the cumulative sieve polynomials of the tuple; the
//! engine solves the recursion downward, handles genus zero by slot
//! elimination, and genus one through an interpolated table of moments.
//! Trace and orbit-count moments reduce to tuple sums linearly.

use crate::arith::lcm;
use crate::oracle::{genus1_a1_histogram, genus1_moments_from_histogram, EnumBudget};
use crate::symq::{interpolate, solve_linear, ClosedForm, QPoly, QRat};
use crate::tuples::{
    bhat_poly, character, decompose_a, decompose_bc, fixed_point_terms, genus0_reduce_to_even,
    j_value, partitions, z_order, AExpr, BCExpr, CycleType, UTuple,
};
use crate::{Error, Parity, Result};
use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Signed};
use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

/// Field sizes used to pin down the genus-one moment polynomials: eleven
/// interpolation nodes for a degree bound of ten, plus three held-out
/// validation nodes.
pub const GENUS_ONE_FIELD_SIZES: [u64; 14] = [3, 5, 7, 9, 11, 13, 17, 19, 23, 25, 27, 29, 31, 37];

/// Interpolation degree bound for genus-one moment polynomials.
pub const GENUS_ONE_DEGREE_BOUND: usize = 10;

/// How a genus-one table was produced: which fields were sampled and how
/// the interpolation was validated.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct TableProvenance {
    /// Field sizes the moments were enumerated over.
    pub fields: Vec<u64>,
    /// Interpolation degree bound.
    pub degree_bound: usize,
    /// Number of sampled fields held out to validate each fit.
    pub validation_points: usize,
}

impl TableProvenance {
    /// Provenance for tables assembled from explicit entries rather than
    /// enumeration (tests, caches of unknown origin).
    pub fn synthetic() -> TableProvenance {
        TableProvenance {
            fields: Vec::new(),
            degree_bound: 0,
            validation_points: 0,
        }
    }
}

/// Table of genus-one trace moments as polynomials in `q`.
///
/// The entries cover every monomial in the traces of total weight at most
/// seven. The weight-six entries are the moments the genus recursion cannot
/// reach on its own; the rest serve cross-checks and direct queries. The
/// polynomials do not depend on the characteristic, so a single table
/// serves both parities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenusOneTable {
    entries: BTreeMap<AExpr, QPoly>,
    provenance: TableProvenance,
}

/// Largest total weight of the moment monomials kept in a genus-one table.
pub const GENUS_ONE_MAX_WEIGHT: u32 = 7;

impl GenusOneTable {
    /// The moment monomials the table must hold: one per partition of each
    /// weight up to [`GENUS_ONE_MAX_WEIGHT`] (the empty partition giving the
    /// zero-weight mass).
    pub fn required_exprs() -> Vec<AExpr> {
        (0..=GENUS_ONE_MAX_WEIGHT)
            .flat_map(|w| {
                partitions(w)
                    .into_iter()
                    .map(|mu| AExpr::new(mu.parts().iter().map(|&p| (p, 1)).collect()))
            })
            .collect()
    }

    /// Builds the table by enumerating genus-one families over small odd
    /// fields and interpolating each moment in `q`. Every entry, including
    /// the odd-weight ones that come out identically zero, goes through the
    /// same fit-plus-held-out-validation path.
    pub fn build(budget: &EnumBudget) -> Result<GenusOneTable> {
        let exprs = Self::required_exprs();
        let mut samples: Vec<Vec<(BigRational, BigRational)>> = vec![Vec::new(); exprs.len()];
        for &q in GENUS_ONE_FIELD_SIZES.iter() {
            let hist = genus1_a1_histogram(q, budget)?;
            let values = genus1_moments_from_histogram(q, &hist, &exprs)?;
            for (bucket, value) in samples.iter_mut().zip(values) {
                bucket.push((BigRational::from_integer(BigInt::from(q)), value));
            }
        }
        let mut entries = BTreeMap::new();
        for (e, sample) in exprs.into_iter().zip(samples) {
            let poly = interpolate(&sample, GENUS_ONE_DEGREE_BOUND, 3).map_err(|err| {
                Error::Validation(format!("genus-one moment for {} failed to fit: {}", e, err))
            })?;
            entries.insert(e, poly);
        }
        Ok(GenusOneTable {
            entries,
            provenance: TableProvenance {
                fields: GENUS_ONE_FIELD_SIZES.to_vec(),
                degree_bound: GENUS_ONE_DEGREE_BOUND,
                validation_points: 3,
            },
        })
    }

    /// Builds a table from explicit entries (used by caches and tests).
    pub fn from_entries(entries: BTreeMap<AExpr, QPoly>) -> GenusOneTable {
        GenusOneTable {
            entries,
            provenance: TableProvenance::synthetic(),
        }
    }

    /// Builds a table from entries plus a recorded provenance (cache loads).
    pub fn from_parts(
        entries: BTreeMap<AExpr, QPoly>,
        provenance: TableProvenance,
    ) -> GenusOneTable {
        GenusOneTable {
            entries,
            provenance,
        }
    }

    pub fn get(&self, e: &AExpr) -> Option<&QPoly> {
        self.entries.get(e)
    }

    pub fn entries(&self) -> &BTreeMap<AExpr, QPoly> {
        &self.entries
    }

    pub fn provenance(&self) -> &TableProvenance {
        &self.provenance
    }
}

/// One row of a character transform: an irreducible label and its value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharacterRow {
    /// Partition labelling the irreducible character.
    pub lambda: CycleType,
    /// The equivariant value attached to it.
    pub value: QRat,
}

/// Symbolic evaluator for one characteristic parity.
pub struct Engine {
    parity: Parity,
    genus1: Option<Arc<GenusOneTable>>,
    memo: Mutex<HashMap<(i64, UTuple), QRat>>,
}

impl Engine {
    pub fn new(parity: Parity) -> Engine {
        Engine {
            parity,
            genus1: None,
            memo: Mutex::new(HashMap::new()),
        }
    }

    pub fn with_genus1(parity: Parity, table: Arc<GenusOneTable>) -> Engine {
        Engine {
            parity,
            genus1: Some(table),
            memo: Mutex::new(HashMap::new()),
        }
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn has_genus1_table(&self) -> bool {
        self.genus1.is_some()
    }

    /// Snapshot of the memoized tuple sums, sorted for determinism.
    pub fn export_memo(&self) -> Vec<(i64, UTuple, QRat)> {
        let memo = self.memo.lock().unwrap();
        let mut out: Vec<(i64, UTuple, QRat)> = memo
            .iter()
            .map(|((g, t), v)| (*g, t.clone(), v.clone()))
            .collect();
        out.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
        out
    }

    /// Seeds the memo with previously computed tuple sums (cache loads).
    /// Entries for genus below zero are ignored; those are recomputed
    /// directly and never memoized.
    pub fn import_memo(&self, entries: impl IntoIterator<Item = (i64, UTuple, QRat)>) {
        let mut memo = self.memo.lock().unwrap();
        for (g, t, v) in entries {
            if g >= 0 {
                memo.insert((g, t), v);
            }
        }
    }

    /// The tuple sum `u_g(T)`, exact over `Q(q)`.
    pub fn u_value(&self, g: i64, t: &UTuple) -> Result<QRat> {
        if t.weight() % 2 == 1 {
            return Ok(QRat::zero());
        }
        if g == -1 {
            return Ok(j_value(t));
        }
        if g < -1 {
            return Err(Error::Internal(format!(
                "tuple sum requested at genus {}",
                g
            )));
        }
        let key = (g, t.clone());
        if let Some(hit) = self.memo.lock().unwrap().get(&key) {
            return Ok(hit.clone());
        }
        let n = t.points() as i64;
        // Genus threshold of the homogeneous recursion for odd-exponent
        // tuples: ceil((n-3)/2), clamped at zero.
        let threshold = if n >= 3 { (n - 2) / 2 } else { 0 };
        let value = if t.all_even() {
            self.rec_solve(g, t, true)?
        } else if g >= threshold {
            self.rec_solve(g, t, false)?
        } else if g == 0 {
            let mut acc = QRat::zero();
            for (t2, coeff) in genus0_reduce_to_even(t).terms() {
                acc = &acc + &self.u_value(0, t2)?.scale(coeff);
            }
            acc
        } else if g == 1 && t.slots().iter().all(|&(_, r)| r == 1) {
            self.genus1_provider(t)?
        } else {
            return Err(Error::Unsupported(format!(
                "tuple sum for {} at genus {} lies below the recursion threshold {}",
                t, g, threshold
            )));
        };
        self.memo.lock().unwrap().insert(key, value.clone());
        Ok(value)
    }

    /// Solves the genus recursion for `u_g`: the cumulative sieve
    /// polynomials multiply the lower-genus values, and the right-hand side
    /// is nonzero only in the all-even case, where it depends on the
    /// parity of the characteristic.
    fn rec_solve(&self, g: i64, t: &UTuple, inhomogeneous: bool) -> Result<QRat> {
        let mut acc = if inhomogeneous {
            let j = j_value(t);
            match self.parity {
                Parity::Odd => &j * &QRat::from_poly(bhat_poly(t, 2 * g + 2)),
                Parity::Even => {
                    let scale = QPoly::q_pow((g + 1) as usize);
                    &j * &QRat::from_poly(&scale * &bhat_poly(t, g + 1))
                }
            }
        } else {
            QRat::zero()
        };
        for j in 1..=g + 1 {
            let coeff = QRat::from_poly(bhat_poly(t, j));
            if coeff.is_zero() {
                continue;
            }
            acc = &acc - &(&coeff * &self.u_value(g - j, t)?);
        }
        Ok(acc)
    }

    /// Genus-one values outside the recursion's reach: invert the
    /// decomposition of the matching trace monomial against the table.
    fn genus1_provider(&self, t: &UTuple) -> Result<QRat> {
        let table = self.genus1.as_ref().ok_or_else(|| {
            Error::Unsupported(format!(
                "tuple sum for {} at genus 1 needs the genus-one moment table",
                t
            ))
        })?;
        let expr = AExpr::new(t.slots().iter().map(|&(n, _)| (n, 1)).collect());
        let moment = table.get(&expr).ok_or_else(|| {
            Error::Unsupported(format!(
                "genus-one moment table has no entry for {}",
                expr
            ))
        })?;
        debug_assert_eq!(&expr.general_case(), t);
        let mut acc = QRat::from_poly(moment.clone());
        let mut general_coeff = None;
        for (t2, coeff) in decompose_a(&expr).terms() {
            if t2 == t {
                general_coeff = Some(coeff.clone());
                continue;
            }
            acc = &acc - &self.u_value(1, t2)?.scale(coeff);
        }
        let sign = general_coeff
            .ok_or_else(|| Error::Internal("general case missing from decomposition".into()))?;
        debug_assert!(sign.abs() == BigRational::one());
        Ok(acc.scale(&sign.recip()))
    }

    /// Moment of a product of traces at genus `g`.
    pub fn a_value(&self, g: i64, e: &AExpr) -> Result<QRat> {
        let mut acc = QRat::zero();
        for (t, coeff) in decompose_a(e).terms() {
            acc = &acc + &self.u_value(g, t)?.scale(coeff);
        }
        Ok(acc)
    }

    /// Moment of a product of signed orbit counts at genus `g`.
    pub fn bc_value(&self, g: i64, e: &BCExpr) -> Result<QRat> {
        let mut acc = QRat::zero();
        for (t, coeff) in decompose_bc(e).terms() {
            acc = &acc + &self.u_value(g, t)?.scale(coeff);
        }
        Ok(acc)
    }

    /// Stacky count of configurations fixed by a permutation with the given
    /// cycle type, acting on marked-point tuples over the genus-`g` family.
    pub fn fixed_point_value(&self, g: i64, mu: &CycleType) -> Result<QRat> {
        let mut acc = QRat::zero();
        for (e, weight) in fixed_point_terms(mu) {
            acc = &acc + &(&QRat::from_poly(weight) * &self.a_value(g, &e)?);
        }
        Ok(acc)
    }

    /// The full equivariant transform at genus `g` for `n` marked points:
    /// one value per irreducible character of the symmetric group,
    /// computed from the fixed-point counts of all cycle types.
    pub fn character_transform(&self, g: i64, n: u32) -> Result<Vec<CharacterRow>> {
        let mus = partitions(n);
        let mut fixes = Vec::with_capacity(mus.len());
        for mu in &mus {
            fixes.push(self.fixed_point_value(g, mu)?);
        }
        let mut rows = Vec::with_capacity(mus.len());
        for lambda in &mus {
            let mut acc = QRat::zero();
            for (mu, fix) in mus.iter().zip(&fixes) {
                let chi = character(lambda, mu);
                if chi == 0 {
                    continue;
                }
                let weight = BigRational::new(BigInt::from(chi), BigInt::from(z_order(mu)));
                acc = &acc + &fix.scale(&weight);
            }
            rows.push(CharacterRow {
                lambda: lambda.clone(),
                value: acc,
            });
        }
        Ok(rows)
    }

    /// Closed form of the genus sequence `g -> u_g(T)`.
    pub fn closed_form_u(&self, t: &UTuple) -> Result<ClosedForm> {
        if t.weight() % 2 == 1 {
            return Ok(zero_closed_form());
        }
        let degrees: Vec<u32> = t.slots().iter().map(|&(n, _)| n).collect();
        let shape = ModelShape {
            period: degrees.iter().fold(1u64, |a, &b| lcm(a, b as u64)) as u32,
            degree_bound: t.slots().len().max(1),
            fit_start: fit_start_for(t),
        };
        self.fit_closed_form(|g| self.u_value(g, t), shape)
    }

    /// Closed form of the genus sequence of a trace moment.
    pub fn closed_form_a(&self, e: &AExpr) -> Result<ClosedForm> {
        if e.weight() % 2 == 1 {
            return Ok(zero_closed_form());
        }
        let dec = decompose_a(e);
        let shape = shape_for_terms(dec.terms().map(|(t, _)| t));
        self.fit_closed_form(|g| self.a_value(g, e), shape)
    }

    /// Closed form of the genus sequence of an orbit-count moment.
    pub fn closed_form_bc(&self, e: &BCExpr) -> Result<ClosedForm> {
        let dec = decompose_bc(e);
        if dec.is_empty() {
            return Ok(zero_closed_form());
        }
        let shape = shape_for_terms(dec.terms().map(|(t, _)| t));
        self.fit_closed_form(|g| self.bc_value(g, e), shape)
    }

    /// Closed form of the genus sequence of a fixed-point count.
    pub fn closed_form_fixed_points(&self, mu: &CycleType) -> Result<ClosedForm> {
        let mut tuples: Vec<UTuple> = Vec::new();
        for (e, _) in fixed_point_terms(mu) {
            for (t, _) in decompose_a(&e).terms() {
                tuples.push(t.clone());
            }
        }
        let shape = shape_for_terms(tuples.iter());
        self.fit_closed_form(|g| self.fixed_point_value(g, mu), shape)
    }

    /// Fits `value(g) = geo * q^{2g} + p_{g mod period}(g)` on consecutive
    /// genera, certifies the fit on thirty further genera, and extends the
    /// validity range downward as far as the recursion agrees.
    fn fit_closed_form<F>(&self, eval: F, shape: ModelShape) -> Result<ClosedForm>
    where
        F: Fn(i64) -> Result<QRat>,
    {
        let period = shape.period.max(1) as usize;
        let deg = shape.degree_bound;
        let unknowns = 1 + period * (deg + 1);
        let start = shape.fit_start;

        // Rows: value(g) as a linear combination of q^{2g} and g^k per
        // residue class.
        let mut matrix = Vec::with_capacity(unknowns);
        let mut rhs = Vec::with_capacity(unknowns);
        for row in 0..unknowns {
            let g = start + row as i64;
            let mut cols = vec![QRat::zero(); unknowns];
            cols[0] = QRat::from_poly(QPoly::q_pow(2 * g as usize));
            let r = g.rem_euclid(period as i64) as usize;
            let mut gpow = BigRational::one();
            for k in 0..=deg {
                cols[1 + r * (deg + 1) + k] = QRat::from_int(1).scale(&gpow);
                gpow *= BigRational::from_integer(BigInt::from(g));
            }
            matrix.push(cols);
            rhs.push(eval(g)?);
        }
        let solution = solve_linear(&matrix, &rhs)?;
        let geometric = solution[0].clone();
        let residue_polys: Vec<Vec<QRat>> = (0..period)
            .map(|r| solution[1 + r * (deg + 1)..1 + (r + 1) * (deg + 1)].to_vec())
            .collect();
        let mut form = ClosedForm {
            geometric,
            period: period as u32,
            residue_polys,
            g_min: start,
        };

        // Certification: thirty further genera must agree exactly.
        for g in start + unknowns as i64..start + unknowns as i64 + 30 {
            let direct = eval(g)?;
            if direct != form.eval(g) {
                return Err(Error::Validation(format!(
                    "closed form fails certification at genus {}",
                    g
                )));
            }
        }

        // Back-extension: lower g_min while the recursion still agrees.
        let mut g_min = start;
        while g_min > -1 {
            let g = g_min - 1;
            match eval(g) {
                Ok(direct) if direct == form.eval(g) => g_min = g,
                _ => break,
            }
        }
        form.g_min = g_min;
        Ok(form)
    }
}

/// Shape of the quasi-polynomial model to fit.
struct ModelShape {
    period: u32,
    degree_bound: usize,
    fit_start: i64,
}

fn zero_closed_form() -> ClosedForm {
    ClosedForm {
        geometric: QRat::zero(),
        period: 1,
        residue_polys: vec![vec![QRat::zero()]],
        g_min: -1,
    }
}

/// First genus safely inside the eventual regime of the recursion for one
/// tuple: past the homogeneous threshold and the transient of the
/// constant-coefficient recurrence.
fn fit_start_for(t: &UTuple) -> i64 {
    let n = t.points() as i64;
    let threshold = if n >= 3 { (n - 2) / 2 } else { 0 };
    threshold + n + 2
}

fn shape_for_terms<'a, I: Iterator<Item = &'a UTuple>>(terms: I) -> ModelShape {
    let mut period = 1u64;
    let mut degree_bound = 1usize;
    let mut fit_start = 2i64;
    for t in terms {
        for &(n, _) in t.slots() {
            period = lcm(period, n as u64);
        }
        degree_bound = degree_bound.max(t.slots().len());
        fit_start = fit_start.max(fit_start_for(t));
    }
    ModelShape {
        period: period as u32,
        degree_bound,
        fit_start,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qp(coeffs: &[i64]) -> QRat {
        QRat::from_poly(QPoly::from_int_coeffs(coeffs))
    }

    fn t(s: &str) -> UTuple {
        UTuple::parse(s).unwrap()
    }

    /// A table holding only the known genus-one moment of the sixth trace,
    /// enough to drive the provider for the single-slot tuple.
    fn mini_table() -> Arc<GenusOneTable> {
        let mut entries = BTreeMap::new();
        entries.insert(
            AExpr::parse("a6").unwrap(),
            QPoly::from_int_coeffs(&[-1, 1]),
        );
        Arc::new(GenusOneTable::from_entries(entries))
    }

    #[test]
    fn square_one_slot_tuple_is_geometric() {
        for parity in [Parity::Odd, Parity::Even] {
            let engine = Engine::new(parity);
            let tu = t("(1^2)");
            // u_{-1} is the orbit-count ratio 1/(q^2-q).
            assert_eq!(
                engine.u_value(-1, &tu).unwrap(),
                QRat::new(QPoly::one(), QPoly::from_int_coeffs(&[0, -1, 1]))
            );
            for g in 0..6 {
                assert_eq!(
                    engine.u_value(g, &tu).unwrap(),
                    QRat::from_poly(QPoly::q_pow(2 * g as usize)),
                    "{} g={}",
                    parity,
                    g
                );
            }
        }
    }

    #[test]
    fn linear_two_slot_tuple_alternates() {
        for parity in [Parity::Odd, Parity::Even] {
            let engine = Engine::new(parity);
            let tu = t("(2^1)");
            for g in 0..8 {
                let expect = if g % 2 == 0 { -1 } else { 1 };
                assert_eq!(
                    engine.u_value(g, &tu).unwrap(),
                    QRat::from_int(expect),
                    "{} g={}",
                    parity,
                    g
                );
            }
        }
    }

    #[test]
    fn square_three_slot_tuple_known_values() {
        let engine = Engine::new(Parity::Odd);
        let tu = t("(3^2)");
        assert_eq!(engine.u_value(0, &tu).unwrap(), qp(&[0, 0, 1]));
        assert_eq!(engine.u_value(1, &tu).unwrap(), qp(&[-1, -1, -1, 0, 1]));
    }

    #[test]
    fn degree_six_tuple_sequence_and_periodicity() {
        let engine = Engine::with_genus1(Parity::Odd, mini_table());
        let tu = t("(6^1)");
        let expected = [
            (-1, vec![-1, 1, 0, 1]),       // q^3 + q - 1
            (0, vec![0, 0, -1]),           // -q^2
            (1, vec![1, 0, 0, 0, -1]),     // 1 - q^4
            (2, vec![0, -1, 1, 0, 0, 0, -1]), // -q^6 + q^2 - q
            (3, vec![0, 0, 0, -1, 1, 0, 1]),  // q^6 + q^4 - q^3
            (4, vec![0]),
        ];
        for (g, coeffs) in expected {
            assert_eq!(engine.u_value(g, &tu).unwrap(), qp(&coeffs), "g={}", g);
        }
        // Pure periodicity afterwards.
        for g in 5..17 {
            assert_eq!(
                engine.u_value(g, &tu).unwrap(),
                engine.u_value(g - 6, &tu).unwrap(),
                "g={}",
                g
            );
        }
    }

    #[test]
    fn genus_zero_reduction_agrees_with_recursion_at_low_points() {
        // Tuples with at most three marked points admit both the genus-zero
        // elimination and the homogeneous recursion at genus zero; the two
        // routes must agree.
        for parity in [Parity::Odd, Parity::Even] {
            let engine = Engine::new(parity);
            for s in ["(2^1)", "(1^2,1^1,1^1)", "(1^1,1^1)", "(2^1,1^2)"] {
                let tu = t(s);
                if tu.weight() % 2 == 1 {
                    continue;
                }
                let via_rec = engine.rec_solve(0, &tu, false).unwrap();
                let mut via_red = QRat::zero();
                for (t2, coeff) in genus0_reduce_to_even(&tu).terms() {
                    via_red = &via_red + &engine.u_value(0, t2).unwrap().scale(coeff);
                }
                assert_eq!(via_rec, via_red, "{} {}", parity, s);
            }
        }
    }

    #[test]
    fn four_point_tuple_sequence() {
        let engine = Engine::new(Parity::Odd);
        let tu = t("(2^1,1^1,1^1)");
        assert_eq!(engine.u_value(-1, &tu).unwrap(), qp(&[0, 1]));
        assert_eq!(engine.u_value(0, &tu).unwrap(), qp(&[0, 1]));
        assert_eq!(engine.u_value(1, &tu).unwrap(), qp(&[0, 2, 0, -1]));
        // Constant-coefficient recurrence u_g = u_{g-1} + u_{g-2} - u_{g-3}
        // past the transient.
        for g in 4..10 {
            let lhs = engine.u_value(g, &tu).unwrap();
            let rhs = &(&engine.u_value(g - 1, &tu).unwrap()
                + &engine.u_value(g - 2, &tu).unwrap())
                - &engine.u_value(g - 3, &tu).unwrap();
            assert_eq!(lhs, rhs, "g={}", g);
        }
    }

    #[test]
    fn triple_square_tuple_by_parity() {
        let odd = Engine::new(Parity::Odd);
        let even = Engine::new(Parity::Even);
        let tu = t("(1^2,1^2,1^2)");
        assert_eq!(odd.u_value(0, &tu).unwrap(), qp(&[3, -3, 1]));
        assert_eq!(even.u_value(-1, &tu).unwrap(), QRat::one());
        assert_eq!(even.u_value(0, &tu).unwrap(), qp(&[2, -3, 1]));
        assert_eq!(even.u_value(1, &tu).unwrap(), qp(&[3, -6, 5, -3, 1]));
    }

    #[test]
    fn trace_moments_low_weight() {
        for parity in [Parity::Odd, Parity::Even] {
            let engine = Engine::new(parity);
            let a2 = AExpr::parse("a2").unwrap();
            let a1sq = AExpr::parse("a1^2").unwrap();
            for g in 1..7 {
                let sign = if g % 2 == 0 { 1 } else { -1 };
                let mut expect = QPoly::from_int(sign);
                expect = &expect - &QPoly::q_pow(2 * g as usize);
                assert_eq!(
                    engine.a_value(g, &a2).unwrap(),
                    QRat::from_poly(expect),
                    "{} a2 g={}",
                    parity,
                    g
                );
                let mut expect = QPoly::q_pow(2 * g as usize);
                expect = &expect - &QPoly::one();
                assert_eq!(
                    engine.a_value(g, &a1sq).unwrap(),
                    QRat::from_poly(expect),
                    "{} a1^2 g={}",
                    parity,
                    g
                );
            }
        }
    }

    #[test]
    fn zero_weight_moment_splits_by_parity_at_genus_zero() {
        let one = AExpr::one();
        let odd = Engine::new(Parity::Odd);
        let even = Engine::new(Parity::Even);
        // q/(q^2-1) versus 1/q.
        assert_eq!(
            odd.a_value(0, &one).unwrap(),
            QRat::new(QPoly::q(), QPoly::from_int_coeffs(&[-1, 0, 1]))
        );
        assert_eq!(
            even.a_value(0, &one).unwrap(),
            QRat::new(QPoly::one(), QPoly::q())
        );
        // Agreement from genus one on: q^{2g-1}.
        for g in 1..6 {
            let expect = QRat::from_poly(QPoly::q_pow(2 * g as usize - 1));
            assert_eq!(odd.a_value(g, &one).unwrap(), expect);
            assert_eq!(even.a_value(g, &one).unwrap(), expect);
        }
    }

    #[test]
    fn odd_weight_moments_are_zero() {
        let engine = Engine::new(Parity::Odd);
        for expr in ["a1", "a1^3", "a1 a2", "a3 a2^2", "a5"] {
            let e = AExpr::parse(expr).unwrap();
            for g in 0..5 {
                assert_eq!(engine.a_value(g, &e).unwrap(), QRat::zero(), "{}", expr);
            }
        }
    }

    #[test]
    fn provider_agrees_with_recursion_where_both_apply() {
        // Tuples with four or five points are reachable at genus one by the
        // homogeneous recursion; with a full moment table the provider
        // route must coincide. Build the small table entries by combining
        // engine values, then compare.
        let engine = Engine::new(Parity::Odd);
        for s in ["(2^1,1^1,1^1)", "(2^1,2^1)", "(3^1,1^1)", "(1^1,1^1,1^1,1^1)"] {
            let tu = t(s);
            let expr = AExpr::new(tu.slots().iter().map(|&(n, _)| (n, 1)).collect());
            // Moment from the engine (recursion only).
            let moment = engine.a_value(1, &expr).unwrap();
            assert!(moment.is_polynomial(), "{}", s);
            let mut entries = BTreeMap::new();
            entries.insert(expr.clone(), moment.as_poly().unwrap().clone());
            let with_table =
                Engine::with_genus1(Parity::Odd, Arc::new(GenusOneTable::from_entries(entries)));
            let via_provider = with_table.genus1_provider(&tu).unwrap();
            assert_eq!(via_provider, engine.u_value(1, &tu).unwrap(), "{}", s);
        }
    }

    #[test]
    fn unsupported_without_table() {
        let engine = Engine::new(Parity::Odd);
        let tu = t("(6^1)");
        assert!(matches!(
            engine.u_value(1, &tu),
            Err(Error::Unsupported(_))
        ));
        // The recursion at higher genus reaches down through genus one, so
        // the gap honestly propagates instead of inventing a value.
        assert!(matches!(
            engine.u_value(2, &tu),
            Err(Error::Unsupported(_))
        ));
        // Genus zero and the base case stay reachable.
        assert!(engine.u_value(0, &tu).is_ok());
        assert!(engine.u_value(-1, &tu).is_ok());
    }

    #[test]
    fn fixed_points_match_expansion_at_small_cases() {
        let engine = Engine::new(Parity::Odd);
        // One cycle of length one at genus 2: (q+1) a0 - a1 moments give
        // q^4 + q^3.
        let fix = engine
            .fixed_point_value(2, &CycleType::new(vec![1]))
            .unwrap();
        assert_eq!(fix, qp(&[0, 0, 0, 1, 1]));
        // Two fixed points at genus 2.
        let fix = engine
            .fixed_point_value(2, &CycleType::new(vec![1, 1]))
            .unwrap();
        assert_eq!(fix, qp(&[-1, 0, 0, 0, 2, 1]));
        // A single 2-cycle at genus 2.
        let fix = engine
            .fixed_point_value(2, &CycleType::new(vec![2]))
            .unwrap();
        assert_eq!(fix, qp(&[-1, 0, 0, 0, 0, 1]));
    }

    #[test]
    fn character_transform_dimensions_and_sn_consistency() {
        let engine = Engine::new(Parity::Odd);
        let rows = engine.character_transform(2, 2).unwrap();
        assert_eq!(rows.len(), 2);
        // The two rows must sum to the fixed points of the identity divided
        // appropriately: trivial + sign = fix(id)/1 decomposition check:
        // P_(2) + P_(1,1) recombine to the symmetric and alternating parts.
        let total: QRat = rows.iter().fold(QRat::zero(), |acc, r| &acc + &r.value);
        // Symmetric plus alternating equals the 2-cycle-free average times 2
        // ... simply check against the direct fixed-point values.
        let fix_id = engine.fixed_point_value(2, &CycleType::new(vec![1, 1])).unwrap();
        let fix_swap = engine.fixed_point_value(2, &CycleType::new(vec![2])).unwrap();
        assert_eq!(total, fix_id);
        let diff: QRat = {
            let trivial = rows
                .iter()
                .find(|r| r.lambda.parts() == [2])
                .unwrap()
                .value
                .clone();
            let sign = rows
                .iter()
                .find(|r| r.lambda.parts() == [1, 1])
                .unwrap()
                .value
                .clone();
            &trivial - &sign
        };
        assert_eq!(diff, fix_swap);
    }

    #[test]
    fn closed_form_square_one_slot() {
        let engine = Engine::new(Parity::Odd);
        let form = engine.closed_form_u(&t("(1^2)")).unwrap();
        assert_eq!(form.geometric, QRat::one());
        assert_eq!(form.g_min, 0);
        for r in 0..form.period as usize {
            for c in &form.residue_polys[r] {
                assert!(c.is_zero());
            }
        }
    }

    #[test]
    fn closed_form_alternating_tuple() {
        let engine = Engine::new(Parity::Odd);
        let form = engine.closed_form_u(&t("(2^1)")).unwrap();
        assert!(form.geometric.is_zero());
        assert_eq!(form.period, 2);
        // The alternating law starts at genus zero; at genus -1 the value
        // is the orbit-count ratio instead.
        assert_eq!(form.g_min, 0);
        assert_eq!(form.eval(4), QRat::from_int(-1));
        assert_eq!(form.eval(7), QRat::from_int(1));
    }

    #[test]
    fn closed_form_triple_square_even_starts_at_zero() {
        // The even-characteristic sequence for three square slots matches
        // (q-1)(q^{2g+3} + g(q^2-1) - 3q - 2)/(q+1)^2 for g >= 0 but not at
        // g = -1, so back-extension must stop at zero.
        let engine = Engine::new(Parity::Even);
        let form = engine.closed_form_u(&t("(1^2,1^2,1^2)")).unwrap();
        assert_eq!(form.g_min, 0);
        for g in 0..8usize {
            let den = QPoly::from_int_coeffs(&[1, 1]).pow(2);
            let inner = {
                let lin = QPoly::from_int_coeffs(&[-1, 0, 1])
                    .scale(&BigRational::from_integer(BigInt::from(g as i64)));
                &(&QPoly::q_pow(2 * g + 3) + &lin) + &QPoly::from_int_coeffs(&[-2, -3])
            };
            let num = &QPoly::from_int_coeffs(&[-1, 1]) * &inner;
            assert_eq!(form.eval(g as i64), QRat::new(num, den), "g={}", g);
        }
    }

    #[test]
    fn closed_form_certification_catches_wrong_period() {
        // Fitting a period-1 model to an alternating sequence must fail
        // certification rather than return a wrong form.
        let engine = Engine::new(Parity::Odd);
        let shape = ModelShape {
            period: 1,
            degree_bound: 0,
            fit_start: 4,
        };
        let tu = t("(2^1)");
        let res = engine.fit_closed_form(|g| engine.u_value(g, &tu), shape);
        assert!(res.is_err());
    }
}
