//! The combinatorial calculus of moment decompositions.
//!
//! Curve-counting moments come in two flavours: power products of trace
//! sums (`a1^2 a2`-style expressions, [`AExpr`]) and power products of
//! signed orbit counts (`b1^2 c2`-style expressions, [`BCExpr`]). Both
//! decompose into integer combinations of primitive sums indexed by tuples
//! of degree/exponent slots ([`UTuple`]), and the whole engine works at the
//! level of those tuples.

mod decompose;
mod symmetric;

pub use decompose::{decompose_a, decompose_bc, genus0_reduce_to_even, genus0_step, set_partitions};
pub use symmetric::{character, class_size, fixed_point_terms, partitions, z_order};

use crate::arith::{divisors, moebius};
use crate::symq::{QPoly, QRat};
use crate::{Error, Result};
use num::rational::BigRational;
use num::traits::Zero;
use std::collections::BTreeMap;
use std::fmt;

/// A tuple of slots `(n, r)`: a degree-`n` place taken to the `r`-th power,
/// with `r` reduced to 1 or 2 (higher powers reduce by parity). Slots are
/// kept sorted descending, matching the usual display order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UTuple {
    slots: Vec<(u32, u8)>,
}

impl UTuple {
    pub fn new(mut slots: Vec<(u32, u8)>) -> UTuple {
        for &(n, r) in &slots {
            assert!(n >= 1, "slot degree must be positive");
            assert!(r == 1 || r == 2, "slot exponent must be 1 or 2");
        }
        slots.sort_unstable_by(|a, b| b.cmp(a));
        UTuple { slots }
    }

    pub fn empty() -> UTuple {
        UTuple { slots: Vec::new() }
    }

    pub fn slots(&self) -> &[(u32, u8)] {
        &self.slots
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    /// Total degree `sum n_i r_i`; the tuple's primitive sum vanishes when
    /// this is odd.
    pub fn weight(&self) -> u32 {
        self.slots.iter().map(|&(n, r)| n * r as u32).sum()
    }

    /// Number of marked points `sum n_i` the tuple talks about.
    pub fn points(&self) -> u32 {
        self.slots.iter().map(|&(n, _)| n).sum()
    }

    /// True when every exponent is 2 (the homogeneous case of the genus
    /// recursion).
    pub fn all_even(&self) -> bool {
        self.slots.iter().all(|&(_, r)| r == 2)
    }

    /// Replaces slot `idx` with exponent bumped by `delta`, reducing the
    /// result to 1 or 2 by parity.
    pub fn with_bumped_exponent(&self, idx: usize, delta: u8) -> UTuple {
        let mut slots = self.slots.clone();
        let (_, r) = &mut slots[idx];
        *r = reduce_exponent(*r as u32 + delta as u32);
        UTuple::new(slots)
    }

    pub fn without_slot(&self, idx: usize) -> UTuple {
        let mut slots = self.slots.clone();
        slots.remove(idx);
        UTuple::new(slots)
    }

    pub fn with_extra_slot(&self, n: u32, r: u8) -> UTuple {
        let mut slots = self.slots.clone();
        slots.push((n, r));
        UTuple::new(slots)
    }

    pub fn parse(s: &str) -> Result<UTuple> {
        let inner = s.trim();
        let inner = inner
            .strip_prefix('(')
            .and_then(|t| t.strip_suffix(')'))
            .unwrap_or(inner);
        let inner = inner.trim();
        if inner.is_empty() {
            return Ok(UTuple::empty());
        }
        let mut slots = Vec::new();
        for part in inner.split(',') {
            let part = part.trim();
            let (n_str, r_str) = match part.split_once('^') {
                Some((n, r)) => (n, r),
                None => (part, "1"),
            };
            let n: u32 = n_str
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad slot degree in {:?}", part)))?;
            let r: u32 = r_str
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad slot exponent in {:?}", part)))?;
            if n == 0 || r == 0 {
                return Err(Error::Parse(format!(
                    "slot degree and exponent must be positive in {:?}",
                    part
                )));
            }
            slots.push((n, reduce_exponent(r)));
        }
        Ok(UTuple::new(slots))
    }
}

/// Reduces an exponent to its parity representative in `{1, 2}`.
pub fn reduce_exponent(r: u32) -> u8 {
    debug_assert!(r >= 1);
    if r % 2 == 0 {
        2
    } else {
        1
    }
}

impl PartialOrd for UTuple {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for UTuple {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.slots.cmp(&other.slots)
    }
}

impl fmt::Display for UTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, &(n, r)) in self.slots.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}^{}", n, r)?;
        }
        write!(f, ")")
    }
}

/// A product of trace-sum powers `a_{N_1}^{R_1} ... a_{N_m}^{R_m}`,
/// canonically sorted by `N`. The empty product is written `a0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AExpr {
    factors: Vec<(u32, u32)>,
}

impl AExpr {
    pub fn new(factors: Vec<(u32, u32)>) -> AExpr {
        let mut merged: BTreeMap<u32, u32> = BTreeMap::new();
        for (n, r) in factors {
            assert!(n >= 1 && r >= 1);
            *merged.entry(n).or_insert(0) += r;
        }
        AExpr {
            factors: merged.into_iter().collect(),
        }
    }

    pub fn one() -> AExpr {
        AExpr {
            factors: Vec::new(),
        }
    }

    pub fn factors(&self) -> &[(u32, u32)] {
        &self.factors
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn weight(&self) -> u32 {
        self.factors.iter().map(|&(n, r)| n * r).sum()
    }

    /// Total number of trace factors `sum R_i`.
    pub fn total_power(&self) -> u32 {
        self.factors.iter().map(|&(_, r)| r).sum()
    }

    /// The tuple in which every trace factor sits at its own place: `R_i`
    /// slots of degree `N_i` with exponent one. Its coefficient in the
    /// decomposition is `(-1)^{sum R_i}`.
    pub fn general_case(&self) -> UTuple {
        let mut slots = Vec::new();
        for &(n, r) in &self.factors {
            for _ in 0..r {
                slots.push((n, 1));
            }
        }
        UTuple::new(slots)
    }

    pub fn parse(s: &str) -> Result<AExpr> {
        let mut factors = Vec::new();
        let mut saw_empty = false;
        for token in s.split(|c: char| c.is_whitespace() || c == '*') {
            if token.is_empty() {
                continue;
            }
            let (n, r) = parse_indexed_power(token, 'a')?;
            if n == 0 {
                if r != 1 {
                    return Err(Error::Parse(format!("a0 takes no power: {:?}", s)));
                }
                saw_empty = true;
                continue;
            }
            factors.push((n, r));
        }
        if saw_empty && !factors.is_empty() {
            return Err(Error::Parse(format!(
                "a0 denotes the empty product and cannot be combined: {:?}",
                s
            )));
        }
        Ok(AExpr::new(factors))
    }
}

impl fmt::Display for AExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "a0");
        }
        for (i, &(n, r)) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            if r == 1 {
                write!(f, "a{}", n)?;
            } else {
                write!(f, "a{}^{}", n, r)?;
            }
        }
        Ok(())
    }
}

fn parse_indexed_power(token: &str, letter: char) -> Result<(u32, u32)> {
    let rest = token
        .strip_prefix(letter)
        .ok_or_else(|| Error::Parse(format!("expected {}<degree>[^power], got {:?}", letter, token)))?;
    let rest = rest.strip_prefix('_').unwrap_or(rest);
    let (n_str, r_str) = match rest.split_once('^') {
        Some((n, r)) => (n, r),
        None => (rest, "1"),
    };
    let n = n_str
        .parse()
        .map_err(|_| Error::Parse(format!("bad degree in {:?}", token)))?;
    let r = r_str
        .parse()
        .map_err(|_| Error::Parse(format!("bad power in {:?}", token)))?;
    if r == 0 {
        return Err(Error::Parse(format!("zero power in {:?}", token)));
    }
    Ok((n, r))
}

/// A product of signed-orbit-count powers `b_{i}^{s} ... c_{j}^{t}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BCExpr {
    /// `b`-factors `(degree, power)`, sorted by degree.
    pub b: Vec<(u32, u32)>,
    /// `c`-factors `(degree, power)`, sorted by degree.
    pub c: Vec<(u32, u32)>,
}

impl BCExpr {
    pub fn new(b: Vec<(u32, u32)>, c: Vec<(u32, u32)>) -> BCExpr {
        let merge = |v: Vec<(u32, u32)>| {
            let mut m: BTreeMap<u32, u32> = BTreeMap::new();
            for (n, r) in v {
                assert!(n >= 1 && r >= 1);
                *m.entry(n).or_insert(0) += r;
            }
            m.into_iter().collect()
        };
        BCExpr {
            b: merge(b),
            c: merge(c),
        }
    }

    pub fn weight(&self) -> u32 {
        self.b
            .iter()
            .chain(&self.c)
            .map(|&(n, r)| n * r)
            .sum()
    }

    pub fn parse(s: &str) -> Result<BCExpr> {
        let mut b = Vec::new();
        let mut c = Vec::new();
        for token in s.split(|ch: char| ch.is_whitespace() || ch == '*') {
            if token.is_empty() {
                continue;
            }
            if token.starts_with('b') {
                b.push(parse_indexed_power(token, 'b')?);
            } else if token.starts_with('c') {
                c.push(parse_indexed_power(token, 'c')?);
            } else {
                return Err(Error::Parse(format!(
                    "expected b<degree>[^power] or c<degree>[^power], got {:?}",
                    token
                )));
            }
        }
        if b.iter().chain(&c).any(|&(n, _)| n == 0) {
            return Err(Error::Parse(format!("zero degree in {:?}", s)));
        }
        Ok(BCExpr::new(b, c))
    }
}

impl fmt::Display for BCExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (letter, list) in [('b', &self.b), ('c', &self.c)] {
            for &(n, r) in list {
                if !first {
                    write!(f, " ")?;
                }
                first = false;
                if r == 1 {
                    write!(f, "{}{}", letter, n)?;
                } else {
                    write!(f, "{}{}^{}", letter, n, r)?;
                }
            }
        }
        if first {
            write!(f, "1")?;
        }
        Ok(())
    }
}

/// A finite rational linear combination of tuples.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ULinComb {
    terms: BTreeMap<UTuple, BigRational>,
}

impl ULinComb {
    pub fn new() -> ULinComb {
        ULinComb {
            terms: BTreeMap::new(),
        }
    }

    pub fn add_term(&mut self, t: UTuple, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(t).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            // Re-borrow to remove: find the key that just cancelled.
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn add_scaled(&mut self, other: &ULinComb, scale: &BigRational) {
        for (t, c) in &other.terms {
            self.add_term(t.clone(), c * scale);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&UTuple, &BigRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, t: &UTuple) -> BigRational {
        self.terms.get(t).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn pop_last(&mut self) -> Option<(UTuple, BigRational)> {
        let key = self.terms.keys().next_back()?.clone();
        let val = self.terms.remove(&key).unwrap();
        Some((key, val))
    }

    /// Drops every tuple of odd weight; their primitive sums vanish
    /// identically over the full curve family.
    pub fn drop_odd_weight(&mut self) {
        self.terms.retain(|t, _| t.weight() % 2 == 0);
    }
}

impl fmt::Display for ULinComb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (t, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({})*{}", c, t)?;
        }
        Ok(())
    }
}

/// Number of points of the projective line with exact degree `d`, as a
/// polynomial in `q`: the Moebius transform of `q^e + 1`.
pub fn exact_degree_point_count(d: u32) -> QPoly {
    let mut acc = QPoly::zero();
    for e in divisors(d as u64) {
        let mu = moebius(d as u64 / e);
        if mu != 0 {
            let term = &QPoly::q_pow(e as usize) + &QPoly::from_int(1);
            acc = &acc + &term.scale(&crate::symq::br(mu));
        }
    }
    acc
}

/// Number of ways to pick, slot by slot, a point of exact degree `n_i`
/// whose Frobenius orbit avoids all earlier same-degree choices.
pub fn orbit_count_poly(t: &UTuple) -> QPoly {
    let mut acc = QPoly::one();
    for (i, &(n, _)) in t.slots().iter().enumerate() {
        let earlier = t.slots()[..i].iter().filter(|&&(m, _)| m == n).count();
        let factor = &exact_degree_point_count(n)
            - &QPoly::from_int((n as i64) * (earlier as i64));
        acc = &acc * &factor;
    }
    acc
}

/// The genus `-1` seed value: the orbit-choice count divided by the order
/// of the rational automorphism group factor `q^3 - q`.
pub fn j_value(t: &UTuple) -> QRat {
    let group = &QPoly::q_pow(3) - &QPoly::q();
    &QRat::from_poly(orbit_count_poly(t)) / &QRat::from_poly(group)
}

/// The inclusion-exclusion count `sum_{S} (-1)^{|S|} q^{j - |S|-degree}`
/// over slot subsets with total degree at most `j`.
pub fn b_poly(t: &UTuple, j: i64) -> QPoly {
    if j < 0 {
        return QPoly::zero();
    }
    let degs: Vec<i64> = t.slots().iter().map(|&(n, _)| n as i64).collect();
    let mut acc = QPoly::zero();
    for mask in 0..(1u64 << degs.len()) {
        let total: i64 = degs
            .iter()
            .enumerate()
            .filter(|&(i, _)| mask >> i & 1 == 1)
            .map(|(_, &d)| d)
            .sum();
        if total <= j {
            let sign = if mask.count_ones() % 2 == 0 { 1 } else { -1 };
            let term = QPoly::q_pow((j - total) as usize).scale(&crate::symq::br(sign));
            acc = &acc + &term;
        }
    }
    acc
}

/// Partial sum `bhat_j = sum_{i <= j} b_i`, with `bhat_{-1} = 0`.
pub fn bhat_poly(t: &UTuple, j: i64) -> QPoly {
    let mut acc = QPoly::zero();
    for i in 0..=j {
        acc = &acc + &b_poly(t, i);
    }
    acc
}

/// The product `prod_i (q^{n_i} - 1)` over all slots; equals `b_n` at
/// `j = sum n_i`.
pub fn full_b_product(t: &UTuple) -> QPoly {
    let mut acc = QPoly::one();
    for &(n, _) in t.slots() {
        acc = &acc * &(&QPoly::q_pow(n as usize) - &QPoly::one());
    }
    acc
}

/// Characteristic polynomial of the genus recursion for a tuple:
/// `prod_i (x^{n_i} - 1) / (x - 1)`, with `x` standing for the shift.
pub fn char_poly_tuple(t: &UTuple) -> QPoly {
    let mut acc = QPoly::one();
    for &(n, _) in t.slots() {
        acc = &acc * &(&QPoly::q_pow(n as usize) - &QPoly::one());
    }
    let denom = &QPoly::q() - &QPoly::one();
    acc.exact_div(&denom).expect("x - 1 divides the product")
}

/// Characteristic polynomial governing a full moment expression:
/// `prod_i (x^{N_i} - 1)^{R_i} / (x - 1)`.
pub fn char_poly_aexpr(e: &AExpr) -> QPoly {
    let mut acc = QPoly::one();
    for &(n, r) in e.factors() {
        let factor = &QPoly::q_pow(n as usize) - &QPoly::one();
        acc = &acc * &factor.pow(r);
    }
    let denom = &QPoly::q() - &QPoly::one();
    acc.exact_div(&denom).expect("x - 1 divides the product")
}

/// A cycle type: a partition of `n`, parts descending.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CycleType {
    parts: Vec<u32>,
}

impl CycleType {
    pub fn new(mut parts: Vec<u32>) -> CycleType {
        assert!(parts.iter().all(|&p| p >= 1));
        parts.sort_unstable_by(|a, b| b.cmp(a));
        CycleType { parts }
    }

    pub fn empty() -> CycleType {
        CycleType { parts: Vec::new() }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn n(&self) -> u32 {
        self.parts.iter().sum()
    }

    /// Part multiplicities `(part, count)`, ascending by part.
    pub fn counts(&self) -> Vec<(u32, u32)> {
        let mut m: BTreeMap<u32, u32> = BTreeMap::new();
        for &p in &self.parts {
            *m.entry(p).or_insert(0) += 1;
        }
        m.into_iter().collect()
    }

    pub fn parse(s: &str) -> Result<CycleType> {
        let inner = s.trim();
        let inner = inner
            .strip_prefix('(')
            .and_then(|t| t.strip_suffix(')'))
            .or_else(|| inner.strip_prefix('[').and_then(|t| t.strip_suffix(']')))
            .unwrap_or(inner);
        let inner = inner.trim();
        if inner.is_empty() {
            return Ok(CycleType::empty());
        }
        let mut parts = Vec::new();
        for tok in inner.split(',') {
            let tok = tok.trim();
            let (base, count) = match tok.split_once('^') {
                Some((b, c)) => (
                    b.trim(),
                    c.trim()
                        .parse::<u32>()
                        .map_err(|_| Error::Parse(format!("bad multiplicity in {:?}", tok)))?,
                ),
                None => (tok, 1),
            };
            let p: u32 = base
                .parse()
                .map_err(|_| Error::Parse(format!("bad cycle length in {:?}", tok)))?;
            if p == 0 || count == 0 {
                return Err(Error::Parse(format!(
                    "cycle lengths and multiplicities must be positive in {:?}",
                    tok
                )));
            }
            for _ in 0..count {
                parts.push(p);
            }
        }
        Ok(CycleType::new(parts))
    }
}

impl fmt::Display for CycleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", p)?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symq::br;

    #[test]
    fn tuple_parsing_and_display() {
        let t = UTuple::parse("(6^1,3^2,1^2)").unwrap();
        assert_eq!(t.slots(), &[(6, 1), (3, 2), (1, 2)]);
        assert_eq!(t.to_string(), "(6^1,3^2,1^2)");
        // Default exponent is 1; order is normalized.
        let t = UTuple::parse("1^2, 2").unwrap();
        assert_eq!(t.to_string(), "(2^1,1^2)");
        // Exponents reduce by parity.
        let t = UTuple::parse("(3^4,2^5)").unwrap();
        assert_eq!(t.to_string(), "(3^2,2^1)");
        assert_eq!(UTuple::parse("()").unwrap(), UTuple::empty());
        assert!(UTuple::parse("(0^1)").is_err());
        assert!(UTuple::parse("(2^0)").is_err());
        assert!(UTuple::parse("(x)").is_err());
    }

    #[test]
    fn tuple_weight_points_parity() {
        let t = UTuple::parse("(2^1,1^2,1^1)").unwrap();
        assert_eq!(t.weight(), 5);
        assert_eq!(t.points(), 4);
        assert!(!t.all_even());
        let t = UTuple::parse("(3^2,1^2)").unwrap();
        assert_eq!(t.weight(), 8);
        assert!(t.all_even());
        assert_eq!(UTuple::empty().weight(), 0);
        assert!(UTuple::empty().all_even());
    }

    #[test]
    fn aexpr_parsing_and_general_case() {
        let e = AExpr::parse("a1^4 a2").unwrap();
        assert_eq!(e.factors(), &[(1, 4), (2, 1)]);
        assert_eq!(e.weight(), 6);
        assert_eq!(e.total_power(), 5);
        assert_eq!(e.to_string(), "a1^4 a2");
        assert_eq!(
            e.general_case(),
            UTuple::parse("(2^1,1^1,1^1,1^1,1^1)").unwrap()
        );
        assert_eq!(AExpr::parse("a0").unwrap(), AExpr::one());
        assert_eq!(AExpr::parse("a_2 a_1").unwrap().to_string(), "a1 a2");
        assert_eq!(AExpr::parse("a1*a1").unwrap().to_string(), "a1^2");
        assert!(AExpr::parse("a0 a1").is_err());
        assert!(AExpr::parse("b1").is_err());
    }

    #[test]
    fn bcexpr_parsing() {
        let e = BCExpr::parse("b1^2 c2").unwrap();
        assert_eq!(e.b, vec![(1, 2)]);
        assert_eq!(e.c, vec![(2, 1)]);
        assert_eq!(e.weight(), 4);
        assert_eq!(e.to_string(), "b1^2 c2");
        assert!(BCExpr::parse("a1").is_err());
        assert!(BCExpr::parse("b0").is_err());
    }

    #[test]
    fn exact_degree_counts() {
        // Degree 1: q + 1; degree 2: q^2 - q; degree 6 has the full
        // Moebius alternation.
        assert_eq!(exact_degree_point_count(1), QPoly::from_int_coeffs(&[1, 1]));
        assert_eq!(
            exact_degree_point_count(2),
            QPoly::from_int_coeffs(&[0, -1, 1])
        );
        assert_eq!(
            exact_degree_point_count(6),
            QPoly::from_int_coeffs(&[0, 1, -1, -1, 0, 0, 1])
        );
    }

    #[test]
    fn orbit_counts_match_small_fields() {
        // Cross-checked against direct point enumeration in the field tests.
        let t = UTuple::parse("(1^1,1^1)").unwrap();
        assert_eq!(orbit_count_poly(&t).eval_int(3), br(12));
        let t = UTuple::parse("(2^1)").unwrap();
        assert_eq!(orbit_count_poly(&t).eval_int(3), br(6));
        let t = UTuple::parse("(2^1,2^2)").unwrap();
        // 6 choices for the first degree-2 point, 4 for the second.
        assert_eq!(orbit_count_poly(&t).eval_int(3), br(24));
    }

    #[test]
    fn j_values_match_known_seeds() {
        // Weight-2 tuples.
        let j = j_value(&UTuple::parse("(2^1)").unwrap());
        assert_eq!(j, QRat::new(QPoly::one(), QPoly::from_int_coeffs(&[1, 1])));
        // One rational point: (q+1)/(q^3-q) = 1/(q^2-q).
        assert_eq!(
            j_value(&UTuple::parse("(1^2)").unwrap()),
            QRat::new(QPoly::one(), QPoly::from_int_coeffs(&[0, -1, 1]))
        );
        // Weight 6.
        assert_eq!(
            j_value(&UTuple::parse("(6^1)").unwrap()),
            QRat::from_poly(QPoly::from_int_coeffs(&[-1, 1, 0, 1]))
        );
        assert_eq!(
            j_value(&UTuple::parse("(1^2,1^2,1^2)").unwrap()),
            QRat::one()
        );
        assert_eq!(
            j_value(&UTuple::parse("(2^1,1^1,1^1)").unwrap()),
            QRat::from_poly(QPoly::q())
        );
    }

    #[test]
    fn b_polys_inclusion_exclusion() {
        // Tuple (2,1,1): degrees {2,1,1}.
        let t = UTuple::parse("(2^1,1^1,1^1)").unwrap();
        // b_0 = 1 (empty subset only).
        assert_eq!(b_poly(&t, 0), QPoly::one());
        // b_1 = q - 2 (two singleton degree-1 subsets).
        assert_eq!(b_poly(&t, 1), QPoly::from_int_coeffs(&[-2, 1]));
        // At j = n every subset participates and the sum telescopes into
        // the product (q^2-1)(q-1)^2.
        assert_eq!(b_poly(&t, 4), full_b_product(&t));
        assert_eq!(bhat_poly(&t, -1), QPoly::zero());
        assert_eq!(bhat_poly(&t, 1), &QPoly::one() + &b_poly(&t, 1));
    }

    #[test]
    fn bhat_tail_stabilizes() {
        // For j >= n - 1 the partial sums grow geometrically:
        // bhat_j = q^{j+1-n} bhat_{n-1}.
        for spec in ["(2^1,1^1,1^1)", "(3^2)", "(2^1,1^2)", "(1^2,1^2,1^2)"] {
            let t = UTuple::parse(spec).unwrap();
            let n = t.points() as i64;
            let base = bhat_poly(&t, n - 1);
            for j in n - 1..=n + 3 {
                let expect = base.shift_up((j + 1 - n) as usize);
                assert_eq!(bhat_poly(&t, j), expect, "tuple {} at j={}", spec, j);
            }
        }
    }

    #[test]
    fn bhat_difference_recovers_product_coefficients() {
        // bhat_j - q bhat_{j-1} is the coefficient of q^{n-1-j} in
        // b_n / (q-1).
        for spec in ["(2^1,1^1,1^1)", "(6^1)", "(2^1,1^2)", "(1^2,1^2,1^2)"] {
            let t = UTuple::parse(spec).unwrap();
            let n = t.points() as i64;
            let quotient = full_b_product(&t)
                .exact_div(&QPoly::from_int_coeffs(&[-1, 1]))
                .unwrap();
            for j in 0..=n - 1 {
                let diff = &bhat_poly(&t, j) - &bhat_poly(&t, j - 1).shift_up(1);
                let expect = quotient.coeff((n - 1 - j) as usize);
                assert_eq!(
                    diff,
                    QPoly::constant(expect),
                    "tuple {} at j={}",
                    spec,
                    j
                );
            }
        }
    }

    #[test]
    fn characteristic_polynomials() {
        // a1^4 a2 gives (x-1)^4 (x^2-1) / (x-1) = (x-1)^3 (x+1)(x-1)...
        let e = AExpr::parse("a1^4 a2").unwrap();
        let cp = char_poly_aexpr(&e);
        // (x-1)^4(x^2-1)/(x-1) = (x-1)^4 (x+1).
        let expect = {
            let xm1 = QPoly::from_int_coeffs(&[-1, 1]);
            let xp1 = QPoly::from_int_coeffs(&[1, 1]);
            &xm1.pow(4) * &xp1
        };
        assert_eq!(cp, expect);
        // Tuple (6^1): (x^6-1)/(x-1) = x^5+x^4+x^3+x^2+x+1.
        let t = UTuple::parse("(6^1)").unwrap();
        assert_eq!(
            char_poly_tuple(&t),
            QPoly::from_int_coeffs(&[1, 1, 1, 1, 1, 1])
        );
        // (2,1,1): (x^2-1)(x-1) = x^3 - x^2 - x + 1.
        let t = UTuple::parse("(2^1,1^1,1^1)").unwrap();
        assert_eq!(
            char_poly_tuple(&t),
            QPoly::from_int_coeffs(&[1, -1, -1, 1])
        );
    }

    #[test]
    fn cycle_type_parsing() {
        let c = CycleType::parse("2,1,1").unwrap();
        assert_eq!(c.parts(), &[2, 1, 1]);
        assert_eq!(c.n(), 4);
        assert_eq!(c.counts(), vec![(1, 2), (2, 1)]);
        assert_eq!(c.to_string(), "(2,1,1)");
        assert_eq!(
            CycleType::parse("(1^3,2)").unwrap(),
            CycleType::new(vec![2, 1, 1, 1])
        );
        assert_eq!(CycleType::parse("[3,3]").unwrap().n(), 6);
        assert!(CycleType::parse("0,1").is_err());
    }

    #[test]
    fn ulincomb_accumulates_and_cancels() {
        let mut lc = ULinComb::new();
        let t = UTuple::parse("(1^2)").unwrap();
        lc.add_term(t.clone(), br(3));
        lc.add_term(t.clone(), br(-3));
        assert!(lc.is_empty());
        lc.add_term(t.clone(), br(2));
        let mut other = ULinComb::new();
        other.add_term(t.clone(), br(1));
        lc.add_scaled(&other, &br(5));
        assert_eq!(lc.coeff(&t), br(7));
    }
}
