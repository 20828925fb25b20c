//! Symmetric-group bookkeeping: partitions, conjugacy-class data,
//! irreducible characters, and the expansion of a permutation's
//! fixed-point count on pointed curves into trace moments.

use super::{AExpr, CycleType};
use crate::arith::{divisors, moebius};
use crate::symq::QPoly;
use std::collections::BTreeMap;

/// All partitions of `n` in descending lexicographic order.
pub fn partitions(n: u32) -> Vec<CycleType> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn rec(remaining: u32, max_part: u32, current: &mut Vec<u32>, out: &mut Vec<CycleType>) {
        if remaining == 0 {
            out.push(CycleType::new(current.clone()));
            return;
        }
        for part in (1..=remaining.min(max_part)).rev() {
            current.push(part);
            rec(remaining - part, part, current, out);
            current.pop();
        }
    }
    rec(n, n, &mut current, &mut out);
    out
}

/// Order of the centralizer of a permutation with the given cycle type:
/// `prod_k k^{m_k} m_k!`.
pub fn z_order(mu: &CycleType) -> u64 {
    let mut z = 1u64;
    for (part, count) in mu.counts() {
        z *= (part as u64).pow(count);
        for i in 1..=count as u64 {
            z *= i;
        }
    }
    z
}

/// Size of the conjugacy class with cycle type `mu` in `S_n`.
pub fn class_size(mu: &CycleType) -> u64 {
    factorial(mu.n() as u64) / z_order(mu)
}

fn factorial(n: u64) -> u64 {
    (1..=n).product()
}

/// Irreducible character of `S_n`: value of the character indexed by
/// `lambda` on the class of cycle type `mu`, by the border-strip
/// (Murnaghan-Nakayama) recursion on beta-numbers.
pub fn character(lambda: &CycleType, mu: &CycleType) -> i64 {
    assert_eq!(lambda.n(), mu.n(), "partition sizes must agree");
    // Beta-numbers: strictly decreasing first-column hook lengths.
    let parts = lambda.parts();
    let k = parts.len();
    let beta: Vec<u32> = parts
        .iter()
        .enumerate()
        .map(|(i, &p)| p + (k - 1 - i) as u32)
        .collect();
    mn(&beta, mu.parts())
}

fn mn(beta: &[u32], mu: &[u32]) -> i64 {
    let Some((&strip, rest)) = mu.split_first() else {
        return 1;
    };
    let mut total = 0i64;
    for (i, &b) in beta.iter().enumerate() {
        if b < strip {
            continue;
        }
        let target = b - strip;
        if beta.contains(&target) {
            continue;
        }
        // Height of the removed strip: the number of beta-numbers strictly
        // between the old and new values.
        let crossings = beta
            .iter()
            .filter(|&&x| x < b && x > target)
            .count();
        let sign = if crossings % 2 == 0 { 1 } else { -1 };
        let mut next: Vec<u32> = beta.to_vec();
        next[i] = target;
        next.sort_unstable_by(|a, b| b.cmp(a));
        // Normalize away a trailing run of 0,1,2,.. only implicitly: the
        // beta-representation with fixed length stays valid as long as the
        // entries are distinct, which the check above guarantees.
        total += sign * mn(&next, rest);
    }
    total
}

/// Expands the number of fixed points of a permutation of cycle type `mu`
/// acting on point configurations of a single curve into trace moments.
///
/// For each cycle of length `N`, the marked orbits it can fix are counted
/// by the Moebius-transformed point count of the curve over the degree-`N`
/// extension, with already-used orbits excluded; expanding the product
/// turns the count into `sum coeff(q) * a-monomial`.
pub fn fixed_point_terms(mu: &CycleType) -> Vec<(AExpr, QPoly)> {
    // Polynomial in the abstract variables atilde_N, N a part of mu.
    // Key: list of (N, power); value: coefficient polynomial in q.
    type TildePoly = BTreeMap<Vec<(u32, u32)>, QPoly>;
    let mut acc: TildePoly = BTreeMap::new();
    acc.insert(Vec::new(), QPoly::one());

    for (part, count) in mu.counts() {
        let pi = super::exact_degree_point_count(part);
        for j in 0..count {
            // Multiply by (pi(N) - j*N - atilde_N).
            let constant = &pi - &QPoly::from_int((j as i64) * (part as i64));
            let mut next: TildePoly = BTreeMap::new();
            for (mono, coeff) in &acc {
                // Constant branch.
                let entry = next.entry(mono.clone()).or_insert_with(QPoly::zero);
                *entry = &*entry + &(coeff * &constant);
                // -atilde_N branch.
                let mut bumped: BTreeMap<u32, u32> = mono.iter().copied().collect();
                *bumped.entry(part).or_insert(0) += 1;
                let bumped: Vec<(u32, u32)> = bumped.into_iter().collect();
                let entry = next.entry(bumped).or_insert_with(QPoly::zero);
                *entry = &*entry - coeff;
            }
            next.retain(|_, c| !c.is_zero());
            acc = next;
        }
    }

    // Substitute atilde_N = sum_{d | N} moebius(N/d) a_d and expand.
    let mut final_terms: BTreeMap<AExpr, QPoly> = BTreeMap::new();
    for (mono, coeff) in acc {
        // Expand each atilde power into a-monomials with integer weights.
        let mut expansion: BTreeMap<BTreeMap<u32, u32>, i64> = BTreeMap::new();
        expansion.insert(BTreeMap::new(), 1);
        for (n, power) in mono {
            let options: Vec<(u32, i64)> = divisors(n as u64)
                .into_iter()
                .map(|d| (d as u32, moebius(n as u64 / d)))
                .filter(|&(_, m)| m != 0)
                .collect();
            for _ in 0..power {
                let mut next: BTreeMap<BTreeMap<u32, u32>, i64> = BTreeMap::new();
                for (amono, w) in &expansion {
                    for &(d, m) in &options {
                        let mut bumped = amono.clone();
                        *bumped.entry(d).or_insert(0) += 1;
                        *next.entry(bumped).or_insert(0) += w * m;
                    }
                }
                expansion = next;
            }
        }
        for (amono, w) in expansion {
            if w == 0 {
                continue;
            }
            let expr = AExpr::new(amono.into_iter().collect());
            let entry = final_terms.entry(expr).or_insert_with(QPoly::zero);
            *entry = &*entry + &coeff.scale(&crate::symq::br(w));
        }
    }
    final_terms.retain(|_, c| !c.is_zero());
    final_terms.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symq::QPoly;

    fn ct(parts: &[u32]) -> CycleType {
        CycleType::new(parts.to_vec())
    }

    #[test]
    fn partition_counts() {
        let counts = [1usize, 1, 2, 3, 5, 7, 11, 15];
        for (n, &c) in counts.iter().enumerate() {
            assert_eq!(partitions(n as u32).len(), c, "n = {}", n);
        }
    }

    #[test]
    fn class_data() {
        assert_eq!(z_order(&ct(&[1, 1, 1])), 6);
        assert_eq!(class_size(&ct(&[1, 1, 1])), 1);
        assert_eq!(class_size(&ct(&[2, 1])), 3);
        assert_eq!(class_size(&ct(&[3])), 2);
        assert_eq!(class_size(&ct(&[2, 2])), 3);
        // Class sizes over S_n sum to n!.
        for n in 1..=7u32 {
            let total: u64 = partitions(n).iter().map(class_size).sum();
            assert_eq!(total, factorial(n as u64));
        }
    }

    #[test]
    fn characters_of_s3() {
        let triv = ct(&[3]);
        let std = ct(&[2, 1]);
        let sgn = ct(&[1, 1, 1]);
        let classes = [ct(&[1, 1, 1]), ct(&[2, 1]), ct(&[3])];
        let expect = [
            (triv, [1, 1, 1]),
            (std, [2, 0, -1]),
            (sgn, [1, -1, 1]),
        ];
        for (lambda, values) in expect {
            for (class, v) in classes.iter().zip(values) {
                assert_eq!(character(&lambda, class), v, "{} at {}", lambda, class);
            }
        }
    }

    #[test]
    fn characters_of_s4_spot_values() {
        assert_eq!(character(&ct(&[2, 2]), &ct(&[2, 2])), 2);
        assert_eq!(character(&ct(&[2, 2]), &ct(&[1, 1, 1, 1])), 2);
        assert_eq!(character(&ct(&[3, 1]), &ct(&[4])), -1);
        assert_eq!(character(&ct(&[3, 1]), &ct(&[2, 2])), -1);
        assert_eq!(character(&ct(&[2, 1, 1]), &ct(&[2, 1, 1])), -1);
    }

    #[test]
    fn dimensions_match_hook_lengths() {
        for n in 1..=7u32 {
            let id = CycleType::new(vec![1; n as usize]);
            for lambda in partitions(n) {
                let dim = character(&lambda, &id);
                assert_eq!(dim as u64, hook_dimension(&lambda), "{}", lambda);
            }
        }
    }

    fn hook_dimension(lambda: &CycleType) -> u64 {
        let parts = lambda.parts();
        let n = lambda.n() as u64;
        let mut hooks = 1u64;
        for (i, &p) in parts.iter().enumerate() {
            for j in 0..p {
                let arm = p - 1 - j;
                let leg = parts[i + 1..].iter().filter(|&&r| r > j).count() as u32;
                hooks *= (arm + leg + 1) as u64;
            }
        }
        factorial(n) / hooks
    }

    #[test]
    fn character_orthogonality() {
        // Rows: sum_mu |C_mu| chi_l(mu) chi_m(mu) = n! delta_{lm}.
        for n in 1..=7u32 {
            let parts = partitions(n);
            for l in &parts {
                for m in &parts {
                    let sum: i64 = parts
                        .iter()
                        .map(|mu| {
                            class_size(mu) as i64 * character(l, mu) * character(m, mu)
                        })
                        .sum();
                    let expect = if l == m { factorial(n as u64) as i64 } else { 0 };
                    assert_eq!(sum, expect, "n={} l={} m={}", n, l, m);
                }
            }
        }
    }

    #[test]
    fn fixed_point_terms_for_single_cycles() {
        // A 1-cycle: (q + 1) - a1.
        let terms = fixed_point_terms(&ct(&[1]));
        assert_eq!(
            terms,
            vec![
                (AExpr::one(), QPoly::from_int_coeffs(&[1, 1])),
                (AExpr::parse("a1").unwrap(), QPoly::from_int(-1)),
            ]
        );
        // A 2-cycle: (q^2 - q) - a2 + a1.
        let terms = fixed_point_terms(&ct(&[2]));
        assert_eq!(
            terms,
            vec![
                (AExpr::one(), QPoly::from_int_coeffs(&[0, -1, 1])),
                (AExpr::parse("a1").unwrap(), QPoly::from_int(1)),
                (AExpr::parse("a2").unwrap(), QPoly::from_int(-1)),
            ]
        );
    }

    #[test]
    fn fixed_point_terms_for_two_fixed_points() {
        // Two 1-cycles: (q + 1 - a1)(q - a1) expands to
        // q^2 + q - (2q + 1) a1 + a1^2.
        let terms = fixed_point_terms(&ct(&[1, 1]));
        assert_eq!(
            terms,
            vec![
                (AExpr::one(), QPoly::from_int_coeffs(&[0, 1, 1])),
                (AExpr::parse("a1").unwrap(), QPoly::from_int_coeffs(&[-1, -2])),
                (AExpr::parse("a1^2").unwrap(), QPoly::one()),
            ]
        );
    }

    #[test]
    fn fixed_point_terms_total_weight_bounded() {
        for n in 1..=7u32 {
            for mu in partitions(n) {
                for (expr, _) in fixed_point_terms(&mu) {
                    assert!(expr.weight() <= n, "{} from {}", expr, mu);
                }
            }
        }
    }
}
