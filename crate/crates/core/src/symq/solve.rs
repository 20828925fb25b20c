//! Exact linear solving and polynomial interpolation over `Q(q)`.

use super::{QPoly, QRat};
use crate::{Error, Result};
use num::rational::BigRational;
use num::Zero;

/// Solves `A x = b` exactly by Gaussian elimination over the rational
/// function field. Errors with [`Error::SingularSystem`] when the matrix has
/// no unique solution.
pub fn solve_linear(a: &[Vec<QRat>], b: &[QRat]) -> Result<Vec<QRat>> {
    let n = a.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    assert!(a.iter().all(|row| row.len() == n), "matrix must be square");
    assert_eq!(b.len(), n, "right-hand side length mismatch");

    let mut m: Vec<Vec<QRat>> = a.to_vec();
    let mut rhs: Vec<QRat> = b.to_vec();

    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero());
        let pivot = match pivot {
            Some(p) => p,
            None => return Err(Error::SingularSystem),
        };
        m.swap(col, pivot);
        rhs.swap(col, pivot);

        let inv = m[col][col].recip();
        for c in col..n {
            m[col][c] = &m[col][c] * &inv;
        }
        rhs[col] = &rhs[col] * &inv;

        for r in 0..n {
            if r == col || m[r][col].is_zero() {
                continue;
            }
            let factor = m[r][col].clone();
            for c in col..n {
                let sub = &factor * &m[col][c];
                m[r][c] = &m[r][c] - &sub;
            }
            let sub = &factor * &rhs[col];
            rhs[r] = &rhs[r] - &sub;
        }
    }
    Ok(rhs)
}

/// Exact Lagrange interpolation with held-out validation.
///
/// The polynomial is fitted on the first `degree_bound + 1` samples and must
/// reproduce every remaining sample exactly; any miss is reported as a
/// validation failure rather than silently accepted.  Requires
/// `samples.len() >= degree_bound + 1 + validation_count` and pairwise
/// distinct sample points.
pub fn interpolate(
    samples: &[(BigRational, BigRational)],
    degree_bound: usize,
    validation_count: usize,
) -> Result<QPoly> {
    let needed = degree_bound + 1 + validation_count;
    if samples.len() < needed {
        return Err(Error::Validation(format!(
            "interpolation needs {} samples ({} fit + {} validation), got {}",
            needed,
            degree_bound + 1,
            validation_count,
            samples.len()
        )));
    }
    for i in 0..samples.len() {
        for j in (i + 1)..samples.len() {
            if samples[i].0 == samples[j].0 {
                return Err(Error::Validation(format!(
                    "duplicate sample point {}",
                    samples[i].0
                )));
            }
        }
    }

    let fit = &samples[..degree_bound + 1];
    let mut poly = QPoly::zero();
    for (i, (xi, yi)) in fit.iter().enumerate() {
        if yi.is_zero() {
            continue;
        }
        let mut basis = QPoly::one();
        let mut denom = BigRational::from_integer(1.into());
        for (j, (xj, _)) in fit.iter().enumerate() {
            if i == j {
                continue;
            }
            basis = &basis * &QPoly::from_coeffs(vec![-xj.clone(), BigRational::from_integer(1.into())]);
            denom *= xi - xj;
        }
        poly = &poly + &basis.scale(&(yi / denom));
    }

    for (x, y) in &samples[degree_bound + 1..] {
        let got = poly.eval(x);
        if got != *y {
            return Err(Error::Validation(format!(
                "interpolated polynomial {} gives {} at q = {}, sample says {}",
                poly, got, x, y
            )));
        }
    }
    Ok(poly)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symq::br;

    #[test]
    fn solve_two_by_two() {
        // x + y = q, x - y = q - 2  =>  x = q - 1, y = 1.
        let one = QRat::one();
        let a = vec![
            vec![one.clone(), one.clone()],
            vec![one.clone(), -&one],
        ];
        let b = vec![
            QRat::from_poly(QPoly::q()),
            QRat::from_poly(QPoly::from_int_coeffs(&[-2, 1])),
        ];
        let x = solve_linear(&a, &b).unwrap();
        assert_eq!(x[0], QRat::from_poly(QPoly::from_int_coeffs(&[-1, 1])));
        assert_eq!(x[1], QRat::one());
    }

    #[test]
    fn solve_singular_is_error() {
        let one = QRat::one();
        let a = vec![
            vec![one.clone(), one.clone()],
            vec![one.clone(), one.clone()],
        ];
        let b = vec![one.clone(), one.clone()];
        assert!(matches!(solve_linear(&a, &b), Err(Error::SingularSystem)));
    }

    #[test]
    fn interpolate_line_with_validation() {
        // q -> q - 1 sampled at 3, 5, 7, 9 with bound 2: one held-out point.
        let samples: Vec<_> = [3, 5, 7, 9]
            .iter()
            .map(|&x| (br(x), br(x - 1)))
            .collect();
        let p = interpolate(&samples, 2, 1).unwrap();
        assert_eq!(p, QPoly::from_int_coeffs(&[-1, 1]));
    }

    #[test]
    fn interpolate_constant() {
        let samples: Vec<_> = [2, 3, 4].iter().map(|&x| (br(x), br(7))).collect();
        let p = interpolate(&samples, 0, 2).unwrap();
        assert_eq!(p, QPoly::from_int(7));
    }

    #[test]
    fn interpolate_underfit_fails_validation() {
        // q^2 sampled at 4 points with bound 1 must fail on the held-out pair.
        let samples: Vec<_> = [1, 2, 3, 4].iter().map(|&x| (br(x), br(x * x))).collect();
        match interpolate(&samples, 1, 2) {
            Err(Error::Validation(_)) => {}
            other => panic!("expected validation failure, got {:?}", other),
        }
    }

    #[test]
    fn interpolate_insufficient_samples() {
        let samples = vec![(br(1), br(1))];
        assert!(matches!(
            interpolate(&samples, 1, 1),
            Err(Error::Validation(_))
        ));
    }
}
