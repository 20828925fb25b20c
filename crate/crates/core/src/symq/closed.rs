//! Quasi-polynomial closed forms in the genus.
//!
//! Genus sequences produced by the recursions are, past a small threshold, a
//! geometric part proportional to `q^{2g}` plus polynomials in `g` that
//! depend only on `g` modulo a fixed period.  This module holds the shape and
//! its exact evaluation; the fitting logic lives next to the engine.

use super::{QPoly, QRat};
use num::bigint::BigInt;
use num::rational::BigRational;
use num::One;
use std::fmt;

/// `c * q^{2g} + p_{g mod period}(g)`, valid for all `g >= g_min`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosedForm {
    /// Coefficient of `q^{2g}`.
    pub geometric: QRat,
    /// Period of the residue classes in `g`.
    pub period: u32,
    /// One polynomial in `g` per residue class; coefficients ascending in `g`.
    pub residue_polys: Vec<Vec<QRat>>,
    /// Smallest genus (inclusive) where the form agrees with the recursion.
    pub g_min: i64,
}

/// `q^{2g}` as an exact rational function, for possibly negative `g`.
pub fn q_to_the_2g(g: i64) -> QRat {
    if g >= 0 {
        QRat::from_poly(QPoly::q_pow(2 * g as usize))
    } else {
        QRat::new(QPoly::one(), QPoly::q_pow(2 * (-g) as usize))
    }
}

impl ClosedForm {
    /// Exact value at genus `g`. Callers should respect `g_min`; evaluation
    /// below it is permitted but carries no guarantee.
    pub fn eval(&self, g: i64) -> QRat {
        let mut acc = &self.geometric * &q_to_the_2g(g);
        let r = g.rem_euclid(self.period as i64) as usize;
        let gq = BigRational::from_integer(BigInt::from(g));
        let mut gpow = BigRational::one();
        for c in &self.residue_polys[r] {
            if !c.is_zero() {
                acc = &acc + &c.scale(&gpow);
            }
            gpow *= &gq;
        }
        acc
    }
}

fn render_genus_poly(coeffs: &[QRat]) -> String {
    let mut parts = Vec::new();
    for (k, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let var = match k {
            0 => String::new(),
            1 => "*g".to_string(),
            _ => format!("*g^{}", k),
        };
        parts.push(format!("({}){}", c, var));
    }
    if parts.is_empty() {
        "0".to_string()
    } else {
        parts.join(" + ")
    }
}

impl fmt::Display for ClosedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "valid for g >= {}, period {}", self.g_min, self.period)?;
        writeln!(f, "  q^(2g) coefficient: {}", self.geometric)?;
        for (r, coeffs) in self.residue_polys.iter().enumerate() {
            writeln!(
                f,
                "  g = {} (mod {}): {}",
                r,
                self.period,
                render_genus_poly(coeffs)
            )?;
        }
        Ok(())
    }
}
