//! Exact, equivariant point counts of moduli spaces of n-pointed hyperelliptic
//! curves over finite fields, as polynomials in the field size q.
//!
//! The library has two independent halves that must agree:
//!
//! * a symbolic engine ([`engine`]) that evaluates character-sum moments of
//!   hyperelliptic curve families by genus recursions, exactly over `Q(q)`,
//!   for arbitrary genus and both odd and even characteristic;
//! * a brute-force oracle ([`oracle`]) that enumerates every curve over a
//!   small finite field and sums character values directly.
//!
//! Supporting layers: exact rational-function arithmetic in `q` ([`symq`]),
//! finite-field towers with quadratic-character and Artin–Schreier statistics
//! ([`field`]), and the combinatorial calculus of moment decompositions
//! ([`tuples`]).

pub mod arith;
pub mod cache;
pub mod engine;
pub mod field;
pub mod oracle;
pub mod report;
pub mod symq;
pub mod tuples;
pub mod verify;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Input text did not match the expression grammar.
    #[error("parse error: {0}")]
    Parse(String),
    /// The requested value lies outside the supported weight range.
    #[error("unsupported: {0}")]
    Unsupported(String),
    /// An enumeration would exceed the configured budget.
    #[error("budget exceeded: {task} needs {needed}, budget is {budget}")]
    Budget {
        task: String,
        needed: u128,
        budget: u128,
    },
    /// A linear system had no unique solution.
    #[error("singular linear system")]
    SingularSystem,
    /// Interpolation or table construction failed its held-out validation.
    #[error("validation failure: {0}")]
    Validation(String),
    /// Exact polynomial division left a remainder.
    #[error("inexact division")]
    InexactDivision,
    /// A cache file was unreadable or written by an incompatible version.
    #[error("cache error: {0}")]
    Cache(String),
    /// I/O error while reading or writing reports or caches.
    #[error(transparent)]
    Io(#[from] std::io::Error),
    /// An internal invariant was violated; indicates a bug.
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Characteristic selector: which family of base fields a computation targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub enum Parity {
    /// Odd characteristic: curves `y^2 = f(x)`.
    Odd,
    /// Characteristic two: curves `y^2 + h(x) y = f(x)`.
    Even,
}

impl Parity {
    pub fn as_str(self) -> &'static str {
        match self {
            Parity::Odd => "odd",
            Parity::Even => "even",
        }
    }
}

impl std::fmt::Display for Parity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

pub use engine::{CharacterRow, Engine, GenusOneTable, TableProvenance};
pub use field::{Ext, Gf, PrimePower, ProjPoint};
pub use oracle::{EnumBudget, Oracle};
pub use report::VerifyRecord;
pub use symq::{ClosedForm, QPoly, QRat};
pub use tuples::{AExpr, BCExpr, CycleType, ULinComb, UTuple};
pub use verify::{run_all, run_suite, Suite, VerifyOptions};
