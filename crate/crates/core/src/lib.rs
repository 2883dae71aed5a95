//! Divisor sums of Erdős–Zaremba type.
//!
//! The crate evaluates `Φ(n) = Σ_{d|n} log d / d`, its relatives Ψ, Φ₁, Φ₂,
//! Φ_η and Davenport's `w`, builds the extremal integers that drive their
//! growth, searches for record values of the normalized ratios, and checks
//! the explicit-constant inequalities behind their upper bounds numerically.
//!
//! Integers are carried as [`FactoredInteger`]s so that sums over divisors of
//! numbers like `∏_{p<e^j} p^j` never leave floating-point log space.

// `!(x > y)` rejects NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod arith;
pub mod error;
pub mod extremal;
pub mod factored;
pub mod gcd_forms;
pub mod primes;
pub mod quad;
pub mod verify;

pub use arith::{evaluate, normalized_ratio, EvalOptions, StatKind, StatValue};
pub use error::{Error, Result};
pub use factored::{
    guarded_loglog, guarded_logloglog, ApproxValue, FactoredInteger, TailPolicy, WeightFamily,
    DEFAULT_BUDGET,
};
pub use primes::PrimeTable;
