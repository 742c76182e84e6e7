//! Exact arithmetic for the dynamics of Hénon maps φ(x, y) = (ay, x + f(y))
//! over the rationals and over the rational function field Q(t).
//!
//! The pieces fit together like this:
//!
//! - [`arith`]: big rationals, p-adic valuations, Weil heights, and
//!   height-ordered enumeration of Q.
//! - [`map`]: the Hénon map as a value, generic over the coefficient field,
//!   with forward/inverse evaluation, orbits, Jacobians, and cycle multipliers.
//! - [`local_heights`]: escape regions, local canonical heights λ̂±_v at every
//!   place of Q, and globally assembled canonical heights with certified error.
//! - [`modp`]: reduction of quadratic maps mod p, full cycle decomposition of
//!   the induced permutation of A²(F_p), multiplier orders, and the period
//!   filter set S(b, p).
//! - [`search`]: exhaustive, certified search for all Q-rational periodic
//!   points of φ(x, y) = (y, x + y² + b), plus the per-parameter verdict
//!   pipeline and the checkpointed batch driver.
//! - [`funcfield`]: places and heights over Q(t), isotriviality testing, the
//!   height divisors D±(φ, P), and the specialization experiment.

pub mod arith;
pub mod field;
pub mod funcfield;
pub mod local_heights;
pub mod map;
pub mod modp;
pub mod search;

pub use arith::{QPlace, Rational, Valuation};
pub use field::{Field, Fp};
pub use local_heights::{CanonicalHeightValue, Direction, HeightConfig, LocalHeightValue};
pub use map::{HenonMap, Matrix2, OrbitReport, OrbitStatus, PlanePoint};
pub use modp::{CycleData, PeriodSet};
pub use search::{BatchReport, RationalCycle, SearchBounds, Verdict};
