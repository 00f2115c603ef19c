//! Relative metrics on domains of the Möbius space `R̄ⁿ = Rⁿ ∪ {∞}`.
//!
//! The crate evaluates the generalized hyperbolic metric `ρ_G`, Seittenranta's
//! metric `δ_G` with its `p`-family `δ_G^p`, the distance ratio metric `j_G`
//! with its `p`-family `j_G^p`, and the pointed variant `j_{G,b}`. The
//! [`harness`] module checks the comparison inequalities between these
//! metrics on randomized and hand-picked inputs.
//!
//! ```
//! use relmetric::{domains::{DomainSpec, SupremumStrategy}, metrics, ExtendedPoint};
//!
//! let g = DomainSpec::punctured(vec!["0,0".parse().unwrap()]).unwrap();
//! let x: ExtendedPoint = "1,0".parse().unwrap();
//! let y: ExtendedPoint = "-1,0".parse().unwrap();
//! let d = metrics::delta(&g, &x, &y, &SupremumStrategy::exhaustive()).unwrap();
//! assert!((d.value - 3f64.ln()).abs() < 1e-15);
//! ```

// Negated float comparisons are used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod domains;
pub mod error;
pub mod extended_space;
pub mod harness;
pub mod metrics;
pub mod mobius;

pub use domains::{DomainSpec, SupremumStrategy};
pub use error::{Error, Result};
pub use extended_space::ExtendedPoint;
pub use metrics::{Exponent, MetricId, MetricValue};
pub use mobius::MobiusMap;
