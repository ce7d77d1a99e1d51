//! Generalized real-valued metrics and their Lorentzian instance.
//!
//! * [`extreal`]: the extended real line with its cost and gain sums.
//! * [`finspace`]: finite δ-, ρ- and γ-spaces, axiom checks, duality,
//!   min-plus metric closure, preorders and Lipschitz maps.
//! * [`pathval`]: partition valuations of paths under function-backed metrics.
//! * [`lorentz`]: scalar products of index 1, causal cones and the antinorm.
//! * [`spacetime`]: events, causality, proper time and the geodesic ρ-metric.
//! * [`cli`]: the `causal-metrics` command-line frontend.

pub mod cli;
pub mod error;
pub mod extreal;
pub mod finspace;
pub mod json;
pub mod lorentz;
pub mod pathval;
pub mod spacetime;

pub use error::{Error, Result};
pub use extreal::ExtReal;
