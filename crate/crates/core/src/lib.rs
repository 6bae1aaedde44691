//! Nu-gap metrics, robust stability margins and stability indices for
//! multi-terminal HVDC interaction analysis.
//!
//! The crate is layered bottom-up:
//!
//! - [`ratfun`]: real-coefficient polynomials and rational functions, root
//!   finding and half-plane classification.
//! - [`freq`]: extremization over the frequency axis and L∞ norms.
//! - [`vgap`]: the nu-gap metric, uncertainty balls and the robust stability
//!   margin of a SISO feedback loop.
//! - [`mtdc`]: the three-terminal interaction model built from self- and
//!   en-stabilizing coefficients, stability indices, uncertainty radii,
//!   parameter sweeps and boundary search.
//! - [`sim`]: an independent state-space oracle (eigenvalues and step
//!   responses) used to cross-check every verdict.

pub mod error;
pub mod freq;
pub mod mtdc;
pub mod ratfun;
pub mod sim;
pub mod vgap;

pub use error::{Error, Result};
pub use freq::{Extremum, Frequency, HinfNorm, Mode, SweepSpec};
pub use ratfun::{HalfPlaneCensus, Polynomial, RationalFunction};
pub use vgap::{GapResult, MarginResult};

pub use num_complex::Complex64;
