//! Extremization over the imaginary axis, chordal distances and L∞ norms.

mod chordal;
mod extremize;
mod hinf;

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};

pub use chordal::{chordal, chordal_pair, chordal_values, pair_at};
pub use extremize::{extremize, Objective};
pub use hinf::{hinf_norm, HinfNorm};

/// Discretization of the half-axis `omega >= 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub omega_min: f64,
    pub omega_max: f64,
    pub points_per_decade: usize,
    pub refine_tol: f64,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            omega_min: 1e-4,
            omega_max: 1e6,
            points_per_decade: 50,
            refine_tol: 1e-8,
        }
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.omega_min > 0.0 && self.omega_min.is_finite()) {
            return Err(Error::InvalidSweep(format!(
                "omega_min must be positive, got {}",
                self.omega_min
            )));
        }
        if !(self.omega_max > self.omega_min && self.omega_max.is_finite()) {
            return Err(Error::InvalidSweep(format!(
                "omega_max ({}) must exceed omega_min ({})",
                self.omega_max, self.omega_min
            )));
        }
        if self.points_per_decade < 10 {
            return Err(Error::InvalidSweep(format!(
                "points_per_decade must be >= 10, got {}",
                self.points_per_decade
            )));
        }
        if !(self.refine_tol > 0.0) {
            return Err(Error::InvalidSweep("refine_tol must be positive".into()));
        }
        Ok(())
    }

    /// Log-spaced grid including both ends.
    pub fn grid(&self) -> Vec<f64> {
        let lo = self.omega_min.log10();
        let hi = self.omega_max.log10();
        let n = ((hi - lo) * self.points_per_decade as f64).ceil().max(1.0) as usize;
        (0..=n)
            .map(|k| 10f64.powf(lo + (hi - lo) * k as f64 / n as f64))
            .collect()
    }
}

/// Location of an extremum on the half-axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Frequency {
    Zero,
    Finite(f64),
    Infinity,
}

impl Frequency {
    pub fn as_f64(&self) -> f64 {
        match *self {
            Frequency::Zero => 0.0,
            Frequency::Finite(w) => w,
            Frequency::Infinity => f64::INFINITY,
        }
    }
}

impl fmt::Display for Frequency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Frequency::Zero => write!(f, "zero"),
            Frequency::Finite(w) => write!(f, "{w}"),
            Frequency::Infinity => write!(f, "infinity"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    Min,
    Max,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Extremum {
    pub omega_star: Frequency,
    pub value: f64,
}
