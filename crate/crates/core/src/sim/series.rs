use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::StateSpace;
use crate::error::Result;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub t: Vec<f64>,
    pub y: Vec<f64>,
    /// Amplitude the divergence detector compares against.
    pub reference: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TraceClass {
    Settling,
    Divergent,
    /// Neither settled nor diverged within the simulated window.
    Undecided,
}

/// `|magnitude|` times the larger of one and the DC gain.
pub(crate) fn reference_amplitude(ss: &StateSpace, magnitude: f64) -> f64 {
    let g = ss.dc_gain().filter(|g| g.is_finite()).unwrap_or(1.0).abs();
    magnitude.abs() * g.max(1.0)
}

/// Divergent once `|y|` passes ten times the reference; settling when the
/// last tenth of the trace stays within 1% of the reference of its end value.
pub fn classify(ts: &TimeSeries) -> TraceClass {
    let peak = ts.y.iter().fold(0.0f64, |m, v| if v.is_finite() { m.max(v.abs()) } else { f64::INFINITY });
    if peak > 10.0 * ts.reference {
        return TraceClass::Divergent;
    }
    let n = ts.y.len();
    let tail = &ts.y[n - (n / 10).max(1)..];
    let end = *ts.y.last().unwrap();
    if tail.iter().all(|v| (v - end).abs() <= 0.01 * ts.reference) {
        TraceClass::Settling
    } else {
        TraceClass::Undecided
    }
}

impl TimeSeries {
    /// `t,y` header, 17 significant digits per value.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,y\n");
        for (t, y) in self.t.iter().zip(&self.y) {
            let _ = writeln!(s, "{t:.16e},{y:.16e}");
        }
        s
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut f = std::fs::File::create(path)?;
        f.write_all(self.to_csv().as_bytes())?;
        Ok(())
    }
}
