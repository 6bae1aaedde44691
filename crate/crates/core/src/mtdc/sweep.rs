use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::coefficients::{build_coefficients, CoefficientSet};
use super::deps::check_partition;
use super::index::{report, stability_index, IndexResult, PathSet, StabilityReport};
use super::system::{MtdcSystem, ParamPath};
use crate::error::{Error, Result};
use crate::freq::SweepSpec;

/// Default bisection tolerance on `|r - zeta|`, radians.
pub const DEFAULT_DELTA: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub c: f64,
    pub outcome: std::result::Result<StabilityReport, String>,
}

impl SweepRow {
    pub fn report(&self) -> Option<&StabilityReport> {
        self.outcome.as_ref().ok()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub param: String,
    pub j1: PathSet,
    pub index: IndexResult,
    pub rows: Vec<SweepRow>,
    /// `max |dr / dc|` between neighbouring successful rows.
    pub sensitivity: f64,
}

impl SweepTable {
    pub fn max_r(&self) -> f64 {
        self.rows
            .iter()
            .filter_map(|r| r.report().map(|x| x.r))
            .fold(0.0, f64::max)
    }
}

/// Nominal model shared by every evaluation along one parameter.
struct Study<'a> {
    sys: &'a MtdcSystem,
    j1: &'a PathSet,
    param: &'a ParamPath,
    spec: &'a SweepSpec,
    nominal: CoefficientSet,
    index: IndexResult,
}

impl<'a> Study<'a> {
    fn new(sys: &'a MtdcSystem, j1: &'a PathSet, param: &'a ParamPath, spec: &'a SweepSpec) -> Result<Self> {
        spec.validate()?;
        check_partition(sys, j1, std::slice::from_ref(param))?;
        let nominal = build_coefficients(sys)?;
        let index = stability_index(&nominal, j1, spec)?;
        Ok(Self {
            sys,
            j1,
            param,
            spec,
            nominal,
            index,
        })
    }

    fn at(&self, c: f64) -> Result<StabilityReport> {
        let moved = build_coefficients(&self.sys.with_gain(self.param, c)?)?;
        report(&self.index, &self.nominal, &moved, self.j1, self.spec)
    }

    fn slack(&self, c: f64) -> Result<f64> {
        Ok(self.at(c)?.slack)
    }
}

fn sensitivity(rows: &[SweepRow]) -> f64 {
    let ok: Vec<(f64, f64)> = rows.iter().filter_map(|r| r.report().map(|x| (r.c, x.r))).collect();
    ok.windows(2)
        .filter(|w| w[1].0 != w[0].0)
        .map(|w| ((w[1].1 - w[0].1) / (w[1].0 - w[0].0)).abs())
        .fold(0.0, f64::max)
}

/// Radius, slack and verdict for each value of `param`. Rows are evaluated
/// in parallel and returned in input order.
pub fn sweep_parameter(
    sys: &MtdcSystem,
    j1: &PathSet,
    param: &ParamPath,
    values: &[f64],
    spec: &SweepSpec,
) -> Result<SweepTable> {
    if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
        return Err(Error::Domain(format!("sweep value {v} must be finite and >= 0")));
    }
    let study = Study::new(sys, j1, param, spec)?;
    let rows: Vec<SweepRow> = values
        .par_iter()
        .map(|&c| SweepRow {
            c,
            outcome: study.at(c).map_err(|e| e.to_string()),
        })
        .collect();
    Ok(SweepTable {
        param: param.to_string(),
        j1: j1.clone(),
        index: study.index,
        sensitivity: sensitivity(&rows),
        rows,
    })
}

/// Which side of the boundary satisfies `r <= zeta`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StableSide {
    Above,
    Below,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Boundary {
    pub c0: f64,
    pub r_at_c0: f64,
    pub zeta: f64,
    pub stable_side: StableSide,
    /// Slack is monotone over the bracket samples, so the side holds for the
    /// whole bracket.
    pub certified: bool,
    pub iterations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BoundaryOutcome {
    Crossing(Boundary),
    NoCrossing { zeta: f64, min_slack: f64, max_slack: f64 },
}

/// Bracket samples used for the monotonicity check.
const BRACKET_SAMPLES: usize = 17;

fn monotone(values: &[f64]) -> bool {
    let tol = 1e-9;
    values.windows(2).all(|w| w[1] >= w[0] - tol) || values.windows(2).all(|w| w[1] <= w[0] + tol)
}

/// Bisection for the gain `c0` where `r` meets `zeta` within `delta`.
pub fn find_boundary(
    sys: &MtdcSystem,
    j1: &PathSet,
    param: &ParamPath,
    bracket: (f64, f64),
    delta: f64,
    spec: &SweepSpec,
) -> Result<BoundaryOutcome> {
    let (lo, hi) = bracket;
    if !(lo.is_finite() && hi.is_finite() && lo >= 0.0 && lo < hi) {
        return Err(Error::Domain(format!("bracket [{lo}, {hi}] must satisfy 0 <= lo < hi")));
    }
    if !(delta > 0.0) {
        return Err(Error::Domain(format!("delta must be > 0, got {delta}")));
    }
    let study = Study::new(sys, j1, param, spec)?;
    let zeta = study.index.zeta;
    let grid: Vec<f64> = (0..BRACKET_SAMPLES)
        .map(|k| lo + (hi - lo) * k as f64 / (BRACKET_SAMPLES - 1) as f64)
        .collect();
    let slacks = grid
        .par_iter()
        .map(|&c| study.slack(c))
        .collect::<Result<Vec<f64>>>()?;
    let (s_lo, s_hi) = (slacks[0], slacks[BRACKET_SAMPLES - 1]);
    if (s_lo >= 0.0) == (s_hi >= 0.0) {
        return Ok(BoundaryOutcome::NoCrossing {
            zeta,
            min_slack: slacks.iter().copied().fold(f64::INFINITY, f64::min),
            max_slack: slacks.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        });
    }
    let stable_side = if s_hi >= 0.0 { StableSide::Above } else { StableSide::Below };
    // Narrow to the sample interval holding the first sign change.
    let k = slacks.windows(2).position(|w| (w[0] >= 0.0) != (w[1] >= 0.0)).unwrap_or(0);
    let (mut a, mut b) = (grid[k], grid[k + 1]);
    let sign_a = slacks[k] >= 0.0;
    let mut iterations = 0;
    let (c0, r_at_c0) = loop {
        iterations += 1;
        let m = 0.5 * (a + b);
        let rep = study.at(m)?;
        if rep.slack.abs() < delta || (b - a) <= 1e-12 * (1.0 + m.abs()) || iterations >= 200 {
            break (m, rep.r);
        }
        if (rep.slack >= 0.0) == sign_a {
            a = m;
        } else {
            b = m;
        }
    };
    Ok(BoundaryOutcome::Crossing(Boundary {
        c0,
        r_at_c0,
        zeta,
        stable_side,
        certified: monotone(&slacks),
        iterations,
    }))
}
