//! State-space oracle: realization, eigenvalue stability and step responses.

mod series;

use nalgebra::{DMatrix, DVector, RowDVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ratfun::{balance, RationalFunction};

pub use series::{classify, TimeSeries, TraceClass};

/// Below this absolute abscissa a system is reported as marginal.
pub const MARGINAL_TOL: f64 = 1e-9;

/// Single-input single-output `x' = Ax + Bu`, `y = Cx + Du`.
#[derive(Clone, Debug, PartialEq)]
pub struct StateSpace {
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
    pub c: RowDVector<f64>,
    pub d: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenVerdict {
    pub stable: bool,
    pub marginal: bool,
    pub abscissa: f64,
}

impl StateSpace {
    pub fn order(&self) -> usize {
        self.a.nrows()
    }

    /// Controllable canonical form of a proper transfer function.
    pub fn realize(g: &RationalFunction) -> Result<Self> {
        if !g.is_proper() {
            return Err(Error::ImproperClosedLoop(g.relative_degree()));
        }
        let den = g.den().coeffs();
        let n = den.len() - 1;
        let lead = den[n];
        let a_k: Vec<f64> = den.iter().map(|v| v / lead).collect();
        let mut num: Vec<f64> = g.num().coeffs().iter().map(|v| v / lead).collect();
        num.resize(n + 1, 0.0);
        let d = num[n];
        let mut a = DMatrix::zeros(n, n);
        for i in 0..n.saturating_sub(1) {
            a[(i, i + 1)] = 1.0;
        }
        let mut c = RowDVector::zeros(n);
        for k in 0..n {
            if n > 0 {
                a[(n - 1, k)] = -a_k[k];
            }
            c[k] = num[k] - d * a_k[k];
        }
        let mut b = DVector::zeros(n);
        if n > 0 {
            b[n - 1] = 1.0;
        }
        Ok(Self { a, b, c, d })
    }

    /// Realizes `1 / (g + k)`, the response of the loop closed around `1/g`
    /// by the feedback `k`.
    pub fn realize_closed_loop(g: &RationalFunction, k: &RationalFunction) -> Result<Self> {
        let sum = g + k;
        if sum.is_zero() {
            return Err(Error::DegenerateLoop);
        }
        let cl = sum.inv()?;
        Self::realize(&cl)
    }

    pub fn eigenvalues(&self) -> Result<Vec<Complex64>> {
        let n = self.order();
        if n == 0 {
            return Ok(Vec::new());
        }
        let mut m = self.a.clone();
        balance(&mut m);
        let schur = m
            .try_schur(f64::EPSILON, 10_000)
            .ok_or(Error::RootFinding(n))?;
        Ok(schur.complex_eigenvalues().iter().copied().collect())
    }

    pub fn dc_gain(&self) -> Option<f64> {
        if self.order() == 0 {
            return Some(self.d);
        }
        let x = self.a.clone().lu().solve(&self.b)?;
        Some(self.d - (&self.c * x)[(0, 0)])
    }

    pub fn spectral_radius(&self) -> Result<f64> {
        Ok(self
            .eigenvalues()?
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max))
    }

    /// Largest `dt` the accuracy guard admits.
    pub fn max_step(&self) -> Result<f64> {
        let rho = self.spectral_radius()?;
        Ok(if rho > 0.0 { 0.1 / rho } else { f64::INFINITY })
    }
}

pub fn eigen_stability(ss: &StateSpace) -> Result<EigenVerdict> {
    let abscissa = ss
        .eigenvalues()?
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(EigenVerdict {
        stable: abscissa < -MARGINAL_TOL,
        marginal: abscissa.abs() < MARGINAL_TOL,
        abscissa,
    })
}

/// Fixed-step RK4 response to a step of size `magnitude` applied at `t = 0`
/// from rest. Integration stops early once `|y|` exceeds `1e6` times the
/// reference amplitude so divergent traces stay finite.
pub fn step_response(ss: &StateSpace, duration: f64, dt: f64, magnitude: f64) -> Result<TimeSeries> {
    if !(dt > 0.0) || !(duration > 0.0) {
        return Err(Error::Domain("duration and dt must be positive".into()));
    }
    let limit = ss.max_step()?;
    if dt >= limit {
        return Err(Error::StepTooLarge { dt, limit });
    }
    let steps = (duration / dt).round() as usize;
    let reference = series::reference_amplitude(ss, magnitude);
    let u = magnitude;
    let f = |x: &DVector<f64>| &ss.a * x + &ss.b * u;
    let mut x = DVector::zeros(ss.order());
    let mut t = Vec::with_capacity(steps + 1);
    let mut y = Vec::with_capacity(steps + 1);
    let out = |x: &DVector<f64>| (&ss.c * x)[(0, 0)] + ss.d * u;
    t.push(0.0);
    y.push(out(&x));
    for k in 1..=steps {
        let k1 = f(&x);
        let k2 = f(&(&x + &k1 * (dt / 2.0)));
        let k3 = f(&(&x + &k2 * (dt / 2.0)));
        let k4 = f(&(&x + &k3 * dt));
        x += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
        let v = out(&x);
        t.push(k as f64 * dt);
        y.push(v);
        if !(v.abs() <= 1e6 * reference) {
            break;
        }
    }
    Ok(TimeSeries { t, y, reference })
}
