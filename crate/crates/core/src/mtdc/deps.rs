use std::collections::BTreeSet;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::coefficients::{build_coefficients, CoefficientSet};
use super::index::PathSet;
use super::system::{GainKey, MtdcSystem, ParamPath};
use crate::error::{Error, Result};
use crate::ratfun::RationalFunction;

/// Which coefficients a controller gain enters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dependency {
    pub param: String,
    /// Enters `F_S`.
    pub self_term: bool,
    /// `F_E` paths, numbered from 1.
    pub paths: BTreeSet<usize>,
}

impl Dependency {
    /// Coefficients outside `J1` that the gain changes, labelled `S` or by
    /// path number.
    pub fn leaks(&self, j1: &PathSet) -> Vec<String> {
        let mut out = Vec::new();
        if self.self_term {
            out.push("S".to_string());
        }
        out.extend(self.paths.iter().filter(|&&p| !j1.contains(p)).map(|p| p.to_string()));
        out
    }
}

fn probe_points() -> Vec<Complex64> {
    (0..24)
        .map(|k| Complex64::new(0.0, 10f64.powf(-2.0 + 6.5 * k as f64 / 23.0)))
        .chain([Complex64::new(0.7, 3.1), Complex64::new(2.3, 0.4)])
        .collect()
}

fn differs(a: &RationalFunction, b: &RationalFunction, points: &[Complex64]) -> bool {
    if a.is_zero() && b.is_zero() {
        return false;
    }
    points.iter().any(|&s| match (a.eval(s), b.eval(s)) {
        (Ok(x), Ok(y)) => (x - y).norm() > 1e-7 * (1.0 + x.norm().max(y.norm())),
        (Err(_), Err(_)) => false,
        _ => true,
    })
}

fn compare(param: &ParamPath, nominal: &CoefficientSet, moved: &CoefficientSet) -> Dependency {
    let pts = probe_points();
    Dependency {
        param: param.to_string(),
        self_term: differs(&nominal.f_s, &moved.f_s, &pts),
        paths: nominal
            .f_e
            .iter()
            .zip(&moved.f_e)
            .enumerate()
            .filter(|(_, (a, b))| differs(a, b, &pts))
            .map(|(k, _)| k + 1)
            .collect(),
    }
}

fn step(value: f64) -> f64 {
    value.abs() * 0.05 + 0.1
}

/// Dependency of one gain, by finite difference of the coefficients.
pub fn dependency(sys: &MtdcSystem, param: &ParamPath) -> Result<Dependency> {
    let nominal = build_coefficients(sys)?;
    dependency_from(sys, &nominal, param)
}

fn dependency_from(sys: &MtdcSystem, nominal: &CoefficientSet, param: &ParamPath) -> Result<Dependency> {
    let v = sys.gain(param)?;
    let moved = build_coefficients(&sys.with_gain(param, v + step(v))?)?;
    Ok(compare(param, nominal, &moved))
}

/// Dependencies of every gain of every VSC, in configuration order.
pub fn dependency_table(sys: &MtdcSystem) -> Result<Vec<Dependency>> {
    let nominal = build_coefficients(sys)?;
    let mut out = Vec::new();
    for v in &sys.vscs {
        for gain in GainKey::ALL {
            let p = ParamPath {
                vsc: v.name.clone(),
                gain,
            };
            out.push(dependency_from(sys, &nominal, &p)?);
        }
    }
    Ok(out)
}

/// Fails when any of `params` changes a coefficient outside `J1`.
pub fn check_partition(sys: &MtdcSystem, j1: &PathSet, params: &[ParamPath]) -> Result<()> {
    let nominal = build_coefficients(sys)?;
    for p in params {
        let d = dependency_from(sys, &nominal, p)?;
        let leaks = d.leaks(j1);
        if !leaks.is_empty() {
            return Err(Error::PartitionViolation {
                param: d.param,
                paths: leaks,
            });
        }
    }
    Ok(())
}
