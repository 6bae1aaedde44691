use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::coefficients::{build_coefficients, condition, CoefficientSet, PATHS};
use super::deps::check_partition;
use super::system::{MtdcSystem, ParamPath};
use crate::error::{Error, Result};
use crate::freq::{chordal_values, extremize, hinf_norm, Frequency, Mode, Objective, SweepSpec};
use crate::ratfun::{RationalFunction, AXIS_TOL};
use crate::sim::{eigen_stability, EigenVerdict, StateSpace};
use crate::vgap::{comparability, max_chordal, stability_margin};

/// Agreement required between the two computation routes.
pub const ROUTE_TOL: f64 = 1e-6;

/// The uncertain paths `J1`, numbered from 1.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathSet(BTreeSet<usize>);

impl PathSet {
    pub fn new(paths: impl IntoIterator<Item = usize>) -> Result<Self> {
        let set: BTreeSet<usize> = paths.into_iter().collect();
        if let Some(&p) = set.iter().find(|&&p| p == 0 || p > PATHS) {
            return Err(Error::Config(format!("path {p} outside 1..={PATHS}")));
        }
        Ok(Self(set))
    }

    pub fn all() -> Self {
        Self((1..=PATHS).collect())
    }

    pub fn contains(&self, p: usize) -> bool {
        self.0.contains(&p)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    /// `J0`, the complement.
    pub fn complement(&self) -> Vec<usize> {
        (1..=PATHS).filter(|p| !self.0.contains(p)).collect()
    }
}

impl FromStr for PathSet {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().trim_start_matches('{').trim_end_matches('}');
        if s.trim().is_empty() {
            return Ok(Self::default());
        }
        let paths = s
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Config(format!("'{p}' is not a path number")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(paths)
    }
}

impl fmt::Display for PathSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v: Vec<String> = self.0.iter().map(|p| p.to_string()).collect();
        write!(f, "{{{}}}", v.join(","))
    }
}

/// `(G_iJ0, C_iJ1)`.
pub fn path_partition(cs: &CoefficientSet, j1: &PathSet) -> (RationalFunction, RationalFunction) {
    let mut g = &RationalFunction::s().scale(cs.cu) - &cs.f_s;
    let mut c = RationalFunction::zero();
    for (k, f) in cs.f_e.iter().enumerate() {
        if j1.contains(k + 1) {
            c = &c + f;
        } else {
            g = &g - f;
        }
    }
    (condition(g), condition(c))
}

/// `C_iJ1` alone.
pub fn uncertain_sum(cs: &CoefficientSet, j1: &PathSet) -> RationalFunction {
    condition(
        j1.iter()
            .fold(RationalFunction::zero(), |acc, p| &acc + &cs.f_e[p - 1]),
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndexResult {
    /// Margin-form value.
    pub zeta: f64,
    pub omega_star: Frequency,
    /// Pointwise evaluation of the defining expression.
    pub direct: f64,
    pub direct_omega_star: Frequency,
    pub closed_loop_stable: bool,
    pub abscissa: f64,
    /// State-space check used by the direct route.
    pub oracle: EigenVerdict,
}

impl IndexResult {
    pub fn routes_agree(&self) -> bool {
        (self.zeta - self.direct).abs() < ROUTE_TOL
    }
}

fn value_at(f: &RationalFunction, s: Complex64) -> Complex64 {
    f.eval(s)
        .unwrap_or(Complex64::new(f64::INFINITY, 0.0))
}

fn seeds(cs: &CoefficientSet) -> Vec<f64> {
    std::iter::once(&cs.f_s)
        .chain(&cs.f_e)
        .flat_map(|f| f.modal_frequencies())
        .collect()
}

/// Direct route: sums `F_S` and `F_E` values pointwise at `j w`.
fn direct_index(cs: &CoefficientSet, j1: &PathSet, spec: &SweepSpec, stable: bool) -> Result<(f64, Frequency)> {
    if !stable {
        return Ok((0.0, Frequency::Zero));
    }
    let at = |w: f64| {
        let s = Complex64::new(0.0, w);
        let mut g = s * cs.cu - value_at(&cs.f_s, s);
        let mut c = Complex64::new(0.0, 0.0);
        for (k, f) in cs.f_e.iter().enumerate() {
            let v = value_at(f, s);
            if j1.contains(k + 1) {
                c += v;
            } else {
                g -= v;
            }
        }
        chordal_values(g, c)
    };
    let (g, c) = path_partition(cs, j1);
    let limit = |f: Frequency| crate::freq::chordal(&g, &c, f);
    let obj = Objective::new(at)
        .at_zero(limit(Frequency::Zero))
        .at_infinity(limit(Frequency::Infinity))
        .seeds(seeds(cs));
    let e = extremize(&obj, Mode::Min, spec)?;
    Ok((e.value.clamp(0.0, 1.0).asin(), e.omega_star))
}

/// `zeta_iJ1 = b[1 / G_iJ0, -C_iJ1]`, computed by both routes.
pub fn stability_index(cs: &CoefficientSet, j1: &PathSet, spec: &SweepSpec) -> Result<IndexResult> {
    let (g, c) = path_partition(cs, j1);
    let plant = g.inv()?;
    let m = stability_margin(&plant, &-&c, spec)?;
    let oracle = eigen_stability(&StateSpace::realize_closed_loop(&g, &-&c)?)?;
    let (direct, direct_omega_star) = direct_index(cs, j1, spec, oracle.stable)?;
    Ok(IndexResult {
        zeta: m.value,
        omega_star: m.omega_star,
        direct,
        direct_omega_star,
        closed_loop_stable: m.closed_loop_stable,
        abscissa: m.abscissa,
        oracle,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadiusResult {
    pub r: f64,
    pub omega_star: Frequency,
    /// Frequency-sweep route.
    pub sweep: f64,
    /// Norm route, when it applies.
    pub norm: Option<f64>,
    pub warnings: Vec<String>,
}

impl RadiusResult {
    pub fn routes_agree(&self) -> bool {
        self.norm.map_or(true, |n| (n - self.sweep).abs() < ROUTE_TOL)
    }
}

/// Norm route: `arctan ||(C - C~) / (1 + C C~(-s))||_inf`.
pub fn radius_by_norm(c_nom: &RationalFunction, c_pert: &RationalFunction, spec: &SweepSpec) -> Result<f64> {
    let diff = c_nom - c_pert;
    if diff.is_zero() {
        return Ok(0.0);
    }
    let den = &RationalFunction::one() + &(c_nom * &c_pert.reflect());
    if let Some(z) = den.zeros().iter().find(|z| z.re.abs() <= AXIS_TOL) {
        return Err(Error::InfiniteNorm(z.im.abs()));
    }
    let w = diff.checked_div(&den)?;
    Ok(hinf_norm(&w, spec)?.value.atan())
}

/// `r_iJ1`, the nu-gap between nominal and perturbed uncertain path sums.
pub fn uncertainty_radius(c_nom: &RationalFunction, c_pert: &RationalFunction, spec: &SweepSpec) -> Result<RadiusResult> {
    let cmp = comparability(c_nom, c_pert);
    if !cmp.comparable {
        return Err(Error::Incomparable);
    }
    let mut warnings = Vec::new();
    if cmp.indeterminate {
        warnings.push("imaginary-axis pole or zero: comparability indeterminate".to_string());
    }
    let (sweep, omega_star) = max_chordal(c_nom, c_pert, spec)?;
    let norm = match radius_by_norm(c_nom, c_pert, spec) {
        Ok(v) => Some(v),
        Err(e) => {
            warnings.push(format!("norm route unavailable ({e}); using the sweep route"));
            None
        }
    };
    Ok(RadiusResult {
        r: sweep,
        omega_star,
        sweep,
        norm,
        warnings,
    })
}

/// Certificate for one perturbation of the uncertain paths.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub zeta: f64,
    pub r: f64,
    /// `zeta - r`.
    pub slack: f64,
    pub stable: bool,
    pub omega_star_zeta: Frequency,
    pub omega_star_r: Frequency,
    /// The perturbed loop is eigenvalue-stable whenever `stable` holds.
    pub oracle_agrees: bool,
    pub oracle: EigenVerdict,
    pub index: IndexResult,
    pub radius: RadiusResult,
    pub warnings: Vec<String>,
}

/// Eigenvalue check of `1 / (G_iJ0 - C_iJ1)`.
pub fn loop_oracle(cs: &CoefficientSet, j1: &PathSet) -> Result<EigenVerdict> {
    let (g, c) = path_partition(cs, j1);
    eigen_stability(&StateSpace::realize_closed_loop(&g, &-&c)?)
}

/// Assembles a report from a nominal index and the perturbed coefficients.
pub fn report(
    index: &IndexResult,
    nominal: &CoefficientSet,
    perturbed: &CoefficientSet,
    j1: &PathSet,
    spec: &SweepSpec,
) -> Result<StabilityReport> {
    let radius = uncertainty_radius(&uncertain_sum(nominal, j1), &uncertain_sum(perturbed, j1), spec)?;
    let oracle = loop_oracle(perturbed, j1)?;
    let mut warnings = radius.warnings.clone();
    if !index.closed_loop_stable {
        warnings.push(format!(
            "nominal loop unstable (abscissa {:.6}); index reported as 0",
            index.abscissa
        ));
    }
    if !index.routes_agree() {
        warnings.push(format!(
            "index routes differ: margin form {:.9}, direct {:.9}",
            index.zeta, index.direct
        ));
    }
    if !radius.routes_agree() {
        warnings.push(format!(
            "radius routes differ: sweep {:.9}, norm {:.9}",
            radius.sweep,
            radius.norm.unwrap_or(f64::NAN)
        ));
    }
    let stable = index.closed_loop_stable && radius.r <= index.zeta;
    Ok(StabilityReport {
        zeta: index.zeta,
        r: radius.r,
        slack: index.zeta - radius.r,
        stable,
        omega_star_zeta: index.omega_star,
        omega_star_r: radius.omega_star,
        oracle_agrees: !stable || oracle.stable,
        oracle,
        index: *index,
        radius,
        warnings,
    })
}

/// Certificate for gains perturbed inside the uncertain paths `J1`.
pub fn theorem2_verdict(
    sys: &MtdcSystem,
    j1: &PathSet,
    perturbed: &[(ParamPath, f64)],
    spec: &SweepSpec,
) -> Result<StabilityReport> {
    let params: Vec<ParamPath> = perturbed.iter().map(|(p, _)| p.clone()).collect();
    check_partition(sys, j1, &params)?;
    let nominal = build_coefficients(sys)?;
    let index = stability_index(&nominal, j1, spec)?;
    let moved = build_coefficients(&sys.with_gains(perturbed)?)?;
    report(&index, &nominal, &moved, j1, spec)
}
