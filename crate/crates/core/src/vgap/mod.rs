//! The nu-gap metric, uncertainty balls and the robust stability margin.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::freq::{chordal, chordal_pair, extremize, pair_at, Frequency, Mode, Objective, SweepSpec};
use crate::ratfun::{stability, Polynomial, RationalFunction, AXIS_TOL};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapResult {
    pub value: f64,
    pub comparable: bool,
    /// A pole or zero sits on the imaginary axis, so the census test alone
    /// does not settle comparability.
    pub indeterminate: bool,
    pub omega_star: Frequency,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarginResult {
    pub value: f64,
    pub closed_loop_stable: bool,
    pub abscissa: f64,
    pub omega_star: Frequency,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Comparability {
    pub comparable: bool,
    pub indeterminate: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub certified_stable: bool,
    pub margin: f64,
    pub slack: f64,
}

/// Census comparability: equal pole and zero counts in each half-plane and
/// on the axis.
pub fn comparability(g1: &RationalFunction, g2: &RationalFunction) -> Comparability {
    let a = g1.census(AXIS_TOL);
    let b = g2.census(AXIS_TOL);
    let comparable = a.poles_lhp == b.poles_lhp
        && a.poles_rhp == b.poles_rhp
        && a.zeros_lhp == b.zeros_lhp
        && a.zeros_rhp == b.zeros_rhp
        && a.poles_axis == b.poles_axis
        && a.zeros_axis == b.zeros_axis;
    Comparability {
        comparable,
        indeterminate: a.has_axis_roots() || b.has_axis_roots(),
    }
}

pub fn comparable(g1: &RationalFunction, g2: &RationalFunction) -> bool {
    comparability(g1, g2).comparable
}

fn seeds(fs: &[&RationalFunction]) -> Vec<f64> {
    fs.iter().flat_map(|f| f.modal_frequencies()).collect()
}

/// Largest pointwise chordal distance over the axis, ignoring comparability.
pub fn max_chordal(g1: &RationalFunction, g2: &RationalFunction, spec: &SweepSpec) -> Result<(f64, Frequency)> {
    let obj = Objective::new(|w| chordal(g1, g2, Frequency::Finite(w)))
        .at_zero(chordal(g1, g2, Frequency::Zero))
        .at_infinity(chordal(g1, g2, Frequency::Infinity))
        .seeds(seeds(&[g1, g2]));
    let e = extremize(&obj, Mode::Max, spec)?;
    Ok((e.value.clamp(0.0, 1.0).asin(), e.omega_star))
}

pub fn v_gap(g1: &RationalFunction, g2: &RationalFunction, spec: &SweepSpec) -> Result<GapResult> {
    let c = comparability(g1, g2);
    if !c.comparable {
        return Ok(GapResult {
            value: std::f64::consts::FRAC_PI_2,
            comparable: false,
            indeterminate: c.indeterminate,
            omega_star: Frequency::Zero,
        });
    }
    let (value, omega_star) = max_chordal(g1, g2, spec)?;
    Ok(GapResult {
        value,
        comparable: true,
        indeterminate: c.indeterminate,
        omega_star,
    })
}

pub fn ball_contains(
    center: &RationalFunction,
    radius: f64,
    g: &RationalFunction,
    spec: &SweepSpec,
) -> Result<bool> {
    if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&radius) {
        return Err(Error::Domain(format!("radius {radius} outside [0, pi/2]")));
    }
    Ok(v_gap(center, g, spec)?.value <= radius)
}

/// `num_P num_C + den_P den_C`, left unreduced.
pub fn characteristic_polynomial(p: &RationalFunction, c: &RationalFunction) -> Polynomial {
    &(p.num() * c.num()) + &(p.den() * c.den())
}

/// Closed-loop stability of the negative-feedback interconnection of `p`
/// and `c` from its characteristic polynomial. Because `p` and `c` are
/// reduced separately, an unstable pole of one cancelled by a zero of the
/// other stays a root here.
pub fn closed_loop_stability(p: &RationalFunction, c: &RationalFunction) -> Result<(bool, f64)> {
    let ch = characteristic_polynomial(p, c);
    if ch.is_zero() {
        return Err(Error::DegenerateLoop);
    }
    if ch.degree() == 0 {
        return Ok((true, f64::NEG_INFINITY));
    }
    Ok(stability(&ch.roots()?, AXIS_TOL))
}

/// `b[P, C]`: zero for an unstable loop, else the smallest chordal distance
/// between `P` and `-1/C` along the axis.
pub fn stability_margin(p: &RationalFunction, c: &RationalFunction, spec: &SweepSpec) -> Result<MarginResult> {
    let (stable, abscissa) = closed_loop_stability(p, c)?;
    if !stable {
        return Ok(MarginResult {
            value: 0.0,
            closed_loop_stable: false,
            abscissa,
            omega_star: Frequency::Zero,
        });
    }
    // -1/C as a homogeneous pair is (-den_C, num_C); C = 0 becomes infinity.
    let dist = |f: Frequency| {
        let (nc, dc) = pair_at(c, f);
        chordal_pair(pair_at(p, f), (-dc, nc))
    };
    let obj = Objective::new(|w| dist(Frequency::Finite(w)))
        .at_zero(dist(Frequency::Zero))
        .at_infinity(dist(Frequency::Infinity))
        .seeds(seeds(&[p, c]));
    let e = extremize(&obj, Mode::Min, spec)?;
    Ok(MarginResult {
        value: e.value.clamp(0.0, 1.0).asin(),
        closed_loop_stable: true,
        abscissa,
        omega_star: e.omega_star,
    })
}

/// Robust stability for all plants within `r_p` and controllers within `r_c`.
pub fn theorem1_certify(
    p: &RationalFunction,
    c: &RationalFunction,
    r_p: f64,
    r_c: f64,
    spec: &SweepSpec,
) -> Result<Certificate> {
    if r_p < 0.0 || r_c < 0.0 {
        return Err(Error::Domain("radii must be nonnegative".into()));
    }
    let m = stability_margin(p, c, spec)?;
    Ok(Certificate {
        certified_stable: m.value > 0.0 && r_p + r_c <= m.value,
        margin: m.value,
        slack: m.value - r_p - r_c,
    })
}

/// Chordal distance between `P(jw)` and `-1/C(jw)` from plain values.
pub fn margin_integrand(p: Complex64, c: Complex64) -> f64 {
    let one = Complex64::new(1.0, 0.0);
    chordal_pair((p, one), (-one, c))
}
