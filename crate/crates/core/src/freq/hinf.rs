use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::extremize::refine_near;
use super::{extremize, Frequency, Mode, Objective, SweepSpec};
use crate::error::{Error, Result};
use crate::ratfun::{Polynomial, RationalFunction, AXIS_TOL};

/// Relative offset of the certification levels above and below the peak.
const LEVEL_GAP: f64 = 2e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HinfNorm {
    pub value: f64,
    pub omega: Frequency,
    /// The level-set test found no crossing above the reported peak.
    pub certified: bool,
}

/// `|p(j w)|^2` as a polynomial in `x = w^2`.
fn squared_magnitude(p: &Polynomial) -> Polynomial {
    let q = p * &p.reflect();
    let c: Vec<f64> = q
        .coeffs()
        .iter()
        .step_by(2)
        .enumerate()
        .map(|(k, &v)| if k % 2 == 1 { -v } else { v })
        .collect();
    Polynomial::new(c)
}

/// Nonnegative real roots `x` of `gamma^2 |den|^2 - |num|^2`.
fn level_crossings(pn: &Polynomial, pd: &Polynomial, gamma: f64) -> Vec<f64> {
    let l = &pd.scale(gamma * gamma) - pn;
    if l.is_zero() || l.degree() == 0 {
        return Vec::new();
    }
    let roots = match l.roots() {
        Ok(r) => r,
        Err(_) => return Vec::new(),
    };
    roots
        .into_iter()
        .filter(|x| x.im.abs() <= 1e-6 * (1.0 + x.norm()) && x.re >= -1e-9 * (1.0 + x.norm()))
        .map(|x| x.re.max(0.0))
        .collect()
}

fn magnitude(g: &RationalFunction, w: f64) -> f64 {
    let (n, d) = g.eval_pair(Complex64::new(0.0, w));
    (n / d).norm()
}

/// Peak of `|g(j w)|` over `w >= 0`, certified by a level-set test.
pub fn hinf_norm(g: &RationalFunction, spec: &SweepSpec) -> Result<HinfNorm> {
    if !g.is_proper() {
        return Err(Error::UnboundedAtInfinity);
    }
    if let Some(p) = g.poles().iter().find(|p| p.re.abs() <= AXIS_TOL) {
        return Err(Error::InfiniteNorm(p.im.abs()));
    }
    if g.is_zero() {
        return Ok(HinfNorm {
            value: 0.0,
            omega: Frequency::Zero,
            certified: true,
        });
    }
    let at_inf = if g.relative_degree() == 0 {
        g.gain().abs()
    } else {
        0.0
    };
    let obj = Objective::new(|w| magnitude(g, w))
        .at_zero(magnitude(g, 0.0))
        .at_infinity(at_inf)
        .seeds(g.modal_frequencies());
    let e = extremize(&obj, Mode::Max, spec)?;
    let (mut value, mut omega) = (e.value, e.omega_star);

    let pn = squared_magnitude(g.num());
    let pd = squared_magnitude(g.den());
    let mut certified = false;
    for _ in 0..8 {
        let hi = value * (1.0 + LEVEL_GAP);
        let above = level_crossings(&pn, &pd, hi)
            .into_iter()
            .map(f64::sqrt)
            .filter(|&w| magnitude(g, w) > value * (1.0 + LEVEL_GAP / 2.0))
            .max_by(|a, b| magnitude(g, *a).total_cmp(&magnitude(g, *b)));
        match above {
            None => {
                certified = true;
                break;
            }
            Some(w) => {
                let (w2, v2) = if w > 0.0 {
                    refine_near(&obj, Mode::Max, w, spec)
                } else {
                    (0.0, magnitude(g, 0.0))
                };
                if v2 > value {
                    value = v2;
                    omega = if w2 == 0.0 {
                        Frequency::Zero
                    } else {
                        Frequency::Finite(w2)
                    };
                } else {
                    break;
                }
            }
        }
    }
    Ok(HinfNorm {
        value,
        omega,
        certified,
    })
}
