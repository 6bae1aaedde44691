use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Zero and pole counts by half-plane.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct HalfPlaneCensus {
    pub poles_lhp: usize,
    pub poles_rhp: usize,
    pub poles_axis: usize,
    pub zeros_lhp: usize,
    pub zeros_rhp: usize,
    pub zeros_axis: usize,
    pub relative_degree: i64,
}

impl HalfPlaneCensus {
    pub fn has_axis_roots(&self) -> bool {
        self.poles_axis + self.zeros_axis > 0
    }
}

fn bucket(roots: &[Complex64], axis_tol: f64) -> (usize, usize, usize) {
    let mut out = (0, 0, 0);
    for r in roots {
        if r.re.abs() <= axis_tol {
            out.2 += 1;
        } else if r.re < 0.0 {
            out.0 += 1;
        } else {
            out.1 += 1;
        }
    }
    out
}

pub(crate) fn classify(
    zeros: &[Complex64],
    poles: &[Complex64],
    relative_degree: i64,
    axis_tol: f64,
) -> HalfPlaneCensus {
    let (zl, zr, za) = bucket(zeros, axis_tol);
    let (pl, pr, pa) = bucket(poles, axis_tol);
    HalfPlaneCensus {
        poles_lhp: pl,
        poles_rhp: pr,
        poles_axis: pa,
        zeros_lhp: zl,
        zeros_rhp: zr,
        zeros_axis: za,
        relative_degree,
    }
}

/// Stable iff every root has `Re < -axis_tol`; also returns the abscissa.
pub fn stability(roots: &[Complex64], axis_tol: f64) -> (bool, f64) {
    let abscissa = roots
        .iter()
        .map(|r| r.re)
        .fold(f64::NEG_INFINITY, f64::max);
    (abscissa < -axis_tol, abscissa)
}

#[cfg(test)]
mod tests {
    use crate::ratfun::RationalFunction;

    #[test]
    fn first_order() {
        let g = RationalFunction::from_coeffs(vec![1.0], vec![1.0, 1.0]).unwrap();
        let c = g.census(1e-9);
        assert_eq!(c.poles_lhp, 1);
        assert_eq!(c.relative_degree, 1);
        assert_eq!(c.poles_rhp + c.poles_axis + c.zeros_lhp + c.zeros_rhp + c.zeros_axis, 0);
    }

    #[test]
    fn nonminimum_phase_zero() {
        let g = RationalFunction::from_coeffs(vec![-1.0, 1.0], vec![1.0, 1.0]).unwrap();
        let c = g.census(1e-9);
        assert_eq!((c.zeros_rhp, c.poles_lhp), (1, 1));
    }

    #[test]
    fn axis_zeros() {
        let g = RationalFunction::from_coeffs(vec![1.0, 0.0, 1.0], vec![2.0, 2.0, 1.0]).unwrap();
        let c = g.census(1e-9);
        assert_eq!((c.zeros_axis, c.poles_lhp), (2, 2));
        assert!(c.has_axis_roots());
    }

    #[test]
    fn stability_examples() {
        let g = RationalFunction::from_coeffs(vec![1.0], vec![1.0, 1.0]).unwrap();
        let (ok, a) = g.is_stable();
        assert!(ok && (a + 1.0).abs() < 1e-15);
        let g = RationalFunction::from_coeffs(vec![1.0], vec![-0.5, 1.0]).unwrap();
        let (ok, a) = g.is_stable();
        assert!(!ok && (a - 0.5).abs() < 1e-15);
        let g = RationalFunction::from_coeffs(vec![1.0], vec![1.0, 0.2, 1.0]).unwrap();
        let (ok, a) = g.is_stable();
        assert!(ok && (a + 0.1).abs() < 1e-12);
    }
}
