use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::roots;
use crate::error::{Error, Result};

/// Relative cancellation threshold used when two coefficients are summed.
const CANCEL_EPS: f64 = 16.0 * f64::EPSILON;

/// Real-coefficient polynomial in `s`, stored in ascending powers.
///
/// `coeffs[k]` multiplies `s^k`. The zero polynomial is `[0]` and the
/// highest stored coefficient of any other polynomial is nonzero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "Vec<f64>", into = "Vec<f64>")]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl From<Vec<f64>> for Polynomial {
    fn from(coeffs: Vec<f64>) -> Self {
        Self::new(coeffs)
    }
}

impl From<Polynomial> for Vec<f64> {
    fn from(p: Polynomial) -> Self {
        p.coeffs
    }
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && *coeffs.last().unwrap() == 0.0 {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: vec![0.0] }
    }

    pub fn one() -> Self {
        Self::constant(1.0)
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    /// The polynomial `s`.
    pub fn s() -> Self {
        Self::new(vec![0.0, 1.0])
    }

    /// `gain * prod (s - r)` over the given roots. Complex roots are expected
    /// in conjugate pairs; any residual imaginary part is discarded.
    pub fn from_roots(roots: &[Complex64], gain: f64) -> Self {
        let mut acc = vec![Complex64::new(gain, 0.0)];
        for &r in roots {
            let mut next = vec![Complex64::new(0.0, 0.0); acc.len() + 1];
            for (k, &c) in acc.iter().enumerate() {
                next[k + 1] += c;
                next[k] -= c * r;
            }
            acc = next;
        }
        Self::new(acc.into_iter().map(|c| c.re).collect())
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == 0.0
    }

    /// Coefficient of the highest power.
    pub fn leading(&self) -> f64 {
        *self.coeffs.last().unwrap()
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn scale(&self, k: f64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    /// `p(-s)`: `coeffs[k] -> (-1)^k coeffs[k]`.
    pub fn reflect(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, &c)| if k % 2 == 1 { -c } else { c })
                .collect(),
        )
    }

    pub fn derivative(&self) -> Self {
        if self.degree() == 0 {
            return Self::zero();
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| k as f64 * c)
                .collect(),
        )
    }

    /// Horner evaluation.
    pub fn eval(&self, s: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * s + c)
    }

    pub fn eval_real(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    /// `t^n p(1/t)` with `n = degree`, i.e. the coefficient-reversed
    /// polynomial evaluated at `t`. Used for `|s| > 1`.
    pub fn eval_reversed(&self, t: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * t + c)
    }

    /// Sum of `|c_k| |s|^k`, the scale against which `|p(s)|` is judged.
    pub fn magnitude_bound(&self, s: Complex64) -> f64 {
        let r = s.norm();
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * r + c.abs())
    }

    /// Same bound for the reversed polynomial at `t`.
    pub fn reversed_magnitude_bound(&self, t: Complex64) -> f64 {
        let r = t.norm();
        self.coeffs.iter().fold(0.0, |acc, &c| acc * r + c.abs())
    }

    /// Roots with multiplicity.
    ///
    /// Exact zero roots are split off first; the remainder goes through the
    /// balanced companion matrix.
    pub fn roots(&self) -> Result<Vec<Complex64>> {
        if self.is_zero() || self.degree() == 0 {
            return Err(Error::Domain(
                "root finding needs a polynomial of degree >= 1".into(),
            ));
        }
        Ok(roots::roots(&self.coeffs))
    }

    /// `self * s^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut c = vec![0.0; k];
        c.extend_from_slice(&self.coeffs);
        Self::new(c)
    }

    fn combine(&self, other: &Self, sign: f64) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            let a = self.coeffs.get(k).copied().unwrap_or(0.0);
            let b = sign * other.coeffs.get(k).copied().unwrap_or(0.0);
            let v = a + b;
            // Flush cancellations that are pure rounding noise.
            if v.abs() <= CANCEL_EPS * (a.abs() + b.abs()) {
                out.push(0.0);
            } else {
                out.push(v);
            }
        }
        Self::new(out)
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.combine(rhs, 1.0)
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self.combine(rhs, -1.0)
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(-1.0)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0.0 && !(self.is_zero() && k == 0) {
                continue;
            }
            if !first {
                write!(f, " {} ", if c < 0.0 { '-' } else { '+' })?;
            } else if c < 0.0 {
                write!(f, "-")?;
            }
            let a = c.abs();
            match k {
                0 => write!(f, "{a}")?,
                1 => write!(f, "{a}*s")?,
                _ => write!(f, "{a}*s^{k}")?,
            }
            first = false;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trailing_zeros_are_trimmed() {
        let p = Polynomial::new(vec![1.0, 2.0, 0.0, 0.0]);
        assert_eq!(p.degree(), 1);
        assert_eq!(Polynomial::new(vec![]).coeffs(), &[0.0]);
        assert!(Polynomial::new(vec![0.0, 0.0]).is_zero());
    }

    #[test]
    fn reflect_is_an_involution() {
        let p = Polynomial::new(vec![1.0, -2.0, 3.0, 4.5]);
        assert_eq!(p.reflect().reflect(), p);
        assert_eq!(p.reflect().coeffs(), &[1.0, 2.0, 3.0, -4.5]);
    }

    #[test]
    fn leading_cancellation_drops_degree() {
        let a = Polynomial::new(vec![1.0, 0.1, 0.3]);
        let b = Polynomial::new(vec![0.0, 0.2, 0.1 + 0.2]);
        let d = &a - &b;
        assert_eq!(d.degree(), 1);
    }

    #[test]
    fn from_roots_rebuilds_quadratic() {
        let p = Polynomial::from_roots(
            &[Complex64::new(-1.0, 1.0), Complex64::new(-1.0, -1.0)],
            2.0,
        );
        assert_eq!(p.coeffs(), &[4.0, 4.0, 2.0]);
    }

    #[test]
    fn reversed_evaluation_matches_direct() {
        let p = Polynomial::new(vec![1.0, -3.0, 0.5, 2.0]);
        let s = Complex64::new(3.0, 4.0);
        let direct = p.eval(s);
        let via_rev = p.eval_reversed(1.0 / s) * s.powu(3);
        assert!((direct - via_rev).norm() < 1e-10 * direct.norm());
    }

    #[test]
    fn degree_zero_has_no_roots() {
        assert!(Polynomial::constant(3.0).roots().is_err());
        assert!(Polynomial::zero().roots().is_err());
    }
}
