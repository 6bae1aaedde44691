use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::census::{self, HalfPlaneCensus};
use super::poly::Polynomial;
use crate::error::{Error, Result};

/// Relative distance below which a zero and a pole cancel.
pub const CANCEL_TOL: f64 = 1e-7;

/// Relative distance below which two poles of different summands are merged
/// into one common-denominator factor.
const COMMON_POLE_TOL: f64 = 1e-7;

/// Default absolute tolerance on `Re` for the imaginary-axis bucket.
pub const AXIS_TOL: f64 = 1e-9;

/// Ratio of real polynomials, kept reduced with a monic denominator.
///
/// Zeros and poles are cached alongside the coefficients so that products and
/// sums cancel common factors without re-rooting large polynomials.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "TfFile", into = "TfFile")]
pub struct RationalFunction {
    num: Polynomial,
    den: Polynomial,
    zeros: Vec<Complex64>,
    poles: Vec<Complex64>,
}

/// On-disk form: `{"num": [...], "den": [...]}` in ascending powers.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TfFile {
    pub num: Vec<f64>,
    pub den: Vec<f64>,
}

impl TryFrom<TfFile> for RationalFunction {
    type Error = Error;
    fn try_from(f: TfFile) -> Result<Self> {
        RationalFunction::from_coeffs(f.num, f.den)
    }
}

impl From<RationalFunction> for TfFile {
    fn from(g: RationalFunction) -> Self {
        TfFile {
            num: g.num.coeffs().to_vec(),
            den: g.den.coeffs().to_vec(),
        }
    }
}

impl RationalFunction {
    /// Reads a `.tf` file.
    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// `.tf` text at full precision.
    pub fn to_tf_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("finite coefficients serialize")
    }
}

impl PartialEq for RationalFunction {
    fn eq(&self, other: &Self) -> bool {
        self.num == other.num && self.den == other.den
    }
}

fn cancel(zeros: Vec<Complex64>, poles: Vec<Complex64>) -> (Vec<Complex64>, Vec<Complex64>, bool) {
    cancel_with(zeros, poles, CANCEL_TOL)
}

/// Greedy nearest-first cancellation of zeros against poles.
/// Returns the survivors and whether anything was removed.
fn cancel_with(zeros: Vec<Complex64>, poles: Vec<Complex64>, tol: f64) -> (Vec<Complex64>, Vec<Complex64>, bool) {
    if zeros.is_empty() || poles.is_empty() {
        return (zeros, poles, false);
    }
    let mut pairs = Vec::new();
    for (i, &z) in zeros.iter().enumerate() {
        for (j, &p) in poles.iter().enumerate() {
            let d = (z - p).norm();
            if d <= tol * (1.0 + z.norm().max(p.norm())) {
                pairs.push((d, i, j));
            }
        }
    }
    if pairs.is_empty() {
        return (zeros, poles, false);
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut zdead = vec![false; zeros.len()];
    let mut pdead = vec![false; poles.len()];
    for (_, i, j) in pairs {
        if !zdead[i] && !pdead[j] {
            zdead[i] = true;
            pdead[j] = true;
        }
    }
    let z = zeros
        .into_iter()
        .zip(zdead)
        .filter_map(|(z, d)| (!d).then_some(z))
        .collect();
    let p = poles
        .into_iter()
        .zip(pdead)
        .filter_map(|(p, d)| (!d).then_some(p))
        .collect();
    (z, p, true)
}

fn roots_or_empty(p: &Polynomial) -> Vec<Complex64> {
    if p.degree() == 0 {
        Vec::new()
    } else {
        p.roots().expect("degree >= 1")
    }
}

impl RationalFunction {
    /// Reduces `num / den`. Fails if `den` is the zero polynomial.
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::Domain("denominator is the zero polynomial".into()));
        }
        if num.coeffs().iter().chain(den.coeffs()).any(|c| !c.is_finite()) {
            return Err(Error::Domain("non-finite coefficient".into()));
        }
        if num.is_zero() {
            return Ok(Self::zero());
        }
        let zeros = roots_or_empty(&num);
        let poles = roots_or_empty(&den);
        Ok(Self::assemble(num, den, zeros, poles))
    }

    pub fn from_coeffs(num: Vec<f64>, den: Vec<f64>) -> Result<Self> {
        Self::new(Polynomial::new(num), Polynomial::new(den))
    }

    /// `gain * prod(s - z) / prod(s - p)`.
    pub fn from_zpk(zeros: Vec<Complex64>, poles: Vec<Complex64>, gain: f64) -> Self {
        if gain == 0.0 {
            return Self::zero();
        }
        let (z, p, _) = cancel(zeros, poles);
        Self::from_reduced_roots(z, p, gain)
    }

    fn from_reduced_roots(zeros: Vec<Complex64>, poles: Vec<Complex64>, gain: f64) -> Self {
        let num = Polynomial::from_roots(&zeros, gain);
        let den = Polynomial::from_roots(&poles, 1.0);
        Self {
            num,
            den,
            zeros,
            poles,
        }
    }

    /// Cancels pole-zero pairs closer than `tol * (1 + max|root|)`, a looser
    /// rule than the one applied by every operation.
    pub fn cancel_within(&self, tol: f64) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let (z, p, changed) = cancel_with(self.zeros.clone(), self.poles.clone(), tol);
        if changed {
            Self::from_reduced_roots(z, p, self.gain())
        } else {
            self.clone()
        }
    }

    /// Cancels common roots; keeps the given coefficients when nothing cancels.
    fn assemble(num: Polynomial, den: Polynomial, zeros: Vec<Complex64>, poles: Vec<Complex64>) -> Self {
        let gain = num.leading() / den.leading();
        let (z, p, changed) = cancel(zeros, poles);
        if changed {
            return Self::from_reduced_roots(z, p, gain);
        }
        let lead = den.leading();
        Self {
            num: num.scale(1.0 / lead),
            den: den.scale(1.0 / lead),
            zeros: z,
            poles: p,
        }
    }

    pub fn zero() -> Self {
        Self {
            num: Polynomial::zero(),
            den: Polynomial::one(),
            zeros: Vec::new(),
            poles: Vec::new(),
        }
    }

    pub fn one() -> Self {
        Self::constant(1.0)
    }

    pub fn constant(c: f64) -> Self {
        if c == 0.0 {
            return Self::zero();
        }
        Self {
            num: Polynomial::constant(c),
            den: Polynomial::one(),
            zeros: Vec::new(),
            poles: Vec::new(),
        }
    }

    /// The function `s`.
    pub fn s() -> Self {
        Self {
            num: Polynomial::s(),
            den: Polynomial::one(),
            zeros: vec![Complex64::new(0.0, 0.0)],
            poles: Vec::new(),
        }
    }

    pub fn polynomial(p: Polynomial) -> Self {
        Self::new(p, Polynomial::one()).expect("nonzero denominator")
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    pub fn zeros(&self) -> &[Complex64] {
        &self.zeros
    }

    pub fn poles(&self) -> &[Complex64] {
        &self.poles
    }

    /// High-frequency gain `lead(num) / lead(den)`.
    pub fn gain(&self) -> f64 {
        self.num.leading() / self.den.leading()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// `deg den - deg num`.
    pub fn relative_degree(&self) -> i64 {
        self.den.degree() as i64 - self.num.degree() as i64
    }

    pub fn is_proper(&self) -> bool {
        self.is_zero() || self.relative_degree() >= 0
    }

    pub fn scale(&self, k: f64) -> Self {
        if k == 0.0 || self.is_zero() {
            return Self::zero();
        }
        Self {
            num: self.num.scale(k),
            den: self.den.clone(),
            zeros: self.zeros.clone(),
            poles: self.poles.clone(),
        }
    }

    /// `G(-s)`.
    pub fn reflect(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let num = self.num.reflect();
        let den = self.den.reflect();
        let lead = den.leading();
        Self {
            num: num.scale(1.0 / lead),
            den: den.scale(1.0 / lead),
            zeros: self.zeros.iter().map(|z| -z).collect(),
            poles: self.poles.iter().map(|p| -p).collect(),
        }
    }

    /// `1 / G`.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let lead = self.num.leading();
        Ok(Self {
            num: self.den.scale(1.0 / lead),
            den: self.num.scale(1.0 / lead),
            zeros: self.poles.clone(),
            poles: self.zeros.clone(),
        })
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self> {
        Ok(self * &rhs.inv()?)
    }

    fn mul_impl(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        let zeros: Vec<_> = self.zeros.iter().chain(&rhs.zeros).copied().collect();
        let poles: Vec<_> = self.poles.iter().chain(&rhs.poles).copied().collect();
        let (z, p, changed) = cancel(zeros, poles);
        if changed {
            Self::from_reduced_roots(z, p, self.gain() * rhs.gain())
        } else {
            Self {
                num: &self.num * &rhs.num,
                den: &self.den * &rhs.den,
                zeros: z,
                poles: p,
            }
        }
    }

    fn add_impl(&self, rhs: &Self) -> Self {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        // Split poles into those shared by both summands and the rest.
        let mut pa: Vec<Complex64> = self.poles.clone();
        let mut common = Vec::new();
        let mut rest_b = Vec::new();
        for &q in &rhs.poles {
            let best = pa
                .iter()
                .enumerate()
                .map(|(i, p)| (i, (p - q).norm()))
                .min_by(|a, b| a.1.total_cmp(&b.1));
            match best {
                Some((i, d)) if d <= COMMON_POLE_TOL * (1.0 + q.norm()) => {
                    common.push(pa.swap_remove(i));
                }
                _ => rest_b.push(q),
            }
        }
        let na = &self.num * &Polynomial::from_roots(&rest_b, 1.0);
        let nb = &rhs.num * &Polynomial::from_roots(&pa, 1.0);
        let num = &na + &nb;
        if num.is_zero() {
            return Self::zero();
        }
        let poles: Vec<Complex64> = common.into_iter().chain(pa).chain(rest_b).collect();
        let den = Polynomial::from_roots(&poles, 1.0);
        let zeros = roots_or_empty(&num);
        Self::assemble(num, den, zeros, poles)
    }

    /// Horner evaluation, in the reciprocal variable when `|s| > 1`.
    pub fn eval(&self, s: Complex64) -> Result<Complex64> {
        let tiny = 64.0 * f64::EPSILON;
        if s.norm() <= 1.0 {
            let d = self.den.eval(s);
            if d.norm() <= tiny * self.den.magnitude_bound(s) {
                return Err(Error::PoleAtPoint(s));
            }
            return Ok(self.num.eval(s) / d);
        }
        let t = 1.0 / s;
        let d = self.den.eval_reversed(t);
        if d.norm() <= tiny * self.den.reversed_magnitude_bound(t) {
            return Err(Error::PoleAtPoint(s));
        }
        let shift = self.num.degree() as i32 - self.den.degree() as i32;
        Ok(self.num.eval_reversed(t) / d * s.powi(shift))
    }

    /// Homogeneous value `(n, d)` with `G(s) = n / d`, both scaled by
    /// `s^-max(deg)` when `|s| > 1` so neither overflows.
    pub fn eval_pair(&self, s: Complex64) -> (Complex64, Complex64) {
        if s.norm() <= 1.0 {
            return (self.num.eval(s), self.den.eval(s));
        }
        let t = 1.0 / s;
        let dn = self.num.degree() as i32;
        let dd = self.den.degree() as i32;
        let m = dn.max(dd);
        let n = self.num.eval_reversed(t) * t.powi(m - dn);
        let d = self.den.eval_reversed(t) * t.powi(m - dd);
        (n, d)
    }

    /// Homogeneous value at `s = infinity` from leading coefficients.
    pub fn pair_at_infinity(&self) -> (f64, f64) {
        let dn = self.num.degree();
        let dd = self.den.degree();
        if self.is_zero() {
            return (0.0, 1.0);
        }
        match dn.cmp(&dd) {
            std::cmp::Ordering::Less => (0.0, 1.0),
            std::cmp::Ordering::Equal => (self.num.leading(), self.den.leading()),
            std::cmp::Ordering::Greater => (1.0, 0.0),
        }
    }

    pub fn eval_jw(&self, omega: f64) -> Result<Complex64> {
        self.eval(Complex64::new(0.0, omega))
    }

    pub fn census(&self, axis_tol: f64) -> HalfPlaneCensus {
        census::classify(&self.zeros, &self.poles, self.relative_degree(), axis_tol)
    }

    /// `(stable, spectral abscissa)`; a function without poles is stable with
    /// abscissa `-inf`.
    pub fn is_stable(&self) -> (bool, f64) {
        census::stability(&self.poles, AXIS_TOL)
    }

    /// Largest `|Im|` and `|root|` of every finite zero and pole, used to seed
    /// frequency searches.
    pub fn modal_frequencies(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for r in self.zeros.iter().chain(&self.poles) {
            if r.im.abs() > 0.0 {
                out.push(r.im.abs());
            }
            if r.norm() > 0.0 {
                out.push(r.norm());
            }
        }
        out
    }
}

impl Add for &RationalFunction {
    type Output = RationalFunction;
    fn add(self, rhs: &RationalFunction) -> RationalFunction {
        self.add_impl(rhs)
    }
}

impl Sub for &RationalFunction {
    type Output = RationalFunction;
    fn sub(self, rhs: &RationalFunction) -> RationalFunction {
        self.add_impl(&-rhs)
    }
}

impl Mul for &RationalFunction {
    type Output = RationalFunction;
    fn mul(self, rhs: &RationalFunction) -> RationalFunction {
        self.mul_impl(rhs)
    }
}

impl Neg for &RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        self.scale(-1.0)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for RationalFunction {
            type Output = RationalFunction;
            fn $m(self, rhs: RationalFunction) -> RationalFunction {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&RationalFunction> for RationalFunction {
            type Output = RationalFunction;
            fn $m(self, rhs: &RationalFunction) -> RationalFunction {
                (&self).$m(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        self.scale(-1.0)
    }
}

impl From<f64> for RationalFunction {
    fn from(c: f64) -> Self {
        Self::constant(c)
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) / ({})", self.num, self.den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn tf(n: &[f64], d: &[f64]) -> RationalFunction {
        RationalFunction::from_coeffs(n.to_vec(), d.to_vec()).unwrap()
    }

    #[test]
    fn first_order_at_j() {
        let g = tf(&[1.0], &[1.0, 1.0]);
        let v = g.eval(c(0.0, 1.0)).unwrap();
        assert!((v - c(0.5, -0.5)).norm() < 1e-15);
    }

    #[test]
    fn s_at_zero() {
        assert_eq!(RationalFunction::s().eval(c(0.0, 0.0)).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn pole_is_reported() {
        let g = tf(&[1.0], &[1.0, 1.0]);
        match g.eval(c(-1.0, 0.0)) {
            Err(Error::PoleAtPoint(p)) => assert_eq!(p, c(-1.0, 0.0)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn sum_of_equal_terms() {
        let g = tf(&[1.0], &[1.0, 1.0]);
        let h = &g + &g;
        assert_eq!(h.num().coeffs(), &[2.0]);
        assert_eq!(h.den().coeffs(), &[1.0, 1.0]);
    }

    #[test]
    fn reflect_sign_rule() {
        let g = tf(&[1.0], &[1.0, 1.0]).reflect();
        // 1/(1 - s) normalized to a monic denominator.
        assert_eq!(g.num().coeffs(), &[-1.0]);
        assert_eq!(g.den().coeffs(), &[-1.0, 1.0]);
        let v = g.eval(c(0.3, 0.0)).unwrap();
        assert!((v.re - 1.0 / 0.7).abs() < 1e-14);
    }

    #[test]
    fn product_cancels() {
        let a = tf(&[1.0, 1.0], &[2.0, 1.0]);
        let b = tf(&[2.0, 1.0], &[3.0, 1.0]);
        let p = &a * &b;
        assert_eq!(p.num().degree(), 1);
        assert_eq!(p.den().degree(), 1);
        assert!((p.num().coeffs()[0] - 1.0).abs() < 1e-12);
        assert!((p.den().coeffs()[0] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn difference_to_zero() {
        let g = tf(&[1.0, 2.0], &[3.0, 1.0, 1.0]);
        assert!((&g - &g).is_zero());
    }

    #[test]
    fn inverse_of_zero_fails() {
        assert!(matches!(RationalFunction::zero().inv(), Err(Error::DivisionByZero)));
        assert!(RationalFunction::from_coeffs(vec![1.0], vec![0.0]).is_err());
    }

    #[test]
    fn tf_file_round_trip() {
        let g: RationalFunction = serde_json::from_str(r#"{"num":[1,0,1],"den":[2,1]}"#).unwrap();
        assert_eq!(g.num().coeffs(), &[1.0, 0.0, 1.0]);
        let s = serde_json::to_string(&g).unwrap();
        let h: RationalFunction = serde_json::from_str(&s).unwrap();
        assert_eq!(g, h);
    }

    #[test]
    fn large_s_pair_is_finite() {
        let g = tf(&[1.0, 0.0, 0.0, 0.0, 1.0], &[1.0, 1.0]);
        let (n, d) = g.eval_pair(c(0.0, 1e200));
        assert!(n.norm().is_finite() && d.norm().is_finite());
        assert_eq!(g.pair_at_infinity(), (1.0, 0.0));
    }
}
