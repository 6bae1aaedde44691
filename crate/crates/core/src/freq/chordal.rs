use num_complex::Complex64;

use super::Frequency;
use crate::ratfun::RationalFunction;

/// Homogeneous value of `g` at `j*omega` (or at infinity).
pub fn pair_at(g: &RationalFunction, omega: Frequency) -> (Complex64, Complex64) {
    match omega {
        Frequency::Zero => g.eval_pair(Complex64::new(0.0, 0.0)),
        Frequency::Finite(w) => g.eval_pair(Complex64::new(0.0, w)),
        Frequency::Infinity => {
            let (n, d) = g.pair_at_infinity();
            (Complex64::new(n, 0.0), Complex64::new(d, 0.0))
        }
    }
}

/// Chordal distance between two points of the Riemann sphere given as
/// homogeneous pairs. Poles are pairs with `d = 0`.
pub fn chordal_pair(a: (Complex64, Complex64), b: (Complex64, Complex64)) -> f64 {
    let na = (a.0.norm_sqr() + a.1.norm_sqr()).sqrt();
    let nb = (b.0.norm_sqr() + b.1.norm_sqr()).sqrt();
    // Normalize first so the cross product cannot overflow.
    let (a0, a1) = (a.0 / na, a.1 / na);
    let (b0, b1) = (b.0 / nb, b.1 / nb);
    (a0 * b1 - b0 * a1).norm().min(1.0)
}

/// `|a - b| / sqrt((1 + |a|^2)(1 + |b|^2))` on plain complex values.
pub fn chordal_values(a: Complex64, b: Complex64) -> f64 {
    let one = Complex64::new(1.0, 0.0);
    match (a.is_finite(), b.is_finite()) {
        (true, true) => chordal_pair((a, one), (b, one)),
        (false, false) => 0.0,
        (false, true) => chordal_pair((one, Complex64::new(0.0, 0.0)), (b, one)),
        (true, false) => chordal_pair((a, one), (one, Complex64::new(0.0, 0.0))),
    }
}

/// Pointwise chordal distance between `g1(j*omega)` and `g2(j*omega)`.
pub fn chordal(g1: &RationalFunction, g2: &RationalFunction, omega: Frequency) -> f64 {
    chordal_pair(pair_at(g1, omega), pair_at(g2, omega))
}
