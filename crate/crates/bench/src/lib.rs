//! Fixtures shared by the criterion benchmarks in `benches/`.

use nugap_core::mtdc::{benchmark, MtdcSystem};
use nugap_core::{Complex64, Polynomial, RationalFunction};

/// Degree-`n` polynomial with roots spread over both half-planes.
pub fn spread_polynomial(n: usize) -> Polynomial {
    let roots: Vec<Complex64> = (0..n)
        .map(|k| {
            let a = std::f64::consts::PI * (k as f64 + 0.5) / n as f64;
            Complex64::new(-(1.0 + k as f64) * a.cos(), 0.0)
        })
        .collect();
    Polynomial::from_roots(&roots, 1.0)
}

/// Lightly damped second-order section `1 / (s^2 + 0.2 s + 1)`.
pub fn resonator() -> RationalFunction {
    RationalFunction::from_coeffs(vec![1.0], vec![1.0, 0.2, 1.0]).expect("valid")
}

/// A stable third-order plant and a nearby perturbation of it.
pub fn plant_pair() -> (RationalFunction, RationalFunction) {
    let p = RationalFunction::from_coeffs(vec![2.0, 1.0], vec![6.0, 11.0, 6.0, 1.0]).expect("valid");
    let q = RationalFunction::from_coeffs(vec![2.2, 1.0], vec![6.5, 11.5, 6.0, 1.0]).expect("valid");
    (p, q)
}

pub fn system() -> MtdcSystem {
    benchmark().system
}
