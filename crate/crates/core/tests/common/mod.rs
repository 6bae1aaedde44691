#![allow(dead_code)]

use nugap_core::mtdc::{benchmark, MtdcSystem, ParamPath};
use nugap_core::{Complex64, RationalFunction, SweepSpec};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn tf(n: &[f64], d: &[f64]) -> RationalFunction {
    RationalFunction::from_coeffs(n.to_vec(), d.to_vec()).unwrap()
}

pub fn spec() -> SweepSpec {
    SweepSpec::default()
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn bench() -> MtdcSystem {
    benchmark().system
}

pub fn param(s: &str) -> ParamPath {
    s.parse().unwrap()
}

/// Product of `(s - r)` over `roots`, expanded by hand.
pub fn expand(roots: &[Complex64]) -> Vec<Complex64> {
    let mut c = vec![Complex64::new(1.0, 0.0)];
    for r in roots {
        let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
        for (k, v) in c.iter().enumerate() {
            next[k + 1] += v;
            next[k] -= v * r;
        }
        c = next;
    }
    c
}

/// Real polynomial with the given real roots and conjugate pairs.
pub fn real_poly(real: &[f64], pairs: &[(f64, f64)]) -> Vec<f64> {
    let mut roots: Vec<Complex64> = real.iter().map(|&r| Complex64::new(r, 0.0)).collect();
    for &(re, im) in pairs {
        roots.push(Complex64::new(re, im));
        roots.push(Complex64::new(re, -im));
    }
    expand(&roots).iter().map(|c| c.re).collect()
}

pub fn horner(c: &[f64], s: Complex64) -> Complex64 {
    c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &v| acc * s + v)
}

/// Stable proper function with `np` real poles in `[-10, -0.1]` and up to
/// `np` zeros on the given side of the axis.
pub fn random_stable(r: &mut StdRng, np: usize, nz: usize, rhp_zeros: bool) -> RationalFunction {
    let poles: Vec<f64> = (0..np).map(|_| -10f64.powf(r.gen_range(-1.0..1.0))).collect();
    let zeros: Vec<f64> = (0..nz.min(np))
        .map(|_| {
            let z = 10f64.powf(r.gen_range(-1.0..1.0));
            if rhp_zeros {
                z
            } else {
                -z
            }
        })
        .collect();
    let k = r.gen_range(0.2..5.0) * if r.gen_bool(0.5) { 1.0 } else { -1.0 };
    let num: Vec<f64> = real_poly(&zeros, &[]).iter().map(|v| v * k).collect();
    tf(&num, &real_poly(&poles, &[]))
}

pub fn log_uniform(r: &mut StdRng, lo: f64, hi: f64) -> f64 {
    10f64.powf(r.gen_range(lo.log10()..hi.log10()))
}
