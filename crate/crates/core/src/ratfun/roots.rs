//! Polynomial roots via eigenvalues of the balanced companion matrix.

use nalgebra::DMatrix;
use num_complex::Complex64;

const SCHUR_MAX_ITER: usize = 10_000;

/// All roots of the polynomial with ascending coefficients `coeffs`
/// (degree >= 1, nonzero leading coefficient).
pub(crate) fn roots(coeffs: &[f64]) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(coeffs.len() - 1);
    let lead = coeffs.iter().position(|&c| c != 0.0).unwrap_or(0);
    out.extend(std::iter::repeat(Complex64::new(0.0, 0.0)).take(lead));
    let c = &coeffs[lead..];
    let n = c.len() - 1;
    match n {
        0 => {}
        1 => out.push(Complex64::new(-c[0] / c[1], 0.0)),
        2 => out.extend(quadratic(c[2], c[1], c[0])),
        _ => {
            let mut r = companion_roots(c).unwrap_or_else(|| aberth(c));
            for z in r.iter_mut() {
                *z = polish(c, *z);
            }
            out.extend(r);
        }
    }
    out
}

/// Numerically stable quadratic formula for `a s^2 + b s + c`.
fn quadratic(a: f64, b: f64, c: f64) -> [Complex64; 2] {
    let disc = b * b - 4.0 * a * c;
    if disc >= 0.0 {
        let q = -0.5 * (b + b.signum() * disc.sqrt());
        if q == 0.0 {
            return [Complex64::new(0.0, 0.0); 2];
        }
        [Complex64::new(q / a, 0.0), Complex64::new(c / q, 0.0)]
    } else {
        let re = -b / (2.0 * a);
        let im = (-disc).sqrt() / (2.0 * a.abs());
        [Complex64::new(re, im), Complex64::new(re, -im)]
    }
}

fn companion_roots(c: &[f64]) -> Option<Vec<Complex64>> {
    let n = c.len() - 1;
    let lead = c[n];
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        m[(i, n - 1)] = -c[i] / lead;
    }
    if m.iter().any(|v| !v.is_finite()) {
        return None;
    }
    balance(&mut m);
    let schur = m.try_schur(f64::EPSILON, SCHUR_MAX_ITER)?;
    let ev = schur.complex_eigenvalues();
    let v: Vec<Complex64> = ev.iter().copied().collect();
    if v.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Some(v)
    } else {
        None
    }
}

/// Parlett-Reinsch balancing by powers of two.
pub(crate) fn balance(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    const RADIX: f64 = 2.0;
    let sqrdx = RADIX * RADIX;
    let mut done = false;
    let mut sweeps = 0;
    while !done && sweeps < 200 {
        done = true;
        sweeps += 1;
        for i in 0..n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 0..n {
                if j != i {
                    c += m[(j, i)].abs();
                    r += m[(i, j)].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let mut g = r / RADIX;
            let mut f = 1.0;
            let s = c + r;
            while c < g {
                f *= RADIX;
                c *= sqrdx;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= sqrdx;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                let g = 1.0 / f;
                for j in 0..n {
                    m[(i, j)] *= g;
                }
                for j in 0..n {
                    m[(j, i)] *= f;
                }
            }
        }
    }
}

/// Aberth-Ehrlich iteration; used only when the QR iteration gives up.
fn aberth(c: &[f64]) -> Vec<Complex64> {
    let n = c.len() - 1;
    let dc: Vec<f64> = c
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &v)| k as f64 * v)
        .collect();
    // Cauchy-style radius bound for the initial circle.
    let lead = c[n].abs();
    let radius = 1.0 + c[..n].iter().map(|v| v.abs() / lead).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64;
            Complex64::from_polar(0.5 * radius, theta)
        })
        .collect();
    for _ in 0..500 {
        let mut max_step: f64 = 0.0;
        for i in 0..n {
            let p = horner(c, z[i]);
            let dp = horner(&dc, z[i]);
            let ratio = p / dp;
            let sum: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| 1.0 / (z[i] - z[j]))
                .sum();
            let w = ratio / (1.0 - ratio * sum);
            if w.re.is_finite() && w.im.is_finite() {
                z[i] -= w;
                max_step = max_step.max(w.norm() / (1.0 + z[i].norm()));
            }
        }
        if max_step < 1e-15 {
            break;
        }
    }
    z
}

fn horner(c: &[f64], s: Complex64) -> Complex64 {
    c.iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &v| acc * s + v)
}

/// A few guarded Newton steps; a step is kept only if it lowers |p|.
fn polish(c: &[f64], z: Complex64) -> Complex64 {
    let dc: Vec<f64> = c
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &v)| k as f64 * v)
        .collect();
    let mut best = z;
    let mut best_res = horner(c, z).norm();
    for _ in 0..3 {
        let d = horner(&dc, best);
        if d.norm() == 0.0 {
            break;
        }
        let cand = best - horner(c, best) / d;
        let res = horner(c, cand).norm();
        if res.is_finite() && res < best_res {
            best = cand;
            best_res = res;
        } else {
            break;
        }
    }
    best
}
