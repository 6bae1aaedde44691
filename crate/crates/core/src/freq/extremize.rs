use super::{Extremum, Frequency, Mode, SweepSpec};
use crate::error::{Error, Result};

const CANDIDATES: usize = 5;
const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// A real objective on `omega > 0` with optional analytic end limits and
/// extra grid seeds (typically modal frequencies).
pub struct Objective<F> {
    f: F,
    at_zero: Option<f64>,
    at_infinity: Option<f64>,
    seeds: Vec<f64>,
}

impl<F: Fn(f64) -> f64> Objective<F> {
    pub fn new(f: F) -> Self {
        Self {
            f,
            at_zero: None,
            at_infinity: None,
            seeds: Vec::new(),
        }
    }

    pub fn at_zero(mut self, v: f64) -> Self {
        self.at_zero = Some(v);
        self
    }

    pub fn at_infinity(mut self, v: f64) -> Self {
        self.at_infinity = Some(v);
        self
    }

    pub fn seeds(mut self, s: impl IntoIterator<Item = f64>) -> Self {
        self.seeds.extend(s);
        self
    }

    pub fn eval(&self, omega: f64) -> f64 {
        (self.f)(omega)
    }
}

fn key(mode: Mode, v: f64) -> f64 {
    if !v.is_finite() {
        return f64::NEG_INFINITY;
    }
    match mode {
        Mode::Max => v,
        Mode::Min => -v,
    }
}

/// Golden-section search for the best key on `[a, b]` in `log10(omega)`.
fn golden<F: Fn(f64) -> f64>(
    obj: &Objective<F>,
    mode: Mode,
    a: f64,
    b: f64,
    tol: f64,
) -> (f64, f64) {
    let (mut lo, mut hi) = (a.log10(), b.log10());
    let eval = |x: f64| {
        let w = 10f64.powf(x);
        (w, obj.eval(w))
    };
    let mut c = hi - INV_PHI * (hi - lo);
    let mut d = lo + INV_PHI * (hi - lo);
    let (mut wc, mut fc) = eval(c);
    let (mut wd, mut fd) = eval(d);
    for it in 0..200 {
        if hi - lo < 1e-13 {
            break;
        }
        if it > 20 && (fc - fd).abs() <= 0.01 * tol * fc.abs().max(fd.abs()) && hi - lo < 1e-7 {
            break;
        }
        if key(mode, fc) >= key(mode, fd) {
            hi = d;
            d = c;
            wd = wc;
            fd = fc;
            c = hi - INV_PHI * (hi - lo);
            (wc, fc) = eval(c);
        } else {
            lo = c;
            c = d;
            wc = wd;
            fc = fd;
            d = lo + INV_PHI * (hi - lo);
            (wd, fd) = eval(d);
        }
    }
    if key(mode, fc) >= key(mode, fd) {
        (wc, fc)
    } else {
        (wd, fd)
    }
}

/// Refines around `omega` within one grid step either side.
pub(crate) fn refine_near<F: Fn(f64) -> f64>(
    obj: &Objective<F>,
    mode: Mode,
    omega: f64,
    spec: &SweepSpec,
) -> (f64, f64) {
    let step = 10f64.powf(1.0 / spec.points_per_decade as f64);
    let local = SweepSpec {
        omega_min: omega / step,
        omega_max: omega * step,
        points_per_decade: 200 * spec.points_per_decade,
        refine_tol: spec.refine_tol,
    };
    let grid = local.grid();
    let vals: Vec<f64> = grid.iter().map(|&w| obj.eval(w)).collect();
    let best = (0..grid.len())
        .max_by(|&i, &j| key(mode, vals[i]).total_cmp(&key(mode, vals[j])))
        .unwrap();
    let a = grid[best.saturating_sub(1)];
    let b = grid[(best + 1).min(grid.len() - 1)];
    let (w, v) = golden(obj, mode, a, b, spec.refine_tol);
    if key(mode, v) >= key(mode, vals[best]) {
        (w, v)
    } else {
        (grid[best], vals[best])
    }
}

/// Global extremum over `omega in [0, inf]`: log grid plus seeds, golden
/// refinement around the best local candidates, then the end limits.
pub fn extremize<F: Fn(f64) -> f64>(
    obj: &Objective<F>,
    mode: Mode,
    spec: &SweepSpec,
) -> Result<Extremum> {
    spec.validate()?;
    let mut grid = spec.grid();
    for &s in &obj.seeds {
        if s.is_finite() && s >= spec.omega_min && s <= spec.omega_max {
            grid.push(s);
            grid.push(s * (1.0 - 1e-4));
            grid.push(s * (1.0 + 1e-4));
        }
    }
    grid.retain(|w| *w >= spec.omega_min && *w <= spec.omega_max);
    grid.sort_by(f64::total_cmp);
    grid.dedup();

    let vals: Vec<f64> = grid.iter().map(|&w| obj.eval(w)).collect();
    let bad = vals.iter().filter(|v| !v.is_finite()).count();
    if 2 * bad >= vals.len() {
        return Err(Error::IllPosedObjective {
            bad,
            total: vals.len(),
        });
    }

    let keys: Vec<f64> = vals.iter().map(|&v| key(mode, v)).collect();
    let n = grid.len();
    let mut cands: Vec<usize> = (0..n)
        .filter(|&i| {
            keys[i].is_finite()
                && (i == 0 || keys[i] >= keys[i - 1])
                && (i + 1 == n || keys[i] >= keys[i + 1])
        })
        .collect();
    cands.sort_by(|&i, &j| keys[j].total_cmp(&keys[i]).then(i.cmp(&j)));
    cands.truncate(CANDIDATES);

    let best_grid = (0..n)
        .max_by(|&i, &j| keys[i].total_cmp(&keys[j]).then(j.cmp(&i)))
        .unwrap();
    let mut best = (Frequency::Finite(grid[best_grid]), vals[best_grid]);
    // Seeds can sit arbitrarily close to a grid point, so each bracket spans
    // at least one regular grid step either side.
    let step = 10f64.powf(1.0 / spec.points_per_decade as f64);
    for &i in &cands {
        let a = grid[i.saturating_sub(1)].min(grid[i] / step).max(spec.omega_min);
        let b = grid[(i + 1).min(n - 1)].max(grid[i] * step).min(spec.omega_max);
        if a < b {
            let (w, v) = golden(obj, mode, a, b, spec.refine_tol);
            if key(mode, v) > key(mode, best.1) {
                best = (Frequency::Finite(w), v);
            }
        }
    }

    for (f, lim) in [(Frequency::Zero, obj.at_zero), (Frequency::Infinity, obj.at_infinity)] {
        if let Some(v) = lim {
            if key(mode, v) > key(mode, best.1) {
                best = (f, v);
            }
        }
    }

    Ok(Extremum {
        omega_star: best.0,
        value: best.1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_objective() {
        let e = extremize(&Objective::new(|_| 0.5), Mode::Min, &SweepSpec::default()).unwrap();
        assert_eq!(e.value, 0.5);
    }

    #[test]
    fn low_pass_peak_is_at_zero() {
        let obj = Objective::new(|w: f64| 1.0 / (1.0 + w * w).sqrt()).at_zero(1.0).at_infinity(0.0);
        let e = extremize(&obj, Mode::Max, &SweepSpec::default()).unwrap();
        assert_eq!(e.value, 1.0);
        assert_eq!(e.omega_star, Frequency::Zero);
    }

    #[test]
    fn finds_narrow_interior_minimum() {
        // Sharp notch at omega = 37.
        let obj = Objective::new(|w: f64| ((w - 37.0) / 37.0).abs().sqrt() + 0.1);
        let e = extremize(&obj, Mode::Min, &SweepSpec::default()).unwrap();
        assert!((e.value - 0.1).abs() < 1e-4, "{e:?}");
    }

    #[test]
    fn ill_posed_is_reported() {
        let obj = Objective::new(|w: f64| if w > 1e-3 { f64::NAN } else { 1.0 });
        assert!(matches!(
            extremize(&obj, Mode::Max, &SweepSpec::default()),
            Err(Error::IllPosedObjective { .. })
        ));
    }
}
