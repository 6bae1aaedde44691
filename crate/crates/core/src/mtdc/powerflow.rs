use num_complex::Complex64;

use super::system::VscParams;
use crate::error::{Error, Result};

/// Steady state of one VSC behind `Xf + Xg` on an infinite bus at angle 0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerFlow {
    pub e0: f64,
    pub theta0: f64,
    pub thetat0: f64,
    /// `dP/dtheta` at the operating point.
    pub k_p0: f64,
}

/// Newton solve of `P0 = E Us sin(d) / X`, `Q0 = (E Us cos(d) - Us^2) / X`.
pub fn solve(vsc: &VscParams) -> Result<PowerFlow> {
    let x = vsc.xf + vsc.xg;
    if !(x > 0.0) {
        return Err(Error::Domain(format!("VSC {}: Xf + Xg must be > 0", vsc.name)));
    }
    let (p0, q0, us) = (vsc.op.p0, vsc.op.q0, vsc.op.us0);
    let (mut e, mut d) = (us, 0.0f64);
    for _ in 0..50 {
        let (s, c) = d.sin_cos();
        let fp = e * us * s / x - p0;
        let fq = (e * us * c - us * us) / x - q0;
        if fp.abs().max(fq.abs()) < 1e-12 {
            break;
        }
        // Jacobian rows: d/dE, d/dd.
        let (a, b) = (us * s / x, e * us * c / x);
        let (cq, dq) = (us * c / x, -e * us * s / x);
        let det = a * dq - b * cq;
        if det == 0.0 {
            return Err(Error::Model(format!("VSC {}: singular power-flow Jacobian", vsc.name)));
        }
        e -= (dq * fp - b * fq) / det;
        d -= (-cq * fp + a * fq) / det;
    }
    let residual = (e * us * d.sin() / x - p0)
        .abs()
        .max(((e * us * d.cos() - us * us) / x - q0).abs());
    if !(residual < 1e-10) || !(e > 0.0) {
        return Err(Error::Model(format!(
            "VSC {}: power flow did not converge (P0 = {p0} beyond transfer limit?)",
            vsc.name
        )));
    }
    let theta0 = d + vsc.op.thetas0;
    let es = Complex64::from_polar(e, theta0);
    let vs = Complex64::from_polar(us, vsc.op.thetas0);
    let ut = vs + (es - vs) * (vsc.xg / x);
    Ok(PowerFlow {
        e0: e,
        theta0,
        thetat0: ut.arg(),
        k_p0: e * us * d.cos() / x,
    })
}
