use serde::{Deserialize, Serialize};

use super::powerflow;
use super::system::{BlockModel, BlockOverride, MtdcSystem, VscParams};
use crate::error::Result;
use crate::ratfun::RationalFunction;

/// Transfer blocks of one VSC: `d(theta) = G_in dP_in + G_dc dU_dc` with
/// `dP = K_P0 d(theta)` at the AC side.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Blocks {
    pub g_in: RationalFunction,
    pub g_dc: RationalFunction,
    pub k_p0: f64,
}

impl Blocks {
    /// `K_P0 G_in + 1`.
    pub fn n(&self) -> RationalFunction {
        &self.g_in.scale(self.k_p0) + &RationalFunction::one()
    }

    /// `K_P0 G_dc + s C U_dc0`.
    pub fn d(&self, cu: f64) -> RationalFunction {
        &self.g_dc.scale(self.k_p0) + &RationalFunction::s().scale(cu)
    }
}

/// `kp + ki / s`.
fn pi(kp: f64, ki: f64) -> RationalFunction {
    RationalFunction::from_coeffs(vec![ki, kp], vec![0.0, 1.0]).expect("nonzero denominator")
}

/// Closed AC current loop `(kp6 s + ki6) / (Lf s^2 + kp6 s + ki6)` with the
/// filter inductance `Lf = Xf / omega_base`.
fn current_loop(v: &VscParams, omega_base: f64) -> Result<RationalFunction> {
    let g = v.gains;
    RationalFunction::from_coeffs(vec![g.ki6, g.kp6], vec![g.ki6, g.kp6, v.xf / omega_base])
}

pub fn build_blocks(v: &VscParams, model: BlockModel, omega_base: f64) -> Result<Blocks> {
    let pf = powerflow::solve(v)?;
    let k = pf.k_p0;
    let g = v.gains;
    let (g_in, g_dc) = match model {
        BlockModel::DroopFeedback => {
            let cc = current_loop(v, omega_base)?;
            let g_dc = (&cc * &pi(g.kp1, g.ki1)).scale(1.0 / k);
            let g_in = cc.scale(g.kd / (k * v.op.udc0));
            (g_in, g_dc)
        }
        BlockModel::PllPhase => {
            let g_dc = (&pi(g.kp1, g.ki1) + &RationalFunction::constant(g.kd)).scale(k);
            let us = v.op.us0;
            let g_in = RationalFunction::from_coeffs(
                vec![g.ki2, g.kp2],
                vec![us * g.ki2, us * g.kp2, 1.0],
            )?;
            (g_in, g_dc)
        }
    };
    Ok(Blocks { g_in, g_dc, k_p0: k })
}

/// Blocks for every VSC, with user overrides applied.
pub fn build_all(sys: &MtdcSystem) -> Result<Vec<Blocks>> {
    let wb = sys.base.omega_base();
    sys.vscs
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let mut b = build_blocks(v, sys.options.blocks, wb)?;
            if let Some(BlockOverride { g_in, g_dc, k_p0 }) = sys.overrides.get(i) {
                if let Some(x) = g_in {
                    b.g_in = x.clone();
                }
                if let Some(x) = g_dc {
                    b.g_dc = x.clone();
                }
                if let Some(x) = k_p0 {
                    b.k_p0 = *x;
                }
            }
            Ok(b)
        })
        .collect()
}
