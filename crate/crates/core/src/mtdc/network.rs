use super::system::MtdcSystem;
use crate::error::{Error, Result};
use crate::ratfun::RationalFunction;

/// Square matrix of transfer functions, row-major.
pub type TfMatrix = Vec<Vec<RationalFunction>>;

/// DC-network couplings `A_ij(s)` from the linearized cable currents.
///
/// Off-diagonal: `U_dci0 / (R + sL)` per cable, zero for non-adjacent pairs.
/// Diagonal: minus the sum over adjacent cables plus the flow term
/// `flow_factor * P_i0 / U_dci0`.
pub fn build_dc_couplings(sys: &MtdcSystem) -> Result<TfMatrix> {
    let n = sys.vscs.len();
    let mut a = vec![vec![RationalFunction::zero(); n]; n];
    for c in &sys.cables {
        if c.r == 0.0 && c.l == 0.0 {
            return Err(Error::DegenerateCable {
                from: sys.vscs[c.from].name.clone(),
                to: sys.vscs[c.to].name.clone(),
            });
        }
        for (i, j) in [(c.from, c.to), (c.to, c.from)] {
            let u = sys.vscs[i].op.udc0;
            let y = RationalFunction::from_coeffs(vec![u], vec![c.r, c.l])?;
            a[i][j] = &a[i][j] + &y;
            a[i][i] = &a[i][i] - &y;
        }
    }
    for (i, v) in sys.vscs.iter().enumerate() {
        let flow = sys.options.flow_factor * v.op.p0 / v.op.udc0;
        a[i][i] = &a[i][i] + &RationalFunction::constant(flow);
    }
    Ok(a)
}
