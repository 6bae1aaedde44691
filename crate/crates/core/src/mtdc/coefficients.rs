//! Self- and en-stabilizing coefficients of a focus VSC in a three-terminal
//! network.
//!
//! Local numbering puts the focus VSC first; the other two follow in
//! configuration order. With `N_j = K_P0j G_inj + 1`,
//! `D_j = s C_j U_dcj0 + K_P0j G_dcj` and `E_j = s C_j U_dcj0 - A_jj`:
//!
//! - `F_S  = A_11 N_1 - K_P01 G_dc1`
//! - `F_E11 = A12 A21 N_1 / E_2`, `F_E13 = A13 A31 N_1 / E_3`
//! - `F_E12`, `F_E14`: one controlled terminal through DC and AC networks
//! - `F_E15`: both terminals, DC network only
//! - `F_E16`: both terminals, DC and AC networks, less `F_E11..F_E15`

use serde::{Deserialize, Serialize};

use super::blocks::{build_all, Blocks};
use super::network::{build_dc_couplings, TfMatrix};
use super::system::{Fe12Reading, MtdcSystem};
use crate::error::{Error, Result};
use crate::ratfun::{Polynomial, RationalFunction, CANCEL_TOL};

/// Number of en-stabilizing paths in a three-terminal network.
pub const PATHS: usize = 6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientSet {
    /// Global VSC indices in local order: focus, second, third.
    pub order: [usize; 3],
    pub f_s: RationalFunction,
    pub f_e: Vec<RationalFunction>,
    pub a: TfMatrix,
    pub blocks: Vec<Blocks>,
    /// `C_i U_dci0` of the focus VSC.
    pub cu: f64,
}

impl CoefficientSet {
    pub fn focus(&self) -> usize {
        self.order[0]
    }

    /// `s C U_dc0 - F_S - sum of all F_E`.
    pub fn unbalanced(&self) -> RationalFunction {
        let mut g = &RationalFunction::s().scale(self.cu) - &self.f_s;
        for f in &self.f_e {
            g = &g - f;
        }
        g
    }
}

/// Pole-zero distance, relative to `1 + |root|`, below which a pair in an
/// assembled coefficient is treated as an exact algebraic cancellation.
pub const MODEL_CANCEL_TOL: f64 = 1e-6;

/// Cleans rounding residue from an assembled coefficient: cancels pole-zero
/// pairs within `MODEL_CANCEL_TOL`, then trims residue leading terms.
pub fn condition(f: RationalFunction) -> RationalFunction {
    numerical_degree(f.cancel_within(MODEL_CANCEL_TOL))
}

/// Drops leading numerator coefficients that are rounding residue of a
/// cancelled high-order term. A coefficient is residue when its weight at the
/// pole scale `rho` is below `CANCEL_TOL` of the largest weight.
pub fn numerical_degree(f: RationalFunction) -> RationalFunction {
    let rho = f.poles().iter().map(|p| p.norm()).fold(1.0, f64::max);
    let a = f.num().coeffs();
    let n = a.len();
    if n < 2 {
        return f;
    }
    let weight = |k: usize| a[k].abs() * rho.powi(k as i32 - (n as i32 - 1));
    let top = (0..n).map(weight).fold(0.0, f64::max);
    let mut keep = n;
    while keep > 1 && weight(keep - 1) <= CANCEL_TOL * top {
        keep -= 1;
    }
    if keep == n {
        return f;
    }
    RationalFunction::new(Polynomial::new(a[..keep].to_vec()), f.den().clone()).unwrap_or(f)
}

fn div(num: &RationalFunction, den: &RationalFunction, formula: &'static str) -> Result<RationalFunction> {
    num.checked_div(den).map_err(|e| match e {
        Error::DivisionByZero => Error::ZeroDenominator { formula },
        other => other,
    })
}

struct Local<'a> {
    a: [[&'a RationalFunction; 3]; 3],
    n: [RationalFunction; 3],
    d: [RationalFunction; 3],
    /// `s C_j U_dcj0`.
    scu: [RationalFunction; 3],
    /// `K_P0j G_dcj` for the `F_E16` denominator term of VSC 2.
    kg_dc2_alt: RationalFunction,
}

impl Local<'_> {
    fn e(&self, j: usize) -> RationalFunction {
        &self.scu[j] - self.a[j][j]
    }
}

pub fn self_coefficient(a11: &RationalFunction, b: &Blocks) -> RationalFunction {
    &(a11 * &b.n()) - &b.g_dc.scale(b.k_p0)
}

fn en_coefficients_local(l: &Local, fe12: Fe12Reading) -> Result<Vec<RationalFunction>> {
    let a = &l.a;
    let (n1, n2, n3) = (&l.n[0], &l.n[1], &l.n[2]);
    let (d2, d3) = (&l.d[1], &l.d[2]);
    let p12 = a[0][1] * a[1][0];
    let p13 = a[0][2] * a[2][0];
    let e2 = l.e(1);
    let e3 = l.e(2);

    let fe11 = div(&(&p12 * n1), &e2, "F_E11")?;

    let fe12 = if p12.is_zero() {
        RationalFunction::zero()
    } else {
        let first = match fe12 {
            Fe12Reading::Focus => {
                let den = &l.d[0] - &(a[1][1] * n1);
                div(&(&p12 * n1), &den, "F_E12")?
            }
            Fe12Reading::Symmetric => {
                let den = d2 - &(a[1][1] * n2);
                div(&(&p12 * n2), &den, "F_E12")?
            }
        };
        let second = match fe12 {
            Fe12Reading::Focus => div(&p12, &(&l.scu[0] - a[1][1]), "F_E12")?,
            Fe12Reading::Symmetric => div(&p12, &e2, "F_E12")?,
        };
        &(&first - &second) * n1
    };

    let fe13 = div(&(&p13 * n1), &e3, "F_E13")?;

    let fe14 = if p13.is_zero() {
        RationalFunction::zero()
    } else {
        let first = div(&(&p13 * n3), &(d3 - &(a[2][2] * n3)), "F_E14")?;
        let second = div(&p13, &e3, "F_E14")?;
        &(&first - &second) * n1
    };

    // Two-terminal DC-only solve.
    let det0 = &(&e2 * &e3) - &(a[1][2] * a[2][1]);
    let t1 = a[0][1] * &(&(a[1][0] * &e3) + &(a[2][0] * a[1][2]));
    let t2 = a[0][2] * &(&(a[2][0] * &e2) + &(a[1][0] * a[2][1]));
    let fe15 = if t1.is_zero() && t2.is_zero() {
        RationalFunction::zero()
    } else {
        let both = div(&(&t1 + &t2), &det0, "F_E15")?;
        let singles = &div(&p12, &e2, "F_E15")? + &div(&p13, &e3, "F_E15")?;
        &(&both - &singles) * n1
    };

    // Two-terminal solve with both controllers active.
    let cross = &(&(&(&(a[0][1] * a[1][2]) * a[2][0]) + &(&(a[0][2] * a[1][0]) * a[2][1]))
        - &(&p12 * a[2][2]))
        - &(&p13 * a[1][1]);
    let n23 = n2 * n3;
    let num16 = &(&(&cross * &n23) + &(&(&p12 * n2) * d3)) + &(&(&p13 * n3) * d2);
    let fe16 = if num16.is_zero() {
        RationalFunction::zero()
    } else {
        let d2_alt = &l.scu[1] + &l.kg_dc2_alt;
        let den16 = &(&(&(&(&(a[1][1] * a[2][2]) - &(a[1][2] * a[2][1])) * &n23)
            - &(&(a[1][1] * d3) * n2))
            - &(&(a[2][2] * &d2_alt) * n3))
            + &(d3 * d2);
        let total = &div(&num16, &den16, "F_E16")? * n1;
        let mut rest = total;
        for f in [&fe11, &fe12, &fe13, &fe14, &fe15] {
            rest = &rest - f;
        }
        rest
    };

    Ok([fe11, fe12, fe13, fe14, fe15, fe16].map(condition).to_vec())
}

/// Local order of a three-terminal system: focus, then the other two in
/// configuration order.
fn local_order(sys: &MtdcSystem) -> Result<[usize; 3]> {
    if sys.vscs.len() != 3 {
        return Err(Error::Model(format!(
            "the path decomposition needs exactly 3 VSCs, got {}",
            sys.vscs.len()
        )));
    }
    let f = sys.focus;
    let others: Vec<usize> = (0..3).filter(|&j| j != f).collect();
    Ok([f, others[0], others[1]])
}

/// `F_E11..F_E16` of the focus VSC from given couplings and blocks.
pub fn en_coefficients(sys: &MtdcSystem, a: &TfMatrix, blocks: &[Blocks]) -> Result<Vec<RationalFunction>> {
    let order = local_order(sys)?;
    if a.len() != 3 || a.iter().any(|row| row.len() != 3) || blocks.len() != 3 {
        return Err(Error::Model("couplings and blocks must cover 3 VSCs".into()));
    }
    let scu = order.map(|g| RationalFunction::s().scale(sys.vscs[g].c * sys.vscs[g].op.udc0));
    let n = order.map(|g| blocks[g].n());
    let d = order.map(|g| blocks[g].d(sys.vscs[g].c * sys.vscs[g].op.udc0));
    let b2 = &blocks[order[1]];
    let kg_dc2_alt = if sys.options.fe16_g0u2_term {
        b2.g_dc.scale(b2.k_p0)
    } else {
        RationalFunction::zero()
    };
    let local = Local {
        a: [0, 1, 2].map(|i| [0, 1, 2].map(|j| &a[order[i]][order[j]])),
        n,
        d,
        scu,
        kg_dc2_alt,
    };
    en_coefficients_local(&local, sys.options.fe12)
}

/// Builds `F_S` and `F_E11..F_E16` for the focus VSC of a three-terminal
/// system.
pub fn build_coefficients(sys: &MtdcSystem) -> Result<CoefficientSet> {
    sys.validate()?;
    let order = local_order(sys)?;
    let a = build_dc_couplings(sys)?;
    let blocks = build_all(sys)?;
    let f = sys.focus;
    let f_e = en_coefficients(sys, &a, &blocks)?;
    let f_s = condition(self_coefficient(&a[f][f], &blocks[f]));
    Ok(CoefficientSet {
        order,
        f_s,
        f_e,
        cu: sys.vscs[f].c * sys.vscs[f].op.udc0,
        a,
        blocks,
    })
}
