//! Polynomial and rational-function arithmetic.

mod census;
mod poly;
mod rational;
mod roots;

pub use census::{stability, HalfPlaneCensus};
pub use poly::Polynomial;
pub use rational::{RationalFunction, TfFile, AXIS_TOL, CANCEL_TOL};

pub(crate) use roots::balance;
