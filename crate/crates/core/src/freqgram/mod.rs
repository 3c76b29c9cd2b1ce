//! Frequency-limited Gramians, the band-limited H2 measure, the reduction
//! cost and its analytic gradient.

mod cost;
mod hinf;
mod mask;

pub use cost::{error_cost, error_cost_forms, error_gradient, CostEvaluator, Gradient, GradientWorkspace};
pub use hinf::{hinf_w_norm, hinf_w_relative, DEFAULT_GRID_DENSITY};
pub use mask::StructureMask;

use nalgebra::DMatrix;

use crate::band::FrequencyBand;
use crate::error::{Error, Result};
use crate::matfun::{check_hurwitz, s_band, solve_lyapunov};
use crate::ssmodel::StateSpaceModel;

/// Controllability and observability Gramians restricted to `band`:
/// `A P + P Aᵀ + S_Ω B Bᵀ + B Bᵀ S_Ωᵀ = 0` and its dual.
pub fn limited_gramians(model: &StateSpaceModel, band: &FrequencyBand) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let (a, b, c) = (model.a(), model.b(), model.c());
    check_hurwitz(a)?;
    let s = s_band(a, band)?;
    let bb = b * b.transpose();
    let sbb = &s * &bb;
    let p = solve_lyapunov(a, &(&sbb + sbb.transpose()))?;
    let cc = c.transpose() * c;
    let ccs = &cc * &s;
    let q = solve_lyapunov(&a.transpose(), &(&ccs + ccs.transpose()))?;
    Ok((p, q))
}

/// Standard Gramians `A P + P Aᵀ + B Bᵀ = 0`, `Aᵀ Q + Q A + Cᵀ C = 0`.
pub fn gramians(model: &StateSpaceModel) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let (a, b, c) = (model.a(), model.b(), model.c());
    let p = solve_lyapunov(a, &(b * b.transpose()))?;
    let q = solve_lyapunov(&a.transpose(), &(c.transpose() * c))?;
    Ok((p, q))
}

/// `‖G‖²_{H2,Ω} = tr C P_Ω Cᵀ + 2 tr[(C S_Ω B + D θ(Ω)) Dᵀ]`.
///
/// Pure gains are allowed; an unbounded band requires `D = 0`.
pub fn h2w_norm_sq(model: &StateSpaceModel, band: &FrequencyBand) -> Result<f64> {
    let d = model.d();
    let feedthrough = d.iter().any(|x| *x != 0.0);
    if band.is_unbounded() && feedthrough {
        return Err(Error::UnboundedBandWithFeedthrough);
    }
    let mut value = 0.0;
    if model.states() > 0 {
        let (p, _) = limited_gramians(model, band)?;
        let c = model.c();
        value += (c * p * c.transpose()).trace();
    }
    if feedthrough {
        let k = if model.states() > 0 {
            model.c() * s_band(model.a(), band)? * model.b() + d * band.theta()
        } else {
            d * band.theta()
        };
        value += 2.0 * (k * d.transpose()).trace();
    }
    Ok(value)
}

/// Squared standard H2 norm `tr Bᵀ Q B` of a strictly proper stable model.
pub fn h2_norm_sq(model: &StateSpaceModel) -> Result<f64> {
    if model.d().iter().any(|x| *x != 0.0) {
        return Err(Error::UnboundedBandWithFeedthrough);
    }
    if model.states() == 0 {
        return Ok(0.0);
    }
    let (_, q) = gramians(model)?;
    let b = model.b();
    Ok((b.transpose() * q * b).trace())
}
