use serde::Serialize;

use crate::band::FrequencyBand;
use crate::error::{Error, Result};
use crate::freqgram::{error_cost, h2w_norm_sq, hinf_w_relative, DEFAULT_GRID_DENSITY};
use crate::ssmodel::StateSpaceModel;

/// Metrics of one reduced model against the full model on a band.
///
/// Norm columns are `None` when the reduced model is unstable (the
/// error norm is then undefined).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReductionReport {
    pub method: String,
    /// `‖G − Ĝ‖_{H2,Ω}`
    pub h2w_error: Option<f64>,
    /// `‖G − Ĝ‖_{H2,Ω} / ‖G‖_{H2,Ω}`
    pub h2w_relative: Option<f64>,
    /// `‖G − Ĝ‖_{H∞,Ω} / ‖G‖_{H∞,Ω}`
    pub hinfw_relative: Option<f64>,
    /// Largest real part over the spectrum of `Â`, in 1/s.
    pub max_real_eig: f64,
    pub iterations: usize,
    pub runtime_seconds: f64,
    pub stable: bool,
}

/// Computes every report column except method, iterations and runtime.
pub fn evaluate(g: &StateSpaceModel, ghat: &StateSpaceModel, band: &FrequencyBand) -> Result<ReductionReport> {
    if g.inputs() != ghat.inputs() || g.outputs() != ghat.outputs() {
        return Err(Error::DimensionMismatch(format!(
            "reduced model is {}x{}, full model is {}x{}",
            ghat.outputs(),
            ghat.inputs(),
            g.outputs(),
            g.inputs()
        )));
    }
    let (stable, max_real_eig) = ghat.is_hurwitz()?;
    let mut report = ReductionReport {
        method: String::new(),
        h2w_error: None,
        h2w_relative: None,
        hinfw_relative: None,
        max_real_eig,
        iterations: 0,
        runtime_seconds: 0.0,
        stable,
    };
    if !stable {
        return Ok(report);
    }
    let error = match error_cost(g, ghat, band, false) {
        Ok(cost) => cost.max(0.0).sqrt(),
        Err(Error::UnboundedBandWithFeedthrough) => f64::INFINITY,
        Err(e) => return Err(e),
    };
    let norm = h2w_norm_sq(g, band)?.max(0.0).sqrt();
    report.h2w_error = Some(error);
    report.h2w_relative = Some(if norm > 0.0 { error / norm } else { f64::INFINITY });
    report.hinfw_relative = hinf_w_relative(g, ghat, band, DEFAULT_GRID_DENSITY).ok();
    Ok(report)
}
