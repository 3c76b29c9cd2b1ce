//! Peak gain over a frequency band by gridding plus golden-section refinement.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::band::{FrequencyBand, Interval};
use crate::error::{Error, Result};
use crate::ssmodel::StateSpaceModel;

/// Grid points per interval.
pub const DEFAULT_GRID_DENSITY: usize = 2000;

const GOLDEN_ITERS: usize = 60;

fn sigma_max(h: &DMatrix<Complex64>) -> f64 {
    if h.is_empty() {
        return 0.0;
    }
    h.clone().singular_values().max()
}

/// Maps `t ∈ [0, 1]` onto an interval: linear from 0, logarithmic for
/// `lo > 0`, and `lo + s·tan(πt/2)` for an unbounded interval.
fn frequency_at(iv: &Interval, t: f64) -> f64 {
    if iv.is_unbounded() {
        if t >= 1.0 {
            return f64::INFINITY;
        }
        let scale = iv.lo.max(1.0);
        iv.lo + scale * (0.5 * std::f64::consts::PI * t).tan()
    } else if iv.lo > 0.0 {
        iv.lo * (iv.hi / iv.lo).powf(t)
    } else {
        iv.hi * t
    }
}

fn band_peak<F>(band: &FrequencyBand, grid_density: usize, gain: &F) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if grid_density < 2 {
        return Err(Error::EmptyBand);
    }
    let mut peak = 0.0f64;
    for iv in band.intervals() {
        let eval = |t: f64| gain(frequency_at(iv, t));
        let last = grid_density - 1;
        let mut best = (0usize, f64::NEG_INFINITY);
        for k in 0..grid_density {
            let v = eval(k as f64 / last as f64)?;
            if v > best.1 {
                best = (k, v);
            }
        }
        let lo = best.0.saturating_sub(1) as f64 / last as f64;
        let hi = (best.0 + 1).min(last) as f64 / last as f64;
        peak = peak.max(best.1).max(golden_max(&eval, lo, hi)?);
    }
    Ok(peak)
}

fn golden_max<F>(f: &F, mut a: f64, mut b: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    for _ in 0..GOLDEN_ITERS {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2)?;
        }
    }
    Ok(f1.max(f2))
}

fn response(model: &StateSpaceModel, omega: f64) -> Result<DMatrix<Complex64>> {
    if omega.is_infinite() {
        Ok(model.d().map(|x| Complex64::new(x, 0.0)))
    } else {
        model.freq_response(omega)
    }
}

/// `max_{ν ∈ Ω} σ_max(G(iν))`.
pub fn hinf_w_norm(model: &StateSpaceModel, band: &FrequencyBand, grid_density: usize) -> Result<f64> {
    band_peak(band, grid_density, &|w| Ok(sigma_max(&response(model, w)?)))
}

/// `‖G − Ĝ‖_{H∞,Ω} / ‖G‖_{H∞,Ω}` on the band.
pub fn hinf_w_relative(
    g: &StateSpaceModel,
    ghat: &StateSpaceModel,
    band: &FrequencyBand,
    grid_density: usize,
) -> Result<f64> {
    if g.inputs() != ghat.inputs() || g.outputs() != ghat.outputs() {
        return Err(Error::DimensionMismatch("reduced model has different input/output dimensions".into()));
    }
    let num = band_peak(band, grid_density, &|w| {
        Ok(sigma_max(&(response(g, w)? - response(ghat, w)?)))
    })?;
    let den = hinf_w_norm(g, band, grid_density)?;
    Ok(if num == 0.0 { 0.0 } else { num / den })
}
