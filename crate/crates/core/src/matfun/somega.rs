//! `S_ω = Re[(i/π) ln(−A − iωI)]` and its band sums.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::band::FrequencyBand;
use crate::error::Result;

use super::{check_hurwitz, log_and_frechet, matrix_log, to_complex};

fn shifted(a: &DMatrix<f64>, omega: f64) -> DMatrix<Complex64> {
    let n = a.nrows();
    -to_complex(a) - DMatrix::<Complex64>::identity(n, n) * Complex64::new(0.0, omega)
}

// Re[(i/π) L] = −Im(L)/π
fn re_i_over_pi(l: &DMatrix<Complex64>) -> DMatrix<f64> {
    l.map(|z| -z.im / std::f64::consts::PI)
}

fn s_omega_unchecked(a: &DMatrix<f64>, omega: f64) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    if omega == 0.0 {
        return Ok(DMatrix::zeros(n, n));
    }
    if omega.is_infinite() {
        return Ok(DMatrix::identity(n, n) * 0.5);
    }
    Ok(re_i_over_pi(&matrix_log(&shifted(a, omega))?))
}

/// `S_ω` for a Hurwitz matrix; zero at `ω = 0` and `I/2` at `ω = ∞`.
pub fn s_omega(a: &DMatrix<f64>, omega: f64) -> Result<DMatrix<f64>> {
    check_hurwitz(a)?;
    s_omega_unchecked(a, omega)
}

/// `S_Ω = Σ (S_hi − S_lo)` over the band's intervals.
pub fn s_band(a: &DMatrix<f64>, band: &FrequencyBand) -> Result<DMatrix<f64>> {
    check_hurwitz(a)?;
    let n = a.nrows();
    let mut s = DMatrix::zeros(n, n);
    for (omega, sign) in band.signed_endpoints() {
        s += s_omega_unchecked(a, omega)? * sign;
    }
    if band.is_unbounded() {
        s += DMatrix::identity(n, n) * 0.5;
    }
    Ok(s)
}

/// `S_Ω(A)` together with the adjoint map `W` of its derivative:
/// `tr(dS_Ωᵀ V) = −tr(dAᵀ W)` for every perturbation `dA`.
///
/// Each finite endpoint ω contributes `sign · Re[(i/π) L(−A − iωI, Vᵀ)]ᵀ`;
/// the constant endpoints `0` and `∞` contribute nothing.
pub fn s_band_adjoint(
    a: &DMatrix<f64>,
    band: &FrequencyBand,
    v: &DMatrix<f64>,
) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    check_hurwitz(a)?;
    let n = a.nrows();
    let vt = to_complex(&v.transpose());
    let mut s = DMatrix::zeros(n, n);
    let mut w = DMatrix::zeros(n, n);
    for (omega, sign) in band.signed_endpoints() {
        let (log, derivs) = log_and_frechet(&shifted(a, omega), &[&vt])?;
        s += re_i_over_pi(&log) * sign;
        w += re_i_over_pi(&derivs[0]).transpose() * sign;
    }
    if band.is_unbounded() {
        s += DMatrix::identity(n, n) * 0.5;
    }
    Ok((s, w))
}
