//! Dense kernels: Sylvester/Lyapunov solvers, the principal matrix logarithm
//! with its Fréchet derivative, and the band operators `S_ω` / `S_Ω`.

mod logm;
pub mod quad;
mod somega;
mod sylvester;

pub use logm::{frechet_log, frechet_log_integral, log_and_frechet, matrix_log};
pub use somega::{s_band, s_band_adjoint, s_omega};
pub use sylvester::{solve_lyapunov, solve_sylvester, ComplexSchur};

pub(crate) use sylvester::symmetrize;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative margin used to call a matrix Hurwitz.
pub const HURWITZ_TOL: f64 = 1e-12;

pub(crate) fn to_complex(a: &DMatrix<f64>) -> DMatrix<Complex64> {
    a.map(|x| Complex64::new(x, 0.0))
}

/// Eigenvalues of a real square matrix.
pub fn eigenvalues(a: &DMatrix<f64>) -> Result<Vec<Complex64>> {
    Ok(ComplexSchur::from_real(a)?.eigenvalues())
}

/// Largest real part over the spectrum together with the spectral radius.
///
/// An empty matrix yields `(-inf, 0)`.
pub fn spectral_abscissa(a: &DMatrix<f64>) -> Result<(f64, f64)> {
    let eigs = eigenvalues(a)?;
    let abscissa = eigs.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    let radius = eigs.iter().map(|z| z.norm()).fold(0.0, f64::max);
    Ok((abscissa, radius))
}

/// Hurwitz test with the margin `max Re λ < -HURWITZ_TOL * (1 + ρ(A))`.
pub fn is_hurwitz_matrix(a: &DMatrix<f64>) -> Result<(bool, f64)> {
    let (abscissa, radius) = spectral_abscissa(a)?;
    Ok((abscissa < -HURWITZ_TOL * (1.0 + radius), abscissa))
}

pub(crate) fn check_hurwitz(a: &DMatrix<f64>) -> Result<()> {
    let (ok, max_real_eig) = is_hurwitz_matrix(a)?;
    if ok {
        Ok(())
    } else {
        Err(Error::NotHurwitz { max_real_eig })
    }
}
