//! Bartels–Stewart style Sylvester and Lyapunov solvers on a complex Schur basis.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

use super::{check_hurwitz, to_complex};

const SCHUR_EPS: f64 = 1e-15;
const SCHUR_MAX_ITER: usize = 100_000;

/// Complex Schur factorization `M = Q T Q^H` with `T` upper triangular.
#[derive(Debug, Clone)]
pub struct ComplexSchur {
    q: DMatrix<Complex64>,
    t: DMatrix<Complex64>,
    norm: f64,
}

impl ComplexSchur {
    pub fn new(m: DMatrix<Complex64>) -> Result<Self> {
        let n = m.nrows();
        if n != m.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "Schur factorization needs a square matrix, got {}x{}",
                n,
                m.ncols()
            )));
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("Schur input".into()));
        }
        let norm = m.norm();
        if n == 0 {
            return Ok(Self {
                q: DMatrix::zeros(0, 0),
                t: DMatrix::zeros(0, 0),
                norm,
            });
        }
        let (q, mut t) = m
            .try_schur(SCHUR_EPS, SCHUR_MAX_ITER)
            .ok_or(Error::NoConvergence)?
            .unpack();
        for j in 0..n {
            for i in j + 1..n {
                t[(i, j)] = Complex64::new(0.0, 0.0);
            }
        }
        Ok(Self { q, t, norm })
    }

    pub fn from_real(a: &DMatrix<f64>) -> Result<Self> {
        Self::new(to_complex(a))
    }

    pub fn dim(&self) -> usize {
        self.t.nrows()
    }

    /// Unitary factor `Q`.
    pub fn unitary(&self) -> &DMatrix<Complex64> {
        &self.q
    }

    /// Triangular factor `T`.
    pub fn triangular(&self) -> &DMatrix<Complex64> {
        &self.t
    }

    pub fn eigenvalues(&self) -> Vec<Complex64> {
        self.t.diagonal().iter().copied().collect()
    }

    /// Solves `self * X + X * other + C = 0`.
    pub fn solve_sylvester(
        &self,
        other: &ComplexSchur,
        c: &DMatrix<Complex64>,
    ) -> Result<DMatrix<Complex64>> {
        if c.nrows() != self.dim() || c.ncols() != other.dim() {
            return Err(Error::DimensionMismatch(format!(
                "Sylvester right-hand side is {}x{}, expected {}x{}",
                c.nrows(),
                c.ncols(),
                self.dim(),
                other.dim()
            )));
        }
        let f = self.q.adjoint() * c * &other.q;
        let tol = clash_tolerance(self.norm + other.norm);
        let y = triangular_sylvester(&self.t, &other.t, &f, tol)?;
        Ok(&self.q * y * other.q.adjoint())
    }

    /// Real-valued variant for real `self`, `other`, and `C`.
    pub fn solve_sylvester_real(
        &self,
        other: &ComplexSchur,
        c: &DMatrix<f64>,
    ) -> Result<DMatrix<f64>> {
        Ok(self.solve_sylvester(other, &to_complex(c))?.map(|z| z.re))
    }
}

pub(crate) fn clash_tolerance(scale: f64) -> f64 {
    1e-13 * scale.max(f64::MIN_POSITIVE)
}

/// Solves `T Y + Y R + F = 0` for upper triangular `T` and `R`.
pub(crate) fn triangular_sylvester(
    t: &DMatrix<Complex64>,
    r: &DMatrix<Complex64>,
    f: &DMatrix<Complex64>,
    clash_tol: f64,
) -> Result<DMatrix<Complex64>> {
    let n = t.nrows();
    let m = r.nrows();
    let mut y = DMatrix::<Complex64>::zeros(n, m);
    let mut rhs = vec![Complex64::new(0.0, 0.0); n];
    for j in 0..m {
        let rjj = r[(j, j)];
        for i in 0..n {
            let mut acc = -f[(i, j)];
            for k in 0..j {
                acc -= y[(i, k)] * r[(k, j)];
            }
            rhs[i] = acc;
        }
        for i in (0..n).rev() {
            let mut acc = rhs[i];
            for k in i + 1..n {
                acc -= t[(i, k)] * y[(k, j)];
            }
            let pivot = t[(i, i)] + rjj;
            if pivot.norm() <= clash_tol {
                return Err(Error::SpectrumClash);
            }
            y[(i, j)] = acc / pivot;
        }
    }
    Ok(y)
}

/// Solves `A X + X B + C = 0` for real matrices.
pub fn solve_sylvester(a: &DMatrix<f64>, b: &DMatrix<f64>, c: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let sa = ComplexSchur::from_real(a)?;
    let sb = ComplexSchur::from_real(b)?;
    sa.solve_sylvester_real(&sb, c)
}

/// Solves `A P + P A^T + W = 0` for Hurwitz `A`.
///
/// When `W` is symmetric the returned `P` is symmetrized.
pub fn solve_lyapunov(a: &DMatrix<f64>, w: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    check_hurwitz(a)?;
    let sa = ComplexSchur::from_real(a)?;
    let sat = ComplexSchur::from_real(&a.transpose())?;
    let p = sa.solve_sylvester_real(&sat, w)?;
    Ok(if *w == w.transpose() { symmetrize(&p) } else { p })
}

pub(crate) fn symmetrize(p: &DMatrix<f64>) -> DMatrix<f64> {
    (p + p.transpose()) * 0.5
}
