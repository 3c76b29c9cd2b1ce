//! Principal matrix logarithm by inverse scaling and squaring on the complex
//! Schur factor, and its Fréchet derivative obtained by differentiating the
//! same recurrence.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

use super::quad::{gauss_legendre_unit, integrate_matrix};
use super::sylvester::{clash_tolerance, triangular_sylvester, ComplexSchur};

/// Square roots are taken until `‖T - I‖₁` drops below this.
const SQRT_THRESHOLD: f64 = 0.25;
/// Gauss–Legendre nodes for `log(I + X) = ∫₀¹ X (I + tX)⁻¹ dt`, i.e. the
/// diagonal Padé approximant of the same degree.
const PADE_NODES: usize = 8;
const MAX_SQRTS: usize = 64;

type CMat = DMatrix<Complex64>;

fn czero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

fn norm1(m: &CMat) -> f64 {
    (0..m.ncols())
        .map(|j| m.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn check_branch(eigs: &[Complex64]) -> Result<()> {
    for z in eigs {
        let on_axis = z.re <= 0.0 && z.im.abs() <= 1e-13 * z.norm().max(f64::MIN_POSITIVE);
        if on_axis || z.norm() == 0.0 {
            return Err(Error::BranchCut(format!("eigenvalue {z}")));
        }
    }
    Ok(())
}

/// Principal square root of an upper triangular matrix.
fn sqrt_triangular(t: &CMat) -> CMat {
    let n = t.nrows();
    let mut r = CMat::zeros(n, n);
    for j in 0..n {
        r[(j, j)] = t[(j, j)].sqrt();
        for i in (0..j).rev() {
            let mut s = t[(i, j)];
            for k in i + 1..j {
                s -= r[(i, k)] * r[(k, j)];
            }
            r[(i, j)] = s / (r[(i, i)] + r[(j, j)]);
        }
    }
    r
}

/// The repeated-square-root chain `T₀ = T, T_{k+1} = √T_k` on the Schur factor.
struct RootChain {
    schur: ComplexSchur,
    roots: Vec<CMat>,
}

impl RootChain {
    fn new(m: &CMat) -> Result<Self> {
        let schur = ComplexSchur::new(m.clone())?;
        check_branch(&schur.eigenvalues())?;
        let n = schur.dim();
        let ident = CMat::identity(n, n);
        let mut roots = Vec::new();
        let mut current = schur.triangular().clone();
        while norm1(&(&current - &ident)) > SQRT_THRESHOLD {
            if roots.len() == MAX_SQRTS {
                return Err(Error::NoConvergence);
            }
            current = sqrt_triangular(&current);
            roots.push(current.clone());
        }
        Ok(Self { schur, roots })
    }

    fn scale(&self) -> f64 {
        2f64.powi(self.roots.len() as i32)
    }

    fn last(&self) -> &CMat {
        self.roots.last().unwrap_or(self.schur.triangular())
    }

    /// `log` of the triangular factor.
    fn log_triangular(&self) -> CMat {
        let t = self.last();
        let n = t.nrows();
        let ident = CMat::identity(n, n);
        let x = t - &ident;
        let (nodes, weights) = gauss_legendre_unit(PADE_NODES);
        let mut acc = CMat::zeros(n, n);
        for (tk, wk) in nodes.iter().zip(&weights) {
            let m = &ident + &x * Complex64::from(*tk);
            let term = m
                .solve_upper_triangular(&x)
                .expect("I + tX is nonsingular for ‖X‖ < 1");
            acc += term * Complex64::from(*wk);
        }
        acc *= Complex64::from(self.scale());
        // diagonal of log(T) is known exactly
        let t0 = self.schur.triangular();
        for i in 0..n {
            acc[(i, i)] = t0[(i, i)].ln();
        }
        for j in 0..n {
            for i in j + 1..n {
                acc[(i, j)] = czero();
            }
        }
        acc
    }

    /// Fréchet derivative on the Schur basis, direction already rotated.
    fn frechet_triangular(&self, direction: &CMat) -> Result<CMat> {
        let mut d = direction.clone();
        for r in &self.roots {
            // R dR + dR R = dT
            let tol = clash_tolerance(2.0 * r.norm());
            d = triangular_sylvester(r, r, &(-d), tol)?;
        }
        let t = self.last();
        let n = t.nrows();
        let ident = CMat::identity(n, n);
        let x = t - &ident;
        let (nodes, weights) = gauss_legendre_unit(PADE_NODES);
        let mut acc = CMat::zeros(n, n);
        for (tk, wk) in nodes.iter().zip(&weights) {
            let m = &ident + &x * Complex64::from(*tk);
            // (I + tX)⁻¹ dX (I + tX)⁻¹
            let left = m
                .solve_upper_triangular(&d)
                .expect("I + tX is nonsingular for ‖X‖ < 1");
            let both = m
                .tr_solve_upper_triangular(&left.transpose())
                .expect("I + tX is nonsingular for ‖X‖ < 1")
                .transpose();
            acc += both * Complex64::from(*wk);
        }
        Ok(acc * Complex64::from(self.scale()))
    }

    fn to_schur_basis(&self, e: &CMat) -> CMat {
        let q = self.schur.unitary();
        q.adjoint() * e * q
    }

    fn from_schur_basis(&self, e: &CMat) -> CMat {
        let q = self.schur.unitary();
        q * e * q.adjoint()
    }
}

fn check_square(m: &CMat, what: &str) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "{what} must be square, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

/// Principal logarithm of a complex matrix with no eigenvalue on `(-∞, 0]`.
pub fn matrix_log(m: &CMat) -> Result<CMat> {
    check_square(m, "logarithm argument")?;
    let chain = RootChain::new(m)?;
    Ok(chain.from_schur_basis(&chain.log_triangular()))
}

/// Fréchet derivative `L(M, E)` of the principal logarithm.
pub fn frechet_log(m: &CMat, e: &CMat) -> Result<CMat> {
    let (_, mut derivs) = log_and_frechet(m, &[e])?;
    Ok(derivs.pop().expect("one direction"))
}

/// The logarithm of `M` and its Fréchet derivative in each of `directions`,
/// sharing one Schur factorization and square-root chain.
pub fn log_and_frechet(m: &CMat, directions: &[&CMat]) -> Result<(CMat, Vec<CMat>)> {
    check_square(m, "logarithm argument")?;
    for e in directions {
        if e.shape() != m.shape() {
            return Err(Error::DimensionMismatch(format!(
                "Fréchet direction is {}x{}, expected {}x{}",
                e.nrows(),
                e.ncols(),
                m.nrows(),
                m.ncols()
            )));
        }
    }
    let chain = RootChain::new(m)?;
    let log = chain.from_schur_basis(&chain.log_triangular());
    let derivs = directions
        .iter()
        .map(|e| {
            let d = chain.frechet_triangular(&chain.to_schur_basis(e))?;
            Ok(chain.from_schur_basis(&d))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((log, derivs))
}

/// `L(M, E) = ∫₀¹ (t(M − I) + I)⁻¹ E (t(M − I) + I)⁻¹ dt` by adaptive
/// Gauss–Legendre quadrature. Slower than [`frechet_log`]; kept as an
/// independent cross-check.
pub fn frechet_log_integral(m: &CMat, e: &CMat, tol: f64) -> Result<CMat> {
    check_square(m, "logarithm argument")?;
    check_branch(&ComplexSchur::new(m.clone())?.eigenvalues())?;
    let n = m.nrows();
    let ident = CMat::identity(n, n);
    let shifted = m - &ident;
    let mut integrand = |t: f64| -> Result<CMat> {
        let lu = (&shifted * Complex64::from(t) + &ident).lu();
        let left = lu.solve(e).ok_or(Error::SingularResolvent { t })?;
        let inv = lu.try_inverse().ok_or(Error::SingularResolvent { t })?;
        Ok(left * inv)
    };
    integrate_matrix(&mut integrand, 0.0, 1.0, tol)
}
