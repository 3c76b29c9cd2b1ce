#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use freqlim::matfun::quad::integrate_matrix;
use freqlim::matfun::spectral_abscissa;
use freqlim::{FrequencyBand, Result, StateSpaceModel, StructureMask};

pub fn random_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.gen_range(-1.0..1.0))
}

/// Random matrix shifted so its spectral abscissa lies in `[-1, -0.1]`.
pub fn random_hurwitz<R: Rng>(rng: &mut R, n: usize) -> DMatrix<f64> {
    let m = random_matrix(rng, n, n) * 2.0;
    let (abscissa, _) = spectral_abscissa(&m).unwrap();
    let target = rng.gen_range(-1.0..-0.1);
    m + DMatrix::identity(n, n) * (target - abscissa)
}

pub fn random_stable<R: Rng>(rng: &mut R, n: usize, m: usize, p: usize, with_d: bool) -> StateSpaceModel {
    let a = random_hurwitz(rng, n);
    let b = random_matrix(rng, n, m);
    let c = random_matrix(rng, p, n);
    let d = if with_d { random_matrix(rng, p, m) } else { DMatrix::zeros(p, m) };
    StateSpaceModel::new(a, b, c, d).unwrap()
}

/// `[0, w]`, `[lo, hi]`, or a union of two such intervals.
pub fn random_bounded_band<R: Rng>(rng: &mut R) -> FrequencyBand {
    match rng.gen_range(0..3) {
        0 => FrequencyBand::up_to(rng.gen_range(0.2..4.0)).unwrap(),
        1 => {
            let lo = rng.gen_range(0.1..2.0);
            FrequencyBand::new([(lo, lo + rng.gen_range(0.2..3.0))]).unwrap()
        }
        _ => {
            let a = rng.gen_range(0.0..1.0);
            let b = a + rng.gen_range(0.2..1.5);
            let c = b + rng.gen_range(0.1..1.0);
            FrequencyBand::new([(a, b), (c, c + rng.gen_range(0.2..2.0))]).unwrap()
        }
    }
}

pub fn random_mask<R: Rng>(rng: &mut R, r: usize, m: usize, p: usize) -> StructureMask {
    let mut bit = |rows, cols| DMatrix::from_fn(rows, cols, |_, _| if rng.gen_bool(0.6) { 1.0 } else { 0.0 });
    StructureMask::new(bit(r, r), bit(r, m), bit(p, r), bit(p, m)).unwrap()
}

/// `(1/π) ∫_Ω tr G(iν) G(iν)ᴴ dν` by adaptive Gauss–Legendre quadrature.
pub fn quadrature_norm_sq(g: &StateSpaceModel, band: &FrequencyBand, tol: f64) -> f64 {
    let mut total = 0.0;
    for iv in band.intervals() {
        let mut f = |nu: f64| -> Result<DMatrix<Complex64>> {
            let h = g.freq_response(nu)?;
            Ok(DMatrix::from_element(1, 1, (&h * h.adjoint()).trace()))
        };
        total += integrate_matrix(&mut f, iv.lo, iv.hi, tol).unwrap()[(0, 0)].re;
    }
    total / std::f64::consts::PI
}

pub fn max_response_gap(g1: &StateSpaceModel, g2: &StateSpaceModel, freqs: &[f64]) -> f64 {
    freqs
        .iter()
        .map(|w| (g1.freq_response(*w).unwrap() - g2.freq_response(*w).unwrap()).norm())
        .fold(0.0, f64::max)
}

pub fn log_grid(lo_exp: f64, hi_exp: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| 10f64.powf(lo_exp + (hi_exp - lo_exp) * k as f64 / (n - 1) as f64))
        .collect()
}
