//! Square-root balanced truncation with standard, frequency-limited, or
//! PSD-corrected frequency-limited Gramians.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::band::FrequencyBand;
use crate::error::{Error, Result};
use crate::freqgram::{gramians, limited_gramians};
use crate::matfun::{check_hurwitz, s_band, solve_lyapunov};
use crate::ssmodel::StateSpaceModel;

/// Relative size below which a Gramian eigenvalue is treated as zero.
const EIG_FLOOR: f64 = 1e-15;
/// Relative size below which a kept Hankel-type singular value is rank deficient.
const RANK_TOL: f64 = 1e-14;

fn check_order(model: &StateSpaceModel, r: usize) -> Result<()> {
    let n = model.states();
    if r == 0 || r >= n {
        return Err(Error::InvalidOrder { order: r, states: n });
    }
    Ok(())
}

/// Factor `Z` with `M ≈ Z Zᵀ`, flooring negative and tiny eigenvalues at 0.
fn psd_factor(m: &DMatrix<f64>) -> DMatrix<f64> {
    let eig = SymmetricEigen::new(crate::matfun::symmetrize(m));
    let top = eig.eigenvalues.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    let floor = EIG_FLOOR * m.nrows() as f64 * top;
    let mut z = eig.eigenvectors;
    for (j, lambda) in eig.eigenvalues.iter().enumerate() {
        let s = if *lambda > floor { lambda.sqrt() } else { 0.0 };
        z.column_mut(j).scale_mut(s);
    }
    z
}

/// Nearest positive semidefinite matrix in Frobenius norm.
fn psd_part(m: &DMatrix<f64>) -> DMatrix<f64> {
    let z = psd_factor(m);
    &z * z.transpose()
}

/// Balances the Gramian pair `(P, Q)` and keeps the `r` dominant states.
pub(crate) fn balance_truncate(
    model: &StateSpaceModel,
    p: &DMatrix<f64>,
    q: &DMatrix<f64>,
    r: usize,
) -> Result<StateSpaceModel> {
    let zp = psd_factor(p);
    let zq = psd_factor(q);
    let svd = (zq.transpose() * &zp).svd(true, true);
    let u = svd.u.expect("requested U");
    let vt = svd.v_t.expect("requested Vᵀ");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let sigma: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let top = sigma.first().copied().unwrap_or(0.0);
    if sigma[r - 1] <= RANK_TOL * top || sigma[r - 1] == 0.0 {
        return Err(Error::RankDeficientGramian { index: r, value: sigma[r - 1] });
    }
    let n = model.states();
    let mut left = DMatrix::zeros(n, r);
    let mut right = DMatrix::zeros(n, r);
    for (k, &idx) in order.iter().take(r).enumerate() {
        let scale = 1.0 / sigma[k].sqrt();
        left.set_column(k, &(&zq * u.column(idx) * scale));
        right.set_column(k, &(&zp * vt.row(idx).transpose() * scale));
    }
    StateSpaceModel::new(
        left.transpose() * model.a() * &right,
        left.transpose() * model.b(),
        model.c() * &right,
        model.d().clone(),
    )
}

/// Classical square-root balanced truncation (Hankel singular values).
pub fn balanced_truncation(model: &StateSpaceModel, r: usize) -> Result<StateSpaceModel> {
    check_order(model, r)?;
    check_hurwitz(model.a())?;
    let (p, q) = gramians(model)?;
    balance_truncate(model, &p, &q, r)
}

/// Hankel singular values in decreasing order.
pub fn hankel_singular_values(model: &StateSpaceModel) -> Result<Vec<f64>> {
    let (p, q) = gramians(model)?;
    let mut hsv: Vec<f64> = (psd_factor(&q).transpose() * psd_factor(&p))
        .singular_values()
        .iter()
        .copied()
        .collect();
    hsv.sort_by(|a, b| b.total_cmp(a));
    Ok(hsv)
}

/// Balanced truncation with the band-limited Gramians. The result may be
/// unstable.
pub fn gawronski_reduce(model: &StateSpaceModel, r: usize, band: &FrequencyBand) -> Result<StateSpaceModel> {
    check_order(model, r)?;
    let (p, q) = limited_gramians(model, band)?;
    balance_truncate(model, &p, &q, r)
}

/// Gawronski-type reduction where the indefinite Lyapunov right-hand sides
/// `S_Ω B Bᵀ + B Bᵀ S_Ωᵀ` and `S_Ωᵀ Cᵀ C + Cᵀ C S_Ω` are replaced by their
/// positive semidefinite parts before solving for the Gramians.
pub fn modified_gawronski_reduce(
    model: &StateSpaceModel,
    r: usize,
    band: &FrequencyBand,
) -> Result<StateSpaceModel> {
    check_order(model, r)?;
    let (a, b, c) = (model.a(), model.b(), model.c());
    check_hurwitz(a)?;
    let s = s_band(a, band)?;
    let sbb = &s * b * b.transpose();
    let ccs = c.transpose() * c * &s;
    let p = solve_lyapunov(a, &psd_part(&(&sbb + sbb.transpose())))?;
    let q = solve_lyapunov(&a.transpose(), &psd_part(&(&ccs + ccs.transpose())))?;
    balance_truncate(model, &p, &q, r)
}
