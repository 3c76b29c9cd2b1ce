//! Reduction cost `‖G − Ĝ‖²_{H2,Ω}` and its gradient in `(Â, B̂, Ĉ, D̂)`.
//!
//! With the error system partitioned as `diag(A, Â)`, the Gramians split into
//! blocks solving
//!
//! ```text
//! A X_ω + X_ω Âᵀ + S B B̂ᵀ + B B̂ᵀ Ŝᵀ = 0
//! Â P̂_ω + P̂_ω Âᵀ + Ŝ B̂ B̂ᵀ + B̂ B̂ᵀ Ŝᵀ = 0
//! Aᵀ Y_ω + Y_ω Â − Sᵀ Cᵀ Ĉ − Cᵀ Ĉ Ŝ = 0
//! Âᵀ Q̂_ω + Q̂_ω Â + Ŝᵀ Ĉᵀ Ĉ + Ĉᵀ Ĉ Ŝ = 0
//! ```
//!
//! where `S = S_Ω(A)` and `Ŝ = S_Ω(Â)`. Only the blocks involving `Ĝ` are
//! re-solved per evaluation; everything that depends on `G` alone is cached
//! in [`CostEvaluator`].

use std::cell::OnceCell;

use nalgebra::DMatrix;

use crate::band::FrequencyBand;
use crate::error::{Error, Result};
use crate::matfun::{check_hurwitz, s_band, s_band_adjoint, solve_lyapunov, ComplexSchur};
use crate::ssmodel::StateSpaceModel;

use super::StructureMask;

/// Gradient blocks with the shapes of `(Â, B̂, Ĉ, D̂)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradient {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub c: DMatrix<f64>,
    pub d: DMatrix<f64>,
}

impl Gradient {
    pub fn inf_norm(&self) -> f64 {
        [&self.a, &self.b, &self.c, &self.d]
            .iter()
            .flat_map(|m| m.iter())
            .fold(0.0, |acc, x| acc.max(x.abs()))
    }

    fn masked(mut self, mask: &StructureMask) -> Self {
        self.a.component_mul_assign(&mask.a);
        self.b.component_mul_assign(&mask.b);
        self.c.component_mul_assign(&mask.c);
        self.d.component_mul_assign(&mask.d);
        self
    }
}

/// Solutions of the partitioned Gramian equations for one reduced model,
/// plus the unlimited `X`, `P̂` and the adjoint quantities `V`, `W`.
#[derive(Debug, Clone)]
pub struct GradientWorkspace {
    /// `S_Ω(A)`
    pub s: DMatrix<f64>,
    /// `S_Ω(Â)`
    pub s_hat: DMatrix<f64>,
    pub x_w: DMatrix<f64>,
    pub y_w: DMatrix<f64>,
    pub p_hat_w: DMatrix<f64>,
    pub q_hat_w: DMatrix<f64>,
    /// `A X + X Âᵀ + B B̂ᵀ = 0`
    pub x: DMatrix<f64>,
    /// `Â P̂ + P̂ Âᵀ + B̂ B̂ᵀ = 0`
    pub p_hat: DMatrix<f64>,
    /// `Ĉᵀ Ĉ P̂ − Ĉᵀ C X − Ĉᵀ (D − D̂) B̂ᵀ`
    pub v: DMatrix<f64>,
    /// adjoint of `Â ↦ S_Ω(Â)` applied to `V`
    pub w: DMatrix<f64>,
}

/// Cost and gradient evaluation against a fixed full-order model and band.
#[derive(Debug, Clone)]
pub struct CostEvaluator {
    g: StateSpaceModel,
    band: FrequencyBand,
    theta: f64,
    schur_a: ComplexSchur,
    schur_at: ComplexSchur,
    s: DMatrix<f64>,
    /// `S B`
    sb: DMatrix<f64>,
    /// `Sᵀ Cᵀ`
    stct: DMatrix<f64>,
    /// `C S B + D θ`
    k: DMatrix<f64>,
    constant_b: OnceCell<f64>,
    constant_c: OnceCell<f64>,
}

impl CostEvaluator {
    pub fn new(g: &StateSpaceModel, band: &FrequencyBand) -> Result<Self> {
        let a = g.a();
        check_hurwitz(a)?;
        let s = s_band(a, band)?;
        let theta = band.theta();
        let sb = &s * g.b();
        let stct = s.transpose() * g.c().transpose();
        let mut k = g.c() * &sb;
        if !band.is_unbounded() {
            k += g.d() * theta;
        }
        Ok(Self {
            g: g.clone(),
            band: band.clone(),
            theta,
            schur_a: ComplexSchur::from_real(a)?,
            schur_at: ComplexSchur::from_real(&a.transpose())?,
            s,
            sb,
            stct,
            k,
            constant_b: OnceCell::new(),
            constant_c: OnceCell::new(),
        })
    }

    pub fn model(&self) -> &StateSpaceModel {
        &self.g
    }

    pub fn band(&self) -> &FrequencyBand {
        &self.band
    }

    fn check_reduced(&self, ghat: &StateSpaceModel) -> Result<()> {
        if ghat.inputs() != self.g.inputs() || ghat.outputs() != self.g.outputs() {
            return Err(Error::DimensionMismatch(format!(
                "reduced model is {}x{}, full model is {}x{}",
                ghat.outputs(),
                ghat.inputs(),
                self.g.outputs(),
                self.g.inputs()
            )));
        }
        if self.band.is_unbounded() && ghat.d() != self.g.d() {
            return Err(Error::UnboundedBandWithFeedthrough);
        }
        check_hurwitz(ghat.a())
    }

    /// `tr Bᵀ Q_Ω B`, independent of the reduced model.
    pub fn constant_term(&self) -> Result<f64> {
        if let Some(v) = self.constant_b.get() {
            return Ok(*v);
        }
        let c = self.g.c();
        let ccs = c.transpose() * c * &self.s;
        let q = self
            .schur_at
            .solve_sylvester_real(&self.schur_a, &(&ccs + ccs.transpose()))?;
        let b = self.g.b();
        let v = (b.transpose() * q * b).trace();
        Ok(*self.constant_b.get_or_init(|| v))
    }

    /// `tr C P_Ω Cᵀ`, the constant of the alternative cost form.
    fn constant_term_c(&self) -> Result<f64> {
        if let Some(v) = self.constant_c.get() {
            return Ok(*v);
        }
        let b = self.g.b();
        let sbb = &self.sb * b.transpose();
        let p = self
            .schur_a
            .solve_sylvester_real(&self.schur_at, &(&sbb + sbb.transpose()))?;
        let c = self.g.c();
        let v = (c * p * c.transpose()).trace();
        Ok(*self.constant_c.get_or_init(|| v))
    }

    /// `2 tr[(C S B + D θ − Ĉ Ŝ B̂ − D̂ θ)(D − D̂)ᵀ]`
    fn feedthrough_term(&self, ghat: &StateSpaceModel, s_hat: &DMatrix<f64>) -> f64 {
        if self.band.is_unbounded() {
            return 0.0;
        }
        let dd = self.g.d() - ghat.d();
        let k_hat = ghat.c() * s_hat * ghat.b() + ghat.d() * self.theta;
        2.0 * ((&self.k - k_hat) * dd.transpose()).trace()
    }

    fn y_and_q_hat(
        &self,
        ghat: &StateSpaceModel,
        s_hat: &DMatrix<f64>,
        schur_ah: &ComplexSchur,
        schur_aht: &ComplexSchur,
    ) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
        let ch = ghat.c();
        let rhs_y = -(&self.stct * ch + self.g.c().transpose() * ch * s_hat);
        let y = self.schur_at.solve_sylvester_real(schur_ah, &rhs_y)?;
        let cchs = ch.transpose() * ch * s_hat;
        let q_hat = crate::matfun::symmetrize(
            &schur_aht.solve_sylvester_real(schur_ah, &(&cchs + cchs.transpose()))?,
        );
        Ok((y, q_hat))
    }

    /// Cost without the constant `tr Bᵀ Q_Ω B`.
    pub fn variable_cost(&self, ghat: &StateSpaceModel) -> Result<f64> {
        self.check_reduced(ghat)?;
        let ah = ghat.a();
        let s_hat = s_band(ah, &self.band)?;
        let schur_ah = ComplexSchur::from_real(ah)?;
        let schur_aht = ComplexSchur::from_real(&ah.transpose())?;
        let (y, q_hat) = self.y_and_q_hat(ghat, &s_hat, &schur_ah, &schur_aht)?;
        let (b, bh) = (self.g.b(), ghat.b());
        let quad = 2.0 * (b.transpose() * y * bh).trace() + (bh.transpose() * q_hat * bh).trace();
        Ok(quad + self.feedthrough_term(ghat, &s_hat))
    }

    /// Full cost `‖G − Ĝ‖²_{H2,Ω}` in the observability-side form.
    pub fn cost(&self, ghat: &StateSpaceModel) -> Result<f64> {
        Ok(self.constant_term()? + self.variable_cost(ghat)?)
    }

    /// The same cost through the controllability-side blocks
    /// `tr(C P_Ω Cᵀ − 2 C X_ω Ĉᵀ + Ĉ P̂_ω Ĉᵀ)` plus the feedthrough term.
    pub fn cost_controllability_form(&self, ghat: &StateSpaceModel) -> Result<f64> {
        self.check_reduced(ghat)?;
        let ah = ghat.a();
        let s_hat = s_band(ah, &self.band)?;
        let schur_ah = ComplexSchur::from_real(ah)?;
        let schur_aht = ComplexSchur::from_real(&ah.transpose())?;
        let (x_w, p_hat_w) = self.x_and_p_hat_w(ghat, &s_hat, &schur_ah, &schur_aht)?;
        let (c, ch) = (self.g.c(), ghat.c());
        let quad = -2.0 * (c * x_w * ch.transpose()).trace() + (ch * p_hat_w * ch.transpose()).trace();
        Ok(self.constant_term_c()? + quad + self.feedthrough_term(ghat, &s_hat))
    }

    fn x_and_p_hat_w(
        &self,
        ghat: &StateSpaceModel,
        s_hat: &DMatrix<f64>,
        schur_ah: &ComplexSchur,
        schur_aht: &ComplexSchur,
    ) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
        let bh = ghat.b();
        let rhs_x = &self.sb * bh.transpose() + self.g.b() * bh.transpose() * s_hat.transpose();
        let x_w = self.schur_a.solve_sylvester_real(schur_aht, &rhs_x)?;
        let sbb = s_hat * bh * bh.transpose();
        let p_hat_w = crate::matfun::symmetrize(
            &schur_ah.solve_sylvester_real(schur_aht, &(&sbb + sbb.transpose()))?,
        );
        Ok((x_w, p_hat_w))
    }

    /// Solves every equation the gradient needs.
    pub fn workspace(&self, ghat: &StateSpaceModel) -> Result<GradientWorkspace> {
        self.check_reduced(ghat)?;
        let ah = ghat.a();
        let (bh, ch) = (ghat.b(), ghat.c());
        let schur_ah = ComplexSchur::from_real(ah)?;
        let schur_aht = ComplexSchur::from_real(&ah.transpose())?;

        let x = self
            .schur_a
            .solve_sylvester_real(&schur_aht, &(self.g.b() * bh.transpose()))?;
        let p_hat = solve_lyapunov(ah, &(bh * bh.transpose()))?;
        let dd = self.g.d() - ghat.d();
        let v = ch.transpose() * ch * &p_hat - ch.transpose() * self.g.c() * &x - ch.transpose() * dd * bh.transpose();
        let (s_hat, w) = s_band_adjoint(ah, &self.band, &v)?;

        let (y_w, q_hat_w) = self.y_and_q_hat(ghat, &s_hat, &schur_ah, &schur_aht)?;
        let (x_w, p_hat_w) = self.x_and_p_hat_w(ghat, &s_hat, &schur_ah, &schur_aht)?;
        Ok(GradientWorkspace {
            s: self.s.clone(),
            s_hat,
            x_w,
            y_w,
            p_hat_w,
            q_hat_w,
            x,
            p_hat,
            v,
            w,
        })
    }

    /// Variable part of the cost and the masked gradient.
    pub fn cost_and_gradient(&self, ghat: &StateSpaceModel, mask: &StructureMask) -> Result<(f64, Gradient)> {
        mask.check_shape(ghat.states(), ghat.inputs(), ghat.outputs())?;
        let ws = self.workspace(ghat)?;
        let (b, c) = (self.g.b(), self.g.c());
        let (bh, ch) = (ghat.b(), ghat.c());
        let dd = self.g.d() - ghat.d();

        let cost = 2.0 * (b.transpose() * &ws.y_w * bh).trace()
            + (bh.transpose() * &ws.q_hat_w * bh).trace()
            + self.feedthrough_term(ghat, &ws.s_hat);

        let ga = (ws.y_w.transpose() * &ws.x + &ws.q_hat_w * &ws.p_hat - &ws.w) * 2.0;
        let gb = (&ws.q_hat_w * bh + ws.y_w.transpose() * b - ws.s_hat.transpose() * ch.transpose() * &dd) * 2.0;
        let gc = (ch * &ws.p_hat_w - c * &ws.x_w - &dd * bh.transpose() * ws.s_hat.transpose()) * 2.0;
        let gd = if self.band.is_unbounded() {
            DMatrix::zeros(dd.nrows(), dd.ncols())
        } else {
            let k_hat = ch * &ws.s_hat * bh + ghat.d() * self.theta;
            (&self.k - k_hat + &dd * self.theta) * -2.0
        };
        let grad = Gradient { a: ga, b: gb, c: gc, d: gd }.masked(mask);
        Ok((cost, grad))
    }
}

/// `‖G − Ĝ‖²_{H2,Ω}`, optionally without the `Ĝ`-independent term.
pub fn error_cost(
    g: &StateSpaceModel,
    ghat: &StateSpaceModel,
    band: &FrequencyBand,
    drop_constant: bool,
) -> Result<f64> {
    check_hurwitz(g.a())?;
    let eval = CostEvaluator::new(g, band)?;
    if drop_constant {
        eval.variable_cost(ghat)
    } else {
        eval.cost(ghat)
    }
}

/// Both cost forms: `(observability side, controllability side)`.
pub fn error_cost_forms(g: &StateSpaceModel, ghat: &StateSpaceModel, band: &FrequencyBand) -> Result<(f64, f64)> {
    let eval = CostEvaluator::new(g, band)?;
    Ok((eval.cost(ghat)?, eval.cost_controllability_form(ghat)?))
}

/// Masked gradient of `‖G − Ĝ‖²_{H2,Ω}` with respect to `(Â, B̂, Ĉ, D̂)`.
pub fn error_gradient(
    g: &StateSpaceModel,
    ghat: &StateSpaceModel,
    band: &FrequencyBand,
    mask: &StructureMask,
) -> Result<Gradient> {
    let eval = CostEvaluator::new(g, band)?;
    Ok(eval.cost_and_gradient(ghat, mask)?.1)
}
