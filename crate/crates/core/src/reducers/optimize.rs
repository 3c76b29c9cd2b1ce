//! L-BFGS descent on the band-limited H2 error over the free entries of a
//! reduced realization.

use std::collections::VecDeque;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};

use crate::band::FrequencyBand;
use crate::error::{Error, Result};
use crate::freqgram::{CostEvaluator, Gradient, StructureMask};
use crate::matfun::{check_hurwitz, is_hurwitz_matrix};
use crate::ssmodel::StateSpaceModel;

use super::report::{evaluate, ReductionReport};

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerOptions {
    pub max_iterations: usize,
    /// Stop once the ∞-norm of the masked gradient falls to this value.
    pub gradient_tolerance: f64,
    /// Number of stored curvature pairs.
    pub memory: usize,
    /// Step shrink factor of the backtracking line search.
    pub contraction: f64,
    /// Armijo constant.
    pub sufficient_decrease: f64,
    pub max_backtracks: usize,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        Self {
            max_iterations: 500,
            gradient_tolerance: 1e-6,
            memory: 20,
            contraction: 0.5,
            sufficient_decrease: 1e-4,
            max_backtracks: 60,
        }
    }
}

impl OptimizerOptions {
    pub fn validate(&self) -> Result<()> {
        let ok = self.max_iterations > 0
            && self.gradient_tolerance > 0.0
            && self.memory > 0
            && self.contraction > 0.0
            && self.contraction < 1.0
            && self.sufficient_decrease > 0.0
            && self.sufficient_decrease < 1.0
            && self.max_backtracks > 0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidOptions(format!("{self:?}")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    GradientTolerance,
    IterationLimit,
    /// No stable point with sufficient decrease was found along the search
    /// direction; the last accepted iterate is returned.
    LineSearchFailure,
}

/// Per-run optimizer history.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationTrace {
    /// Variable cost (without the `Ĝ`-independent term) at every accepted
    /// iterate, starting with the initial point.
    pub costs: Vec<f64>,
    pub gradient_norm: f64,
    pub termination: Termination,
}

#[derive(Debug, Clone)]
pub struct Optimized {
    pub model: StateSpaceModel,
    pub report: ReductionReport,
    pub trace: OptimizationTrace,
}

/// Free entries of the four matrices, column-major in the order `Â, B̂, Ĉ, D̂`.
struct Parameterization {
    mask: StructureMask,
    template: [DMatrix<f64>; 4],
}

impl Parameterization {
    fn pack_matrices(&self, mats: [&DMatrix<f64>; 4]) -> DVector<f64> {
        let masks = [&self.mask.a, &self.mask.b, &self.mask.c, &self.mask.d];
        let values: Vec<f64> = masks
            .iter()
            .zip(mats)
            .flat_map(|(mask, m)| mask.iter().zip(m.iter()).filter(|(f, _)| **f == 1.0).map(|(_, v)| *v))
            .collect();
        DVector::from_vec(values)
    }

    fn pack(&self, model: &StateSpaceModel) -> DVector<f64> {
        self.pack_matrices([model.a(), model.b(), model.c(), model.d()])
    }

    fn pack_gradient(&self, g: &Gradient) -> DVector<f64> {
        self.pack_matrices([&g.a, &g.b, &g.c, &g.d])
    }

    fn unpack(&self, x: &DVector<f64>) -> Result<StateSpaceModel> {
        let masks = [&self.mask.a, &self.mask.b, &self.mask.c, &self.mask.d];
        let mut mats = self.template.clone();
        let mut values = x.iter();
        for (mask, m) in masks.iter().zip(mats.iter_mut()) {
            for (f, v) in mask.iter().zip(m.iter_mut()) {
                if *f == 1.0 {
                    *v = *values.next().expect("parameter vector length matches mask");
                }
            }
        }
        let [a, b, c, d] = mats;
        StateSpaceModel::new(a, b, c, d)
    }
}

/// Two-loop recursion: `−H g` for the stored pairs `(s, y, 1/sᵀy)`.
fn lbfgs_direction(g: &DVector<f64>, pairs: &VecDeque<(DVector<f64>, DVector<f64>, f64)>, gamma: f64) -> DVector<f64> {
    let mut q = g.clone();
    let mut alphas = Vec::with_capacity(pairs.len());
    for (s, y, rho) in pairs.iter().rev() {
        let alpha = rho * s.dot(&q);
        q.axpy(-alpha, y, 1.0);
        alphas.push(alpha);
    }
    q *= gamma;
    for ((s, y, rho), alpha) in pairs.iter().zip(alphas.into_iter().rev()) {
        let beta = rho * y.dot(&q);
        q.axpy(alpha - beta, s, 1.0);
    }
    -q
}

/// Minimizes `‖G − Ĝ‖²_{H2,Ω}` over the entries of `init` selected by `mask`.
///
/// Trial points whose `Â` is not Hurwitz are rejected by the line search,
/// so every accepted iterate is stable and the cost never increases.
pub fn h2w_optimize(
    model: &StateSpaceModel,
    r: usize,
    band: &FrequencyBand,
    mask: &StructureMask,
    init: &StateSpaceModel,
    opts: &OptimizerOptions,
) -> Result<Optimized> {
    let start = Instant::now();
    opts.validate()?;
    check_hurwitz(model.a())?;
    if init.states() != r || init.inputs() != model.inputs() || init.outputs() != model.outputs() {
        return Err(Error::DimensionMismatch(format!(
            "initial model has {} states, {} inputs, {} outputs; expected {r}, {}, {}",
            init.states(),
            init.inputs(),
            init.outputs(),
            model.inputs(),
            model.outputs()
        )));
    }
    let (stable, max_real_eig) = init.is_hurwitz()?;
    if !stable {
        return Err(Error::UnstableInit { max_real_eig });
    }
    mask.check_shape(r, model.inputs(), model.outputs())?;
    let mask = mask.clone().for_band(band);

    let evaluator = CostEvaluator::new(model, band)?;
    let params = Parameterization {
        mask: mask.clone(),
        template: [init.a().clone(), init.b().clone(), init.c().clone(), init.d().clone()],
    };

    let mut current = init.clone();
    let mut x = params.pack(&current);
    let (mut f, grad) = evaluator.cost_and_gradient(&current, &mask)?;
    let mut g = params.pack_gradient(&grad);
    let mut costs = vec![f];
    let mut pairs: VecDeque<(DVector<f64>, DVector<f64>, f64)> = VecDeque::with_capacity(opts.memory);
    let mut gamma = 1.0 / g.amax().max(1.0);
    let mut iterations = 0;
    let mut termination = Termination::IterationLimit;

    while iterations < opts.max_iterations {
        if g.is_empty() || g.amax() <= opts.gradient_tolerance {
            termination = Termination::GradientTolerance;
            break;
        }
        let mut direction = lbfgs_direction(&g, &pairs, gamma);
        let mut slope = g.dot(&direction);
        if !(slope < 0.0) {
            pairs.clear();
            direction = -&g * gamma;
            slope = g.dot(&direction);
        }
        let mut accepted = line_search(&evaluator, &params, &mask, &x, f, &direction, slope, opts);
        if accepted.is_none() && !pairs.is_empty() {
            // retry once along steepest descent with a fresh memory
            pairs.clear();
            direction = -&g * (1.0 / g.amax().max(1.0));
            slope = g.dot(&direction);
            accepted = line_search(&evaluator, &params, &mask, &x, f, &direction, slope, opts);
        }
        let Some(Accepted { x: x_new, model: model_new, cost: f_new, gradient: grad_new }) = accepted else {
            termination = Termination::LineSearchFailure;
            break;
        };
        let s = &x_new - &x;
        let y = &grad_new - &g;
        let sy = s.dot(&y);
        if sy > 1e-12 * s.norm() * y.norm() && sy > 0.0 {
            if pairs.len() == opts.memory {
                pairs.pop_front();
            }
            gamma = sy / y.norm_squared();
            pairs.push_back((s, y, 1.0 / sy));
        }
        x = x_new;
        current = model_new;
        f = f_new;
        g = grad_new;
        costs.push(f);
        iterations += 1;
    }
    if iterations == opts.max_iterations && g.amax() <= opts.gradient_tolerance {
        termination = Termination::GradientTolerance;
    }

    let mut report = evaluate(model, &current, band)?;
    report.method = "proposed".into();
    report.iterations = iterations;
    report.runtime_seconds = start.elapsed().as_secs_f64();
    Ok(Optimized {
        model: current,
        report,
        trace: OptimizationTrace { costs, gradient_norm: g.amax(), termination },
    })
}

struct Accepted {
    x: DVector<f64>,
    model: StateSpaceModel,
    cost: f64,
    gradient: DVector<f64>,
}

fn trial_cost(evaluator: &CostEvaluator, params: &Parameterization, x: &DVector<f64>) -> Option<(StateSpaceModel, f64)> {
    let model = params.unpack(x).ok()?;
    if !is_hurwitz_matrix(model.a()).map_or(false, |h| h.0) {
        return None;
    }
    let value = evaluator.variable_cost(&model).ok()?;
    value.is_finite().then_some((model, value))
}

fn line_search(
    evaluator: &CostEvaluator,
    params: &Parameterization,
    mask: &StructureMask,
    x: &DVector<f64>,
    f: f64,
    direction: &DVector<f64>,
    slope: f64,
    opts: &OptimizerOptions,
) -> Option<Accepted> {
    let armijo = |step: f64, value: f64| value < f && value <= f + opts.sufficient_decrease * step * slope;
    let gradient_at = |model: &StateSpaceModel| -> Option<DVector<f64>> {
        let (_, grad) = evaluator.cost_and_gradient(model, mask).ok()?;
        Some(params.pack_gradient(&grad))
    };
    let mut step = 1.0;
    for _ in 0..opts.max_backtracks {
        let trial = x + direction * step;
        if let Some((model, value)) = trial_cost(evaluator, params, &trial) {
            if armijo(step, value) {
                let gradient = gradient_at(&model)?;
                return Some(Accepted { x: trial, model, cost: value, gradient });
            }
        }
        step *= opts.contraction;
    }
    None
}
