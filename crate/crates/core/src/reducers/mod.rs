//! The four reduction methods and their metrics.

mod balance;
mod optimize;
mod report;

pub use balance::{balanced_truncation, gawronski_reduce, hankel_singular_values, modified_gawronski_reduce};
pub use optimize::{h2w_optimize, OptimizationTrace, Optimized, OptimizerOptions, Termination};
pub use report::{evaluate, ReductionReport};

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use crate::band::FrequencyBand;
use crate::error::{Error, Result};
use crate::freqgram::StructureMask;
use crate::ssmodel::StateSpaceModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Balanced truncation with the standard Gramians.
    Hankel,
    Gawronski,
    ModifiedGawronski,
    /// Band-limited H2 optimization.
    Proposed,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Hankel, Method::Gawronski, Method::ModifiedGawronski, Method::Proposed];

    pub fn name(self) -> &'static str {
        match self {
            Method::Hankel => "hankel",
            Method::Gawronski => "gawronski",
            Method::ModifiedGawronski => "modgawronski",
            Method::Proposed => "proposed",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s.trim())
            .ok_or_else(|| Error::Parse {
                location: "method".into(),
                message: format!("unknown method {s:?}; expected one of hankel, gawronski, modgawronski, proposed"),
            })
    }
}

/// Starting point of the optimization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InitPolicy {
    /// Gawronski if its output is stable, balanced truncation otherwise.
    #[default]
    Auto,
    Gawronski,
    Hankel,
}

impl FromStr for InitPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "auto" => Ok(InitPolicy::Auto),
            "gawronski" => Ok(InitPolicy::Gawronski),
            "hankel" => Ok(InitPolicy::Hankel),
            other => Err(Error::Parse {
                location: "init".into(),
                message: format!("unknown init policy {other:?}; expected auto, gawronski or hankel"),
            }),
        }
    }
}

/// Gawronski reduction when stable, else balanced truncation. The second
/// value names the method that produced the result.
pub fn choose_init(model: &StateSpaceModel, r: usize, band: &FrequencyBand) -> Result<(StateSpaceModel, Method)> {
    match gawronski_reduce(model, r, band) {
        Ok(g) if g.is_hurwitz()?.0 => return Ok((g, Method::Gawronski)),
        Ok(_) | Err(Error::RankDeficientGramian { .. }) => {}
        Err(e) => return Err(e),
    }
    Ok((balanced_truncation(model, r)?, Method::Hankel))
}

/// Runs one method end to end and reports its metrics.
///
/// Without a mask the proposed method optimizes `Â, B̂, Ĉ` and keeps
/// `D̂ = D`; pass a mask to free `D̂` or to impose structure.
pub fn reduce(
    method: Method,
    model: &StateSpaceModel,
    r: usize,
    band: &FrequencyBand,
    mask: Option<&StructureMask>,
    init: InitPolicy,
    opts: &OptimizerOptions,
) -> Result<(StateSpaceModel, ReductionReport)> {
    let start = Instant::now();
    let reduced = match method {
        Method::Hankel => balanced_truncation(model, r)?,
        Method::Gawronski => gawronski_reduce(model, r, band)?,
        Method::ModifiedGawronski => modified_gawronski_reduce(model, r, band)?,
        Method::Proposed => {
            let start_point = match init {
                InitPolicy::Auto => choose_init(model, r, band)?.0,
                InitPolicy::Gawronski => gawronski_reduce(model, r, band)?,
                InitPolicy::Hankel => balanced_truncation(model, r)?,
            };
            let default = StructureMask::without_feedthrough(r, model.inputs(), model.outputs());
            let out = h2w_optimize(model, r, band, mask.unwrap_or(&default), &start_point, opts)?;
            let mut report = out.report;
            report.runtime_seconds = start.elapsed().as_secs_f64();
            return Ok((out.model, report));
        }
    };
    let mut report = evaluate(model, &reduced, band)?;
    report.method = method.name().into();
    report.runtime_seconds = start.elapsed().as_secs_f64();
    Ok((reduced, report))
}

/// Two lightly damped second-order sections in series,
/// `1/(s² + 0.2 s + 1) · 9/(s² + 0.003 s + 9)`, resonant near 1 and 3 rad/s.
pub fn two_mode_example() -> StateSpaceModel {
    StateSpaceModel::series(
        &StateSpaceModel::second_order(1.0, 0.2, 1.0),
        &StateSpaceModel::second_order(9.0, 0.003, 9.0),
    )
    .expect("compatible sections")
}
