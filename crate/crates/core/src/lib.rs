//! Frequency-limited H2 model order reduction for continuous-time LTI
//! state-space models.

pub mod band;
pub mod error;
pub mod freqgram;
pub mod matfun;
pub mod reducers;
pub mod ssmodel;

pub use band::{FrequencyBand, Interval};
pub use error::{Error, Result};
pub use freqgram::{CostEvaluator, Gradient, GradientWorkspace, StructureMask};
pub use reducers::{Method, ReductionReport};
pub use ssmodel::StateSpaceModel;
