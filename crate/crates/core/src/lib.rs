//! ROC curve estimation, optimal cutoff selection and simulation tools.

pub mod distributions;
pub mod error;
pub mod roc;
pub mod cutoffs;
pub mod stats;
pub mod bayes;
pub mod models;
pub mod sim;

pub use error::{Error, Result};
pub use bayes::{Chains, McmcConfig, Summary};
pub use cutoffs::{Criterion, CutoffResult, CutoffSource};
pub use distributions::Dist;
pub use models::{FittedModel, ModelKind, Sample};
pub use roc::{Orientation, RocPair};
pub use sim::{Level, Mechanism, SimOptions, SimStudySpec, TrueValues};
