//! Fitting the ROC model families to two-group biomarker samples.
//!
//! Every fit produces a [`FittedModel`]: a point curve plus, for the Bayesian
//! families, one curve per retained posterior draw. Curves are evaluated into
//! [`RocPair`]s, optionally at a covariate value.

mod bichisq;
mod bigamma;
mod binormal;
mod nonparametric;
mod pv;

pub use bichisq::{bichisq_auc, bichisq_roc, BichisqParams};
pub use bigamma::{bigamma_pair, fit_bigamma, fit_bigamma_params, BigammaFit};
pub use binormal::{fit_binormal, BinormalParams};
pub use nonparametric::{fit_empirical, fit_kernel};
pub use pv::{
    fit_pv_parametric, fit_pv_semiparametric, fit_pv_semiparametric_with, MixtureComponent, PvMixtureParams,
    PvParams, DEFAULT_ALPHA, DEFAULT_TRUNCATION, PV_CLAMP,
};

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bayes::{gelman_rubin_traces, summarize, Chains, McmcConfig, Summary};
use crate::cutoffs::data_search_interval;
use crate::error::{invalid, Error, Result};
use crate::roc::{auc, Orientation, RocPair};

/// R-hat on the AUC trace above which a fit is flagged as unconverged.
pub const RHAT_WARN: f64 = 1.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelKind {
    Empirical,
    Binormal,
    Kernel,
    Bigamma,
    PvParametric,
    PvSemiparametric,
}

impl ModelKind {
    pub const ALL: [ModelKind; 6] = [
        ModelKind::Empirical,
        ModelKind::Binormal,
        ModelKind::Kernel,
        ModelKind::Bigamma,
        ModelKind::PvParametric,
        ModelKind::PvSemiparametric,
    ];

    /// Short name used on the command line and in reports.
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Empirical => "emp",
            ModelKind::Binormal => "bn",
            ModelKind::Kernel => "nonpar",
            ModelKind::Bigamma => "bigamma",
            ModelKind::PvParametric => "pv",
            ModelKind::PvSemiparametric => "semipv",
        }
    }

    pub fn is_bayesian(self) -> bool {
        matches!(self, ModelKind::Binormal | ModelKind::PvParametric | ModelKind::PvSemiparametric)
    }

    pub fn supports_covariates(self) -> bool {
        self.is_bayesian()
    }

    /// Fits this model with the default DPM settings.
    pub fn fit(self, s: &Sample, mcmc: &McmcConfig) -> Result<FittedModel> {
        match self {
            ModelKind::Empirical => fit_empirical(s),
            ModelKind::Binormal => fit_binormal(s, mcmc),
            ModelKind::Kernel => fit_kernel(s),
            ModelKind::Bigamma => fit_bigamma(s),
            ModelKind::PvParametric => fit_pv_parametric(s, mcmc),
            ModelKind::PvSemiparametric => fit_pv_semiparametric(s, mcmc),
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelKind::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| invalid(format!("unknown model '{s}' (expected emp, bn, nonpar, bigamma, pv or semipv)")))
    }
}

/// Healthy (`y0`) and diseased (`y1`) biomarker values with optional
/// per-subject covariates.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Sample {
    pub y0: Vec<f64>,
    pub y1: Vec<f64>,
    pub x0: Option<Vec<f64>>,
    pub x1: Option<Vec<f64>>,
    pub orientation: Orientation,
}

impl Sample {
    pub fn new(y0: Vec<f64>, y1: Vec<f64>) -> Self {
        Self { y0, y1, ..Self::default() }
    }

    pub fn with_covariates(mut self, x0: Vec<f64>, x1: Vec<f64>) -> Self {
        self.x0 = Some(x0);
        self.x1 = Some(x1);
        self
    }

    pub fn with_orientation(mut self, orientation: Orientation) -> Self {
        self.orientation = orientation;
        self
    }

    pub fn has_covariates(&self) -> bool {
        self.x0.is_some() || self.x1.is_some()
    }

    /// Checks lengths, finiteness and a minimum group size.
    pub fn validate(&self, min_per_group: usize) -> Result<()> {
        for (name, y) in [("healthy", &self.y0), ("diseased", &self.y1)] {
            if y.len() < min_per_group.max(1) {
                return Err(invalid(format!(
                    "{name} group has {} observations, at least {} required",
                    y.len(),
                    min_per_group.max(1)
                )));
            }
            if y.iter().any(|v| !v.is_finite()) {
                return Err(invalid(format!("{name} group contains non-finite values")));
            }
        }
        match (&self.x0, &self.x1) {
            (None, None) => Ok(()),
            (Some(x0), Some(x1)) => {
                if x0.len() != self.y0.len() || x1.len() != self.y1.len() {
                    return Err(invalid("covariate lengths must match their groups"));
                }
                if x0.iter().chain(x1).any(|v| !v.is_finite()) {
                    return Err(invalid("covariates must be finite"));
                }
                Ok(())
            }
            _ => Err(invalid("covariates must be present in both groups or neither")),
        }
    }

    /// Biomarker values mapped to the higher-is-diseased axis.
    pub fn normalized(&self) -> (Vec<f64>, Vec<f64>) {
        let o = self.orientation;
        (self.y0.iter().map(|&v| o.apply(v)).collect(), self.y1.iter().map(|&v| o.apply(v)).collect())
    }

    pub(crate) fn reject_covariates(&self, model: ModelKind) -> Result<()> {
        if self.has_covariates() {
            return Err(Error::UnsupportedModel(format!("the {model} model does not accommodate covariates")));
        }
        Ok(())
    }

    pub(crate) fn reject_constant_groups(&self) -> Result<()> {
        for (name, y) in [("healthy", &self.y0), ("diseased", &self.y1)] {
            if y.iter().all(|&v| v == y[0]) {
                return Err(Error::DegenerateSample(format!("{name} group has zero variance")));
            }
        }
        Ok(())
    }
}

/// A parametric description of one ROC curve that can be evaluated at a
/// covariate value. Curves of covariate-free fits ignore `x`.
#[derive(Debug, Clone, PartialEq)]
pub enum Curve {
    Fixed(RocPair),
    Binormal(BinormalParams),
    Pv(PvParams),
    PvMixture(PvMixtureParams),
}

impl Curve {
    /// The normalized-axis pair at `x`, tagged with `orientation`.
    pub fn pair_at(&self, x: f64, orientation: Orientation) -> Result<RocPair> {
        Ok(match self {
            Curve::Fixed(p) => p.clone(),
            Curve::Binormal(b) => b.pair_at(x)?.with_orientation(orientation),
            Curve::Pv(p) => p.pair_at(x)?.with_orientation(orientation),
            Curve::PvMixture(p) => p.pair_at(x)?.with_orientation(orientation),
        })
    }
}

/// Result of fitting one model family to a [`Sample`].
#[derive(Debug, Clone, PartialEq)]
pub struct FittedModel {
    pub kind: ModelKind,
    pub orientation: Orientation,
    pub covariate: bool,
    /// Point summary: posterior means of the parameters (Bayesian fits) or
    /// the estimate itself.
    pub point: Curve,
    /// One curve per retained draw, chains concatenated; empty for
    /// non-Bayesian fits.
    pub draws: Vec<Curve>,
    pub n_chains: usize,
    /// Raw parameter draws, for dumping.
    pub chains: Option<Chains>,
    /// Default cutoff search interval on the data axis.
    pub search: (f64, f64),
    /// R-hat of the AUC trace, where defined.
    pub rhat: Option<f64>,
}

impl FittedModel {
    pub(crate) fn frequentist(kind: ModelKind, s: &Sample, pair: RocPair) -> Self {
        Self {
            kind,
            orientation: s.orientation,
            covariate: false,
            point: Curve::Fixed(pair),
            draws: Vec::new(),
            n_chains: 0,
            chains: None,
            search: data_search_interval(&s.y0, &s.y1),
            rhat: None,
        }
    }

    /// Assembles a Bayesian fit and computes the AUC-trace R-hat at the mean
    /// covariate value.
    pub(crate) fn bayesian(kind: ModelKind, s: &Sample, point: Curve, draws: Vec<Curve>, chains: Chains) -> Result<Self> {
        let covariate = s.has_covariates();
        let mut m = Self {
            kind,
            orientation: s.orientation,
            covariate,
            point,
            draws,
            n_chains: chains.n_chains(),
            chains: Some(chains),
            search: data_search_interval(&s.y0, &s.y1),
            rhat: None,
        };
        let x = covariate.then(|| {
            let xs: Vec<f64> = s.x0.iter().chain(&s.x1).flatten().copied().collect();
            crate::stats::mean(&xs)
        });
        let aucs = m.draw_aucs(x)?;
        let per = aucs.len() / m.n_chains.max(1);
        let traces: Vec<Vec<f64>> = aucs.chunks(per.max(1)).map(<[f64]>::to_vec).collect();
        m.rhat = gelman_rubin_traces(&traces).ok();
        Ok(m)
    }

    /// A posterior that puts all its mass on one curve: `n` identical draws.
    /// Useful for evaluating known truths through the posterior machinery.
    pub fn point_mass(kind: ModelKind, curve: Curve, covariate: bool, search: (f64, f64), n: usize) -> Self {
        Self {
            kind,
            orientation: Orientation::HigherIsDiseased,
            covariate,
            point: curve.clone(),
            draws: vec![curve; n.max(1)],
            n_chains: 1,
            chains: None,
            search,
            rhat: None,
        }
    }

    pub fn is_bayesian(&self) -> bool {
        !self.draws.is_empty()
    }

    /// True when the AUC trace R-hat exceeds [`RHAT_WARN`].
    pub fn convergence_warning(&self) -> bool {
        self.rhat.is_some_and(|r| r > RHAT_WARN)
    }

    fn check_query(&self, at_x: Option<f64>) -> Result<f64> {
        match (self.covariate, at_x) {
            (true, Some(x)) if x.is_finite() => Ok(x),
            (true, Some(x)) => Err(invalid(format!("covariate value must be finite, got {x}"))),
            (true, None) => Err(Error::UnsupportedQuery("covariate model needs an evaluation point".into())),
            (false, Some(_)) => Err(Error::UnsupportedQuery("model was fitted without covariates".into())),
            (false, None) => Ok(0.0),
        }
    }

    /// Point-summary pair, at `at_x` for covariate fits.
    pub fn pair(&self, at_x: Option<f64>) -> Result<RocPair> {
        let x = self.check_query(at_x)?;
        self.point.pair_at(x, self.orientation)
    }

    /// One pair per retained draw.
    pub fn draw_pairs(&self, at_x: Option<f64>) -> Result<Vec<RocPair>> {
        let x = self.check_query(at_x)?;
        self.draws.par_iter().map(|c| c.pair_at(x, self.orientation)).collect()
    }

    /// AUC of every retained draw.
    pub fn draw_aucs(&self, at_x: Option<f64>) -> Result<Vec<f64>> {
        let x = self.check_query(at_x)?;
        self.draws.par_iter().map(|c| c.pair_at(x, self.orientation).map(|p| auc(&p))).collect()
    }

    /// Posterior summary of the AUC. Non-Bayesian fits report the point AUC
    /// with zero spread.
    pub fn auc_summary(&self, at_x: Option<f64>) -> Result<Summary> {
        if !self.is_bayesian() {
            let a = auc(&self.pair(at_x)?);
            return Ok(Summary { mean: a, sd: 0.0, q025: a, q975: a });
        }
        summarize(&self.draw_aucs(at_x)?)
    }
}

/// Covariate-specific point pair.
pub fn roc_at_x(model: &FittedModel, x: f64) -> Result<RocPair> {
    if !model.covariate {
        return Err(Error::UnsupportedQuery("model was fitted without covariates".into()));
    }
    model.pair(Some(x))
}

/// Covariate-specific AUC summary.
pub fn auc_at_x(model: &FittedModel, x: f64) -> Result<Summary> {
    if !model.covariate {
        return Err(Error::UnsupportedQuery("model was fitted without covariates".into()));
    }
    model.auc_summary(Some(x))
}

/// Retained draws of `chains` as rows, with each group's columns appended.
pub(crate) fn join_chains(parts: &[&Chains], names: Vec<String>) -> Chains {
    let n_chains = parts[0].n_chains();
    let draws = (0..n_chains)
        .map(|c| {
            (0..parts[0].draws[c].len())
                .map(|d| parts.iter().flat_map(|p| p.draws[c][d].iter().copied()).collect())
                .collect()
        })
        .collect();
    Chains { names, draws }
}
