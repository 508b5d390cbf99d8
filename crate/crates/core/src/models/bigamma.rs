use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use super::{FittedModel, ModelKind, Sample};
use crate::distributions::Dist;
use crate::error::{Error, Result};
use crate::roc::RocPair;

/// Shared-shape gamma pair: healthy `Gamma(k, phi0)`, diseased
/// `Gamma(k, phi1)` (scale parameterization, mean `k * phi`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BigammaFit {
    pub k: f64,
    pub phi0: f64,
    pub phi1: f64,
}

/// Evaluation-only bigamma pair from given parameters.
pub fn bigamma_pair(k: f64, phi0: f64, phi1: f64) -> Result<RocPair> {
    Ok(RocPair::general(Dist::gamma(k, phi0)?, Dist::gamma(k, phi1)?))
}

/// Maximum-likelihood shared shape and group scales. Given `k` the scales
/// are `mean / k`, so the shape is found by a one-dimensional search of the
/// profile log-likelihood over `log k`.
pub fn fit_bigamma_params(s: &Sample) -> Result<BigammaFit> {
    s.validate(3)?;
    s.reject_covariates(ModelKind::Bigamma)?;
    if s.y0.iter().chain(&s.y1).any(|&v| v <= 0.0) {
        return Err(Error::DomainViolation("bigamma model needs strictly positive data".into()));
    }
    s.reject_constant_groups()?;
    let groups: Vec<(f64, f64, f64)> = [&s.y0, &s.y1]
        .iter()
        .map(|y| {
            let n = y.len() as f64;
            (n, y.iter().sum::<f64>() / n, y.iter().map(|v| v.ln()).sum::<f64>())
        })
        .collect();
    let profile = |log_k: f64| {
        let k = log_k.exp();
        groups
            .iter()
            .map(|&(n, mean, sum_log)| -n * ln_gamma(k) - n * k * (mean / k).ln() + (k - 1.0) * sum_log - n * k)
            .sum::<f64>()
    };
    let log_k = golden_argmax(profile, (1e-4f64).ln(), (1e4f64).ln(), 1e-12);
    let k = log_k.exp();
    Ok(BigammaFit { k, phi0: groups[0].1 / k, phi1: groups[1].1 / k })
}

pub fn fit_bigamma(s: &Sample) -> Result<FittedModel> {
    let f = fit_bigamma_params(s)?;
    let pair = RocPair::general_oriented(Dist::gamma(f.k, f.phi0)?, Dist::gamma(f.k, f.phi1)?, s.orientation);
    Ok(FittedModel::frequentist(ModelKind::Bigamma, s, pair))
}

fn golden_argmax(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while b - a > tol {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        }
    }
    0.5 * (a + b)
}
