use serde::{Deserialize, Serialize};

use super::Chains;
use crate::error::{invalid, Error, Result};
use crate::stats::{mean, quantile_type7_sorted, sample_sd};

/// Potential scale reduction factor of one parameter across chains.
pub fn gelman_rubin(chains: &Chains, param: usize) -> Result<f64> {
    if param >= chains.names.len() {
        return Err(invalid(format!("parameter index {param} out of range")));
    }
    gelman_rubin_traces(&chains.traces(param))
}

/// `sqrt(((n-1)/n W + B/n) / W)` for equal-length traces.
pub fn gelman_rubin_traces(traces: &[Vec<f64>]) -> Result<f64> {
    let m = traces.len();
    if m < 2 {
        return Err(Error::UndefinedDiagnostic("R-hat needs at least two chains".into()));
    }
    let n = traces[0].len();
    if n < 2 || traces.iter().any(|t| t.len() != n) {
        return Err(Error::UndefinedDiagnostic("R-hat needs equal-length chains of at least two draws".into()));
    }
    let nf = n as f64;
    let means: Vec<f64> = traces.iter().map(|t| mean(t)).collect();
    let w = traces.iter().map(|t| sample_sd(t).powi(2)).sum::<f64>() / m as f64;
    let b = nf * sample_sd(&means).powi(2);
    if !(w > 0.0) {
        return Err(Error::UndefinedDiagnostic("within-chain variance is zero".into()));
    }
    Ok((((nf - 1.0) / nf * w + b / nf) / w).sqrt())
}

/// Posterior mean, SD and equal-tailed 95% interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub sd: f64,
    pub q025: f64,
    pub q975: f64,
}

pub fn summarize(values: &[f64]) -> Result<Summary> {
    if values.len() < 2 {
        return Err(invalid("summaries need at least two draws"));
    }
    let mut s = values.to_vec();
    s.sort_by(f64::total_cmp);
    Ok(Summary {
        mean: mean(values),
        sd: sample_sd(values),
        q025: quantile_type7_sorted(&s, 0.025),
        q975: quantile_type7_sorted(&s, 0.975),
    })
}

/// Summary of `f` applied to every retained draw.
pub fn summarize_functional<F: Fn(&[f64]) -> f64>(chains: &Chains, f: F) -> Result<Summary> {
    let v: Vec<f64> = chains.iter().map(f).collect();
    summarize(&v)
}
