use super::special::{std_normal_cdf, std_normal_pdf, std_normal_sf};
use super::{quantile_by_bisection, upper_quantile_by_bisection, ContinuousDist};
use crate::error::{Error, Result};
use crate::stats;

/// Rule-of-thumb bandwidth `0.9 * min(SD, IQR / 1.34) * n^(-1/5)`.
///
/// SD uses the `n - 1` denominator and the IQR type-7 quantiles. When the
/// IQR collapses to zero while the SD does not (heavy ties), the SD alone is
/// used.
pub fn silverman_bandwidth(values: &[f64]) -> Result<f64> {
    if values.len() < 2 {
        return Err(Error::DegenerateSample("bandwidth needs at least two values".into()));
    }
    let sd = stats::sample_sd(values);
    if !(sd > 0.0) {
        return Err(Error::DegenerateSample("all values are identical; bandwidth would be zero".into()));
    }
    let iqr = stats::quantile_type7(values, 0.75) - stats::quantile_type7(values, 0.25);
    let spread = if iqr > 0.0 { sd.min(iqr / 1.34) } else { sd };
    Ok(0.9 * spread * (values.len() as f64).powf(-0.2))
}

/// Gaussian-kernel smoothed CDF.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelCdf {
    values: Vec<f64>,
    bandwidth: f64,
}

impl KernelCdf {
    pub fn new(values: &[f64], bandwidth: f64) -> Result<Self> {
        if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
            return Err(crate::error::invalid("kernel CDF needs finite values"));
        }
        if !(bandwidth.is_finite() && bandwidth > 0.0) {
            return Err(crate::error::invalid(format!("bandwidth must be positive, got {bandwidth}")));
        }
        Ok(Self { values: values.to_vec(), bandwidth })
    }

    pub fn silverman(values: &[f64]) -> Result<Self> {
        let h = silverman_bandwidth(values)?;
        Self::new(values, h)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    fn bracket(&self) -> (f64, f64) {
        let lo = self.values.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let range = (hi - lo).max(self.bandwidth);
        (lo - 10.0 * range, hi + 10.0 * range)
    }
}

impl ContinuousDist for KernelCdf {
    fn cdf(&self, x: f64) -> f64 {
        let h = self.bandwidth;
        let s: f64 = self.values.iter().map(|v| std_normal_cdf((x - v) / h)).sum();
        s / self.values.len() as f64
    }

    fn sf(&self, x: f64) -> f64 {
        let h = self.bandwidth;
        let s: f64 = self.values.iter().map(|v| std_normal_sf((x - v) / h)).sum();
        s / self.values.len() as f64
    }

    fn pdf(&self, x: f64) -> f64 {
        let h = self.bandwidth;
        let s: f64 = self.values.iter().map(|v| std_normal_pdf((x - v) / h)).sum();
        s / (self.values.len() as f64 * h)
    }

    fn quantile(&self, p: f64) -> f64 {
        let (lo, hi) = self.bracket();
        quantile_by_bisection(self, p, lo, hi)
    }

    fn isf(&self, p: f64) -> f64 {
        let (lo, hi) = self.bracket();
        upper_quantile_by_bisection(self, p, lo, hi)
    }
}
