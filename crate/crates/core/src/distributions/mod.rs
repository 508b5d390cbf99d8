//! Continuous distributions backing the healthy, diseased and placement-value
//! CDFs, plus the empirical and Gaussian-kernel CDF estimators.

mod invert;
mod kernel;
mod rng;
pub mod special;

pub use invert::invert_cdf;
pub use kernel::{silverman_bandwidth, KernelCdf};
pub use rng::{draw_beta, draw_gamma, draw_normal, draw_uniform, rng_stream, stream_id, StreamRng};
pub use special::{
    bvn_cdf, chisq_cdf, f_cdf, gamma_cdf, noncentral_chisq_cdf, normal_cdf, normal_quantile, std_normal_cdf,
    std_normal_pdf, std_normal_quantile, std_normal_sf,
};

use crate::error::{invalid, Result};

pub(crate) use invert::{bisect_increasing, quantile_by_bisection, upper_quantile_by_bisection};

/// A univariate continuous (or step) distribution.
///
/// `sf` and `isf` have defaults in terms of `cdf` and `quantile`;
/// implementations override them where the upper tail can be computed
/// without cancellation.
pub trait ContinuousDist {
    fn cdf(&self, x: f64) -> f64;

    fn sf(&self, x: f64) -> f64 {
        1.0 - self.cdf(x)
    }

    fn pdf(&self, x: f64) -> f64;

    /// Generalized inverse `inf { x : cdf(x) >= p }` for `p` in (0, 1).
    fn quantile(&self, p: f64) -> f64;

    /// Inverse survival function, `quantile(1 - p)`.
    fn isf(&self, p: f64) -> f64 {
        self.quantile(1.0 - p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalDist {
    pub mu: f64,
    pub sigma: f64,
}

impl NormalDist {
    pub fn new(mu: f64, sigma: f64) -> Result<Self> {
        if !mu.is_finite() || !(sigma.is_finite() && sigma > 0.0) {
            return Err(invalid(format!("normal parameters must be finite with sigma > 0 (mu={mu}, sigma={sigma})")));
        }
        Ok(Self { mu, sigma })
    }

    pub fn standard() -> Self {
        Self { mu: 0.0, sigma: 1.0 }
    }
}

impl ContinuousDist for NormalDist {
    #[inline]
    fn cdf(&self, x: f64) -> f64 {
        std_normal_cdf((x - self.mu) / self.sigma)
    }

    #[inline]
    fn sf(&self, x: f64) -> f64 {
        std_normal_sf((x - self.mu) / self.sigma)
    }

    fn pdf(&self, x: f64) -> f64 {
        std_normal_pdf((x - self.mu) / self.sigma) / self.sigma
    }

    fn quantile(&self, p: f64) -> f64 {
        self.mu + self.sigma * std_normal_quantile(p)
    }

    fn isf(&self, p: f64) -> f64 {
        self.mu - self.sigma * std_normal_quantile(p)
    }
}

/// Gamma distribution with shape `k` and scale `theta` (mean `k * theta`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaDist {
    pub shape: f64,
    pub scale: f64,
}

impl GammaDist {
    pub fn new(shape: f64, scale: f64) -> Result<Self> {
        if !(shape.is_finite() && shape > 0.0 && scale.is_finite() && scale > 0.0) {
            return Err(invalid(format!("gamma parameters must be positive (shape={shape}, scale={scale})")));
        }
        Ok(Self { shape, scale })
    }

    pub fn mean(&self) -> f64 {
        self.shape * self.scale
    }
}

impl ContinuousDist for GammaDist {
    fn cdf(&self, x: f64) -> f64 {
        special::gamma_cdf_unchecked(x, self.shape, self.scale)
    }

    fn sf(&self, x: f64) -> f64 {
        special::gamma_sf_unchecked(x, self.shape, self.scale)
    }

    fn pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        let k = self.shape;
        let ln = (k - 1.0) * x.ln() - x / self.scale - statrs::function::gamma::ln_gamma(k) - k * self.scale.ln();
        ln.exp()
    }

    fn quantile(&self, p: f64) -> f64 {
        quantile_by_bisection(self, p, 0.0, self.mean() * 4.0 + self.scale)
    }

    fn isf(&self, p: f64) -> f64 {
        upper_quantile_by_bisection(self, p, 0.0, self.mean() * 4.0 + self.scale)
    }
}

/// Finite mixture of normals.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalMixture {
    weights: Vec<f64>,
    means: Vec<f64>,
    sds: Vec<f64>,
}

impl NormalMixture {
    /// Weights must be nonnegative and sum to one within 1e-9; they are
    /// renormalized to remove rounding drift.
    pub fn new(weights: Vec<f64>, means: Vec<f64>, sds: Vec<f64>) -> Result<Self> {
        if weights.is_empty() || weights.len() != means.len() || weights.len() != sds.len() {
            return Err(invalid("mixture weights, means and scales must have equal nonzero length"));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(invalid("mixture weights must be nonnegative"));
        }
        if means.iter().any(|m| !m.is_finite()) || sds.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
            return Err(invalid("mixture locations must be finite and scales positive"));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(invalid(format!("mixture weights sum to {total}, expected 1")));
        }
        let weights = weights.into_iter().map(|w| w / total).collect();
        Ok(Self { weights, means, sds })
    }

    pub fn with_shared_scale(weights: Vec<f64>, means: Vec<f64>, sigma: f64) -> Result<Self> {
        let sds = vec![sigma; means.len()];
        Self::new(weights, means, sds)
    }

    /// Drops components whose weight is below `min_weight` and renormalizes.
    pub fn pruned(&self, min_weight: f64) -> Self {
        let keep: Vec<usize> = (0..self.weights.len()).filter(|&i| self.weights[i] >= min_weight).collect();
        if keep.is_empty() {
            return self.clone();
        }
        let total: f64 = keep.iter().map(|&i| self.weights[i]).sum();
        Self {
            weights: keep.iter().map(|&i| self.weights[i] / total).collect(),
            means: keep.iter().map(|&i| self.means[i]).collect(),
            sds: keep.iter().map(|&i| self.sds[i]).collect(),
        }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn sds(&self) -> &[f64] {
        &self.sds
    }

    pub fn components(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        (0..self.weights.len()).map(move |i| (self.weights[i], self.means[i], self.sds[i]))
    }

    fn support_bracket(&self) -> (f64, f64) {
        let max_sd = self.sds.iter().cloned().fold(0.0, f64::max);
        let lo = self.means.iter().cloned().fold(f64::INFINITY, f64::min) - 10.0 * max_sd;
        let hi = self.means.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + 10.0 * max_sd;
        (lo, hi)
    }
}

impl ContinuousDist for NormalMixture {
    fn cdf(&self, x: f64) -> f64 {
        self.components().map(|(w, m, s)| w * std_normal_cdf((x - m) / s)).sum::<f64>().clamp(0.0, 1.0)
    }

    fn sf(&self, x: f64) -> f64 {
        self.components().map(|(w, m, s)| w * std_normal_sf((x - m) / s)).sum::<f64>().clamp(0.0, 1.0)
    }

    fn pdf(&self, x: f64) -> f64 {
        self.components().map(|(w, m, s)| w * std_normal_pdf((x - m) / s) / s).sum()
    }

    fn quantile(&self, p: f64) -> f64 {
        let (lo, hi) = self.support_bracket();
        quantile_by_bisection(self, p, lo, hi)
    }

    fn isf(&self, p: f64) -> f64 {
        let (lo, hi) = self.support_bracket();
        upper_quantile_by_bisection(self, p, lo, hi)
    }
}

/// Right-continuous empirical CDF.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf {
    sorted: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn new(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(invalid("empirical CDF needs at least one value"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("empirical CDF values must be finite"));
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        Ok(Self { sorted })
    }

    pub fn values(&self) -> &[f64] {
        &self.sorted
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    /// Number of values `<= x`.
    pub fn count_le(&self, x: f64) -> usize {
        self.sorted.partition_point(|v| *v <= x)
    }
}

impl ContinuousDist for EmpiricalCdf {
    fn cdf(&self, x: f64) -> f64 {
        self.count_le(x) as f64 / self.sorted.len() as f64
    }

    fn sf(&self, x: f64) -> f64 {
        (self.sorted.len() - self.count_le(x)) as f64 / self.sorted.len() as f64
    }

    fn pdf(&self, _x: f64) -> f64 {
        0.0
    }

    fn quantile(&self, p: f64) -> f64 {
        let n = self.sorted.len();
        let idx = ((p * n as f64).ceil() as usize).clamp(1, n) - 1;
        self.sorted[idx]
    }
}

/// Strictly increasing maps applied to a normal variate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MonotoneMap {
    /// `y = exp(x)`, the lognormal.
    Exp,
    /// `y = x |x|`, which squares the magnitude while preserving order.
    SignedSquare,
}

impl MonotoneMap {
    pub fn forward(self, x: f64) -> f64 {
        match self {
            MonotoneMap::Exp => x.exp(),
            MonotoneMap::SignedSquare => x * x.abs(),
        }
    }

    pub fn inverse(self, y: f64) -> f64 {
        match self {
            MonotoneMap::Exp => {
                if y <= 0.0 {
                    f64::NEG_INFINITY
                } else {
                    y.ln()
                }
            }
            MonotoneMap::SignedSquare => y.signum() * y.abs().sqrt(),
        }
    }

    fn inverse_derivative(self, y: f64) -> f64 {
        match self {
            MonotoneMap::Exp => {
                if y <= 0.0 {
                    0.0
                } else {
                    1.0 / y
                }
            }
            MonotoneMap::SignedSquare => {
                if y == 0.0 {
                    f64::INFINITY
                } else {
                    0.5 / y.abs().sqrt()
                }
            }
        }
    }
}

/// `Y = map(X)` with `X` normal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformedNormal {
    pub base: NormalDist,
    pub map: MonotoneMap,
}

impl ContinuousDist for TransformedNormal {
    fn cdf(&self, y: f64) -> f64 {
        self.base.cdf(self.map.inverse(y))
    }

    fn sf(&self, y: f64) -> f64 {
        self.base.sf(self.map.inverse(y))
    }

    fn pdf(&self, y: f64) -> f64 {
        let x = self.map.inverse(y);
        if !x.is_finite() {
            return 0.0;
        }
        self.base.pdf(x) * self.map.inverse_derivative(y)
    }

    fn quantile(&self, p: f64) -> f64 {
        self.map.forward(self.base.quantile(p))
    }

    fn isf(&self, p: f64) -> f64 {
        self.map.forward(self.base.isf(p))
    }
}

/// Closed set of distributions used by the models and the simulation oracle.
#[derive(Debug, Clone, PartialEq)]
pub enum Dist {
    Normal(NormalDist),
    Gamma(GammaDist),
    Mixture(NormalMixture),
    Empirical(EmpiricalCdf),
    Kernel(KernelCdf),
    Transformed(TransformedNormal),
    Negated(NegatedDist),
}

macro_rules! dispatch {
    ($self:ident, $d:ident => $e:expr) => {
        match $self {
            Dist::Normal($d) => $e,
            Dist::Gamma($d) => $e,
            Dist::Mixture($d) => $e,
            Dist::Empirical($d) => $e,
            Dist::Kernel($d) => $e,
            Dist::Transformed($d) => $e,
            Dist::Negated($d) => $e,
        }
    };
}

impl ContinuousDist for Dist {
    fn cdf(&self, x: f64) -> f64 {
        dispatch!(self, d => d.cdf(x))
    }

    fn sf(&self, x: f64) -> f64 {
        dispatch!(self, d => d.sf(x))
    }

    fn pdf(&self, x: f64) -> f64 {
        dispatch!(self, d => d.pdf(x))
    }

    fn quantile(&self, p: f64) -> f64 {
        dispatch!(self, d => d.quantile(p))
    }

    fn isf(&self, p: f64) -> f64 {
        dispatch!(self, d => d.isf(p))
    }
}

impl Dist {
    pub fn normal(mu: f64, sigma: f64) -> Result<Self> {
        NormalDist::new(mu, sigma).map(Dist::Normal)
    }

    pub fn gamma(shape: f64, scale: f64) -> Result<Self> {
        GammaDist::new(shape, scale).map(Dist::Gamma)
    }

    pub fn lognormal(mu: f64, sigma: f64) -> Result<Self> {
        Ok(Dist::Transformed(TransformedNormal { base: NormalDist::new(mu, sigma)?, map: MonotoneMap::Exp }))
    }

    pub fn signed_square_normal(mu: f64, sigma: f64) -> Result<Self> {
        Ok(Dist::Transformed(TransformedNormal {
            base: NormalDist::new(mu, sigma)?,
            map: MonotoneMap::SignedSquare,
        }))
    }

    /// Components `(weight, mean, sd)` when the distribution is a finite
    /// Gaussian mixture (a normal, a normal mixture or a Gaussian kernel CDF).
    pub fn gaussian_components(&self) -> Option<Vec<(f64, f64, f64)>> {
        match self {
            Dist::Normal(n) => Some(vec![(1.0, n.mu, n.sigma)]),
            Dist::Mixture(m) => Some(m.components().collect()),
            Dist::Kernel(k) => {
                let w = 1.0 / k.values().len() as f64;
                Some(k.values().iter().map(|&v| (w, v, k.bandwidth())).collect())
            }
            _ => None,
        }
    }

    /// Law of `-X`. Normal, mixture, empirical and kernel laws are negated
    /// in closed form so ties and bandwidths carry over exactly.
    pub fn negated(&self) -> Dist {
        match self {
            Dist::Normal(n) => Dist::Normal(NormalDist { mu: -n.mu, sigma: n.sigma }),
            Dist::Mixture(m) => Dist::Mixture(NormalMixture {
                weights: m.weights.clone(),
                means: m.means.iter().map(|v| -v).collect(),
                sds: m.sds.clone(),
            }),
            Dist::Empirical(e) => {
                let mut v: Vec<f64> = e.sorted.iter().map(|v| -v).collect();
                v.reverse();
                Dist::Empirical(EmpiricalCdf { sorted: v })
            }
            Dist::Kernel(k) => {
                let v: Vec<f64> = k.values().iter().map(|v| -v).collect();
                Dist::Kernel(KernelCdf::new(&v, k.bandwidth()).expect("negation keeps a valid kernel"))
            }
            Dist::Negated(n) => (*n.inner).clone(),
            other => Dist::Negated(NegatedDist { inner: Box::new(other.clone()) }),
        }
    }

    pub fn is_empirical(&self) -> bool {
        matches!(self, Dist::Empirical(_))
    }
}

/// Law of `-X` for a continuous `X`.
#[derive(Debug, Clone, PartialEq)]
pub struct NegatedDist {
    inner: Box<Dist>,
}

impl NegatedDist {
    pub fn inner(&self) -> &Dist {
        &self.inner
    }
}

impl ContinuousDist for NegatedDist {
    fn cdf(&self, x: f64) -> f64 {
        self.inner.sf(-x)
    }

    fn sf(&self, x: f64) -> f64 {
        self.inner.cdf(-x)
    }

    fn pdf(&self, x: f64) -> f64 {
        self.inner.pdf(-x)
    }

    fn quantile(&self, p: f64) -> f64 {
        -self.inner.isf(p)
    }

    fn isf(&self, p: f64) -> f64 {
        -self.inner.quantile(p)
    }
}
