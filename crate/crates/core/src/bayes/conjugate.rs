use rand::Rng;

use super::{canonical_rows, run_chains, Chains, McmcConfig};
use crate::distributions::{draw_gamma, draw_normal};
use crate::error::{invalid, Error, Result};

/// Prior variance of every regression coefficient.
pub const PRIOR_VAR: f64 = 100.0;
/// Inverse-gamma prior on the error variance.
pub const PRIOR_IG_SHAPE: f64 = 0.01;
pub const PRIOR_IG_SCALE: f64 = 0.01;

/// Sufficient statistics of a normal linear model with design `[1]` or
/// `[1, x]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SuffStats {
    pub n: f64,
    pub p: usize,
    pub xtx: [[f64; 2]; 2],
    pub xty: [f64; 2],
    pub yty: f64,
}

impl SuffStats {
    pub fn empty(p: usize) -> Self {
        Self { p, ..Default::default() }
    }

    pub fn from_data(y: &[f64], x: Option<&[f64]>) -> Self {
        let mut s = Self::empty(if x.is_some() { 2 } else { 1 });
        for (i, &yi) in y.iter().enumerate() {
            s.push(yi, x.map_or(0.0, |x| x[i]));
        }
        s
    }

    #[inline]
    pub fn push(&mut self, y: f64, x: f64) {
        self.n += 1.0;
        self.xtx[0][0] += 1.0;
        self.xty[0] += y;
        self.yty += y * y;
        if self.p == 2 {
            self.xtx[0][1] += x;
            self.xtx[1][0] += x;
            self.xtx[1][1] += x * x;
            self.xty[1] += x * y;
        }
    }

    /// Residual sum of squares at coefficients `beta`.
    pub fn ssr(&self, beta: &[f64]) -> f64 {
        let mut q = self.yty;
        for i in 0..self.p {
            q -= 2.0 * beta[i] * self.xty[i];
            for j in 0..self.p {
                q += beta[i] * self.xtx[i][j] * beta[j];
            }
        }
        q.max(0.0)
    }

    /// Least-squares coefficients, falling back to the mean when the design is
    /// singular.
    pub fn least_squares(&self) -> Vec<f64> {
        let mean = if self.n > 0.0 { self.xty[0] / self.n } else { 0.0 };
        if self.p == 1 {
            return vec![mean];
        }
        let det = self.xtx[0][0] * self.xtx[1][1] - self.xtx[0][1] * self.xtx[1][0];
        if det.abs() <= 1e-12 * self.xtx[0][0].max(1.0) * self.xtx[1][1].max(1.0) {
            return vec![mean, 0.0];
        }
        let b0 = (self.xtx[1][1] * self.xty[0] - self.xtx[0][1] * self.xty[1]) / det;
        let b1 = (self.xtx[0][0] * self.xty[1] - self.xtx[1][0] * self.xty[0]) / det;
        vec![b0, b1]
    }
}

/// Draw from the conditional normal of the coefficients given `sigma2`, under
/// independent `N(0, PRIOR_VAR)` priors.
pub fn draw_coefficients<R: Rng + ?Sized>(rng: &mut R, s: &SuffStats, sigma2: f64) -> Vec<f64> {
    let p = s.p;
    let mut prec = [[0.0; 2]; 2];
    let mut rhs = [0.0; 2];
    for i in 0..p {
        for j in 0..p {
            prec[i][j] = s.xtx[i][j] / sigma2;
        }
        prec[i][i] += 1.0 / PRIOR_VAR;
        rhs[i] = s.xty[i] / sigma2;
    }
    if p == 1 {
        let v = 1.0 / prec[0][0];
        return vec![draw_normal(rng, v * rhs[0], v.sqrt())];
    }
    // prec = L L^T; mean solves prec m = rhs; draw m + L^{-T} z
    let l00 = prec[0][0].sqrt();
    let l10 = prec[1][0] / l00;
    let l11 = (prec[1][1] - l10 * l10).max(1e-300).sqrt();
    let w0 = rhs[0] / l00;
    let w1 = (rhs[1] - l10 * w0) / l11;
    let z0 = draw_normal(rng, 0.0, 1.0);
    let z1 = draw_normal(rng, 0.0, 1.0);
    let u1 = (w1 + z1) / l11;
    let u0 = (w0 + z0 - l10 * u1) / l00;
    vec![u0, u1]
}

/// Draw of the error variance from `IG(a0 + n/2, b0 + SSR/2)`.
pub fn draw_variance<R: Rng + ?Sized>(rng: &mut R, s: &SuffStats, beta: &[f64]) -> f64 {
    let shape = PRIOR_IG_SHAPE + 0.5 * s.n;
    let rate = PRIOR_IG_SCALE + 0.5 * s.ssr(beta);
    1.0 / draw_gamma(rng, shape, 1.0 / rate)
}

/// State of a conjugate normal regression chain.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionState {
    pub beta: Vec<f64>,
    pub sigma2: f64,
}

impl RegressionState {
    /// Least-squares start with the residual variance (or 1 when it cannot
    /// be formed).
    pub fn init(s: &SuffStats) -> Self {
        let beta = s.least_squares();
        let dof = s.n - s.p as f64;
        let sigma2 = if dof > 0.0 { s.ssr(&beta) / dof } else { 0.0 };
        Self { beta, sigma2: if sigma2 > 0.0 && sigma2.is_finite() { sigma2 } else { 1.0 } }
    }

    /// One systematic scan: coefficients, then variance.
    pub fn sweep<R: Rng + ?Sized>(&mut self, rng: &mut R, s: &SuffStats) {
        self.beta = draw_coefficients(rng, s, self.sigma2);
        self.sigma2 = draw_variance(rng, s, &self.beta);
    }

    pub fn record(&self) -> Vec<f64> {
        let mut v = self.beta.clone();
        v.push(self.sigma2);
        v
    }
}

/// Gibbs sampler for `y = b0 (+ b1 x) + e`, `e ~ N(0, sigma2)`. Parameters are
/// `intercept`, `slope` (with a covariate) and `sigma2`.
pub fn gibbs_normal_regression(y: &[f64], x: Option<&[f64]>, cfg: &McmcConfig) -> Result<Chains> {
    validate_regression_data(y, x)?;
    let (y, x) = canonical_rows(y, x);
    let stats = SuffStats::from_data(&y, x.as_deref());
    let mut names = vec!["intercept".to_string()];
    if x.is_some() {
        names.push("slope".into());
    }
    names.push("sigma2".into());
    run_chains(
        cfg,
        names,
        |_, _| RegressionState::init(&stats),
        |st, rng| st.sweep(rng, &stats),
        RegressionState::record,
    )
}

pub(crate) fn validate_regression_data(y: &[f64], x: Option<&[f64]>) -> Result<()> {
    if y.is_empty() {
        return Err(invalid("regression needs at least one observation"));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(invalid("responses must be finite"));
    }
    if let Some(x) = x {
        if x.len() != y.len() {
            return Err(invalid(format!("covariate length {} differs from response length {}", x.len(), y.len())));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(invalid("covariates must be finite"));
        }
    } else if y.len() >= 2 && y.iter().all(|&v| v == y[0]) {
        return Err(Error::DegenerateSample("all responses are identical".into()));
    }
    Ok(())
}
