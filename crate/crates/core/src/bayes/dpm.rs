use rand::Rng;

use super::conjugate::{draw_coefficients, validate_regression_data, SuffStats, PRIOR_IG_SCALE, PRIOR_IG_SHAPE};
use super::{canonical_rows, run_chains, Chains, McmcConfig};
use crate::distributions::{draw_beta, draw_gamma};
use crate::error::{invalid, Result};

/// State of a truncated stick-breaking mixture of normal regressions with a
/// shared error variance. `p = 1` gives a location mixture.
#[derive(Debug, Clone, PartialEq)]
pub struct DpmState {
    pub k: usize,
    pub p: usize,
    pub alpha: f64,
    pub pi: Vec<f64>,
    pub beta: Vec<Vec<f64>>,
    pub sigma2: f64,
    pub z: Vec<usize>,
}

impl DpmState {
    /// Assigns sorted data to `min(K, 5)` consecutive quantile bins and starts
    /// every component at its bin's least-squares fit.
    pub fn init(y: &[f64], x: Option<&[f64]>, k: usize, alpha: f64) -> Self {
        let n = y.len();
        let p = if x.is_some() { 2 } else { 1 };
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| y[a].total_cmp(&y[b]));
        let bins = k.min(5);
        let mut z = vec![0; n];
        for (rank, &i) in order.iter().enumerate() {
            z[i] = rank * bins / n;
        }
        let overall = SuffStats::from_data(y, x);
        let overall_beta = overall.least_squares();
        let mut stats = vec![SuffStats::empty(p); k];
        for i in 0..n {
            stats[z[i]].push(y[i], x.map_or(0.0, |x| x[i]));
        }
        let beta = stats
            .iter()
            .map(|s| if s.n >= p as f64 + 1.0 { s.least_squares() } else { overall_beta.clone() })
            .collect();
        let pi = stats.iter().map(|s| (s.n + alpha / k as f64) / (n as f64 + alpha)).collect();
        let dof = overall.n - p as f64;
        let s2 = if dof > 0.0 { overall.ssr(&overall_beta) / dof } else { 1.0 };
        let sigma2 = if s2 > 0.0 && s2.is_finite() { s2 } else { 1.0 };
        Self { k, p, alpha, pi, beta, sigma2, z }
    }

    #[inline]
    fn fitted(&self, comp: usize, x: f64) -> f64 {
        let b = &self.beta[comp];
        if self.p == 2 {
            b[0] + b[1] * x
        } else {
            b[0]
        }
    }

    /// One blocked-Gibbs scan: assignments, stick weights, component
    /// coefficients, shared variance.
    pub fn sweep<R: Rng + ?Sized>(&mut self, rng: &mut R, y: &[f64], x: Option<&[f64]>) {
        let k = self.k;
        let n = y.len();
        let inv2s = 0.5 / self.sigma2;
        let log_pi: Vec<f64> = self.pi.iter().map(|&w| w.ln()).collect();
        let mut w = vec![0.0; k];
        for i in 0..n {
            let xi = x.map_or(0.0, |x| x[i]);
            let mut mx = f64::NEG_INFINITY;
            for c in 0..k {
                let r = y[i] - self.fitted(c, xi);
                w[c] = log_pi[c] - r * r * inv2s;
                mx = mx.max(w[c]);
            }
            let mut total = 0.0;
            for v in w.iter_mut() {
                *v = (*v - mx).exp();
                total += *v;
            }
            let u = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = k - 1;
            for (c, v) in w.iter().enumerate() {
                acc += v;
                if u < acc {
                    pick = c;
                    break;
                }
            }
            self.z[i] = pick;
        }

        let mut stats = vec![SuffStats::empty(self.p); k];
        for i in 0..n {
            stats[self.z[i]].push(y[i], x.map_or(0.0, |x| x[i]));
        }
        let counts: Vec<f64> = stats.iter().map(|s| s.n).collect();
        let mut tail: f64 = counts.iter().sum();
        let mut remaining = 1.0;
        for c in 0..k {
            tail -= counts[c];
            let v = if c + 1 == k { 1.0 } else { draw_beta(rng, 1.0 + counts[c], self.alpha + tail) };
            self.pi[c] = remaining * v;
            remaining *= 1.0 - v;
        }

        let mut ssr = 0.0;
        for c in 0..k {
            // empty components have zero statistics and draw from the prior
            self.beta[c] = draw_coefficients(rng, &stats[c], self.sigma2);
            ssr += stats[c].ssr(&self.beta[c]);
        }
        let shape = PRIOR_IG_SHAPE + 0.5 * n as f64;
        let rate = PRIOR_IG_SCALE + 0.5 * ssr;
        self.sigma2 = 1.0 / draw_gamma(rng, shape, 1.0 / rate);
    }

    /// `pi_1..pi_K`, then the coefficients of each component, then `sigma2`.
    pub fn record(&self) -> Vec<f64> {
        let mut v = self.pi.clone();
        for j in 0..self.p {
            v.extend(self.beta.iter().map(|b| b[j]));
        }
        v.push(self.sigma2);
        v
    }

    pub fn names(k: usize, p: usize) -> Vec<String> {
        let mut names: Vec<String> = (1..=k).map(|c| format!("pi_{c}")).collect();
        let coef = if p == 1 { vec!["mu"] } else { vec!["b0", "b1"] };
        for c in coef {
            names.extend((1..=k).map(|i| format!("{c}_{i}")));
        }
        names.push("sigma2".into());
        names
    }

    /// Splits a recorded draw into weights, per-component coefficients and
    /// the shared variance.
    pub fn unpack(draw: &[f64], k: usize, p: usize) -> (&[f64], Vec<Vec<f64>>, f64) {
        let pi = &draw[..k];
        let beta = (0..k).map(|c| (0..p).map(|j| draw[k + j * k + c]).collect()).collect();
        (pi, beta, draw[k + p * k])
    }
}

fn check_dpm_args(n: usize, k: usize, alpha: f64) -> Result<()> {
    if k < 2 {
        return Err(invalid("a mixture needs K >= 2; use the conjugate normal sampler for K = 1"));
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(invalid("concentration must be positive"));
    }
    if n < 10 {
        return Err(invalid(format!("mixture fits need at least 10 observations, got {n}")));
    }
    Ok(())
}

/// Truncated Dirichlet-process mixture of normals with a shared variance.
pub fn gibbs_dpm_location(y: &[f64], k: usize, alpha: f64, cfg: &McmcConfig) -> Result<Chains> {
    check_dpm_args(y.len(), k, alpha)?;
    validate_regression_data(y, None)?;
    let (y, _) = canonical_rows(y, None);
    run_chains(
        cfg,
        DpmState::names(k, 1),
        |_, _| DpmState::init(&y, None, k, alpha),
        |st, rng| st.sweep(rng, &y, None),
        DpmState::record,
    )
}

/// Truncated Dirichlet-process mixture of normal regressions on one
/// covariate with a shared variance.
pub fn gibbs_dpm_regression(y: &[f64], x: &[f64], k: usize, alpha: f64, cfg: &McmcConfig) -> Result<Chains> {
    check_dpm_args(y.len(), k, alpha)?;
    validate_regression_data(y, Some(x))?;
    let (y, x) = canonical_rows(y, Some(x));
    let x = x.expect("covariate present");
    run_chains(
        cfg,
        DpmState::names(k, 2),
        |_, _| DpmState::init(&y, Some(&x), k, alpha),
        |st, rng| st.sweep(rng, &y, Some(&x)),
        DpmState::record,
    )
}
