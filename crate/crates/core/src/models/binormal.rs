use super::{join_chains, Curve, FittedModel, ModelKind, Sample};
use crate::bayes::{gibbs_normal_regression, McmcConfig};
use crate::error::Result;
use crate::roc::RocPair;

/// One binormal parameter set on the normalized axis: healthy
/// `N(b00 + b10 x, s0)`, diseased `N(b01 + b11 x, s1)`. Covariate-free fits
/// have zero slopes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinormalParams {
    pub b00: f64,
    pub b10: f64,
    pub s0: f64,
    pub b01: f64,
    pub b11: f64,
    pub s1: f64,
}

impl BinormalParams {
    pub fn new(mu0: f64, s0: f64, mu1: f64, s1: f64) -> Self {
        Self { b00: mu0, b10: 0.0, s0, b01: mu1, b11: 0.0, s1 }
    }

    /// `a_x = ((b01 - b00) + (b11 - b10) x) / s1`.
    pub fn a_at(&self, x: f64) -> f64 {
        ((self.b01 - self.b00) + (self.b11 - self.b10) * x) / self.s1
    }

    /// `b = s0 / s1`.
    pub fn b(&self) -> f64 {
        self.s0 / self.s1
    }

    pub fn pair_at(&self, x: f64) -> Result<RocPair> {
        RocPair::binormal(self.b00 + self.b10 * x, self.s0, self.b01 + self.b11 * x, self.s1)
    }
}

/// Per-group conjugate normal (or simple linear regression) Gibbs fits.
pub fn fit_binormal(s: &Sample, mcmc: &McmcConfig) -> Result<FittedModel> {
    s.validate(3)?;
    s.reject_constant_groups()?;
    let (y0, y1) = s.normalized();
    let cov = s.has_covariates();
    let c0 = gibbs_normal_regression(&y0, s.x0.as_deref(), &mcmc.derive(0))?;
    let c1 = gibbs_normal_regression(&y1, s.x1.as_deref(), &mcmc.derive(1))?;
    let names: Vec<String> = if cov {
        ["beta00", "beta10", "sigma0", "beta01", "beta11", "sigma1"].map(String::from).to_vec()
    } else {
        ["mu0", "sigma0", "mu1", "sigma1"].map(String::from).to_vec()
    };
    let mut chains = join_chains(&[&c0, &c1], names);
    // report standard deviations rather than variances
    let sd_cols: &[usize] = if cov { &[2, 5] } else { &[1, 3] };
    for d in chains.draws.iter_mut().flatten() {
        for &j in sd_cols {
            d[j] = d[j].sqrt();
        }
    }
    let to_params = |d: &[f64]| {
        if cov {
            BinormalParams { b00: d[0], b10: d[1], s0: d[2], b01: d[3], b11: d[4], s1: d[5] }
        } else {
            BinormalParams::new(d[0], d[1], d[2], d[3])
        }
    };
    let draws: Vec<Curve> = chains.iter().map(|d| Curve::Binormal(to_params(d))).collect();
    let means: Vec<f64> = (0..chains.names.len()).map(|j| chains.mean(j)).collect();
    let point = Curve::Binormal(to_params(&means));
    FittedModel::bayesian(ModelKind::Binormal, s, point, draws, chains)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bayes::gelman_rubin;
    use crate::distributions::{draw_normal, draw_uniform, rng_stream};
    use crate::error::Error;
    use crate::models::auc_at_x;
    use crate::roc::auc;

    fn normals(seed: u64, n: usize, mu: f64, s: f64) -> Vec<f64> {
        let mut rng = rng_stream(seed, 0);
        (0..n).map(|_| draw_normal(&mut rng, mu, s)).collect()
    }

    #[test]
    fn recovers_medium_auc() {
        let s = Sample::new(normals(1, 1000, 0.0, 1.0), normals(2, 1000, 1.0, 1.0));
        let m = fit_binormal(&s, &McmcConfig::default()).unwrap();
        let a = m.auc_summary(None).unwrap();
        assert!((a.mean - 0.760).abs() < 0.02, "{}", a.mean);
        assert!(a.q025 < a.mean && a.mean < a.q975);
        assert_eq!(m.draws.len(), 5000);
    }

    #[test]
    fn exchangeable_groups_give_half() {
        let s = Sample::new(normals(3, 300, 0.0, 1.0), normals(4, 300, 0.0, 1.0));
        let m = fit_binormal(&s, &McmcConfig::default()).unwrap();
        assert!((m.auc_summary(None).unwrap().mean - 0.5).abs() < 0.03);
    }

    #[test]
    fn covariate_fit_matches_truth() {
        let mut rng = rng_stream(5, 0);
        let n = 500;
        let x0: Vec<f64> = (0..n).map(|_| draw_uniform(&mut rng, -0.5, 1.5)).collect();
        let x1: Vec<f64> = (0..n).map(|_| draw_uniform(&mut rng, -0.5, 1.5)).collect();
        let y0: Vec<f64> = x0.iter().map(|&x| 1.0 + x + draw_normal(&mut rng, 0.0, 1.0)).collect();
        let y1: Vec<f64> = x1.iter().map(|&x| 1.5 + 2.0 * x + draw_normal(&mut rng, 0.0, 1.0)).collect();
        let s = Sample::new(y0, y1).with_covariates(x0, x1);
        let m = fit_binormal(&s, &McmcConfig::default()).unwrap();
        for (x, truth) in [(0.0, 0.638), (1.0, 0.856)] {
            let est = auc_at_x(&m, x).unwrap().mean;
            assert!((est - truth).abs() < 0.02, "x={x}: {est} vs {truth}");
        }
        assert!(m.pair(None).is_err());
    }

    #[test]
    fn rhat_small_on_well_specified_fit() {
        let s = Sample::new(normals(6, 500, 0.0, 1.0), normals(7, 500, 1.0, 1.5));
        let m = fit_binormal(&s, &McmcConfig::default()).unwrap();
        let ch = m.chains.as_ref().unwrap();
        for j in 0..ch.names.len() {
            assert!(gelman_rubin(ch, j).unwrap() <= 1.05);
        }
        assert!(m.rhat.unwrap() <= 1.05);
        assert!(!m.convergence_warning());
    }

    #[test]
    fn degenerate_group_rejected() {
        let s = Sample::new(vec![1.0; 5], vec![1.0, 2.0, 3.0]);
        assert!(matches!(fit_binormal(&s, &McmcConfig::default()), Err(Error::DegenerateSample(_))));
    }

    #[test]
    fn a_b_forms() {
        let p = BinormalParams { b00: 1.0, b10: 1.5, s0: 1.0, b01: 1.0, b11: 2.0, s1: 2.0 };
        assert!((p.a_at(1.0) - 0.25).abs() < 1e-15);
        assert_eq!(p.b(), 0.5);
        let flat = BinormalParams { b10: 0.7, b11: 0.7, ..p };
        assert!((auc(&flat.pair_at(-3.0).unwrap()) - auc(&flat.pair_at(5.0).unwrap())).abs() < 1e-9);
    }
}
