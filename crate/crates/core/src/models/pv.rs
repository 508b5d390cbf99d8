use super::{Curve, FittedModel, ModelKind, Sample};
use crate::bayes::{canonical_rows, run_chains, DpmState, McmcConfig, RegressionState, SuffStats};
use crate::distributions::special::{std_normal_quantile, std_normal_sf};
use crate::distributions::{Dist, NormalMixture};
use crate::error::{invalid, Result};
use crate::roc::RocPair;

/// Placement values are clamped into `[PV_CLAMP, 1 - PV_CLAMP]` before the
/// probit transform.
pub const PV_CLAMP: f64 = 1e-6;
pub const DEFAULT_TRUNCATION: usize = 30;
pub const DEFAULT_ALPHA: f64 = 1.0;

/// Draws pooled into the point-summary mixture of a semiparametric fit.
const POINT_POOL: usize = 250;

/// Parametric PV curve: healthy `N(b00 + b10 x, s0)` and probit placement
/// values `N(b0 + b1 x, s)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PvParams {
    pub b00: f64,
    pub b10: f64,
    pub s0: f64,
    pub b0: f64,
    pub b1: f64,
    pub s: f64,
}

impl PvParams {
    pub fn pair_at(&self, x: f64) -> Result<RocPair> {
        Ok(RocPair::pv(Dist::normal(self.b00 + self.b10 * x, self.s0)?, Dist::normal(self.b0 + self.b1 * x, self.s)?))
    }
}

/// Component `w * N(b0 + b1 x, sd)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixtureComponent {
    pub w: f64,
    pub b0: f64,
    pub b1: f64,
    pub sd: f64,
}

/// Semiparametric PV curve: normal mixtures for the healthy law and for the
/// probit placement values, component means linear in the covariate.
#[derive(Debug, Clone, PartialEq)]
pub struct PvMixtureParams {
    pub f0: Vec<MixtureComponent>,
    pub g: Vec<MixtureComponent>,
}

fn mixture_at(comps: &[MixtureComponent], x: f64) -> Result<Dist> {
    if let [c] = comps {
        return Dist::normal(c.b0 + c.b1 * x, c.sd);
    }
    Ok(Dist::Mixture(NormalMixture::new(
        comps.iter().map(|c| c.w).collect(),
        comps.iter().map(|c| c.b0 + c.b1 * x).collect(),
        comps.iter().map(|c| c.sd).collect(),
    )?))
}

impl PvMixtureParams {
    pub fn pair_at(&self, x: f64) -> Result<RocPair> {
        Ok(RocPair::pv(mixture_at(&self.f0, x)?, mixture_at(&self.g, x)?))
    }
}

/// Probit of the clamped placement value `1 - F0(y)`.
#[inline]
fn probit_pv(survival: f64) -> f64 {
    std_normal_quantile(survival.clamp(PV_CLAMP, 1.0 - PV_CLAMP))
}

struct Prepared {
    y0: Vec<f64>,
    x0: Option<Vec<f64>>,
    y1: Vec<f64>,
    x1: Option<Vec<f64>>,
}

fn prepare(s: &Sample, min: usize) -> Result<Prepared> {
    s.validate(min)?;
    s.reject_constant_groups()?;
    let (y0, y1) = s.normalized();
    let (y0, x0) = canonical_rows(&y0, s.x0.as_deref());
    let (y1, x1) = canonical_rows(&y1, s.x1.as_deref());
    Ok(Prepared { y0, x0, y1, x1 })
}

#[inline]
fn xi(x: &Option<Vec<f64>>, i: usize) -> f64 {
    x.as_ref().map_or(0.0, |x| x[i])
}

struct PvChain {
    f0: RegressionState,
    g: RegressionState,
    eta: Vec<f64>,
}

impl PvChain {
    fn placement(&mut self, d: &Prepared) {
        let (b, sd) = (&self.f0.beta, self.f0.sigma2.sqrt());
        for (j, &y) in d.y1.iter().enumerate() {
            let m = b[0] + b.get(1).copied().unwrap_or(0.0) * xi(&d.x1, j);
            self.eta[j] = probit_pv(std_normal_sf((y - m) / sd));
        }
    }

    fn stage2_stats(&self, d: &Prepared) -> SuffStats {
        SuffStats::from_data(&self.eta, d.x1.as_deref())
    }
}

/// Two-stage parametric PV model sampled as one chain: each sweep updates
/// the healthy normal (regression), recomputes the probit placement values
/// of the diseased group under the new draw and updates their normal
/// (regression) law.
pub fn fit_pv_parametric(s: &Sample, mcmc: &McmcConfig) -> Result<FittedModel> {
    let d = prepare(s, 3)?;
    let cov = s.has_covariates();
    let stats0 = SuffStats::from_data(&d.y0, d.x0.as_deref());
    let names: Vec<String> = if cov {
        ["beta00", "beta10", "sigma0", "beta0", "beta1", "sigma"].map(String::from).to_vec()
    } else {
        ["mu0", "sigma0", "mu", "sigma"].map(String::from).to_vec()
    };
    let chains = run_chains(
        mcmc,
        names,
        |_, _| {
            let f0 = RegressionState::init(&stats0);
            let mut st = PvChain { f0, g: RegressionState { beta: vec![], sigma2: 1.0 }, eta: vec![0.0; d.y1.len()] };
            st.placement(&d);
            st.g = RegressionState::init(&st.stage2_stats(&d));
            st
        },
        |st, rng| {
            st.f0.sweep(rng, &stats0);
            st.placement(&d);
            let s2 = st.stage2_stats(&d);
            st.g.sweep(rng, &s2);
        },
        |st| {
            let mut v = st.f0.beta.clone();
            v.push(st.f0.sigma2.sqrt());
            v.extend(&st.g.beta);
            v.push(st.g.sigma2.sqrt());
            v
        },
    )?;
    let to_params = |v: &[f64]| {
        if cov {
            PvParams { b00: v[0], b10: v[1], s0: v[2], b0: v[3], b1: v[4], s: v[5] }
        } else {
            PvParams { b00: v[0], b10: 0.0, s0: v[1], b0: v[2], b1: 0.0, s: v[3] }
        }
    };
    let draws = chains.iter().map(|v| Curve::Pv(to_params(v))).collect();
    let means: Vec<f64> = (0..chains.names.len()).map(|j| chains.mean(j)).collect();
    FittedModel::bayesian(ModelKind::PvParametric, s, Curve::Pv(to_params(&means)), draws, chains)
}

pub fn fit_pv_semiparametric(s: &Sample, mcmc: &McmcConfig) -> Result<FittedModel> {
    fit_pv_semiparametric_with(s, mcmc, DEFAULT_TRUNCATION, DEFAULT_ALPHA)
}

struct SemiChain {
    f0: DpmState,
    g: DpmState,
    eta: Vec<f64>,
}

impl SemiChain {
    fn placement(&mut self, d: &Prepared) {
        let sd = self.f0.sigma2.sqrt();
        for (j, &y) in d.y1.iter().enumerate() {
            let x = xi(&d.x1, j);
            let mut surv = 0.0;
            for (w, b) in self.f0.pi.iter().zip(&self.f0.beta) {
                let m = b[0] + b.get(1).copied().unwrap_or(0.0) * x;
                surv += w * std_normal_sf((y - m) / sd);
            }
            self.eta[j] = probit_pv(surv);
        }
    }
}

/// Semiparametric PV model: truncated stick-breaking mixtures of normals
/// (normal regressions with covariates) for the healthy law and for the
/// probit placement values, sampled jointly by blocked Gibbs. `k = 1`
/// reduces to the parametric PV model.
pub fn fit_pv_semiparametric_with(s: &Sample, mcmc: &McmcConfig, k: usize, alpha: f64) -> Result<FittedModel> {
    if k == 0 {
        return Err(invalid("truncation level must be at least 1"));
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(invalid("concentration must be positive"));
    }
    let d = prepare(s, 10)?;
    let p = if s.has_covariates() { 2 } else { 1 };
    let prefixed = |pre: &'static str| DpmState::names(k, p).into_iter().map(move |n| format!("{pre}_{n}"));
    let names: Vec<String> = prefixed("f0").chain(prefixed("pv")).collect();
    let chains = run_chains(
        mcmc,
        names,
        |_, _| {
            let f0 = DpmState::init(&d.y0, d.x0.as_deref(), k, alpha);
            let mut st = SemiChain { g: f0.clone(), f0, eta: vec![0.0; d.y1.len()] };
            st.placement(&d);
            st.g = DpmState::init(&st.eta, d.x1.as_deref(), k, alpha);
            st
        },
        |st, rng| {
            st.f0.sweep(rng, &d.y0, d.x0.as_deref());
            st.placement(&d);
            st.g.sweep(rng, &st.eta, d.x1.as_deref());
        },
        |st| {
            let mut v = st.f0.record();
            v.extend(st.g.record());
            v
        },
    )?;
    let draws: Vec<PvMixtureParams> = chains.iter().map(|v| unpack_semi(v, k, p)).collect();
    let point = Curve::PvMixture(pooled_mixture(&draws));
    let draws = draws.into_iter().map(Curve::PvMixture).collect();
    FittedModel::bayesian(ModelKind::PvSemiparametric, s, point, draws, chains)
}

fn unpack_semi(v: &[f64], k: usize, p: usize) -> PvMixtureParams {
    let len = k + p * k + 1;
    let comps = |part: &[f64]| {
        let (pi, beta, s2) = DpmState::unpack(part, k, p);
        let sd = s2.sqrt();
        pi.iter()
            .zip(beta)
            .map(|(&w, b)| MixtureComponent { w, b0: b[0], b1: b.get(1).copied().unwrap_or(0.0), sd })
            .collect()
    };
    PvMixtureParams { f0: comps(&v[..len]), g: comps(&v[len..]) }
}

/// Average of the mixture laws of evenly spaced draws. Component labels are
/// not identified, so the point curve averages distributions rather than
/// parameters.
fn pooled_mixture(draws: &[PvMixtureParams]) -> PvMixtureParams {
    let m = draws.len().clamp(1, POINT_POOL);
    let step = draws.len() as f64 / m as f64;
    let picks: Vec<&PvMixtureParams> = (0..m).map(|i| &draws[(i as f64 * step) as usize]).collect();
    let pool = |get: fn(&PvMixtureParams) -> &Vec<MixtureComponent>| {
        let mut out: Vec<MixtureComponent> = picks
            .iter()
            .flat_map(|d| get(d).iter().map(|c| MixtureComponent { w: c.w / m as f64, ..*c }))
            .filter(|c| c.w > 1e-12)
            .collect();
        let total: f64 = out.iter().map(|c| c.w).sum();
        out.iter_mut().for_each(|c| c.w /= total);
        out
    };
    PvMixtureParams { f0: pool(|d| &d.f0), g: pool(|d| &d.g) }
}
