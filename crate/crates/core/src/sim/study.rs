use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::mechanism::{generate_with, true_values_with, Mechanism, SimOptions, TrueValues};
use crate::bayes::McmcConfig;
use crate::cutoffs::{cutoff_posterior_all, optimize_all, Criterion};
use crate::distributions::{rng_stream, stream_id};
use crate::error::{invalid, Error, Result};
use crate::models::{FittedModel, ModelKind, Sample};
use crate::roc::auc;
use crate::stats::quantile_type7_sorted;

/// Quantities whose bias is tracked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Metric {
    Auc,
    Cutoff(Criterion),
}

impl Metric {
    pub fn name(&self) -> &'static str {
        match self {
            Metric::Auc => "AUC",
            Metric::Cutoff(c) => c.name(),
        }
    }

    fn truth(&self, t: &TrueValues) -> f64 {
        match self {
            Metric::Auc => t.auc,
            Metric::Cutoff(c) => t.cutoff(*c),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("auc") {
            Ok(Metric::Auc)
        } else {
            s.parse().map(Metric::Cutoff)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimStudySpec {
    pub mechanisms: Vec<Mechanism>,
    pub sizes: Vec<usize>,
    pub replicates: usize,
    pub models: Vec<ModelKind>,
    pub criteria: Vec<Criterion>,
    /// Covariate values at which covariate mechanisms are evaluated.
    pub at_x: Vec<f64>,
    pub seed: u64,
    pub mcmc: McmcConfig,
    pub options: SimOptions,
}

/// Desk-scale replicate count.
pub const DESK_REPLICATES: usize = 200;
/// Replicate count of the full study.
pub const FULL_REPLICATES: usize = 1000;

/// Chain settings for study replicates: 2 chains of 2000 iterations,
/// 500 burn-in, thinned by 3, giving 1000 retained draws. Only posterior
/// means enter the bias tables, and these settle well before 5000 draws.
pub fn study_mcmc() -> McmcConfig {
    McmcConfig { chains: 2, iterations: 2000, burn_in: 500, thin: 3, ..McmcConfig::default() }
}

impl SimStudySpec {
    /// Desk-scale defaults: 200 replicates at n = 100, all criteria,
    /// covariate mechanisms evaluated at x = 0 and 1.
    pub fn desk(mechanisms: Vec<Mechanism>, models: Vec<ModelKind>, seed: u64) -> Self {
        Self {
            mechanisms,
            sizes: vec![100],
            replicates: DESK_REPLICATES,
            models,
            criteria: Criterion::ALL.to_vec(),
            at_x: vec![0.0, 1.0],
            seed,
            mcmc: study_mcmc(),
            options: SimOptions::default(),
        }
    }

    /// The full design: 1000 replicates at n = 50, 100 and 500.
    pub fn full(mechanisms: Vec<Mechanism>, models: Vec<ModelKind>, seed: u64) -> Self {
        Self { sizes: vec![50, 100, 500], replicates: FULL_REPLICATES, ..Self::desk(mechanisms, models, seed) }
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(invalid("replicate count must be at least 1"));
        }
        if self.mechanisms.is_empty() || self.models.is_empty() || self.sizes.is_empty() {
            return Err(invalid("a study needs at least one mechanism, model and sample size"));
        }
        if let Some(&n) = self.sizes.iter().find(|&&n| n < 3) {
            return Err(invalid(format!("sample sizes must be at least 3, got {n}")));
        }
        if self.mechanisms.iter().any(Mechanism::has_covariates) && self.at_x.is_empty() {
            return Err(invalid("covariate mechanisms need at least one evaluation point"));
        }
        self.mcmc.validate()
    }

    pub fn metrics(&self) -> Vec<Metric> {
        std::iter::once(Metric::Auc).chain(self.criteria.iter().map(|&c| Metric::Cutoff(c))).collect()
    }
}

/// Median and IQR of finite biases.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BiasSummary {
    pub median: f64,
    pub iqr: f64,
    pub n_excluded: usize,
}

/// Type-7 median and IQR of `raw - truth` over the finite values.
pub fn aggregate_bias(raw: &[f64], truth: f64) -> Result<BiasSummary> {
    let mut b: Vec<f64> = raw.iter().map(|v| v - truth).filter(|v| v.is_finite()).collect();
    if b.is_empty() {
        return Err(Error::EmptyCell);
    }
    b.sort_by(f64::total_cmp);
    Ok(BiasSummary {
        median: quantile_type7_sorted(&b, 0.5),
        iqr: quantile_type7_sorted(&b, 0.75) - quantile_type7_sorted(&b, 0.25),
        n_excluded: raw.len() - b.len(),
    })
}

/// One aggregated cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub mechanism: String,
    /// AUC level, or `x=<value>` for covariate mechanisms.
    pub level: String,
    pub n: usize,
    pub model: ModelKind,
    pub metric: Metric,
    pub truth: f64,
    /// `None` when no replicate produced a finite value.
    pub summary: Option<BiasSummary>,
    /// Per-replicate estimates; non-finite where the fit failed.
    pub estimates: Vec<f64>,
}

impl CellResult {
    pub fn biases(&self) -> impl Iterator<Item = f64> + '_ {
        self.estimates.iter().map(move |e| e - self.truth)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimStudyResult {
    pub cells: Vec<CellResult>,
}

impl SimStudyResult {
    pub fn find(&self, mechanism: &str, level: &str, n: usize, model: ModelKind, metric: Metric) -> Option<&CellResult> {
        self.cells
            .iter()
            .find(|c| c.mechanism == mechanism && c.level == level && c.n == n && c.model == model && c.metric == metric)
    }

    /// Bias table: `mechanism,level,n,model,metric,median_bias,iqr,n_excluded`.
    /// Empty cells leave the two statistics blank.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(w);
        out.write_record(["mechanism", "level", "n", "model", "metric", "median_bias", "iqr", "n_excluded"])
            .map_err(io_err)?;
        for c in &self.cells {
            let (med, iqr, excl) = match c.summary {
                Some(s) => (format!("{:.6}", s.median), format!("{:.6}", s.iqr), s.n_excluded),
                None => (String::new(), String::new(), c.estimates.len()),
            };
            out.write_record([
                c.mechanism.clone(),
                c.level.clone(),
                c.n.to_string(),
                c.model.to_string(),
                c.metric.to_string(),
                med,
                iqr,
                excl.to_string(),
            ])
            .map_err(io_err)?;
        }
        out.flush().map_err(io_err)
    }

    /// Long-format records, one per replicate estimate, for plotting.
    pub fn long_records(&self) -> Vec<LongRecord> {
        self.cells
            .iter()
            .flat_map(|c| {
                c.estimates.iter().enumerate().map(move |(r, &e)| LongRecord {
                    mechanism: c.mechanism.clone(),
                    level: c.level.clone(),
                    n: c.n,
                    model: c.model.to_string(),
                    metric: c.metric.to_string(),
                    replicate: r,
                    estimate: e.is_finite().then_some(e),
                    truth: c.truth,
                    bias: (e - c.truth).is_finite().then_some(e - c.truth),
                })
            })
            .collect()
    }

    pub fn write_json<W: Write>(&self, w: W) -> Result<()> {
        serde_json::to_writer_pretty(w, &self.long_records()).map_err(io_err)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LongRecord {
    pub mechanism: String,
    pub level: String,
    pub n: usize,
    pub model: String,
    pub metric: String,
    pub replicate: usize,
    pub estimate: Option<f64>,
    pub truth: f64,
    pub bias: Option<f64>,
}

fn io_err(e: impl ToString) -> Error {
    Error::Io(e.to_string())
}

/// Evaluation point index for covariate mechanisms.
#[derive(Clone, Copy)]
struct Design {
    x: Option<usize>,
}

pub fn run_study(spec: &SimStudySpec) -> Result<SimStudyResult> {
    spec.validate()?;
    let metrics = spec.metrics();
    let mut cells = Vec::new();
    for (mi, &m) in spec.mechanisms.iter().enumerate() {
        let designs: Vec<Design> = if m.has_covariates() {
            (0..spec.at_x.len()).map(|xi| Design { x: Some(xi) }).collect()
        } else {
            vec![Design { x: None }]
        };
        let truths: Vec<TrueValues> = designs
            .iter()
            .map(|d| true_values_with(m, d.x.map(|i| spec.at_x[i]), &spec.options))
            .collect::<Result<_>>()?;
        // models that cannot use covariates are skipped for covariate mechanisms
        let models: Vec<ModelKind> =
            spec.models.iter().copied().filter(|k| !m.has_covariates() || k.supports_covariates()).collect();
        for &n in &spec.sizes {
            // estimates[rep][model][design][metric]
            let estimates: Vec<Vec<Vec<Vec<f64>>>> = (0..spec.replicates)
                .into_par_iter()
                .map(|rep| {
                    let sid = stream_id(&[mi as u64, n as u64, rep as u64]);
                    let mut rng = rng_stream(spec.seed, sid);
                    let sample = generate_with(m, n, &spec.options, &mut rng)?;
                    Ok(models
                        .iter()
                        .enumerate()
                        .map(|(k, &kind)| {
                            let mcmc = McmcConfig { seed: stream_id(&[spec.seed, sid, k as u64]), ..spec.mcmc };
                            replicate_estimates(&sample, kind, &mcmc, spec, &designs, metrics.len())
                        })
                        .collect())
                })
                .collect::<Result<_>>()?;
            for (k, &kind) in models.iter().enumerate() {
                for (di, d) in designs.iter().enumerate() {
                    for (j, &metric) in metrics.iter().enumerate() {
                        let truth = metric.truth(&truths[di]);
                        let est: Vec<f64> = estimates.iter().map(|r| r[k][di][j]).collect();
                        let level = match d.x {
                            Some(i) => format!("x={}", spec.at_x[i]),
                            None => m.level().map(|l| l.to_string()).unwrap_or_default(),
                        };
                        cells.push(CellResult {
                            mechanism: m.name().to_string(),
                            level,
                            n,
                            model: kind,
                            metric,
                            truth,
                            summary: aggregate_bias(&est, truth).ok(),
                            estimates: est,
                        });
                    }
                }
            }
        }
    }
    Ok(SimStudyResult { cells })
}

/// Estimates `[design][metric]` for one replicate and model; a failed fit
/// yields NaN everywhere.
fn replicate_estimates(
    s: &Sample,
    kind: ModelKind,
    mcmc: &McmcConfig,
    spec: &SimStudySpec,
    designs: &[Design],
    n_metrics: usize,
) -> Vec<Vec<f64>> {
    let failed = || vec![vec![f64::NAN; n_metrics]; designs.len()];
    let Ok(model) = kind.fit(s, mcmc) else {
        return failed();
    };
    designs
        .iter()
        .map(|d| {
            estimates_at(&model, d.x.map(|i| spec.at_x[i]), &spec.criteria).unwrap_or_else(|_| vec![f64::NAN; n_metrics])
        })
        .collect()
}

/// AUC followed by one threshold per criterion: posterior means for
/// Bayesian fits, point estimates otherwise.
pub fn estimates_at(model: &FittedModel, at_x: Option<f64>, criteria: &[Criterion]) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(criteria.len() + 1);
    if model.is_bayesian() {
        out.push(model.auc_summary(at_x)?.mean);
        out.extend(cutoff_posterior_all(model, criteria, at_x)?.iter().map(|r| r.c_star));
    } else {
        let pair = model.pair(at_x)?;
        out.push(auc(&pair));
        out.extend(optimize_all(&pair, criteria, model.search)?.iter().map(|r| r.c_star));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{Level, Scenario};

    #[test]
    fn aggregate_examples() {
        assert_eq!(aggregate_bias(&[2.0; 5], 2.0).unwrap(), BiasSummary { median: 0.0, iqr: 0.0, n_excluded: 0 });
        let s = aggregate_bias(&[-1.0, 0.0, 1.0], 0.0).unwrap();
        assert_eq!((s.median, s.iqr), (0.0, 1.0));
        let mut raw: Vec<f64> = (0..9).map(f64::from).collect();
        raw.push(f64::NAN);
        let s = aggregate_bias(&raw, 0.0).unwrap();
        assert_eq!(s.n_excluded, 1);
        assert_eq!(s.median, 4.0);
        assert!(matches!(aggregate_bias(&[f64::NAN, f64::INFINITY], 0.0), Err(Error::EmptyCell)));
    }

    fn small_spec(replicates: usize) -> SimStudySpec {
        SimStudySpec {
            replicates,
            sizes: vec![30],
            ..SimStudySpec::desk(
                vec![Mechanism::Plain(Scenario::BnEqual, Level::Medium)],
                vec![ModelKind::Empirical, ModelKind::Kernel],
                7,
            )
        }
    }

    #[test]
    fn single_replicate_smoke() {
        let r = run_study(&small_spec(1)).unwrap();
        assert_eq!(r.cells.len(), 2 * 5);
        for c in &r.cells {
            assert_eq!(c.estimates.len(), 1);
            assert!(c.summary.is_some());
        }
        assert!(run_study(&small_spec(0)).is_err());
    }

    #[test]
    fn deterministic_and_serializable() {
        let a = run_study(&small_spec(8)).unwrap();
        let b = run_study(&small_spec(8)).unwrap();
        assert_eq!(a, b);
        let mut buf = Vec::new();
        a.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("mechanism,level,n,model,metric,median_bias,iqr,n_excluded\r\n"));
        assert_eq!(text.lines().count(), 1 + a.cells.len());
        let mut js = Vec::new();
        a.write_json(&mut js).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&js).unwrap();
        assert_eq!(v.as_array().unwrap().len(), 8 * a.cells.len());
    }

    #[test]
    fn covariate_mechanisms_skip_frequentist_models() {
        let spec = SimStudySpec {
            replicates: 2,
            sizes: vec![40],
            mcmc: McmcConfig { iterations: 400, burn_in: 100, ..McmcConfig::default() },
            ..SimStudySpec::desk(vec![Mechanism::BnCov], vec![ModelKind::Empirical, ModelKind::Binormal], 3)
        };
        let r = run_study(&spec).unwrap();
        assert!(r.cells.iter().all(|c| c.model == ModelKind::Binormal));
        assert_eq!(r.cells.len(), 2 * 5);
        assert!(r.find("bn_cov", "x=1", 40, ModelKind::Binormal, Metric::Auc).is_some());
    }

    #[test]
    fn failed_fits_are_counted() {
        // bigamma rejects the negative values a normal mechanism produces
        let spec = SimStudySpec { models: vec![ModelKind::Bigamma], ..small_spec(3) };
        let r = run_study(&spec).unwrap();
        for c in &r.cells {
            assert!(c.summary.is_none());
            assert!(c.estimates.iter().all(|e| e.is_nan()));
        }
    }
}
