use std::io::Write;
use std::path::{Path, PathBuf};

use roccut_core::cutoffs::{bootstrap_all, cutoff_posterior_all, optimize_all};
use roccut_core::roc::{auc, delong_auc};
use roccut_core::{Criterion, FittedModel, McmcConfig, ModelKind, Orientation, Sample};
use serde::Serialize;

use crate::args::Direction;
use crate::data::Columns;
use crate::error::{CliError, CliResult};

/// Everything `analyze` needs besides the data.
#[derive(Debug, Clone)]
pub struct AnalysisConfig {
    pub columns: Columns,
    pub direction: Direction,
    pub models: Vec<ModelKind>,
    pub criteria: Vec<Criterion>,
    pub at_x: Vec<f64>,
    pub mcmc: McmcConfig,
    /// Bootstrap resamples for emp/nonpar intervals; 0 skips them.
    pub bootstrap: usize,
    pub seed: u64,
}

impl AnalysisConfig {
    pub fn validate(&self) -> CliResult<()> {
        if self.models.is_empty() || self.criteria.is_empty() {
            return Err(CliError::Usage("at least one model and one criterion are required".into()));
        }
        if self.columns.covariate.is_some() {
            if let Some(k) = self.models.iter().find(|k| !k.supports_covariates()) {
                return Err(CliError::Usage(format!(
                    "unsupported model: {k} cannot use covariates (use bn, pv or semipv)"
                )));
            }
            if self.at_x.is_empty() {
                return Err(CliError::Usage("--covariate needs at least one --at value".into()));
            }
        }
        self.mcmc.validate()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub model: String,
    pub covariate_level: Option<f64>,
    /// `AUC`, `J`, `ER`, `CZ` or `IU`.
    pub metric: String,
    /// Posterior mean, or the point estimate for non-Bayesian fits.
    pub estimate: f64,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    /// Sensitivity and specificity at the cutoff (cutoff rows only).
    pub se: Option<f64>,
    pub sp: Option<f64>,
    /// `posterior`, `bootstrap` or `point`.
    pub source: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelDiagnostics {
    pub model: String,
    pub rhat: Option<f64>,
    pub convergence_warning: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub n_healthy: usize,
    pub n_diseased: usize,
    /// `high` or `low`: which side of a cutoff is called diseased.
    pub direction: String,
    /// True when `auto` chose the low direction.
    pub flipped: bool,
    /// DeLong AUC of the data as given (higher values diseased).
    pub raw_auc: f64,
    pub rows: Vec<ResultRow>,
    pub diagnostics: Vec<ModelDiagnostics>,
}

pub struct Analysis {
    pub report: AnalysisReport,
    pub fits: Vec<FittedModel>,
}

pub fn run_analysis(sample: &Sample, cfg: &AnalysisConfig) -> CliResult<Analysis> {
    cfg.validate()?;
    sample.validate(3)?;
    let raw_auc = delong_auc(&sample.y0, &sample.y1)?;
    let orientation = match cfg.direction {
        Direction::High => Orientation::HigherIsDiseased,
        Direction::Low => Orientation::LowerIsDiseased,
        Direction::Auto if raw_auc < 0.5 => Orientation::LowerIsDiseased,
        Direction::Auto => Orientation::HigherIsDiseased,
    };
    let s = sample.clone().with_orientation(orientation);
    let points: Vec<Option<f64>> =
        if s.has_covariates() { cfg.at_x.iter().map(|&x| Some(x)).collect() } else { vec![None] };
    let mut rows = Vec::new();
    let mut fits = Vec::new();
    let mut diagnostics = Vec::new();
    for &kind in &cfg.models {
        let model = kind.fit(&s, &cfg.mcmc.derive(kind as u64))?;
        for &x in &points {
            rows.extend(model_rows(&s, &model, x, cfg)?);
        }
        diagnostics.push(ModelDiagnostics {
            model: kind.to_string(),
            rhat: model.rhat,
            convergence_warning: model.convergence_warning(),
        });
        fits.push(model);
    }
    let report = AnalysisReport {
        n_healthy: s.y0.len(),
        n_diseased: s.y1.len(),
        direction: if orientation == Orientation::LowerIsDiseased { "low" } else { "high" }.into(),
        flipped: cfg.direction == Direction::Auto && orientation == Orientation::LowerIsDiseased,
        raw_auc,
        rows,
        diagnostics,
    };
    Ok(Analysis { report, fits })
}

fn model_rows(s: &Sample, model: &FittedModel, x: Option<f64>, cfg: &AnalysisConfig) -> CliResult<Vec<ResultRow>> {
    let row = |metric: &str, est: f64, lo: Option<f64>, hi: Option<f64>, sesp: Option<(f64, f64)>, src: &str| ResultRow {
        model: model.kind.to_string(),
        covariate_level: x,
        metric: metric.into(),
        estimate: est,
        lower: lo,
        upper: hi,
        se: sesp.map(|v| v.0),
        sp: sesp.map(|v| v.1),
        source: src.into(),
    };
    let mut out = Vec::new();
    if model.is_bayesian() {
        let a = model.auc_summary(x)?;
        out.push(row("AUC", a.mean, Some(a.q025), Some(a.q975), None, "posterior"));
        for r in cutoff_posterior_all(model, &cfg.criteria, x)? {
            let (lo, hi) = r.interval.unwrap_or((r.c_star, r.c_star));
            out.push(row(r.criterion.name(), r.c_star, Some(lo), Some(hi), Some((r.se, r.sp)), "posterior"));
        }
    } else if cfg.bootstrap > 0 && matches!(model.kind, ModelKind::Empirical | ModelKind::Kernel) {
        let b = bootstrap_all(s, model.kind, &cfg.criteria, cfg.bootstrap, cfg.seed)?;
        out.push(row("AUC", b.auc, Some(b.auc_interval.0), Some(b.auc_interval.1), None, "bootstrap"));
        for r in b.cutoffs {
            let (lo, hi) = r.interval.unwrap_or((r.c_star, r.c_star));
            out.push(row(r.criterion.name(), r.c_star, Some(lo), Some(hi), Some((r.se, r.sp)), "bootstrap"));
        }
    } else {
        let pair = model.pair(x)?;
        out.push(row("AUC", auc(&pair), None, None, None, "point"));
        for r in optimize_all(&pair, &cfg.criteria, model.search)? {
            out.push(row(r.criterion.name(), r.c_star, None, None, Some((r.se, r.sp)), "point"));
        }
    }
    Ok(out)
}

fn fmt3(v: Option<f64>) -> String {
    v.map(|v| format!("{v:.3}")).unwrap_or_default()
}

/// Result table rounded to 3 decimals; the covariate column appears only
/// for covariate analyses.
pub fn write_table_csv<W: Write>(w: W, report: &AnalysisReport) -> CliResult<()> {
    let cov = report.rows.iter().any(|r| r.covariate_level.is_some());
    let mut out = csv::Writer::from_writer(w);
    let mut header = vec!["model"];
    if cov {
        header.push("covariate_level");
    }
    header.extend(["metric", "estimate", "lower", "upper", "se", "sp", "source"]);
    out.write_record(&header)?;
    for r in &report.rows {
        let mut rec = vec![r.model.clone()];
        if cov {
            rec.push(r.covariate_level.map(|x| x.to_string()).unwrap_or_default());
        }
        rec.extend([
            r.metric.clone(),
            format!("{:.3}", r.estimate),
            fmt3(r.lower),
            fmt3(r.upper),
            fmt3(r.se),
            fmt3(r.sp),
            r.source.clone(),
        ]);
        out.write_record(&rec)?;
    }
    out.flush()?;
    Ok(())
}

/// Draw dump path for one model: the given path when only one Bayesian
/// model is dumped, otherwise `<stem>_<model>.<ext>`.
pub fn draws_path(base: &Path, kind: ModelKind, several: bool) -> PathBuf {
    if !several {
        return base.to_path_buf();
    }
    let stem = base.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "draws".into());
    let name = match base.extension() {
        Some(ext) => format!("{stem}_{kind}.{}", ext.to_string_lossy()),
        None => format!("{stem}_{kind}"),
    };
    base.with_file_name(name)
}

pub fn dump_draws(base: &Path, fits: &[FittedModel]) -> CliResult<Vec<PathBuf>> {
    let bayes: Vec<&FittedModel> = fits.iter().filter(|m| m.chains.is_some()).collect();
    let mut written = Vec::new();
    for m in &bayes {
        let p = draws_path(base, m.kind, bayes.len() > 1);
        let f = std::fs::File::create(&p)?;
        let mut w = std::io::BufWriter::new(f);
        if let Some(ch) = &m.chains {
            ch.write_csv(&mut w)?;
        }
        w.flush()?;
        written.push(p);
    }
    Ok(written)
}
