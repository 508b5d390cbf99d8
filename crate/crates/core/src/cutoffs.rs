//! Optimal-cutoff criteria, the threshold optimizer, and posterior/bootstrap
//! summaries of optimal thresholds.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::{rng_stream, Dist};
use crate::error::{invalid, Error, Result};
use crate::models::{fit_empirical, fit_kernel, FittedModel, ModelKind, Sample};
use crate::roc::{auc, se_sp_at, PairKind, RocPair};
use crate::stats::quantile_type7_sorted;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Criterion {
    /// Youden index `se + sp - 1`, maximized.
    J,
    /// Distance to the `(0, 1)` corner, minimized.
    Er,
    /// Concordance probability `se * sp`, maximized.
    Cz,
    /// Index of union `|se - AUC| + |sp - AUC|`, minimized.
    Iu,
}

impl Criterion {
    pub const ALL: [Criterion; 4] = [Criterion::J, Criterion::Er, Criterion::Cz, Criterion::Iu];

    pub fn maximizes(self) -> bool {
        matches!(self, Criterion::J | Criterion::Cz)
    }

    pub fn name(self) -> &'static str {
        match self {
            Criterion::J => "J",
            Criterion::Er => "ER",
            Criterion::Cz => "CZ",
            Criterion::Iu => "IU",
        }
    }

    /// Objective from `(se, sp)`; `auc` is only read by IU.
    #[inline]
    pub fn value(self, se: f64, sp: f64, auc: f64) -> f64 {
        match self {
            Criterion::J => se + sp - 1.0,
            Criterion::Er => ((1.0 - se).powi(2) + (1.0 - sp).powi(2)).sqrt(),
            Criterion::Cz => se * sp,
            Criterion::Iu => (se - auc).abs() + (sp - auc).abs(),
        }
    }

    /// Objective oriented so that larger is better.
    #[inline]
    fn score(self, se: f64, sp: f64, auc: f64) -> f64 {
        let v = self.value(se, sp, auc);
        if self.maximizes() {
            v
        } else {
            -v
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Criterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "j" | "youden" => Ok(Criterion::J),
            "er" => Ok(Criterion::Er),
            "cz" => Ok(Criterion::Cz),
            "iu" => Ok(Criterion::Iu),
            _ => Err(invalid(format!("unknown criterion '{s}' (expected j, er, cz or iu)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CutoffSource {
    PointEstimate,
    PosteriorDraws,
    Bootstrap,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutoffResult {
    pub criterion: Criterion,
    pub c_star: f64,
    pub se: f64,
    pub sp: f64,
    pub objective_value: f64,
    /// Equal-tailed 95% interval of the threshold.
    pub interval: Option<(f64, f64)>,
    pub source: CutoffSource,
}

/// Criterion value at data-axis threshold `c`. IU computes the pair's AUC;
/// use [`Objective`] to evaluate repeatedly.
pub fn objective(criterion: Criterion, pair: &RocPair, c: f64) -> f64 {
    let a = if criterion == Criterion::Iu { auc(pair) } else { f64::NAN };
    let s = se_sp_at(pair, c);
    criterion.value(s.se, s.sp, a)
}

/// A pair with its AUC computed once.
pub struct Objective<'a> {
    pub pair: &'a RocPair,
    pub auc: f64,
}

impl<'a> Objective<'a> {
    pub fn new(pair: &'a RocPair) -> Self {
        Self { pair, auc: auc(pair) }
    }

    pub fn eval(&self, criterion: Criterion, c: f64) -> f64 {
        let s = se_sp_at(self.pair, c);
        criterion.value(s.se, s.sp, self.auc)
    }
}

/// Points in the grid scan over the search interval.
pub const GRID_POINTS: usize = 2001;
const TIE_TOL: f64 = 1e-12;

#[derive(Clone, Copy)]
struct Candidate {
    c: f64,
    score: f64,
    gap: f64,
}

/// `a` beats `b` under the tie rules: higher score, then (IU only) smaller
/// `|se - sp|`, then smaller threshold.
fn better(criterion: Criterion, a: &Candidate, b: &Candidate) -> bool {
    if a.score > b.score + TIE_TOL {
        return true;
    }
    if a.score < b.score - TIE_TOL {
        return false;
    }
    if criterion == Criterion::Iu && (a.gap - b.gap).abs() > TIE_TOL {
        return a.gap < b.gap;
    }
    a.c < b.c
}

/// Optimal threshold for one criterion over `search` (data axis).
pub fn optimize_cutoff(criterion: Criterion, pair: &RocPair, search: (f64, f64)) -> Result<CutoffResult> {
    Ok(optimize_all(pair, &[criterion], search)?.remove(0))
}

/// Optimal thresholds for several criteria, sharing the grid evaluation.
///
/// Smooth pairs are scanned on a uniform grid and refined by golden-section
/// search inside the best grid bracket. Empirical pairs are scanned exactly
/// over midpoints between consecutive distinct pooled values plus two
/// outlying extremes; `search` is not used for them.
pub fn optimize_all(pair: &RocPair, criteria: &[Criterion], search: (f64, f64)) -> Result<Vec<CutoffResult>> {
    let a = if criteria.contains(&Criterion::Iu) { auc(pair) } else { f64::NAN };
    let eval = |c: f64| {
        let s = se_sp_at(pair, c);
        (s.se, s.sp)
    };
    if let Some(cands) = empirical_candidates(pair) {
        let table: Vec<(f64, f64, f64)> = cands.iter().map(|&c| {
            let (se, sp) = eval(c);
            (c, se, sp)
        }).collect();
        return criteria
            .iter()
            .map(|&cr| {
                let best = best_of(cr, &table, a)?;
                Ok(result(cr, best.c, eval(best.c), a))
            })
            .collect();
    }

    let (lo, hi) = search;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(invalid(format!("search interval [{lo}, {hi}] must be finite and nonempty")));
    }
    // Scan on the normalized axis so that a flipped orientation sees the
    // same grid and refinement, and cutoffs map back by exact negation.
    let o = pair.orientation;
    let (u0, u1) = (o.apply(lo), o.apply(hi));
    let (ulo, uhi) = (u0.min(u1), u0.max(u1));
    let step = (uhi - ulo) / (GRID_POINTS - 1) as f64;
    let grid: Vec<f64> = (0..GRID_POINTS).map(|i| if i == GRID_POINTS - 1 { uhi } else { ulo + step * i as f64 }).collect();
    let table: Vec<(f64, f64, f64)> = grid
        .iter()
        .map(|&u| {
            let (se, sp) = pair.se_sp_normalized(u);
            (o.apply(u), se, sp)
        })
        .collect();
    let tol = 1e-9 * (uhi - ulo);
    criteria
        .iter()
        .map(|&cr| {
            let grid_best = best_of(cr, &table, a)?;
            let i = ((o.apply(grid_best.c) - ulo) / step).round() as usize;
            let left = grid[i.saturating_sub(1)];
            let right = grid[(i + 1).min(GRID_POINTS - 1)];
            let f = |u: f64| {
                let (se, sp) = pair.se_sp_normalized(u);
                cr.score(se, sp, a)
            };
            let refined_c = o.apply(golden_max(f, left, right, tol));
            let (se, sp) = eval(refined_c);
            let refined = Candidate { c: refined_c, score: cr.score(se, sp, a), gap: (se - sp).abs() };
            let c = if refined.score.is_finite() && refined.score > grid_best.score - TIE_TOL {
                refined.c
            } else {
                grid_best.c
            };
            Ok(result(cr, c, eval(c), a))
        })
        .collect()
}

fn result(criterion: Criterion, c: f64, (se, sp): (f64, f64), a: f64) -> CutoffResult {
    CutoffResult {
        criterion,
        c_star: c,
        se,
        sp,
        objective_value: criterion.value(se, sp, a),
        interval: None,
        source: CutoffSource::PointEstimate,
    }
}

fn best_of(criterion: Criterion, table: &[(f64, f64, f64)], a: f64) -> Result<Candidate> {
    let mut best: Option<Candidate> = None;
    for &(c, se, sp) in table {
        let score = criterion.score(se, sp, a);
        if !score.is_finite() {
            return Err(Error::NumericFailure { c });
        }
        let cand = Candidate { c, score, gap: (se - sp).abs() };
        if best.as_ref().is_none_or(|b| better(criterion, &cand, b)) {
            best = Some(cand);
        }
    }
    best.ok_or_else(|| invalid("empty candidate set"))
}

/// Maximizer of `f` on `[a, b]` by golden-section search.
fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while b - a > tol {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }
    0.5 * (a + b)
}

/// Data-axis candidate thresholds for an empirical pair, ascending.
fn empirical_candidates(pair: &RocPair) -> Option<Vec<f64>> {
    let (e0, e1) = match &pair.kind {
        PairKind::General { f0: Dist::Empirical(a), f1: Dist::Empirical(b) } => (a, b),
        _ => return None,
    };
    let mut pooled: Vec<f64> = e0.values().iter().chain(e1.values()).map(|&v| pair.orientation.apply(v)).collect();
    pooled.sort_by(f64::total_cmp);
    pooled.dedup();
    let (min, max) = (pooled[0], pooled[pooled.len() - 1]);
    let range = if max > min { max - min } else { 1.0 };
    let mut cands = Vec::with_capacity(pooled.len() + 1);
    cands.push(min - range);
    cands.extend(pooled.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    cands.push(max + range);
    Some(cands)
}

/// Default search interval for fitted models: pooled range widened by three
/// pooled standard deviations on each side.
pub fn data_search_interval(y0: &[f64], y1: &[f64]) -> (f64, f64) {
    let pooled: Vec<f64> = y0.iter().chain(y1).copied().collect();
    let sd = crate::stats::sample_sd(&pooled);
    let min = pooled.iter().copied().fold(f64::INFINITY, f64::min);
    let max = pooled.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let pad = if sd > 0.0 { 3.0 * sd } else { 1.0 };
    (min - pad, max + pad)
}

/// Search interval for an analytic pair: the data-axis range between the
/// `eps` and `1 - eps` quantiles of the union of the two laws.
pub fn analytic_search_interval(pair: &RocPair, eps: f64) -> (f64, f64) {
    let (lo, hi) = pair.mass_bracket(eps);
    let (a, b) = (pair.orientation.apply(lo), pair.orientation.apply(hi));
    (a.min(b), a.max(b))
}

/// Posterior summary of optimal thresholds: every retained draw's pair is
/// optimized, the threshold is reported as the posterior mean with a 2.5% /
/// 97.5% quantile interval, and `se`/`sp` are evaluated at that mean under
/// the point-summary pair.
pub fn cutoff_posterior(model: &FittedModel, criterion: Criterion, at_x: Option<f64>) -> Result<CutoffResult> {
    Ok(cutoff_posterior_all(model, &[criterion], at_x)?.remove(0))
}

/// [`cutoff_posterior`] for several criteria, sharing each draw's grid scan.
pub fn cutoff_posterior_all(model: &FittedModel, criteria: &[Criterion], at_x: Option<f64>) -> Result<Vec<CutoffResult>> {
    if !model.is_bayesian() {
        return Err(Error::UnsupportedQuery(format!("the {} fit has no posterior draws", model.kind)));
    }
    let point = model.pair(at_x)?;
    let pairs = model.draw_pairs(at_x)?;
    let per_draw: Vec<Vec<f64>> = pairs
        .par_iter()
        .map(|p| Ok(optimize_all(p, criteria, model.search)?.iter().map(|r| r.c_star).collect()))
        .collect::<Result<_>>()?;
    let point_auc = auc(&point);
    Ok(criteria
        .iter()
        .enumerate()
        .map(|(j, &cr)| {
            let cs: Vec<f64> = per_draw.iter().map(|d| d[j]).collect();
            let c = crate::stats::mean(&cs);
            let mut r = result(cr, c, se_sp_tuple(&point, c), point_auc);
            r.interval = Some(percentile_interval(&cs));
            r.source = CutoffSource::PosteriorDraws;
            r
        })
        .collect())
}

fn se_sp_tuple(pair: &RocPair, c: f64) -> (f64, f64) {
    let s = se_sp_at(pair, c);
    (s.se, s.sp)
}

fn percentile_interval(v: &[f64]) -> (f64, f64) {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    (quantile_type7_sorted(&s, 0.025), quantile_type7_sorted(&s, 0.975))
}

/// Minimum number of bootstrap resamples.
pub const MIN_BOOTSTRAP: usize = 100;
const MAX_REDRAWS: usize = 10;

/// Bootstrap summary of a non-Bayesian fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapSummary {
    pub auc: f64,
    pub auc_interval: (f64, f64),
    pub cutoffs: Vec<CutoffResult>,
}

/// Stratified bootstrap of the optimal threshold for an empirical or kernel
/// fit. The threshold itself comes from the original sample; the interval is
/// the 2.5% / 97.5% percentile range over `b` resamples.
pub fn cutoff_bootstrap(s: &Sample, kind: ModelKind, criterion: Criterion, b: usize, seed: u64) -> Result<CutoffResult> {
    Ok(bootstrap_all(s, kind, &[criterion], b, seed)?.cutoffs.remove(0))
}

/// Bootstrap of the AUC and several criteria, sharing the resamples.
pub fn bootstrap_all(s: &Sample, kind: ModelKind, criteria: &[Criterion], b: usize, seed: u64) -> Result<BootstrapSummary> {
    if !matches!(kind, ModelKind::Empirical | ModelKind::Kernel) {
        return Err(Error::UnsupportedModel(format!("bootstrap intervals are for emp and nonpar fits, not {kind}")));
    }
    if b < MIN_BOOTSTRAP {
        return Err(invalid(format!("at least {MIN_BOOTSTRAP} bootstrap resamples required, got {b}")));
    }
    let fit = |s: &Sample| match kind {
        ModelKind::Empirical => fit_empirical(s),
        _ => fit_kernel(s),
    };
    let original = fit(s)?;
    let pair = original.pair(None)?;
    let base = optimize_all(&pair, criteria, original.search)?;
    let reps: Vec<(f64, Vec<f64>)> = (0..b)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_stream(seed, i as u64);
            let mut last = None;
            for _ in 0..MAX_REDRAWS {
                let rs = Sample {
                    y0: resample(&mut rng, &s.y0),
                    y1: resample(&mut rng, &s.y1),
                    ..s.clone()
                };
                match fit(&rs) {
                    Ok(m) => {
                        let p = m.pair(None)?;
                        let cs = optimize_all(&p, criteria, m.search)?.iter().map(|r| r.c_star).collect();
                        return Ok((auc(&p), cs));
                    }
                    Err(e @ Error::DegenerateSample(_)) => last = Some(e),
                    Err(e) => return Err(e),
                }
            }
            Err(last.unwrap_or_else(|| Error::DegenerateSample("resampling failed".into())))
        })
        .collect::<Result<_>>()?;
    let aucs: Vec<f64> = reps.iter().map(|r| r.0).collect();
    let cutoffs = base
        .into_iter()
        .enumerate()
        .map(|(j, mut r)| {
            let cs: Vec<f64> = reps.iter().map(|rep| rep.1[j]).collect();
            r.interval = Some(percentile_interval(&cs));
            r.source = CutoffSource::Bootstrap;
            r
        })
        .collect();
    Ok(BootstrapSummary { auc: auc(&pair), auc_interval: percentile_interval(&aucs), cutoffs })
}

fn resample<R: Rng + ?Sized>(rng: &mut R, v: &[f64]) -> Vec<f64> {
    (0..v.len()).map(|_| v[rng.random_range(0..v.len())]).collect()
}
