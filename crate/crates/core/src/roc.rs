//! ROC evaluation, sensitivity/specificity and AUC for a pair of healthy and
//! diseased (or placement-value) distributions.

use serde::{Deserialize, Serialize};

use crate::distributions::special::{std_normal_cdf, std_normal_quantile};
use crate::distributions::{f_cdf, ContinuousDist, Dist};
use crate::error::{invalid, Result};

/// Which side of a threshold is called diseased.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum Orientation {
    #[default]
    HigherIsDiseased,
    LowerIsDiseased,
}

impl Orientation {
    /// Maps a value between the data axis and the normalized
    /// (higher-is-diseased) axis. The map is its own inverse.
    #[inline]
    pub fn apply(self, v: f64) -> f64 {
        match self {
            Orientation::HigherIsDiseased => v,
            Orientation::LowerIsDiseased => -v,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Orientation::HigherIsDiseased => Orientation::LowerIsDiseased,
            Orientation::LowerIsDiseased => Orientation::HigherIsDiseased,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PairKind {
    /// Healthy and diseased biomarker laws.
    General { f0: Dist, f1: Dist },
    /// Healthy law and the law of `probit(Z)`, `Z = 1 - F0(Y1)` the
    /// placement value. The ROC curve is `G(probit(t))`.
    Pv { f0: Dist, probit_pv: Dist },
}

/// A ROC-defining pair. Distributions are stored on the normalized axis,
/// where higher values indicate disease; `orientation` records how to map
/// thresholds back to the data axis.
#[derive(Debug, Clone, PartialEq)]
pub struct RocPair {
    pub kind: PairKind,
    pub orientation: Orientation,
}

/// Sensitivity and specificity at threshold `c` (data axis).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeSp {
    pub c: f64,
    pub se: f64,
    pub sp: f64,
}

impl RocPair {
    pub fn general(f0: Dist, f1: Dist) -> Self {
        Self { kind: PairKind::General { f0, f1 }, orientation: Orientation::HigherIsDiseased }
    }

    pub fn pv(f0: Dist, probit_pv: Dist) -> Self {
        Self { kind: PairKind::Pv { f0, probit_pv }, orientation: Orientation::HigherIsDiseased }
    }

    /// Pair from laws given on the data axis. With `LowerIsDiseased` both laws
    /// are negated so that every formula sees the higher-is-diseased form.
    pub fn general_oriented(f0: Dist, f1: Dist, orientation: Orientation) -> Self {
        match orientation {
            Orientation::HigherIsDiseased => Self::general(f0, f1),
            Orientation::LowerIsDiseased => Self {
                kind: PairKind::General { f0: f0.negated(), f1: f1.negated() },
                orientation,
            },
        }
    }

    /// Binormal pair `N(mu0, s0)` vs `N(mu1, s1)`.
    pub fn binormal(mu0: f64, s0: f64, mu1: f64, s1: f64) -> Result<Self> {
        Ok(Self::general(Dist::normal(mu0, s0)?, Dist::normal(mu1, s1)?))
    }

    /// Binormal pair in `(a, b)` form with a standard normal healthy law.
    pub fn binormal_ab(a: f64, b: f64) -> Result<Self> {
        if !(b > 0.0) {
            return Err(invalid(format!("binormal b must be positive, got {b}")));
        }
        Self::binormal(0.0, 1.0, a / b, 1.0 / b)
    }

    pub fn with_orientation(mut self, orientation: Orientation) -> Self {
        self.orientation = orientation;
        self
    }

    pub fn f0(&self) -> &Dist {
        match &self.kind {
            PairKind::General { f0, .. } | PairKind::Pv { f0, .. } => f0,
        }
    }

    pub fn is_empirical(&self) -> bool {
        matches!(&self.kind, PairKind::General { f0: Dist::Empirical(_), f1: Dist::Empirical(_) })
    }

    /// ROC value without argument checks; `t` in (0, 1).
    pub fn roc(&self, t: f64) -> f64 {
        let v = match &self.kind {
            PairKind::General { f0, f1 } => f1.sf(f0.isf(t)),
            PairKind::Pv { probit_pv, .. } => probit_pv.cdf(std_normal_quantile(t)),
        };
        v.clamp(0.0, 1.0)
    }

    /// `(se, sp)` at threshold `c` on the normalized axis.
    pub fn se_sp_normalized(&self, c: f64) -> (f64, f64) {
        match &self.kind {
            PairKind::General { f0, f1 } => (f1.sf(c), f0.cdf(c)),
            PairKind::Pv { f0, probit_pv } => {
                let s0 = f0.sf(c);
                let se = if s0 <= 0.0 {
                    0.0
                } else if s0 >= 1.0 {
                    1.0
                } else {
                    probit_pv.cdf(std_normal_quantile(s0))
                };
                (se, f0.cdf(c))
            }
        }
    }

    /// Threshold range carrying all but `eps` of the mass of both the healthy
    /// and diseased laws, on the normalized axis.
    pub fn mass_bracket(&self, eps: f64) -> (f64, f64) {
        let f0 = self.f0();
        let (mut lo, mut hi) = (f0.quantile(eps), f0.isf(eps));
        match &self.kind {
            PairKind::General { f1, .. } => {
                lo = lo.min(f1.quantile(eps));
                hi = hi.max(f1.isf(eps));
            }
            PairKind::Pv { probit_pv, .. } => {
                // se(c) = G(probit(S0(c))) moves from 1 to 0 as S0 goes from
                // Phi(G^-1(1 - eps)) to Phi(G^-1(eps))
                let s_hi = std_normal_cdf(probit_pv.isf(eps)).min(1.0 - 1e-16);
                let s_lo = std_normal_cdf(probit_pv.quantile(eps)).max(1e-300);
                if s_hi > 0.0 && s_hi < 1.0 {
                    lo = lo.min(f0.isf(s_hi));
                }
                if s_lo > 0.0 && s_lo < 1.0 {
                    hi = hi.max(f0.isf(s_lo));
                }
            }
        }
        (lo, hi)
    }
}

/// `ROC(t)`, clamped to [0, 1].
pub fn roc_eval(pair: &RocPair, t: f64) -> Result<f64> {
    if !(t > 0.0 && t < 1.0) {
        return Err(invalid(format!("ROC abscissa must lie in (0, 1), got {t}")));
    }
    Ok(pair.roc(t))
}

/// Sensitivity and specificity at data-axis threshold `c`.
pub fn se_sp_at(pair: &RocPair, c: f64) -> SeSp {
    let (se, sp) = pair.se_sp_normalized(pair.orientation.apply(c));
    SeSp { c, se, sp }
}

/// Number of abscissae in the AUC quadrature grid.
pub const AUC_GRID: usize = 2001;

/// Area under the ROC curve. Closed forms are used for binormal, Gaussian
/// mixture and kernel laws, matched monotone transforms of normals, bigamma
/// pairs with a shared shape, empirical pairs and Gaussian-mixture PV laws;
/// anything else uses the trapezoid rule on a uniform 2001-point grid.
pub fn auc(pair: &RocPair) -> f64 {
    let v = match &pair.kind {
        PairKind::General { f0, f1 } => general_auc(f0, f1),
        PairKind::Pv { probit_pv, .. } => match probit_pv.gaussian_components() {
            Some(comps) => comps.iter().map(|&(w, m, s)| w * std_normal_cdf(-m / (1.0 + s * s).sqrt())).sum(),
            None => trapezoid_auc(pair),
        },
    };
    v.clamp(0.0, 1.0)
}

fn general_auc(f0: &Dist, f1: &Dist) -> f64 {
    if let (Dist::Empirical(a), Dist::Empirical(b)) = (f0, f1) {
        return delong_sorted(a.values(), b.values());
    }
    if let (Some(c0), Some(c1)) = (f0.gaussian_components(), f1.gaussian_components()) {
        return gaussian_pair_auc(&c0, &c1);
    }
    match (f0, f1) {
        (Dist::Gamma(g0), Dist::Gamma(g1)) if g0.shape == g1.shape => {
            let k = g0.shape;
            1.0 - f_cdf(g0.scale / g1.scale, 2.0 * k, 2.0 * k).expect("positive gamma parameters")
        }
        (Dist::Transformed(t0), Dist::Transformed(t1)) if t0.map == t1.map => {
            gaussian_pair_auc(&[(1.0, t0.base.mu, t0.base.sigma)], &[(1.0, t1.base.mu, t1.base.sigma)])
        }
        (Dist::Negated(n0), Dist::Negated(n1)) => 1.0 - general_auc(n0.inner(), n1.inner()),
        _ => trapezoid_auc(&RocPair::general(f0.clone(), f1.clone())),
    }
}

/// `P[Y1 > Y0]` for two independent finite Gaussian mixtures.
fn gaussian_pair_auc(c0: &[(f64, f64, f64)], c1: &[(f64, f64, f64)]) -> f64 {
    let mut s = 0.0;
    for &(w0, m0, s0) in c0 {
        for &(w1, m1, s1) in c1 {
            s += w0 * w1 * std_normal_cdf((m1 - m0) / (s0 * s0 + s1 * s1).sqrt());
        }
    }
    s
}

/// Trapezoid AUC on a uniform grid with `ROC(0) = 0` and `ROC(1) = 1` pinned.
pub fn trapezoid_auc(pair: &RocPair) -> f64 {
    let n = AUC_GRID - 1;
    let h = 1.0 / n as f64;
    let mut s = 0.5 * (0.0 + 1.0);
    for i in 1..n {
        s += pair.roc(i as f64 * h);
    }
    (s * h).clamp(0.0, 1.0)
}

/// Mann-Whitney form of the empirical AUC, ties counted as one half.
pub fn delong_auc(y0: &[f64], y1: &[f64]) -> Result<f64> {
    if y0.is_empty() || y1.is_empty() {
        return Err(invalid("both samples must be nonempty"));
    }
    if y0.iter().chain(y1).any(|v| !v.is_finite()) {
        return Err(invalid("samples must be finite"));
    }
    let mut a = y0.to_vec();
    let mut b = y1.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    Ok(delong_sorted(&a, &b))
}

fn delong_sorted(y0: &[f64], y1: &[f64]) -> f64 {
    // twice the Mann-Whitney count, kept integral
    let mut twice: u64 = 0;
    for &v in y1 {
        let below = y0.partition_point(|x| *x < v);
        let upto = y0.partition_point(|x| *x <= v);
        twice += 2 * below as u64 + (upto - below) as u64;
    }
    twice as f64 / (2.0 * y0.len() as f64 * y1.len() as f64)
}

/// Empirical ROC vertices `(fpr, tpr)` from `(0, 0)` to `(1, 1)`, one per
/// distinct pooled value, thresholding at `y >= v`.
pub fn empirical_roc_points(y0: &[f64], y1: &[f64]) -> Result<Vec<(f64, f64)>> {
    if y0.is_empty() || y1.is_empty() {
        return Err(invalid("both samples must be nonempty"));
    }
    let mut a = y0.to_vec();
    let mut b = y1.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let mut pooled: Vec<f64> = a.iter().chain(b.iter()).copied().collect();
    pooled.sort_by(|x, y| y.total_cmp(x));
    pooled.dedup();
    let (n0, n1) = (a.len() as f64, b.len() as f64);
    let mut pts = Vec::with_capacity(pooled.len() + 2);
    pts.push((0.0, 0.0));
    for v in pooled {
        let fp = a.len() - a.partition_point(|x| *x < v);
        let tp = b.len() - b.partition_point(|x| *x < v);
        pts.push((fp as f64 / n0, tp as f64 / n1));
    }
    if pts.last() != Some(&(1.0, 1.0)) {
        pts.push((1.0, 1.0));
    }
    Ok(pts)
}

/// Area under a polyline by the trapezoid rule.
pub fn polyline_area(pts: &[(f64, f64)]) -> f64 {
    pts.windows(2).map(|w| (w[1].0 - w[0].0) * (w[0].1 + w[1].1) * 0.5).sum()
}

/// Closed-form binormal AUC `Phi(a / sqrt(1 + b^2))`.
pub fn binormal_auc(a: f64, b: f64) -> f64 {
    std_normal_cdf(a / (1.0 + b * b).sqrt())
}
