use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cutoffs::{optimize_all, Criterion};
use crate::distributions::{draw_gamma, draw_normal, draw_uniform, Dist, NormalMixture};
use crate::error::{invalid, Error, Result};
use crate::models::Sample;
use crate::roc::{auc, RocPair};

/// Scenarios without covariates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scenario {
    BnEqual,
    BnUnequal,
    SkewedI,
    SkewedII,
    SkewedIII,
    MixedI,
    MixedII,
}

impl Scenario {
    pub const ALL: [Scenario; 7] = [
        Scenario::BnEqual,
        Scenario::BnUnequal,
        Scenario::SkewedI,
        Scenario::SkewedII,
        Scenario::SkewedIII,
        Scenario::MixedI,
        Scenario::MixedII,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Level {
    Low,
    Medium,
    High,
}

impl Level {
    pub const ALL: [Level; 3] = [Level::Low, Level::Medium, Level::High];

    fn idx(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        ["low", "medium", "high"][self.idx()]
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Level {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Level::ALL
            .into_iter()
            .find(|l| l.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| invalid(format!("unknown level '{s}'; expected low, medium or high")))
    }
}

/// A data-generating mechanism. Covariate mechanisms draw `x ~ U(-0.5, 1.5)`
/// per subject and then `y` given `x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mechanism {
    Plain(Scenario, Level),
    BnCov,
    SkewedCov,
    MixedCov,
}

pub const SCENARIO_NAMES: [&str; 10] = [
    "bn_equal",
    "bn_unequal",
    "skewed_i",
    "skewed_ii",
    "skewed_iii",
    "mixed_i",
    "mixed_ii",
    "bn_cov",
    "skewed_cov",
    "mixed_cov",
];

impl Mechanism {
    /// Parses a scenario name plus an optional level; no-covariate scenarios
    /// require a level, covariate ones reject it.
    pub fn parse(name: &str, level: Option<&str>) -> Result<Self> {
        let i = SCENARIO_NAMES
            .iter()
            .position(|n| n.eq_ignore_ascii_case(name))
            .ok_or_else(|| invalid(format!("unknown mechanism '{name}'; valid names: {}", SCENARIO_NAMES.join(", "))))?;
        match (i, level) {
            (0..=6, Some(l)) => Ok(Mechanism::Plain(Scenario::ALL[i], l.parse()?)),
            (0..=6, None) => Err(invalid(format!("mechanism '{name}' needs a level (low, medium, high)"))),
            (_, Some(_)) => Err(invalid(format!("mechanism '{name}' has covariates and takes no level"))),
            (7, None) => Ok(Mechanism::BnCov),
            (8, None) => Ok(Mechanism::SkewedCov),
            _ => Ok(Mechanism::MixedCov),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Mechanism::Plain(s, _) => SCENARIO_NAMES[*s as usize],
            Mechanism::BnCov => SCENARIO_NAMES[7],
            Mechanism::SkewedCov => SCENARIO_NAMES[8],
            Mechanism::MixedCov => SCENARIO_NAMES[9],
        }
    }

    pub fn level(&self) -> Option<Level> {
        match self {
            Mechanism::Plain(_, l) => Some(*l),
            _ => None,
        }
    }

    pub fn has_covariates(&self) -> bool {
        !matches!(self, Mechanism::Plain(..))
    }

    /// All 21 no-covariate mechanisms, scenario-major.
    pub fn all_plain() -> Vec<Mechanism> {
        Scenario::ALL.iter().flat_map(|&s| Level::ALL.map(|l| Mechanism::Plain(s, l))).collect()
    }
}

impl fmt::Display for Mechanism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.level() {
            Some(l) => write!(f, "{}/{}", self.name(), l),
            None => f.write_str(self.name()),
        }
    }
}

/// How the Mixed I/II rows are read. The table displays one normal with
/// moment-combined mean and variance; the alternative draws from the
/// two-component mixture those moments are built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum MixedMode {
    #[default]
    Literal,
    TwoComponent,
}

/// Which covariate enters the first diseased sub-mean of the Mixed
/// covariate mechanism. The table writes the healthy covariate `X0`; when
/// that is used, diseased subject `i` is paired with healthy subject `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum MixedCovCovariate {
    #[default]
    Healthy,
    Diseased,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SimOptions {
    pub mixed_mode: MixedMode,
    pub mixed_cov_covariate: MixedCovCovariate,
}

const X_RANGE: (f64, f64) = (-0.5, 1.5);

// (mu0, mu1, sigma0, sigma1) per level for the normal-based scenarios.
const BN_EQUAL: [(f64, f64, f64, f64); 3] = [(0.0, 0.2, 1.0, 1.0), (0.0, 1.0, 1.0, 1.0), (0.0, 2.5, 1.0, 1.0)];
const BN_UNEQUAL: [(f64, f64, f64, f64); 3] = [(0.0, 0.2, 1.2, 0.8), (0.0, 1.0, 1.2, 0.5), (1.0, 2.9, 0.5, 1.2)];
const SKEWED_I: [(f64, f64, f64, f64); 3] = [(0.0, 0.2, 1.2, 1.0), (0.0, 1.0, 1.0, 0.7), (1.0, 2.5, 1.0, 0.5)];
const SKEWED_II: [(f64, f64, f64, f64); 3] = [(0.0, 0.2, 1.0, 1.0), (0.0, 1.0, 1.0, 0.7), (1.0, 2.5, 1.0, 0.5)];
// shape, healthy scale, diseased scales
const SKEWED_III: (f64, f64, [f64; 3]) = (0.5, 0.1, [0.15, 0.6, 7.0]);
// Mixed I diseased: pi, (mu11, s11), (mu12 per level, s12)
const MIXED_I_MU12: [f64; 3] = [1.0, 4.0, 8.0];
// Mixed II: healthy sigma02 per level, diseased mu12 per level
const MIXED_II_S02: [f64; 3] = [2.0, 5.0, 5.0];
const MIXED_II_MU12: [f64; 3] = [1.5, 2.5, 5.0];

/// One group's law as a two-component normal mixture `(w, m1, s1, m2, s2)`.
type Mix2 = (f64, f64, f64, f64, f64);

fn mixed_components(s: Scenario, l: Level) -> (Mix2, Mix2) {
    let i = l.idx();
    match s {
        Scenario::MixedI => ((1.0, 0.0, 1.0, 0.0, 1.0), (0.5, 0.0, 1.0, MIXED_I_MU12[i], 5.0)),
        _ => ((0.5, 0.0, 1.0, 1.0, MIXED_II_S02[i]), (0.4, 0.0, 1.0, MIXED_II_MU12[i], 2.5)),
    }
}

/// Single normal with the displayed combined moments:
/// `N(w m1 + (1 - w) m2, w^2 s1^2 + (1 - w)^2 s2^2)`.
fn combined((w, m1, s1, m2, s2): Mix2) -> (f64, f64) {
    (w * m1 + (1.0 - w) * m2, (w * w * s1 * s1 + (1.0 - w) * (1.0 - w) * s2 * s2).sqrt())
}

fn mix_dist(c: Mix2, mode: MixedMode) -> Result<Dist> {
    if mode == MixedMode::TwoComponent && c.0 < 1.0 {
        let (w, m1, s1, m2, s2) = c;
        return Ok(Dist::Mixture(NormalMixture::new(vec![w, 1.0 - w], vec![m1, m2], vec![s1, s2])?));
    }
    let (m, s) = combined(c);
    Dist::normal(m, s)
}

fn draw_mix<R: Rng + ?Sized>(rng: &mut R, c: Mix2, mode: MixedMode) -> f64 {
    let (w, m1, s1, m2, s2) = c;
    if mode == MixedMode::TwoComponent && w < 1.0 {
        if rng.random::<f64>() < w {
            draw_normal(rng, m1, s1)
        } else {
            draw_normal(rng, m2, s2)
        }
    } else {
        let (m, s) = combined(c);
        draw_normal(rng, m, s)
    }
}

// Covariate mechanism constants.
const BN_COV: [f64; 6] = [1.0, 1.0, 1.0, 1.5, 2.0, 1.0]; // b00, b01, s0, b10, b11, s1
const SKEWED_COV: [f64; 5] = [2.0, 3.0, 0.1, 5.0, 9.0]; // k, b00, b01, b10, b11
const MIXED_COV: [f64; 8] = [0.0, 1.0, 1.0, 0.0, 1.0, 1.0, 5.0, 1.5]; // a00, a01, s0, a101, a111, a102, a112, s1
const MIXED_COV_PI: f64 = 0.5;

fn mixed_cov_mu1(x_first: f64, x_second: f64) -> f64 {
    let [_, _, _, a101, a111, a102, a112, _] = MIXED_COV;
    MIXED_COV_PI * (a101 + a111 * x_first) + (1.0 - MIXED_COV_PI) * (a102 + a112 * x_second)
}

/// Analytic healthy and diseased laws of a mechanism (at covariate `x` for
/// covariate mechanisms; both sub-means see the same `x`).
pub fn mechanism_laws(m: Mechanism, at_x: Option<f64>, opts: &SimOptions) -> Result<(Dist, Dist)> {
    if m.has_covariates() != at_x.is_some() {
        return Err(Error::UnsupportedQuery(if at_x.is_some() {
            format!("{m} has no covariate")
        } else {
            format!("{m} needs a covariate value")
        }));
    }
    let x = at_x.unwrap_or(0.0);
    if !x.is_finite() {
        return Err(invalid("covariate value must be finite"));
    }
    match m {
        Mechanism::Plain(s, l) => {
            let i = l.idx();
            match s {
                Scenario::BnEqual | Scenario::BnUnequal => {
                    let (m0, m1, s0, s1) = if s == Scenario::BnEqual { BN_EQUAL[i] } else { BN_UNEQUAL[i] };
                    Ok((Dist::normal(m0, s0)?, Dist::normal(m1, s1)?))
                }
                Scenario::SkewedI => {
                    let (m0, m1, s0, s1) = SKEWED_I[i];
                    Ok((Dist::signed_square_normal(m0, s0)?, Dist::signed_square_normal(m1, s1)?))
                }
                Scenario::SkewedII => {
                    let (m0, m1, s0, s1) = SKEWED_II[i];
                    Ok((Dist::lognormal(m0, s0)?, Dist::lognormal(m1, s1)?))
                }
                Scenario::SkewedIII => {
                    let (k, t0, t1) = SKEWED_III;
                    Ok((Dist::gamma(k, t0)?, Dist::gamma(k, t1[i])?))
                }
                Scenario::MixedI | Scenario::MixedII => {
                    let (c0, c1) = mixed_components(s, l);
                    Ok((mix_dist(c0, opts.mixed_mode)?, mix_dist(c1, opts.mixed_mode)?))
                }
            }
        }
        Mechanism::BnCov => {
            let [b00, b01, s0, b10, b11, s1] = BN_COV;
            Ok((Dist::normal(b00 + b01 * x, s0)?, Dist::normal(b10 + b11 * x, s1)?))
        }
        Mechanism::SkewedCov => {
            let [k, b00, b01, b10, b11] = SKEWED_COV;
            Ok((Dist::gamma(k, b00 + b01 * x)?, Dist::gamma(k, b10 + b11 * x)?))
        }
        Mechanism::MixedCov => {
            let [a00, a01, s0, .., s1] = MIXED_COV;
            Ok((Dist::normal(a00 + a01 * x, s0)?, Dist::normal(mixed_cov_mu1(x, x), s1)?))
        }
    }
}

/// Draws `n` healthy and `n` diseased subjects.
pub fn generate<R: Rng + ?Sized>(m: Mechanism, n: usize, rng: &mut R) -> Result<Sample> {
    generate_with(m, n, &SimOptions::default(), rng)
}

pub fn generate_with<R: Rng + ?Sized>(m: Mechanism, n: usize, opts: &SimOptions, rng: &mut R) -> Result<Sample> {
    if n < 3 {
        return Err(invalid(format!("sample size must be at least 3, got {n}")));
    }
    let mut group = |f: &mut dyn FnMut(&mut R) -> f64| (0..n).map(|_| f(rng)).collect::<Vec<f64>>();
    match m {
        Mechanism::Plain(s, l) => {
            let i = l.idx();
            let (y0, y1) = match s {
                Scenario::BnEqual | Scenario::BnUnequal => {
                    let (m0, m1, s0, s1) = if s == Scenario::BnEqual { BN_EQUAL[i] } else { BN_UNEQUAL[i] };
                    (group(&mut |r| draw_normal(r, m0, s0)), group(&mut |r| draw_normal(r, m1, s1)))
                }
                Scenario::SkewedI => {
                    let (m0, m1, s0, s1) = SKEWED_I[i];
                    let sq = |w: f64| w * w.abs();
                    (group(&mut |r| sq(draw_normal(r, m0, s0))), group(&mut |r| sq(draw_normal(r, m1, s1))))
                }
                Scenario::SkewedII => {
                    let (m0, m1, s0, s1) = SKEWED_II[i];
                    (group(&mut |r| draw_normal(r, m0, s0).exp()), group(&mut |r| draw_normal(r, m1, s1).exp()))
                }
                Scenario::SkewedIII => {
                    let (k, t0, t1) = SKEWED_III;
                    (group(&mut |r| draw_gamma(r, k, t0)), group(&mut |r| draw_gamma(r, k, t1[i])))
                }
                Scenario::MixedI | Scenario::MixedII => {
                    let (c0, c1) = mixed_components(s, l);
                    let mode = opts.mixed_mode;
                    (group(&mut |r| draw_mix(r, c0, mode)), group(&mut |r| draw_mix(r, c1, mode)))
                }
            };
            Ok(Sample::new(y0, y1))
        }
        _ => {
            let (lo, hi) = X_RANGE;
            let x0 = group(&mut |r| draw_uniform(r, lo, hi));
            let x1 = group(&mut |r| draw_uniform(r, lo, hi));
            let (y0, y1): (Vec<f64>, Vec<f64>) = match m {
                Mechanism::BnCov => {
                    let [b00, b01, s0, b10, b11, s1] = BN_COV;
                    (
                        x0.iter().map(|&x| draw_normal(rng, b00 + b01 * x, s0)).collect(),
                        x1.iter().map(|&x| draw_normal(rng, b10 + b11 * x, s1)).collect(),
                    )
                }
                Mechanism::SkewedCov => {
                    let [k, b00, b01, b10, b11] = SKEWED_COV;
                    (
                        x0.iter().map(|&x| draw_gamma(rng, k, b00 + b01 * x)).collect(),
                        x1.iter().map(|&x| draw_gamma(rng, k, b10 + b11 * x)).collect(),
                    )
                }
                _ => {
                    let [a00, a01, s0, .., s1] = MIXED_COV;
                    let y0 = x0.iter().map(|&x| draw_normal(rng, a00 + a01 * x, s0)).collect();
                    let y1 = (0..n)
                        .map(|i| {
                            let first = match opts.mixed_cov_covariate {
                                MixedCovCovariate::Healthy => x0[i],
                                MixedCovCovariate::Diseased => x1[i],
                            };
                            draw_normal(rng, mixed_cov_mu1(first, x1[i]), s1)
                        })
                        .collect();
                    (y0, y1)
                }
            };
            Ok(Sample::new(y0, y1).with_covariates(x0, x1))
        }
    }
}

/// True AUC and the four optimal cutoffs (J, ER, CZ, IU).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrueValues {
    pub auc: f64,
    pub cutoffs: [f64; 4],
}

impl TrueValues {
    pub fn cutoff(&self, c: Criterion) -> f64 {
        self.cutoffs[Criterion::ALL.iter().position(|&k| k == c).unwrap_or(0)]
    }
}

/// Probability mass left outside the cutoff search bracket.
pub const TRUTH_BRACKET_EPS: f64 = 1e-8;

pub fn true_values(m: Mechanism, at_x: Option<f64>) -> Result<TrueValues> {
    true_values_with(m, at_x, &SimOptions::default())
}

pub fn true_values_with(m: Mechanism, at_x: Option<f64>, opts: &SimOptions) -> Result<TrueValues> {
    let pair = true_pair(m, at_x, opts)?;
    let a = auc(&pair);
    let bracket = pair.mass_bracket(TRUTH_BRACKET_EPS);
    let r = optimize_all(&pair, &Criterion::ALL, bracket)?;
    Ok(TrueValues { auc: a, cutoffs: [r[0].c_star, r[1].c_star, r[2].c_star, r[3].c_star] })
}

pub fn true_pair(m: Mechanism, at_x: Option<f64>, opts: &SimOptions) -> Result<RocPair> {
    let (f0, f1) = mechanism_laws(m, at_x, opts)?;
    Ok(RocPair::general(f0, f1))
}
