use serde::{Deserialize, Serialize};

use crate::distributions::special::{bvn_cdf, std_normal_cdf, std_normal_sf};
use crate::distributions::bisect_increasing;
use crate::error::{invalid, Error, Result};

/// Bichi-squared parameters obtained from binormal `(a, b)`:
/// `lambda = 1 / b^2`, `theta = a^2 b^2 / (1 - b^2)^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BichisqParams {
    pub lambda: f64,
    pub theta: f64,
}

impl BichisqParams {
    pub fn from_ab(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && b > 0.0) {
            return Err(invalid(format!("binormal parameters need finite a and b > 0, got ({a}, {b})")));
        }
        if (b - 1.0).abs() <= 1e-6 {
            return Err(Error::NearSingular(format!("b = {b} is too close to 1; use the binormal curve")));
        }
        let b2 = b * b;
        Ok(Self { lambda: 1.0 / b2, theta: a * a * b2 / ((1.0 - b2) * (1.0 - b2)) })
    }
}

// One degree of freedom: X = (Z + sqrt(ncp))^2, so both tails have
// closed forms in the normal CDF.
fn ncx2_cdf(x: f64, ncp: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let (r, m) = (x.sqrt(), ncp.sqrt());
    (std_normal_cdf(r - m) - std_normal_cdf(-r - m)).clamp(0.0, 1.0)
}

fn ncx2_sf(x: f64, ncp: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    let (r, m) = (x.sqrt(), ncp.sqrt());
    (std_normal_sf(r - m) + std_normal_sf(r + m)).clamp(0.0, 1.0)
}

fn upper_bracket(ncp: f64, done: impl Fn(f64) -> bool) -> f64 {
    let mut hi = 1.0 + ncp;
    while !done(hi) && hi < 1e300 {
        hi *= 2.0;
    }
    hi
}

fn ncx2_quantile(p: f64, ncp: f64) -> f64 {
    let hi = upper_bracket(ncp, |x| ncx2_cdf(x, ncp) >= p);
    bisect_increasing(|x| ncx2_cdf(x, ncp), p, 0.0, hi)
}

/// Solves `sf(x) = q`, keeping relative accuracy for tiny `q`.
fn ncx2_isf(q: f64, ncp: f64) -> f64 {
    let hi = upper_bracket(ncp, |x| ncx2_sf(x, ncp) <= q);
    bisect_increasing(|x| -ncx2_sf(x, ncp), -q, 0.0, hi)
}

/// ROC value at `t`, clamped to [0, 1]. For `lambda > 1` this is
/// `1 - F_{lambda theta}(F_theta^{-1}(1 - t) / lambda)`; for `lambda < 1`,
/// `F_{lambda theta}(F_theta^{-1}(t) / lambda)`. `F_nu` is the noncentral
/// chi-squared CDF with one degree of freedom.
pub fn bichisq_roc(p: &BichisqParams, t: f64) -> Result<f64> {
    if !(t > 0.0 && t < 1.0) {
        return Err(invalid(format!("ROC abscissa must lie in (0, 1), got {t}")));
    }
    check(p)?;
    let BichisqParams { lambda, theta } = *p;
    let v = if lambda > 1.0 {
        ncx2_sf(ncx2_isf(t, theta) / lambda, lambda * theta)
    } else {
        ncx2_cdf(ncx2_quantile(t, theta) / lambda, lambda * theta)
    };
    Ok(v.clamp(0.0, 1.0))
}

/// Closed-form AUC `Phi(s) + 2 F_BVN(-s, 0; -2 sqrt(lambda) / (lambda + 1))`
/// with `s = sqrt(theta) (lambda - 1) / sqrt(lambda + 1)`. The `lambda < 1`
/// branch swaps the roles of the two laws, which maps `(lambda, theta)` to
/// `(1 / lambda, lambda theta)`.
pub fn bichisq_auc(p: &BichisqParams) -> Result<f64> {
    check(p)?;
    let (lambda, theta) = if p.lambda > 1.0 { (p.lambda, p.theta) } else { (1.0 / p.lambda, p.lambda * p.theta) };
    let s = theta.sqrt() * (lambda - 1.0) / (lambda + 1.0).sqrt();
    let rho = -2.0 * lambda.sqrt() / (lambda + 1.0);
    Ok((std_normal_cdf(s) + 2.0 * bvn_cdf(-s, 0.0, rho)?).clamp(0.0, 1.0))
}

fn check(p: &BichisqParams) -> Result<()> {
    if !(p.lambda > 0.0 && p.lambda.is_finite() && p.theta >= 0.0 && p.theta.is_finite()) {
        return Err(invalid(format!("invalid bichi-squared parameters {p:?}")));
    }
    if (p.lambda - 1.0).abs() <= 1e-12 {
        return Err(Error::NearSingular("lambda = 1".into()));
    }
    Ok(())
}
