use super::ContinuousDist;
use crate::error::{Error, Result};

const MAX_ITER: usize = 200;

/// Solves `cdf(x) = p` by bisection inside `bracket`.
///
/// Fails with [`Error::BracketViolation`] when `p` is not attained on the
/// bracket.
pub fn invert_cdf<D: ContinuousDist + ?Sized>(d: &D, p: f64, bracket: (f64, f64)) -> Result<f64> {
    let (lo, hi) = bracket;
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) || !(0.0..=1.0).contains(&p) {
        return Err(crate::error::invalid(format!("invalid bracket [{lo}, {hi}] or probability {p}")));
    }
    let (flo, fhi) = (d.cdf(lo), d.cdf(hi));
    if p < flo || p > fhi {
        return Err(Error::BracketViolation { p, lo: flo, hi: fhi });
    }
    Ok(bisect_increasing(|x| d.cdf(x), p, lo, hi))
}

/// Smallest `x` in `[lo, hi]` (to bisection precision) with `f(x) >= target`
/// for nondecreasing `f`.
pub(crate) fn bisect_increasing(f: impl Fn(f64) -> f64, target: f64, mut lo: f64, mut hi: f64) -> f64 {
    if f(lo) >= target {
        return lo;
    }
    for _ in 0..MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) >= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Quantile with an expanding bracket seeded by `[lo, hi]`.
pub(crate) fn quantile_by_bisection<D: ContinuousDist + ?Sized>(d: &D, p: f64, lo: f64, hi: f64) -> f64 {
    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    let (lo, hi) = expand(|x| d.cdf(x) >= p, |x| d.cdf(x) < p, lo, hi);
    bisect_increasing(|x| d.cdf(x), p, lo, hi)
}

/// Inverse survival function by bisection on `sf`, which keeps relative
/// accuracy for tiny upper-tail probabilities.
pub(crate) fn upper_quantile_by_bisection<D: ContinuousDist + ?Sized>(d: &D, p: f64, lo: f64, hi: f64) -> f64 {
    if p <= 0.0 {
        return f64::INFINITY;
    }
    if p >= 1.0 {
        return f64::NEG_INFINITY;
    }
    let (lo, hi) = expand(|x| d.sf(x) <= p, |x| d.sf(x) > p, lo, hi);
    bisect_increasing(|x| -d.sf(x), -p, lo, hi)
}

fn expand(hi_ok: impl Fn(f64) -> bool, lo_ok: impl Fn(f64) -> bool, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let mut width = (hi - lo).abs().max(1.0);
    for _ in 0..200 {
        if lo_ok(lo) {
            break;
        }
        lo -= width;
        width *= 2.0;
    }
    let mut width = (hi - lo).abs().max(1.0);
    for _ in 0..200 {
        if hi_ok(hi) {
            break;
        }
        hi += width;
        width *= 2.0;
    }
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{Dist, KernelCdf};

    #[test]
    fn inverts_standard_normal() {
        let d = Dist::normal(0.0, 1.0).unwrap();
        let x = invert_cdf(&d, 0.5, (-10.0, 10.0)).unwrap();
        assert!(x.abs() < 1e-9);
    }

    #[test]
    fn inverts_symmetric_kernel() {
        let d = KernelCdf::silverman(&[-1.0, 0.0, 1.0]).unwrap();
        let x = invert_cdf(&d, 0.5, (-20.0, 20.0)).unwrap();
        assert!(x.abs() < 1e-6);
    }

    #[test]
    fn inverts_gamma() {
        let d = Dist::gamma(2.0, 3.0).unwrap();
        let x = invert_cdf(&d, 0.7, (0.0, 100.0)).unwrap();
        assert!((d.cdf(x) - 0.7).abs() < 1e-9);
    }

    #[test]
    fn rejects_unreachable_probability() {
        let d = Dist::normal(0.0, 1.0).unwrap();
        assert!(matches!(invert_cdf(&d, 0.99, (-1.0, 1.0)), Err(Error::BracketViolation { .. })));
    }
}
