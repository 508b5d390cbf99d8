use super::{FittedModel, ModelKind, Sample};
use crate::distributions::{Dist, EmpiricalCdf, KernelCdf};
use crate::error::Result;
use crate::roc::RocPair;

/// Pair of empirical CDFs. Accepts groups of any positive size so that small
/// bootstrap resamples can be refitted.
pub fn fit_empirical(s: &Sample) -> Result<FittedModel> {
    s.validate(1)?;
    s.reject_covariates(ModelKind::Empirical)?;
    let (y0, y1) = s.normalized();
    let pair = RocPair::general(
        Dist::Empirical(EmpiricalCdf::new(&y0)?),
        Dist::Empirical(EmpiricalCdf::new(&y1)?),
    )
    .with_orientation(s.orientation);
    Ok(FittedModel::frequentist(ModelKind::Empirical, s, pair))
}

/// Pair of Gaussian-kernel CDFs with per-group Silverman bandwidths.
pub fn fit_kernel(s: &Sample) -> Result<FittedModel> {
    s.validate(3)?;
    s.reject_covariates(ModelKind::Kernel)?;
    s.reject_constant_groups()?;
    let (y0, y1) = s.normalized();
    let pair = RocPair::general(
        Dist::Kernel(KernelCdf::silverman(&y0)?),
        Dist::Kernel(KernelCdf::silverman(&y1)?),
    )
    .with_orientation(s.orientation);
    Ok(FittedModel::frequentist(ModelKind::Kernel, s, pair))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{draw_normal, rng_stream};
    use crate::error::Error;
    use crate::roc::{auc, Orientation};

    fn normals(seed: u64, n: usize, mu: f64) -> Vec<f64> {
        let mut rng = rng_stream(seed, 0);
        (0..n).map(|_| draw_normal(&mut rng, mu, 1.0)).collect()
    }

    fn point_auc(m: &FittedModel) -> f64 {
        auc(&m.pair(None).unwrap())
    }

    #[test]
    fn empirical_extremes() {
        let s = Sample::new(vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]);
        assert_eq!(point_auc(&fit_empirical(&s).unwrap()), 1.0);
        let s = Sample::new(vec![1.0, 2.0, 3.0], vec![1.0, 2.0, 3.0]);
        assert_eq!(point_auc(&fit_empirical(&s).unwrap()), 0.5);
    }

    #[test]
    fn empirical_on_medium_binormal_data() {
        let s = Sample::new(normals(1, 100, 0.0), normals(2, 100, 1.0));
        assert!((point_auc(&fit_empirical(&s).unwrap()) - 0.760).abs() < 0.06);
    }

    #[test]
    fn covariates_rejected() {
        let s = Sample::new(vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]).with_covariates(vec![0.0; 3], vec![1.0; 3]);
        assert!(matches!(fit_empirical(&s), Err(Error::UnsupportedModel(_))));
        assert!(matches!(fit_kernel(&s), Err(Error::UnsupportedModel(_))));
    }

    #[test]
    fn kernel_monotone_in_shift() {
        let y0 = normals(3, 80, 0.0);
        let mut prev = 0.0;
        for d in [0.0, 0.5, 1.0] {
            let y1: Vec<f64> = y0.iter().map(|v| v + d).collect();
            let a = point_auc(&fit_kernel(&Sample::new(y0.clone(), y1)).unwrap());
            if d == 0.0 {
                assert!((a - 0.5).abs() < 1e-6);
            }
            assert!(a >= prev);
            prev = a;
        }
    }

    #[test]
    fn kernel_on_high_binormal_data() {
        let s = Sample::new(normals(4, 100, 0.0), normals(5, 100, 2.5));
        assert!((point_auc(&fit_kernel(&s).unwrap()) - 0.961).abs() < 0.03);
    }

    #[test]
    fn kernel_degenerate_group() {
        let s = Sample::new(vec![1.0; 5], vec![1.0, 2.0, 3.0]);
        assert!(matches!(fit_kernel(&s), Err(Error::DegenerateSample(_))));
    }

    #[test]
    fn lower_is_diseased_matches_negated_data() {
        let y0 = normals(6, 30, 1.0);
        let y1 = normals(7, 30, 0.0);
        let low = Sample::new(y0.clone(), y1.clone()).with_orientation(Orientation::LowerIsDiseased);
        let neg = Sample::new(y0.iter().map(|v| -v).collect(), y1.iter().map(|v| -v).collect());
        let a = point_auc(&fit_kernel(&low).unwrap());
        let b = point_auc(&fit_kernel(&neg).unwrap());
        assert!((a - b).abs() < 1e-12);
    }
}
