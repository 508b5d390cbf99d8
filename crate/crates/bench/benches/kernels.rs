use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion as Bench};
use roccut_core::bayes::{gibbs_normal_regression, McmcConfig};
use roccut_core::cutoffs::{analytic_search_interval, optimize_all};
use roccut_core::distributions::{bvn_cdf, draw_normal, noncentral_chisq_cdf, rng_stream};
use roccut_core::models::fit_empirical;
use roccut_core::roc::{auc, delong_auc};
use roccut_core::{Criterion, RocPair, Sample};

fn normals(seed: u64, n: usize, mu: f64) -> Vec<f64> {
    let mut rng = rng_stream(seed, 0);
    (0..n).map(|_| draw_normal(&mut rng, mu, 1.0)).collect()
}

fn special(c: &mut Bench) {
    c.bench_function("bvn_cdf", |b| b.iter(|| bvn_cdf(black_box(0.3), black_box(-0.7), black_box(0.6))));
    c.bench_function("noncentral_chisq_cdf", |b| {
        b.iter(|| noncentral_chisq_cdf(black_box(7.5), black_box(1.0), black_box(4.2)))
    });
}

fn roc(c: &mut Bench) {
    let (y0, y1) = (normals(1, 500, 0.0), normals(2, 500, 1.0));
    c.bench_function("delong_auc_500", |b| b.iter(|| delong_auc(black_box(&y0), black_box(&y1))));
    let pair = RocPair::binormal(1.0, 0.5, 2.9, 1.2).unwrap();
    c.bench_function("auc_unequal_binormal", |b| b.iter(|| auc(black_box(&pair))));
}

fn cutoffs(c: &mut Bench) {
    let pair = RocPair::binormal(1.0, 0.5, 2.9, 1.2).unwrap();
    let search = analytic_search_interval(&pair, 1e-8);
    c.bench_function("optimize_all_binormal", |b| b.iter(|| optimize_all(black_box(&pair), &Criterion::ALL, search)));
    let emp = fit_empirical(&Sample::new(normals(3, 100, 0.0), normals(4, 100, 1.0))).unwrap().pair(None).unwrap();
    c.bench_function("optimize_all_empirical_100", |b| b.iter(|| optimize_all(black_box(&emp), &Criterion::ALL, search)));
}

fn gibbs(c: &mut Bench) {
    let y = normals(5, 100, 0.5);
    let cfg = McmcConfig { chains: 1, iterations: 1000, burn_in: 0, thin: 1, seed: 1 };
    c.bench_function("gibbs_normal_1000_sweeps", |b| b.iter(|| gibbs_normal_regression(black_box(&y), None, &cfg)));
}

criterion_group!(benches, special, roc, cutoffs, gibbs);
criterion_main!(benches);
