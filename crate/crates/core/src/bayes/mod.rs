//! Gibbs samplers, chain bookkeeping, convergence diagnostics and posterior
//! summaries.

mod conjugate;
mod diagnostics;
mod dpm;

pub use conjugate::{
    draw_coefficients, draw_variance, gibbs_normal_regression, RegressionState, SuffStats, PRIOR_IG_SHAPE,
    PRIOR_IG_SCALE, PRIOR_VAR,
};
pub use diagnostics::{gelman_rubin, gelman_rubin_traces, summarize, summarize_functional, Summary};
pub use dpm::{gibbs_dpm_location, gibbs_dpm_regression, DpmState};

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::{rng_stream, stream_id, StreamRng};
use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct McmcConfig {
    pub chains: usize,
    pub iterations: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub seed: u64,
}

impl Default for McmcConfig {
    /// Two chains of 6000 iterations, 1000 burn-in, thinned by 2: 5000
    /// retained draws in total.
    fn default() -> Self {
        Self { chains: 2, iterations: 6000, burn_in: 1000, thin: 2, seed: 20240601 }
    }
}

impl McmcConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Config for an independent sub-problem, e.g. one group of a fit.
    pub fn derive(&self, tag: u64) -> Self {
        Self { seed: stream_id(&[self.seed, tag]), ..*self }
    }

    pub fn retained_per_chain(&self) -> usize {
        (self.iterations - self.burn_in) / self.thin
    }

    pub fn retained(&self) -> usize {
        self.chains * self.retained_per_chain()
    }

    pub fn validate(&self) -> Result<()> {
        if self.chains == 0 || self.thin == 0 {
            return Err(invalid("chains and thin must be at least 1"));
        }
        if self.burn_in >= self.iterations {
            return Err(invalid(format!(
                "burn-in ({}) must be smaller than iterations ({})",
                self.burn_in, self.iterations
            )));
        }
        if self.retained_per_chain() == 0 {
            return Err(invalid("configuration retains no draws"));
        }
        Ok(())
    }

    pub(crate) fn chain_rng(&self, chain: usize) -> StreamRng {
        rng_stream(self.seed, chain as u64)
    }
}

/// Retained draws: `draws[chain][draw][param]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Chains {
    pub names: Vec<String>,
    pub draws: Vec<Vec<Vec<f64>>>,
}

impl Chains {
    pub fn n_chains(&self) -> usize {
        self.draws.len()
    }

    pub fn per_chain(&self) -> usize {
        self.draws.first().map_or(0, Vec::len)
    }

    pub fn len(&self) -> usize {
        self.draws.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// All retained draws, chains concatenated in order.
    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.draws.iter().flat_map(|c| c.iter().map(Vec::as_slice))
    }

    /// One parameter's trace per chain.
    pub fn traces(&self, param: usize) -> Vec<Vec<f64>> {
        self.draws.iter().map(|c| c.iter().map(|d| d[param]).collect()).collect()
    }

    /// One parameter across all chains.
    pub fn column(&self, param: usize) -> Vec<f64> {
        self.iter().map(|d| d[param]).collect()
    }

    pub fn mean(&self, param: usize) -> f64 {
        crate::stats::mean(&self.column(param))
    }

    /// Writes one CSV row per retained draw with `chain` and `draw` columns.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        write!(w, "chain,draw")?;
        for n in &self.names {
            write!(w, ",{n}")?;
        }
        writeln!(w)?;
        for (ci, chain) in self.draws.iter().enumerate() {
            for (di, d) in chain.iter().enumerate() {
                write!(w, "{},{}", ci + 1, di + 1)?;
                for v in d {
                    write!(w, ",{v}")?;
                }
                writeln!(w)?;
            }
        }
        Ok(())
    }
}

/// Runs `cfg.chains` independent chains in parallel. `init` builds a chain's
/// state, `step` performs one full sweep and `record` extracts the retained
/// parameter vector.
pub fn run_chains<S, I, F, R>(cfg: &McmcConfig, names: Vec<String>, init: I, step: F, record: R) -> Result<Chains>
where
    S: Send,
    I: Fn(usize, &mut StreamRng) -> S + Sync,
    F: Fn(&mut S, &mut StreamRng) + Sync,
    R: Fn(&S) -> Vec<f64> + Sync,
{
    cfg.validate()?;
    let draws: Vec<Vec<Vec<f64>>> = (0..cfg.chains)
        .into_par_iter()
        .map(|ci| {
            let mut rng = cfg.chain_rng(ci);
            let mut state = init(ci, &mut rng);
            let mut out = Vec::with_capacity(cfg.retained_per_chain());
            for it in 0..cfg.iterations {
                step(&mut state, &mut rng);
                if it >= cfg.burn_in && (it - cfg.burn_in + 1).is_multiple_of(cfg.thin) {
                    out.push(record(&state));
                }
            }
            out.truncate(cfg.retained_per_chain());
            out
        })
        .collect();
    Ok(Chains { names, draws })
}

/// Sorts `(y, x)` rows into a canonical order so that fits do not depend on
/// input order.
pub(crate) fn canonical_rows(y: &[f64], x: Option<&[f64]>) -> (Vec<f64>, Option<Vec<f64>>) {
    let mut idx: Vec<usize> = (0..y.len()).collect();
    idx.sort_by(|&a, &b| {
        y[a].total_cmp(&y[b]).then_with(|| match x {
            Some(x) => x[a].total_cmp(&x[b]),
            None => std::cmp::Ordering::Equal,
        })
    });
    let ys = idx.iter().map(|&i| y[i]).collect();
    let xs = x.map(|x| idx.iter().map(|&i| x[i]).collect());
    (ys, xs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_retains_5000() {
        let c = McmcConfig::default();
        c.validate().unwrap();
        assert_eq!(c.retained(), 5000);
    }

    #[test]
    fn invalid_configs() {
        let mut c = McmcConfig::default();
        c.burn_in = c.iterations;
        assert!(c.validate().is_err());
        let c = McmcConfig { chains: 0, ..McmcConfig::default() };
        assert!(c.validate().is_err());
    }

    #[test]
    fn csv_dump_has_header_and_rows() {
        let ch = Chains { names: vec!["a".into(), "b".into()], draws: vec![vec![vec![1.0, 2.0]], vec![vec![3.0, 4.0]]] };
        let mut buf = Vec::new();
        ch.write_csv(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert_eq!(s, "chain,draw,a,b\n1,1,1,2\n2,1,3,4\n");
    }
}
