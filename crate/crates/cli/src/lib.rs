//! Library side of the `roccut` command: argument types, CSV ingest and the
//! three subcommands.

pub mod analyze;
pub mod args;
pub mod data;
pub mod error;
pub mod simulate;
pub mod truth;

use std::io::Write;

use roccut_core::{Criterion, McmcConfig, ModelKind};

use args::{AnalyzeArgs, Cli, Command, CriterionArg, McmcArgs, ModelArg, SimulateArgs, TruthArgs};
use error::CliResult;

pub fn model_from(m: ModelArg) -> ModelKind {
    match m {
        ModelArg::Emp => ModelKind::Empirical,
        ModelArg::Bn => ModelKind::Binormal,
        ModelArg::Nonpar => ModelKind::Kernel,
        ModelArg::Bigamma => ModelKind::Bigamma,
        ModelArg::Pv => ModelKind::PvParametric,
        ModelArg::Semipv => ModelKind::PvSemiparametric,
    }
}

/// Expands `all` and removes duplicates, keeping J, ER, CZ, IU order.
pub fn criteria_from(args: &[CriterionArg]) -> Vec<Criterion> {
    Criterion::ALL
        .into_iter()
        .filter(|c| {
            args.iter().any(|a| match a {
                CriterionArg::All => true,
                CriterionArg::J => *c == Criterion::J,
                CriterionArg::Er => *c == Criterion::Er,
                CriterionArg::Cz => *c == Criterion::Cz,
                CriterionArg::Iu => *c == Criterion::Iu,
            })
        })
        .collect()
}

pub fn apply_mcmc(mut cfg: McmcConfig, a: &McmcArgs) -> McmcConfig {
    if let Some(v) = a.chains {
        cfg.chains = v;
    }
    if let Some(v) = a.iters {
        cfg.iterations = v;
    }
    if let Some(v) = a.burnin {
        cfg.burn_in = v;
    }
    if let Some(v) = a.thin {
        cfg.thin = v;
    }
    cfg
}

pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<()> {
    match cli.command {
        Command::Analyze(a) => cmd_analyze(&a, out, err),
        Command::Simulate(a) => cmd_simulate(&a, out),
        Command::Truth(a) => cmd_truth(&a, out),
    }
}

fn cmd_analyze(a: &AnalyzeArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<()> {
    let mut dedup: Vec<ModelKind> = Vec::new();
    for k in a.models.iter().map(|&m| model_from(m)) {
        if !dedup.contains(&k) {
            dedup.push(k);
        }
    }
    let cfg = analyze::AnalysisConfig {
        columns: data::Columns { value: a.value.clone(), group: a.group.clone(), covariate: a.covariate.clone() },
        direction: a.direction,
        models: dedup,
        criteria: criteria_from(&a.criteria),
        at_x: a.at.clone(),
        mcmc: apply_mcmc(McmcConfig { seed: a.seed, ..McmcConfig::default() }, &a.mcmc),
        bootstrap: a.bootstrap,
        seed: a.seed,
    };
    cfg.validate()?;
    let sample = data::read_sample_file(&a.input, &cfg.columns)?;
    let res = analyze::run_analysis(&sample, &cfg)?;
    if res.report.flipped {
        writeln!(err, "note: DeLong AUC {:.3} < 0.5; lower values treated as diseased", res.report.raw_auc)?;
    }
    for d in res.report.diagnostics.iter().filter(|d| d.convergence_warning) {
        writeln!(err, "warning: {} chains may not have converged (R-hat {:.3})", d.model, d.rhat.unwrap_or(f64::NAN))?;
    }
    match &a.out {
        Some(p) => analyze::write_table_csv(std::fs::File::create(p)?, &res.report)?,
        None => analyze::write_table_csv(&mut *out, &res.report)?,
    }
    if let Some(p) = &a.json {
        serde_json::to_writer_pretty(std::fs::File::create(p)?, &res.report)?;
    }
    if let Some(p) = &a.dump_draws {
        for path in analyze::dump_draws(p, &res.fits)? {
            writeln!(err, "draws written to {}", path.display())?;
        }
    }
    Ok(())
}

fn cmd_simulate(a: &SimulateArgs, out: &mut dyn Write) -> CliResult<()> {
    let spec = simulate::build_spec(a)?;
    let result = roccut_core::sim::run_study(&spec)?;
    match &a.out {
        Some(p) => result.write_csv(std::fs::File::create(p)?)?,
        None => result.write_csv(&mut *out)?,
    }
    if let Some(p) = &a.json {
        result.write_json(std::io::BufWriter::new(std::fs::File::create(p)?))?;
    }
    Ok(())
}

fn cmd_truth(a: &TruthArgs, out: &mut dyn Write) -> CliResult<()> {
    let r = truth::truth(a)?;
    if a.json {
        serde_json::to_writer_pretty(&mut *out, &r)?;
        writeln!(out)?;
    } else {
        write!(out, "{}", truth::render(&r))?;
    }
    Ok(())
}
