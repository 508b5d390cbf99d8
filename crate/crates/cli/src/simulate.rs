use roccut_core::sim::{study_mcmc, MixedCovCovariate, MixedMode, SCENARIO_NAMES};
use roccut_core::{Level, Mechanism, ModelKind, SimOptions, SimStudySpec};

use crate::args::{MixedCovArg, MixedModeArg, Preset, SimulateArgs};
use crate::error::{CliError, CliResult};
use crate::{apply_mcmc, criteria_from, model_from};

/// Matches the default `--seed`.
pub const ACCEPTANCE_SEED: u64 = 20240601;

/// Mechanisms, models and scale of the desk-scale acceptance study.
pub fn acceptance_spec() -> SimStudySpec {
    use roccut_core::sim::Scenario::*;
    SimStudySpec::desk(
        vec![
            Mechanism::Plain(BnEqual, Level::Medium),
            Mechanism::Plain(BnUnequal, Level::Medium),
            Mechanism::Plain(MixedII, Level::Medium),
        ],
        vec![ModelKind::Empirical, ModelKind::Binormal],
        ACCEPTANCE_SEED,
    )
}

pub fn mixed_mode(a: MixedModeArg) -> MixedMode {
    match a {
        MixedModeArg::Literal => MixedMode::Literal,
        MixedModeArg::TwoComponent => MixedMode::TwoComponent,
    }
}

/// Builds the study from flags; explicit flags override the preset.
pub fn build_spec(a: &SimulateArgs) -> CliResult<SimStudySpec> {
    let mut spec = match a.preset {
        Some(Preset::Acceptance) => acceptance_spec(),
        Some(Preset::Full) => SimStudySpec::full(all_mechanisms(), ModelKind::ALL.to_vec(), a.seed),
        Some(Preset::Desk) | None => SimStudySpec::desk(Vec::new(), Vec::new(), a.seed),
    };
    spec.seed = a.seed;
    if !a.mechanisms.is_empty() {
        spec.mechanisms = mechanisms_from(&a.mechanisms, &a.levels)?;
    } else if !a.levels.is_empty() {
        return Err(CliError::Usage("--level needs --mechanism".into()));
    }
    if spec.mechanisms.is_empty() {
        return Err(CliError::Usage(format!(
            "at least one --mechanism is required; valid names: {}",
            SCENARIO_NAMES.join(", ")
        )));
    }
    if !a.models.is_empty() {
        spec.models = a.models.iter().map(|&m| model_from(m)).collect();
    }
    if spec.models.is_empty() {
        return Err(CliError::Usage("at least one --models value is required".into()));
    }
    if !a.sizes.is_empty() {
        spec.sizes = a.sizes.clone();
    }
    if let Some(r) = a.replicates {
        spec.replicates = r;
    }
    spec.criteria = criteria_from(&a.criteria);
    if !a.at.is_empty() {
        spec.at_x = a.at.clone();
    }
    spec.mcmc = apply_mcmc(study_mcmc(), &a.mcmc);
    spec.options = SimOptions {
        mixed_mode: mixed_mode(a.mixed_mode),
        mixed_cov_covariate: match a.mixed_cov_covariate {
            MixedCovArg::Healthy => MixedCovCovariate::Healthy,
            MixedCovArg::Diseased => MixedCovCovariate::Diseased,
        },
    };
    spec.validate()?;
    Ok(spec)
}

fn all_mechanisms() -> Vec<Mechanism> {
    let mut v = Mechanism::all_plain();
    v.extend([Mechanism::BnCov, Mechanism::SkewedCov, Mechanism::MixedCov]);
    v
}

fn mechanisms_from(names: &[String], levels: &[String]) -> CliResult<Vec<Mechanism>> {
    let levels: Vec<Level> = if levels.is_empty() {
        Level::ALL.to_vec()
    } else {
        levels.iter().map(|l| l.parse().map_err(|e: roccut_core::Error| CliError::Usage(e.to_string()))).collect::<CliResult<_>>()?
    };
    let mut out = Vec::new();
    for n in names {
        let probe = Mechanism::parse(n, Some("low")).or_else(|_| Mechanism::parse(n, None));
        match probe {
            Ok(m) if m.has_covariates() => out.push(m),
            Ok(_) => {
                for l in &levels {
                    out.push(Mechanism::parse(n, Some(l.name())).map_err(|e| CliError::Usage(e.to_string()))?);
                }
            }
            Err(e) => return Err(CliError::Usage(e.to_string())),
        }
    }
    Ok(out)
}
