use roccut_core::sim::true_values_with;
use roccut_core::{Mechanism, SimOptions, TrueValues};
use serde::Serialize;

use crate::args::TruthArgs;
use crate::error::{CliError, CliResult};
use crate::simulate::mixed_mode;

#[derive(Debug, Clone, Serialize)]
pub struct TruthReport {
    pub mechanism: String,
    pub level: Option<String>,
    pub at: Option<f64>,
    pub auc: f64,
    #[serde(rename = "J")]
    pub j: f64,
    #[serde(rename = "ER")]
    pub er: f64,
    #[serde(rename = "CZ")]
    pub cz: f64,
    #[serde(rename = "IU")]
    pub iu: f64,
}

pub fn truth(a: &TruthArgs) -> CliResult<TruthReport> {
    let m = Mechanism::parse(&a.mechanism, a.level.as_deref()).map_err(|e| CliError::Usage(e.to_string()))?;
    match (m.has_covariates(), a.at) {
        (false, Some(_)) => return Err(CliError::Usage(format!("--at given for {m}, which has no covariate"))),
        (true, None) => return Err(CliError::Usage(format!("{m} needs --at"))),
        _ => {}
    }
    let opts = SimOptions { mixed_mode: mixed_mode(a.mixed_mode), ..SimOptions::default() };
    let TrueValues { auc, cutoffs: [j, er, cz, iu] } = true_values_with(m, a.at, &opts)?;
    Ok(TruthReport {
        mechanism: m.name().into(),
        level: m.level().map(|l| l.to_string()),
        at: a.at,
        auc,
        j,
        er,
        cz,
        iu,
    })
}

pub fn render(r: &TruthReport) -> String {
    let what = match (&r.level, r.at) {
        (Some(l), _) => format!("{} {l}", r.mechanism),
        (None, Some(x)) => format!("{} at x = {x}", r.mechanism),
        _ => r.mechanism.clone(),
    };
    format!(
        "{what}\nAUC  {:.3}\nJ    {:.3}\nER   {:.3}\nCZ   {:.3}\nIU   {:.3}\n",
        r.auc, r.j, r.er, r.cz, r.iu
    )
}
