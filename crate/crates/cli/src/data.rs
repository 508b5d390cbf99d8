use std::io::{Read, Write};
use std::path::Path;

use roccut_core::Sample;

use crate::error::{CliError, CliResult};

/// Column mapping for biomarker input.
#[derive(Debug, Clone)]
pub struct Columns {
    pub value: String,
    pub group: String,
    pub covariate: Option<String>,
}

impl Default for Columns {
    fn default() -> Self {
        Self { value: "value".into(), group: "group".into(), covariate: None }
    }
}

pub fn read_sample_file(path: &Path, cols: &Columns) -> CliResult<Sample> {
    let f = std::fs::File::open(path).map_err(|e| CliError::Data(format!("cannot open {}: {e}", path.display())))?;
    read_sample(f, cols)
}

/// Reads a header-first CSV. Rows are numbered from 1 for the first data
/// row; errors name the row and column.
pub fn read_sample<R: Read>(input: R, cols: &Columns) -> CliResult<Sample> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let headers = r.headers()?.clone();
    let find = |name: &str| {
        headers.iter().position(|h| h == name).ok_or_else(|| {
            CliError::Data(format!("missing column '{name}' (found: {})", headers.iter().collect::<Vec<_>>().join(", ")))
        })
    };
    let vi = find(&cols.value)?;
    let gi = find(&cols.group)?;
    let xi = cols.covariate.as_deref().map(find).transpose()?;
    let mut s = Sample::default();
    let (mut x0, mut x1) = (Vec::new(), Vec::new());
    for (i, rec) in r.records().enumerate() {
        let row = i + 1;
        let rec = rec?;
        let field = |j: usize, name: &str| -> CliResult<f64> {
            let raw = rec.get(j).unwrap_or("");
            raw.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| CliError::Data(format!("row {row}, column '{name}': '{raw}' is not a finite number")))
        };
        let y = field(vi, &cols.value)?;
        let g = match rec.get(gi).unwrap_or("") {
            "0" => 0,
            "1" => 1,
            other => {
                return Err(CliError::Data(format!(
                    "row {row}, column '{}': group must be 0 or 1, got '{other}'",
                    cols.group
                )))
            }
        };
        let x = xi.map(|j| field(j, cols.covariate.as_deref().unwrap_or_default())).transpose()?;
        if g == 0 {
            s.y0.push(y);
            x0.extend(x);
        } else {
            s.y1.push(y);
            x1.extend(x);
        }
    }
    if xi.is_some() {
        s = s.with_covariates(x0, x1);
    }
    Ok(s)
}

/// Writes a sample in the input layout (`value,group[,covariate]`).
pub fn write_sample<W: Write>(w: W, s: &Sample) -> CliResult<()> {
    let mut out = csv::Writer::from_writer(w);
    let cov = s.has_covariates();
    if cov {
        out.write_record(["value", "group", "covariate"])?;
    } else {
        out.write_record(["value", "group"])?;
    }
    for (g, (ys, xs)) in [(&s.y0, &s.x0), (&s.y1, &s.x1)].into_iter().enumerate() {
        for (i, y) in ys.iter().enumerate() {
            let mut rec = vec![format!("{y:?}"), g.to_string()];
            if let Some(xs) = xs {
                rec.push(format!("{:?}", xs[i]));
            }
            out.write_record(&rec)?;
        }
    }
    out.flush()?;
    Ok(())
}
