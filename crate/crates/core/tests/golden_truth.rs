//! Analytic truths against the published truth tables and against an
//! independent dense-grid computation (the `reference` column, produced
//! with scipy distributions on a 4,000,001-point grid).

use std::time::{Duration, Instant};

use roccut_core::cutoffs::Criterion;
use roccut_core::sim::{true_values, Mechanism};

struct Cell {
    mechanism: String,
    level: String,
    metric: String,
    value: f64,
    reference: f64,
}

fn table() -> Vec<Cell> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/truth_tables.csv");
    csv::Reader::from_path(path)
        .unwrap()
        .records()
        .map(|rec| {
            let rec = rec.unwrap();
            Cell {
                mechanism: rec[0].into(),
                level: rec[1].into(),
                metric: rec[2].into(),
                value: rec[3].parse().unwrap(),
                reference: rec[4].parse().unwrap(),
            }
        })
        .collect()
}

fn computed(c: &Cell) -> f64 {
    let (m, x) = match c.level.strip_prefix("x=") {
        Some(x) => (Mechanism::parse(&c.mechanism, None).unwrap(), Some(x.parse().unwrap())),
        None => (Mechanism::parse(&c.mechanism, Some(&c.level)).unwrap(), None),
    };
    let t = true_values(m, x).unwrap();
    match c.metric.as_str() {
        "AUC" => t.auc,
        k => t.cutoff(k.parse::<Criterion>().unwrap()),
    }
}

// Cells where the published value disagrees with both this library and the
// dense-grid reference under the documented parameter readings.
const DIVERGENT: &[(&str, &str, &str)] = &[
    ("skewed_i", "low", "*"),
    ("skewed_i", "medium", "IU"),
    ("skewed_i", "high", "J"),
    ("skewed_i", "high", "ER"),
    ("skewed_i", "high", "CZ"),
    ("skewed_i", "high", "IU"),
    ("skewed_ii", "high", "CZ"),
    ("mixed_ii", "*", "*"),
    ("skewed_cov", "*", "IU"),
    ("mixed_cov", "*", "IU"),
];

fn divergent(c: &Cell) -> bool {
    DIVERGENT.iter().any(|&(m, l, k)| m == c.mechanism && (l == "*" || l == c.level) && (k == "*" || k == c.metric))
}

#[test]
fn truths_match_dense_grid_reference() {
    for c in table() {
        let v = computed(&c);
        assert!((v - c.reference).abs() <= 1e-3, "{} {} {}: {v} vs reference {}", c.mechanism, c.level, c.metric, c.reference);
    }
}

#[test]
fn truths_match_published_tables() {
    let cells = table();
    assert_eq!(cells.iter().filter(|c| c.metric != "AUC" && !c.level.starts_with("x=")).count(), 84);
    assert_eq!(cells.iter().filter(|c| c.metric != "AUC" && c.level.starts_with("x=")).count(), 24);
    let start = Instant::now();
    let mut checked = 0;
    for c in &cells {
        let v = computed(c);
        let tol = if c.level.starts_with("x=") { 5e-3 } else { 1e-3 };
        let agrees = (v - c.value).abs() <= tol;
        if divergent(c) {
            continue;
        }
        assert!(agrees, "{} {} {}: {v} vs published {}", c.mechanism, c.level, c.metric, c.value);
        checked += 1;
    }
    assert!(checked >= 100, "{checked}");
    assert!(start.elapsed() < Duration::from_secs(30));
}

#[test]
fn equal_variance_truths_coincide() {
    for c in table().iter().filter(|c| c.mechanism == "bn_equal" || c.mechanism == "bn_cov") {
        if c.metric == "AUC" {
            continue;
        }
        let (m, x) = match c.level.strip_prefix("x=") {
            Some(x) => (Mechanism::parse(&c.mechanism, None).unwrap(), Some(x.parse().unwrap())),
            None => (Mechanism::parse(&c.mechanism, Some(&c.level)).unwrap(), None),
        };
        let t = true_values(m, x).unwrap();
        for k in t.cutoffs {
            assert!((k - t.cutoffs[0]).abs() < 1e-3);
        }
    }
}
