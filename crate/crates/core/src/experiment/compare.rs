//! Comparison of two scenario CSV files on a shared time grid.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use super::csv::CsvTable;
use crate::error::{Error, Result};

const GRID_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CompareMode {
    /// Sup-norm of `a - b`.
    MaxAbsDiff,
    /// Fraction of samples with `a > b`, plus the first local maximum of each.
    TransientDominance,
}

impl FromStr for CompareMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "max_abs_diff" => Ok(CompareMode::MaxAbsDiff),
            "transient_dominance" => Ok(CompareMode::TransientDominance),
            other => Err(Error::InvalidParameter(format!(
                "unknown compare mode {other:?}, expected max_abs_diff or transient_dominance"
            ))),
        }
    }
}

impl fmt::Display for CompareMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CompareMode::MaxAbsDiff => "max_abs_diff",
            CompareMode::TransientDominance => "transient_dominance",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Peak {
    pub t: f64,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompareReport {
    pub column: String,
    pub mode: CompareMode,
    pub window: Option<(f64, f64)>,
    /// Samples in the window where both files have a value.
    pub samples: usize,
    pub max_abs_diff: Option<f64>,
    /// Time of the largest difference.
    pub max_abs_diff_at: Option<f64>,
    pub fraction_a_greater: Option<f64>,
    pub first_peak_a: Option<Peak>,
    pub first_peak_b: Option<Peak>,
}

/// First sample that is `>=` its predecessor and `>` its successor.
pub fn first_peak(ts: &[f64], values: &[f64]) -> Option<Peak> {
    (1..values.len().saturating_sub(1))
        .find(|&i| values[i] >= values[i - 1] && values[i] > values[i + 1])
        .map(|i| Peak {
            t: ts[i],
            value: values[i],
        })
}

pub fn compare_runs(
    a: &Path,
    b: &Path,
    column: &str,
    mode: CompareMode,
    window: Option<(f64, f64)>,
) -> Result<CompareReport> {
    compare_tables(&CsvTable::read(a)?, &CsvTable::read(b)?, column, mode, window)
}

pub fn compare_tables(
    a: &CsvTable,
    b: &CsvTable,
    column: &str,
    mode: CompareMode,
    window: Option<(f64, f64)>,
) -> Result<CompareReport> {
    let ta = a.times()?;
    let tb = b.times()?;
    if ta.len() != tb.len() {
        return Err(Error::GridMismatch(format!("{} vs {} samples", ta.len(), tb.len())));
    }
    if let Some((x, y)) = ta.iter().zip(&tb).find(|(x, y)| (*x - *y).abs() > GRID_TOL * x.abs().max(1.0)) {
        return Err(Error::GridMismatch(format!("t = {x} vs t = {y}")));
    }
    if column == "t" {
        return Err(Error::InvalidParameter("compare a data column, not t".into()));
    }
    let missing = |side: &str| Error::InvalidParameter(format!("column {column:?} not found in file {side}"));
    let ca = a.column(column).ok_or_else(|| missing("a"))?;
    let cb = b.column(column).ok_or_else(|| missing("b"))?;
    if let Some((t0, t1)) = window {
        if !(t0 <= t1) {
            return Err(Error::InvalidParameter(format!("empty window [{t0}, {t1}]")));
        }
    }

    let inside = |t: f64| window.is_none_or(|(t0, t1)| t >= t0 - GRID_TOL && t <= t1 + GRID_TOL);
    let paired: Vec<(f64, f64, f64)> = ta
        .iter()
        .zip(ca.iter().zip(cb))
        .filter(|(t, _)| inside(**t))
        .filter_map(|(&t, (x, y))| Some((t, (*x)?, (*y)?)))
        .collect();

    let mut report = CompareReport {
        column: column.to_string(),
        mode,
        window,
        samples: paired.len(),
        max_abs_diff: None,
        max_abs_diff_at: None,
        fraction_a_greater: None,
        first_peak_a: None,
        first_peak_b: None,
    };
    match mode {
        CompareMode::MaxAbsDiff => {
            if let Some((t, d)) = paired
                .iter()
                .map(|(t, x, y)| (*t, (x - y).abs()))
                .max_by(|p, q| p.1.total_cmp(&q.1))
            {
                report.max_abs_diff = Some(d);
                report.max_abs_diff_at = Some(t);
            }
        }
        CompareMode::TransientDominance => {
            if !paired.is_empty() {
                let wins = paired.iter().filter(|(_, x, y)| x > y).count();
                report.fraction_a_greater = Some(wins as f64 / paired.len() as f64);
            }
            let peak = |pick: fn(&(f64, f64, f64)) -> f64| {
                let ts: Vec<f64> = paired.iter().map(|p| p.0).collect();
                let vs: Vec<f64> = paired.iter().map(pick).collect();
                first_peak(&ts, &vs)
            };
            report.first_peak_a = peak(|p| p.1);
            report.first_peak_b = peak(|p| p.2);
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(rows: &[(f64, f64)]) -> CsvTable {
        let mut text = String::from("t,ergotropy,ratio_R\n");
        for (t, e) in rows {
            text.push_str(&format!("{t},{e},\n"));
        }
        CsvTable::parse(&text).unwrap()
    }

    #[test]
    fn identical_tables_have_zero_difference() {
        let a = table(&[(0.0, 0.0), (0.1, 0.3), (0.2, 0.1)]);
        let r = compare_tables(&a, &a, "ergotropy", CompareMode::MaxAbsDiff, None).unwrap();
        assert_eq!(r.max_abs_diff, Some(0.0));
        assert_eq!(r.samples, 3);
    }

    #[test]
    fn dominance_and_peaks() {
        let a = table(&[(0.0, 0.0), (0.1, 0.5), (0.2, 0.2), (0.3, 0.6), (0.4, 0.1)]);
        let b = table(&[(0.0, 0.0), (0.1, 0.4), (0.2, 0.3), (0.3, 0.2), (0.4, 0.2)]);
        let r = compare_tables(&a, &b, "ergotropy", CompareMode::TransientDominance, None).unwrap();
        assert_eq!(r.fraction_a_greater, Some(0.4));
        assert_eq!(r.first_peak_a, Some(Peak { t: 0.1, value: 0.5 }));
        assert_eq!(r.first_peak_b, Some(Peak { t: 0.1, value: 0.4 }));

        let w = compare_tables(&a, &b, "ergotropy", CompareMode::TransientDominance, Some((0.2, 0.4))).unwrap();
        assert_eq!(w.samples, 3);
        assert_eq!(w.first_peak_a, Some(Peak { t: 0.3, value: 0.6 }));
        assert_eq!(w.first_peak_b, None);
    }

    #[test]
    fn max_difference_location() {
        let a = table(&[(0.0, 0.0), (0.1, 0.5), (0.2, 0.2)]);
        let b = table(&[(0.0, 0.0), (0.1, 0.4), (0.2, 0.5)]);
        let r = compare_tables(&a, &b, "ergotropy", CompareMode::MaxAbsDiff, None).unwrap();
        assert!((r.max_abs_diff.unwrap() - 0.3).abs() < 1e-15);
        assert_eq!(r.max_abs_diff_at, Some(0.2));
    }

    #[test]
    fn grid_mismatch() {
        let a = table(&[(0.0, 0.0), (0.1, 0.5)]);
        let b = table(&[(0.0, 0.0), (0.2, 0.5)]);
        let c = table(&[(0.0, 0.0)]);
        for other in [&b, &c] {
            assert!(matches!(
                compare_tables(&a, other, "ergotropy", CompareMode::MaxAbsDiff, None),
                Err(Error::GridMismatch(_))
            ));
        }
    }

    #[test]
    fn missing_values_are_skipped() {
        let a = table(&[(0.0, 0.0), (0.1, 0.5)]);
        let r = compare_tables(&a, &a, "ratio_R", CompareMode::MaxAbsDiff, None).unwrap();
        assert_eq!(r.samples, 0);
        assert_eq!(r.max_abs_diff, None);
        assert!(compare_tables(&a, &a, "nope", CompareMode::MaxAbsDiff, None).is_err());
    }

    #[test]
    fn parses_modes() {
        assert_eq!("max_abs_diff".parse::<CompareMode>().unwrap(), CompareMode::MaxAbsDiff);
        assert_eq!(
            "transient_dominance".parse::<CompareMode>().unwrap().to_string(),
            "transient_dominance"
        );
        assert!("other".parse::<CompareMode>().is_err());
    }
}
