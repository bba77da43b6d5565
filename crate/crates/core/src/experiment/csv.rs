//! Output number formatting and a reader for the scenario CSV files.

use std::path::Path;

use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "t,W,ergotropy,stored_E,ratio_R,coherence_per_site";

/// Twelve significant digits, `%g` style: fixed notation for exponents in
/// `[-5, 12)`, scientific otherwise, trailing zeros dropped.
pub fn format_number(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let fixed = format!("{:.*}", (11 - exp) as usize, x);
        trim_zeros(&fixed).to_string()
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Column-oriented CSV contents; empty fields are `None`.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub columns: Vec<Vec<Option<f64>>>,
}

impl CsvTable {
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header: Vec<String> = lines
            .next()
            .ok_or_else(|| Error::Csv("empty file".into()))?
            .split(',')
            .map(|s| s.trim().to_string())
            .collect();
        let mut columns = vec![Vec::new(); header.len()];
        for (i, line) in lines.enumerate() {
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != header.len() {
                return Err(Error::Csv(format!(
                    "line {}: expected {} fields, found {}",
                    i + 2,
                    header.len(),
                    fields.len()
                )));
            }
            for (col, field) in columns.iter_mut().zip(fields) {
                let field = field.trim();
                col.push(if field.is_empty() {
                    None
                } else {
                    Some(field.parse().map_err(|_| {
                        Error::Csv(format!("line {}: {field:?} is not a number", i + 2))
                    })?)
                });
            }
        }
        Ok(Self { header, columns })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text).map_err(|e| match e {
            Error::Csv(msg) => Error::Csv(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn len(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn column(&self, name: &str) -> Option<&[Option<f64>]> {
        self.header
            .iter()
            .position(|h| h == name)
            .map(|i| self.columns[i].as_slice())
    }

    /// The time column with no missing entries.
    pub fn times(&self) -> Result<Vec<f64>> {
        self.column("t")
            .ok_or_else(|| Error::Csv("no t column".into()))?
            .iter()
            .map(|v| v.ok_or_else(|| Error::Csv("missing time value".into())))
            .collect()
    }
}
