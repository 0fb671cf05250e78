//! Raw monthly panel: series names, values with missing markers, transform
//! codes and economic group labels.

use std::fmt;
use std::path::Path;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::data::Month;
use crate::error::{Error, Result};

/// The eight FRED-MD economic groups.
#[derive(Copy, Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Group {
    OutputIncome,
    LaborMarket,
    Housing,
    Consumption,
    MoneyCredit,
    InterestExchange,
    Prices,
    StockMarket,
}

impl Group {
    pub const ALL: [Group; 8] = [
        Group::OutputIncome,
        Group::LaborMarket,
        Group::Housing,
        Group::Consumption,
        Group::MoneyCredit,
        Group::InterestExchange,
        Group::Prices,
        Group::StockMarket,
    ];

    pub fn parse(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        Ok(match key.as_str() {
            "outputincome" | "outputandincome" | "output" => Group::OutputIncome,
            "labormarket" | "labourmarket" | "labor" => Group::LaborMarket,
            "housing" => Group::Housing,
            "consumption" | "consumptionordersandinventories" => Group::Consumption,
            "moneycredit" | "moneyandcredit" => Group::MoneyCredit,
            "interestexchange" | "interestandexchangerates" | "interestratesandexchangerates" => {
                Group::InterestExchange
            }
            "prices" => Group::Prices,
            "stockmarket" => Group::StockMarket,
            _ => return Err(Error::validation(format!("unknown group label `{s}`"))),
        })
    }

    pub fn label(self) -> &'static str {
        match self {
            Group::OutputIncome => "output_income",
            Group::LaborMarket => "labor_market",
            Group::Housing => "housing",
            Group::Consumption => "consumption",
            Group::MoneyCredit => "money_credit",
            Group::InterestExchange => "interest_exchange",
            Group::Prices => "prices",
            Group::StockMarket => "stock_market",
        }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// A raw monthly panel as read from disk. Missing cells are `NaN`.
#[derive(Clone, Debug)]
pub struct RawSeriesTable {
    pub dates: Vec<Month>,
    pub names: Vec<String>,
    /// T x N values, `NaN` marking missing observations.
    pub values: Array2<f64>,
    /// FRED-MD transform code per series, in `1..=7`.
    pub tcodes: Vec<u8>,
    pub groups: Vec<Group>,
}

impl RawSeriesTable {
    pub fn new(
        dates: Vec<Month>,
        names: Vec<String>,
        values: Array2<f64>,
        tcodes: Vec<u8>,
        groups: Vec<Group>,
    ) -> Result<Self> {
        let table = RawSeriesTable {
            dates,
            names,
            values,
            tcodes,
            groups,
        };
        table.validate()?;
        Ok(table)
    }

    pub fn n_rows(&self) -> usize {
        self.values.nrows()
    }

    pub fn n_series(&self) -> usize {
        self.values.ncols()
    }

    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::validation(format!("unknown series `{name}`")))
    }

    fn validate(&self) -> Result<()> {
        let (t, n) = (self.values.nrows(), self.values.ncols());
        if self.dates.len() != t {
            return Err(Error::shape(format!(
                "{} dates for {} value rows",
                self.dates.len(),
                t
            )));
        }
        if self.names.len() != n || self.tcodes.len() != n || self.groups.len() != n {
            return Err(Error::shape(format!(
                "names/tcodes/groups lengths ({}, {}, {}) do not match {} columns",
                self.names.len(),
                self.tcodes.len(),
                self.groups.len(),
                n
            )));
        }
        for w in self.dates.windows(2) {
            if w[1].months_since(w[0]) != 1 {
                return Err(Error::validation(format!(
                    "dates must be consecutive months: gap between {} and {}",
                    w[0], w[1]
                )));
            }
        }
        for (name, &code) in self.names.iter().zip(&self.tcodes) {
            if !(1..=7).contains(&code) {
                return Err(Error::validation(format!(
                    "series `{name}` has tcode {code}, expected 1..=7"
                )));
            }
        }
        Ok(())
    }
}

/// Column-name -> metadata supplied alongside the CSV (groups, and tcodes when
/// the file has no transform row).
#[derive(Clone, Debug, Default)]
pub struct TableMeta {
    pub groups: std::collections::HashMap<String, Group>,
    pub default_group: Option<Group>,
    pub tcodes: std::collections::HashMap<String, u8>,
}

impl TableMeta {
    fn group_for(&self, name: &str) -> Result<Group> {
        self.groups
            .get(name)
            .copied()
            .or(self.default_group)
            .ok_or_else(|| {
                Error::validation(format!(
                    "series `{name}` has no group mapping and no default group is configured"
                ))
            })
    }
}

fn parse_cell(raw: &str, row: usize, column: &str) -> Result<f64> {
    let s = raw.trim();
    if s.is_empty() || s.eq_ignore_ascii_case("na") || s.eq_ignore_ascii_case("nan") {
        return Ok(f64::NAN);
    }
    s.parse::<f64>().map_err(|_| Error::Parse {
        row,
        column: column.to_string(),
        message: format!("`{s}` is not a number"),
    })
}

/// Detects the FRED-MD transform row: first cell starts with "transform", or
/// every cell is an integer in 1..=7.
fn looks_like_tcode_row(record: &csv::StringRecord) -> bool {
    let first = record.get(0).unwrap_or("").trim().to_ascii_lowercase();
    if first.starts_with("transform") {
        return true;
    }
    if Month::parse(&first).is_ok() {
        return false;
    }
    record.iter().skip(1).all(|c| {
        c.trim()
            .parse::<f64>()
            .map(|v| v.fract() == 0.0 && (1.0..=7.0).contains(&v))
            .unwrap_or(false)
    })
}

/// Loads a FRED-MD-style CSV: a header of series names (first column is the
/// date), an optional second row of transform codes, then one row per month.
pub fn load_table(path: &Path, meta: &TableMeta) -> Result<RawSeriesTable> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)?;
    let headers = reader.headers()?.clone();
    if headers.len() < 2 {
        return Err(Error::validation(
            "CSV needs a date column plus at least one series".to_string(),
        ));
    }
    let names: Vec<String> = headers.iter().skip(1).map(str::to_string).collect();
    let n = names.len();

    let mut tcodes: Option<Vec<u8>> = None;
    let mut dates = Vec::new();
    let mut rows: Vec<Vec<f64>> = Vec::new();

    for (idx, record) in reader.records().enumerate() {
        let record = record?;
        // `idx + 2` = 1-based file line (header is line 1).
        let line = idx + 2;
        if record.iter().all(|c| c.trim().is_empty()) {
            continue;
        }
        if dates.is_empty() && tcodes.is_none() && looks_like_tcode_row(&record) {
            let mut codes = Vec::with_capacity(n);
            for (j, cell) in record.iter().skip(1).enumerate() {
                let v = parse_cell(cell, line, &names[j])?;
                codes.push(v as u8);
            }
            if codes.len() != n {
                return Err(Error::Parse {
                    row: line,
                    column: String::new(),
                    message: format!("transform row has {} codes for {} series", codes.len(), n),
                });
            }
            tcodes = Some(codes);
            continue;
        }
        let date_cell = record.get(0).unwrap_or("");
        let date = Month::parse(date_cell).map_err(|_| Error::Parse {
            row: line,
            column: headers.get(0).unwrap_or("date").to_string(),
            message: format!("`{date_cell}` is not a month"),
        })?;
        if record.len() != n + 1 {
            return Err(Error::Parse {
                row: line,
                column: String::new(),
                message: format!("expected {} cells, found {}", n + 1, record.len()),
            });
        }
        let mut row = Vec::with_capacity(n);
        for (j, cell) in record.iter().skip(1).enumerate() {
            row.push(parse_cell(cell, line, &names[j])?);
        }
        dates.push(date);
        rows.push(row);
    }

    if rows.is_empty() {
        return Err(Error::validation("CSV contains no data rows".to_string()));
    }

    let tcodes = match tcodes {
        Some(codes) => codes,
        None => names
            .iter()
            .map(|name| {
                meta.tcodes.get(name).copied().ok_or_else(|| {
                    Error::validation(format!(
                        "no transform row in CSV and no tcode configured for `{name}`"
                    ))
                })
            })
            .collect::<Result<Vec<u8>>>()?,
    };

    let groups = names
        .iter()
        .map(|name| meta.group_for(name))
        .collect::<Result<Vec<Group>>>()?;

    let mut values = Array2::zeros((rows.len(), n));
    for (i, row) in rows.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            values[[i, j]] = v;
        }
    }

    RawSeriesTable::new(dates, names, values, tcodes, groups)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn meta_all(group: Group) -> TableMeta {
        TableMeta {
            default_group: Some(group),
            ..TableMeta::default()
        }
    }

    fn write_csv(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn toy_csv_with_missing_cell_round_trips() {
        let f = write_csv(
            "date,a,b,c\nTransform:,1,2,5\n1/1/2000,1.0,2.0,3.0\n2/1/2000,1.5,,3.5\n3/1/2000,2.0,2.2,4.0\n",
        );
        let t = load_table(f.path(), &meta_all(Group::Prices)).unwrap();
        assert_eq!(t.n_series(), 3);
        assert_eq!(t.n_rows(), 3);
        assert_eq!(t.tcodes, vec![1, 2, 5]);
        let missing = t.values.iter().filter(|v| v.is_nan()).count();
        assert_eq!(missing, 1);
        assert!(t.values[[1, 1]].is_nan());
        assert_eq!(t.values[[2, 2]], 4.0);
    }

    #[test]
    fn date_gap_is_rejected() {
        let f = write_csv("date,a\nTransform:,1\n1/1/2000,1.0\n3/1/2000,2.0\n");
        let err = load_table(f.path(), &meta_all(Group::Prices)).unwrap_err();
        assert!(err.to_string().contains("consecutive"), "{err}");
    }

    #[test]
    fn sidecar_tcodes_used_when_no_transform_row() {
        let f = write_csv("date,a\n1/1/2000,1.0\n2/1/2000,2.0\n");
        let mut meta = meta_all(Group::Housing);
        meta.tcodes.insert("a".to_string(), 5);
        let t = load_table(f.path(), &meta).unwrap();
        assert_eq!(t.tcodes, vec![5]);
        // Without the sidecar code the load must fail.
        let err = load_table(f.path(), &meta_all(Group::Housing)).unwrap_err();
        assert!(err.to_string().contains("tcode"), "{err}");
    }

    #[test]
    fn unknown_tcode_is_rejected() {
        let f = write_csv("date,a\nTransform:,9\n1/1/2000,1.0\n2/1/2000,2.0\n");
        let err = load_table(f.path(), &meta_all(Group::Prices)).unwrap_err();
        assert!(err.to_string().contains("tcode 9"), "{err}");
    }

    #[test]
    fn malformed_cell_names_row_and_column() {
        let f = write_csv("date,a,b\nTransform:,1,1\n1/1/2000,1.0,2.0\n2/1/2000,oops,2.0\n");
        let err = load_table(f.path(), &meta_all(Group::Prices)).unwrap_err();
        match err {
            Error::Parse { row, column, .. } => {
                assert_eq!(row, 4);
                assert_eq!(column, "a");
            }
            other => panic!("expected parse error, got {other}"),
        }
    }

    #[test]
    fn group_labels_parse_loosely() {
        assert_eq!(Group::parse("Output and Income").unwrap(), Group::OutputIncome);
        assert_eq!(Group::parse("money_credit").unwrap(), Group::MoneyCredit);
        assert!(Group::parse("weather").is_err());
    }
}
