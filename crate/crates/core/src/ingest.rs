//! Loading, validation, mean imputation and z-score standardization of the
//! regions × indicators table.
//!
//! The on-disk format is delimited text with a header row
//! `region,<indicator_1>,...,<indicator_p>` and one row per region. An empty
//! field or the literal `NA` marks a missing value.

use std::collections::HashSet;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Token written for, and recognised as, a missing cell.
pub const MISSING_TOKEN: &str = "NA";

/// Column delimiter of the input file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Delimiter {
    #[default]
    Comma,
    Semicolon,
}

impl Delimiter {
    fn byte(self) -> u8 {
        match self {
            Delimiter::Comma => b',',
            Delimiter::Semicolon => b';',
        }
    }
}

/// Parse options for [`load_table`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ParseOptions {
    pub delimiter: Delimiter,
    /// Accept `,` as the decimal separator (e.g. `1234,5`). Only sensible
    /// together with [`Delimiter::Semicolon`].
    pub decimal_comma: bool,
}

/// A rectangular regions × indicators table.
///
/// Values are stored row-major; `None` marks a missing entry.
#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorTable {
    region_labels: Vec<String>,
    indicator_labels: Vec<String>,
    values: Vec<Option<f64>>,
    standardized: bool,
}

fn check_unique(labels: &[String], kind: &'static str) -> Result<()> {
    let mut seen = HashSet::with_capacity(labels.len());
    for label in labels {
        if !seen.insert(label.as_str()) {
            return Err(Error::DuplicateLabel {
                kind,
                label: label.clone(),
            });
        }
    }
    Ok(())
}

impl IndicatorTable {
    /// Builds an unstandardized table from row vectors.
    pub fn new(
        region_labels: Vec<String>,
        indicator_labels: Vec<String>,
        rows: Vec<Vec<Option<f64>>>,
    ) -> Result<Self> {
        check_unique(&region_labels, "region")?;
        check_unique(&indicator_labels, "indicator")?;
        if region_labels.is_empty() || indicator_labels.is_empty() {
            return Err(Error::TooSmall(
                "table has no regions or no indicators".into(),
            ));
        }
        if rows.len() != region_labels.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} region labels but {} rows",
                region_labels.len(),
                rows.len()
            )));
        }
        let p = indicator_labels.len();
        let mut values = Vec::with_capacity(rows.len() * p);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != p {
                return Err(Error::DimensionMismatch(format!(
                    "row {} ({}) has {} values, expected {p}",
                    i,
                    region_labels[i],
                    row.len()
                )));
            }
            for (j, v) in row.iter().enumerate() {
                if let Some(x) = v {
                    if !x.is_finite() {
                        return Err(Error::NonFinite(format!(
                            "region {:?}, indicator {:?}",
                            region_labels[i], indicator_labels[j]
                        )));
                    }
                }
            }
            values.extend(row);
        }
        Ok(IndicatorTable {
            region_labels,
            indicator_labels,
            values,
            standardized: false,
        })
    }

    /// Builds a table with every entry present.
    pub fn from_dense(
        region_labels: Vec<String>,
        indicator_labels: Vec<String>,
        rows: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let rows = rows
            .into_iter()
            .map(|r| r.into_iter().map(Some).collect())
            .collect();
        Self::new(region_labels, indicator_labels, rows)
    }

    pub fn n_regions(&self) -> usize {
        self.region_labels.len()
    }

    pub fn n_indicators(&self) -> usize {
        self.indicator_labels.len()
    }

    pub fn region_labels(&self) -> &[String] {
        &self.region_labels
    }

    pub fn indicator_labels(&self) -> &[String] {
        &self.indicator_labels
    }

    pub fn is_standardized(&self) -> bool {
        self.standardized
    }

    pub fn get(&self, region: usize, indicator: usize) -> Option<f64> {
        self.values[region * self.n_indicators() + indicator]
    }

    pub fn missing_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_none()).count()
    }

    fn column_raw(&self, j: usize) -> impl Iterator<Item = Option<f64>> + '_ {
        let p = self.n_indicators();
        (0..self.n_regions()).map(move |i| self.values[i * p + j])
    }

    /// Column `j` as dense values; errors if any entry is missing.
    pub fn column(&self, j: usize) -> Result<Vec<f64>> {
        self.column_raw(j)
            .map(|v| v.ok_or_else(|| Error::MissingValues(self.indicator_labels[j].clone())))
            .collect()
    }

    /// Dense row-major copy of the values; errors if any entry is missing.
    pub fn dense_rows(&self) -> Result<Vec<Vec<f64>>> {
        let p = self.n_indicators();
        self.values
            .chunks(p)
            .map(|row| {
                row.iter()
                    .enumerate()
                    .map(|(j, v)| {
                        v.ok_or_else(|| Error::MissingValues(self.indicator_labels[j].clone()))
                    })
                    .collect()
            })
            .collect()
    }

    /// Serializes the table in the delimited input format. Values use the
    /// shortest representation that parses back to the identical `f64`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let csv_err = |e: csv::Error| Error::Csv(e.to_string());
        let mut header = vec!["region".to_string()];
        header.extend(self.indicator_labels.iter().cloned());
        w.write_record(&header).map_err(csv_err)?;
        for (i, label) in self.region_labels.iter().enumerate() {
            let mut record = vec![label.clone()];
            record.extend(self.column_indices().map(|j| match self.get(i, j) {
                Some(x) => format!("{x}"),
                None => MISSING_TOKEN.to_string(),
            }));
            w.write_record(&record).map_err(csv_err)?;
        }
        w.flush().map_err(|e| Error::Csv(e.to_string()))?;
        Ok(())
    }

    pub fn write_csv_file(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(std::io::BufWriter::new(file))
    }

    fn column_indices(&self) -> std::ops::Range<usize> {
        0..self.n_indicators()
    }
}

fn parse_cell(raw: &str, opts: &ParseOptions) -> std::result::Result<Option<f64>, ()> {
    let cell = raw.trim();
    if cell.is_empty() || cell == MISSING_TOKEN {
        return Ok(None);
    }
    let parsed = if opts.decimal_comma {
        cell.replace(',', ".").parse::<f64>()
    } else {
        cell.parse::<f64>()
    };
    match parsed {
        Ok(x) if x.is_finite() => Ok(Some(x)),
        _ => Err(()),
    }
}

/// Reads a table from any reader in the delimited format.
pub fn read_table<R: Read>(input: R, opts: &ParseOptions) -> Result<IndicatorTable> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(opts.delimiter.byte())
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(input);
    let csv_err = |e: csv::Error| Error::Csv(e.to_string());

    let header = reader.headers().map_err(csv_err)?.clone();
    let indicator_labels: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    if indicator_labels.len() < 2 {
        return Err(Error::TooSmall(format!(
            "need at least 2 indicator columns, found {}",
            indicator_labels.len()
        )));
    }
    check_unique(&indicator_labels, "indicator")?;

    let mut region_labels = Vec::new();
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(csv_err)?;
        let label = record.get(0).unwrap_or_default().to_string();
        let row = record
            .iter()
            .skip(1)
            .zip(&indicator_labels)
            .map(|(cell, indicator)| {
                parse_cell(cell, opts).map_err(|()| Error::NonNumeric {
                    row: i + 1,
                    indicator: indicator.clone(),
                    value: cell.to_string(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        region_labels.push(label);
        rows.push(row);
    }
    if rows.len() < 3 {
        return Err(Error::TooSmall(format!(
            "need at least 3 region rows, found {}",
            rows.len()
        )));
    }
    IndicatorTable::new(region_labels, indicator_labels, rows)
}

/// Loads an unstandardized table from a delimited text file.
pub fn load_table(path: &Path, opts: &ParseOptions) -> Result<IndicatorTable> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_table(std::io::BufReader::new(file), opts)
}

/// Replaces every missing entry with the mean of the present values in its column.
pub fn impute_means(table: &IndicatorTable) -> Result<IndicatorTable> {
    if table.standardized {
        return Err(Error::InvalidArgument(
            "imputation applies to unstandardized tables".into(),
        ));
    }
    let mut out = table.clone();
    let p = table.n_indicators();
    for j in 0..p {
        let present: Vec<f64> = table.column_raw(j).flatten().collect();
        if present.is_empty() {
            return Err(Error::AllMissingColumn(table.indicator_labels[j].clone()));
        }
        if present.len() == table.n_regions() {
            continue;
        }
        let mean = present.iter().sum::<f64>() / present.len() as f64;
        for i in 0..table.n_regions() {
            let cell = &mut out.values[i * p + j];
            if cell.is_none() {
                *cell = Some(mean);
            }
        }
    }
    Ok(out)
}

pub(crate) fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation (n − 1 divisor).
pub(crate) fn sample_sd(xs: &[f64], mean: f64) -> f64 {
    let ss: f64 = xs.iter().map(|x| (x - mean).powi(2)).sum();
    (ss / (xs.len() as f64 - 1.0)).sqrt()
}

/// Z-scores every column with the column mean and sample (n − 1) standard deviation.
pub fn standardize(table: &IndicatorTable) -> Result<IndicatorTable> {
    let n = table.n_regions();
    if n < 2 {
        return Err(Error::TooSmall(
            "standardization needs at least 2 regions".into(),
        ));
    }
    let p = table.n_indicators();
    let mut out = table.clone();
    for j in 0..p {
        let col = table.column(j)?;
        let m = mean(&col);
        let sd = sample_sd(&col, m);
        if sd == 0.0 || col.iter().all(|&x| x == col[0]) {
            return Err(Error::ZeroVariance(table.indicator_labels[j].clone()));
        }
        for (i, x) in col.iter().enumerate() {
            out.values[i * p + j] = Some((x - m) / sd);
        }
    }
    out.standardized = true;
    Ok(out)
}
