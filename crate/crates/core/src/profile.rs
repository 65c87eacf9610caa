//! Per-cluster descriptive statistics on original units.

use crate::error::{Error, Result};
use crate::hclust::Partition;
use crate::ingest::{mean, IndicatorTable};
use crate::report::{format_fixed, format_significant};

/// Column header of a rendered profile table.
pub const PROFILE_HEADER: [&str; 5] = [
    "Average",
    "Standard deviation",
    "Skewness",
    "kurtosis",
    "To country average, %",
];

const UNDEFINED: &str = "n/a";

#[derive(Debug, Clone, PartialEq)]
pub struct ProfileRow {
    pub cluster: usize,
    pub indicator: String,
    pub size: usize,
    pub average: f64,
    /// Sample (n − 1) standard deviation; 0 for single-region clusters.
    pub standard_deviation: f64,
    /// Bias-adjusted G1; needs size ≥ 3 and sd > 0.
    pub skewness: Option<f64>,
    /// Bias-adjusted excess G2; needs size ≥ 4 and sd > 0.
    pub kurtosis: Option<f64>,
    /// None when the grand mean is numerically zero.
    pub to_country_average_percent: Option<f64>,
}

/// Descriptive moments of one sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub mean: f64,
    pub sd: f64,
    pub skewness: Option<f64>,
    pub kurtosis: Option<f64>,
}

/// Mean, sample sd, adjusted Fisher–Pearson skewness and adjusted excess kurtosis.
pub fn moments(xs: &[f64]) -> Moments {
    assert!(!xs.is_empty(), "moments of an empty sample");
    let n = xs.len();
    let m = mean(xs);
    let constant = xs.iter().all(|&x| x == xs[0]);
    if n < 2 || constant {
        return Moments {
            mean: if constant { xs[0] } else { m },
            sd: 0.0,
            skewness: None,
            kurtosis: None,
        };
    }
    let nf = n as f64;
    let dev: Vec<f64> = xs.iter().map(|x| x - m).collect();
    let m2 = dev.iter().map(|d| d * d).sum::<f64>() / nf;
    let m3 = dev.iter().map(|d| d.powi(3)).sum::<f64>() / nf;
    let s2 = m2 * nf / (nf - 1.0);
    let sd = s2.sqrt();

    let skewness = (n >= 3).then(|| {
        let g1 = m3 / m2.powf(1.5);
        g1 * (nf * (nf - 1.0)).sqrt() / (nf - 2.0)
    });
    let kurtosis = (n >= 4).then(|| {
        let sum4: f64 = dev.iter().map(|d| (d * d / s2).powi(2)).sum();
        nf * (nf + 1.0) / ((nf - 1.0) * (nf - 2.0) * (nf - 3.0)) * sum4
            - 3.0 * (nf - 1.0).powi(2) / ((nf - 2.0) * (nf - 3.0))
    });
    Moments {
        mean: m,
        sd,
        skewness,
        kurtosis,
    }
}

/// Percent deviation of a cluster mean from the grand mean.
pub fn to_country_average_percent(cluster_mean: f64, grand_mean: f64, scale: f64) -> Option<f64> {
    if grand_mean == 0.0 || grand_mean.abs() <= 1e-12 * scale {
        None
    } else {
        Some((cluster_mean / grand_mean - 1.0) * 100.0)
    }
}

/// Profiles every (cluster, indicator) pair, ordered by cluster then indicator.
pub fn profile(table: &IndicatorTable, part: &Partition) -> Result<Vec<ProfileRow>> {
    if part.len() != table.n_regions() {
        return Err(Error::DimensionMismatch(format!(
            "partition covers {} items, table has {} regions",
            part.len(),
            table.n_regions()
        )));
    }
    let columns = (0..table.n_indicators())
        .map(|j| table.column(j))
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::with_capacity(part.k() * columns.len());
    for cluster in 1..=part.k() {
        let members = part.members(cluster);
        if members.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "cluster {cluster} is empty"
            )));
        }
        for (j, col) in columns.iter().enumerate() {
            let grand = mean(col);
            let scale = col.iter().map(|x| x.abs()).sum::<f64>() / col.len() as f64;
            let sample: Vec<f64> = members.iter().map(|&i| col[i]).collect();
            let mo = moments(&sample);
            rows.push(ProfileRow {
                cluster,
                indicator: table.indicator_labels()[j].clone(),
                size: members.len(),
                average: mo.mean,
                standard_deviation: mo.sd,
                skewness: mo.skewness,
                kurtosis: mo.kurtosis,
                to_country_average_percent: to_country_average_percent(mo.mean, grand, scale),
            });
        }
    }
    Ok(rows)
}

fn percent_cell(p: Option<f64>) -> String {
    match p {
        Some(p) => format!("{}%", format_fixed(p, 0)),
        None => UNDEFINED.to_string(),
    }
}

fn moment_cell(m: Option<f64>) -> String {
    m.map_or_else(|| UNDEFINED.to_string(), |x| format_fixed(x, 2))
}

/// Tab-separated rendering of one cluster's rows.
///
/// Averages and standard deviations carry 7 significant digits, moments two
/// decimals and the percent column a whole number with a `%` suffix. Trailing
/// zeros are trimmed.
pub fn format_profile_table(rows: &[ProfileRow], cluster: usize) -> String {
    let mut out = String::from("Indicator");
    for h in PROFILE_HEADER {
        out.push('\t');
        out.push_str(h);
    }
    out.push('\n');
    for r in rows.iter().filter(|r| r.cluster == cluster) {
        let cells = [
            r.indicator.clone(),
            format_significant(r.average, 7),
            format_significant(r.standard_deviation, 7),
            moment_cell(r.skewness),
            moment_cell(r.kurtosis),
            percent_cell(r.to_country_average_percent),
        ];
        out.push_str(&cells.join("\t"));
        out.push('\n');
    }
    out
}
