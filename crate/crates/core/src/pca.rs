//! Correlation-matrix principal components: variance accounting, component
//! selection, coefficients, loadings and scores.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::ingest::IndicatorTable;
use crate::linalg::{
    correlation_matrix, jacobi_eigen, EigenDecomposition, Matrix, DEFAULT_JACOBI_TOL,
};

/// Rule deciding how many components to retain.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum SelectionRule {
    /// Eigenvalues strictly greater than 1, with a floor of one component.
    #[default]
    Kaiser,
    Fixed(usize),
    /// Smallest k whose cumulative variance percent reaches the threshold.
    CumulativeThreshold(f64),
}

impl FromStr for SelectionRule {
    type Err = Error;

    /// Accepts `kaiser`, `fixed:<k>` and `cumulative:<percent>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidArgument(format!("unknown component rule {s:?}"));
        if s.eq_ignore_ascii_case("kaiser") {
            return Ok(SelectionRule::Kaiser);
        }
        let (kind, arg) = s.split_once(':').ok_or_else(bad)?;
        match kind.trim() {
            "fixed" => arg
                .trim()
                .parse()
                .map(SelectionRule::Fixed)
                .map_err(|_| bad()),
            "cumulative" => match arg.trim().parse::<f64>() {
                Ok(t) if t.is_finite() => Ok(SelectionRule::CumulativeThreshold(t)),
                _ => Err(bad()),
            },
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for SelectionRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SelectionRule::Kaiser => write!(f, "kaiser"),
            SelectionRule::Fixed(k) => write!(f, "fixed:{k}"),
            SelectionRule::CumulativeThreshold(t) => write!(f, "cumulative:{t}"),
        }
    }
}

/// Fitted principal-components model.
#[derive(Debug, Clone)]
pub struct PcaModel {
    eigen: EigenDecomposition,
    indicator_labels: Vec<String>,
    variance_percent: Vec<f64>,
    cumulative_percent: Vec<f64>,
    retained: Option<usize>,
    component_labels: Vec<String>,
}

/// Variance share of each eigenvalue, λ/p·100, and its running sum.
pub fn variance_percentages(eigenvalues: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let p = eigenvalues.len() as f64;
    let variance: Vec<f64> = eigenvalues.iter().map(|l| l / p * 100.0).collect();
    let cumulative = variance
        .iter()
        .scan(0.0, |acc, v| {
            *acc += v;
            Some(*acc)
        })
        .collect();
    (variance, cumulative)
}

/// Fits the model on a standardized table with more regions than indicators.
pub fn fit_pca(table: &IndicatorTable) -> Result<PcaModel> {
    if !table.is_standardized() {
        return Err(Error::NotStandardized);
    }
    if table.n_regions() <= table.n_indicators() {
        return Err(Error::TooSmall(format!(
            "PCA needs more regions than indicators (n={}, p={})",
            table.n_regions(),
            table.n_indicators()
        )));
    }
    let corr = correlation_matrix(table)?;
    let eigen = jacobi_eigen(&corr, DEFAULT_JACOBI_TOL)?;
    PcaModel::from_decomposition(eigen, table.indicator_labels().to_vec())
}

/// `f1`, `f2`, … column labels.
pub fn component_names(k: usize) -> Vec<String> {
    (1..=k).map(|j| format!("f{j}")).collect()
}

impl PcaModel {
    /// Wraps an existing decomposition of a p×p correlation matrix.
    pub fn from_decomposition(
        eigen: EigenDecomposition,
        indicator_labels: Vec<String>,
    ) -> Result<Self> {
        let p = eigen.order();
        if p == 0 || indicator_labels.len() != p || eigen.eigenvectors.rows() != p {
            return Err(Error::DimensionMismatch(format!(
                "{} labels for a decomposition of order {p}",
                indicator_labels.len()
            )));
        }
        let (variance_percent, cumulative_percent) = variance_percentages(&eigen.eigenvalues);
        Ok(PcaModel {
            eigen,
            indicator_labels,
            variance_percent,
            cumulative_percent,
            retained: None,
            component_labels: Vec::new(),
        })
    }

    pub fn eigen(&self) -> &EigenDecomposition {
        &self.eigen
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigen.eigenvalues
    }

    pub fn n_variables(&self) -> usize {
        self.eigen.order()
    }

    pub fn indicator_labels(&self) -> &[String] {
        &self.indicator_labels
    }

    pub fn variance_percent(&self) -> &[f64] {
        &self.variance_percent
    }

    pub fn cumulative_percent(&self) -> &[f64] {
        &self.cumulative_percent
    }

    pub fn retained(&self) -> Option<usize> {
        self.retained
    }

    /// Analyst-supplied interpretation labels; never inferred.
    pub fn component_labels(&self) -> &[String] {
        &self.component_labels
    }

    pub fn set_component_labels(&mut self, labels: Vec<String>) {
        self.component_labels = labels;
    }

    /// Number of components the rule retains. Does not modify the model.
    pub fn select_components(&self, rule: SelectionRule) -> usize {
        let p = self.n_variables();
        match rule {
            SelectionRule::Kaiser => self
                .eigenvalues()
                .iter()
                .filter(|&&l| l > 1.0)
                .count()
                .max(1),
            SelectionRule::Fixed(k) => k.clamp(1, p),
            SelectionRule::CumulativeThreshold(t) => self
                .cumulative_percent
                .iter()
                .position(|&c| c >= t)
                .map_or(p, |i| i + 1),
        }
    }

    pub fn set_retained(&mut self, k: usize) -> Result<()> {
        if k == 0 || k > self.n_variables() {
            return Err(Error::InvalidArgument(format!(
                "retained components must be in 1..={}, got {k}",
                self.n_variables()
            )));
        }
        self.retained = Some(k);
        Ok(())
    }

    /// Applies the rule and records the resulting k.
    pub fn retain(&mut self, rule: SelectionRule) -> usize {
        let k = self.select_components(rule);
        self.retained = Some(k);
        k
    }

    fn k(&self) -> Result<usize> {
        self.retained.ok_or(Error::ComponentsNotSelected)
    }

    /// Unit-eigenvector coefficients of the first `k` components.
    pub fn coefficients(&self) -> Result<LoadingMatrix> {
        Ok(self.coefficients_for(self.k()?))
    }

    /// Correlation loadings (coefficients × √λ) of the first `k` components.
    pub fn loadings(&self) -> Result<LoadingMatrix> {
        Ok(self.loadings_for(self.k()?))
    }

    /// Factor scores of the retained components.
    pub fn scores(&self, table: &IndicatorTable) -> Result<ScoreMatrix> {
        self.scores_for(table, self.k()?)
    }

    pub fn coefficients_for(&self, k: usize) -> LoadingMatrix {
        let k = k.min(self.n_variables());
        LoadingMatrix {
            kind: LoadingKind::Coefficients,
            entries: self.eigen.eigenvectors.leading_columns(k),
            row_labels: self.indicator_labels.clone(),
            column_labels: component_names(k),
        }
    }

    pub fn loadings_for(&self, k: usize) -> LoadingMatrix {
        let mut m = self.coefficients_for(k);
        for j in 0..m.entries.cols() {
            let scale = self.eigenvalues()[j].max(0.0).sqrt();
            for i in 0..m.entries.rows() {
                m.entries[(i, j)] *= scale;
            }
        }
        m.kind = LoadingKind::Loadings;
        m
    }

    /// Standardized data × first `k` coefficient columns.
    pub fn scores_for(&self, table: &IndicatorTable, k: usize) -> Result<ScoreMatrix> {
        if !table.is_standardized() {
            return Err(Error::NotStandardized);
        }
        if table.n_indicators() != self.n_variables() {
            return Err(Error::DimensionMismatch(format!(
                "model has {} variables, table has {}",
                self.n_variables(),
                table.n_indicators()
            )));
        }
        let data = Matrix::from_rows(&table.dense_rows()?)?;
        let coef = self.coefficients_for(k);
        Ok(ScoreMatrix {
            entries: data.matmul(&coef.entries)?,
            row_labels: table.region_labels().to_vec(),
            column_labels: coef.column_labels,
        })
    }

    /// Variance table as delimited text:
    /// `dimension,eigenvalue,variance_percent,cumulative_percent`.
    pub fn variance_table_csv(&self) -> String {
        let mut out = String::from("dimension,eigenvalue,variance_percent,cumulative_percent\n");
        for (i, l) in self.eigenvalues().iter().enumerate() {
            out.push_str(&format!(
                "Dim.{},{},{},{}\n",
                i + 1,
                l,
                self.variance_percent[i],
                self.cumulative_percent[i]
            ));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoadingKind {
    /// Unit eigenvector entries.
    Coefficients,
    /// Variable–component correlations.
    Loadings,
}

/// p × k matrix of coefficients or loadings.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadingMatrix {
    pub kind: LoadingKind,
    pub entries: Matrix,
    pub row_labels: Vec<String>,
    pub column_labels: Vec<String>,
}

/// n × k matrix of factor scores.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreMatrix {
    pub entries: Matrix,
    pub row_labels: Vec<String>,
    pub column_labels: Vec<String>,
}

pub(crate) fn labelled_matrix_csv(
    corner: &str,
    m: &Matrix,
    rows: &[String],
    cols: &[String],
) -> String {
    let mut out = String::from(corner);
    for c in cols {
        out.push(',');
        out.push_str(c);
    }
    out.push('\n');
    for (i, label) in rows.iter().enumerate() {
        out.push_str(&crate::report::csv_field(label));
        for x in m.row(i) {
            out.push_str(&format!(",{x}"));
        }
        out.push('\n');
    }
    out
}

impl LoadingMatrix {
    pub fn to_csv(&self) -> String {
        labelled_matrix_csv(
            "indicator",
            &self.entries,
            &self.row_labels,
            &self.column_labels,
        )
    }
}

impl ScoreMatrix {
    pub fn to_csv(&self) -> String {
        labelled_matrix_csv(
            "region",
            &self.entries,
            &self.row_labels,
            &self.column_labels,
        )
    }

    /// Scores as an unstandardized table (regions × components).
    pub fn to_table(&self) -> Result<IndicatorTable> {
        let rows = (0..self.entries.rows())
            .map(|i| self.entries.row(i).to_vec())
            .collect();
        IndicatorTable::from_dense(self.row_labels.clone(), self.column_labels.clone(), rows)
    }
}
