//! End-to-end run: ingest, PCA, clustering in raw and component space,
//! concordance, cluster profiles and figures, with a checksummed manifest.

use std::fmt::Write as _;

use log::info;

use crate::concordance::contingency;
use crate::config::{ClusterSpace, InputMode, PipelineConfig, ScoreColumns};
use crate::error::Error;
use crate::hclust::{
    cluster_variables, complete_linkage, euclidean_distances, Dendrogram, Partition,
};
use crate::ingest::{impute_means, load_table, standardize, IndicatorTable};
use crate::linalg::Matrix;
use crate::pca::{component_names, fit_pca, PcaModel};
use crate::plot::{emit_plots, PlotInputs};
use crate::profile::{format_profile_table, profile};
use crate::report::{csv_field, ArtifactWriter, Manifest};
use crate::synthetic::generate_synthetic;

/// An error tagged with the pipeline stage that raised it.
#[derive(Debug, thiserror::Error)]
#[error("{stage} stage failed: {source}")]
pub struct PipelineError {
    pub stage: &'static str,
    #[source]
    pub source: Error,
}

impl PipelineError {
    pub fn exit_code(&self) -> i32 {
        self.source.exit_code()
    }
}

trait StageExt<T> {
    fn stage(self, stage: &'static str) -> Result<T, PipelineError>;
}

impl<T> StageExt<T> for Result<T, Error> {
    fn stage(self, stage: &'static str) -> Result<T, PipelineError> {
        self.map_err(|source| PipelineError { stage, source })
    }
}

/// Results of a run besides the files on disk.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub manifest: Manifest,
    pub n_regions: usize,
    pub n_indicators: usize,
    pub retained: usize,
    pub eigenvalues: Vec<f64>,
    pub raw_partition: Option<Partition>,
    pub component_partition: Option<Partition>,
    pub variable_partition: Partition,
    /// Planted labels in synthetic mode.
    pub truth: Option<Partition>,
    pub rand_raw_components: Option<f64>,
    pub ari_raw_components: Option<f64>,
    pub ari_raw_truth: Option<f64>,
    pub ari_components_truth: Option<f64>,
}

fn cluster_rows(points: &Matrix, labels: &[String]) -> Result<Dendrogram, Error> {
    Ok(complete_linkage(&euclidean_distances(
        points,
        labels.to_vec(),
    )?))
}

fn write_profiles(
    out: &mut ArtifactWriter,
    prefix: &str,
    table: &IndicatorTable,
    part: &Partition,
) -> Result<(), Error> {
    let rows = profile(table, part)?;
    for c in 1..=part.k() {
        out.write(
            &format!("profiles/{prefix}{c}.tsv"),
            &format_profile_table(&rows, c),
        )?;
    }
    Ok(())
}

fn model_component_labels(model: &PcaModel, k: usize) -> String {
    let mut out = String::from("component,label\n");
    for (j, name) in component_names(k).iter().enumerate() {
        let label = model.component_labels().get(j).map_or("", String::as_str);
        let _ = writeln!(out, "{name},{}", csv_field(label));
    }
    out
}

/// Runs the whole analysis and writes every artifact under `config.output`.
pub fn run_pipeline(config: &PipelineConfig) -> Result<RunSummary, PipelineError> {
    let mut out = ArtifactWriter::new(&config.output).stage("output")?;

    let (raw, truth) = match &config.input {
        InputMode::File(path) => (load_table(path, &config.parse).stage("load")?, None),
        InputMode::Synthetic(spec) => {
            let (table, truth) = generate_synthetic(spec).stage("synthetic")?;
            let mut buf = Vec::new();
            table.write_csv(&mut buf).stage("synthetic")?;
            out.write("synthetic_table.csv", &String::from_utf8_lossy(&buf))
                .stage("synthetic")?;
            out.write("truth.csv", &truth.to_csv("region", table.region_labels()))
                .stage("synthetic")?;
            (table, Some(truth))
        }
    };
    let missing = raw.missing_count();
    info!(
        "loaded {} regions x {} indicators, {missing} missing",
        raw.n_regions(),
        raw.n_indicators()
    );

    let imputed = impute_means(&raw).stage("impute")?;
    let z = standardize(&imputed).stage("standardize")?;

    let mut model = fit_pca(&z).stage("pca")?;
    let k = model.retain(config.component_rule);
    model.set_component_labels(config.component_labels.clone());
    info!("retained {k} components under {}", config.component_rule);
    out.write("variance.csv", &model.variance_table_csv())
        .stage("pca")?;
    out.write(
        "coefficients.csv",
        &model.coefficients().stage("pca")?.to_csv(),
    )
    .stage("pca")?;
    out.write("loadings.csv", &model.loadings().stage("pca")?.to_csv())
        .stage("pca")?;
    let scores = model.scores(&z).stage("pca")?;
    out.write("scores.csv", &scores.to_csv()).stage("pca")?;
    out.write("component_labels.csv", &model_component_labels(&model, k))
        .stage("pca")?;

    let var_dend = cluster_variables(&z).stage("variable clustering")?;
    let var_part = var_dend.cut(config.k_vars).stage("variable clustering")?;
    out.write("dendrogram_variables.csv", &var_dend.to_csv())
        .stage("variable clustering")?;
    out.write(
        "partition_variables.csv",
        &var_part.to_csv("indicator", z.indicator_labels()),
    )
    .stage("variable clustering")?;

    let regions = z.region_labels();
    let want_raw = matches!(config.cluster_space, ClusterSpace::Raw | ClusterSpace::Both);
    let want_comp = matches!(
        config.cluster_space,
        ClusterSpace::Components | ClusterSpace::Both
    );

    let raw_clusters = if want_raw {
        let points =
            Matrix::from_rows(&z.dense_rows().stage("raw clustering")?).stage("raw clustering")?;
        let dend = cluster_rows(&points, regions).stage("raw clustering")?;
        let part = dend.cut(config.k_regions).stage("raw clustering")?;
        out.write("dendrogram_raw.csv", &dend.to_csv())
            .stage("raw clustering")?;
        out.write("partition_raw.csv", &part.to_csv("region", regions))
            .stage("raw clustering")?;
        Some((dend, part))
    } else {
        None
    };

    let comp_clusters = if want_comp {
        let width = match config.score_columns {
            ScoreColumns::Retained => k,
            ScoreColumns::All => model.n_variables(),
        };
        let space = model.scores_for(&z, width).stage("component clustering")?;
        let dend = cluster_rows(&space.entries, regions).stage("component clustering")?;
        let part = dend.cut(config.k_regions).stage("component clustering")?;
        out.write("dendrogram_components.csv", &dend.to_csv())
            .stage("component clustering")?;
        out.write("partition_components.csv", &part.to_csv("region", regions))
            .stage("component clustering")?;
        Some((dend, part))
    } else {
        None
    };

    let mut summary = String::new();
    let _ = writeln!(summary, "regions={}", z.n_regions());
    let _ = writeln!(summary, "indicators={}", z.n_indicators());
    let _ = writeln!(summary, "missing_imputed={missing}");
    let _ = writeln!(summary, "component_rule={}", config.component_rule);
    let _ = writeln!(summary, "components={k}");
    let _ = writeln!(
        summary,
        "cumulative_percent={}",
        model.cumulative_percent()[k - 1]
    );
    let _ = writeln!(summary, "k_regions={}", config.k_regions);
    let _ = writeln!(summary, "k_vars={}", config.k_vars);

    let mut rand_rc = None;
    let mut ari_rc = None;
    if let (Some((_, a)), Some((_, b))) = (&raw_clusters, &comp_clusters) {
        let table = contingency(a, b).stage("concordance")?;
        out.write("concordance.csv", &table.to_csv())
            .stage("concordance")?;
        let (rand, ari) = (table.rand_index(), table.adjusted_rand_index());
        let _ = writeln!(summary, "rand={rand} ari={ari}");
        rand_rc = Some(rand);
        ari_rc = Some(ari);
    }
    let truth_ari = |p: &Option<(Dendrogram, Partition)>| -> Result<Option<f64>, PipelineError> {
        match (p, &truth) {
            (Some((_, part)), Some(t)) => Ok(Some(
                contingency(part, t)
                    .stage("concordance")?
                    .adjusted_rand_index(),
            )),
            _ => Ok(None),
        }
    };
    let ari_raw_truth = truth_ari(&raw_clusters)?;
    let ari_comp_truth = truth_ari(&comp_clusters)?;
    if let Some(v) = ari_raw_truth {
        let _ = writeln!(summary, "ari_raw_truth={v}");
    }
    if let Some(v) = ari_comp_truth {
        let _ = writeln!(summary, "ari_components_truth={v}");
    }

    // component space drives profiles and figures whenever it was clustered
    let (final_dend, final_part) = comp_clusters
        .as_ref()
        .or(raw_clusters.as_ref())
        .expect("at least one cluster space");
    write_profiles(&mut out, "cluster_", &imputed, final_part).stage("profile")?;
    let score_table = scores.to_table().stage("profile")?;
    write_profiles(&mut out, "scores_cluster_", &score_table, final_part).stage("profile")?;

    let plot_scores = model.scores_for(&z, 2).stage("plots")?;
    let mut dendrograms = vec![(
        "dendrogram_variables",
        "Variable clustering",
        &var_dend,
        config.k_vars,
    )];
    if let Some((d, _)) = &raw_clusters {
        dendrograms.push((
            "dendrogram_raw",
            "Regions: initial variables",
            d,
            config.k_regions,
        ));
    }
    if let Some((d, _)) = &comp_clusters {
        dendrograms.push((
            "dendrogram_components",
            "Regions: component scores",
            d,
            config.k_regions,
        ));
    }
    let inputs = PlotInputs {
        model: &model,
        standardized: &z,
        scores: &plot_scores,
        partition: final_part,
        region_order: final_dend,
        dendrograms,
    };
    emit_plots(&inputs, &mut out).stage("plots")?;

    out.write("summary.txt", &summary).stage("output")?;
    let manifest = out.finish().stage("output")?;

    Ok(RunSummary {
        manifest,
        n_regions: z.n_regions(),
        n_indicators: z.n_indicators(),
        retained: k,
        eigenvalues: model.eigenvalues().to_vec(),
        raw_partition: raw_clusters.map(|(_, p)| p),
        component_partition: comp_clusters.map(|(_, p)| p),
        variable_partition: var_part,
        truth,
        rand_raw_components: rand_rc,
        ari_raw_components: ari_rc,
        ari_raw_truth,
        ari_components_truth: ari_comp_truth,
    })
}
