//! Seeded Gaussian-mixture tables with planted cluster labels.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::config::KeyValues;
use crate::error::{Error, Result};
use crate::hclust::Partition;
use crate::ingest::IndicatorTable;

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub regions: usize,
    pub indicators: usize,
    pub clusters: usize,
    /// Distance of each cluster center from the common origin, in units of
    /// `within_sd`.
    pub separation: f64,
    pub within_sd: f64,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            regions: 85,
            indicators: 19,
            clusters: 4,
            separation: 6.0,
            within_sd: 1.0,
            seed: 2018,
        }
    }
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        if self.clusters == 0 || self.clusters > self.regions {
            return Err(Error::InvalidArgument(format!(
                "cannot plant {} clusters in {} regions",
                self.clusters, self.regions
            )));
        }
        if self.indicators == 0 {
            return Err(Error::InvalidArgument("need at least one indicator".into()));
        }
        if !(self.separation >= 0.0 && self.separation.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "separation must be ≥ 0, got {}",
                self.separation
            )));
        }
        if !(self.within_sd > 0.0 && self.within_sd.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "within_sd must be > 0, got {}",
                self.within_sd
            )));
        }
        Ok(())
    }

    /// Reads `regions`, `indicators`, `clusters`, `separation`, `within_sd`
    /// and `seed`; absent keys keep their defaults.
    pub fn from_key_values(kv: &KeyValues, prefix: &str) -> Result<Self> {
        let mut spec = SyntheticSpec::default();
        for (line, key, value) in kv.iter() {
            let Some(key) = key.strip_prefix(prefix) else {
                continue;
            };
            let bad = |what: &str| Error::Config {
                line,
                message: format!("{key}: expected {what}, got {value:?}"),
            };
            match key {
                "regions" => spec.regions = value.parse().map_err(|_| bad("an integer"))?,
                "indicators" => spec.indicators = value.parse().map_err(|_| bad("an integer"))?,
                "clusters" => spec.clusters = value.parse().map_err(|_| bad("an integer"))?,
                "separation" => spec.separation = value.parse().map_err(|_| bad("a number"))?,
                "within_sd" => spec.within_sd = value.parse().map_err(|_| bad("a number"))?,
                "seed" => spec.seed = value.parse().map_err(|_| bad("an integer"))?,
                _ => {
                    return Err(Error::Config {
                        line,
                        message: format!("unknown synthetic key {key:?}"),
                    })
                }
            }
        }
        spec.validate()?;
        Ok(spec)
    }
}

fn planted_sizes(n: usize, k: usize) -> Vec<usize> {
    (0..k).map(|c| n / k + usize::from(c < n % k)).collect()
}

/// Draws a table and its planted partition.
///
/// Each cluster center sits `separation · within_sd` from the origin along a
/// uniformly random direction; members add independent N(0, within_sd²)
/// noise. Indicators are offset to positive levels so the table resembles
/// original-unit data. Identical specs give bit-identical output.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<(IndicatorTable, Partition)> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let p = spec.indicators;

    let centers: Vec<Vec<f64>> = (0..spec.clusters)
        .map(|_| {
            let dir: Vec<f64> = (0..p).map(|_| rng.sample(StandardNormal)).collect();
            let norm = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
            let radius = spec.separation * spec.within_sd;
            dir.iter().map(|x| x / norm * radius).collect()
        })
        .collect();
    let levels: Vec<f64> = (0..p).map(|_| rng.random_range(50.0..150.0)).collect();

    let mut truth: Vec<usize> = planted_sizes(spec.regions, spec.clusters)
        .into_iter()
        .enumerate()
        .flat_map(|(c, size)| std::iter::repeat_n(c, size))
        .collect();
    truth.shuffle(&mut rng);

    let rows: Vec<Vec<f64>> = truth
        .iter()
        .map(|&c| {
            (0..p)
                .map(|j| {
                    let noise: f64 = rng.sample(StandardNormal);
                    levels[j] + centers[c][j] + spec.within_sd * noise
                })
                .collect()
        })
        .collect();

    let width = spec.regions.to_string().len();
    let regions = (1..=spec.regions)
        .map(|i| format!("R{i:0width$}"))
        .collect();
    let indicators = (1..=p).map(|j| format!("X{j}")).collect();
    let table = IndicatorTable::from_dense(regions, indicators, rows)?;
    Ok((table, Partition::from_labels(&truth)))
}
