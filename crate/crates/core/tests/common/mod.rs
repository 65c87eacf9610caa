#![allow(dead_code)]

use pcacluster::ingest::IndicatorTable;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Reference 19-indicator correlation spectrum (Dim.1..Dim.19).
pub const REFERENCE_EIGENVALUES: [f64; 19] = [
    5.832579887,
    3.232571219,
    2.300940659,
    1.644107304,
    1.273934146,
    0.970767333,
    0.896241187,
    0.649316999,
    0.502682237,
    0.487771042,
    0.365864420,
    0.234788679,
    0.179103669,
    0.129516751,
    0.103789464,
    0.083736033,
    0.076707881,
    0.030332739,
    0.005248349,
];
pub const REFERENCE_VARIANCE: [f64; 19] = [
    30.69778888,
    17.01353273,
    12.11021399,
    8.65319634,
    6.70491656,
    5.10930176,
    4.71705888,
    3.41745789,
    2.64569599,
    2.56721601,
    1.92560221,
    1.23572989,
    0.94265089,
    0.68166711,
    0.54626034,
    0.44071596,
    0.40372569,
    0.15964599,
    0.02762289,
];
pub const REFERENCE_CUMULATIVE: [f64; 19] = [
    30.69779, 47.71132, 59.82154, 68.47473, 75.17965, 80.28895, 85.00601, 88.42347, 91.06916,
    93.63638, 95.56198, 96.79771, 97.74036, 98.42203, 98.96829, 99.40901, 99.81273, 99.97238,
    100.00000,
];
/// First coefficient column of the printed (unrotated) component table.
pub const REFERENCE_F1_COEFFICIENTS: [f64; 19] = [
    0.336, 0.365, 0.239, 0.324, 0.167, 0.303, -0.253, 0.302, -0.108, 0.235, 0.032, -0.057, -0.237,
    -0.147, 0.064, 0.304, -0.103, -0.212, -0.124,
];

pub fn labels(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

/// n × p table driven by 3 latent factors plus noise, so correlations are non-trivial.
pub fn correlated_table(n: usize, p: usize, seed: u64) -> IndicatorTable {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights: Vec<[f64; 3]> = (0..p)
        .map(|_| {
            [
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
            ]
        })
        .collect();
    let rows = (0..n)
        .map(|_| {
            let f: [f64; 3] = [
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
            ];
            (0..p)
                .map(|j| {
                    let noise: f64 = rng.sample(StandardNormal);
                    10.0 + weights[j].iter().zip(&f).map(|(w, x)| w * x).sum::<f64>() + 0.7 * noise
                })
                .collect()
        })
        .collect();
    IndicatorTable::from_dense(labels("r", n), labels("v", p), rows).unwrap()
}

pub fn sample_mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub fn sample_cov(a: &[f64], b: &[f64]) -> f64 {
    let (ma, mb) = (sample_mean(a), sample_mean(b));
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - ma) * (y - mb))
        .sum::<f64>()
        / (a.len() as f64 - 1.0)
}

pub fn sample_corr(a: &[f64], b: &[f64]) -> f64 {
    sample_cov(a, b) / (sample_cov(a, a).sqrt() * sample_cov(b, b).sqrt())
}

/// One merge of the brute-force oracle: sorted member lists and height.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleMerge {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
    pub height: f64,
}

pub fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Complete linkage by recomputing every inter-cluster maximum distance from
/// the raw points at each step. Ties: lowest min-leaf, then the partner's
/// lowest min-leaf.
pub fn brute_force_complete_linkage(points: &[Vec<f64>]) -> Vec<OracleMerge> {
    let mut clusters: Vec<Vec<usize>> = (0..points.len()).map(|i| vec![i]).collect();
    let mut merges = Vec::new();
    while clusters.len() > 1 {
        let mut best: Option<(f64, usize, usize, usize, usize)> = None;
        for a in 0..clusters.len() {
            for b in 0..clusters.len() {
                if a == b || clusters[a][0] > clusters[b][0] {
                    continue;
                }
                let mut d = 0.0_f64;
                for &i in &clusters[a] {
                    for &j in &clusters[b] {
                        d = d.max(euclid(&points[i], &points[j]));
                    }
                }
                let key = (d, clusters[a][0], clusters[b][0]);
                let better = match best {
                    None => true,
                    Some((bd, ba, bb, _, _)) => {
                        key.0 < bd || (key.0 == bd && (key.1, key.2) < (ba, bb))
                    }
                };
                if better {
                    best = Some((key.0, key.1, key.2, a, b));
                }
            }
        }
        let (height, _, _, a, b) = best.unwrap();
        let left = clusters[a].clone();
        let right = clusters[b].clone();
        let mut joined: Vec<usize> = left.iter().chain(&right).copied().collect();
        joined.sort_unstable();
        merges.push(OracleMerge {
            left,
            right,
            height,
        });
        let (hi, lo) = if a > b { (a, b) } else { (b, a) };
        clusters.remove(hi);
        clusters[lo] = joined;
    }
    merges
}

/// Small seeded point clouds on an integer grid so equal distances (ties) are common.
pub fn tie_heavy_points(rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let n = rng.random_range(2..=8);
    let d = rng.random_range(1..=3);
    (0..n)
        .map(|_| (0..d).map(|_| rng.random_range(0..4) as f64).collect())
        .collect()
}
