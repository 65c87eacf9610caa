mod common;

use common::*;
use pcacluster::concordance::adjusted_rand_index;
use pcacluster::hclust::{complete_linkage, euclidean_distances, Partition};
use pcacluster::ingest::{impute_means, read_table, standardize, IndicatorTable, ParseOptions};
use pcacluster::linalg::{
    correlation_matrix, jacobi_eigen, EigenDecomposition, Matrix, SymMatrix, DEFAULT_JACOBI_TOL,
};
use pcacluster::pca::{fit_pca, PcaModel, SelectionRule};
use pcacluster::profile::profile;
use proptest::prelude::*;

fn table_strategy() -> impl Strategy<Value = IndicatorTable> {
    (6usize..40, 2usize..8, any::<u64>())
        .prop_map(|(extra, p, seed)| correlated_table(p + extra, p, seed))
}

fn sparse_table(n: usize, p: usize, seed: u64, holes: &[(usize, usize)]) -> IndicatorTable {
    let base = correlated_table(n, p, seed);
    let rows = (0..n)
        .map(|i| {
            (0..p)
                .map(|j| {
                    if i > 0 && holes.contains(&(i % n, j % p)) {
                        None
                    } else {
                        base.get(i, j)
                    }
                })
                .collect()
        })
        .collect();
    IndicatorTable::new(
        base.region_labels().to_vec(),
        base.indicator_labels().to_vec(),
        rows,
    )
    .unwrap()
}

fn finite_f64() -> impl Strategy<Value = f64> {
    prop_oneof![
        prop::num::f64::NORMAL,
        prop::num::f64::SUBNORMAL,
        prop::num::f64::ZERO,
        -1e6f64..1e6,
    ]
}

fn labels_strategy(n: usize, k: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0..k, n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn standardize_is_idempotent(t in table_strategy()) {
        let once = standardize(&t).unwrap();
        // a standardized table is flagged; re-standardize its values
        let again = standardize(&IndicatorTable::from_dense(
            once.region_labels().to_vec(),
            once.indicator_labels().to_vec(),
            once.dense_rows().unwrap(),
        ).unwrap()).unwrap();
        for (a, b) in once.dense_rows().unwrap().iter().zip(again.dense_rows().unwrap()) {
            for (x, y) in a.iter().zip(b) {
                prop_assert!((x - y).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn imputation_preserves_column_means(
        seed in any::<u64>(),
        holes in prop::collection::vec((1usize..30, 0usize..5), 0..20),
    ) {
        let t = sparse_table(30, 5, seed, &holes);
        let filled = impute_means(&t).unwrap();
        prop_assert_eq!(filled.missing_count(), 0);
        for j in 0..5 {
            let present: Vec<f64> = (0..30).filter_map(|i| t.get(i, j)).collect();
            let after = filled.column(j).unwrap();
            prop_assert!((sample_mean(&present) - sample_mean(&after)).abs() <= 1e-12 * sample_mean(&present).abs().max(1.0));
        }
    }

    #[test]
    fn csv_round_trip_is_bit_exact(
        cells in prop::collection::vec(prop::option::weighted(0.9, finite_f64()), 3 * 4),
    ) {
        let rows: Vec<Vec<Option<f64>>> = cells.chunks(4).map(<[_]>::to_vec).collect();
        let t = IndicatorTable::new(labels("r", 3), labels("v", 4), rows).unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let back = read_table(buf.as_slice(), &ParseOptions::default()).unwrap();
        prop_assert_eq!(back.region_labels(), t.region_labels());
        for i in 0..3 {
            for j in 0..4 {
                prop_assert_eq!(back.get(i, j).map(f64::to_bits), t.get(i, j).map(f64::to_bits));
            }
        }
    }

    #[test]
    fn jacobi_preserves_trace_and_orthonormality(
        p in 1usize..12,
        vals in prop::collection::vec(-10.0f64..10.0, 144),
    ) {
        let m = SymMatrix::from_upper(p, |i, j| vals[i * 12 + j]);
        let e = jacobi_eigen(&m, DEFAULT_JACOBI_TOL).unwrap();
        let scale = m.frobenius_norm().max(1.0);
        prop_assert!((e.eigenvalues.iter().sum::<f64>() - m.trace()).abs() <= 1e-9 * scale);
        let v = &e.eigenvectors;
        let vtv = v.transpose().matmul(v).unwrap();
        for i in 0..p {
            for j in 0..p {
                let id = if i == j { 1.0 } else { 0.0 };
                prop_assert!((vtv[(i, j)] - id).abs() < 1e-9);
            }
        }
        prop_assert!(e.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn correlation_spectrum_sums_to_p(t in table_strategy()) {
        let z = standardize(&t).unwrap();
        let r = correlation_matrix(&z).unwrap();
        let e = jacobi_eigen(&r, DEFAULT_JACOBI_TOL).unwrap();
        let p = z.n_indicators() as f64;
        prop_assert!((e.eigenvalues.iter().sum::<f64>() - p).abs() < 1e-9);
        prop_assert!(e.eigenvalues.iter().all(|&l| l >= -1e-9));
    }

    #[test]
    fn full_rank_scores_reconstruct_data(t in table_strategy()) {
        let z = standardize(&t).unwrap();
        let model = fit_pca(&z).unwrap();
        let p = z.n_indicators();
        let s = model.scores_for(&z, p).unwrap().entries;
        let c = model.coefficients_for(p).entries;
        let back = s.matmul(&c.transpose()).unwrap();
        for (i, row) in z.dense_rows().unwrap().iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                prop_assert!((back[(i, j)] - x).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn loadings_are_bounded(t in table_strategy()) {
        let model = fit_pca(&standardize(&t).unwrap()).unwrap();
        let l = model.loadings_for(model.n_variables()).entries;
        for i in 0..l.rows() {
            prop_assert!(l.row(i).iter().all(|x| x.abs() <= 1.0 + 1e-9));
        }
    }

    #[test]
    fn variance_identity_holds(t in table_strategy()) {
        let model = fit_pca(&standardize(&t).unwrap()).unwrap();
        let p = model.n_variables() as f64;
        for (v, l) in model.variance_percent().iter().zip(model.eigenvalues()) {
            prop_assert!((v * p / 100.0 - l).abs() < 1e-9);
        }
    }

    #[test]
    fn kaiser_counts_eigenvalues_above_one(mut ev in prop::collection::vec(0.0f64..4.0, 1..20)) {
        ev.sort_by(|a, b| b.total_cmp(a));
        let p = ev.len();
        let model = PcaModel::from_decomposition(
            EigenDecomposition { eigenvalues: ev.clone(), eigenvectors: Matrix::identity(p) },
            labels("x", p),
        ).unwrap();
        let above = ev.iter().filter(|&&l| l > 1.0).count();
        prop_assert_eq!(model.select_components(SelectionRule::Kaiser), above.max(1));
    }

    #[test]
    fn ari_is_symmetric_and_label_invariant(
        a in labels_strategy(30, 4),
        b in labels_strategy(30, 5),
        shift in 1usize..7,
    ) {
        let (pa, pb) = (Partition::from_labels(&a), Partition::from_labels(&b));
        let ab = adjusted_rand_index(&pa, &pb).unwrap();
        prop_assert_eq!(ab, adjusted_rand_index(&pb, &pa).unwrap());
        // rotate ids within 1..=k so the assignment vector actually changes
        let k = pa.k();
        let rotated: Vec<usize> = pa.assignment().iter().map(|&c| (c - 1 + shift) % k + 1).collect();
        let pr = Partition::new(rotated).unwrap();
        prop_assert_eq!(ab, adjusted_rand_index(&pr, &pb).unwrap());
        let flipped: Vec<usize> = pb.assignment().iter().map(|&c| pb.k() + 1 - c).collect();
        prop_assert_eq!(ab, adjusted_rand_index(&pa, &Partition::new(flipped).unwrap()).unwrap());
        prop_assert!(ab <= 1.0);
        prop_assert_eq!(adjusted_rand_index(&pa, &pr).unwrap() == 1.0, pa.k() > 1);
    }

    #[test]
    fn cuts_refine(pts in prop::collection::vec(prop::collection::vec(-5.0f64..5.0, 3), 2..25)) {
        let n = pts.len();
        let d = euclidean_distances(&Matrix::from_rows(&pts).unwrap(), labels("p", n)).unwrap();
        let dend = complete_linkage(&d);
        prop_assert!(dend.merges().windows(2).all(|w| w[0].height <= w[1].height));
        for k in 2..=n {
            let fine = dend.cut(k).unwrap();
            let coarse = dend.cut(k - 1).unwrap();
            prop_assert_eq!(fine.k(), k);
            for c in 1..=k {
                let members = fine.members(c);
                let parent = coarse.assignment()[members[0]];
                prop_assert!(members.iter().all(|&i| coarse.assignment()[i] == parent));
            }
        }
    }

    #[test]
    fn linkage_is_permutation_equivariant(
        pts in prop::collection::vec(prop::collection::vec(-5.0f64..5.0, 2), 4..20),
        perm_seed in any::<u64>(),
        k in 1usize..4,
    ) {
        use rand::{seq::SliceRandom, SeedableRng};
        let n = pts.len();
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(perm_seed));
        let shuffled: Vec<Vec<f64>> = perm.iter().map(|&i| pts[i].clone()).collect();
        let cut = |p: &[Vec<f64>]| {
            let d = euclidean_distances(&Matrix::from_rows(p).unwrap(), labels("p", n)).unwrap();
            complete_linkage(&d).cut(k).unwrap()
        };
        let original = cut(&pts);
        let permuted = cut(&shuffled);
        // map the permuted partition back onto original item order
        let mut back = vec![0; n];
        for (pos, &i) in perm.iter().enumerate() {
            back[i] = permuted.assignment()[pos];
        }
        let ari = adjusted_rand_index(&original, &Partition::from_labels(&back)).unwrap();
        prop_assert!(ari == 1.0 || k == 1, "ari {}", ari);
    }

    #[test]
    fn profile_scale_and_translation(
        seed in any::<u64>(),
        labs in labels_strategy(24, 3),
        c in 0.01f64..100.0,
        shift in -50.0f64..50.0,
    ) {
        let t = correlated_table(24, 3, seed);
        let part = Partition::from_labels(&labs);
        let transformed = |f: &dyn Fn(f64) -> f64| {
            let rows = t.dense_rows().unwrap().iter().map(|r| r.iter().map(|&x| f(x)).collect()).collect();
            IndicatorTable::from_dense(t.region_labels().to_vec(), t.indicator_labels().to_vec(), rows).unwrap()
        };
        let base = profile(&t, &part).unwrap();
        let scaled = profile(&transformed(&|x| c * x), &part).unwrap();
        let moved = profile(&transformed(&|x| x + shift), &part).unwrap();
        let close = |a: Option<f64>, b: Option<f64>, tol: f64| match (a, b) {
            (Some(a), Some(b)) => (a - b).abs() <= tol * a.abs().max(1.0),
            (None, None) => true,
            _ => false,
        };
        for ((b, s), m) in base.iter().zip(&scaled).zip(&moved) {
            prop_assert!((s.average - c * b.average).abs() <= 1e-9 * (c * b.average).abs().max(1.0));
            prop_assert!((s.standard_deviation - c * b.standard_deviation).abs() <= 1e-9 * (c * b.standard_deviation).max(1.0));
            prop_assert!(close(s.skewness, b.skewness, 1e-9));
            prop_assert!(close(s.kurtosis, b.kurtosis, 1e-9));
            prop_assert!(close(s.to_country_average_percent, b.to_country_average_percent, 1e-9));
            prop_assert!((m.average - (b.average + shift)).abs() <= 1e-9 * b.average.abs().max(1.0));
            prop_assert!((m.standard_deviation - b.standard_deviation).abs() <= 1e-9 * b.standard_deviation.max(1.0));
            prop_assert!(close(m.skewness, b.skewness, 1e-9));
            prop_assert!(close(m.kurtosis, b.kurtosis, 1e-9));
        }
    }

    #[test]
    fn profile_weighted_means_recover_grand_mean(seed in any::<u64>(), labs in labels_strategy(40, 5)) {
        let t = correlated_table(40, 4, seed);
        let part = Partition::from_labels(&labs);
        let rows = profile(&t, &part).unwrap();
        for j in 0..4 {
            let grand = sample_mean(&t.column(j).unwrap());
            let name = &t.indicator_labels()[j];
            let weighted: f64 = rows.iter().filter(|r| &r.indicator == name).map(|r| r.size as f64 * r.average).sum();
            prop_assert!((weighted - 40.0 * grand).abs() < 1e-9);
            prop_assert!(rows.iter().all(|r| r.standard_deviation >= 0.0));
        }
    }
}
