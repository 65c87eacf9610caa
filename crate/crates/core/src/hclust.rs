//! Agglomerative clustering with complete linkage over Euclidean distances.
//!
//! Merge ties are resolved deterministically: among pairs at the minimal
//! inter-cluster distance, the pair whose clusters have the lowest smallest
//! leaf index wins, then the lowest smallest leaf index of the partner.

use std::fmt;

use crate::error::{Error, Result};
use crate::ingest::IndicatorTable;
use crate::linalg::{correlation_matrix, Matrix};

/// Condensed upper-triangle distance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DistMatrix {
    n: usize,
    condensed: Vec<f64>,
    labels: Vec<String>,
}

fn condensed_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

impl DistMatrix {
    /// Builds from a condensed list in (0,1), (0,2), …, (n−2,n−1) order.
    pub fn from_condensed(condensed: Vec<f64>, labels: Vec<String>) -> Result<Self> {
        let n = labels.len();
        if n < 2 || condensed.len() != n * (n - 1) / 2 {
            return Err(Error::DimensionMismatch(format!(
                "{} condensed distances for {n} items",
                condensed.len()
            )));
        }
        if let Some(bad) = condensed.iter().find(|d| !(d.is_finite() && **d >= 0.0)) {
            return Err(Error::InvalidArgument(format!("invalid distance {bad}")));
        }
        Ok(DistMatrix {
            n,
            condensed,
            labels,
        })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn condensed(&self) -> &[f64] {
        &self.condensed
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        match i.cmp(&j) {
            std::cmp::Ordering::Equal => 0.0,
            std::cmp::Ordering::Less => self.condensed[condensed_index(self.n, i, j)],
            std::cmp::Ordering::Greater => self.condensed[condensed_index(self.n, j, i)],
        }
    }
}

/// Pairwise Euclidean distances between the rows of `points`.
pub fn euclidean_distances(points: &Matrix, labels: Vec<String>) -> Result<DistMatrix> {
    let n = points.rows();
    if n < 2 || points.cols() == 0 {
        return Err(Error::TooSmall(format!(
            "need at least 2 points of dimension ≥ 1, got {n}x{}",
            points.cols()
        )));
    }
    if labels.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "{} labels for {n} points",
            labels.len()
        )));
    }
    for i in 0..n {
        if points.row(i).iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite(format!("point {i}")));
        }
    }
    let mut condensed = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            let d2: f64 = points
                .row(i)
                .iter()
                .zip(points.row(j))
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            condensed.push(d2.sqrt());
        }
    }
    DistMatrix::from_condensed(condensed, labels)
}

/// A dendrogram node: an input leaf or the cluster produced by a merge step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeId {
    Leaf(usize),
    /// Zero-based index into the merge list.
    Merge(usize),
}

impl fmt::Display for NodeId {
    /// Leaves print as −(index+1), merges as their 1-based step number.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeId::Leaf(i) => write!(f, "-{}", i + 1),
            NodeId::Merge(s) => write!(f, "{}", s + 1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Merge {
    pub left: NodeId,
    pub right: NodeId,
    pub height: f64,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dendrogram {
    merges: Vec<Merge>,
    labels: Vec<String>,
}

impl Dendrogram {
    pub fn merges(&self) -> &[Merge] {
        &self.merges
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn n_leaves(&self) -> usize {
        self.labels.len()
    }

    /// Leaves in left-to-right drawing order.
    pub fn leaf_order(&self) -> Vec<usize> {
        let Some(last) = self.merges.len().checked_sub(1) else {
            return (0..self.n_leaves()).collect();
        };
        let mut order = Vec::with_capacity(self.n_leaves());
        let mut stack = vec![NodeId::Merge(last)];
        while let Some(node) = stack.pop() {
            match node {
                NodeId::Leaf(i) => order.push(i),
                NodeId::Merge(s) => {
                    stack.push(self.merges[s].right);
                    stack.push(self.merges[s].left);
                }
            }
        }
        order
    }

    /// Leaf members of a node, ascending.
    pub fn members(&self, node: NodeId) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![node];
        while let Some(n) = stack.pop() {
            match n {
                NodeId::Leaf(i) => out.push(i),
                NodeId::Merge(s) => {
                    stack.push(self.merges[s].left);
                    stack.push(self.merges[s].right);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Partition into `k` clusters obtained by undoing the last k − 1 merges.
    /// Cluster ids follow the order in which clusters first appear by leaf index.
    pub fn cut(&self, k: usize) -> Result<Partition> {
        let n = self.n_leaves();
        if k == 0 || k > n {
            return Err(Error::InvalidArgument(format!(
                "cut requires 1 ≤ k ≤ {n}, got {k}"
            )));
        }
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut representative = Vec::with_capacity(self.merges.len());
        let leaf_rep = |node: NodeId, reps: &[usize]| match node {
            NodeId::Leaf(i) => i,
            NodeId::Merge(s) => reps[s],
        };
        for (step, m) in self.merges.iter().enumerate() {
            let a = leaf_rep(m.left, &representative);
            let b = leaf_rep(m.right, &representative);
            representative.push(a);
            if step < n - k {
                let ra = find(&mut parent, a);
                let rb = find(&mut parent, b);
                parent[rb] = ra;
            }
        }
        let roots: Vec<usize> = (0..n).map(|i| find(&mut parent, i)).collect();
        Ok(Partition::from_labels(&roots))
    }

    /// One merge per line: `step,left,right,height,size`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,left,right,height,size\n");
        for (s, m) in self.merges.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                s + 1,
                m.left,
                m.right,
                m.height,
                m.size
            ));
        }
        out
    }
}

struct ActiveCluster {
    node: NodeId,
    min_leaf: usize,
    size: usize,
}

/// Complete-linkage agglomeration (naive O(n³)).
pub fn complete_linkage(d: &DistMatrix) -> Dendrogram {
    let n = d.order();
    let mut clusters: Vec<ActiveCluster> = (0..n)
        .map(|i| ActiveCluster {
            node: NodeId::Leaf(i),
            min_leaf: i,
            size: 1,
        })
        .collect();
    // full matrix of current inter-cluster distances, indexed by slot
    let mut dist = Matrix::from_fn(n, n, |i, j| d.get(i, j));
    let mut alive = vec![true; n];
    let mut merges = Vec::with_capacity(n.saturating_sub(1));

    for _ in 1..n {
        let mut best: Option<(f64, usize, usize, usize, usize)> = None;
        for a in 0..n {
            if !alive[a] {
                continue;
            }
            for b in a + 1..n {
                if !alive[b] {
                    continue;
                }
                let (lo, hi) = if clusters[a].min_leaf < clusters[b].min_leaf {
                    (a, b)
                } else {
                    (b, a)
                };
                let key = (dist[(a, b)], clusters[lo].min_leaf, clusters[hi].min_leaf);
                let better = match best {
                    None => true,
                    Some((bd, bl, bh, _, _)) => {
                        key.0 < bd || (key.0 == bd && (key.1, key.2) < (bl, bh))
                    }
                };
                if better {
                    best = Some((key.0, key.1, key.2, lo, hi));
                }
            }
        }
        let (height, _, _, lo, hi) = best.expect("at least two active clusters");
        let step = merges.len();
        merges.push(Merge {
            left: clusters[lo].node,
            right: clusters[hi].node,
            height,
            size: clusters[lo].size + clusters[hi].size,
        });
        for c in 0..n {
            if alive[c] && c != lo && c != hi {
                let v = dist[(lo, c)].max(dist[(hi, c)]);
                dist[(lo, c)] = v;
                dist[(c, lo)] = v;
            }
        }
        alive[hi] = false;
        clusters[lo] = ActiveCluster {
            node: NodeId::Merge(step),
            min_leaf: clusters[lo].min_leaf.min(clusters[hi].min_leaf),
            size: clusters[lo].size + clusters[hi].size,
        };
    }
    Dendrogram {
        merges,
        labels: d.labels().to_vec(),
    }
}

/// Distances √(2(1 − r)) between the indicators of a standardized table.
pub fn variable_distances(table: &IndicatorTable) -> Result<DistMatrix> {
    let r = correlation_matrix(table)?;
    let p = r.order();
    let mut condensed = Vec::with_capacity(p * (p - 1) / 2);
    for i in 0..p {
        for j in i + 1..p {
            condensed.push((2.0 * (1.0 - r.get(i, j))).max(0.0).sqrt());
        }
    }
    DistMatrix::from_condensed(condensed, table.indicator_labels().to_vec())
}

/// Complete-linkage dendrogram of the indicators.
pub fn cluster_variables(table: &IndicatorTable) -> Result<Dendrogram> {
    Ok(complete_linkage(&variable_distances(table)?))
}

/// Flat clustering with ids 1..=k, every id used.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    assignment: Vec<usize>,
    k: usize,
}

impl Partition {
    /// Validates that ids cover exactly 1..=k.
    pub fn new(assignment: Vec<usize>) -> Result<Self> {
        if assignment.is_empty() {
            return Err(Error::InvalidArgument("empty partition".into()));
        }
        let k = *assignment.iter().max().unwrap();
        let mut used = vec![false; k + 1];
        for &c in &assignment {
            used[c] = true;
        }
        if used[0] || used[1..].iter().any(|u| !u) {
            return Err(Error::InvalidArgument(format!(
                "cluster ids must cover 1..={k} with no gaps"
            )));
        }
        Ok(Partition { assignment, k })
    }

    /// Relabels arbitrary labels to 1..=k in order of first appearance.
    pub fn from_labels<T: Eq + std::hash::Hash + Clone>(labels: &[T]) -> Self {
        let mut ids = std::collections::HashMap::new();
        let assignment = labels
            .iter()
            .map(|l| {
                let next = ids.len() + 1;
                *ids.entry(l.clone()).or_insert(next)
            })
            .collect();
        Partition {
            assignment,
            k: ids.len(),
        }
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    /// Item indices in cluster `id` (1-based).
    pub fn members(&self, id: usize) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.assignment[i] == id)
            .collect()
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &c in &self.assignment {
            sizes[c - 1] += 1;
        }
        sizes
    }

    pub fn to_csv(&self, item_header: &str, labels: &[String]) -> String {
        let mut out = format!("{item_header},cluster\n");
        for (label, c) in labels.iter().zip(&self.assignment) {
            out.push_str(&format!("{},{c}\n", crate::report::csv_field(label)));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::standardize;

    fn labels(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("p{i}")).collect()
    }

    fn line(xs: &[f64]) -> DistMatrix {
        let m = Matrix::from_rows(&xs.iter().map(|&x| vec![x]).collect::<Vec<_>>()).unwrap();
        euclidean_distances(&m, labels(xs.len())).unwrap()
    }

    #[test]
    fn three_four_five() {
        let m = Matrix::from_rows(&[vec![0.0, 0.0], vec![3.0, 4.0]]).unwrap();
        let d = euclidean_distances(&m, labels(2)).unwrap();
        assert_eq!(d.get(0, 1), 5.0);
        assert_eq!(d.get(1, 0), 5.0);
        assert_eq!(d.get(1, 1), 0.0);
    }

    #[test]
    fn condensed_layout() {
        let d = line(&[0.0, 1.0, 5.0, 6.0]);
        assert_eq!(d.condensed(), &[1.0, 5.0, 6.0, 4.0, 5.0, 1.0]);
    }

    #[test]
    fn rejects_non_finite_points() {
        let m = Matrix::from_rows(&[vec![0.0], vec![f64::INFINITY]]).unwrap();
        assert!(matches!(
            euclidean_distances(&m, labels(2)),
            Err(Error::NonFinite(_))
        ));
    }

    #[test]
    fn four_point_line_merges() {
        let dend = complete_linkage(&line(&[0.0, 1.0, 5.0, 6.0]));
        let m = dend.merges();
        assert_eq!(m.len(), 3);
        assert_eq!(
            (m[0].left, m[0].right, m[0].height, m[0].size),
            (NodeId::Leaf(0), NodeId::Leaf(1), 1.0, 2)
        );
        assert_eq!(
            (m[1].left, m[1].right, m[1].height, m[1].size),
            (NodeId::Leaf(2), NodeId::Leaf(3), 1.0, 2)
        );
        assert_eq!(
            (m[2].left, m[2].right, m[2].height, m[2].size),
            (NodeId::Merge(0), NodeId::Merge(1), 6.0, 4)
        );
        assert_eq!(
            dend.to_csv(),
            "step,left,right,height,size\n1,-1,-2,1,2\n2,-3,-4,1,2\n3,1,2,6,4\n"
        );
    }

    #[test]
    fn identical_pair_merges_at_zero() {
        let dend = complete_linkage(&line(&[2.0, 2.0]));
        assert_eq!(dend.merges().len(), 1);
        assert_eq!(dend.merges()[0].height, 0.0);
    }

    #[test]
    fn cuts() {
        let dend = complete_linkage(&line(&[0.0, 1.0, 5.0, 6.0]));
        assert_eq!(dend.cut(2).unwrap().assignment(), &[1, 1, 2, 2]);
        assert_eq!(dend.cut(1).unwrap().assignment(), &[1, 1, 1, 1]);
        assert_eq!(dend.cut(4).unwrap().assignment(), &[1, 2, 3, 4]);
        assert_eq!(dend.cut(3).unwrap().assignment(), &[1, 1, 2, 3]);
        assert!(dend.cut(0).is_err());
        assert!(dend.cut(5).is_err());
    }

    #[test]
    fn leaf_order_follows_tree() {
        let dend = complete_linkage(&line(&[5.0, 0.0, 6.0, 1.0]));
        // {0,2} and {1,3} form; the root's left child holds leaf 0
        assert_eq!(dend.leaf_order(), vec![0, 2, 1, 3]);
        assert_eq!(dend.members(NodeId::Merge(2)), vec![0, 1, 2, 3]);
    }

    #[test]
    fn variable_clustering_extremes() {
        // a and b identical, c = -a, d roughly independent of a
        let a = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let d = [2.0, -1.0, 0.5, 0.5, -1.0, 2.0];
        let rows = (0..6).map(|i| vec![a[i], a[i], -a[i], d[i]]).collect();
        let t = IndicatorTable::from_dense(
            labels(6),
            vec!["a".into(), "b".into(), "c".into(), "d".into()],
            rows,
        )
        .unwrap();
        let z = standardize(&t).unwrap();
        let dist = variable_distances(&z).unwrap();
        assert!(dist.get(0, 1).abs() < 1e-7);
        assert!((dist.get(0, 2) - 2.0).abs() < 1e-12);
        let dend = cluster_variables(&z).unwrap();
        assert_eq!(dend.merges()[0].left, NodeId::Leaf(0));
        assert_eq!(dend.merges()[0].right, NodeId::Leaf(1));
        let last = dend.merges().last().unwrap();
        assert!((last.height - 2.0).abs() < 1e-12);
        assert_eq!(dend.labels()[2], "c");
    }

    #[test]
    fn partition_validation() {
        assert!(Partition::new(vec![1, 2, 2]).is_ok());
        assert!(Partition::new(vec![1, 3]).is_err());
        assert!(Partition::new(vec![0, 1]).is_err());
        assert!(Partition::new(vec![]).is_err());
        let p = Partition::from_labels(&["x", "y", "x", "z"]);
        assert_eq!(p.assignment(), &[1, 2, 1, 3]);
        assert_eq!(p.sizes(), vec![2, 1, 1]);
        assert_eq!(p.members(1), vec![0, 2]);
    }
}
