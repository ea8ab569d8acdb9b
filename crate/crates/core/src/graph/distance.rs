use std::cmp::Ordering;
use std::collections::BinaryHeap;

use nalgebra::DMatrix;

use super::RiverNetwork;

/// Symmetric matrix of channel distances (km) between every pair of
/// stations, `+inf` where no undirected path exists.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    d: DMatrix<f64>,
}

impl DistanceMatrix {
    /// Wraps a precomputed matrix. Returns `None` unless it is square,
    /// symmetric, nonnegative (NaN-free) and has a zero diagonal.
    pub fn from_matrix(d: DMatrix<f64>) -> Option<Self> {
        if !d.is_square() {
            return None;
        }
        let n = d.nrows();
        for i in 0..n {
            if d[(i, i)] != 0.0 {
                return None;
            }
            for j in 0..n {
                let x = d[(i, j)];
                if x.is_nan() || x < 0.0 || x != d[(j, i)] {
                    return None;
                }
            }
        }
        Some(Self { d })
    }

    pub fn len(&self) -> usize {
        self.d.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.d.nrows() == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[(i, j)]
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.d
    }

    /// Finite entries above the diagonal.
    pub fn finite_pairs(&self) -> impl Iterator<Item = f64> + '_ {
        let n = self.len();
        (0..n)
            .flat_map(move |i| ((i + 1)..n).map(move |j| self.d[(i, j)]))
            .filter(|x| x.is_finite())
    }
}

#[derive(Copy, Clone, PartialEq)]
struct State {
    dist: f64,
    node: usize,
}

impl Eq for State {}

impl Ord for State {
    // min-heap on distance, then on node index
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for State {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// All-pairs shortest channel distances on the undirected view of `net`.
///
/// Undirected distances give finite values between sibling tributaries,
/// which have no directed path between them. On a tree this is the length
/// of the unique connecting path.
pub fn topological_distances(net: &RiverNetwork) -> DistanceMatrix {
    let n = net.len();
    let nbrs = net.undirected_neighbors();
    let mut d = DMatrix::from_element(n, n, f64::INFINITY);
    for source in 0..n {
        let mut dist = vec![f64::INFINITY; n];
        dist[source] = 0.0;
        let mut heap = BinaryHeap::new();
        heap.push(State {
            dist: 0.0,
            node: source,
        });
        while let Some(State { dist: du, node: u }) = heap.pop() {
            if du > dist[u] {
                continue;
            }
            for &(v, w) in &nbrs[u] {
                let cand = du + w;
                if cand < dist[v] {
                    dist[v] = cand;
                    heap.push(State { dist: cand, node: v });
                }
            }
        }
        for (j, x) in dist.into_iter().enumerate() {
            d[(source, j)] = x;
        }
    }
    // Summation order differs between the two directions; pin symmetry.
    for i in 0..n {
        for j in (i + 1)..n {
            let m = d[(i, j)].min(d[(j, i)]);
            d[(i, j)] = m;
            d[(j, i)] = m;
        }
    }
    DistanceMatrix { d }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_network, Edge};
    use proptest::prelude::*;

    #[test]
    fn chain_path_sums() {
        let net = build_network([0, 1, 2], [Edge::new(0, 1, 2.0, 0.0), Edge::new(1, 2, 3.0, 0.0)]).unwrap();
        let d = topological_distances(&net);
        assert_eq!(d.get(0, 2), 5.0);
        assert_eq!(d.get(0, 1), 2.0);
        assert_eq!(d.get(1, 2), 3.0);
        assert_eq!(d.get(2, 0), 5.0);
    }

    #[test]
    fn disconnected_is_infinite() {
        let net = build_network([0, 1, 2, 3], [Edge::new(0, 1, 1.0, 0.0), Edge::new(2, 3, 1.0, 0.0)]).unwrap();
        let d = topological_distances(&net);
        assert_eq!(d.get(0, 2), f64::INFINITY);
        assert_eq!(d.get(1, 3), f64::INFINITY);
        assert_eq!(d.finite_pairs().count(), 2);
    }

    #[test]
    fn star_cross_leaf_distance() {
        // center 0, leaves 1,2,3 at 1,2,4 km draining into it
        let net = build_network(
            [0, 1, 2, 3],
            [
                Edge::new(1, 0, 1.0, 0.0),
                Edge::new(2, 0, 2.0, 0.0),
                Edge::new(3, 0, 4.0, 0.0),
            ],
        )
        .unwrap();
        let d = topological_distances(&net);
        assert_eq!(d.get(1, 3), 5.0);
        assert_eq!(d.get(2, 3), 6.0);
    }

    #[test]
    fn from_matrix_rejects_asymmetry() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 2.0, 0.0]);
        assert!(DistanceMatrix::from_matrix(m).is_none());
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        assert!(DistanceMatrix::from_matrix(m).is_some());
    }

    /// Random tree: node i > 0 drains into a random earlier node.
    fn tree_strategy() -> impl Strategy<Value = (Vec<usize>, Vec<f64>)> {
        (2usize..=64).prop_flat_map(|n| {
            let parents = (1..n).map(|i| 0..i).collect::<Vec<_>>();
            let lengths = proptest::collection::vec(0.1f64..50.0, n - 1);
            (parents, lengths)
        })
    }

    fn tree_network(parents: &[usize], lengths: &[f64]) -> RiverNetwork {
        let n = parents.len() + 1;
        let edges = parents
            .iter()
            .zip(lengths)
            .enumerate()
            .map(|(k, (&p, &l))| Edge::new((k + 1) as u64, p as u64, l, 0.0));
        build_network(0..n as u64, edges).unwrap()
    }

    /// Path length by walking both endpoints up to their common ancestor.
    fn path_walk(parents: &[usize], lengths: &[f64], mut u: usize, mut v: usize) -> f64 {
        let mut total = 0.0;
        while u != v {
            if u > v {
                total += lengths[u - 1];
                u = parents[u - 1];
            } else {
                total += lengths[v - 1];
                v = parents[v - 1];
            }
        }
        total
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(500))]

        #[test]
        fn symmetric_and_triangle((parents, lengths) in tree_strategy()) {
            let net = tree_network(&parents, &lengths);
            let d = topological_distances(&net);
            let n = d.len();
            for i in 0..n {
                prop_assert_eq!(d.get(i, i), 0.0);
                for j in 0..n {
                    prop_assert_eq!(d.get(i, j), d.get(j, i));
                    prop_assert!(d.get(i, j) >= 0.0);
                }
            }
            // triangle inequality on a sample of triples
            for i in 0..n.min(12) {
                for j in 0..n {
                    for k in (0..n).step_by(3) {
                        prop_assert!(d.get(i, j) <= d.get(i, k) + d.get(k, j) + 1e-9);
                    }
                }
            }
        }

        #[test]
        fn tree_distance_is_path_sum((parents, lengths) in tree_strategy()) {
            let net = tree_network(&parents, &lengths);
            let d = topological_distances(&net);
            let n = d.len();
            for u in 0..n {
                for v in 0..n {
                    let oracle = path_walk(&parents, &lengths, u, v);
                    prop_assert!((d.get(u, v) - oracle).abs() < 1e-9);
                }
            }
        }

        #[test]
        fn edge_order_does_not_matter((parents, lengths) in tree_strategy(), seed in any::<u64>()) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let net = tree_network(&parents, &lengths);
            let mut edges = net.edges().to_vec();
            edges.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            let mut nodes = net.nodes().to_vec();
            nodes.reverse();
            let shuffled = build_network(nodes, edges).unwrap();
            prop_assert_eq!(&shuffled, &net);
        }
    }
}
