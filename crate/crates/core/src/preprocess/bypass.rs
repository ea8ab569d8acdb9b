use std::collections::{BTreeMap, BTreeSet};

use super::PreprocessError;
use crate::graph::{build_network, Edge, RiverNetwork, StationId};

/// Removes `station`, joining each upstream neighbour directly to each
/// downstream neighbour.
///
/// The new reach carries the summed stream length and summed (signed)
/// elevation difference of the two reaches it replaces. If the joined pair
/// is already connected, the shorter reach is kept.
pub fn bypass_remove(net: &RiverNetwork, station: StationId) -> Result<RiverNetwork, PreprocessError> {
    if !net.contains(station) {
        return Err(PreprocessError::UnknownStation(station));
    }
    let upstream: Vec<Edge> = net.upstream_of(station).into_iter().copied().collect();
    let downstream: Vec<Edge> = net.downstream_of(station).into_iter().copied().collect();

    let mut edges: BTreeMap<(StationId, StationId), Edge> = net
        .edges()
        .iter()
        .filter(|e| e.src != station && e.dst != station)
        .map(|e| ((e.src, e.dst), *e))
        .collect();
    for up in &upstream {
        for down in &downstream {
            let joined = Edge::new(
                up.src,
                down.dst,
                up.stream_length_km + down.stream_length_km,
                up.elevation_diff_m + down.elevation_diff_m,
            );
            edges
                .entry((up.src, down.dst))
                .and_modify(|existing| {
                    if joined.stream_length_km < existing.stream_length_km {
                        *existing = joined;
                    }
                })
                .or_insert(joined);
        }
    }
    let nodes = net.nodes().iter().copied().filter(|&s| s != station);
    Ok(build_network(nodes, edges.into_values())?)
}

/// Keeps only the stations in `keep`, bypassing every other station in
/// upstream-first order.
pub fn extract_subgraph(net: &RiverNetwork, keep: &BTreeSet<StationId>) -> Result<RiverNetwork, PreprocessError> {
    if let Some(&unknown) = keep.iter().find(|&&s| !net.contains(s)) {
        return Err(PreprocessError::UnknownStation(unknown));
    }
    let order = net.topological_order()?;
    let mut current = net.clone();
    for idx in order {
        let station = net.nodes()[idx];
        if !keep.contains(&station) {
            current = bypass_remove(&current, station)?;
        }
    }
    Ok(current)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::topological_distances;
    use proptest::prelude::*;

    #[test]
    fn chain_bypass_aggregates() {
        let net = build_network([0, 1, 2], [Edge::new(0, 1, 2.0, 5.0), Edge::new(1, 2, 3.0, 7.0)]).unwrap();
        let out = bypass_remove(&net, 1).unwrap();
        assert_eq!(out.nodes(), &[0, 2]);
        assert_eq!(out.edges(), &[Edge::new(0, 2, 5.0, 12.0)]);
        let d = topological_distances(&net);
        assert_eq!(out.edges()[0].stream_length_km, d.get(0, 2));
    }

    #[test]
    fn leaf_removal_adds_nothing() {
        let net = build_network([0, 1, 2], [Edge::new(0, 1, 2.0, 0.0), Edge::new(1, 2, 3.0, 0.0)]).unwrap();
        let out = bypass_remove(&net, 2).unwrap();
        assert_eq!(out.edges(), &[Edge::new(0, 1, 2.0, 0.0)]);
        let out = bypass_remove(&net, 0).unwrap();
        assert_eq!(out.edges(), &[Edge::new(1, 2, 3.0, 0.0)]);
    }

    #[test]
    fn confluence_bypass() {
        let net = build_network(
            [0, 1, 2, 3],
            [
                Edge::new(0, 2, 1.0, 1.0),
                Edge::new(1, 2, 4.0, 2.0),
                Edge::new(2, 3, 2.0, 3.0),
            ],
        )
        .unwrap();
        let out = bypass_remove(&net, 2).unwrap();
        assert_eq!(out.edges(), &[Edge::new(0, 3, 3.0, 4.0), Edge::new(1, 3, 6.0, 5.0)]);
    }

    #[test]
    fn parallel_collision_keeps_shorter() {
        // 0 -> 1 -> 2 plus a direct 0 -> 2 reach
        let net = build_network(
            [0, 1, 2],
            [
                Edge::new(0, 1, 1.0, 1.0),
                Edge::new(1, 2, 1.0, 1.0),
                Edge::new(0, 2, 5.0, 9.0),
            ],
        )
        .unwrap();
        assert_eq!(bypass_remove(&net, 1).unwrap().edges(), &[Edge::new(0, 2, 2.0, 2.0)]);
        let net = build_network(
            [0, 1, 2],
            [
                Edge::new(0, 1, 3.0, 1.0),
                Edge::new(1, 2, 3.0, 1.0),
                Edge::new(0, 2, 5.0, 9.0),
            ],
        )
        .unwrap();
        assert_eq!(bypass_remove(&net, 1).unwrap().edges(), &[Edge::new(0, 2, 5.0, 9.0)]);
    }

    #[test]
    fn unknown_station() {
        let net = build_network([0, 1], [Edge::new(0, 1, 1.0, 0.0)]).unwrap();
        assert_eq!(bypass_remove(&net, 9).unwrap_err(), PreprocessError::UnknownStation(9));
        assert_eq!(
            extract_subgraph(&net, &BTreeSet::from([0, 9])).unwrap_err(),
            PreprocessError::UnknownStation(9)
        );
    }

    #[test]
    fn keep_all_is_identity() {
        let net = build_network([0, 1, 2], [Edge::new(0, 2, 1.0, 0.0), Edge::new(1, 2, 1.0, 0.0)]).unwrap();
        let keep: BTreeSet<_> = net.nodes().iter().copied().collect();
        assert_eq!(extract_subgraph(&net, &keep).unwrap(), net);
    }

    #[test]
    fn chain_keep_endpoints() {
        let net = build_network(
            [0, 1, 2, 3],
            [
                Edge::new(0, 1, 1.5, 0.0),
                Edge::new(1, 2, 2.0, 0.0),
                Edge::new(2, 3, 4.0, 0.0),
            ],
        )
        .unwrap();
        let out = extract_subgraph(&net, &BTreeSet::from([0, 3])).unwrap();
        assert_eq!(out.edges(), &[Edge::new(0, 3, 7.5, 0.0)]);
    }

    #[test]
    fn confluence_leaves_without_confluence() {
        // leaves 0,1 -> confluence 2 -> outlet 3
        let net = build_network(
            [0, 1, 2, 3],
            [
                Edge::new(0, 2, 1.0, 0.0),
                Edge::new(1, 2, 2.0, 0.0),
                Edge::new(2, 3, 3.0, 0.0),
            ],
        )
        .unwrap();
        let out = extract_subgraph(&net, &BTreeSet::from([0, 1, 3])).unwrap();
        assert_eq!(out.edges(), &[Edge::new(0, 3, 4.0, 0.0), Edge::new(1, 3, 5.0, 0.0)]);
        // the confluence as outlet: removing it leaves the leaves apart
        let net = build_network([0, 1, 2], [Edge::new(0, 2, 1.0, 0.0), Edge::new(1, 2, 2.0, 0.0)]).unwrap();
        let out = extract_subgraph(&net, &BTreeSet::from([0, 1])).unwrap();
        assert!(out.edges().is_empty());
        assert_eq!(out.len(), 2);
    }

    fn tree_and_keep() -> impl Strategy<Value = (Vec<usize>, Vec<f64>, Vec<bool>)> {
        (2usize..40).prop_flat_map(|n| {
            let parents = (1..n).map(|i| 0..i).collect::<Vec<_>>();
            (
                parents,
                proptest::collection::vec(0.5f64..30.0, n - 1),
                proptest::collection::vec(any::<bool>(), n),
            )
        })
    }

    proptest! {
        #[test]
        fn bypass_preserves_distances_and_connectivity((parents, lengths, mask) in tree_and_keep()) {
            let n = parents.len() + 1;
            let edges = parents.iter().zip(&lengths).enumerate()
                .map(|(k, (&p, &l))| Edge::new((k + 1) as u64, p as u64, l, l * 0.1));
            let net = build_network(0..n as u64, edges).unwrap();
            // node 0 is the outlet and is always kept
            let keep: BTreeSet<u64> = (0..n).filter(|&i| i == 0 || mask[i]).map(|i| i as u64).collect();
            let out = extract_subgraph(&net, &keep).unwrap();
            out.validate_tree().unwrap();
            prop_assert_eq!(out.nodes(), &keep.iter().copied().collect::<Vec<_>>()[..]);
            let before = topological_distances(&net);
            let after = topological_distances(&out);
            for e in out.edges() {
                let d = before.get(net.index_of(e.src).unwrap(), net.index_of(e.dst).unwrap());
                prop_assert!((e.stream_length_km - d).abs() < 1e-9);
            }
            for &u in &keep {
                for &v in &keep {
                    let db = before.get(net.index_of(u).unwrap(), net.index_of(v).unwrap());
                    let da = after.get(out.index_of(u).unwrap(), out.index_of(v).unwrap());
                    prop_assert!(db.is_finite());
                    // bypassed confluences lengthen sibling paths, never cut them
                    prop_assert!(da.is_finite());
                    prop_assert!(da >= db - 1e-9);
                }
            }
        }
    }
}
