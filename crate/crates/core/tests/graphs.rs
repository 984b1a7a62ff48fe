use std::collections::BTreeSet;

use itertools::Itertools;
use proptest::prelude::*;

use tautring::graphs::{enumerate_stable_graphs, graphs_with_edges, LocusKind, StableGraph};

type Shape = (Vec<u32>, Vec<Vec<u32>>, Vec<(usize, usize)>);

fn relabel(shape: &Shape, perm: &[usize]) -> Shape {
    let nv = shape.0.len();
    let mut genera = vec![0; nv];
    let mut legs = vec![vec![]; nv];
    for v in 0..nv {
        genera[perm[v]] = shape.0[v];
        legs[perm[v]] = shape.1[v].clone();
    }
    let mut edges: Vec<(usize, usize)> = shape
        .2
        .iter()
        .map(|&(a, b)| {
            let (x, y) = (perm[a], perm[b]);
            (x.min(y), x.max(y))
        })
        .collect();
    edges.sort_unstable();
    (genera, legs, edges)
}

/// Smallest relabeling over all vertex permutations.
fn brute_canonical(shape: &Shape) -> Shape {
    (0..shape.0.len()).permutations(shape.0.len()).map(|p| relabel(shape, &p)).min().unwrap()
}

fn connected(nv: usize, edges: &[(usize, usize)]) -> bool {
    let mut seen = vec![false; nv];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for &(a, b) in edges {
            for (x, y) in [(a, b), (b, a)] {
                if x == v && !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
    }
    seen.iter().all(|&s| s)
}

/// Every stable graph of type (g, n) with `e` edges, up to isomorphism, by
/// exhaustive search over vertex counts, genera, leg placements and edge multisets.
fn brute_force(g: u32, n: u32, e: usize) -> BTreeSet<Shape> {
    let mut out = BTreeSet::new();
    for nv in 1..=e + 1 {
        let h1 = e + 1 - nv;
        if h1 as u32 > g {
            continue;
        }
        let pairs: Vec<(usize, usize)> = (0..nv).flat_map(|a| (a..nv).map(move |b| (a, b))).collect();
        for edges in pairs.iter().cloned().combinations_with_replacement(e) {
            if !connected(nv, &edges) {
                continue;
            }
            for genera in (0..nv).map(|_| 0..=g).multi_cartesian_product() {
                if genera.iter().sum::<u32>() + h1 as u32 != g {
                    continue;
                }
                let placements: Vec<Vec<usize>> =
                    if n == 0 { vec![vec![]] } else { (0..n).map(|_| 0..nv).multi_cartesian_product().collect() };
                for place in placements {
                    let mut legs = vec![vec![]; nv];
                    for (i, &v) in place.iter().enumerate() {
                        legs[v].push(i as u32 + 1);
                    }
                    let stable = (0..nv).all(|v| {
                        let val = legs[v].len() + edges.iter().map(|&(a, b)| (a == v) as usize + (b == v) as usize).sum::<usize>();
                        2 * genera[v] as i64 - 2 + val as i64 > 0
                    });
                    if stable {
                        out.insert(brute_canonical(&(genera.clone(), legs, edges.clone())));
                    }
                }
            }
        }
    }
    out
}

fn shape_of(gr: &StableGraph) -> Shape {
    let nv = gr.num_vertices();
    (gr.genera().to_vec(), (0..nv).map(|v| gr.vertex_legs(v).to_vec()).collect(), gr.edges().to_vec())
}

#[test]
fn enumeration_matches_exhaustive_search() {
    for (g, n) in [(0, 3), (0, 4), (0, 5), (0, 6), (1, 1), (1, 2), (1, 3), (2, 0), (2, 1)] {
        let dim = tautring::graphs::dimension(g, n) as usize;
        for e in 0..=dim.min(3) {
            let ours: BTreeSet<Shape> = graphs_with_edges(g, n, e).iter().map(|gr| brute_canonical(&shape_of(gr))).collect();
            let theirs = brute_force(g, n, e);
            assert_eq!(ours.len(), graphs_with_edges(g, n, e).len(), "duplicate isomorphism classes ({g},{n},{e})");
            assert_eq!(ours, theirs, "graphs of type ({g},{n}) with {e} edges");
        }
    }
}

#[test]
fn known_counts() {
    assert_eq!(enumerate_stable_graphs(1, 1, 1).unwrap().len(), 2);
    assert_eq!(enumerate_stable_graphs(0, 4, 1).unwrap().len(), 4);
    assert_eq!(enumerate_stable_graphs(0, 5, 2).unwrap().len(), 26);
    assert_eq!(enumerate_stable_graphs(1, 2, 2).unwrap().len(), 5);
    assert!(enumerate_stable_graphs(1, 1, 2).is_err());
    assert!(enumerate_stable_graphs(0, 2, 0).is_err());
}

/// Half-edge bijections inducing a vertex automorphism, counted by brute force.
fn brute_automorphisms(gr: &StableGraph) -> u64 {
    let shape = shape_of(gr);
    let nv = shape.0.len();
    let mut total = 0u64;
    for p in (0..nv).permutations(nv) {
        if relabel(&shape, &p) != shape {
            continue;
        }
        let mut count = 1u64;
        for ((a, b), group) in &shape.2.iter().chunk_by(|e| **e) {
            let m = group.count() as u64;
            count *= (1..=m).product::<u64>();
            if a == b {
                count *= 1 << m;
            }
        }
        total += count;
    }
    total
}

#[test]
fn automorphism_counts() {
    let loop1 = StableGraph::new(vec![0], vec![vec![1]], vec![(0, 0)]).unwrap();
    assert_eq!(loop1.automorphism_count(), 2);
    let banana = StableGraph::new(vec![0, 0], vec![vec![1], vec![2]], vec![(0, 1), (0, 1)]).unwrap();
    assert_eq!(banana.automorphism_count(), 2);
    let theta = StableGraph::new(vec![0, 0], vec![vec![], vec![]], vec![(0, 1), (0, 1), (0, 1)]).unwrap();
    assert_eq!(theta.automorphism_count(), 12);
    for (g, n) in [(0, 5), (1, 2), (1, 3), (2, 0), (2, 1)] {
        for gr in enumerate_stable_graphs(g, n, 3.min(tautring::graphs::dimension(g, n))).unwrap() {
            assert_eq!(gr.automorphism_count(), brute_automorphisms(&gr), "{gr}");
        }
    }
}

#[test]
fn locus_membership() {
    let smooth = StableGraph::smooth(1, 2).unwrap();
    let sep = StableGraph::new(vec![1, 0], vec![vec![], vec![1, 2]], vec![(0, 1)]).unwrap();
    let loop1 = StableGraph::new(vec![0], vec![vec![1, 2]], vec![(0, 0)]).unwrap();
    let banana = StableGraph::new(vec![0, 0], vec![vec![1], vec![2]], vec![(0, 1), (0, 1)]).unwrap();
    for kind in [LocusKind::All, LocusKind::Treelike, LocusKind::CompactType, LocusKind::Smooth] {
        assert!(kind.contains(&smooth));
    }
    assert!(LocusKind::CompactType.contains(&sep) && !LocusKind::Smooth.contains(&sep));
    assert!(LocusKind::Treelike.contains(&loop1) && !LocusKind::CompactType.contains(&loop1));
    assert!(!LocusKind::Treelike.contains(&banana) && LocusKind::All.contains(&banana));
    assert!(sep.classify().is_tree && loop1.classify().is_treelike && !banana.classify().is_treelike);
}

#[test]
fn encoding_round_trips() {
    for gr in enumerate_stable_graphs(1, 3, 3).unwrap() {
        let back = StableGraph::decode(&gr.encode()).unwrap();
        assert_eq!(back, gr);
        assert!(back.is_canonical());
    }
    assert!(StableGraph::decode("(0|1);0-").is_err());
    assert!(StableGraph::decode("(0|1,2)").is_err());
}

fn arb_graph() -> impl Strategy<Value = StableGraph> {
    prop_oneof![Just((0u32, 5u32)), Just((1, 2)), Just((1, 3)), Just((2, 1))]
        .prop_flat_map(|(g, n)| {
            let all = enumerate_stable_graphs(g, n, 3.min(tautring::graphs::dimension(g, n))).unwrap();
            (0..all.len()).prop_map(move |i| all[i].clone())
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonical_form_ignores_vertex_labels(gr in arb_graph(), seed in any::<u64>()) {
        let nv = gr.num_vertices();
        let mut perm: Vec<usize> = (0..nv).collect();
        let mut s = seed;
        for i in (1..nv).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (s >> 33) as usize % (i + 1));
        }
        let (genera, legs, edges) = relabel(&shape_of(&gr), &perm);
        let moved = StableGraph::new(genera, legs, edges).unwrap();
        prop_assert_eq!(moved.canonical_form(), gr.clone());
        prop_assert_eq!(moved.isomorphisms(&gr).len() as u64, gr.automorphism_count());
    }
}
