use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::WeightedMultigraph;

type EdgeList = Vec<(u8, u8)>;

fn permutations(n: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut cur: Vec<u8> = (0..n as u8).collect();
    loop {
        out.push(cur.clone());
        // next lexicographic permutation
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else { break };
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).expect("successor exists");
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
    out
}

fn canonical(edges: &[(u8, u8)], perms: &[Vec<u8>]) -> EdgeList {
    let mut best: Option<EdgeList> = None;
    let mut buf: EdgeList = Vec::with_capacity(edges.len());
    for p in perms {
        buf.clear();
        buf.extend(edges.iter().map(|&(a, b)| {
            let (x, y) = (p[a as usize], p[b as usize]);
            (x.min(y), x.max(y))
        }));
        buf.sort_unstable();
        if best.as_ref().is_none_or(|b| buf < *b) {
            best = Some(buf.clone());
        }
    }
    best.unwrap_or_default()
}

/// Every multigraph (loops and parallel edges allowed) with `1..=max_vertices`
/// vertices and `0..=max_edges` edges, one representative per isomorphism
/// class, unit weights. Ordered by vertex count, then edge count, then edge list.
pub fn enumerate_small_graphs(max_vertices: usize, max_edges: usize) -> Vec<WeightedMultigraph> {
    assert!(max_vertices <= 7, "exhaustive enumeration is limited to 7 vertices");
    let mut out = Vec::new();
    for n in 1..=max_vertices {
        let perms = permutations(n);
        let slots: Vec<(u8, u8)> = (0..n as u8).flat_map(|a| (a..n as u8).map(move |b| (a, b))).collect();
        let mut level: BTreeSet<EdgeList> = BTreeSet::from([Vec::new()]);
        for m in 0..=max_edges {
            for edges in &level {
                let edges = edges.iter().map(|&(a, b)| (a as usize, b as usize)).collect();
                out.push(WeightedMultigraph::unweighted(n, edges).expect("enumerated graph is valid"));
            }
            if m == max_edges {
                break;
            }
            let mut next = BTreeSet::new();
            for edges in &level {
                for &s in &slots {
                    let mut e = edges.clone();
                    e.push(s);
                    next.insert(canonical(&e, &perms));
                }
            }
            level = next;
        }
    }
    out
}

/// Seeded random multigraphs with weights drawn from `{1, 2, 3}`.
pub fn random_weighted_graphs(count: usize, max_vertices: usize, max_edges: usize, seed: u64) -> Vec<WeightedMultigraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(1..=max_vertices);
            let m = rng.gen_range(0..=max_edges);
            let weights = (0..n).map(|_| rng.gen_range(1..=3u64)).collect();
            let edges = (0..m).map(|_| (rng.gen_range(0..n), rng.gen_range(0..n))).collect();
            WeightedMultigraph::new(weights, edges).expect("random graph is valid")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn has(list: &[WeightedMultigraph], n: usize, edges: &[(usize, usize)]) -> bool {
        let key = WeightedMultigraph::unweighted(n, edges.to_vec()).unwrap().key();
        list.iter().any(|g| g.key() == key)
    }

    #[test]
    fn single_vertex_only() {
        let g = enumerate_small_graphs(1, 0);
        assert_eq!(g, vec![WeightedMultigraph::unweighted(1, vec![]).unwrap()]);
    }

    #[test]
    fn two_vertices_one_edge() {
        let g = enumerate_small_graphs(2, 1);
        assert!(has(&g, 2, &[]));
        assert!(has(&g, 2, &[(0, 1)]));
        assert!(has(&g, 2, &[(0, 0)]));
        assert!(has(&g, 1, &[(0, 0)]));
        // 1 vertex: {}, {loop}; 2 vertices: {}, {K2}, {loop}
        assert_eq!(g.len(), 5);
    }

    #[test]
    fn three_vertices_three_edges() {
        let g = enumerate_small_graphs(3, 3);
        assert!(has(&g, 3, &[(0, 1), (1, 2), (0, 2)]));
        assert!(has(&g, 3, &[(0, 1), (0, 1), (0, 1)]));
        assert!(has(&g, 2, &[(0, 1), (0, 1), (0, 1)]));
    }

    #[test]
    fn enumeration_is_deterministic_and_duplicate_free() {
        let a = enumerate_small_graphs(4, 4);
        assert_eq!(a, enumerate_small_graphs(4, 4));
        let keys: BTreeSet<_> = a.iter().map(|g| g.key()).collect();
        assert_eq!(keys.len(), a.len());
    }

    #[test]
    fn simple_graph_counts_match_known_values() {
        // Unlabeled simple graphs on 4 vertices: 11.
        let simple = enumerate_small_graphs(4, 6)
            .into_iter()
            .filter(|g| g.vertex_count() == 4 && !g.has_loop() && g.key().edges.windows(2).all(|w| w[0] != w[1]))
            .count();
        assert_eq!(simple, 11);
    }

    #[test]
    fn random_graphs_are_seeded() {
        let a = random_weighted_graphs(20, 5, 8, 7);
        assert_eq!(a, random_weighted_graphs(20, 5, 8, 7));
        assert_ne!(a, random_weighted_graphs(20, 5, 8, 8));
        assert!(a.iter().all(|g| g.weights().iter().all(|w| (1..=3).contains(w))));
    }
}
