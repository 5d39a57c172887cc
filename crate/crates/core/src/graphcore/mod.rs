//! Vertex-weighted multigraphs with loops and parallel edges.
//!
//! Graphs are immutable values: [`WeightedMultigraph::delete_edge`] and
//! [`WeightedMultigraph::contract_edge`] return new graphs. Vertices are the
//! dense ids `0..n`.

mod enumerate;
mod io;

pub use enumerate::{enumerate_small_graphs, random_weighted_graphs};
pub use io::{parse_graph, parse_graph_json, parse_graph_text, write_graph_json, write_graph_text};

use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::partitiondep::IntPartition;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeightedMultigraph {
    weights: Vec<u64>,
    edges: Vec<(usize, usize)>,
}

/// Hashable identity of a graph up to edge order, used as a memo key.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GraphKey {
    weights: Vec<u64>,
    edges: Vec<(usize, usize)>,
}

impl WeightedMultigraph {
    pub fn new(weights: Vec<u64>, edges: Vec<(usize, usize)>) -> Result<Self> {
        if let Some(v) = weights.iter().position(|&w| w == 0) {
            return Err(Error::InvalidInput(format!("vertex {v} has weight 0")));
        }
        let n = weights.len();
        if let Some(&(a, b)) = edges.iter().find(|&&(a, b)| a >= n || b >= n) {
            return Err(Error::InvalidInput(format!("edge ({a}, {b}) uses an undeclared vertex")));
        }
        Ok(WeightedMultigraph { weights, edges })
    }

    /// All weights 1.
    pub fn unweighted(n: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        Self::new(vec![1; n], edges)
    }

    pub fn empty() -> Self {
        WeightedMultigraph { weights: Vec::new(), edges: Vec::new() }
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        WeightedMultigraph { weights: vec![1; n], edges }
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 1);
        let edges = (0..n).map(|i| (i, (i + 1) % n)).collect();
        WeightedMultigraph { weights: vec![1; n], edges }
    }

    pub fn path(n: usize) -> Self {
        let edges = (1..n).map(|i| (i - 1, i)).collect();
        WeightedMultigraph { weights: vec![1; n], edges }
    }

    pub fn with_weights(&self, weights: Vec<u64>) -> Result<Self> {
        if weights.len() != self.vertex_count() {
            return Err(Error::InvalidInput("weight list length differs from vertex count".into()));
        }
        Self::new(weights, self.edges.clone())
    }

    pub fn with_unit_weights(&self) -> Self {
        WeightedMultigraph { weights: vec![1; self.weights.len()], edges: self.edges.clone() }
    }

    pub fn vertex_count(&self) -> usize {
        self.weights.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    pub fn weight(&self, v: usize) -> u64 {
        self.weights[v]
    }

    pub fn total_weight(&self) -> u64 {
        self.weights.iter().sum()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> Result<(usize, usize)> {
        self.edges.get(e).copied().ok_or_else(|| Error::InvalidInput(format!("edge index {e} out of range")))
    }

    pub fn is_loop(&self, e: usize) -> bool {
        let (a, b) = self.edges[e];
        a == b
    }

    pub fn has_loop(&self) -> bool {
        self.edges.iter().any(|&(a, b)| a == b)
    }

    pub fn loop_count(&self) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == b).count()
    }

    pub fn is_unit_weighted(&self) -> bool {
        self.weights.iter().all(|&w| w == 1)
    }

    pub fn first_non_loop_edge(&self) -> Option<usize> {
        self.edges.iter().position(|&(a, b)| a != b)
    }

    pub fn key(&self) -> GraphKey {
        let mut edges: Vec<(usize, usize)> = self.edges.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
        edges.sort_unstable();
        GraphKey { weights: self.weights.clone(), edges }
    }

    pub fn delete_edge(&self, e: usize) -> Result<Self> {
        self.edge(e)?;
        let mut edges = self.edges.clone();
        edges.remove(e);
        Ok(WeightedMultigraph { weights: self.weights.clone(), edges })
    }

    pub fn contract_edge(&self, e: usize) -> Result<Self> {
        self.contract_edge_mapped(e).map(|(g, _)| g)
    }

    /// Contracts `e = uv`. The merged vertex takes id `min(u, v)` and weight
    /// `ω(u) + ω(v)`; ids above `max(u, v)` shift down by one. The returned map
    /// sends each old vertex id to its new id. Edges parallel to `e` become
    /// loops at the merged vertex.
    pub fn contract_edge_mapped(&self, e: usize) -> Result<(Self, Vec<usize>)> {
        let (a, b) = self.edge(e)?;
        if a == b {
            return Err(Error::ContractLoop(e));
        }
        let (keep, gone) = (a.min(b), a.max(b));
        let map: Vec<usize> = (0..self.vertex_count())
            .map(|v| match v.cmp(&gone) {
                std::cmp::Ordering::Less => v,
                std::cmp::Ordering::Equal => keep,
                std::cmp::Ordering::Greater => v - 1,
            })
            .collect();
        let mut weights = self.weights.clone();
        weights[keep] += weights[gone];
        weights.remove(gone);
        let edges = self
            .edges
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != e)
            .map(|(_, &(x, y))| (map[x], map[y]))
            .collect();
        Ok((WeightedMultigraph { weights, edges }, map))
    }

    /// Component summary of the spanning subgraph `(V, A)`.
    pub fn components(&self, a: EdgeSubset) -> Result<ComponentSummary> {
        a.check(self)?;
        Ok(self.components_unchecked(a.0))
    }

    fn components_unchecked(&self, mask: u64) -> ComponentSummary {
        let n = self.vertex_count();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let mut bits = mask;
        while bits != 0 {
            let i = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let (u, v) = self.edges[i];
            let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
            if ru != rv {
                parent[ru] = rv;
            }
        }
        let mut size = vec![0u32; n];
        let mut weight = vec![0u64; n];
        for v in 0..n {
            let r = find(&mut parent, v);
            size[r] += 1;
            weight[r] += self.weights[v];
        }
        let mut sizes: Vec<u32> = size.iter().copied().filter(|&s| s > 0).collect();
        let mut weights: Vec<u64> = (0..n).filter(|&v| size[v] > 0).map(|v| weight[v]).collect();
        sizes.sort_unstable_by(|x, y| y.cmp(x));
        weights.sort_unstable_by(|x, y| y.cmp(x));
        ComponentSummary {
            component_count: sizes.len(),
            size_partition: IntPartition::from_sorted_unchecked(sizes),
            weight_multiset: weights,
        }
    }

    pub fn component_count(&self) -> usize {
        self.components_unchecked(EdgeSubset::all(self).0).component_count
    }

    /// Visits every spanning subgraph as `(|A|, components of (V, A))`.
    pub fn for_each_spanning_subgraph<F>(&self, limits: &Limits, mut f: F) -> Result<()>
    where
        F: FnMut(usize, &ComponentSummary),
    {
        let total = limits.check_subsets(self.edge_count())?;
        for mask in 0..total {
            f(mask.count_ones() as usize, &self.components_unchecked(mask));
        }
        Ok(())
    }
}

/// Subset of the edge list of a particular graph, as a bitmask.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct EdgeSubset(u64);

impl EdgeSubset {
    pub fn new(mask: u64, g: &WeightedMultigraph) -> Result<Self> {
        let s = EdgeSubset(mask);
        s.check(g)?;
        Ok(s)
    }

    pub fn from_indices(indices: &[usize], g: &WeightedMultigraph) -> Result<Self> {
        let mut mask = 0u64;
        for &i in indices {
            if i >= g.edge_count() || i >= 64 {
                return Err(Error::InvalidInput(format!("edge index {i} out of range")));
            }
            mask |= 1 << i;
        }
        Ok(EdgeSubset(mask))
    }

    pub fn empty() -> Self {
        EdgeSubset(0)
    }

    pub fn all(g: &WeightedMultigraph) -> Self {
        let m = g.edge_count();
        EdgeSubset(if m >= 64 { u64::MAX } else { (1u64 << m) - 1 })
    }

    pub fn contains(self, e: usize) -> bool {
        e < 64 && self.0 >> e & 1 == 1
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    fn check(self, g: &WeightedMultigraph) -> Result<()> {
        let m = g.edge_count();
        if m > 64 {
            return Err(Error::InvalidInput("edge subsets support at most 64 edges".into()));
        }
        if m < 64 && self.0 >> m != 0 {
            return Err(Error::InvalidInput(format!("edge subset {:#b} exceeds {m} edges", self.0)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentSummary {
    pub component_count: usize,
    /// Component vertex counts, non-increasing.
    pub size_partition: IntPartition,
    /// Component total weights, non-increasing.
    pub weight_multiset: Vec<u64>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k2() -> WeightedMultigraph {
        WeightedMultigraph::complete(2)
    }

    #[test]
    fn delete_examples() {
        let g = k2().delete_edge(0).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (2, 0));
        let p3 = WeightedMultigraph::cycle(3).delete_edge(2).unwrap();
        assert_eq!(p3, WeightedMultigraph::path(3));
        let lp = WeightedMultigraph::unweighted(1, vec![(0, 0)]).unwrap().delete_edge(0).unwrap();
        assert_eq!(lp, WeightedMultigraph::unweighted(1, vec![]).unwrap());
        assert!(matches!(k2().delete_edge(1), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn contract_examples() {
        let g = k2().contract_edge(0).unwrap();
        assert_eq!(g.weights(), &[2]);
        assert_eq!(g.edge_count(), 0);

        let dbl = WeightedMultigraph::unweighted(2, vec![(0, 1), (0, 1)]).unwrap();
        let g = dbl.contract_edge(0).unwrap();
        assert_eq!(g.weights(), &[2]);
        assert_eq!(g.edges(), &[(0, 0)]);

        let g = WeightedMultigraph::cycle(3).contract_edge(0).unwrap();
        assert_eq!(g.weights(), &[2, 1]);
        assert_eq!(g.key().edges, vec![(0, 1), (0, 1)]);

        let lp = WeightedMultigraph::unweighted(1, vec![(0, 0)]).unwrap();
        assert_eq!(lp.contract_edge(0), Err(Error::ContractLoop(0)));
    }

    #[test]
    fn contraction_remaps_higher_ids() {
        let g = WeightedMultigraph::new(vec![1, 2, 3, 4], vec![(1, 2), (2, 3), (0, 3)]).unwrap();
        let (h, map) = g.contract_edge_mapped(0).unwrap();
        assert_eq!(map, vec![0, 1, 1, 2]);
        assert_eq!(h.weights(), &[1, 5, 4]);
        assert_eq!(h.edges(), &[(1, 2), (0, 2)]);
        assert_eq!(h.total_weight(), g.total_weight());
    }

    #[test]
    fn component_examples() {
        let c3 = WeightedMultigraph::cycle(3);
        let s = c3.components(EdgeSubset::empty()).unwrap();
        assert_eq!(s.component_count, 3);
        assert_eq!(s.size_partition.parts(), &[1, 1, 1]);
        let s = c3.components(EdgeSubset::from_indices(&[1], &c3).unwrap()).unwrap();
        assert_eq!(s.size_partition.parts(), &[2, 1]);
        let s = c3.components(EdgeSubset::all(&c3)).unwrap();
        assert_eq!((s.component_count, s.size_partition.parts()), (1, &[3u32][..]));
        assert!(c3.components(EdgeSubset(0b1000)).is_err());
    }

    #[test]
    fn weighted_components() {
        let g = WeightedMultigraph::new(vec![3, 1, 2], vec![(0, 1)]).unwrap();
        let s = g.components(EdgeSubset::all(&g)).unwrap();
        assert_eq!(s.weight_multiset, vec![4, 2]);
        assert_eq!(s.size_partition.parts(), &[2, 1]);
    }

    #[test]
    fn rejects_bad_graphs() {
        assert!(WeightedMultigraph::new(vec![1, 0], vec![]).is_err());
        assert!(WeightedMultigraph::new(vec![1], vec![(0, 1)]).is_err());
    }

    #[test]
    fn corpus_invariants() {
        let limits = Limits::default();
        for g in enumerate_small_graphs(4, 5).iter().chain(&random_weighted_graphs(40, 5, 6, 3)) {
            for e in 0..g.edge_count() {
                let d = g.delete_edge(e).unwrap();
                assert_eq!(d.edge_count() + 1, g.edge_count());
                assert_eq!(d.weights(), g.weights());
                if !g.is_loop(e) {
                    let c = g.contract_edge(e).unwrap();
                    assert_eq!(c.vertex_count() + 1, g.vertex_count());
                    assert_eq!(c.total_weight(), g.total_weight());
                }
            }
            g.for_each_spanning_subgraph(&limits, |a, s| {
                assert_eq!(s.size_partition.n() as usize, g.vertex_count());
                assert_eq!(s.weight_multiset.iter().sum::<u64>(), g.total_weight());
                assert_eq!(s.weight_multiset.len(), s.component_count);
                assert!(a + s.component_count >= g.vertex_count());
            })
            .unwrap();
        }
    }
}
