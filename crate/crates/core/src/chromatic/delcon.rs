//! Deletion-contraction recursion for `M^ω_{r,q}` and `B^ω_{r,q}`.
//!
//! The recursion bottoms out at loopless edgeless graphs, which are disjoint
//! unions of single vertices. Instead of evaluating those leaves for a fixed
//! `(q, k)`, the recursion returns the formal sum of leaves: a map from the
//! leaf's sorted weight multiset to its coefficient in `Z[x]`. Evaluating a
//! leaf is then the product of the single-vertex values.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::One;

use crate::exactalg::{UniPoly, Var};
use crate::graphcore::{GraphKey, WeightedMultigraph};

pub type Expansion = BTreeMap<Vec<u64>, UniPoly>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Recurrence {
    /// `M(G) = M(G - e) - M(G / e)`; a loop gives 0.
    Chromatic,
    /// `B(G) = B(G - e) + x B(G / e)`; a loop gives `(x + 1) B(G - e)`.
    Dichromatic,
}

pub struct Expander {
    rule: Recurrence,
    memo: HashMap<GraphKey, Expansion>,
}

fn add(mut a: Expansion, b: &Expansion, factor: &UniPoly) -> Expansion {
    for (leaf, c) in b {
        let t = c * factor;
        let merged = match a.remove(leaf) {
            Some(prev) => &prev + &t,
            None => t,
        };
        if !merged.is_zero() {
            a.insert(leaf.clone(), merged);
        }
    }
    a
}

impl Expander {
    pub fn new(rule: Recurrence) -> Self {
        Expander { rule, memo: HashMap::new() }
    }

    pub fn memo_len(&self) -> usize {
        self.memo.len()
    }

    pub fn expand(&mut self, g: &WeightedMultigraph) -> Expansion {
        let key = g.key();
        if let Some(hit) = self.memo.get(&key) {
            return hit.clone();
        }
        let x = UniPoly::monomial(Var::X, 1, BigInt::one());
        let one = UniPoly::one(Var::X);
        let out = if let Some(l) = (0..g.edge_count()).find(|&e| g.is_loop(e)) {
            match self.rule {
                Recurrence::Chromatic => Expansion::new(),
                Recurrence::Dichromatic => {
                    let rest = self.expand(&g.delete_edge(l).expect("valid index"));
                    add(Expansion::new(), &rest, &(&x + &one))
                }
            }
        } else if let Some(e) = g.first_non_loop_edge() {
            let del = self.expand(&g.delete_edge(e).expect("valid index"));
            let con = self.expand(&g.contract_edge(e).expect("non-loop edge"));
            let factor = match self.rule {
                Recurrence::Chromatic => -&one,
                Recurrence::Dichromatic => x,
            };
            add(del, &con, &factor)
        } else {
            let mut leaf = g.weights().to_vec();
            leaf.sort_unstable_by(|a, b| b.cmp(a));
            Expansion::from([(leaf, one)])
        };
        self.memo.insert(key, out.clone());
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k2_expands_to_two_leaves() {
        let mut ex = Expander::new(Recurrence::Chromatic);
        let e = ex.expand(&WeightedMultigraph::complete(2));
        assert_eq!(e.len(), 2);
        assert_eq!(e[&vec![1, 1]], UniPoly::one(Var::X));
        assert_eq!(e[&vec![2]], -&UniPoly::one(Var::X));
    }

    #[test]
    fn double_edge_dichromatic() {
        // B = B(2 isolated) + x B(weight-2 vertex) + x^2 ... via the loop rule:
        // G/e has a loop, so B(G/e) = (x+1) B(single vertex of weight 2).
        let g = WeightedMultigraph::unweighted(2, vec![(0, 1), (0, 1)]).unwrap();
        let e = Expander::new(Recurrence::Dichromatic).expand(&g);
        assert_eq!(e[&vec![1, 1]], UniPoly::one(Var::X));
        // from G - e: x * [2]; from G / e: x (x + 1) [2]
        assert_eq!(e[&vec![2]], UniPoly::from_coeffs(Var::X, &[0, 2, 1]));
    }

    #[test]
    fn loops_annihilate_chromatic_expansion() {
        let g = WeightedMultigraph::unweighted(2, vec![(0, 1), (1, 1)]).unwrap();
        assert!(Expander::new(Recurrence::Chromatic).expand(&g).is_empty());
    }
}
