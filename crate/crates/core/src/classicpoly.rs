//! The U-polynomial, the k-colour truncation of the bad-colouring symmetric
//! function XB, and the substitutions relating both to `B_{r,q}`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::chromatic::{for_each_state, monochromatic_edges, serialize_table, table_poly, ExponentVector, RExponentTable};
use crate::error::{Error, Result};
use crate::exactalg::{rational_pow, BivariatePoly, UniPoly, Var};
use crate::graphcore::WeightedMultigraph;
use crate::limits::Limits;
use crate::partitiondep::IntPartition;

/// Coefficients of `x(τ) (z - 1)^d`, keyed by `(τ, d)`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct UPolynomial {
    terms: BTreeMap<(IntPartition, u32), BigInt>,
}

impl UPolynomial {
    pub fn terms(&self) -> impl Iterator<Item = (&IntPartition, u32, &BigInt)> + '_ {
        self.terms.iter().map(|((t, d), c)| (t, *d, c))
    }

    pub fn coeff(&self, tau: &IntPartition, zm1_power: u32) -> BigInt {
        self.terms.get(&(tau.clone(), zm1_power)).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_mass(&self) -> BigInt {
        self.terms.values().sum()
    }

    /// `Σ coeff · Π_i x_{n_i} · (z - 1)^d` with `z - 1` and `x_j` supplied.
    pub fn evaluate<F: FnMut(u32) -> BigRational>(&self, zm1: &BigRational, mut x: F) -> BigRational {
        let mut cache: BTreeMap<u32, BigRational> = BTreeMap::new();
        let mut acc = BigRational::zero();
        for ((tau, d), c) in &self.terms {
            let mut term = rational_pow(zm1, *d as u64) * BigRational::from_integer(c.clone());
            for &part in tau.parts() {
                let xv = cache.entry(part).or_insert_with(|| x(part));
                term *= &*xv;
            }
            acc += term;
        }
        acc
    }
}

impl Serialize for UPolynomial {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Term<'a> {
            partition: &'a [u32],
            zm1_power: u32,
            coeff: String,
        }
        // reverse-lexicographic partitions, then ascending (z - 1) powers
        let mut rows: Vec<_> = self.terms.iter().collect();
        rows.sort_by(|a, b| b.0 .0.cmp(&a.0 .0).then(a.0 .1.cmp(&b.0 .1)));
        let terms: Vec<Term> = rows
            .into_iter()
            .map(|((t, d), c)| Term { partition: t.parts(), zm1_power: *d, coeff: c.to_string() })
            .collect();
        let mut st = s.serialize_struct("UPolynomial", 1)?;
        st.serialize_field("terms", &terms)?;
        st.end()
    }
}

/// `U(G) = Σ_A x(τ_A) (z - 1)^{|A| - |V| + k(A)}`. Vertex weights are ignored.
pub fn u_polynomial(g: &WeightedMultigraph, limits: &Limits) -> Result<UPolynomial> {
    let n = g.vertex_count();
    let mut u = UPolynomial::default();
    g.for_each_spanning_subgraph(limits, |a, s| {
        let d = (a + s.component_count - n) as u32;
        *u.terms.entry((s.size_partition.clone(), d)).or_insert_with(BigInt::zero) += 1;
    })?;
    Ok(u)
}

/// Coefficients `K(k, b, c)` of `t^b Π_{i<k} x_i^{c_i}` in `XB(G; t - 1, x_0, ..)`
/// with `x_i = 0` for `i >= k`: the number of colourings `V → {0..k-1}` with
/// `b` monochromatic edges and colour-class sizes `c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct XBTable {
    k: u32,
    terms: BTreeMap<(u32, ExponentVector), BigInt>,
}

impl XBTable {
    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, &ExponentVector, &BigInt)> + '_ {
        self.terms.iter().map(|((b, c), v)| (*b, c, v))
    }

    pub fn coeff(&self, b: u32, c: &ExponentVector) -> BigInt {
        self.terms.get(&(b, c.clone())).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `Σ a_c t^b r^{Σ c_i q^i}` at a fixed `q`, over `(t, r)`.
    pub fn to_poly(&self, q: u64) -> Result<BivariatePoly> {
        table_poly(&self.terms, q)
    }
}

impl Serialize for XBTable {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        serialize_table(s, "XBTable", self.k, &self.terms)
    }
}

/// Colouring sum for the truncated XB. Vertex weights are ignored: every
/// vertex contributes one to its colour class.
pub fn xb_truncated(g: &WeightedMultigraph, k: u32, limits: &Limits) -> Result<XBTable> {
    let mut counts: BTreeMap<(u32, ExponentVector), u64> = BTreeMap::new();
    for_each_state(g.vertex_count(), k, limits, |s| {
        let mut c = ExponentVector::zeros(k);
        for &col in s {
            c.0[col as usize] += 1;
        }
        *counts.entry((monochromatic_edges(g, s), c)).or_insert(0) += 1;
    })?;
    Ok(XBTable { k, terms: counts.into_iter().map(|(key, v)| (key, BigInt::from(v))).collect() })
}

/// `XB(G; t - 1, x_0, ...)` at `x_i = r^{q^i}` for `i < k`, `x_i = 0` beyond.
pub fn brq_from_xb(xb: &XBTable, r: &BigRational, q: u64, t: &BigRational) -> Result<BigRational> {
    Ok(xb.to_poly(q)?.eval(t, r))
}

/// Reads the XB coefficients off a `B_{r,q}(G; t - 1, k)` table produced with
/// unit weights. Each coefficient `a_c` must be a non-negative integer and
/// each class vector must sum to the vertex count; anything else means the
/// table is not the unique representation.
pub fn xb_from_brq(table: &RExponentTable, vertex_count: usize) -> Result<XBTable> {
    let (k, terms) = table.clone().into_parts();
    let mut out = BTreeMap::new();
    for ((b, c), v) in terms {
        if c.total() != vertex_count as u64 {
            return Err(Error::Representation(format!("class vector {:?} does not sum to {vertex_count}", c.0)));
        }
        if v.is_negative() {
            return Err(Error::Representation(format!("negative coefficient {v} at t^{b} {:?}", c.0)));
        }
        if out.insert((b, c.clone()), v).is_some() {
            return Err(Error::Representation(format!("duplicate key t^{b} {:?}", c.0)));
        }
    }
    Ok(XBTable { k, terms: out })
}

/// The inverse re-keying, `XB` table to the `B_{r,q}` exponent table.
pub fn brq_table_from_xb(xb: &XBTable) -> RExponentTable {
    RExponentTable::from_parts(xb.k, xb.terms.clone())
}

/// Checks the dominance step of the uniqueness argument at a given `(r, q)`:
/// for every power of `t`, the term with the right-lexicographically largest
/// class vector outweighs the sum of all other terms in absolute value.
pub fn dominance_holds(table: &RExponentTable, r: &BigRational, q: u64) -> Result<bool> {
    let mut by_b: BTreeMap<u32, Vec<(&ExponentVector, &BigInt)>> = BTreeMap::new();
    for (b, c, v) in table.terms() {
        by_b.entry(b).or_default().push((c, v));
    }
    for terms in by_b.values() {
        let (top, rest): (Vec<_>, Vec<_>) = {
            let best = terms.iter().max_by(|a, b| a.0.cmp_right_lex(b.0)).expect("nonempty");
            let best_c = best.0;
            terms.iter().partition(|t| t.0 == best_c)
        };
        let mag = |(c, v): &(&ExponentVector, &BigInt)| -> Result<BigRational> {
            let e = c.r_exponent(q).ok_or(Error::Overflow("r exponent"))?;
            Ok(rational_pow(r, e) * BigRational::from_integer(v.abs()))
        };
        let lead = mag(top[0])?;
        let mut others = BigRational::zero();
        for t in &rest {
            others += mag(t)?;
        }
        if lead <= others {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `x^{|V|} · U(G; z = x + 1, x_j = x^{-1} Σ_{i<k} r^{j q^i})`, which equals
/// `B_{r,q}(G; x, k)` for unit weights.
pub fn brq_from_u(u: &UPolynomial, vertex_count: usize, r: &BigRational, q: u64, k: u32, x: &BigRational) -> Result<BigRational> {
    if x.is_zero() {
        return Err(Error::SubstitutionUndefined("x = 0 (evaluate B_{r,q} directly)"));
    }
    Ok(brq_poly_from_u(u, vertex_count, q, k)?.eval(x, r))
}

/// The substitution with `r` and `x` formal. Each term `x(τ)(z-1)^d` becomes
/// `x^{d + |V| - len(τ)} Π_j Σ_i r^{j q^i}`, and the power of `x` is `|A| ≥ 0`,
/// so the result is a polynomial in `(x, r)`.
pub fn brq_poly_from_u(u: &UPolynomial, vertex_count: usize, q: u64, k: u32) -> Result<BivariatePoly> {
    let mut powers = Vec::with_capacity(k as usize);
    let mut qi: u64 = 1;
    for i in 0..k {
        powers.push(qi);
        if i + 1 < k {
            qi = qi.checked_mul(q).ok_or(Error::Overflow("q^i"))?;
        }
    }
    let mut sums: BTreeMap<u32, UniPoly> = BTreeMap::new();
    let mut out = BivariatePoly::zero(Var::X, Var::R);
    for ((tau, d), c) in &u.terms {
        let mut prod = UniPoly::one(Var::R);
        for &j in tau.parts() {
            if !sums.contains_key(&j) {
                let mut s = UniPoly::zero(Var::R);
                for &p in &powers {
                    s.add_term((j as u64).checked_mul(p).ok_or(Error::Overflow("r exponent"))?, BigInt::one());
                }
                sums.insert(j, s);
            }
            prod = &prod * &sums[&j];
        }
        let xdeg = (*d as u64 + vertex_count as u64)
            .checked_sub(tau.parts().len() as u64)
            .ok_or_else(|| Error::Representation("U term with more components than vertices".into()))?;
        for (e, v) in prod.terms() {
            out.add_term(xdeg, e, v * c);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chromatic::{b_rq_numeric, b_rq_symbolic, EvalPoint};

    fn tau(p: &[u32]) -> IntPartition {
        IntPartition::new(p.to_vec()).unwrap()
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn u_of_k2_and_c3() {
        let l = Limits::default();
        let u = u_polynomial(&WeightedMultigraph::complete(2), &l).unwrap();
        assert_eq!(u.len(), 2);
        assert_eq!(u.coeff(&tau(&[1, 1]), 0), BigInt::one());
        assert_eq!(u.coeff(&tau(&[2]), 0), BigInt::one());

        let u = u_polynomial(&WeightedMultigraph::cycle(3), &l).unwrap();
        assert_eq!(u.len(), 4);
        assert_eq!(u.coeff(&tau(&[1, 1, 1]), 0), BigInt::from(1));
        assert_eq!(u.coeff(&tau(&[2, 1]), 0), BigInt::from(3));
        assert_eq!(u.coeff(&tau(&[3]), 0), BigInt::from(3));
        assert_eq!(u.coeff(&tau(&[3]), 1), BigInt::from(1));
        assert_eq!(u.total_mass(), BigInt::from(8));

        let u = u_polynomial(&WeightedMultigraph::unweighted(1, vec![]).unwrap(), &l).unwrap();
        assert_eq!(u.coeff(&tau(&[1]), 0), BigInt::one());
        assert_eq!(u.len(), 1);
    }

    #[test]
    fn u_json_ordering() {
        let u = u_polynomial(&WeightedMultigraph::cycle(3), &Limits::default()).unwrap();
        let s = serde_json::to_string(&u).unwrap();
        assert_eq!(
            s,
            r#"{"terms":[{"partition":[3],"zm1_power":0,"coeff":"3"},{"partition":[3],"zm1_power":1,"coeff":"1"},{"partition":[2,1],"zm1_power":0,"coeff":"3"},{"partition":[1,1,1],"zm1_power":0,"coeff":"1"}]}"#
        );
    }

    #[test]
    fn xb_examples() {
        let l = Limits::default();
        let ev = |v: &[u64]| ExponentVector(v.to_vec());
        let xb = xb_truncated(&WeightedMultigraph::unweighted(1, vec![]).unwrap(), 2, &l).unwrap();
        assert_eq!(xb.len(), 2);
        assert_eq!(xb.coeff(0, &ev(&[1, 0])), BigInt::one());
        let xb = xb_truncated(&WeightedMultigraph::complete(2), 2, &l).unwrap();
        assert_eq!(xb.len(), 3);
        assert_eq!(xb.coeff(0, &ev(&[1, 1])), BigInt::from(2));
        assert_eq!(xb.coeff(1, &ev(&[2, 0])), BigInt::one());
        assert_eq!(xb.coeff(1, &ev(&[0, 2])), BigInt::one());
        let xb = xb_truncated(&WeightedMultigraph::complete(2), 1, &l).unwrap();
        assert_eq!(xb.len(), 1);
        assert_eq!(xb.coeff(1, &ev(&[2])), BigInt::one());
    }

    #[test]
    fn brq_from_xb_examples() {
        let l = Limits::default();
        let xb = xb_truncated(&WeightedMultigraph::complete(2), 2, &l).unwrap();
        let v = brq_from_xb(&xb, &rat(2, 1), 1, &rat(2, 1)).unwrap();
        assert_eq!(v, rat(24, 1));
        let p = EvalPoint::new(rat(2, 1), 1, 2, rat(1, 1));
        assert_eq!(b_rq_numeric(&WeightedMultigraph::complete(2), &p, &l).unwrap(), v);

        let one = xb_truncated(&WeightedMultigraph::unweighted(1, vec![]).unwrap(), 2, &l).unwrap();
        assert_eq!(brq_from_xb(&one, &rat(3, 2), 2, &rat(5, 1)).unwrap(), rat(3, 2) + rat(9, 4));

        let zero_k = xb_truncated(&WeightedMultigraph::complete(2), 0, &l).unwrap();
        assert_eq!(brq_from_xb(&zero_k, &rat(2, 1), 2, &rat(1, 1)).unwrap(), rat(0, 1));
    }

    #[test]
    fn round_trips() {
        let l = Limits::default();
        for (g, k) in [
            (WeightedMultigraph::complete(2), 2),
            (WeightedMultigraph::unweighted(1, vec![]).unwrap(), 2),
            (WeightedMultigraph::cycle(3), 3),
        ] {
            let brq = b_rq_symbolic(&g, k, &l).unwrap();
            let xb = xb_truncated(&g, k, &l).unwrap();
            assert_eq!(xb_from_brq(&brq, g.vertex_count()).unwrap(), xb);
            assert_eq!(brq_table_from_xb(&xb), brq);
        }
    }

    #[test]
    fn corrupted_tables_are_rejected() {
        let mut t = RExponentTable::new(2);
        t.add(0, ExponentVector(vec![1, 1]), BigInt::from(-1)).unwrap();
        assert!(matches!(xb_from_brq(&t, 2), Err(Error::Representation(_))));
        assert!(matches!(xb_from_brq(&t, 3), Err(Error::Representation(_))));
    }

    #[test]
    fn dominance_for_large_q() {
        let l = Limits::default();
        let t = b_rq_symbolic(&WeightedMultigraph::cycle(3), 3, &l).unwrap();
        assert!(!dominance_holds(&t, &rat(2, 1), 1).unwrap());
        assert!(dominance_holds(&t, &rat(2, 1), 8).unwrap());
    }

    #[test]
    fn u_substitution_examples() {
        let l = Limits::default();
        let k2 = WeightedMultigraph::complete(2);
        let u = u_polynomial(&k2, &l).unwrap();
        assert_eq!(brq_from_u(&u, 2, &rat(2, 1), 1, 2, &rat(1, 1)).unwrap(), rat(24, 1));

        let v = WeightedMultigraph::unweighted(1, vec![]).unwrap();
        let u1 = u_polynomial(&v, &l).unwrap();
        assert_eq!(brq_from_u(&u1, 1, &rat(3, 1), 2, 3, &rat(1, 1)).unwrap(), rat(3 + 9 + 81, 1));

        let c3 = WeightedMultigraph::cycle(3);
        let u3 = u_polynomial(&c3, &l).unwrap();
        let p = EvalPoint::new(rat(3, 2), 2, 3, rat(2, 1));
        assert_eq!(brq_from_u(&u3, 3, &p.r, p.q, p.k, &p.x).unwrap(), b_rq_numeric(&c3, &p, &l).unwrap());

        assert!(matches!(brq_from_u(&u, 2, &rat(2, 1), 1, 2, &rat(0, 1)), Err(Error::SubstitutionUndefined(_))));
    }
}
