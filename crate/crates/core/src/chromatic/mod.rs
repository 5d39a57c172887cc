//! The `(r, q)`-chromatic function `M^ω_{r,q}`, the `(r, q)`-dichromate
//! `B^ω_{r,q}`, the q-chromatic function `M_q` and the q-dichromate `B_q`.
//!
//! Every function has at least two independent routes: a sum over
//! colourings, a sum over spanning subgraphs and (for `M` and `B`) the
//! deletion-contraction recursion. With `q` and `k` fixed the values are
//! polynomials in `r` (and `x` for `B`) with integer coefficients, so the
//! `*_poly` forms return those and the numeric forms evaluate them.
//!
//! Conventions: `k = 0` gives no colourings and empty inner sums, so any
//! graph with a vertex evaluates to 0; the vertexless graph evaluates to 1.

mod delcon;
mod table;

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub use delcon::{Expander, Expansion, Recurrence};
pub use table::{ExponentVector, RExponentTable};
pub(crate) use table::{serialize_table, table_poly};

use crate::error::{Error, Result};
use crate::exactalg::{falling_factorial, q_integer, BivariatePoly, UniPoly, Var};
use crate::graphcore::WeightedMultigraph;
use crate::limits::Limits;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvalPoint {
    pub r: BigRational,
    pub q: u64,
    pub k: u32,
    pub x: BigRational,
}

impl EvalPoint {
    pub fn new(r: BigRational, q: u64, k: u32, x: BigRational) -> Self {
        EvalPoint { r, q, k, x }
    }
}

/// `[q^0, q^1, ..., q^{k-1}]`.
fn q_powers(q: u64, k: u32) -> Result<Vec<u64>> {
    let mut out = Vec::with_capacity(k as usize);
    let mut p: u64 = 1;
    for i in 0..k {
        out.push(p);
        if i + 1 < k {
            p = p.checked_mul(q).ok_or(Error::Overflow("q^i"))?;
        }
    }
    Ok(out)
}

/// `Σ_{i<k} r^{w q^i}`, the value on a single vertex of weight `w`.
pub fn vertex_factor(w: u64, q: u64, k: u32) -> Result<UniPoly> {
    let mut p = UniPoly::zero(Var::R);
    for qi in q_powers(q, k)? {
        p.add_term(w.checked_mul(qi).ok_or(Error::Overflow("r exponent"))?, BigInt::one());
    }
    Ok(p)
}

/// Products `Π_w vertex_factor(w, q, k)` keyed by the sorted weight list. The
/// memo is per thread and shared across graphs, since corpora repeat the same
/// component weight multisets constantly.
struct FactorCache {
    q: u64,
    k: u32,
}

type ProductMemo = HashMap<(u64, u32), HashMap<Vec<u64>, Rc<UniPoly>>>;

thread_local! {
    static PRODUCTS: RefCell<ProductMemo> = RefCell::new(HashMap::new());
}

const PRODUCT_MEMO_LIMIT: usize = 1 << 16;

impl FactorCache {
    fn new(q: u64, k: u32) -> Self {
        FactorCache { q, k }
    }

    fn product(&mut self, weights: &[u64]) -> Result<Rc<UniPoly>> {
        let qk = (self.q, self.k);
        if let Some(p) = PRODUCTS.with(|m| m.borrow().get(&qk).and_then(|inner| inner.get(weights)).cloned()) {
            return Ok(p);
        }
        let mut acc = UniPoly::one(Var::R);
        for &w in weights {
            acc = &acc * &vertex_factor(w, self.q, self.k)?;
            if acc.is_zero() {
                break;
            }
        }
        let acc = Rc::new(acc);
        PRODUCTS.with(|m| {
            let mut m = m.borrow_mut();
            let inner = m.entry(qk).or_default();
            if inner.len() >= PRODUCT_MEMO_LIMIT {
                inner.clear();
            }
            inner.insert(weights.to_vec(), acc.clone());
        });
        Ok(acc)
    }
}

/// Calls `f` with every assignment `V → {0..k-1}` (one empty assignment when
/// `V` is empty).
pub(crate) fn for_each_state<F: FnMut(&[u32])>(n: usize, k: u32, limits: &Limits, mut f: F) -> Result<()> {
    limits.check_states(k, n)?;
    if n == 0 {
        f(&[]);
        return Ok(());
    }
    if k == 0 {
        return Ok(());
    }
    let mut s = vec![0u32; n];
    loop {
        f(&s);
        let mut i = 0;
        loop {
            if i == n {
                return Ok(());
            }
            s[i] += 1;
            if s[i] < k {
                break;
            }
            s[i] = 0;
            i += 1;
        }
    }
}

pub(crate) fn monochromatic_edges(g: &WeightedMultigraph, s: &[u32]) -> u32 {
    g.edges().iter().filter(|&&(a, b)| s[a] == s[b]).count() as u32
}

fn is_proper(g: &WeightedMultigraph, s: &[u32]) -> bool {
    g.edges().iter().all(|&(a, b)| s[a] != s[b])
}

/// `Σ_{s proper} r^{Σ_v ω(v) q^{s(v)}}` as a polynomial in `r`.
pub fn m_rq_statesum_poly(g: &WeightedMultigraph, q: u64, k: u32, limits: &Limits) -> Result<UniPoly> {
    let pw = q_powers(q, k)?;
    let mut counts: HashMap<u64, u64> = HashMap::new();
    let mut overflow = false;
    for_each_state(g.vertex_count(), k, limits, |s| {
        if !is_proper(g, s) {
            return;
        }
        let e = s.iter().zip(g.weights()).try_fold(0u64, |acc, (&c, &w)| acc.checked_add(w.checked_mul(pw[c as usize])?));
        match e {
            Some(e) => *counts.entry(e).or_insert(0) += 1,
            None => overflow = true,
        }
    })?;
    if overflow {
        return Err(Error::Overflow("r exponent"));
    }
    Ok(UniPoly::from_terms(Var::R, counts.into_iter().map(|(e, c)| (e, BigInt::from(c)))))
}

/// Spanning-subgraph counts keyed by `(|A|, sorted component weights)`.
pub type Profile = BTreeMap<(usize, Vec<u64>), u64>;

/// Spanning subgraphs grouped by `(|A|, sorted component weights)`.
pub fn weight_profile(g: &WeightedMultigraph, limits: &Limits) -> Result<Profile> {
    let mut profile = BTreeMap::new();
    g.for_each_spanning_subgraph(limits, |a, s| {
        *profile.entry((a, s.weight_multiset.clone())).or_insert(0) += 1;
    })?;
    Ok(profile)
}

/// `Σ_A (-1)^{|A|} Π_{C ∈ com(A)} Σ_{i<k} r^{ω(C) q^i}`.
pub fn m_rq_subset_poly(g: &WeightedMultigraph, q: u64, k: u32, limits: &Limits) -> Result<UniPoly> {
    m_rq_from_profile(&weight_profile(g, limits)?, q, k)
}

/// The subset expansion from a precomputed [`weight_profile`].
pub fn m_rq_from_profile(profile: &Profile, q: u64, k: u32) -> Result<UniPoly> {
    let mut cache = FactorCache::new(q, k);
    let mut acc = UniPoly::zero(Var::R);
    for (&(a, ref ws), &cnt) in profile {
        let sign = if a % 2 == 0 { BigInt::from(cnt) } else { -BigInt::from(cnt) };
        for (e, c) in cache.product(ws)?.terms() {
            acc.add_term(e, c * &sign);
        }
    }
    Ok(acc)
}

/// Deletion-contraction, evaluated at the leaves.
pub fn m_rq_delcon_poly(g: &WeightedMultigraph, q: u64, k: u32) -> Result<UniPoly> {
    m_rq_from_expansion(&Expander::new(Recurrence::Chromatic).expand(g), q, k)
}

/// Evaluates the leaves of a chromatic expansion (shareable across `(q, k)`).
pub fn m_rq_from_expansion(expansion: &Expansion, q: u64, k: u32) -> Result<UniPoly> {
    let mut cache = FactorCache::new(q, k);
    let mut acc = UniPoly::zero(Var::R);
    for (leaf, coeff) in expansion {
        debug_assert!(coeff.degree() == Some(0));
        acc = &acc + &cache.product(leaf)?.scale(&coeff.coeff(0));
    }
    Ok(acc)
}

pub fn m_rq_statesum(g: &WeightedMultigraph, p: &EvalPoint, limits: &Limits) -> Result<BigRational> {
    Ok(m_rq_statesum_poly(g, p.q, p.k, limits)?.eval(&p.r))
}

pub fn m_rq_subset(g: &WeightedMultigraph, p: &EvalPoint, limits: &Limits) -> Result<BigRational> {
    Ok(m_rq_subset_poly(g, p.q, p.k, limits)?.eval(&p.r))
}

pub fn m_rq_delcon(g: &WeightedMultigraph, p: &EvalPoint) -> Result<BigRational> {
    Ok(m_rq_delcon_poly(g, p.q, p.k)?.eval(&p.r))
}

/// `Σ_A x^{|A|} Π_C Σ_{i<k} r^{ω(C) q^i}` as a polynomial in `(x, r)`.
pub fn b_rq_subset_poly(g: &WeightedMultigraph, q: u64, k: u32, limits: &Limits) -> Result<BivariatePoly> {
    b_rq_from_profile(&weight_profile(g, limits)?, q, k)
}

pub fn b_rq_from_profile(profile: &Profile, q: u64, k: u32) -> Result<BivariatePoly> {
    let mut cache = FactorCache::new(q, k);
    let mut acc = BivariatePoly::zero(Var::X, Var::R);
    for (&(a, ref ws), &cnt) in profile {
        let cnt = BigInt::from(cnt);
        for (e, c) in cache.product(ws)?.terms() {
            acc.add_term(a as u64, e, c * &cnt);
        }
    }
    Ok(acc)
}

/// Lemma-5 style recursion: `B(G) = B(G-e) + x B(G/e)`, loops give `(x+1)`.
pub fn b_rq_delcon_poly(g: &WeightedMultigraph, q: u64, k: u32) -> Result<BivariatePoly> {
    b_rq_from_expansion(&Expander::new(Recurrence::Dichromatic).expand(g), q, k)
}

pub fn b_rq_from_expansion(expansion: &Expansion, q: u64, k: u32) -> Result<BivariatePoly> {
    let mut cache = FactorCache::new(q, k);
    let mut acc = BivariatePoly::zero(Var::X, Var::R);
    for (leaf, xpoly) in expansion {
        let rpoly = cache.product(leaf)?;
        for (dx, cx) in xpoly.terms() {
            for (dr, cr) in rpoly.terms() {
                acc.add_term(dx, dr, cx * cr);
            }
        }
    }
    Ok(acc)
}

pub fn b_rq_numeric(g: &WeightedMultigraph, p: &EvalPoint, limits: &Limits) -> Result<BigRational> {
    Ok(b_rq_subset_poly(g, p.q, p.k, limits)?.eval(&p.x, &p.r))
}

pub fn b_rq_delcon(g: &WeightedMultigraph, p: &EvalPoint) -> Result<BigRational> {
    Ok(b_rq_delcon_poly(g, p.q, p.k)?.eval(&p.x, &p.r))
}

/// Distribution of colour-class weight vectors when each component of
/// the given weights picks one of `k` colours.
fn class_distribution(weights: &[u64], k: u32) -> BTreeMap<ExponentVector, BigInt> {
    let mut dist = BTreeMap::from([(ExponentVector::zeros(k), BigInt::one())]);
    for &w in weights {
        let mut next = BTreeMap::new();
        for (c, v) in &dist {
            for i in 0..k as usize {
                let mut c2 = c.clone();
                c2.0[i] += w;
                *next.entry(c2).or_insert_with(BigInt::zero) += v;
            }
        }
        dist = next;
    }
    dist
}

fn binomial_row(a: usize) -> Vec<BigInt> {
    let mut row = vec![BigInt::one()];
    for _ in 0..a {
        let mut next = vec![BigInt::one(); row.len() + 1];
        for i in 1..row.len() {
            next[i] = &row[i - 1] + &row[i];
        }
        row = next;
    }
    row
}

/// `B^ω_{r,q}(G; t - 1, k)` with `r` and `q` formal: coefficient of
/// `t^b r^{Σ c_i q^i}` for each `(b, c)`.
///
/// Built from the subset expansion `Σ_A (t - 1)^{|A|} Π_C Σ_i r^{ω(C) q^i}`
/// by expanding the binomial and the colour choice per component; the
/// classical colouring-sum route lives in `classicpoly::xb_truncated`.
pub fn b_rq_symbolic(g: &WeightedMultigraph, k: u32, limits: &Limits) -> Result<RExponentTable> {
    let mut table = RExponentTable::new(k);
    let mut dist_cache: HashMap<Vec<u64>, BTreeMap<ExponentVector, BigInt>> = HashMap::new();
    for ((a, ws), cnt) in weight_profile(g, limits)? {
        let dist = dist_cache.entry(ws.clone()).or_insert_with(|| class_distribution(&ws, k));
        if dist.is_empty() {
            continue;
        }
        let binom = binomial_row(a);
        for (b, bc) in binom.iter().enumerate() {
            // (t - 1)^a = Σ_b C(a, b) t^b (-1)^{a - b}
            let mut coef = bc * BigInt::from(cnt);
            if (a - b) % 2 == 1 {
                coef = -coef;
            }
            for (c, v) in dist.iter() {
                table.add(b as u32, c.clone(), &coef * v)?;
            }
        }
    }
    Ok(table)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MqAlgorithm {
    StateSum,
    Subset,
}

/// `M_q(G; k) = Σ_{s proper} q^{Σ_v ω(v) s(v)}` as a polynomial in `q`.
pub fn m_q_statesum_poly(g: &WeightedMultigraph, k: u32, limits: &Limits) -> Result<UniPoly> {
    let mut counts: HashMap<u64, u64> = HashMap::new();
    for_each_state(g.vertex_count(), k, limits, |s| {
        if is_proper(g, s) {
            let e: u64 = s.iter().zip(g.weights()).map(|(&c, &w)| c as u64 * w).sum();
            *counts.entry(e).or_insert(0) += 1;
        }
    })?;
    Ok(UniPoly::from_terms(Var::Q, counts.into_iter().map(|(e, c)| (e, BigInt::from(c)))))
}

/// `Σ_A (-1)^{|A|} Π_W [k]_{q^{ω(W)}}` with the q-integer
/// `[k]_{q^m} = 1 + q^m + ... + q^{(k-1)m}`.
pub fn m_q_subset_poly(g: &WeightedMultigraph, k: u32, limits: &Limits) -> Result<UniPoly> {
    let mut acc = UniPoly::zero(Var::Q);
    for ((a, ws), cnt) in weight_profile(g, limits)? {
        let prod = ws.iter().fold(UniPoly::one(Var::Q), |p, &w| &p * &q_integer(k, w));
        let sign = if a % 2 == 0 { BigInt::from(cnt) } else { -BigInt::from(cnt) };
        acc = &acc + &prod.scale(&sign);
    }
    Ok(acc)
}

pub fn m_q(g: &WeightedMultigraph, k: u32, q: u64, algorithm: MqAlgorithm, limits: &Limits) -> Result<BigInt> {
    let poly = match algorithm {
        MqAlgorithm::StateSum => m_q_statesum_poly(g, k, limits)?,
        MqAlgorithm::Subset => m_q_subset_poly(g, k, limits)?,
    };
    Ok(poly.eval_int(&BigInt::from(q)))
}

/// q-dichromate `B_q(G, x, k) = Σ_A x^{|A|} Π_W [k]_{q^{ω(W)}}`.
pub fn b_q(g: &WeightedMultigraph, x: &BigRational, k: u32, q: u64, limits: &Limits) -> Result<BigRational> {
    Ok(b_q_from_profile(&weight_profile(g, limits)?, x, k, q))
}

pub fn b_q_from_profile(profile: &Profile, x: &BigRational, k: u32, q: u64) -> BigRational {
    let qb = BigInt::from(q);
    let mut p = UniPoly::zero(Var::X);
    for (&(a, ref ws), &cnt) in profile {
        let prod: BigInt = ws.iter().map(|&w| q_integer(k, w).eval_int(&qb)).product();
        p.add_term(a as u64, prod * BigInt::from(cnt));
    }
    p.eval(x)
}

/// `B_q` with each component factor read as the falling factorial
/// `(k)_{q^{ω(W)}} = k (k-1) ... (k - q^{ω(W)} + 1)`. Kept as a negative
/// control: this reading does not satisfy the Potts state-sum identity.
pub fn b_q_falling(g: &WeightedMultigraph, x: &BigRational, k: u32, q: u64, limits: &Limits) -> Result<BigRational> {
    Ok(b_q_falling_from_profile(&weight_profile(g, limits)?, x, k, q))
}

pub fn b_q_falling_from_profile(profile: &Profile, x: &BigRational, k: u32, q: u64) -> BigRational {
    let kb = BigInt::from(k);
    let mut p = UniPoly::zero(Var::X);
    for (&(a, ref ws), &cnt) in profile {
        let prod: BigInt = ws
            .iter()
            .map(|&w| match q.checked_pow(w as u32) {
                Some(len) => falling_factorial(&kb, len),
                // length beyond k: the product passes through zero
                None => BigInt::zero(),
            })
            .product();
        p.add_term(a as u64, prod * BigInt::from(cnt));
    }
    p.eval(x)
}
