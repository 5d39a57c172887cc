//! The k-state Potts model with a site-dependent external field, and exact
//! or floating-point checks of its relations to `B_{r,q}`, `B_q` and `U`.
//!
//! Exact checks replace `e^{βJ}` by `1 + x` with rational `x`, so the
//! coupling factor of a state is `(1 + x)^{mono(σ)}`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;
use serde_json::Value;

use crate::chromatic::{
    b_q_falling_from_profile, b_q_from_profile, b_rq_delcon_poly, for_each_state, monochromatic_edges, weight_profile, EvalPoint, Profile,
};
use crate::classicpoly::u_polynomial;
use crate::error::{Error, Result};
use crate::exactalg::{BivariatePoly, UniPoly, Var};
use crate::graphcore::WeightedMultigraph;
use crate::limits::Limits;

#[derive(Clone, Debug, PartialEq)]
pub struct PottsField {
    pub k: u32,
    /// `h[v][i]` is the energy `H_{v,i}`.
    pub h: Vec<Vec<f64>>,
    pub j: f64,
    pub beta: f64,
}

impl PottsField {
    pub fn new(k: u32, h: Vec<Vec<f64>>, j: f64, beta: f64) -> Result<Self> {
        if let Some(v) = h.iter().position(|row| row.len() != k as usize) {
            return Err(Error::InvalidInput(format!("field at vertex {v} has {} entries, expected {k}", h[v].len())));
        }
        Ok(PottsField { k, h, j, beta })
    }

    pub fn zero_field(n: usize, k: u32, j: f64, beta: f64) -> Self {
        PottsField { k, h: vec![vec![0.0; k as usize]; n], j, beta }
    }

    pub fn uniform(n: usize, per_spin: &[f64], j: f64, beta: f64) -> Self {
        PottsField { k: per_spin.len() as u32, h: vec![per_spin.to_vec(); n], j, beta }
    }

    /// Parses `{"k": .., "J": .., "beta": .., "H": {"<vertex index>": [..]}}`.
    /// `J` may be a number or a string holding a float or a fraction `a/b`.
    /// Vertices missing from `H` get zero field.
    pub fn from_json(src: &str, vertex_count: usize) -> Result<Self> {
        let v: Value = serde_json::from_str(src).map_err(|e| Error::Parse(e.to_string()))?;
        let k = v.get("k").and_then(Value::as_u64).ok_or_else(|| Error::Parse("field needs integer \"k\"".into()))? as u32;
        let j = parse_real(v.get("J").ok_or_else(|| Error::Parse("field needs \"J\"".into()))?)?;
        let beta = parse_real(v.get("beta").ok_or_else(|| Error::Parse("field needs \"beta\"".into()))?)?;
        let mut h = vec![vec![0.0; k as usize]; vertex_count];
        if let Some(map) = v.get("H") {
            let map = map.as_object().ok_or_else(|| Error::Parse("\"H\" must be an object".into()))?;
            for (key, row) in map {
                let idx: usize = key.parse().map_err(|_| Error::Parse(format!("bad vertex index {key:?} in H")))?;
                if idx >= vertex_count {
                    return Err(Error::Parse(format!("H mentions vertex {idx} but the graph has {vertex_count}")));
                }
                let row = row.as_array().ok_or_else(|| Error::Parse(format!("H[{key}] must be a list")))?;
                h[idx] = row.iter().map(parse_real).collect::<Result<_>>()?;
            }
        }
        PottsField::new(k, h, j, beta).map_err(|e| Error::Parse(e.to_string()))
    }
}

fn parse_real(v: &Value) -> Result<f64> {
    match v {
        Value::Number(n) => n.as_f64().ok_or_else(|| Error::Parse(format!("bad number {n}"))),
        Value::String(s) => {
            if let Some((a, b)) = s.split_once('/') {
                let a: f64 = a.trim().parse().map_err(|_| Error::Parse(format!("bad fraction {s:?}")))?;
                let b: f64 = b.trim().parse().map_err(|_| Error::Parse(format!("bad fraction {s:?}")))?;
                Ok(a / b)
            } else {
                s.trim().parse().map_err(|_| Error::Parse(format!("bad number {s:?}")))
            }
        }
        _ => Err(Error::Parse(format!("expected a number, got {v}"))),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpinState(pub Vec<u32>);

/// `h(σ) = -J Σ_{uv} δ(σu, σv) - Σ_v H_{v, σ(v)}`.
pub fn hamiltonian(g: &WeightedMultigraph, sigma: &SpinState, f: &PottsField) -> f64 {
    ham(g, &sigma.0, f)
}

fn ham(g: &WeightedMultigraph, s: &[u32], f: &PottsField) -> f64 {
    let field: f64 = s.iter().enumerate().map(|(v, &i)| f.h[v][i as usize]).sum();
    -f.j * monochromatic_edges(g, s) as f64 - field
}

/// `Z = Σ_σ e^{-β h(σ)}`.
pub fn partition_function(g: &WeightedMultigraph, f: &PottsField, limits: &Limits) -> Result<f64> {
    if f.h.len() != g.vertex_count() {
        return Err(Error::InvalidInput(format!("field covers {} vertices, graph has {}", f.h.len(), g.vertex_count())));
    }
    let mut z = 0.0;
    for_each_state(g.vertex_count(), f.k, limits, |s| z += (-f.beta * ham(g, s, f)).exp())?;
    Ok(z)
}

fn checked_pow(b: u64, e: u64) -> Result<u64> {
    let e = u32::try_from(e).map_err(|_| Error::Overflow("exponent"))?;
    b.checked_pow(e).ok_or(Error::Overflow("exponent"))
}

fn ratio_str(v: &BigRational) -> String {
    v.to_string()
}

fn placement_name(outer: bool, inner: bool) -> &'static str {
    match (outer, inner) {
        (true, true) => "both",
        (true, false) => "outer",
        (false, true) => "inner",
        (false, false) => "neither",
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lemma6Report {
    pub lhs: BigRational,
    /// State sum with `r^{Σ ω(v) q^{σ(v)}}`.
    pub rhs_outer: BigRational,
    /// State sum with `r^{Σ q^{ω(v) σ(v)}}`.
    pub rhs_inner: BigRational,
    pub match_outer: bool,
    pub match_inner: bool,
}

impl Lemma6Report {
    pub fn placement(&self) -> &'static str {
        placement_name(self.match_outer, self.match_inner)
    }

    pub fn to_json(&self) -> Value {
        serde_json::json!({
            "lhs": ratio_str(&self.lhs),
            "rhs": ratio_str(&self.rhs_outer),
            "rhs_inner": ratio_str(&self.rhs_inner),
            "match": self.match_outer,
            "match_inner": self.match_inner,
            "placement": self.placement(),
        })
    }
}

/// The two state sums `Σ_σ t^{mono(σ)} r^{E(σ)}` as polynomials in `(t, r)`,
/// with `E(σ) = Σ ω(v) q^{σ(v)}` (first) and `E(σ) = Σ q^{ω(v) σ(v)}` (second).
/// Substituting `t = 1 + x` gives the exact form of the Potts sum.
pub fn lemma6_state_sums(g: &WeightedMultigraph, q: u64, k: u32, limits: &Limits) -> Result<(BivariatePoly, BivariatePoly)> {
    let mut outer = BivariatePoly::zero(Var::T, Var::R);
    let mut inner = BivariatePoly::zero(Var::T, Var::R);
    let mut err = None;
    for_each_state(g.vertex_count(), k, limits, |s| {
        let mut e = (0u64, 0u64);
        for (v, &c) in s.iter().enumerate() {
            let w = g.weight(v);
            let step = checked_pow(q, c as u64)
                .and_then(|qc| w.checked_mul(qc).ok_or(Error::Overflow("exponent")))
                .and_then(|a| Ok((a, checked_pow(q, w * c as u64)?)));
            match step {
                Ok((a, b)) => {
                    e.0 += a;
                    e.1 += b;
                }
                Err(x) => err = Some(x),
            }
        }
        let mono = monochromatic_edges(g, s) as u64;
        outer.add_term(mono, e.0, BigInt::one());
        inner.add_term(mono, e.1, BigInt::one());
    })?;
    match err {
        Some(e) => Err(e),
        None => Ok((outer, inner)),
    }
}

/// Compares a precomputed `B^ω_{r,q}` polynomial in `(x, r)` with the state sums
/// of [`lemma6_state_sums`] at one point.
pub fn lemma6_compare(lhs: &BivariatePoly, sums: &(BivariatePoly, BivariatePoly), p: &EvalPoint) -> Lemma6Report {
    let lhs = lhs.eval(&p.x, &p.r);
    let t = BigRational::one() + &p.x;
    let rhs_outer = sums.0.eval(&t, &p.r);
    let rhs_inner = sums.1.eval(&t, &p.r);
    Lemma6Report { match_outer: lhs == rhs_outer, match_inner: lhs == rhs_inner, lhs, rhs_outer, rhs_inner }
}

/// `B^ω_{r,q}(G; x, k)` from the deletion-contraction recursion against
/// `Σ_σ (1 + x)^{mono(σ)} r^{E(σ)}` under both exponent placements.
pub fn verify_lemma6(g: &WeightedMultigraph, p: &EvalPoint, limits: &Limits) -> Result<Lemma6Report> {
    let lhs = b_rq_delcon_poly(g, p.q, p.k)?;
    Ok(lemma6_compare(&lhs, &lemma6_state_sums(g, p.q, p.k, limits)?, p))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BPottsReport {
    /// `B_q` with q-integer inner factors.
    pub lhs: BigRational,
    /// `Σ_s q^{Σ ω(v) s(v)} (1 + x)^{mono(s)}`.
    pub rhs: BigRational,
    /// `B_q` with falling-factorial inner factors.
    pub falling: BigRational,
}

impl BPottsReport {
    pub fn matches(&self) -> bool {
        self.lhs == self.rhs
    }

    pub fn falling_matches(&self) -> bool {
        self.falling == self.rhs
    }

    pub fn to_json(&self) -> Value {
        serde_json::json!({
            "lhs": ratio_str(&self.lhs),
            "rhs": ratio_str(&self.rhs),
            "match": self.matches(),
            "falling_lhs": ratio_str(&self.falling),
            "falling_match": self.falling_matches(),
            "placement": "q-integer",
        })
    }
}

pub fn verify_bpotts(g: &WeightedMultigraph, q: u64, k: u32, x: &BigRational, limits: &Limits) -> Result<BPottsReport> {
    let profile = weight_profile(g, limits)?;
    let hist = bpotts_histogram(g, k, limits)?;
    Ok(bpotts_report(&profile, &hist, q, k, x))
}

/// Number of states `s ∈ [k]^V` per `(mono(s), Σ_v ω(v) s(v))`.
pub fn bpotts_histogram(g: &WeightedMultigraph, k: u32, limits: &Limits) -> Result<BTreeMap<(u32, u64), u64>> {
    let mut hist: BTreeMap<(u32, u64), u64> = BTreeMap::new();
    let mut overflow = false;
    for_each_state(g.vertex_count(), k, limits, |s| {
        let mut e = 0u64;
        for (v, &c) in s.iter().enumerate() {
            match g.weight(v).checked_mul(c as u64).and_then(|t| e.checked_add(t)) {
                Some(t) => e = t,
                None => overflow = true,
            }
        }
        *hist.entry((monochromatic_edges(g, s), e)).or_insert(0) += 1;
    })?;
    if overflow {
        return Err(Error::Overflow("q exponent"));
    }
    Ok(hist)
}

/// [`verify_bpotts`] from a precomputed weight profile and state histogram.
pub fn bpotts_report(profile: &Profile, hist: &BTreeMap<(u32, u64), u64>, q: u64, k: u32, x: &BigRational) -> BPottsReport {
    let lhs = b_q_from_profile(profile, x, k, q);
    let falling = b_q_falling_from_profile(profile, x, k, q);
    let mut p = UniPoly::zero(Var::X);
    for (&(mono, e), &n) in hist {
        p.add_term(mono as u64, num_traits::pow(BigInt::from(q), e as usize) * BigInt::from(n));
    }
    let rhs = p.eval(&(BigRational::one() + x));
    BPottsReport { lhs, rhs, falling }
}

pub const UPOTTS_RTOL: f64 = 1e-9;

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= UPOTTS_RTOL * a.abs().max(b.abs())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UPottsReport {
    /// `U` at `z - 1 = e^{βJ} - 1`, `x_i = Σ_j e^{iβH_j} / (e^{βJ} - 1)`.
    pub u_value: f64,
    /// `Σ_s e^{Σ_v βH_{s(v)}} e^{βJ mono(s)}`, computed as a Potts partition function.
    pub state_sum: f64,
    /// `(e^{βJ} - 1)^{|V|} · state_sum`, the `+|V|` variant.
    pub candidate_plus: f64,
    /// `(e^{βJ} - 1)^{-|V|} · state_sum`.
    pub candidate_minus: f64,
    pub match_plus: bool,
    pub match_minus: bool,
    pub placement: &'static str,
}

impl UPottsReport {
    pub fn to_json(&self) -> Value {
        serde_json::json!({
            "lhs": self.u_value,
            "rhs": self.state_sum,
            "candidate_plus": self.candidate_plus,
            "candidate_minus": self.candidate_minus,
            "match": self.match_minus || self.match_plus,
            "match_plus": self.match_plus,
            "match_minus": self.match_minus,
            "placement": self.placement,
            "rtol": UPOTTS_RTOL,
        })
    }
}

/// Floating-point check of the U/Potts relation for a field that is the same
/// list `per_spin = (H_1, .., H_k)` at every vertex. The index `i` of `x_i`
/// is the component size.
pub fn verify_upotts(g: &WeightedMultigraph, per_spin: &[f64], beta: f64, j: f64, limits: &Limits) -> Result<UPottsReport> {
    let y = (beta * j).exp() - 1.0;
    if y == 0.0 {
        return Err(Error::SubstitutionUndefined("e^{βJ} = 1"));
    }
    let n = g.vertex_count();
    let u = u_polynomial(g, limits)?;
    let mut u_value = 0.0;
    for (tau, d, c) in u.terms() {
        let xs: f64 = tau
            .parts()
            .iter()
            .map(|&i| per_spin.iter().map(|h| (i as f64 * beta * h).exp()).sum::<f64>() / y)
            .product();
        let c: f64 = c.to_string().parse().expect("integer coefficient");
        u_value += c * y.powi(d as i32) * xs;
    }
    let field = PottsField::uniform(n, per_spin, j, beta);
    let state_sum = partition_function(g, &field, limits)?;
    let candidate_plus = y.powi(n as i32) * state_sum;
    let candidate_minus = y.powi(-(n as i32)) * state_sum;
    let match_plus = close(u_value, candidate_plus);
    let match_minus = close(u_value, candidate_minus);
    let placement = match (match_plus, match_minus) {
        (true, true) => "both",
        (true, false) => "plus",
        (false, true) => "minus",
        (false, false) => "neither",
    };
    Ok(UPottsReport { u_value, state_sum, candidate_plus, candidate_minus, match_plus, match_minus, placement })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn vertex() -> WeightedMultigraph {
        WeightedMultigraph::unweighted(1, vec![]).unwrap()
    }

    #[test]
    fn hamiltonian_examples() {
        let k2 = WeightedMultigraph::complete(2);
        let f = PottsField::zero_field(2, 2, 1.5, 1.0);
        assert_eq!(hamiltonian(&k2, &SpinState(vec![1, 1]), &f), -1.5);
        assert_eq!(hamiltonian(&k2, &SpinState(vec![0, 1]), &f), 0.0);
        let f = PottsField::new(2, vec![vec![0.0, 5.0]], 1.0, 1.0).unwrap();
        assert_eq!(hamiltonian(&vertex(), &SpinState(vec![1]), &f), -5.0);
    }

    #[test]
    fn partition_function_examples() {
        let l = Limits::default();
        let z = partition_function(&vertex(), &PottsField::zero_field(1, 2, 1.0, 1.0), &l).unwrap();
        assert!((z - 2.0).abs() < 1e-12);
        let k2 = WeightedMultigraph::complete(2);
        let z = partition_function(&k2, &PottsField::zero_field(2, 2, 2f64.ln(), 1.0), &l).unwrap();
        assert!((z - 6.0).abs() < 1e-12);
        let z = partition_function(&k2, &PottsField::zero_field(2, 1, 0.8, 1.25), &l).unwrap();
        assert!((z - 1f64.exp()).abs() < 1e-12);
        assert!(PottsField::new(3, vec![vec![0.0; 2]], 1.0, 1.0).is_err());
    }

    #[test]
    fn lemma6_examples() {
        let l = Limits::default();
        let rep = verify_lemma6(&vertex(), &EvalPoint::new(rat(2, 1), 2, 3, rat(1, 1)), &l).unwrap();
        assert!(rep.match_outer && rep.match_inner);

        let k2 = WeightedMultigraph::complete(2);
        let rep = verify_lemma6(&k2, &EvalPoint::new(rat(2, 1), 2, 2, rat(1, 1)), &l).unwrap();
        // (0,0): 2·2^2, (1,1): 2·2^4, mixed: 2·2^3
        assert_eq!(rep.rhs_outer, rat(8 + 32 + 16, 1));
        assert!(rep.match_outer);

        let w = k2.with_weights(vec![2, 1]).unwrap();
        let rep = verify_lemma6(&w, &EvalPoint::new(rat(2, 1), 2, 2, rat(1, 1)), &l).unwrap();
        assert!(rep.match_outer);
        assert!(!rep.match_inner);
        assert_eq!(rep.placement(), "outer");
    }

    #[test]
    fn bpotts_examples() {
        let l = Limits::default();
        let rep = verify_bpotts(&vertex(), 2, 2, &rat(5, 3), &l).unwrap();
        assert_eq!(rep.rhs, rat(3, 1));
        assert!(rep.matches());

        let rep = verify_bpotts(&WeightedMultigraph::complete(2), 2, 2, &rat(1, 1), &l).unwrap();
        assert_eq!(rep.lhs, rat(14, 1));
        assert_eq!(rep.rhs, rat(14, 1));
        assert!(!rep.falling_matches());

        let rep = verify_bpotts(&WeightedMultigraph::cycle(3), 1, 2, &rat(7, 3), &l).unwrap();
        assert!(rep.matches());
    }

    #[test]
    fn field_json() {
        let f = PottsField::from_json(r#"{"k":2,"J":"1/2","beta":2.0,"H":{"1":[0, 5]}}"#, 2).unwrap();
        assert_eq!(f.j, 0.5);
        assert_eq!(f.h, vec![vec![0.0, 0.0], vec![0.0, 5.0]]);
        assert!(PottsField::from_json(r#"{"k":2,"J":1,"beta":1,"H":{"0":[1]}}"#, 1).is_err());
        assert!(PottsField::from_json(r#"{"k":2,"J":1,"beta":1,"H":{"4":[1,1]}}"#, 1).is_err());
    }

    #[test]
    fn upotts_normalization() {
        let l = Limits::default();
        // e^{βJ} = 2 makes both candidates equal
        let rep = verify_upotts(&vertex(), &[0.0, 0.0], 1.0, 2f64.ln(), &l).unwrap();
        assert!((rep.u_value - 2.0).abs() < 1e-12);
        assert_eq!(rep.placement, "both");

        let k2 = WeightedMultigraph::complete(2);
        let rep = verify_upotts(&k2, &[0.3, -0.2, 0.1], 0.9, 0.7, &l).unwrap();
        assert_eq!(rep.placement, "minus");

        let rep = verify_upotts(&k2, &[0.4], 1.1, 0.5, &l).unwrap();
        assert_eq!(rep.placement, "minus");
    }
}
