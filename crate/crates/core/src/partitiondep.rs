//! Integer partitions and the linear-dependency machinery for the sequences
//! `c(τ, y) = Π_i (1 + q^{n_i} + ... + q^{n_i y})`.
//!
//! Each `c(τ, ·)` lifts to the bivariate polynomial
//! `s(τ, q, z) = a(τ, q) · b(τ, z)` with `a = P(q) / Π (q^{n_i} - 1)`,
//! `b = Π (z^{n_i} - 1)` and `P(q) = (q - 1)(q^2 - 1)...(q^n - 1)`, so that
//! `c(τ, y) = s(τ, q, q^{y+1}) / P(q)`. Every `s(τ)` lives in the span of the
//! monomials `q^i z^j` with `i <= C(n, 2)` and `j <= n`, which bounds the rank
//! of the whole family by `(n^3 + n + 2) / 2`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactalg::{self, linalg, modular, q_integer, BivariatePoly, RankMode, RationalMatrix, UniPoly, Var};

/// Non-increasing list of positive parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct IntPartition(Vec<u32>);

impl IntPartition {
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        if parts.iter().any(|&p| p == 0) {
            return Err(Error::InvalidInput("partition parts must be positive".into()));
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidInput(format!("partition {parts:?} is not non-increasing")));
        }
        Ok(IntPartition(parts))
    }

    /// Sorts the parts into non-increasing order.
    pub fn from_parts(mut parts: Vec<u32>) -> Result<Self> {
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Self::new(parts)
    }

    pub(crate) fn from_sorted_unchecked(parts: Vec<u32>) -> Self {
        debug_assert!(parts.windows(2).all(|w| w[0] >= w[1]));
        IntPartition(parts)
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn n(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl TryFrom<Vec<u32>> for IntPartition {
    type Error = Error;
    fn try_from(v: Vec<u32>) -> Result<Self> {
        IntPartition::new(v)
    }
}

impl From<IntPartition> for Vec<u32> {
    fn from(p: IntPartition) -> Vec<u32> {
        p.0
    }
}

impl std::fmt::Display for IntPartition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "({})", s.join(","))
    }
}

/// Partitions of `n` in reverse lexicographic order, starting from `(n)`.
pub fn partitions(n: u32) -> Partitions {
    Partitions { next: if n == 0 { None } else { Some(vec![n]) } }
}

pub struct Partitions {
    next: Option<Vec<u32>>,
}

impl Iterator for Partitions {
    type Item = IntPartition;

    fn next(&mut self) -> Option<IntPartition> {
        let cur = self.next.take()?;
        // rightmost part greater than one
        if let Some(i) = cur.iter().rposition(|&p| p > 1) {
            let v = cur[i] - 1;
            let mut rem: u32 = cur[i + 1..].iter().sum::<u32>() + 1;
            let mut nxt = cur[..i].to_vec();
            nxt.push(v);
            while rem >= v {
                nxt.push(v);
                rem -= v;
            }
            if rem > 0 {
                nxt.push(rem);
            }
            self.next = Some(nxt);
        }
        Some(IntPartition(cur))
    }
}

/// `p(n)` by Euler's pentagonal-number recurrence.
pub fn partition_count(n: u32) -> BigInt {
    partition_counts(n).pop().expect("nonempty")
}

/// `[p(0), p(1), ..., p(n)]`.
pub fn partition_counts(n: u32) -> Vec<BigInt> {
    let n = n as usize;
    let mut p = vec![BigInt::zero(); n + 1];
    p[0] = BigInt::one();
    for i in 1..=n {
        let mut acc = BigInt::zero();
        for j in 1.. {
            let g1 = j * (3 * j - 1) / 2;
            if g1 > i {
                break;
            }
            let g2 = j * (3 * j + 1) / 2;
            let mut t = p[i - g1].clone();
            if g2 <= i {
                t += &p[i - g2];
            }
            if j % 2 == 1 {
                acc += t;
            } else {
                acc -= t;
            }
        }
        p[i] = acc;
    }
    p
}

/// `Π_i (1 + q^{n_i} + ... + q^{n_i y})`.
pub fn c_tau_product(tau: &IntPartition, y: u32) -> UniPoly {
    tau.parts().iter().fold(UniPoly::one(Var::Q), |acc, &p| &acc * &q_integer(y + 1, p as u64))
}

/// `q^m - 1` in the given variable.
fn power_minus_one(var: Var, m: u64) -> UniPoly {
    let mut p = UniPoly::monomial(var, m, BigInt::one());
    p.add_term(0, -BigInt::one());
    p
}

/// `P(q) = (q - 1)(q^2 - 1)...(q^n - 1)`.
pub fn big_p(n: u32) -> UniPoly {
    (1..=n as u64).fold(UniPoly::one(Var::Q), |acc, i| &acc * &power_minus_one(Var::Q, i))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct STau {
    pub a: UniPoly,
    pub b: UniPoly,
    pub s: BivariatePoly,
}

/// The factorization `s(τ, q, z) = a(τ, q) · b(τ, z)`. A failed exact
/// division would mean the root-multiplicity argument is violated and is
/// reported as an error.
pub fn s_tau(tau: &IntPartition) -> Result<STau> {
    let den = tau.parts().iter().fold(UniPoly::one(Var::Q), |acc, &p| &acc * &power_minus_one(Var::Q, p as u64));
    let a = big_p(tau.n()).exact_div(&den)?;
    let b = tau.parts().iter().fold(UniPoly::one(Var::Z), |acc, &p| &acc * &power_minus_one(Var::Z, p as u64));
    let s = BivariatePoly::from_product(&a, &b)?;
    Ok(STau { a, b, s })
}

/// `c(τ, y)` recovered from `s(τ, q, q^{y+1}) / P(q)`.
pub fn c_tau_via_s(tau: &IntPartition, y: u32) -> Result<UniPoly> {
    let st = s_tau(tau)?;
    st.s.substitute_second_power(y as u64 + 1).exact_div(&big_p(tau.n()))
}

pub fn binom2(n: u32) -> u64 {
    let n = n as u64;
    n * n.saturating_sub(1) / 2
}

/// `(1 + C(n, 2)) (1 + n)`, the number of monomials `q^i z^j` available.
pub fn monomial_dimension(n: u32) -> u64 {
    (1 + binom2(n)) * (1 + n as u64)
}

/// `(n^3 + n + 2) / 2`; equals [`monomial_dimension`].
pub fn rank_bound(n: u32) -> BigInt {
    let n = BigInt::from(n);
    (&n * &n * &n + &n + 2) / 2
}

/// Matrix size limits for [`monomial_matrix`].
#[derive(Clone, Copy, Debug)]
pub struct MatrixCaps {
    pub exact_max_n: u32,
    pub modular_max_n: u32,
}

impl Default for MatrixCaps {
    fn default() -> Self {
        MatrixCaps { exact_max_n: 16, modular_max_n: 24 }
    }
}

fn monomial_row(st: &STau, n: u32) -> Vec<BigInt> {
    let width = n as u64 + 1;
    let mut row = vec![BigInt::zero(); monomial_dimension(n) as usize];
    for ((i, j), c) in st.s.terms() {
        row[(i * width + j) as usize] = c.clone();
    }
    row
}

/// One row per partition (all of `n`, or the given subset), columns indexed
/// by `(i, j)` at position `i (n + 1) + j`.
pub fn monomial_matrix(n: u32, subset: Option<&[IntPartition]>, max_n: u32) -> Result<RationalMatrix> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be positive".into()));
    }
    if n > max_n {
        return Err(Error::CapExceeded { what: "monomial matrix", needed: format!("n = {n}"), cap: max_n as u64 });
    }
    let parts: Vec<IntPartition> = match subset {
        Some(s) => {
            if let Some(t) = s.iter().find(|t| t.n() != n) {
                return Err(Error::InvalidInput(format!("{t} is not a partition of {n}")));
            }
            s.to_vec()
        }
        None => partitions(n).collect(),
    };
    let rows = parts.iter().map(|t| s_tau(t).map(|st| monomial_row(&st, n))).collect::<Result<Vec<_>>>()?;
    RationalMatrix::from_integer_rows(rows)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DepMode {
    Exact,
    Modular,
}

/// Rank of the monomial matrix of `n`, an upper bound for the rank of the
/// matrix `(c(τ, y))_{τ, y}`.
pub fn rank_m(n: u32, mode: DepMode, caps: MatrixCaps) -> Result<usize> {
    match mode {
        DepMode::Exact => exactalg::rank(&monomial_matrix(n, None, caps.exact_max_n)?, RankMode::Exact),
        DepMode::Modular => {
            let m = monomial_matrix(n, None, caps.modular_max_n)?;
            for p in modular::prime_sequence().take(8) {
                match exactalg::rank(&m, RankMode::Modular(p)) {
                    Err(Error::BadPrime(_)) => continue,
                    other => return other,
                }
            }
            Err(Error::BadPrime(0))
        }
    }
}

/// Rank of the rows `(c(τ, 0), ..., c(τ, y_max))` with each polynomial laid out
/// by coefficient. Equal to `p(n)` certifies that no rational combination of
/// the sequences `c(τ)` vanishes.
pub fn truncated_sequence_rank(n: u32, y_max: u32) -> Result<usize> {
    let parts: Vec<IntPartition> = partitions(n).collect();
    let rows: Vec<Vec<BigInt>> = parts
        .iter()
        .map(|t| {
            let mut row = Vec::new();
            for y in 0..=y_max {
                let c = c_tau_product(t, y);
                let width = (n as u64 * y as u64 + 1) as usize;
                let start = row.len();
                row.resize(start + width, BigInt::zero());
                for (d, coef) in c.terms() {
                    row[start + d as usize] = coef.clone();
                }
            }
            row
        })
        .collect();
    exactalg::rank(&RationalMatrix::from_integer_rows(rows)?, RankMode::Exact)
}

/// Smallest `y_max <= limit` at which [`truncated_sequence_rank`] reaches `p(n)`.
pub fn certify_independence(n: u32, limit: u32) -> Result<Option<u32>> {
    let target = partitions(n).count();
    for y in 0..=limit {
        if truncated_sequence_rank(n, y)? == target {
            return Ok(Some(y));
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ThresholdRow {
    pub n: u32,
    #[serde(serialize_with = "ser_display")]
    pub p: BigInt,
    #[serde(serialize_with = "ser_display")]
    pub bound: BigInt,
    pub exceeds: bool,
}

fn ser_display<S: serde::Serializer, T: std::fmt::Display>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// `(n, p(n), (n^3 + n + 2)/2, p(n) > bound)` for `n = 1..=n_max`.
pub fn threshold_scan(n_max: u32) -> Vec<ThresholdRow> {
    let counts = partition_counts(n_max);
    (1..=n_max)
        .map(|n| {
            let p = counts[n as usize].clone();
            let bound = rank_bound(n);
            let exceeds = p > bound;
            ThresholdRow { n, p, bound, exceeds }
        })
        .collect()
}

/// A nonzero rational `α` with `Σ α_i · rows[i] = 0`, checked by symbolic
/// summation of the polynomials themselves, or `None` if the rows are
/// independent.
pub fn dependency_among(rows: &[BivariatePoly], mode: DepMode) -> Result<Option<Vec<BigRational>>> {
    if rows.is_empty() {
        return Ok(None);
    }
    let mut keys: Vec<(u64, u64)> = rows.iter().flat_map(|r| r.terms().map(|(k, _)| k)).collect();
    keys.sort_unstable();
    keys.dedup();
    let dense: Vec<Vec<BigInt>> = rows.iter().map(|r| keys.iter().map(|&(i, j)| r.coeff(i, j)).collect()).collect();
    let dense = if keys.is_empty() { rows.iter().map(|_| vec![BigInt::zero()]).collect() } else { dense };
    let m = RationalMatrix::from_integer_rows(dense)?;
    let alpha = match mode {
        DepMode::Exact => exactalg::rank_and_nullspace(&m, RankMode::Exact)?.dependency,
        DepMode::Modular => {
            let r = exactalg::rank_and_nullspace(&m, RankMode::Modular(modular::DEFAULT_PRIME))?;
            if r.rank == m.nrows() {
                None
            } else {
                Some(linalg::lift_dependency(&m, modular::prime_sequence(), 64)?)
            }
        }
    };
    let Some(alpha) = alpha else { return Ok(None) };
    if !combination_vanishes(rows, &alpha) {
        return Err(Error::Exactness("dependency does not annihilate the polynomials".into()));
    }
    Ok(Some(alpha))
}

/// `Σ α_i rows[i] == 0`, computed after clearing denominators.
pub fn combination_vanishes(rows: &[BivariatePoly], alpha: &[BigRational]) -> bool {
    let lcm = alpha.iter().fold(BigInt::one(), |acc, a| num_integer::Integer::lcm(&acc, a.denom()));
    let (first, second) = rows.first().map(|r| r.vars()).unwrap_or((Var::Q, Var::Z));
    let mut sum = BivariatePoly::zero(first, second);
    for (r, a) in rows.iter().zip(alpha) {
        let c = (a * BigRational::from_integer(lcm.clone())).to_integer();
        sum = sum.try_add(&r.scale(&c)).expect("same variables");
    }
    sum.is_zero()
}

/// A rational dependency among `{s(τ) : τ ∈ parts}`, verified symbolically.
pub fn find_dependency(n: u32, parts: &[IntPartition], mode: DepMode) -> Result<Option<Vec<(IntPartition, BigRational)>>> {
    if let Some(t) = parts.iter().find(|t| t.n() != n) {
        return Err(Error::InvalidInput(format!("{t} is not a partition of {n}")));
    }
    let rows = parts.iter().map(|t| s_tau(t).map(|s| s.s)).collect::<Result<Vec<_>>>()?;
    Ok(dependency_among(&rows, mode)?.map(|alpha| parts.iter().cloned().zip(alpha).collect()))
}

/// `Σ α_τ c(τ, y)` through the product route; zero for a genuine dependency.
pub fn sequence_combination(dep: &[(IntPartition, BigRational)], y: u32) -> Vec<(u64, BigRational)> {
    let mut acc: std::collections::BTreeMap<u64, BigRational> = Default::default();
    for (t, a) in dep {
        for (d, c) in c_tau_product(t, y).terms() {
            *acc.entry(d).or_insert_with(BigRational::zero) += a * BigRational::from_integer(c.clone());
        }
    }
    acc.into_iter().filter(|(_, v)| !v.is_zero()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tau(p: &[u32]) -> IntPartition {
        IntPartition::new(p.to_vec()).unwrap()
    }

    fn q(c: &[i64]) -> UniPoly {
        UniPoly::from_coeffs(Var::Q, c)
    }

    #[test]
    fn partitions_of_four_in_reverse_lex_order() {
        let got: Vec<Vec<u32>> = partitions(4).map(|p| p.0).collect();
        assert_eq!(got, vec![vec![4], vec![3, 1], vec![2, 2], vec![2, 1, 1], vec![1, 1, 1, 1]]);
        assert_eq!(partitions(1).map(|p| p.0).collect::<Vec<_>>(), vec![vec![1]]);
        assert_eq!(partitions(5).count(), 7);
    }

    #[test]
    fn stream_is_sorted_and_duplicate_free() {
        let all: Vec<IntPartition> = partitions(12).collect();
        assert!(all.windows(2).all(|w| w[0] > w[1]));
        assert!(all.iter().all(|t| t.n() == 12 && IntPartition::new(t.0.clone()).is_ok()));
    }

    #[test]
    fn pentagonal_recurrence_matches_stream_length() {
        for n in 0..=30 {
            let expect = if n == 0 { 1 } else { partitions(n).count() };
            assert_eq!(partition_count(n), BigInt::from(expect), "n = {n}");
        }
        assert_eq!(partition_count(39), BigInt::from(31185));
    }

    #[test]
    fn invalid_partitions() {
        assert!(IntPartition::new(vec![1, 2]).is_err());
        assert!(IntPartition::new(vec![2, 0]).is_err());
        assert_eq!(IntPartition::from_parts(vec![1, 3, 2]).unwrap(), tau(&[3, 2, 1]));
        assert!(serde_json::from_str::<IntPartition>("[1,2]").is_err());
    }

    #[test]
    fn c_tau_examples() {
        assert_eq!(c_tau_product(&tau(&[2]), 1), q(&[1, 0, 1]));
        assert_eq!(c_tau_product(&tau(&[1, 1]), 2), q(&[1, 2, 3, 2, 1]));
        assert_eq!(c_tau_product(&tau(&[3, 2, 2]), 0), q(&[1]));
    }

    #[test]
    fn big_p_examples() {
        assert_eq!(big_p(2), q(&[1, -1, -1, 1]));
        assert_eq!(big_p(1), q(&[-1, 1]));
        assert_eq!(big_p(5).degree(), Some(15));
    }

    #[test]
    fn s_tau_examples() {
        let st = s_tau(&tau(&[1, 1])).unwrap();
        assert_eq!(st.a, q(&[1, 1]));
        assert_eq!(st.b, UniPoly::from_coeffs(Var::Z, &[1, -2, 1]));
        let st = s_tau(&tau(&[2])).unwrap();
        assert_eq!(st.a, q(&[-1, 1]));
        assert_eq!(st.b, UniPoly::from_coeffs(Var::Z, &[-1, 0, 1]));
        assert_eq!(s_tau(&tau(&[3, 2, 1])).unwrap().a.degree(), Some(15));
    }

    #[test]
    fn c_tau_routes_agree_on_examples() {
        assert_eq!(c_tau_via_s(&tau(&[1, 1]), 1).unwrap(), q(&[1, 1]).pow(2));
        assert_eq!(c_tau_via_s(&tau(&[2]), 0).unwrap(), q(&[1]));
        assert_eq!(c_tau_via_s(&tau(&[2, 1]), 2).unwrap(), c_tau_product(&tau(&[2, 1]), 2));
    }

    #[test]
    fn factorization_reconstructs_p() {
        for n in 1..=9 {
            for t in partitions(n) {
                let st = s_tau(&t).unwrap();
                let den = t.parts().iter().fold(UniPoly::one(Var::Q), |acc, &p| &acc * &power_minus_one(Var::Q, p as u64));
                assert_eq!(&st.a * &den, big_p(n));
            }
        }
    }

    #[test]
    fn matrix_shapes() {
        let m = monomial_matrix(2, None, 16).unwrap();
        assert_eq!((m.nrows(), m.ncols()), (2, 6));
        // s((2)) = (q - 1)(z^2 - 1): columns (0,0)=1, (0,2)=-1, (1,0)=-1, (1,2)=1
        let row: Vec<BigInt> = m.row(0).iter().map(|x| x.to_integer()).collect();
        assert_eq!(row, [1, 0, -1, -1, 0, 1].map(BigInt::from));
        let m1 = monomial_matrix(1, None, 16).unwrap();
        assert_eq!((m1.nrows(), m1.ncols()), (1, 2));
        let m4 = monomial_matrix(4, None, 16).unwrap();
        assert_eq!(m4.ncols() as u64, (1 + 6) * (1 + 4));
        assert_eq!(m4.nrows(), 5);
        assert!(matches!(monomial_matrix(17, None, 16), Err(Error::CapExceeded { .. })));
        assert!(monomial_matrix(3, Some(&[tau(&[2, 1]), tau(&[2])]), 16).is_err());
    }

    #[test]
    fn small_ranks_are_full() {
        for (n, p) in [(1, 1), (2, 2), (3, 3), (4, 5), (5, 7), (6, 11)] {
            assert_eq!(rank_m(n, DepMode::Exact, MatrixCaps::default()).unwrap(), p);
            assert_eq!(rank_m(n, DepMode::Modular, MatrixCaps::default()).unwrap(), p);
        }
    }

    #[test]
    fn bound_equals_dimension() {
        for n in 1..=60 {
            assert_eq!(rank_bound(n), BigInt::from(monomial_dimension(n)));
        }
    }

    #[test]
    fn threshold_is_thirty_nine() {
        let rows = threshold_scan(60);
        let first = rows.iter().find(|r| r.exceeds).unwrap();
        assert_eq!(first.n, 39);
        assert_eq!(first.p, BigInt::from(31185));
        assert_eq!(first.bound, BigInt::from(29680));
        assert!(!rows[37].exceeds);
        assert_eq!(rows[0].bound, BigInt::from(2));
        assert!(rows.iter().all(|r| r.exceeds == (r.n >= 39)));
    }

    #[test]
    fn dependencies() {
        assert_eq!(find_dependency(2, &partitions(2).collect::<Vec<_>>(), DepMode::Exact).unwrap(), None);
        let s = s_tau(&tau(&[1, 1])).unwrap().s;
        for mode in [DepMode::Exact, DepMode::Modular] {
            let a = dependency_among(&[s.clone(), s.scale(&BigInt::from(2))], mode).unwrap().unwrap();
            // proportional to (2, -1)
            assert_eq!(&a[0] * BigRational::from_integer((-1).into()), &a[1] * BigRational::from_integer(2.into()));
            assert!(!a[1].is_zero());
        }
        let dep = find_dependency(3, &[tau(&[2, 1]), tau(&[3]), tau(&[2, 1])], DepMode::Modular).unwrap().unwrap();
        for y in 0..=5 {
            assert!(sequence_combination(&dep, y).is_empty());
        }
    }

    #[test]
    fn sequences_certified_independent_for_small_n() {
        for n in 1..=6 {
            assert!(certify_independence(n, monomial_dimension(n) as u32).unwrap().is_some(), "n = {n}");
        }
    }
}
