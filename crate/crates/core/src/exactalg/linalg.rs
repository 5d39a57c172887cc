//! Exact rank and left-nullspace computation for rational matrices.
//!
//! Exact mode runs fraction-free (Bareiss) elimination over the integers
//! after clearing row denominators. Modular mode eliminates over `F_p` and
//! lifts any dependency back to `Q` by CRT and rational reconstruction; a
//! lifted vector is only reported after `v · M = 0` has been checked exactly.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::modular::{self, crt_combine, inv_mod, mul_mod, rational_reconstruct, reduce_rational};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalMatrix {
    cols: usize,
    rows: Vec<Vec<BigRational>>,
}

impl RationalMatrix {
    pub fn new(rows: Vec<Vec<BigRational>>) -> Result<Self> {
        let cols = rows.first().map(Vec::len).unwrap_or(0);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidInput("matrix rows have different lengths".into()));
        }
        Ok(RationalMatrix { cols, rows })
    }

    pub fn from_integer_rows(rows: Vec<Vec<BigInt>>) -> Result<Self> {
        Self::new(rows.into_iter().map(|r| r.into_iter().map(BigRational::from_integer).collect()).collect())
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Result<Self> {
        Self::from_integer_rows(rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect())
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[BigRational] {
        &self.rows[i]
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.rows[i][j]
    }

    fn row_lcms(&self) -> Vec<BigInt> {
        self.rows.iter().map(|r| r.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))).collect()
    }

    /// Each row scaled by the lcm of its denominators; row space is unchanged.
    fn integer_rows(&self) -> Vec<Vec<BigInt>> {
        self.rows
            .iter()
            .zip(self.row_lcms())
            .map(|(r, l)| r.iter().map(|x| (x * BigRational::from_integer(l.clone())).to_integer()).collect())
            .collect()
    }

    fn transpose_integer(&self) -> Vec<Vec<BigInt>> {
        let ints = self.integer_rows();
        (0..self.cols).map(|j| ints.iter().map(|r| r[j].clone()).collect()).collect()
    }

    /// `v · M` computed exactly.
    pub fn left_mul(&self, v: &[BigRational]) -> Vec<BigRational> {
        let mut out = vec![BigRational::zero(); self.cols];
        for (coef, row) in v.iter().zip(&self.rows) {
            if coef.is_zero() {
                continue;
            }
            for (o, x) in out.iter_mut().zip(row) {
                *o += coef * x;
            }
        }
        out
    }

    pub fn is_left_null(&self, v: &[BigRational]) -> bool {
        v.len() == self.nrows() && self.left_mul(v).iter().all(Zero::is_zero)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RankMode {
    Exact,
    Modular(u64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankResult {
    pub rank: usize,
    /// Exactly verified `v` with `v · M = 0`, present when `rank < nrows`.
    pub dependency: Option<Vec<BigRational>>,
    /// Set in modular mode when a dependency was seen mod p but could not be
    /// lifted and verified within the prime budget.
    pub lift_failed: bool,
}

const LIFT_PRIME_BUDGET: usize = 64;

pub fn rank_and_nullspace(m: &RationalMatrix, mode: RankMode) -> Result<RankResult> {
    if m.nrows() == 0 {
        return Err(Error::InvalidInput("empty matrix".into()));
    }
    match mode {
        RankMode::Exact => {
            let rank = bareiss_rank(m.integer_rows());
            let dependency = if rank < m.nrows() { Some(exact_dependency(m)) } else { None };
            Ok(RankResult { rank, dependency, lift_failed: false })
        }
        RankMode::Modular(p) => {
            if !modular::is_prime(p) || p <= 1 << 30 {
                return Err(Error::InvalidInput(format!("modulus {p} is not a prime above 2^30")));
            }
            let rows = reduce_matrix(m, p)?;
            let rank = modular_rank(rows, p);
            if rank == m.nrows() {
                return Ok(RankResult { rank, dependency: None, lift_failed: false });
            }
            let primes = std::iter::successors(Some(p), |&x| Some(modular::prev_prime(x)));
            match lift_dependency(m, primes, LIFT_PRIME_BUDGET) {
                Ok(v) => Ok(RankResult { rank, dependency: Some(v), lift_failed: false }),
                Err(Error::LiftFailed(_)) => Ok(RankResult { rank, dependency: None, lift_failed: true }),
                Err(e) => Err(e),
            }
        }
    }
}

pub fn rank(m: &RationalMatrix, mode: RankMode) -> Result<usize> {
    if m.nrows() == 0 {
        return Ok(0);
    }
    match mode {
        RankMode::Exact => Ok(bareiss_rank(m.integer_rows())),
        RankMode::Modular(p) => Ok(modular_rank(reduce_matrix(m, p)?, p)),
    }
}

fn pick_pivot(a: &[Vec<BigInt>], from: usize, col: usize) -> Option<usize> {
    (from..a.len()).filter(|&i| !a[i][col].is_zero()).min_by_key(|&i| (a[i][col].bits(), i))
}

/// Fraction-free elimination to row echelon form in place. Returns the pivot
/// columns in order; row `j` of the result has its pivot in `pivots[j]`.
fn bareiss_echelon(a: &mut [Vec<BigInt>]) -> Vec<usize> {
    let nrows = a.len();
    let ncols = a.first().map(Vec::len).unwrap_or(0);
    let mut prev = BigInt::one();
    let mut pivots = Vec::new();
    for col in 0..ncols {
        let r = pivots.len();
        if r == nrows {
            break;
        }
        let Some(p) = pick_pivot(a, r, col) else { continue };
        a.swap(p, r);
        let (top, rest) = a.split_at_mut(r + 1);
        let pr = &top[r];
        for row in rest.iter_mut() {
            let f = std::mem::take(&mut row[col]);
            for j in col + 1..ncols {
                let v = &pr[col] * &row[j] - &f * &pr[j];
                row[j] = if prev.is_one() { v } else { v / &prev };
            }
        }
        prev = a[r][col].clone();
        pivots.push(col);
    }
    pivots
}

fn bareiss_rank(mut a: Vec<Vec<BigInt>>) -> usize {
    bareiss_echelon(&mut a).len()
}

/// The canonical dependency: the first row that lies in the span of the rows
/// before it gets coefficient 1, rows after it get 0.
fn exact_dependency(m: &RationalMatrix) -> Vec<BigRational> {
    let mut t = m.transpose_integer();
    let pivots = bareiss_echelon(&mut t);
    let f = first_gap(&pivots, m.nrows()).expect("rank deficiency implies a non-pivot column");
    let used: Vec<usize> = pivots.iter().copied().take_while(|&c| c < f).collect();
    let mut y: Vec<BigRational> = vec![BigRational::zero(); used.len()];
    for j in (0..used.len()).rev() {
        let mut acc = BigRational::from_integer(t[j][f].clone());
        for l in j + 1..used.len() {
            acc += BigRational::from_integer(t[j][used[l]].clone()) * &y[l];
        }
        y[j] = -acc / BigRational::from_integer(t[j][used[j]].clone());
    }
    // y is a dependency of the rescaled rows; undo the per-row scaling
    let lcms = m.row_lcms();
    let norm = BigRational::from_integer(lcms[f].clone());
    let mut v = vec![BigRational::zero(); m.nrows()];
    v[f] = BigRational::one();
    for (c, yc) in used.into_iter().zip(y) {
        v[c] = yc * BigRational::from_integer(lcms[c].clone()) / &norm;
    }
    v
}

fn first_gap(pivots: &[usize], n: usize) -> Option<usize> {
    (0..n).find(|c| pivots.binary_search(c).is_err())
}

fn reduce_matrix(m: &RationalMatrix, p: u64) -> Result<Vec<Vec<u64>>> {
    m.rows.iter().map(|r| r.iter().map(|x| reduce_rational(x, p)).collect()).collect()
}

/// Gauss-Jordan over `F_p` in place; returns pivot columns.
fn modular_rref(a: &mut [Vec<u64>], p: u64) -> Vec<usize> {
    let nrows = a.len();
    let ncols = a.first().map(Vec::len).unwrap_or(0);
    let mut pivots = Vec::new();
    for col in 0..ncols {
        let r = pivots.len();
        if r == nrows {
            break;
        }
        let Some(piv) = (r..nrows).find(|&i| a[i][col] != 0) else { continue };
        a.swap(piv, r);
        let inv = inv_mod(a[r][col], p).expect("nonzero pivot");
        for x in a[r].iter_mut() {
            *x = mul_mod(*x, inv, p);
        }
        let pr = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == r || row[col] == 0 {
                continue;
            }
            let f = row[col];
            for j in col..ncols {
                row[j] = (row[j] + p - mul_mod(f, pr[j], p)) % p;
            }
        }
        pivots.push(col);
    }
    pivots
}

fn modular_rank(mut rows: Vec<Vec<u64>>, p: u64) -> usize {
    modular_rref(&mut rows, p).len()
}

/// Canonical dependency mod p, as `(first dependent row, vector)`.
fn modular_dependency(m: &RationalMatrix, p: u64) -> Result<Option<(usize, Vec<u64>)>> {
    let rows = reduce_matrix(m, p)?;
    let mut t: Vec<Vec<u64>> = (0..m.ncols()).map(|j| rows.iter().map(|r| r[j]).collect()).collect();
    let pivots = if t.is_empty() { Vec::new() } else { modular_rref(&mut t, p) };
    let Some(f) = first_gap(&pivots, m.nrows()) else { return Ok(None) };
    let mut v = vec![0u64; m.nrows()];
    v[f] = 1;
    for (j, &c) in pivots.iter().enumerate().take_while(|(_, &c)| c < f) {
        v[c] = (p - t[j][f]) % p;
    }
    Ok(Some((f, v)))
}

/// Finds the canonical left dependency of `m` modulo successive primes and
/// reconstructs it over `Q`, verifying `v · M = 0` exactly before returning.
pub fn lift_dependency<I: IntoIterator<Item = u64>>(m: &RationalMatrix, primes: I, budget: usize) -> Result<Vec<BigRational>> {
    let mut acc: Option<(usize, Vec<BigInt>, BigInt)> = None;
    let mut used = 0;
    for p in primes.into_iter().take(budget) {
        used += 1;
        let (f, v) = match modular_dependency(m, p) {
            Ok(Some(d)) => d,
            // Full rank mod p: this prime cannot see the dependency we track.
            Ok(None) => continue,
            Err(Error::BadPrime(_)) => continue,
            Err(e) => return Err(e),
        };
        acc = match acc.take() {
            None => Some((f, v.into_iter().map(BigInt::from).collect(), BigInt::from(p))),
            // Unlucky earlier primes report a dependency too early.
            Some((f0, _, _)) if f > f0 => Some((f, v.into_iter().map(BigInt::from).collect(), BigInt::from(p))),
            Some(prev) if f < prev.0 => Some(prev),
            Some((f0, res, modulus)) => {
                let res: Vec<BigInt> = res.iter().zip(&v).map(|(a, &b)| crt_combine(a, &modulus, b, p)).collect();
                Some((f0, res, modulus * BigInt::from(p)))
            }
        };
        let (_, res, modulus) = acc.as_ref().expect("just set");
        let cand: Option<Vec<BigRational>> = res.iter().map(|a| rational_reconstruct(a, modulus)).collect();
        if let Some(cand) = cand {
            if cand.iter().any(|x| !x.is_zero()) && m.is_left_null(&cand) {
                return Ok(cand);
            }
        }
    }
    Err(Error::LiftFailed(used))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn identity_has_full_rank() {
        let m = RationalMatrix::from_i64(&[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]).unwrap();
        for mode in [RankMode::Exact, RankMode::Modular(modular::DEFAULT_PRIME)] {
            let res = rank_and_nullspace(&m, mode).unwrap();
            assert_eq!(res.rank, 3);
            assert_eq!(res.dependency, None);
        }
    }

    #[test]
    fn proportional_rows() {
        let m = RationalMatrix::from_i64(&[vec![1, 2], vec![2, 4]]).unwrap();
        for mode in [RankMode::Exact, RankMode::Modular(modular::DEFAULT_PRIME)] {
            let res = rank_and_nullspace(&m, mode).unwrap();
            assert_eq!(res.rank, 1);
            let v = res.dependency.unwrap();
            // canonical scale puts 1 on the second row: (-2, 1) ~ (2, -1)
            assert_eq!(v, vec![r(-2), r(1)]);
            assert!(m.is_left_null(&v));
        }
    }

    #[test]
    fn rational_entries_and_zero_columns() {
        let half = BigRational::new(1.into(), 2.into());
        let m = RationalMatrix::new(vec![
            vec![r(0), half.clone(), r(1)],
            vec![r(0), r(0), r(3)],
            vec![r(0), r(1), r(0)],
        ])
        .unwrap();
        let res = rank_and_nullspace(&m, RankMode::Exact).unwrap();
        assert_eq!(res.rank, 2);
        let v = res.dependency.unwrap();
        assert!(m.is_left_null(&v));
        assert_eq!(v[2], r(1));
        let res_mod = rank_and_nullspace(&m, RankMode::Modular(modular::DEFAULT_PRIME)).unwrap();
        assert_eq!(res_mod.dependency, Some(v));
    }

    #[test]
    fn small_modulus_is_rejected() {
        let m = RationalMatrix::from_i64(&[vec![1]]).unwrap();
        assert!(rank_and_nullspace(&m, RankMode::Modular(7)).is_err());
    }

    #[test]
    fn denominator_divisible_by_prime_signals_retry() {
        let p = modular::DEFAULT_PRIME;
        let m = RationalMatrix::new(vec![vec![BigRational::new(1.into(), BigInt::from(p))]]).unwrap();
        assert_eq!(rank(&m, RankMode::Modular(p)), Err(Error::BadPrime(p)));
    }

    #[test]
    fn lift_needs_several_primes_for_large_coefficients() {
        // Dependency coefficients around 10^40 need more than one 61-bit prime.
        let big = BigInt::parse_bytes(b"1234567890123456789012345678901234567891", 10).unwrap();
        let m = RationalMatrix::from_integer_rows(vec![
            vec![BigInt::from(1), BigInt::from(0)],
            vec![big.clone(), BigInt::from(0)],
        ])
        .unwrap();
        let v = lift_dependency(&m, modular::prime_sequence(), 8).unwrap();
        assert_eq!(v, vec![BigRational::from_integer(-big), r(1)]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn modular_rank_matches_exact_rank(
            rows in 1usize..6,
            cols in 1usize..6,
            seed in prop::collection::vec(-1000i64..=1000, 36),
            dup in any::<bool>(),
        ) {
            let mut data: Vec<Vec<i64>> = (0..rows).map(|i| (0..cols).map(|j| seed[i * 6 + j]).collect()).collect();
            if dup && rows > 1 {
                let last = data[0].iter().zip(&data[1]).map(|(a, b)| 3 * a - 2 * b).collect();
                data[rows - 1] = last;
            }
            let m = RationalMatrix::from_i64(&data).unwrap();
            let exact = rank_and_nullspace(&m, RankMode::Exact).unwrap();
            let modr = rank_and_nullspace(&m, RankMode::Modular(modular::DEFAULT_PRIME)).unwrap();
            prop_assert!(modr.rank <= exact.rank);
            prop_assert_eq!(modr.rank, exact.rank);
            prop_assert_eq!(exact.rank, naive_rank(&data));
            if let Some(v) = &exact.dependency {
                prop_assert!(m.is_left_null(v));
                prop_assert_eq!(modr.dependency.as_ref(), Some(v));
            }
        }
    }

    /// Textbook elimination over Q as an independent reference.
    fn naive_rank(data: &[Vec<i64>]) -> usize {
        let mut a: Vec<Vec<BigRational>> = data.iter().map(|row| row.iter().map(|&x| r(x)).collect()).collect();
        let mut rank = 0;
        let cols = a[0].len();
        for c in 0..cols {
            let Some(p) = (rank..a.len()).find(|&i| !a[i][c].is_zero()) else { continue };
            a.swap(p, rank);
            for i in 0..a.len() {
                if i != rank && !a[i][c].is_zero() {
                    let f = &a[i][c] / &a[rank][c];
                    for j in 0..cols {
                        let d = &f * &a[rank][j];
                        a[i][j] -= d;
                    }
                }
            }
            rank += 1;
        }
        rank
    }
}
