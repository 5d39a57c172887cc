//! Sparse univariate and bivariate polynomials with arbitrary-precision
//! integer coefficients.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Variable tag carried by every polynomial so that mixing e.g. `q` and `z`
/// polynomials is caught.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    Q,
    Z,
    T,
    X,
    R,
}

impl Var {
    pub fn symbol(self) -> char {
        match self {
            Var::Q => 'q',
            Var::Z => 'z',
            Var::T => 't',
            Var::X => 'x',
            Var::R => 'r',
        }
    }

    pub fn from_symbol(c: &str) -> Option<Var> {
        Some(match c {
            "q" => Var::Q,
            "z" => Var::Z,
            "t" => Var::T,
            "x" => Var::X,
            "r" => Var::R,
            _ => return None,
        })
    }
}

fn add_into<K: Ord>(terms: &mut BTreeMap<K, BigInt>, key: K, c: BigInt) {
    if c.is_zero() {
        return;
    }
    match terms.entry(key) {
        Entry::Vacant(v) => {
            v.insert(c);
        }
        Entry::Occupied(mut o) => {
            *o.get_mut() += c;
            if o.get().is_zero() {
                o.remove();
            }
        }
    }
}

/// `base^exp` for rationals with a `u64` exponent.
pub fn rational_pow(base: &BigRational, exp: u64) -> BigRational {
    if exp == 0 {
        return BigRational::one();
    }
    let num = Pow::pow(base.numer().clone(), exp);
    let den = Pow::pow(base.denom().clone(), exp);
    BigRational::new(num, den)
}

/// Sparse polynomial in one variable. No zero coefficient is ever stored.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct UniPoly {
    var: Var,
    terms: BTreeMap<u64, BigInt>,
}

impl UniPoly {
    pub fn zero(var: Var) -> Self {
        UniPoly { var, terms: BTreeMap::new() }
    }

    pub fn one(var: Var) -> Self {
        Self::constant(var, BigInt::one())
    }

    pub fn constant(var: Var, c: BigInt) -> Self {
        Self::monomial(var, 0, c)
    }

    pub fn monomial(var: Var, deg: u64, c: BigInt) -> Self {
        let mut p = Self::zero(var);
        add_into(&mut p.terms, deg, c);
        p
    }

    /// Dense ascending coefficients: `from_coeffs(Q, &[1, 0, -1])` is `1 - q^2`.
    pub fn from_coeffs(var: Var, coeffs: &[i64]) -> Self {
        let mut p = Self::zero(var);
        for (d, &c) in coeffs.iter().enumerate() {
            add_into(&mut p.terms, d as u64, BigInt::from(c));
        }
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (u64, BigInt)>>(var: Var, terms: I) -> Self {
        let mut p = Self::zero(var);
        for (d, c) in terms {
            add_into(&mut p.terms, d, c);
        }
        p
    }

    pub fn var(&self) -> Var {
        self.var
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u64> {
        self.terms.keys().next_back().copied()
    }

    pub fn coeff(&self, deg: u64) -> BigInt {
        self.terms.get(&deg).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (u64, &BigInt)> + '_ {
        self.terms.iter().map(|(&d, c)| (d, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, deg: u64, c: BigInt) {
        add_into(&mut self.terms, deg, c);
    }

    pub fn with_var(mut self, var: Var) -> Self {
        self.var = var;
        self
    }

    fn check_var(&self, other: &UniPoly) -> Result<()> {
        if self.var != other.var {
            return Err(Error::VariableMismatch(self.var.symbol(), other.var.symbol()));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &UniPoly) -> Result<UniPoly> {
        self.check_var(other)?;
        let mut out = self.clone();
        for (&d, c) in &other.terms {
            add_into(&mut out.terms, d, c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &UniPoly) -> Result<UniPoly> {
        self.check_var(other)?;
        let mut out = self.clone();
        for (&d, c) in &other.terms {
            add_into(&mut out.terms, d, -c);
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &UniPoly) -> Result<UniPoly> {
        self.check_var(other)?;
        let mut out = UniPoly::zero(self.var);
        for (&da, ca) in &self.terms {
            for (&db, cb) in &other.terms {
                let d = da.checked_add(db).ok_or(Error::Overflow("polynomial degree"))?;
                add_into(&mut out.terms, d, ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &BigInt) -> UniPoly {
        if c.is_zero() {
            return UniPoly::zero(self.var);
        }
        UniPoly { var: self.var, terms: self.terms.iter().map(|(&d, x)| (d, x * c)).collect() }
    }

    pub fn pow(&self, e: u32) -> UniPoly {
        let mut acc = UniPoly::one(self.var);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Replaces the variable `v` by `v^m`.
    pub fn stretch(&self, m: u64) -> UniPoly {
        UniPoly { var: self.var, terms: self.terms.iter().map(|(&d, c)| (d * m, c.clone())).collect() }
    }

    /// Quotient of an exact division in `Z[v]`; any remainder (or a
    /// non-integral quotient coefficient) is an [`Error::Exactness`].
    pub fn exact_div(&self, den: &UniPoly) -> Result<UniPoly> {
        self.check_var(den)?;
        let (&dd, lead) = den
            .terms
            .iter()
            .next_back()
            .ok_or(Error::Exactness("division by the zero polynomial".into()))?;
        let mut rem = self.clone();
        let mut quot = UniPoly::zero(self.var);
        while let Some((&dr, lr)) = rem.terms.iter().next_back() {
            if dr < dd {
                break;
            }
            let (c, r) = lr.div_rem(lead);
            if !r.is_zero() {
                return Err(Error::Exactness(format!(
                    "leading coefficient {lr} not divisible by {lead}"
                )));
            }
            let shift = dr - dd;
            for (&d, cd) in &den.terms {
                add_into(&mut rem.terms, d + shift, -(cd * &c));
            }
            add_into(&mut quot.terms, shift, c);
        }
        if !rem.is_zero() {
            return Err(Error::Exactness(format!("remainder {rem:?}")));
        }
        Ok(quot)
    }

    pub fn eval_int(&self, at: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        let mut prev: Option<u64> = None;
        for (&d, c) in self.terms.iter().rev() {
            if let Some(p) = prev {
                acc *= Pow::pow(at.clone(), p - d);
            }
            acc += c;
            prev = Some(d);
        }
        if let Some(p) = prev {
            acc *= Pow::pow(at.clone(), p);
        }
        acc
    }

    /// Exact value at a rational point, accumulated over a common denominator.
    pub fn eval(&self, at: &BigRational) -> BigRational {
        let Some(top) = self.degree() else { return BigRational::zero() };
        let (num, den) = (power_table(at.numer(), top), power_table(at.denom(), top));
        let mut acc = BigInt::zero();
        for (&d, c) in &self.terms {
            acc += c * &num[d as usize] * &den[(top - d) as usize];
        }
        BigRational::new(acc, den[top as usize].clone())
    }
}

fn power_table(base: &BigInt, top: u64) -> Vec<BigInt> {
    let mut out = Vec::with_capacity(top as usize + 1);
    out.push(BigInt::one());
    for i in 0..top as usize {
        let next = &out[i] * base;
        out.push(next);
    }
    out
}

impl fmt::Debug for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let v = self.var.symbol();
        for (i, (&d, c)) in self.terms.iter().rev().enumerate() {
            let sign = if c.is_negative() { "-" } else if i > 0 { "+" } else { "" };
            let a = c.abs();
            if i > 0 {
                write!(f, " {sign} ")?;
            } else {
                write!(f, "{sign}")?;
            }
            match (d, a.is_one()) {
                (0, _) => write!(f, "{a}")?,
                (1, true) => write!(f, "{v}")?,
                (1, false) => write!(f, "{a}{v}")?,
                (_, true) => write!(f, "{v}^{d}")?,
                (_, false) => write!(f, "{a}{v}^{d}")?,
            }
        }
        Ok(())
    }
}

macro_rules! uni_op {
    ($tr:ident, $m:ident, $try:ident) => {
        impl<'a> $tr<&'a UniPoly> for &'a UniPoly {
            type Output = UniPoly;
            /// Panics on a variable mismatch; use the `try_` form to get an error.
            fn $m(self, rhs: &'a UniPoly) -> UniPoly {
                self.$try(rhs).expect("polynomial variable mismatch")
            }
        }
        impl $tr for UniPoly {
            type Output = UniPoly;
            fn $m(self, rhs: UniPoly) -> UniPoly {
                (&self).$m(&rhs)
            }
        }
    };
}
uni_op!(Add, add, try_add);
uni_op!(Sub, sub, try_sub);
uni_op!(Mul, mul, try_mul);

impl Neg for &UniPoly {
    type Output = UniPoly;
    fn neg(self) -> UniPoly {
        UniPoly { var: self.var, terms: self.terms.iter().map(|(&d, c)| (d, -c)).collect() }
    }
}

#[derive(Serialize, Deserialize)]
struct UniPolyWire {
    var: String,
    terms: Vec<(u64, String)>,
}

impl Serialize for UniPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        UniPolyWire {
            var: self.var.symbol().to_string(),
            terms: self.terms.iter().map(|(&d, c)| (d, c.to_string())).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for UniPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = UniPolyWire::deserialize(d)?;
        let var = Var::from_symbol(&w.var).ok_or_else(|| D::Error::custom("unknown variable"))?;
        let mut p = UniPoly::zero(var);
        for (deg, c) in w.terms {
            let c: BigInt = c.parse().map_err(D::Error::custom)?;
            add_into(&mut p.terms, deg, c);
        }
        Ok(p)
    }
}

/// The polynomial that multiplies two univariate polynomials, also
/// accepting a pair in distinct variables to build a bivariate product.
pub fn poly_mul(a: &UniPoly, b: &UniPoly) -> Result<UniPoly> {
    a.try_mul(b)
}

/// `1 + v^m + v^{2m} + ... + v^{(k-1)m}` in `q`; the zero polynomial when `k = 0`.
pub fn q_integer(k: u32, m: u64) -> UniPoly {
    UniPoly::from_terms(Var::Q, (0..k as u64).map(|i| (i * m, BigInt::one())))
}

/// Falling factorial `k (k-1) ... (k-n+1)`; 1 when `n = 0`.
pub fn falling_factorial(k: &BigInt, n: u64) -> BigInt {
    let mut acc = BigInt::one();
    let mut f = k.clone();
    for _ in 0..n {
        if f.is_zero() {
            return BigInt::zero();
        }
        acc *= &f;
        f -= 1;
    }
    acc
}

/// Sparse polynomial in two tagged variables `(first, second)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct BivariatePoly {
    vars: (Var, Var),
    terms: BTreeMap<(u64, u64), BigInt>,
}

impl BivariatePoly {
    pub fn zero(first: Var, second: Var) -> Self {
        BivariatePoly { vars: (first, second), terms: BTreeMap::new() }
    }

    pub fn vars(&self) -> (Var, Var) {
        self.vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = ((u64, u64), &BigInt)> + '_ {
        self.terms.iter().map(|(&k, c)| (k, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, d1: u64, d2: u64) -> BigInt {
        self.terms.get(&(d1, d2)).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn add_term(&mut self, d1: u64, d2: u64, c: BigInt) {
        add_into(&mut self.terms, (d1, d2), c);
    }

    /// Largest degree in each variable, `None` for zero.
    pub fn degrees(&self) -> Option<(u64, u64)> {
        let d1 = self.terms.keys().map(|k| k.0).max()?;
        let d2 = self.terms.keys().map(|k| k.1).max()?;
        Some((d1, d2))
    }

    /// `a(first) * b(second)`.
    pub fn from_product(a: &UniPoly, b: &UniPoly) -> Result<Self> {
        if a.var() == b.var() {
            return Err(Error::VariableMismatch(a.var().symbol(), b.var().symbol()));
        }
        let mut out = BivariatePoly::zero(a.var(), b.var());
        for (da, ca) in a.terms() {
            for (db, cb) in b.terms() {
                add_into(&mut out.terms, (da, db), ca * cb);
            }
        }
        Ok(out)
    }

    /// Embeds a univariate polynomial in the first or second slot.
    pub fn from_uni(p: &UniPoly, first: Var, second: Var) -> Result<Self> {
        let mut out = BivariatePoly::zero(first, second);
        if p.var() == first {
            for (d, c) in p.terms() {
                add_into(&mut out.terms, (d, 0), c.clone());
            }
        } else if p.var() == second {
            for (d, c) in p.terms() {
                add_into(&mut out.terms, (0, d), c.clone());
            }
        } else {
            return Err(Error::VariableMismatch(p.var().symbol(), first.symbol()));
        }
        Ok(out)
    }

    fn check_vars(&self, other: &BivariatePoly) -> Result<()> {
        if self.vars != other.vars {
            return Err(Error::VariableMismatch(self.vars.0.symbol(), other.vars.0.symbol()));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &BivariatePoly) -> Result<Self> {
        self.check_vars(other)?;
        let mut out = self.clone();
        for (&k, c) in &other.terms {
            add_into(&mut out.terms, k, c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &BivariatePoly) -> Result<Self> {
        self.check_vars(other)?;
        let mut out = self.clone();
        for (&k, c) in &other.terms {
            add_into(&mut out.terms, k, -c);
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &BivariatePoly) -> Result<Self> {
        self.check_vars(other)?;
        let mut out = BivariatePoly::zero(self.vars.0, self.vars.1);
        for (&(a1, a2), ca) in &self.terms {
            for (&(b1, b2), cb) in &other.terms {
                add_into(&mut out.terms, (a1 + b1, a2 + b2), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        let mut out = BivariatePoly::zero(self.vars.0, self.vars.1);
        for (&k, x) in &self.terms {
            add_into(&mut out.terms, k, x * c);
        }
        out
    }

    pub fn eval(&self, first: &BigRational, second: &BigRational) -> BigRational {
        let Some((t1, t2)) = self.degrees() else { return BigRational::zero() };
        let (n1, e1) = (power_table(first.numer(), t1), power_table(first.denom(), t1));
        let (n2, e2) = (power_table(second.numer(), t2), power_table(second.denom(), t2));
        let mut acc = BigInt::zero();
        for (&(d1, d2), c) in &self.terms {
            acc += c * &n1[d1 as usize] * &e1[(t1 - d1) as usize] * &n2[d2 as usize] * &e2[(t2 - d2) as usize];
        }
        BigRational::new(acc, &e1[t1 as usize] * &e2[t2 as usize])
    }

    /// Fixes the second variable: returns `(p, d)` with `self(·, second) = p(·) / d`.
    pub fn collapse_second(&self, second: &BigRational) -> (UniPoly, BigInt) {
        let t2 = self.terms.keys().map(|k| k.1).max().unwrap_or(0);
        let (n2, e2) = (power_table(second.numer(), t2), power_table(second.denom(), t2));
        let mut p = UniPoly::zero(self.vars.0);
        for (&(d1, d2), c) in &self.terms {
            p.add_term(d1, c * &n2[d2 as usize] * &e2[(t2 - d2) as usize]);
        }
        (p, e2[t2 as usize].clone())
    }

    /// Substitutes `second := first^m`, giving a polynomial in the first variable.
    pub fn substitute_second_power(&self, m: u64) -> UniPoly {
        let mut out = UniPoly::zero(self.vars.0);
        for (&(d1, d2), c) in &self.terms {
            out.add_term(d1 + d2 * m, c.clone());
        }
        out
    }
}

impl Serialize for BivariatePoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<(u64, u64, String)> =
            self.terms.iter().map(|(&(a, b), c)| (a, b, c.to_string())).collect();
        rows.serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(c: &[i64]) -> UniPoly {
        UniPoly::from_coeffs(Var::Q, c)
    }

    #[test]
    fn small_products() {
        assert_eq!(&q(&[-1, 1]) * &q(&[1, 1]), q(&[-1, 0, 1]));
        let zm1 = UniPoly::from_coeffs(Var::Z, &[-1, 1]);
        assert_eq!(zm1.pow(2), UniPoly::from_coeffs(Var::Z, &[1, -2, 1]));
        let b = BivariatePoly::from_product(&q(&[1, 1]), &zm1).unwrap();
        // qz - q + z - 1
        assert_eq!(b.coeff(1, 1), BigInt::from(1));
        assert_eq!(b.coeff(1, 0), BigInt::from(-1));
        assert_eq!(b.coeff(0, 1), BigInt::from(1));
        assert_eq!(b.coeff(0, 0), BigInt::from(-1));
        assert_eq!(b.len(), 4);
    }

    #[test]
    fn mismatched_variables_are_rejected() {
        let z = UniPoly::from_coeffs(Var::Z, &[0, 1]);
        assert_eq!(poly_mul(&q(&[1]), &z), Err(Error::VariableMismatch('q', 'z')));
    }

    #[test]
    fn exact_division_examples() {
        let num = &q(&[-1, 0, 1]) * &q(&[-1, 1]);
        let den = q(&[-1, 1]).pow(2);
        assert_eq!(num.exact_div(&den).unwrap(), q(&[1, 1]));
        let p = &(&q(&[-1, 1]) * &q(&[-1, 0, 1])) * &q(&[-1, 0, 0, 1]);
        assert_eq!(p.exact_div(&p).unwrap(), q(&[1]));
        assert_eq!(q(&[-1, 0, 0, 1]).exact_div(&q(&[-1, 1])).unwrap(), q(&[1, 1, 1]));
        assert!(matches!(q(&[1, 0, 1]).exact_div(&q(&[-1, 1])), Err(Error::Exactness(_))));
        assert!(matches!(q(&[1, 1]).exact_div(&q(&[0, 2])), Err(Error::Exactness(_))));
    }

    #[test]
    fn q_integer_values() {
        assert_eq!(q_integer(3, 2).eval_int(&BigInt::from(2)), BigInt::from(21));
        assert_eq!(q_integer(1, 7), q(&[1]));
        assert_eq!(q_integer(2, 1), q(&[1, 1]));
        assert!(q_integer(0, 3).is_zero());
    }

    #[test]
    fn falling_factorial_values() {
        assert_eq!(falling_factorial(&BigInt::from(5), 3), BigInt::from(60));
        assert_eq!(falling_factorial(&BigInt::from(2), 4), BigInt::zero());
        assert_eq!(falling_factorial(&BigInt::from(7), 0), BigInt::one());
    }

    #[test]
    fn rational_evaluation_matches_integer_evaluation() {
        let p = q(&[3, 0, -2, 0, 0, 1]);
        let at = BigInt::from(-3);
        assert_eq!(p.eval(&BigRational::from_integer(at.clone())), BigRational::from_integer(p.eval_int(&at)));
        let half = BigRational::new(1.into(), 2.into());
        // 3 - 2/4 + 1/32
        assert_eq!(p.eval(&half), BigRational::new(81.into(), 32.into()));
    }

    #[test]
    fn json_shape() {
        let p = q(&[-1, 0, 2]);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"var":"q","terms":[[0,"-1"],[2,"2"]]}"#);
        let back: UniPoly = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
        let b = BivariatePoly::from_product(&q(&[0, 3]), &UniPoly::from_coeffs(Var::Z, &[0, 0, 1])).unwrap();
        assert_eq!(serde_json::to_string(&b).unwrap(), r#"[[1,2,"3"]]"#);
    }

    fn small_poly() -> impl Strategy<Value = UniPoly> {
        prop::collection::vec(-20i64..=20, 0..6).prop_map(|c| q(&c))
    }

    proptest! {
        #[test]
        fn division_undoes_multiplication(a in small_poly(), b in small_poly()) {
            prop_assume!(!b.is_zero());
            prop_assert_eq!((&a * &b).exact_div(&b).unwrap(), a);
        }

        #[test]
        fn evaluation_is_a_ring_homomorphism(a in small_poly(), b in small_poly(), x in -5i64..=5) {
            let x = BigInt::from(x);
            prop_assert_eq!((&a * &b).eval_int(&x), a.eval_int(&x) * b.eval_int(&x));
            prop_assert_eq!((&a - &b).eval_int(&x), a.eval_int(&x) - b.eval_int(&x));
        }
    }
}
