use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exactalg::{BivariatePoly, Var};

/// Colour-class vector `c = (c_0, ..., c_{k-1})`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ExponentVector(pub Vec<u64>);

impl ExponentVector {
    pub fn zeros(k: u32) -> Self {
        ExponentVector(vec![0; k as usize])
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    /// `Σ_i c_i q^i`, or `None` on overflow.
    pub fn r_exponent(&self, q: u64) -> Option<u64> {
        let mut acc: u64 = 0;
        let mut pw: u64 = 1;
        for (i, &c) in self.0.iter().enumerate() {
            if c > 0 {
                acc = acc.checked_add(c.checked_mul(pw)?)?;
            }
            if i + 1 < self.0.len() {
                pw = pw.checked_mul(q)?;
            }
        }
        Some(acc)
    }

    /// Right-lexicographic comparison: the last coordinate is most significant.
    pub fn cmp_right_lex(&self, other: &Self) -> std::cmp::Ordering {
        self.0.iter().rev().cmp(other.0.iter().rev())
    }
}

/// Integer coefficients keyed by `(power of t, class vector c)`: the value
/// `Σ coeff · t^b · r^{Σ_i c_i q^i}`. Used for `B_{r,q}(G; t - 1, k)` with `q`
/// and `r` kept formal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RExponentTable {
    k: u32,
    terms: BTreeMap<(u32, ExponentVector), BigInt>,
}

impl RExponentTable {
    pub fn new(k: u32) -> Self {
        RExponentTable { k, terms: BTreeMap::new() }
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn add(&mut self, t_power: u32, c: ExponentVector, coeff: BigInt) -> Result<()> {
        if c.0.len() != self.k as usize {
            return Err(Error::Representation(format!("class vector of length {} in a k = {} table", c.0.len(), self.k)));
        }
        if coeff.is_zero() {
            return Ok(());
        }
        let key = (t_power, c);
        let v = self.terms.entry(key.clone()).or_insert_with(BigInt::zero);
        *v += coeff;
        if v.is_zero() {
            self.terms.remove(&key);
        }
        Ok(())
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, &ExponentVector, &BigInt)> + '_ {
        self.terms.iter().map(|((b, c), v)| (*b, c, v))
    }

    pub fn coeff(&self, t_power: u32, c: &ExponentVector) -> BigInt {
        self.terms.get(&(t_power, c.clone())).cloned().unwrap_or_else(BigInt::zero)
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

    pub fn all_nonnegative(&self) -> bool {
        self.terms.values().all(|v| !v.is_negative())
    }

    /// `Σ coeff · t^b · r^{Σ c_i q^i}`.
    pub fn evaluate(&self, r: &BigRational, q: u64, t: &BigRational) -> Result<BigRational> {
        Ok(self.to_poly(q)?.eval(t, r))
    }

    /// The table at a fixed `q` as a polynomial in `(t, r)`.
    pub fn to_poly(&self, q: u64) -> Result<BivariatePoly> {
        table_poly(&self.terms, q)
    }

    pub(crate) fn into_parts(self) -> (u32, BTreeMap<(u32, ExponentVector), BigInt>) {
        (self.k, self.terms)
    }

    pub(crate) fn from_parts(k: u32, terms: BTreeMap<(u32, ExponentVector), BigInt>) -> Self {
        RExponentTable { k, terms }
    }
}

pub(crate) fn table_poly(terms: &BTreeMap<(u32, ExponentVector), BigInt>, q: u64) -> Result<BivariatePoly> {
    let mut out = BivariatePoly::zero(Var::T, Var::R);
    for ((b, c), v) in terms {
        let e = c.r_exponent(q).ok_or(Error::Overflow("r exponent"))?;
        out.add_term(*b as u64, e, v.clone());
    }
    Ok(out)
}

#[derive(Serialize)]
pub(crate) struct TermWire<'a> {
    pub t_power: u32,
    pub classes: &'a [u64],
    pub coeff: String,
}

pub(crate) fn serialize_table<S: Serializer>(
    s: S,
    name: &'static str,
    k: u32,
    terms: &BTreeMap<(u32, ExponentVector), BigInt>,
) -> std::result::Result<S::Ok, S::Error> {
    let wire: Vec<TermWire> =
        terms.iter().map(|((b, c), v)| TermWire { t_power: *b, classes: &c.0, coeff: v.to_string() }).collect();
    let mut st = s.serialize_struct(name, 2)?;
    st.serialize_field("k", &k)?;
    st.serialize_field("terms", &wire)?;
    st.end()
}

impl Serialize for RExponentTable {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        serialize_table(s, "RExponentTable", self.k, &self.terms)
    }
}
