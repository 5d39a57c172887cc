//! Exact arithmetic kernel: sparse polynomials over the integers, q-integers,
//! and rank / dependency computation for rational matrices.
//!
//! Big integers and rationals come from `num-bigint` / `num-rational`.

pub mod linalg;
pub mod modular;
pub mod poly;

pub use linalg::{lift_dependency, rank, rank_and_nullspace, RankMode, RankResult, RationalMatrix};
pub use num_bigint::BigInt;
pub use num_rational::BigRational;
pub use poly::{falling_factorial, poly_mul, q_integer, rational_pow, BivariatePoly, UniPoly, Var};
