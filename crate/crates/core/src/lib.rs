//! Exact computation of chromatic-type graph functions and the Potts
//! partition function, with independent algorithms for cross-checking their
//! identities, plus the integer-partition rank machinery behind the
//! dependency of the sequences `c(τ, y)`.
//!
//! Module map:
//! - [`graphcore`]: vertex-weighted multigraphs, deletion / contraction,
//!   spanning-subgraph components, file formats, test corpora.
//! - [`exactalg`]: sparse integer polynomials, q-integers, exact and modular
//!   rank with verified dependency vectors.
//! - [`chromatic`]: `M^ω_{r,q}`, `B^ω_{r,q}`, `M_q`, `B_q`.
//! - [`classicpoly`]: the U-polynomial, truncated XB and the substitutions
//!   linking them to `B_{r,q}`.
//! - [`potts`]: Potts Hamiltonian and partition function, identity reports.
//! - [`partitiondep`]: partitions, `c(τ, y)`, `s(τ, q, z)`, ranks, threshold.
//! - [`verify`]: identity checks over graphs and parameter grids.

pub mod chromatic;
pub mod classicpoly;
pub mod error;
pub mod exactalg;
pub mod graphcore;
pub mod limits;
pub mod partitiondep;
pub mod potts;
pub mod verify;

pub use error::{Error, Result};
pub use limits::Limits;
