//! Exact algebra of labeled rooted trees.
//!
//! A rooted tree whose vertices carry distinct labels determines a hyperplane
//! arrangement: one hyperplane `x_i = x_j` for every strictly comparable pair
//! of vertices.  This crate computes, in exact integer and rational
//! arithmetic, the objects attached to that arrangement:
//!
//! * an explicit basis of logarithmic vector fields and the dual basis of
//!   logarithmic 1-forms, with a Saito-style determinant certificate
//!   ([`arrangement`]);
//! * the intersection lattice, realized as a poset of forests on the same
//!   label set, with Mobius function, characteristic polynomial, chamber
//!   counts, and a two-variable cardinality polynomial ([`lattice`]);
//! * the coalgebra spanned by forests, its dual algebra, and the finite
//!   presentation of that dual by edge generators ([`coalg`]).
//!
//! Everything is deterministic and exact: polynomial identities are decided
//! symbolically or on integer grids large enough to exceed degree bounds,
//! never numerically.  There are no floating point numbers anywhere in the
//! crate.
//!
//! [`sweep`] bundles the whole battery of cross-checks into one report and
//! backs the `arbor sweep` subcommand of the companion CLI.

pub mod arrangement;
pub mod cert;
pub mod coalg;
pub mod exactpoly;
pub mod lattice;
pub mod sweep;
pub mod treecore;

pub use cert::Certificate;
pub use treecore::{Forest, LabelTable, RootedTree};
