//! Lattice invariants and positivity criteria for polarized complex tori.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod criteria;
pub mod diagonal;
pub mod intlin;
pub mod rho2;
pub mod schema;
pub mod svp;
pub mod theta;
pub mod torus;
pub mod tube;
