#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod bits;
pub mod error;
pub mod experiment;
pub mod lattice;
pub mod oracle;
pub mod protocol;
pub mod rng;
pub mod sim;
pub mod sqt;
pub mod workstats;
