// Negated comparisons are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod closed_forms;
pub mod error;
pub mod matrix;
pub mod ode;
pub mod omega;
pub mod params;
pub mod poly;
pub mod quad;
pub mod region;
pub mod sampling;
pub mod scattering;
pub mod suites;
pub mod verify;
