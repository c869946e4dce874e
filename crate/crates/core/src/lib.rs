#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod cone;
pub mod config;
pub mod error;
pub mod linalg;
pub mod metrics;
pub mod output;
pub mod preference;
pub mod problem;
pub mod solvers;
pub mod subproblem;

pub use error::{Error, Result};
