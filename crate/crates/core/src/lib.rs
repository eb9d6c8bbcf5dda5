#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod cli;
pub mod config;
pub mod error;
pub mod hierarchy;
pub mod lattice;
pub mod quadrature;
pub mod specfun;
pub mod subordination;

pub use error::{Error, Result};
