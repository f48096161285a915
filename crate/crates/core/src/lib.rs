#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod iterated;
pub mod jointlaw;
pub mod lastzero;
pub mod mcoracle;
pub mod quad;
pub mod reflmax;
pub mod report;
pub mod selftest;
pub mod specfun;

pub use error::{Error, Result};
