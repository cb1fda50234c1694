// NaN must fail range checks, hence `!(x > 0.0)`; reference constants keep
// all the digits they were frozen with.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod cli;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod measure;
pub mod output;
pub mod qalg;
pub mod scenarios;
pub mod schedule;
pub mod tolerance;

pub use error::{Result, ZenoError};
