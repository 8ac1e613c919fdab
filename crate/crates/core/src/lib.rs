#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod discrete;
pub mod error;
pub mod fokker_planck;
pub mod numerics;
pub mod simulate;
pub mod stats;

pub use error::{Error, Result};
