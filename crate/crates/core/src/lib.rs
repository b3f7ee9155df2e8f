//! Exact integer programming by Graver-best augmentation.

pub mod augment;
pub mod cli;
pub mod dp;
pub mod error;
pub mod graver;
pub mod ilp;
pub mod json;
pub mod linalg;
pub mod strongpoly;
pub mod structure;

pub use error::{Error, Result};
pub use ilp::{ExtInt, Instance, SolveReport, Status};
pub use linalg::IntMatrix;
