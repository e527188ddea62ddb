//! Discrete-time quantum Markov chains with coherent-absorber
//! post-processing and pattern-counting parameter estimation.

pub mod absorber;
pub mod config;
pub mod error;
pub mod estimator;
pub mod experiments;
pub mod fisher;
pub mod io;
pub mod linalg;
pub mod models;
pub mod patterns;
pub mod qmc;
pub mod stats;
pub mod tim;
pub mod trajectory;

pub use error::{Error, Result};
