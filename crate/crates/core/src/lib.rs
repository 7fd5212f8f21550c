//! Compiles quadratic assignment instances into weighted king's-graph
//! independent set problems and checks the result against exact oracles.

pub mod cbop;
pub mod compiler;
pub mod error;
pub mod io;
pub mod kinggraph;
pub mod mwis;
pub mod oracle;
pub mod pipeline;
pub mod qap;
pub mod rational;
pub mod tile;

pub use error::{Error, Result};
pub use rational::Rational;
