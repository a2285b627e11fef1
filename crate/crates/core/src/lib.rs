//! Exact dimension formulas, boundary and fixed-graph censuses, and a genus-0
//! Gromov-Witten engine for Grassmannians and SL flag varieties.
//!
//! Everything is computed with big rationals. Closed formulas come with
//! brute-force counterparts so they can be checked against each other.

pub mod error;
pub mod fixedloci;
pub mod gwcore;
pub mod modspace;
pub mod rational;
pub mod schubert;
pub mod symgroup;

pub use error::{Error, Result};
pub use rational::{Int, Q};
