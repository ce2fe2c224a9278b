//! Approximation machinery for resource minimization for fire containment on
//! trees (classic and smooth budgets) and for smooth non-uniform k-center.
//!
//! Everything is computed in exact rational arithmetic.

pub mod cli;
pub mod compress_tree;
pub mod dp_tree;
pub mod error;
pub mod explore_tree;
pub mod gen;
pub mod lp_tree;
pub mod nukc;
pub mod oracles;
pub mod pipeline_tree;
pub mod ratio;
pub mod tree_core;

pub use error::{Error, Result};
pub use ratio::Q;
