pub mod automorphisms;
pub mod burnside;
pub mod cli;
pub mod error;
pub mod graphmap;
pub mod matrices;
pub mod substitutions;
pub mod words;

pub use error::{Error, Result};
