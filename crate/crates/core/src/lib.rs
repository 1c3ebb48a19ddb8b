mod error;
pub mod cli;
pub mod decomposition;
pub mod experiments;
pub mod filters;
pub mod graph;
pub mod io;
pub mod linalg;
pub mod spectral;
pub mod svg;

pub use error::{Error, Result};
