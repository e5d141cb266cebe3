pub mod certify;
pub mod error;
pub mod morse;
pub mod polytope;
pub mod simplicial;
pub mod state;

pub use error::{Error, Result};
