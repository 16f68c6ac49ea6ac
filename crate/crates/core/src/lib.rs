pub mod elimination;
pub mod epistemic;
pub mod error;
pub mod format;
pub mod game;
pub mod harness;
pub mod lattice;
pub mod lp;
pub mod model_format;
pub mod optimality;

pub use error::{Error, Result};
