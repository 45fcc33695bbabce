pub mod error;
pub mod gen_euler;
pub mod hypergeom;
pub mod qcalc;
pub mod regime;
pub mod strategy;
pub mod sum;
pub mod verify;

pub use error::{Error, Result};
