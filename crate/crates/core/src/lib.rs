pub mod arith;
pub mod cache;
pub mod cli;
pub mod error;
pub mod family;
pub mod functor;
pub mod group;
pub mod linalg;
pub mod monoidal;
pub mod stability;
pub mod subgroup;
pub mod wqo;

pub use error::{Error, Result};
