//! Exact and numerical tools for z-measures on partitions and their
//! discrete hypergeometric correlation kernels.

pub mod cli;
pub mod error;
pub mod kernel;
pub mod oracle;
pub mod partitions;
pub mod psi;
pub mod specfun;
pub mod verify;
pub mod zmeasure;

pub use error::{Error, Result};
pub use partitions::{HalfInt, MayaDiagram, Partition};
pub use zmeasure::{Series, ZParams};
