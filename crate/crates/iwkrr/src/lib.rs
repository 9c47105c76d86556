pub mod error;
pub mod kernel;
pub mod linalg;

pub use error::{Error, Result};
pub use kernel::{eval_kernel, gram, KernelFamily, KernelSpec};
