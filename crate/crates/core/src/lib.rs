pub mod batch;
pub mod cli;
pub mod continuous;
pub mod cyclic;
pub mod error;
pub mod exact;
pub mod hypergraph;
pub mod lab;
pub mod sim;
pub mod windows;

pub use error::{Error, Result};
pub use exact::ExactRational;
