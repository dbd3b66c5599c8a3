pub mod arith;
pub mod bijection;
pub mod catalog;
pub mod error;
pub mod group;
pub mod io;
pub mod lab;
pub mod symmetric;
pub mod topology;
pub use error::{Error, Result};
pub mod solutions;
