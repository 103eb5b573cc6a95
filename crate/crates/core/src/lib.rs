//! Exact arithmetic for F-crystals over truncated Witt vectors.

pub mod adlv;
pub mod cli;
pub mod deformnum;
pub mod eltype;
pub mod error;
pub mod fixtures;
pub mod hodgenewton;
pub mod io;
pub mod isocrystal;
pub mod polygon;
pub mod selftest;
pub mod wittring;

pub use error::{Error, Result};
