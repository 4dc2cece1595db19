//! Command-line front end for `crjoin-core`: file formats, the random
//! property harness and the worked examples.

pub mod cli;
pub mod commands;
pub mod error;
pub mod example2;
pub mod gen;
pub mod harness;
pub mod io;
