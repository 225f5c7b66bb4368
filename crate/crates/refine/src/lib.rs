//! File formats, the timed embedding pipeline and the `refine` command line,
//! on top of [`refine_core`].

pub mod bench;
pub mod cli;
pub mod edgelist;
pub mod embfile;
pub mod error;
pub mod labels;
pub mod mtx;
pub mod pipeline;
pub mod report;

pub use error::{Error, Result};
