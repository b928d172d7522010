//! Configuration-driven front end for `yamabe-lab`.

// Guards are written `!(x > 0.0)` so that NaN fails them too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod report;

pub use commands::{Stage, StageError};
pub use config::RunConfig;
