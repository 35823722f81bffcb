//! Command-line pipeline around [`nerctx_core`]: corpus storage, acquisition
//! through a search client, TSV file formats and the `nerctx` binary.

pub mod acquire;
pub mod cli;
pub mod store;
pub mod tsv;
