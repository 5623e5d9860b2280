//! Library surface of the `nft` command-line tool: signal file formats,
//! output documents, and the benchmark harness.

pub mod bench;
pub mod output;
pub mod signal_file;
