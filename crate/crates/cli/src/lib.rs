//! File formats and command-line front end for `ilrc-core`.
//!
//! Keys and ciphertexts are stored in a line-based text envelope carrying the
//! field description, the parameter set, a base64 payload and a CRC32.  Byte
//! strings are mapped to message matrices block by block.

pub mod cli;
pub mod envelope;
pub mod fixture;
pub mod message;
