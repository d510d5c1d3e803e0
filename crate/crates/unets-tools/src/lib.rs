//! IO, corpus generation, and claim verification around `unets-core`.

#![forbid(unsafe_code)]

pub mod corpus;
pub mod netformat;
