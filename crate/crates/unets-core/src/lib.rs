//! Exact, desk-scale toolkit for unrooted binary proper phylogenetic networks.
//!
//! The crate is organized bottom-up:
//!
//! * [`multigraph`] — the raw undirected multigraph substrate (loops and
//!   parallel edges allowed, partial leaf labelling) with the suboperations
//!   every rearrangement is built from, plus canonical forms for
//!   label-preserving isomorphism.
//! * [`phylo`] — validated network types: proper unrooted binary phylogenetic
//!   networks and the relaxed replug networks, tier computation, properness,
//!   and the display relation.
//! * [`rearrange`] — neighborhood generators for TBR, PR, and replug
//!   operations with every validity restriction enforced.
//! * [`search`] — exact shortest-path engines (canonical deduplication,
//!   tier windows, bidirectional meet-in-the-middle) and tier enumeration.
//! * [`agreement`] — agreement graphs and embeddings, exact agreement
//!   distance and endpoint agreement distance, maximum agreement forests on
//!   trees, and the constructive translation from agreement graphs to TBR
//!   sequences.
//!
//! The crate is `no_std` (with `alloc`) and dependency-free; IO, file
//! formats, corpus generation, and the CLI live in the companion crate.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod agreement;
pub mod multigraph;
pub mod phylo;
pub mod rearrange;
pub mod search;

pub use multigraph::{CanonicalCode, EdgeId, GraphError, Label, MultiGraph, VertexId};
pub use phylo::{PhyloNetwork, ReplugNetwork, ValidationError};
