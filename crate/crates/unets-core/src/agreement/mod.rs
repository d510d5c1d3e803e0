//! Agreement graphs and the distances built on them.
//!
//! An agreement graph for a pair of networks is a multigraph whose
//! components split into agreement subgraphs and single-edge disagreement
//! components. Both networks decompose into subdivisions of these pieces:
//! the subgraph images carry the shared structure, the disagreement images
//! are the paths one has to rewire to turn one network into the other.
//! Minimising the number of disagreement edges yields the agreement
//! distance; allowing the subgraphs themselves to carry sprouts and
//! charging for those instead yields the endpoint variant, which coincides
//! with the replug distance.
//!
//! The module is split into the embedding substrate ([`AgreementEmbedding`]
//! plus the backtracking certifier), the red-black decomposition engine
//! behind [`agreement_distance`], ordered-embedding machinery, the
//! tree-forest specialisation, the endpoint variant, and the constructive
//! translation of a minimal agreement graph into a rearrangement sequence.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::fmt;

use crate::multigraph::{Label, MultiGraph};

mod decompose;
mod distance;
mod embedding;
mod maf;
mod meag;
mod ordered;
mod sequence;

pub use decompose::{red_black_decompositions, RedBlackDecomposition, SuppressedComponent};
pub use distance::{agreement_distance, AdResult};
pub use embedding::{
    check_agreement_embedding, verify_embedding, AgreementEmbedding, ComponentImage, TrailImage,
};
pub use maf::maf_distance;
pub use meag::{endpoint_agreement_distance, meag_search};
pub use ordered::{embedding_change, ordered_embedding, verify_ordered_embedding, SproutRef};
pub use sequence::mag_to_tbr_sequence;

// ── Agreement graphs ─────────────────────────────────────────────────────

/// Which counting regime an agreement graph lives in.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum AgreementMode {
    /// Sprout-free subgraphs; the disagreement edges are minimised.
    Mag,
    /// Subgraphs may carry sprouts; the disagreement count is pinned to the
    /// tier gap and the subgraph sprouts are minimised instead.
    Meag,
}

/// An agreement graph: labelled subgraph components plus an abstract tally
/// of single-edge disagreement components (each contributing two sprouts).
#[derive(Clone, Debug)]
pub struct AgreementGraph {
    /// Agreement subgraph components; labelled singletons are single-vertex
    /// entries.
    pub subgraphs: Vec<MultiGraph>,
    /// Number of disagreement edges.
    pub disagreement_count: u32,
    /// Counting regime.
    pub mode: AgreementMode,
}

impl AgreementGraph {
    /// Total number of sprouts carried by the agreement subgraphs.
    pub fn sprout_tally(&self) -> u32 {
        self.subgraphs.iter().map(|s| s.sprouts().len() as u32).sum()
    }

    /// Structural validity for a pair of `n`-leaf hosts: labels are exactly
    /// `1..=n` across all subgraphs, labelled vertices have degree at most
    /// one, and in MAG mode the subgraphs are sprout-free with at least
    /// `components - 1` disagreement edges.
    pub fn validate(&self, n: u32) -> Result<(), AgreementError> {
        let mut seen: BTreeSet<Label> = BTreeSet::new();
        for s in &self.subgraphs {
            for (label, v) in s.labelled_vertices() {
                if label.0 > n || !seen.insert(label) {
                    return Err(AgreementError::LabelMismatch);
                }
                if s.degree(v).expect("labelled vertex exists") > 1 {
                    return Err(AgreementError::Malformed("labelled vertex above degree one"));
                }
            }
        }
        if seen.len() as u32 != n {
            return Err(AgreementError::LabelMismatch);
        }
        match self.mode {
            AgreementMode::Mag => {
                if self.sprout_tally() != 0 {
                    return Err(AgreementError::Malformed("sprout in a MAG subgraph"));
                }
                let m = self.subgraphs.len() as u32;
                if m > 0 && self.disagreement_count < m - 1 {
                    return Err(AgreementError::Malformed(
                        "fewer disagreement edges than subgraph joins",
                    ));
                }
            }
            AgreementMode::Meag => {}
        }
        Ok(())
    }
}

// ── Errors ───────────────────────────────────────────────────────────────

/// Why an agreement operation rejected its input.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum AgreementError {
    /// Subgraph labels do not match the host leaf labels.
    LabelMismatch,
    /// The two inputs do not carry the same leaf set.
    LeafSetMismatch,
    /// An agreement graph breaks a structural invariant.
    Malformed(&'static str),
    /// An embedding fails verification against its graph and host.
    InvalidEmbedding(&'static str),
    /// The requested sprout configuration does not exist in the embedding.
    AttachmentMissing,
    /// The input must be a tree (tier zero).
    NotATree { tier: u32 },
    /// Enumeration hit the caller's budget before finishing.
    BudgetExhausted { explored: u64 },
    /// A certified input was expected but re-certification failed.
    Uncertified,
    /// The constructive translation did not land on the target network.
    ConstructionFailed,
}

impl fmt::Display for AgreementError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AgreementError::LabelMismatch => write!(f, "subgraph labels do not match the host"),
            AgreementError::LeafSetMismatch => write!(f, "inputs carry different leaf sets"),
            AgreementError::Malformed(why) => write!(f, "malformed agreement graph: {why}"),
            AgreementError::InvalidEmbedding(why) => write!(f, "invalid embedding: {why}"),
            AgreementError::AttachmentMissing => {
                write!(f, "the requested attachment does not exist")
            }
            AgreementError::NotATree { tier } => {
                write!(f, "input has tier {tier}, expected a tree")
            }
            AgreementError::BudgetExhausted { explored } => {
                write!(f, "budget exhausted after {explored} candidates")
            }
            AgreementError::Uncertified => write!(f, "input failed re-certification"),
            AgreementError::ConstructionFailed => {
                write!(f, "constructed sequence missed its target")
            }
        }
    }
}
