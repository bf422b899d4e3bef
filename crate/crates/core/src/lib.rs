//! Idea-diversity experiment harness.
//!
//! Generates product ideas under configurable prompting conditions, assigns
//! each idea one category per dimension of a fixed three-dimension scheme and
//! measures how diverse the resulting ideas are: within a participant
//! (fixation), across participants (knowledge partitioning) and for pooled
//! groups (bootstrap comparisons).
//!
//! A deterministic synthetic ideator ([`simident`]) stands in for the chat and
//! embedding services so that every statistic can be reproduced offline.

pub mod analysis;
pub mod categorizer;
pub mod corpus;
pub mod experiment;
pub mod gateway;
pub mod metrics;
pub mod par;
pub mod rng;
pub mod scheme;
pub mod simident;
pub mod strategies;

pub use corpus::{ConditionKind, ConditionSpec, Idea, PersonaPoolKind, Session, Source};
pub use scheme::{CategoryScheme, Dimension, IdeaLabel};

/// Version string embedded in every report for provenance.
pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");
