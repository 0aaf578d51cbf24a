//! Coordination core: data model, explainable matching, synthetic ecosystems,
//! persistence with referential integrity, and rule-based challenge intake.

pub mod apportion;
pub mod dataset;
pub mod engine;
pub mod error;
pub mod intake;
pub mod model;
pub mod region;
pub mod service;
pub mod store;
pub mod synth;
pub mod validate;

#[cfg(test)]
mod fixtures;

pub use engine::{default_profile, explain, normalize_profile, rank_solutions, score_pair, RankedMatch};
pub use error::{EngineError, FormatError, IntakeError, ModelError, StoreError, SynthError};
pub use model::*;
pub use store::Store;
pub use intake::TemplateSet;
pub use service::ServiceError;
pub use validate::{validate_entity, Violation};
