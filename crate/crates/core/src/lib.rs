//! Decentralized surveillance-strategy synthesis for mobile sensors and
//! static alarms tracking an adversarial target on a grid.
//!
//! A world is split into one region per mobile sensor. Each region yields a
//! single-sensor subgame whose belief-set game is solved on its own against a
//! local objective; running the local strategies side by side enforces the
//! global objective.

pub mod belief;
pub mod decompose;
pub mod document;
pub mod fixtures;
pub mod game;
pub mod loc;
pub mod runtime;
pub mod solver;
pub mod specs;
pub mod world;

pub use belief::{BeliefState, TargetChoice, TriggerMode, DEFAULT_CAP};
pub use decompose::{build_subgame, Partition, Subgame};
pub use game::GameStructure;
pub use loc::{Loc, LocSet, TriggerSet};
pub use specs::{local_spec, LocalSpec, SurveillanceSpec};
pub use world::{parse_world, SurveillanceWorld};
