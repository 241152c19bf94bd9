//! Tabled evaluation: subgoal and answer tables, clause templates and the
//! resolution engine.

pub mod compile;
pub mod engine;
pub mod stats;
pub mod tables;

pub use compile::LoadError;
pub use engine::{Answer, Engine, EngineError, Solutions};
pub use stats::Statistics;
pub use tables::{SubgoalId, SubgoalRecord, SubgoalState, SubgoalTable};
