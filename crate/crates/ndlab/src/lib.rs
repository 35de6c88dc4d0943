//! Experiment harness: configuration, dispatch, producer-independent
//! verification and JSON run reports.

pub mod config;
pub mod error;
pub mod report;
pub mod runner;
pub mod verify;

pub use config::{Algorithm, GraphSource, RunConfig};
pub use error::HarnessError;
pub use report::RunReport;
pub use runner::{run, RunOutcome};
pub use verify::{verify_artifact, ArtifactKind, Verification};
