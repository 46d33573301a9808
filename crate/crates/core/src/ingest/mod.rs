//! Parse-bundle ingestion: sentences, coreference output and per-sentence
//! AMR (PENMAN) or SRL parses.

mod bundle;
pub mod penman;
mod types;

pub use bundle::{load_parse_bundle, read_parse_bundle, BundleError};
pub use penman::{parse_penman, to_penman, PenmanError, PenmanErrorKind};
pub use types::*;
