//! Validation and cleaning of raw export records.
//!
//! [`clean`] turns [`RawRecord`](crate::ingest::RawRecord)s into
//! [`PaperRecord`]s: author and institution names are canonicalized, the
//! country of every address is derived from its last segment, duplicates are
//! dropped and every repair or rejection is reported as a [`Diagnostic`].
//! [`emit_json`] writes the cleaned corpus as a single JSON document.

mod clean;
mod country;
mod json;
mod names;
mod record;

use thiserror::Error;

pub use clean::{clean, to_raw, CleanOptions, Diagnostic, DiagnosticKind};
pub use country::{extract_country, AliasMap};
pub use json::{emit_json, load_json, PapersDocument, SCHEMA_VERSION};
pub use names::{canonicalize_name, NameKind};
pub use record::{Affiliation, PaperRecord};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NormalizeError {
    #[error("unrecognized country {0:?}")]
    UnrecognizedCountry(String),
    #[error("address has no parts")]
    NoAddressParts,
    #[error("alias map line {line}: expected raw=canonical, found {text:?}")]
    AliasSyntax { line: usize, text: String },
}
