//! Readers for bibliographic export files.
//!
//! Two physical layouts are supported, both producing [`RawRecord`]s that
//! keep every field tag exactly as exported:
//!
//! * the field-tagged plain-text layout (`FN`/`VR` header, two-character tags,
//!   three-space continuation lines, `ER` record terminator, `EF` end marker),
//! * comma-separated exports with a header row, mapped onto the same tags
//!   through a [`HeaderMap`].
//!
//! Address strings from the `C1` field are split by [`parse_address`].

mod address;
mod csv_export;
mod record;
mod tagged;

use thiserror::Error;

pub use address::{parse_address, AddressEntry};
pub use csv_export::{parse_csv, HeaderMap};
pub use record::{split_multi_value, RawRecord, Tag};
pub use tagged::{parse_tagged, write_tagged};

/// Errors raised while reading an export file.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IngestError {
    #[error("line {line}: not a field tag or continuation line: {text:?}")]
    MalformedTagLine { line: usize, text: String },
    #[error("record starting at line {line} is not terminated by ER")]
    UnterminatedRecord { line: usize },
    #[error("input contains no data")]
    EmptyFile,
    #[error("line {line}: field {tag} repeated within one record")]
    DuplicateField { line: usize, tag: Tag },
    #[error("invalid field tag {0:?}")]
    InvalidTag(String),
    #[error("no column mapped to required field {0}")]
    MissingRequiredColumn(Tag),
    #[error("row {row}: expected {expected} cells, found {found}")]
    RaggedRow { row: usize, expected: usize, found: usize },
    #[error("row {row}: {message}")]
    Csv { row: usize, message: String },
    #[error("address has no content outside the author bracket: {0:?}")]
    EmptyAddress(String),
}

/// Decodes raw file bytes.
///
/// Valid UTF-8 is returned unchanged. Otherwise the bytes are read as
/// latin-1 when `latin1_fallback` is set, or decoded lossily with U+FFFD
/// replacement characters. Never fails.
pub fn decode_input(bytes: &[u8], latin1_fallback: bool) -> String {
    match std::str::from_utf8(bytes) {
        Ok(s) => s.to_owned(),
        Err(_) if latin1_fallback => bytes.iter().map(|&b| b as char).collect(),
        Err(_) => String::from_utf8_lossy(bytes).into_owned(),
    }
}

/// Physical layout of an export file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputFormat {
    Tagged,
    Csv,
    Auto,
}

impl InputFormat {
    /// Resolves `Auto` by file extension, then by sniffing the first
    /// non-blank line.
    pub fn resolve(self, file_name: &str, content: &str) -> InputFormat {
        if self != InputFormat::Auto {
            return self;
        }
        let lower = file_name.to_ascii_lowercase();
        if lower.ends_with(".csv") {
            return InputFormat::Csv;
        }
        if lower.ends_with(".txt") || lower.ends_with(".ciw") {
            return InputFormat::Tagged;
        }
        let first = content
            .trim_start_matches('\u{feff}')
            .lines()
            .find(|l| !l.trim().is_empty())
            .unwrap_or("");
        let bytes = first.as_bytes();
        let tag_like = bytes.len() >= 2
            && bytes[..2].iter().all(|b| b.is_ascii_uppercase() || b.is_ascii_digit())
            && (bytes.len() == 2 || bytes[2] == b' ');
        if tag_like {
            InputFormat::Tagged
        } else {
            InputFormat::Csv
        }
    }
}
