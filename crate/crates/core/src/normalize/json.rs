use std::io::{self, Read, Write};

use serde::{Deserialize, Serialize};

use super::PaperRecord;

pub const SCHEMA_VERSION: &str = "1";

/// Top-level layout of `papers.json`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PapersDocument {
    pub schema_version: String,
    pub generated_at: String,
    pub papers: Vec<PaperRecord>,
}

/// Writes the cleaned corpus as one pretty-printed JSON document.
///
/// `generated_at` pins the timestamp; without it the current UTC time is
/// used and output differs between runs.
pub fn emit_json<W: Write>(records: &[PaperRecord], generated_at: Option<&str>, mut sink: W) -> io::Result<()> {
    let generated_at = generated_at
        .map(str::to_owned)
        .unwrap_or_else(|| chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true));
    let doc = PapersDocument {
        schema_version: SCHEMA_VERSION.to_owned(),
        generated_at,
        papers: records.to_vec(),
    };
    serde_json::to_writer_pretty(&mut sink, &doc)?;
    sink.write_all(b"\n")?;
    sink.flush()
}

/// Reads a document written by [`emit_json`].
pub fn load_json<R: Read>(reader: R) -> serde_json::Result<Vec<PaperRecord>> {
    let doc: PapersDocument = serde_json::from_reader(reader)?;
    Ok(doc.papers)
}
