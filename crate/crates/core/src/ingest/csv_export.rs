use serde::{Deserialize, Serialize};

use super::{split_multi_value, IngestError, RawRecord, Tag};

/// Maps CSV column headers onto field tags.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeaderMap {
    columns: Vec<(String, Tag)>,
}

impl Default for HeaderMap {
    /// Column names of the spreadsheet-style full-record export.
    fn default() -> Self {
        let pairs = [
            ("Publication Type", "PT"),
            ("Authors", "AU"),
            ("Author Full Names", "AF"),
            ("Article Title", "TI"),
            ("Source Title", "SO"),
            ("Author Keywords", "DE"),
            ("Keywords Plus", "ID"),
            ("Abstract", "AB"),
            ("Addresses", "C1"),
            ("Publisher", "PU"),
            ("Times Cited, WoS Core", "TC"),
            ("Times Cited, All Databases", "Z9"),
            ("Publication Year", "PY"),
            ("DOI", "DI"),
            ("UT (Unique WOS ID)", "UT"),
        ];
        HeaderMap {
            columns: pairs
                .iter()
                .map(|(c, t)| (c.to_string(), Tag::new(t).unwrap()))
                .collect(),
        }
    }
}

impl HeaderMap {
    pub fn empty() -> Self {
        HeaderMap { columns: Vec::new() }
    }

    /// Adds or replaces the mapping for `column`.
    pub fn insert(&mut self, column: impl Into<String>, tag: Tag) {
        let column = column.into();
        if let Some(slot) = self.columns.iter_mut().find(|(c, _)| *c == column) {
            slot.1 = tag;
        } else {
            self.columns.push((column, tag));
        }
    }

    pub fn tag_for(&self, column: &str) -> Option<Tag> {
        let column = column.trim();
        self.columns
            .iter()
            .find(|(c, _)| c.eq_ignore_ascii_case(column))
            .map(|(_, t)| *t)
    }

    pub fn columns(&self) -> &[(String, Tag)] {
        &self.columns
    }
}

/// Parses a CSV export with a header row.
///
/// Each data row becomes one record. Cells of multi-valued fields (`AU`,
/// `AF`, `DE`, `ID`, `C1`) are split on `; `; empty cells are omitted.
/// Columns without a mapping are ignored, and when two columns map to the
/// same tag the first one wins.
pub fn parse_csv(input: &str, header_map: &HeaderMap) -> Result<Vec<RawRecord>, IngestError> {
    let input = input.strip_prefix('\u{feff}').unwrap_or(input);
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(input.as_bytes());

    let headers = reader
        .headers()
        .map_err(|e| IngestError::Csv {
            row: 0,
            message: e.to_string(),
        })?
        .clone();

    let mut used = Vec::new();
    let mut layout: Vec<Option<Tag>> = Vec::with_capacity(headers.len());
    for h in headers.iter() {
        match header_map.tag_for(h) {
            Some(tag) if !used.contains(&tag) => {
                used.push(tag);
                layout.push(Some(tag));
            }
            _ => layout.push(None),
        }
    }
    for required in [Tag::TI, Tag::AU, Tag::PY] {
        if !used.contains(&required) {
            return Err(IngestError::MissingRequiredColumn(required));
        }
    }

    let mut records = Vec::new();
    for (idx, row) in reader.records().enumerate() {
        let row_no = idx + 1;
        let row = row.map_err(|e| match e.kind() {
            csv::ErrorKind::UnequalLengths { expected_len, len, .. } => IngestError::RaggedRow {
                row: row_no,
                expected: *expected_len as usize,
                found: *len as usize,
            },
            _ => IngestError::Csv {
                row: row_no,
                message: e.to_string(),
            },
        })?;
        let mut record = RawRecord::new();
        for (cell, tag) in row.iter().zip(&layout) {
            let Some(tag) = tag else { continue };
            let cell = cell.trim();
            if cell.is_empty() {
                continue;
            }
            let values = if tag.is_multi_valued() {
                split_multi_value(cell)
            } else {
                vec![cell.to_owned()]
            };
            record.push(*tag, values)?;
        }
        records.push(record);
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splits_author_cells() {
        let text = "Article Title,Authors,Publication Year\nT,\"A, B; C, D\",2021\n";
        let recs = parse_csv(text, &HeaderMap::default()).unwrap();
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].get(Tag::AU).unwrap(), ["A, B", "C, D"]);
        assert_eq!(recs[0].get(Tag::PY).unwrap(), ["2021"]);
        assert_eq!(recs[0].get(Tag::TI).unwrap(), ["T"]);
    }

    #[test]
    fn empty_data_section() {
        let recs = parse_csv("Article Title,Authors,Publication Year\n", &HeaderMap::default()).unwrap();
        assert!(recs.is_empty());
    }

    #[test]
    fn unbalanced_quote_reports_row() {
        let text = "Article Title,Authors,Publication Year\nT,A,2020\nU,\"B, C,2021\n";
        let err = parse_csv(text, &HeaderMap::default()).unwrap_err();
        assert!(matches!(err, IngestError::RaggedRow { row: 2, .. }), "{err:?}");
    }

    #[test]
    fn ragged_row() {
        let text = "Article Title,Authors,Publication Year\nT,A\n";
        let err = parse_csv(text, &HeaderMap::default()).unwrap_err();
        assert_eq!(
            err,
            IngestError::RaggedRow {
                row: 1,
                expected: 3,
                found: 2
            }
        );
    }

    #[test]
    fn missing_required_column() {
        let err = parse_csv("Article Title,Authors\nT,A\n", &HeaderMap::default()).unwrap_err();
        assert_eq!(err, IngestError::MissingRequiredColumn(Tag::PY));
    }

    #[test]
    fn quoted_newlines_and_custom_headers() {
        let mut map = HeaderMap::empty();
        map.insert("title", Tag::TI);
        map.insert("who", Tag::AU);
        map.insert("year", Tag::PY);
        map.insert("abstract", Tag::AB);
        let text = "title,who,year,abstract,ignored\n\"Line one\nline two\",X,1999,\"a, b\",zzz\n";
        let recs = parse_csv(text, &map).unwrap();
        assert_eq!(recs[0].get(Tag::TI).unwrap(), ["Line one\nline two"]);
        assert_eq!(recs[0].get(Tag::AB).unwrap(), ["a, b"]);
        assert_eq!(recs[0].fields().len(), 4);
    }

    #[test]
    fn addresses_split_outside_brackets() {
        let text = "Article Title,Authors,Publication Year,Addresses\nT,A,2020,\"[A, B; C, D] X Univ, Y, Canada; [E] Z, USA\"\n";
        let recs = parse_csv(text, &HeaderMap::default()).unwrap();
        assert_eq!(recs[0].get(Tag::C1).unwrap().len(), 2);
    }
}
