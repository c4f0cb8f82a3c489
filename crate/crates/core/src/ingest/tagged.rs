use rayon::prelude::*;

use super::{IngestError, RawRecord, Tag};

enum Line<'a> {
    Blank,
    Field(Tag, &'a str),
    Continuation(&'a str),
    Malformed,
}

fn classify(line: &str) -> Line<'_> {
    let line = line.trim_end();
    if line.is_empty() {
        return Line::Blank;
    }
    if let Some(rest) = line.strip_prefix("   ") {
        return Line::Continuation(rest);
    }
    let b = line.as_bytes();
    if b.len() >= 2 && (b.len() == 2 || b[2] == b' ') {
        if let Ok(tag) = Tag::new(&line[..2]) {
            return Line::Field(tag, line.get(3..).unwrap_or(""));
        }
    }
    Line::Malformed
}

struct Block<'a> {
    first_line: usize,
    lines: Vec<(usize, &'a str)>,
}

/// Parses a field-tagged export into records, in file order.
///
/// Header lines (`FN`, `VR`) and blank lines between records are skipped;
/// parsing stops at `EF`. A file holding only header lines yields an empty
/// list; a file with no non-blank content is [`IngestError::EmptyFile`].
pub fn parse_tagged(input: &str) -> Result<Vec<RawRecord>, IngestError> {
    let input = input.strip_prefix('\u{feff}').unwrap_or(input);
    if input.trim().is_empty() {
        return Err(IngestError::EmptyFile);
    }

    let mut blocks: Vec<Block<'_>> = Vec::new();
    let mut open: Option<Block<'_>> = None;
    for (idx, raw) in input.lines().enumerate() {
        let line_no = idx + 1;
        let line = classify(raw);
        match (&mut open, line) {
            (_, Line::Blank) => {}
            (_, Line::Malformed) => {
                return Err(IngestError::MalformedTagLine {
                    line: line_no,
                    text: raw.to_owned(),
                })
            }
            (None, Line::Field(tag, _)) if tag.as_str() == "FN" || tag.as_str() == "VR" => {}
            (None, Line::Field(tag, _)) if tag.as_str() == "EF" => break,
            (None, Line::Field(tag, _)) if tag.as_str() == "ER" => {
                return Err(IngestError::MalformedTagLine {
                    line: line_no,
                    text: raw.to_owned(),
                })
            }
            (None, Line::Field(_, _)) => {
                open = Some(Block {
                    first_line: line_no,
                    lines: vec![(line_no, raw)],
                })
            }
            (None, Line::Continuation(_)) => {
                return Err(IngestError::MalformedTagLine {
                    line: line_no,
                    text: raw.to_owned(),
                })
            }
            (Some(_), Line::Field(tag, _)) if tag.as_str() == "ER" => {
                blocks.extend(open.take());
            }
            (Some(block), Line::Field(tag, _)) if tag.as_str() == "EF" => {
                return Err(IngestError::UnterminatedRecord { line: block.first_line })
            }
            (Some(block), _) => block.lines.push((line_no, raw)),
        }
    }
    if let Some(block) = open {
        return Err(IngestError::UnterminatedRecord { line: block.first_line });
    }

    // blocks are independent once split; keep the first error in file order
    let parsed: Vec<Result<RawRecord, IngestError>> = blocks.par_iter().map(parse_block).collect();
    parsed.into_iter().collect()
}

fn parse_block(block: &Block<'_>) -> Result<RawRecord, IngestError> {
    let mut record = RawRecord::new();
    for &(line_no, raw) in &block.lines {
        match classify(raw) {
            Line::Field(tag, value) => record
                .push(tag, vec![value.to_owned()])
                .map_err(|_| IngestError::DuplicateField { line: line_no, tag })?,
            Line::Continuation(value) => match record.last_values_mut() {
                Some(values) => values.push(value.to_owned()),
                None => {
                    return Err(IngestError::MalformedTagLine {
                        line: line_no,
                        text: raw.to_owned(),
                    })
                }
            },
            Line::Blank | Line::Malformed => {}
        }
    }
    Ok(record)
}

/// Serializes records back into the field-tagged layout accepted by
/// [`parse_tagged`].
pub fn write_tagged(records: &[RawRecord]) -> String {
    let mut out = String::from("FN Clarivate Analytics Web of Science\nVR 1.0\n");
    for record in records {
        for (tag, values) in record.fields() {
            let mut values = values.iter();
            match values.next() {
                Some(first) if !first.is_empty() => {
                    out.push_str(tag.as_str());
                    out.push(' ');
                    out.push_str(first);
                }
                _ => out.push_str(tag.as_str()),
            }
            out.push('\n');
            for v in values {
                out.push_str("   ");
                out.push_str(v);
                out.push('\n');
            }
        }
        out.push_str("ER\n\n");
    }
    out.push_str("EF\n");
    out
}
