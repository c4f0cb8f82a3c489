use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::IngestError;

/// Two-character field code such as `AU`, `TI` or `C1`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tag([u8; 2]);

impl Tag {
    pub const AU: Tag = Tag(*b"AU");
    pub const AF: Tag = Tag(*b"AF");
    pub const TI: Tag = Tag(*b"TI");
    pub const SO: Tag = Tag(*b"SO");
    pub const DE: Tag = Tag(*b"DE");
    pub const ID: Tag = Tag(*b"ID");
    pub const AB: Tag = Tag(*b"AB");
    pub const C1: Tag = Tag(*b"C1");
    pub const PY: Tag = Tag(*b"PY");
    pub const TC: Tag = Tag(*b"TC");
    pub const Z9: Tag = Tag(*b"Z9");
    pub const DI: Tag = Tag(*b"DI");
    pub const PU: Tag = Tag(*b"PU");
    pub const PT: Tag = Tag(*b"PT");
    pub const UT: Tag = Tag(*b"UT");

    /// Fields that carry several values, one per line in tagged files and
    /// joined with `; ` in CSV cells.
    pub const MULTI_VALUED: [Tag; 5] = [Tag::AU, Tag::AF, Tag::DE, Tag::ID, Tag::C1];

    pub fn new(code: &str) -> Result<Tag, IngestError> {
        let b = code.as_bytes();
        if b.len() == 2 && b.iter().all(|c| c.is_ascii_uppercase() || c.is_ascii_digit()) {
            Ok(Tag([b[0], b[1]]))
        } else {
            Err(IngestError::InvalidTag(code.to_owned()))
        }
    }

    pub fn as_str(&self) -> &str {
        // constructed only from ASCII
        std::str::from_utf8(&self.0).unwrap()
    }

    pub fn is_multi_valued(&self) -> bool {
        Tag::MULTI_VALUED.contains(self)
    }

    fn is_singular(&self) -> bool {
        *self == Tag::PY || *self == Tag::TI
    }
}

impl FromStr for Tag {
    type Err = IngestError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Tag::new(s)
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Debug for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Tag({})", self.as_str())
    }
}

impl Serialize for Tag {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for Tag {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Tag::new(&s).map_err(serde::de::Error::custom)
    }
}

/// One exported record before validation: field tags in file order, each
/// with its list of line values. Unknown tags are kept.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RawRecord {
    fields: Vec<(Tag, Vec<String>)>,
}

impl RawRecord {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a field group. `PY` and `TI` may occur only once.
    pub fn push(&mut self, tag: Tag, values: Vec<String>) -> Result<(), IngestError> {
        if tag.is_singular() && self.get(tag).is_some() {
            return Err(IngestError::DuplicateField { line: 0, tag });
        }
        self.fields.push((tag, values));
        Ok(())
    }

    pub(crate) fn last_values_mut(&mut self) -> Option<&mut Vec<String>> {
        self.fields.last_mut().map(|(_, v)| v)
    }

    pub fn fields(&self) -> &[(Tag, Vec<String>)] {
        &self.fields
    }

    /// Values of the first group carrying `tag`.
    pub fn get(&self, tag: Tag) -> Option<&[String]> {
        self.fields.iter().find(|(t, _)| *t == tag).map(|(_, v)| v.as_slice())
    }

    /// Values of every group carrying `tag`, concatenated.
    pub fn get_all(&self, tag: Tag) -> Vec<&str> {
        self.fields
            .iter()
            .filter(|(t, _)| *t == tag)
            .flat_map(|(_, v)| v.iter().map(String::as_str))
            .collect()
    }

    /// All lines of `tag` joined with single spaces, trimmed; `None` when
    /// absent or blank.
    pub fn text(&self, tag: Tag) -> Option<String> {
        let lines = self.get_all(tag);
        let joined = lines
            .iter()
            .map(|l| l.trim())
            .filter(|l| !l.is_empty())
            .collect::<Vec<_>>()
            .join(" ");
        (!joined.is_empty()).then_some(joined)
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }
}

/// Splits a multi-valued cell on `; ` separators that are not inside a
/// `[...]` author group. A bare `;` is kept. Pieces are trimmed; empty
/// pieces are dropped.
pub fn split_multi_value(cell: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut start = 0;
    let bytes = cell.as_bytes();
    for (i, c) in cell.char_indices() {
        match c {
            '[' => depth += 1,
            ']' => depth = depth.saturating_sub(1),
            ';' if depth == 0 && bytes.get(i + 1).is_none_or(|&b| b == b' ') => {
                out.push(&cell[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&cell[start..]);
    out.into_iter()
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_owned)
        .collect()
}
