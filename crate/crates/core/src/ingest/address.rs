use serde::{Deserialize, Serialize};

use super::IngestError;

/// One `C1` address: the optional bracketed author list and the
/// comma-separated postal address that follows it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AddressEntry {
    pub author_names: Vec<String>,
    pub address_parts: Vec<String>,
    pub raw: String,
}

/// Splits a `C1` value such as
/// `[Gao, Robert X.] Case Western Reserve Univ, Cleveland, OH 44106 USA`.
///
/// Names inside the leading bracket group are split on `; `; the remainder
/// is split on commas. All pieces are trimmed. A `[` without its closing
/// `]` is not a name group and stays part of the address.
pub fn parse_address(c1_value: &str) -> Result<AddressEntry, IngestError> {
    let trimmed = c1_value.trim();
    let (names, rest) = match trimmed.strip_prefix('[').and_then(|s| s.split_once(']')) {
        Some((inside, rest)) => (
            inside
                .split("; ")
                .map(str::trim)
                .filter(|n| !n.is_empty())
                .map(str::to_owned)
                .collect(),
            rest,
        ),
        None => (Vec::new(), trimmed),
    };
    let rest = rest.trim();
    if rest.is_empty() {
        return Err(IngestError::EmptyAddress(c1_value.to_owned()));
    }
    let address_parts = rest.split(',').map(|p| p.trim().to_owned()).collect();
    Ok(AddressEntry {
        author_names: names,
        address_parts,
        raw: c1_value.to_owned(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn bracketed_single_author() {
        let e = parse_address("[Gao, Robert X.] Case Western Reserve Univ, Dept Mech Engn, Cleveland, OH 44106 USA")
            .unwrap();
        assert_eq!(e.author_names, ["Gao, Robert X."]);
        assert_eq!(
            e.address_parts,
            [
                "Case Western Reserve Univ",
                "Dept Mech Engn",
                "Cleveland",
                "OH 44106 USA"
            ]
        );
    }

    #[test]
    fn no_bracket_group() {
        let e = parse_address("Univ Victoria, Victoria, BC, Canada").unwrap();
        assert!(e.author_names.is_empty());
        assert_eq!(e.address_parts.last().unwrap(), "Canada");
        assert_eq!(e.address_parts.len(), 4);
    }

    #[test]
    fn several_bracketed_names() {
        let e = parse_address("[A, B; C, D] X Univ, Y, Country").unwrap();
        assert_eq!(e.author_names, ["A, B", "C, D"]);
        assert_eq!(e.address_parts, ["X Univ", "Y", "Country"]);
    }

    #[test]
    fn empty_address() {
        assert!(matches!(parse_address("[A, B]"), Err(IngestError::EmptyAddress(_))));
        assert!(matches!(parse_address("   "), Err(IngestError::EmptyAddress(_))));
    }

    #[test]
    fn unclosed_bracket_is_address_text() {
        let e = parse_address("[A, B X Univ, Canada").unwrap();
        assert!(e.author_names.is_empty());
        assert_eq!(e.address_parts, ["[A", "B X Univ", "Canada"]);
    }

    fn squash(s: &str) -> String {
        s.chars().filter(|c| !c.is_whitespace()).collect()
    }

    proptest! {
        #[test]
        fn rejoining_reproduces_raw(
            names in prop::collection::vec("[A-Z][a-z]{1,6}, [A-Z]\\.?", 0..3),
            parts in prop::collection::vec("[A-Za-z0-9][A-Za-z0-9 &]{0,12}", 1..5),
        ) {
            let address = parts.join(", ");
            let raw = if names.is_empty() {
                address.clone()
            } else {
                format!("[{}] {}", names.join("; "), address)
            };
            let e = parse_address(&raw).unwrap();
            prop_assert_eq!(!e.author_names.is_empty(), raw.starts_with('['));
            let rebuilt = if e.author_names.is_empty() {
                e.address_parts.join(", ")
            } else {
                format!("[{}] {}", e.author_names.join("; "), e.address_parts.join(", "))
            };
            prop_assert_eq!(squash(&rebuilt), squash(&raw));
        }
    }
}
