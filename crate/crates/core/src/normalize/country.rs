use std::collections::{BTreeMap, HashSet};
use std::sync::OnceLock;

use regex::Regex;

use super::NormalizeError;
use crate::ingest::AddressEntry;

/// Country spellings as they appear at the end of export addresses.
const KNOWN_COUNTRIES: &[&str] = &[
    "Afghanistan",
    "Albania",
    "Algeria",
    "Andorra",
    "Angola",
    "Argentina",
    "Armenia",
    "Australia",
    "Austria",
    "Azerbaijan",
    "Bahrain",
    "Bangladesh",
    "Belarus",
    "Belgium",
    "Benin",
    "Bolivia",
    "Bosnia & Herceg",
    "Botswana",
    "Brazil",
    "Brunei",
    "Bulgaria",
    "Burkina Faso",
    "Cambodia",
    "Cameroon",
    "Canada",
    "Chile",
    "China",
    "Colombia",
    "Costa Rica",
    "Cote Ivoire",
    "Croatia",
    "Cuba",
    "Cyprus",
    "Czech Republic",
    "Denmark",
    "Ecuador",
    "Egypt",
    "El Salvador",
    "England",
    "Estonia",
    "Ethiopia",
    "Fiji",
    "Finland",
    "France",
    "Georgia",
    "Germany",
    "Ghana",
    "Greece",
    "Guatemala",
    "Hong Kong",
    "Hungary",
    "Iceland",
    "India",
    "Indonesia",
    "Iran",
    "Iraq",
    "Ireland",
    "Israel",
    "Italy",
    "Jamaica",
    "Japan",
    "Jordan",
    "Kazakhstan",
    "Kenya",
    "Kuwait",
    "Latvia",
    "Lebanon",
    "Libya",
    "Lithuania",
    "Luxembourg",
    "Macau",
    "Malawi",
    "Malaysia",
    "Malta",
    "Mauritius",
    "Mexico",
    "Moldova",
    "Mongolia",
    "Montenegro",
    "Morocco",
    "Mozambique",
    "Myanmar",
    "Namibia",
    "Nepal",
    "Netherlands",
    "New Zealand",
    "Nigeria",
    "North Ireland",
    "North Macedonia",
    "Norway",
    "Oman",
    "Pakistan",
    "Palestine",
    "Panama",
    "Peoples R China",
    "Peru",
    "Philippines",
    "Poland",
    "Portugal",
    "Qatar",
    "Romania",
    "Russia",
    "Rwanda",
    "Saudi Arabia",
    "Scotland",
    "Senegal",
    "Serbia",
    "Singapore",
    "Slovakia",
    "Slovenia",
    "South Africa",
    "South Korea",
    "Spain",
    "Sri Lanka",
    "Sudan",
    "Sweden",
    "Switzerland",
    "Syria",
    "Taiwan",
    "Tanzania",
    "Thailand",
    "Tunisia",
    "Turkey",
    "U Arab Emirates",
    "Uganda",
    "Ukraine",
    "United Kingdom",
    "Uruguay",
    "USA",
    "Uzbekistan",
    "Venezuela",
    "Vietnam",
    "Wales",
    "Yemen",
    "Zambia",
    "Zimbabwe",
];

const DEFAULT_ALIASES: &[(&str, &str)] = &[
    ("Peoples R China", "China"),
    ("England", "United Kingdom"),
    ("Scotland", "United Kingdom"),
    ("Wales", "United Kingdom"),
    ("North Ireland", "United Kingdom"),
];

/// Rewrites exported country spellings into canonical names.
///
/// The text format is one `raw=canonical` pair per line; `#` starts a
/// comment and blank lines are ignored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AliasMap {
    map: BTreeMap<String, String>,
}

impl Default for AliasMap {
    fn default() -> Self {
        AliasMap {
            map: DEFAULT_ALIASES
                .iter()
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .collect(),
        }
    }
}

impl AliasMap {
    pub fn empty() -> Self {
        AliasMap { map: BTreeMap::new() }
    }

    /// Parses alias lines on top of the defaults.
    pub fn with_overrides(text: &str) -> Result<Self, NormalizeError> {
        let mut map = AliasMap::default();
        map.extend_from_text(text)?;
        Ok(map)
    }

    pub fn extend_from_text(&mut self, text: &str) -> Result<(), NormalizeError> {
        for (idx, line) in text.lines().enumerate() {
            let content = line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (raw, canonical) = content
                .split_once('=')
                .map(|(a, b)| (a.trim(), b.trim()))
                .filter(|(a, b)| !a.is_empty() && !b.is_empty())
                .ok_or_else(|| NormalizeError::AliasSyntax {
                    line: idx + 1,
                    text: line.to_owned(),
                })?;
            self.map.insert(raw.to_owned(), canonical.to_owned());
        }
        Ok(())
    }

    pub fn insert(&mut self, raw: impl Into<String>, canonical: impl Into<String>) {
        self.map.insert(raw.into(), canonical.into());
    }

    pub fn resolve<'a>(&'a self, raw: &'a str) -> &'a str {
        self.map.get(raw).map(String::as_str).unwrap_or(raw)
    }

    fn is_known(&self, name: &str) -> bool {
        known_countries().contains(name) || self.map.contains_key(name) || self.map.values().any(|v| v == name)
    }

    /// Serializes the map in its text format.
    pub fn to_text(&self) -> String {
        self.map.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }
}

fn known_countries() -> &'static HashSet<&'static str> {
    static SET: OnceLock<HashSet<&'static str>> = OnceLock::new();
    SET.get_or_init(|| KNOWN_COUNTRIES.iter().copied().collect())
}

fn us_suffix() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    // "OH 44106 USA", "CA USA", "MI 48109-2125 USA"
    RE.get_or_init(|| Regex::new(r"^(?:[A-Z]{2}\s+)?(?:\d{5}(?:-\d{4})?\s+)?USA$").unwrap())
}

/// Country of an address: the last address part, with a leading US state
/// code and ZIP removed, mapped through `aliases`.
///
/// Names outside the known-country list are returned as-is with a warning,
/// or rejected when `strict` is set.
pub fn extract_country(entry: &AddressEntry, aliases: &AliasMap, strict: bool) -> Result<String, NormalizeError> {
    let last = entry
        .address_parts
        .iter()
        .rev()
        .map(|p| p.trim())
        .find(|p| !p.is_empty())
        .ok_or(NormalizeError::NoAddressParts)?;
    let last = if us_suffix().is_match(last) { "USA" } else { last };
    let last = last.trim_end_matches('.');
    if !aliases.is_known(last) {
        if strict {
            return Err(NormalizeError::UnrecognizedCountry(last.to_owned()));
        }
        log::warn!("unrecognized country {last:?} in address {:?}", entry.raw);
    }
    Ok(aliases.resolve(last).to_owned())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::parse_address;

    fn country(raw: &str) -> String {
        extract_country(&parse_address(raw).unwrap(), &AliasMap::default(), false).unwrap()
    }

    #[test]
    fn strips_state_and_zip() {
        assert_eq!(country("Case Western Reserve Univ, Cleveland, OH 44106 USA"), "USA");
        assert_eq!(country("Univ Michigan, Ann Arbor, MI 48109-2125 USA"), "USA");
        assert_eq!(country("Stanford Univ, Stanford, CA USA"), "USA");
    }

    #[test]
    fn default_aliases() {
        assert_eq!(country("Beihang Univ, Beijing, Peoples R China"), "China");
        assert_eq!(country("Univ Cambridge, Cambridge, England"), "United Kingdom");
        assert_eq!(country("Univ Glasgow, Glasgow, Scotland"), "United Kingdom");
    }

    #[test]
    fn identity_country() {
        assert_eq!(country("Univ Victoria, Victoria, BC V8P 5C2, Canada"), "Canada");
    }

    #[test]
    fn strict_mode_rejects_unknown() {
        let entry = parse_address("Some Inst, Atlantis").unwrap();
        let aliases = AliasMap::default();
        assert_eq!(extract_country(&entry, &aliases, false).unwrap(), "Atlantis");
        assert_eq!(
            extract_country(&entry, &aliases, true),
            Err(NormalizeError::UnrecognizedCountry("Atlantis".into()))
        );
    }

    #[test]
    fn alias_file_format() {
        let map =
            AliasMap::with_overrides("# comment\nAtlantis = Lost Land\n\nUSA=United States # trailing\n").unwrap();
        assert_eq!(map.resolve("Atlantis"), "Lost Land");
        assert_eq!(map.resolve("USA"), "United States");
        assert_eq!(map.resolve("Peoples R China"), "China");
        let err = AliasMap::with_overrides("ok=fine\nbroken line\n").unwrap_err();
        assert_eq!(
            err,
            NormalizeError::AliasSyntax {
                line: 2,
                text: "broken line".into()
            }
        );
        let reparsed = AliasMap::with_overrides(&map.to_text()).unwrap();
        assert_eq!(reparsed, map);
    }
}
