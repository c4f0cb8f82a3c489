use serde::{Deserialize, Serialize};

/// An institution listed on a paper, with the country derived from its
/// address and the authors the export links to it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Affiliation {
    pub institution: String,
    pub country: String,
    pub linked_authors: Vec<String>,
}

/// One cleaned publication.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PaperRecord {
    /// DOI when present, otherwise a hash of the normalized title and year.
    pub id: String,
    pub title: String,
    pub doi: Option<String>,
    #[serde(rename = "abstract")]
    pub abstract_text: Option<String>,
    pub year: i32,
    pub source: String,
    pub publisher: Option<String>,
    pub authors: Vec<String>,
    pub affiliations: Vec<Affiliation>,
    pub keywords: Vec<String>,
    pub times_cited: u64,
}

impl PaperRecord {
    /// Distinct institutions in first-appearance order.
    pub fn institutions(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for a in &self.affiliations {
            if !out.contains(&a.institution.as_str()) {
                out.push(&a.institution);
            }
        }
        out
    }

    /// Distinct countries in first-appearance order.
    pub fn countries(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for a in &self.affiliations {
            if !out.contains(&a.country.as_str()) {
                out.push(&a.country);
            }
        }
        out
    }
}
