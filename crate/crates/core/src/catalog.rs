//! Census catalogs: a deterministic JSON document for enumeration results,
//! byte-stable so catalogs diff cleanly.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::enumeration::Census;

#[derive(Debug, Error, PartialEq, Clone)]
pub enum CatalogError {
    #[error("catalog JSON: {0}")]
    Json(String),
    #[error("class count {classes} does not match the counts-by-O total {total}")]
    CountMismatch { classes: usize, total: usize },
    #[error("duplicate or unsorted canonical keys at class {index}")]
    BadKeys { index: usize },
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct ToolStamp {
    pub name: String,
    pub version: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct BudgetStamp {
    pub max_nodes: Option<u64>,
    pub max_seconds: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct CatalogClass {
    pub o: usize,
    /// "+" or "-" for O = 0 classes, "free" otherwise.
    pub sign: String,
    pub canonical_key: String,
    pub rows: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CatalogDocument {
    pub tool: ToolStamp,
    pub m: usize,
    pub n: usize,
    pub exhaustive: bool,
    pub include_positive_o0: bool,
    pub budget: BudgetStamp,
    pub nodes_visited: u64,
    pub counts_by_o: BTreeMap<usize, usize>,
    pub classes: Vec<CatalogClass>,
}

impl CatalogDocument {
    pub fn from_census(census: &Census, m: usize, n: usize, budget: BudgetStamp) -> CatalogDocument {
        let classes = census
            .classes
            .iter()
            .map(|class| {
                let exemplar = &class.exemplar;
                let sign = if exemplar.odd_count() > 0 {
                    "free".to_string()
                } else {
                    exemplar.sign().to_string()
                };
                CatalogClass {
                    o: exemplar.odd_count(),
                    sign,
                    canonical_key: class.key.to_hex(),
                    rows: exemplar.rows().iter().map(|r| r.to_string()).collect(),
                }
            })
            .collect();
        CatalogDocument {
            tool: ToolStamp {
                name: env!("CARGO_PKG_NAME").to_string(),
                version: env!("CARGO_PKG_VERSION").to_string(),
            },
            m,
            n,
            exhaustive: census.exhaustive,
            include_positive_o0: census.include_positive_o0,
            budget,
            nodes_visited: census.nodes_visited,
            counts_by_o: census.counts_by_o.clone(),
            classes,
        }
    }

    pub fn validate(&self) -> Result<(), CatalogError> {
        let total: usize = self.counts_by_o.values().sum();
        if total != self.classes.len() {
            return Err(CatalogError::CountMismatch { classes: self.classes.len(), total });
        }
        for (index, pair) in self.classes.windows(2).enumerate() {
            if pair[0].canonical_key >= pair[1].canonical_key {
                return Err(CatalogError::BadKeys { index: index + 1 });
            }
        }
        Ok(())
    }

    /// Deterministic byte output: fixed field order, sorted keys and
    /// classes, pretty-printed with a trailing newline.
    pub fn emit(&self) -> Result<String, CatalogError> {
        self.validate()?;
        let mut text =
            serde_json::to_string_pretty(self).map_err(|e| CatalogError::Json(e.to_string()))?;
        text.push('\n');
        Ok(text)
    }

    pub fn parse(text: &str) -> Result<CatalogDocument, CatalogError> {
        let doc: CatalogDocument =
            serde_json::from_str(text).map_err(|e| CatalogError::Json(e.to_string()))?;
        doc.validate()?;
        Ok(doc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::budget::Budget;
    use crate::enumeration::{enumerate_critical_ids, EnumOptions};

    fn sample() -> CatalogDocument {
        let census = enumerate_critical_ids(4, 3, &EnumOptions::default()).unwrap();
        let _ = Budget::unlimited();
        CatalogDocument::from_census(&census, 4, 3, BudgetStamp { max_nodes: None, max_seconds: None })
    }

    #[test]
    fn emit_lists_both_classes() {
        let doc = sample();
        assert_eq!(doc.classes.len(), 2);
        let text = doc.emit().unwrap();
        assert!(text.contains("\"counts_by_o\""));
    }

    #[test]
    fn reemission_is_byte_identical() {
        let text = sample().emit().unwrap();
        let parsed = CatalogDocument::parse(&text).unwrap();
        assert_eq!(parsed.emit().unwrap(), text);
    }

    #[test]
    fn empty_census_is_a_valid_document() {
        let census = enumerate_critical_ids(3, 3, &EnumOptions::default()).unwrap();
        let doc = CatalogDocument::from_census(
            &census,
            3,
            3,
            BudgetStamp { max_nodes: None, max_seconds: None },
        );
        assert_eq!(doc.classes.len(), 0);
        let text = doc.emit().unwrap();
        assert_eq!(CatalogDocument::parse(&text).unwrap(), doc);
    }

    #[test]
    fn validation_catches_count_mismatch() {
        let mut doc = sample();
        doc.counts_by_o.insert(6, 5);
        assert!(matches!(doc.emit(), Err(CatalogError::CountMismatch { .. })));
    }
}
