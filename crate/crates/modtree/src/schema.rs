//! Versioned JSON tree-spec documents.
//!
//! ```json
//! { "schema_version": 1, "kind": "radial",
//!   "children": { "rule": "constant", "c": 2 },
//!   "weights": { "rule": "unit" } }
//!
//! { "schema_version": 1, "kind": "finite",
//!   "parents": [-1, -1, 0, 0, 1, 1], "weights": [1, 1, 1, 1, 1, 1] }
//!
//! { "schema_version": 1, "kind": "skip",
//!   "skip": { "rule": { "kind": "ceil_geometric", "r": 3.0 }, "first_branch": 1 } }
//! ```
//!
//! `parents` uses -1 for root edges and otherwise the index of the parent
//! edge; indexing is breadth-first. Unknown schema versions are rejected.

use serde::{Deserialize, Serialize};

use crate::critical::SkipSequence;
use crate::error::{ModtreeError, Result};
use crate::tree::{ChildrenRule, FiniteTree, RadialTreeSpec, WeightRule};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TreeDocument {
    Radial {
        children: ChildrenRule,
        weights: WeightRule,
    },
    Finite {
        parents: Vec<i64>,
        weights: Vec<f64>,
    },
    Skip {
        skip: SkipSequence,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeFile {
    pub schema_version: u32,
    #[serde(flatten)]
    pub document: TreeDocument,
}

impl TreeFile {
    pub fn radial(spec: &RadialTreeSpec) -> TreeFile {
        TreeFile {
            schema_version: SCHEMA_VERSION,
            document: TreeDocument::Radial {
                children: spec.children.clone(),
                weights: spec.weights.clone(),
            },
        }
    }

    pub fn finite(tree: &FiniteTree) -> TreeFile {
        TreeFile {
            schema_version: SCHEMA_VERSION,
            document: TreeDocument::Finite {
                parents: tree
                    .parents()
                    .iter()
                    .map(|p| p.map_or(-1, |v| v as i64))
                    .collect(),
                weights: tree.weights().to_vec(),
            },
        }
    }

    pub fn skip(skip: &SkipSequence) -> TreeFile {
        TreeFile {
            schema_version: SCHEMA_VERSION,
            document: TreeDocument::Skip { skip: skip.clone() },
        }
    }

    /// The radially symmetric spec described by this document (radial and
    /// skip kinds).
    pub fn to_spec(&self) -> Result<RadialTreeSpec> {
        match &self.document {
            TreeDocument::Radial { children, weights } => {
                RadialTreeSpec::new(children.clone(), weights.clone())
            }
            TreeDocument::Skip { skip } => RadialTreeSpec::new(
                ChildrenRule::Skip { skip: skip.clone() },
                WeightRule::Unit,
            ),
            TreeDocument::Finite { .. } => Err(ModtreeError::Schema(
                "expected a radial or skip tree document, found kind \"finite\"".into(),
            )),
        }
    }

    /// The explicit finite tree described by this document.
    pub fn to_finite(&self) -> Result<FiniteTree> {
        match &self.document {
            TreeDocument::Finite { parents, weights } => {
                let parents: Vec<Option<usize>> = parents
                    .iter()
                    .enumerate()
                    .map(|(e, &p)| {
                        if p < 0 {
                            Ok(None)
                        } else if (p as usize) < parents.len() {
                            Ok(Some(p as usize))
                        } else {
                            Err(ModtreeError::OrphanEdge { edge: e, parent: p as usize })
                        }
                    })
                    .collect::<Result<_>>()?;
                FiniteTree::new(parents, weights.clone())
            }
            _ => Err(ModtreeError::Schema(
                "expected a finite tree document (kind \"finite\")".into(),
            )),
        }
    }

    pub fn to_skip(&self) -> Result<SkipSequence> {
        match &self.document {
            TreeDocument::Skip { skip } => {
                skip.validate()?;
                Ok(skip.clone())
            }
            _ => Err(ModtreeError::Schema(
                "expected a skip-sequence document (kind \"skip\")".into(),
            )),
        }
    }
}

/// Parse and version-check a tree-spec document.
pub fn parse_tree_file(json: &str) -> Result<TreeFile> {
    let file: TreeFile =
        serde_json::from_str(json).map_err(|e| ModtreeError::Schema(e.to_string()))?;
    if file.schema_version != SCHEMA_VERSION {
        return Err(ModtreeError::Schema(format!(
            "unsupported schema_version {} (expected {SCHEMA_VERSION})",
            file.schema_version
        )));
    }
    // Surface structural problems at parse time.
    match &file.document {
        TreeDocument::Radial { .. } | TreeDocument::Skip { .. } => {
            file.to_spec()?;
        }
        TreeDocument::Finite { .. } => {
            file.to_finite()?;
        }
    }
    Ok(file)
}

pub fn to_json(file: &TreeFile) -> String {
    serde_json::to_string_pretty(file).expect("tree documents serialize infallibly")
}
