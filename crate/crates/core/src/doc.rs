//! JSON document formats.
//!
//! Every document rejects unknown keys. Arrow and object ids are arbitrary
//! strings; composition triples are written `[f, g, fg]` with `dom(f) = cod(g)`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArrowDoc {
    pub id: String,
    pub dom: String,
    pub cod: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SizeDoc {
    pub k: usize,
    pub deg: BTreeMap<String, Vec<u32>>,
}

/// Maps from kgraph paths and groupoid arrows into a product category.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmbeddingsDoc {
    pub paths: BTreeMap<String, String>,
    pub groupoid: BTreeMap<String, String>,
}

/// A finite category, optionally carrying a size functor.
///
/// When `bound` is present the table is a degree-bounded window: a composable
/// pair may be missing exactly when its degrees sum past the bound. Products
/// with an identity need not be listed; they are filled in from the
/// identities.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CategoryDoc {
    pub objects: Vec<String>,
    pub arrows: Vec<ArrowDoc>,
    pub identities: BTreeMap<String, String>,
    pub compose: Vec<[String; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inverses: Option<Vec<[String; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub size: Option<SizeDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub embeddings: Option<EmbeddingsDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDoc {
    pub id: String,
    /// 1-based color.
    pub color: usize,
    pub dom: String,
    pub cod: String,
}

/// `lhs = [f, e]` and `rhs = [e2, f2]` with `f·e = e2·f2`, where `e`, `e2`
/// share the smaller color.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SquareDoc {
    pub lhs: [String; 2],
    pub rhs: [String; 2],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SkeletonDoc {
    pub k: usize,
    pub objects: Vec<String>,
    pub edges: Vec<EdgeDoc>,
    #[serde(default)]
    pub squares: Vec<SquareDoc>,
}

/// One row of an action table: `g·e = ge` and `g|e = rest`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionRowDoc {
    pub g: String,
    pub e: String,
    pub ge: String,
    pub rest: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionDoc {
    pub kgraph: SkeletonDoc,
    pub groupoid: CategoryDoc,
    pub on_edges: Vec<ActionRowDoc>,
}

/// Which of the three document kinds a JSON value holds, judged by its keys.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DocKind {
    Category,
    Skeleton,
    Action,
}

impl DocKind {
    pub fn sniff(value: &serde_json::Value) -> Option<DocKind> {
        let obj = value.as_object()?;
        if obj.contains_key("on_edges") {
            Some(DocKind::Action)
        } else if obj.contains_key("edges") {
            Some(DocKind::Skeleton)
        } else if obj.contains_key("arrows") {
            Some(DocKind::Category)
        } else {
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_rejected() {
        let bad = r#"{"objects":[],"arrows":[],"identities":{},"compose":[],"extra":1}"#;
        assert!(serde_json::from_str::<CategoryDoc>(bad).is_err());
        let good = r#"{"objects":[],"arrows":[],"identities":{},"compose":[]}"#;
        assert!(serde_json::from_str::<CategoryDoc>(good).is_ok());
    }

    #[test]
    fn sniffing() {
        let v: serde_json::Value = serde_json::json!({"k": 1, "objects": [], "edges": []});
        assert_eq!(DocKind::sniff(&v), Some(DocKind::Skeleton));
        assert_eq!(DocKind::sniff(&serde_json::json!([1])), None);
    }
}
