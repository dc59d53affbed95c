//! `.mrdi` documents: namespace header, type descriptor, payload and the
//! global reference table.

use indexmap::IndexMap;
use thiserror::Error;

use crate::refs;
use crate::value::{join_path, JsonError, Map, Style, ValueTree};

pub const KEY_NS: &str = "_ns";
pub const KEY_TYPE: &str = "_type";
pub const KEY_ID: &str = "id";
pub const KEY_DATA: &str = "data";
pub const KEY_REFS: &str = "_refs";
pub const KEY_META: &str = "_meta";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DocError {
    #[error(transparent)]
    Json(#[from] JsonError),
    #[error("{path}: expected an object")]
    NotAnObject { path: String },
    #[error("{path}: missing required key \"_type\"")]
    MissingType { path: String },
    #[error("{path}: invalid type descriptor: {reason}")]
    InvalidType { path: String, reason: String },
    #[error("{path}: invalid namespace entry: {reason}")]
    InvalidNamespace { path: String, reason: String },
    #[error("{path}: \"{value}\" is not a lowercase 8-4-4-4-12 UUID")]
    InvalidUuid { path: String, value: String },
    #[error("{path}: reference entries may not carry their own \"_refs\"")]
    NestedRefs { path: String },
    #[error("{path}: UUID {uuid} is not a key of \"_refs\"")]
    Dangling { path: String, uuid: String },
    #[error("/_refs: reference cycle through {}", .uuids.join(" -> "))]
    Cycle { uuids: Vec<String> },
    #[error("{path}: invalid metadata: {reason}")]
    InvalidMetadata { path: String, reason: String },
}

/// True for canonical lowercase `8-4-4-4-12` hex UUID strings.
pub fn is_uuid(s: &str) -> bool {
    let b = s.as_bytes();
    b.len() == 36
        && b.iter().enumerate().all(|(i, &c)| match i {
            8 | 13 | 18 | 23 => c == b'-',
            _ => c.is_ascii_digit() || (b'a'..=b'f').contains(&c),
        })
}

/// A type name with optional parameters (a UUID string, an array, or an object).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeDescriptor {
    pub name: String,
    pub params: Option<ValueTree>,
}

impl TypeDescriptor {
    pub fn bare(name: impl Into<String>) -> Self {
        Self { name: name.into(), params: None }
    }

    pub fn with_params(name: impl Into<String>, params: ValueTree) -> Self {
        Self { name: name.into(), params: Some(params) }
    }

    pub fn to_tree(&self) -> ValueTree {
        match &self.params {
            None => ValueTree::Text(self.name.clone()),
            Some(p) => {
                let mut m = Map::new();
                m.insert("name", ValueTree::Text(self.name.clone()));
                m.insert("params", p.clone());
                ValueTree::Map(m)
            }
        }
    }

    /// Accepts a bare string or a `{name, params}` map in either key order.
    pub fn from_tree(tree: &ValueTree, path: &str) -> Result<Self, DocError> {
        let invalid = |reason: &str| DocError::InvalidType { path: path.to_string(), reason: reason.to_string() };
        match tree {
            ValueTree::Text(name) => Ok(Self::bare(name.clone())),
            ValueTree::Map(m) => {
                let name = match m.get("name") {
                    Some(ValueTree::Text(n)) => n.clone(),
                    Some(_) => return Err(invalid("\"name\" must be a string")),
                    None => return Err(invalid("missing \"name\"")),
                };
                if let Some(k) = m.keys().find(|k| *k != "name" && *k != "params") {
                    return Err(invalid(&format!("unexpected key \"{k}\"")));
                }
                let params = match m.get("params") {
                    None => None,
                    Some(p @ (ValueTree::Text(_) | ValueTree::Array(_) | ValueTree::Map(_))) => Some(p.clone()),
                    Some(other) => {
                        return Err(invalid(&format!(
                            "\"params\" must be a string, array or object, found {}",
                            other.kind()
                        )))
                    }
                };
                Ok(Self { name, params })
            }
            other => Err(invalid(&format!("expected string or object, found {}", other.kind()))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamespaceEntry {
    pub url: String,
    pub version: String,
}

/// Namespace name to `(url, version)`, serialized as `[url, version]`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct NamespaceTable(pub IndexMap<String, NamespaceEntry>);

impl NamespaceTable {
    pub fn single(name: &str, url: &str, version: &str) -> Self {
        let mut t = Self::default();
        t.insert(name, url, version);
        t
    }

    pub fn insert(&mut self, name: &str, url: &str, version: &str) {
        self.0.insert(name.to_string(), NamespaceEntry { url: url.to_string(), version: version.to_string() });
    }

    pub fn get(&self, name: &str) -> Option<&NamespaceEntry> {
        self.0.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &String> {
        self.0.keys()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn to_tree(&self) -> ValueTree {
        ValueTree::Map(
            self.0
                .iter()
                .map(|(k, e)| (k.clone(), ValueTree::Array(vec![e.url.clone().into(), e.version.clone().into()])))
                .collect(),
        )
    }

    pub fn from_tree(tree: &ValueTree, path: &str) -> Result<Self, DocError> {
        let m = tree.as_map().ok_or_else(|| DocError::NotAnObject { path: path.to_string() })?;
        let mut out = Self::default();
        for (name, v) in m.iter() {
            let p = join_path(path, name);
            match v.as_array() {
                Some([ValueTree::Text(url), ValueTree::Text(version)]) => out.insert(name, url, version),
                _ => {
                    return Err(DocError::InvalidNamespace {
                        path: p,
                        reason: "expected [url, version] strings".into(),
                    })
                }
            }
        }
        Ok(out)
    }
}

/// One entry of `_refs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefEntry {
    pub type_desc: TypeDescriptor,
    pub data: Option<ValueTree>,
    /// Keys other than `_type`/`data`, kept verbatim.
    pub extra: Map,
}

impl RefEntry {
    pub fn new(type_desc: TypeDescriptor, data: Option<ValueTree>) -> Self {
        Self { type_desc, data, extra: Map::new() }
    }

    pub fn to_tree(&self) -> ValueTree {
        let mut m = Map::new();
        m.insert(KEY_TYPE, self.type_desc.to_tree());
        if let Some(d) = &self.data {
            m.insert(KEY_DATA, d.clone());
        }
        for (k, v) in self.extra.iter() {
            m.insert(k.clone(), v.clone());
        }
        ValueTree::Map(m)
    }

    fn from_tree(tree: &ValueTree, path: &str) -> Result<Self, DocError> {
        let m = tree.as_map().ok_or_else(|| DocError::NotAnObject { path: path.to_string() })?;
        if m.contains_key(KEY_REFS) {
            return Err(DocError::NestedRefs { path: join_path(path, KEY_REFS) });
        }
        let ty = m.get(KEY_TYPE).ok_or_else(|| DocError::MissingType { path: path.to_string() })?;
        let type_desc = TypeDescriptor::from_tree(ty, &join_path(path, KEY_TYPE))?;
        let extra =
            m.iter().filter(|(k, _)| *k != KEY_TYPE && *k != KEY_DATA).map(|(k, v)| (k.clone(), v.clone())).collect();
        Ok(Self { type_desc, data: m.get(KEY_DATA).cloned(), extra })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Metadata {
    pub name: Option<String>,
    pub author_orcid: Option<String>,
    pub extra: Map,
}

/// `dddd-dddd-dddd-ddd[dX]`
pub fn is_orcid(s: &str) -> bool {
    let b = s.as_bytes();
    b.len() == 19
        && b.iter().enumerate().all(|(i, &c)| match i {
            4 | 9 | 14 => c == b'-',
            18 => c.is_ascii_digit() || c == b'X',
            _ => c.is_ascii_digit(),
        })
}

impl Metadata {
    pub fn to_tree(&self) -> ValueTree {
        let mut m = Map::new();
        if let Some(n) = &self.name {
            m.insert("name", n.clone().into());
        }
        if let Some(o) = &self.author_orcid {
            m.insert("author_orcid", o.clone().into());
        }
        for (k, v) in self.extra.iter() {
            m.insert(k.clone(), v.clone());
        }
        ValueTree::Map(m)
    }

    fn from_tree(tree: &ValueTree, path: &str) -> Result<Self, DocError> {
        let m = tree.as_map().ok_or_else(|| DocError::NotAnObject { path: path.to_string() })?;
        let string_field = |key: &str| -> Result<Option<String>, DocError> {
            match m.get(key) {
                None => Ok(None),
                Some(ValueTree::Text(s)) => Ok(Some(s.clone())),
                Some(_) => {
                    Err(DocError::InvalidMetadata { path: join_path(path, key), reason: "expected a string".into() })
                }
            }
        };
        let name = string_field("name")?;
        let author_orcid = string_field("author_orcid")?;
        if let Some(o) = &author_orcid {
            if !is_orcid(o) {
                return Err(DocError::InvalidMetadata {
                    path: join_path(path, "author_orcid"),
                    reason: format!("\"{o}\" is not an ORCID identifier"),
                });
            }
        }
        let extra = m
            .iter()
            .filter(|(k, _)| *k != "name" && *k != "author_orcid")
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        Ok(Self { name, author_orcid, extra })
    }
}

/// A parsed `.mrdi` document. Construct through [`MrdiDocument::from_tree`]
/// or [`parse_document`] to get the structural checks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MrdiDocument {
    pub ns: NamespaceTable,
    pub type_desc: TypeDescriptor,
    /// Session UUID of a top-level ring object.
    pub id: Option<String>,
    pub data: Option<ValueTree>,
    pub refs: IndexMap<String, RefEntry>,
    pub meta: Option<Metadata>,
    /// Unrecognized top-level keys, in source order.
    pub extra: Map,
}

impl MrdiDocument {
    pub fn new(ns: NamespaceTable, type_desc: TypeDescriptor) -> Self {
        Self { ns, type_desc, id: None, data: None, refs: IndexMap::new(), meta: None, extra: Map::new() }
    }

    /// Canonical tree: `_ns`, `_type`, `id`, `data`, `_refs`, `_meta`, then
    /// foreign keys.
    pub fn to_tree(&self) -> ValueTree {
        let mut m = Map::new();
        if !self.ns.is_empty() {
            m.insert(KEY_NS, self.ns.to_tree());
        }
        m.insert(KEY_TYPE, self.type_desc.to_tree());
        if let Some(id) = &self.id {
            m.insert(KEY_ID, id.clone().into());
        }
        if let Some(d) = &self.data {
            m.insert(KEY_DATA, d.clone());
        }
        if !self.refs.is_empty() {
            m.insert(KEY_REFS, ValueTree::Map(self.refs.iter().map(|(k, e)| (k.clone(), e.to_tree())).collect()));
        }
        if let Some(meta) = &self.meta {
            m.insert(KEY_META, meta.to_tree());
        }
        for (k, v) in self.extra.iter() {
            m.insert(k.clone(), v.clone());
        }
        ValueTree::Map(m)
    }

    pub fn from_tree(tree: &ValueTree) -> Result<Self, DocError> {
        let m = tree.as_map().ok_or_else(|| DocError::NotAnObject { path: "/".into() })?;
        let ns = match m.get(KEY_NS) {
            Some(t) => NamespaceTable::from_tree(t, "/_ns")?,
            None => NamespaceTable::default(),
        };
        let ty = m.get(KEY_TYPE).ok_or_else(|| DocError::MissingType { path: "/".into() })?;
        let type_desc = TypeDescriptor::from_tree(ty, "/_type")?;
        let id = match m.get(KEY_ID) {
            None => None,
            Some(ValueTree::Text(s)) if is_uuid(s) => Some(s.clone()),
            Some(other) => {
                return Err(DocError::InvalidUuid { path: "/id".into(), value: other.to_string() });
            }
        };
        let mut refs = IndexMap::new();
        if let Some(r) = m.get(KEY_REFS) {
            let rm = r.as_map().ok_or_else(|| DocError::NotAnObject { path: "/_refs".into() })?;
            for (key, entry) in rm.iter() {
                let p = join_path("/_refs", key);
                if !is_uuid(key) {
                    return Err(DocError::InvalidUuid { path: p, value: key.clone() });
                }
                refs.insert(key.clone(), RefEntry::from_tree(entry, &p)?);
            }
        }
        let meta = m.get(KEY_META).map(|t| Metadata::from_tree(t, "/_meta")).transpose()?;
        let extra = m
            .iter()
            .filter(|(k, _)| ![KEY_NS, KEY_TYPE, KEY_ID, KEY_DATA, KEY_REFS, KEY_META].contains(&k.as_str()))
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        let doc = Self { ns, type_desc, id, data: m.get(KEY_DATA).cloned(), refs, meta, extra };
        doc.check_references()?;
        Ok(doc)
    }

    /// Every mentioned UUID must be a `_refs` key and the mention graph
    /// must be acyclic.
    pub fn check_references(&self) -> Result<(), DocError> {
        let mut mentions = Vec::new();
        refs::uuid_mentions_with_paths(&self.type_desc.to_tree(), "/_type", &mut mentions);
        if let Some(d) = &self.data {
            refs::uuid_mentions_with_paths(d, "/data", &mut mentions);
        }
        for (key, entry) in &self.refs {
            let p = join_path("/_refs", key);
            refs::uuid_mentions_with_paths(&entry.type_desc.to_tree(), &join_path(&p, KEY_TYPE), &mut mentions);
            if let Some(d) = &entry.data {
                refs::uuid_mentions_with_paths(d, &join_path(&p, KEY_DATA), &mut mentions);
            }
        }
        if let Some((path, uuid)) = mentions.into_iter().find(|(_, u)| !self.refs.contains_key(u)) {
            return Err(DocError::Dangling { path, uuid });
        }
        refs::ref_dependency_order(self).map(|_| ())
    }

    pub fn emit(&self, style: Style) -> String {
        emit_document(self, style)
    }
}

pub fn parse_document(text: &str) -> Result<MrdiDocument, DocError> {
    MrdiDocument::from_tree(&ValueTree::parse(text)?)
}

pub fn emit_document(doc: &MrdiDocument, style: Style) -> String {
    doc.to_tree().emit(style)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uuid_and_orcid_shapes() {
        assert!(is_uuid("a7029443-b1d3-4708-a66d-f68eb6616fcf"));
        assert!(!is_uuid("A7029443-b1d3-4708-a66d-f68eb6616fcf"));
        assert!(!is_uuid("a7029443-b1d3-4708-a66d-f68eb6616fc"));
        assert!(!is_uuid("a7029443xb1d3-4708-a66d-f68eb6616fcf"));
        assert!(is_orcid("0000-0002-1825-0097"));
        assert!(is_orcid("0000-0002-1694-233X"));
        assert!(!is_orcid("0000-0002-1694-23X3"));
    }

    #[test]
    fn singleton_document() {
        let doc = parse_document(r#"{"_ns":{"X":["u","1"]},"_type":"QQField"}"#).unwrap();
        assert_eq!(doc.type_desc, TypeDescriptor::bare("QQField"));
        assert!(doc.data.is_none());
        assert!(doc.refs.is_empty());
        assert!(!emit_document(&doc, Style::Compact).contains("data"));
    }

    #[test]
    fn type_descriptor_key_order_and_params() {
        let a = ValueTree::parse(r#"{"params":"x","name":"T"}"#).unwrap();
        let td = TypeDescriptor::from_tree(&a, "/_type").unwrap();
        assert_eq!(td, TypeDescriptor::with_params("T", "x".into()));
        assert_eq!(td.to_tree().emit(Style::Compact), r#"{"name":"T","params":"x"}"#);
        let bad = ValueTree::parse(r#"{"name":"T","params":5}"#).unwrap();
        assert!(matches!(TypeDescriptor::from_tree(&bad, "/_type"), Err(DocError::InvalidType { .. })));
    }

    #[test]
    fn structural_errors_name_paths() {
        let cases = [
            (r#"{"_ns":{}}"#, "/"),
            (r#"{"_type":"T","_refs":{"xyz":{"_type":"R"}}}"#, "/_refs/xyz"),
            (r#"{"_type":{"name":"T","params":"00000000-0000-4000-8000-000000000000"}}"#, "/_type/params"),
            (r#"{"_type":"T","_meta":{"author_orcid":"12"}}"#, "/_meta/author_orcid"),
            (r#"{"_ns":{"O":["u"]},"_type":"T"}"#, "/_ns/O"),
        ];
        for (src, path) in cases {
            let err = parse_document(src).unwrap_err().to_string();
            assert!(err.starts_with(path), "{src}: {err}");
        }
    }

    #[test]
    fn nested_refs_rejected() {
        let src = r#"{"_type":"T","_refs":{"00000000-0000-4000-8000-000000000000":{"_type":"R","_refs":{}}}}"#;
        assert!(matches!(parse_document(src), Err(DocError::NestedRefs { .. })));
    }

    #[test]
    fn cycle_rejected() {
        let a = "00000000-0000-4000-8000-00000000000a";
        let b = "00000000-0000-4000-8000-00000000000b";
        let src = format!(
            r#"{{"_type":"T","_refs":{{"{a}":{{"_type":{{"name":"R","params":"{b}"}}}},"{b}":{{"_type":"R","data":["{a}"]}}}}}}"#
        );
        match parse_document(&src) {
            Err(DocError::Cycle { uuids }) => assert!(uuids.contains(&a.to_string()) && uuids.contains(&b.to_string())),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn foreign_keys_kept_in_order() {
        let src = r#"{"zeta":[1,{"k":null}],"_type":"T","alpha":true}"#;
        let doc = parse_document(src).unwrap();
        assert_eq!(emit_document(&doc, Style::Compact), r#"{"_type":"T","zeta":[1,{"k":null}],"alpha":true}"#);
    }

    #[test]
    fn metadata_roundtrip() {
        let src = r#"{"_type":"T","_meta":{"name":"cubic scroll","author_orcid":"0000-0002-1825-0097"}}"#;
        let doc = parse_document(src).unwrap();
        assert_eq!(doc.meta.as_ref().unwrap().name.as_deref(), Some("cubic scroll"));
        assert_eq!(emit_document(&doc, Style::Compact), src);
    }
}
