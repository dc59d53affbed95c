//! Format versions, chained upgrade scripts and foreign namespaces.
//!
//! Version strings are opaque labels. An upgrade follows the shortest chain
//! of registered `(namespace, from, to)` scripts.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::compress::MARKER_NAMESPACE;
use crate::doc::{DocError, MrdiDocument, KEY_NS, KEY_TYPE};
use crate::schema::builtin_mrdi_schema;
use crate::session::Session;
use crate::value::{join_path, ValueTree};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MigrateError {
    #[error("namespace \"{0}\" is not declared in _ns")]
    MissingNamespace(String),
    #[error("no upgrade path for {namespace} from {from} to {to}")]
    NoPath { namespace: String, from: String, to: String },
    #[error("an upgrade script for {namespace} {from} -> {to} is already registered")]
    DuplicateScript { namespace: String, from: String, to: String },
    #[error("upgrade {from} -> {to} failed: {message}")]
    Script { from: String, to: String, message: String },
    #[error("upgraded document is invalid: {0}")]
    Invalid(String),
}

impl From<DocError> for MigrateError {
    fn from(e: DocError) -> Self {
        MigrateError::Invalid(e.to_string())
    }
}

pub type Transform = Arc<dyn Fn(ValueTree) -> Result<ValueTree, String> + Send + Sync>;

/// Rewrites whole documents of one namespace from one version to the next.
#[derive(Clone)]
pub struct UpgradeScript {
    pub namespace: String,
    pub from: String,
    pub to: String,
    pub transform: Transform,
}

impl UpgradeScript {
    pub fn new(
        namespace: &str,
        from: &str,
        to: &str,
        transform: impl Fn(ValueTree) -> Result<ValueTree, String> + Send + Sync + 'static,
    ) -> Self {
        Self { namespace: namespace.into(), from: from.into(), to: to.into(), transform: Arc::new(transform) }
    }
}

impl fmt::Debug for UpgradeScript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UpgradeScript({} {} -> {})", self.namespace, self.from, self.to)
    }
}

#[derive(Debug, Clone, Default)]
pub struct UpgradeRegistry {
    scripts: Vec<UpgradeScript>,
}

impl UpgradeRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// The scripts shipped with this crate.
    pub fn builtin() -> Self {
        let mut r = Self::new();
        for s in builtin_scripts() {
            r.register(s).expect("built-in edges are distinct");
        }
        r
    }

    pub fn register(&mut self, script: UpgradeScript) -> Result<(), MigrateError> {
        if self.scripts.iter().any(|s| s.namespace == script.namespace && s.from == script.from && s.to == script.to) {
            return Err(MigrateError::DuplicateScript {
                namespace: script.namespace,
                from: script.from,
                to: script.to,
            });
        }
        self.scripts.push(script);
        Ok(())
    }

    pub fn scripts(&self) -> &[UpgradeScript] {
        &self.scripts
    }

    /// Shortest chain of scripts from `from` to `to`; empty when equal.
    pub fn path(&self, namespace: &str, from: &str, to: &str) -> Option<Vec<&UpgradeScript>> {
        let mut prev: HashMap<&str, usize> = HashMap::new();
        let mut queue = VecDeque::from([from]);
        let mut seen = vec![from];
        while let Some(v) = queue.pop_front() {
            if v == to {
                let mut chain = Vec::new();
                let mut cur = v;
                while cur != from {
                    let s = &self.scripts[prev[cur]];
                    chain.push(s);
                    cur = &s.from;
                }
                chain.reverse();
                return Some(chain);
            }
            for (i, s) in self.scripts.iter().enumerate() {
                if s.namespace == namespace && s.from == v && !seen.contains(&s.to.as_str()) {
                    seen.push(&s.to);
                    prev.insert(&s.to, i);
                    queue.push_back(&s.to);
                }
            }
        }
        None
    }
}

/// The version recorded for `namespace` in the document header.
pub fn file_version<'d>(doc: &'d MrdiDocument, namespace: &str) -> Result<&'d str, MigrateError> {
    doc.ns.get(namespace).map(|e| e.version.as_str()).ok_or_else(|| MigrateError::MissingNamespace(namespace.into()))
}

/// Applies the script chain from the file's version to `target`.
pub fn upgrade(
    doc: &MrdiDocument,
    namespace: &str,
    target: &str,
    registry: &UpgradeRegistry,
) -> Result<MrdiDocument, MigrateError> {
    let from = file_version(doc, namespace)?;
    let chain = registry.path(namespace, from, target).ok_or_else(|| MigrateError::NoPath {
        namespace: namespace.into(),
        from: from.into(),
        to: target.into(),
    })?;
    if chain.is_empty() {
        return Ok(doc.clone());
    }
    let mut tree = doc.to_tree();
    for s in chain {
        let script_err = |message: String| MigrateError::Script { from: s.from.clone(), to: s.to.clone(), message };
        tree = (s.transform)(tree).map_err(script_err)?;
        let slot = tree
            .pointer_mut(&join_path(&join_path("/_ns", namespace), "1"))
            .ok_or_else(|| script_err(format!("the script removed the {namespace} namespace entry")))?;
        *slot = ValueTree::text(&s.to);
    }
    let violations = builtin_mrdi_schema().validate(&tree);
    if let Some(v) = violations.first() {
        return Err(MigrateError::Invalid(v.to_string()));
    }
    Ok(MrdiDocument::from_tree(&tree)?)
}

/// Names declared in `_ns` maps anywhere in the document that the session
/// does not claim, in order of first appearance.
pub fn foreign_namespaces(doc: &MrdiDocument, session: &Session) -> Vec<String> {
    let own = session.namespace().0;
    let mut out: Vec<String> = Vec::new();
    let tree = doc.to_tree();
    tree.walk(&mut |t| {
        if let Some(ns) = t.as_map().and_then(|m| m.get(KEY_NS)).and_then(ValueTree::as_map) {
            for name in ns.keys() {
                if name != own && name != MARKER_NAMESPACE && !out.contains(name) {
                    out.push(name.clone());
                }
            }
        }
    });
    out
}

/// Renames type names in every `_type` value and every `{name, params}`
/// descriptor.
pub fn rename_types(tree: &mut ValueTree, renames: &[(&str, &str)]) {
    fn rename(t: &mut ValueTree, renames: &[(&str, &str)]) {
        if let ValueTree::Text(s) = t {
            if let Some((_, new)) = renames.iter().find(|(old, _)| old == s) {
                *s = new.to_string();
            }
        }
    }
    match tree {
        ValueTree::Map(m) => {
            if let Some(t) = m.get_mut(KEY_TYPE) {
                rename(t, renames);
            }
            let is_descriptor = m.contains_key("name") && m.keys().all(|k| k == "name" || k == "params");
            if is_descriptor {
                rename(m.get_mut("name").expect("checked"), renames);
            }
            for (_, v) in m.iter_mut() {
                rename_types(v, renames);
            }
        }
        ValueTree::Array(items) => items.iter_mut().for_each(|x| rename_types(x, renames)),
        _ => {}
    }
}

/// Renames `from` to `to` in every map that also has a `base_ring` key.
fn rename_ring_key(tree: &mut ValueTree, from: &str, to: &str) {
    match tree {
        ValueTree::Map(m) => {
            if m.contains_key("base_ring") {
                m.rename_key(from, to);
            }
            m.iter_mut().for_each(|(_, v)| rename_ring_key(v, from, to));
        }
        ValueTree::Array(items) => items.iter_mut().for_each(|x| rename_ring_key(x, from, to)),
        _ => {}
    }
}

/// Two synthetic historical steps of the `Oscar` namespace:
///
/// * `0.11.0 -> 0.12.0`: `fq_nmod_field` became `FqNmodField` and ring
///   data key `vars` became `symbols`.
/// * `0.12.0 -> 0.13.0-DEV`: `FqNmodField` became `fqPolyRepField`,
///   `MPolyElem` became `MPolyRingElem` and `PolyElem` became
///   `PolyRingElem`.
pub fn builtin_scripts() -> Vec<UpgradeScript> {
    vec![
        UpgradeScript::new("Oscar", "0.11.0", "0.12.0", |mut t| {
            rename_types(&mut t, &[("fq_nmod_field", "FqNmodField")]);
            rename_ring_key(&mut t, "vars", "symbols");
            Ok(t)
        }),
        UpgradeScript::new("Oscar", "0.12.0", "0.13.0-DEV", |mut t| {
            rename_types(
                &mut t,
                &[("FqNmodField", "fqPolyRepField"), ("MPolyElem", "MPolyRingElem"), ("PolyElem", "PolyRingElem")],
            );
            Ok(t)
        }),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::doc::parse_document;

    fn doc(version: &str, ty: &str) -> MrdiDocument {
        parse_document(&format!(r#"{{"_ns":{{"Oscar":["u","{version}"],"Other":["v","9"]}},"_type":"{ty}"}}"#)).unwrap()
    }

    #[test]
    fn versions() {
        let d = doc("0.12.0", "X");
        assert_eq!(file_version(&d, "Oscar").unwrap(), "0.12.0");
        assert_eq!(file_version(&d, "Other").unwrap(), "9");
        assert!(matches!(file_version(&d, "Nope"), Err(MigrateError::MissingNamespace(_))));
    }

    #[test]
    fn chain_order_matters() {
        let reg = UpgradeRegistry::builtin();
        let up = upgrade(&doc("0.11.0", "fq_nmod_field"), "Oscar", "0.13.0-DEV", &reg).unwrap();
        assert_eq!(up.type_desc.name, "fqPolyRepField");
        assert_eq!(file_version(&up, "Oscar").unwrap(), "0.13.0-DEV");
        assert_eq!(file_version(&up, "Other").unwrap(), "9");
        let path: Vec<_> = reg.path("Oscar", "0.11.0", "0.13.0-DEV").unwrap().iter().map(|s| s.to.clone()).collect();
        assert_eq!(path, ["0.12.0", "0.13.0-DEV"]);
    }

    #[test]
    fn empty_and_missing_paths() {
        let reg = UpgradeRegistry::builtin();
        let d = doc("0.13.0-DEV", "X");
        assert_eq!(upgrade(&d, "Oscar", "0.13.0-DEV", &reg).unwrap(), d);
        assert!(matches!(upgrade(&d, "Oscar", "0.11.0", &reg), Err(MigrateError::NoPath { .. })));
        let mut r = UpgradeRegistry::builtin();
        assert!(matches!(r.register(builtin_scripts().remove(0)), Err(MigrateError::DuplicateScript { .. })));
    }

    #[test]
    fn shortest_path_wins() {
        let mut reg = UpgradeRegistry::new();
        for (a, b) in [("1", "2"), ("2", "3"), ("3", "4"), ("1", "3")] {
            reg.register(UpgradeScript::new("N", a, b, Ok)).unwrap();
        }
        let hops: Vec<_> = reg.path("N", "1", "4").unwrap().iter().map(|s| s.from.clone()).collect();
        assert_eq!(hops, ["1", "3"]);
        assert!(reg.path("M", "1", "4").is_none());
    }

    #[test]
    fn failing_script_reported() {
        let mut reg = UpgradeRegistry::new();
        reg.register(UpgradeScript::new("Oscar", "1", "2", |_| Err("boom".into()))).unwrap();
        reg.register(UpgradeScript::new("Oscar", "2", "3", |_| Ok(ValueTree::text("not a document")))).unwrap();
        assert!(matches!(upgrade(&doc("1", "X"), "Oscar", "2", &reg), Err(MigrateError::Script { .. })));
        assert!(matches!(upgrade(&doc("2", "X"), "Oscar", "3", &reg), Err(MigrateError::Script { .. })));
    }

    #[test]
    fn descriptor_renames_reach_params() {
        let mut t = ValueTree::parse(r#"{"_type":{"name":"Vector","params":{"name":"MPolyElem","params":"x"}},"data":{"name":"MPolyElem","other":1}}"#).unwrap();
        rename_types(&mut t, &[("MPolyElem", "MPolyRingElem")]);
        assert_eq!(t.pointer("/_type/params/name").unwrap().as_str(), Some("MPolyRingElem"));
        assert_eq!(t.pointer("/data/name").unwrap().as_str(), Some("MPolyElem"));
    }
}
