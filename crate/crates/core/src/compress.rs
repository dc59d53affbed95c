//! Subtree compression. A subtree is replaced by a `CompressedTree` node
//! carrying the base64 text of its deflated compact emission, so the
//! document stays valid JSON and valid against the schema.
//!
//! ```json
//! {"_ns": {"mrdikit": ["urn:mrdikit", "0.1.0"]},
//!  "_type": "CompressedTree",
//!  "data": {"codec": "deflate", "payload": "..."}}
//! ```

use std::io::{Read, Write};

use base64::engine::general_purpose::STANDARD;
use base64::Engine;
use flate2::read::DeflateDecoder;
use flate2::write::DeflateEncoder;
use flate2::Compression;
use thiserror::Error;

use crate::doc::{DocError, MrdiDocument, KEY_DATA, KEY_NS, KEY_TYPE};
use crate::schema::builtin_mrdi_schema;
use crate::value::{Map, Style, ValueTree};

pub const MARKER_TYPE: &str = "CompressedTree";
pub const MARKER_NAMESPACE: &str = "mrdikit";
pub const MARKER_URL: &str = "urn:mrdikit";
pub const MARKER_VERSION: &str = "0.1.0";
pub const CODEC: &str = "deflate";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompressError {
    #[error("{0}: no such node")]
    BadPath(String),
    #[error("{0}: not a {MARKER_TYPE} node")]
    NotCompressed(String),
    #[error("{path}: corrupt payload: {reason}")]
    Corrupt { path: String, reason: String },
    #[error("{0}: the document root cannot be compressed")]
    Root(String),
    #[error("result is not a valid document: {0}")]
    Invalid(#[from] DocError),
    #[error("result violates the schema: {0}")]
    Schema(String),
}

/// True for a `CompressedTree` marker node.
pub fn is_marker(t: &ValueTree) -> bool {
    t.as_map().and_then(|m| m.get(KEY_TYPE)).and_then(ValueTree::as_str) == Some(MARKER_TYPE)
}

/// The marker node standing for `t`.
pub fn compress_value(t: &ValueTree) -> ValueTree {
    let mut enc = DeflateEncoder::new(Vec::new(), Compression::default());
    enc.write_all(t.emit(Style::Compact).as_bytes()).expect("writing to a Vec");
    let bytes = enc.finish().expect("writing to a Vec");
    let mut ns = Map::new();
    ns.insert(MARKER_NAMESPACE, ValueTree::Array(vec![MARKER_URL.into(), MARKER_VERSION.into()]));
    let mut data = Map::new();
    data.insert("codec", CODEC.into());
    data.insert("payload", STANDARD.encode(bytes).into());
    let mut m = Map::new();
    m.insert(KEY_NS, ValueTree::Map(ns));
    m.insert(KEY_TYPE, MARKER_TYPE.into());
    m.insert(KEY_DATA, ValueTree::Map(data));
    ValueTree::Map(m)
}

/// Inverts [`compress_value`] on one marker node. `path` only labels errors.
pub fn decompress_value(node: &ValueTree, path: &str) -> Result<ValueTree, CompressError> {
    if !is_marker(node) {
        return Err(CompressError::NotCompressed(path.to_string()));
    }
    let corrupt = |reason: String| CompressError::Corrupt { path: path.to_string(), reason };
    let data = node.as_map().and_then(|m| m.get(KEY_DATA)).and_then(ValueTree::as_map);
    let data = data.ok_or_else(|| corrupt("missing data object".into()))?;
    match data.get("codec").and_then(ValueTree::as_str) {
        Some(CODEC) => {}
        Some(other) => return Err(corrupt(format!("unknown codec \"{other}\""))),
        None => return Err(corrupt("missing codec".into())),
    }
    let payload = data.get("payload").and_then(ValueTree::as_str).ok_or_else(|| corrupt("missing payload".into()))?;
    let bytes = STANDARD.decode(payload).map_err(|e| corrupt(format!("base64: {e}")))?;
    let mut text = String::new();
    DeflateDecoder::new(bytes.as_slice()).read_to_string(&mut text).map_err(|e| corrupt(format!("deflate: {e}")))?;
    ValueTree::parse(&text).map_err(|e| corrupt(format!("json: {e}")))
}

/// Replaces every marker node, including markers inside payloads.
pub fn decompress_tree(t: &ValueTree, path: &str) -> Result<ValueTree, CompressError> {
    if is_marker(t) {
        let inner = decompress_value(t, path)?;
        return decompress_tree(&inner, path);
    }
    Ok(match t {
        ValueTree::Array(items) => ValueTree::Array(
            items
                .iter()
                .enumerate()
                .map(|(i, x)| decompress_tree(x, &crate::value::join_path(path, &i.to_string())))
                .collect::<Result<_, _>>()?,
        ),
        ValueTree::Map(m) => {
            let mut out = Map::new();
            for (k, v) in m.iter() {
                out.insert(k.clone(), decompress_tree(v, &crate::value::join_path(path, k))?);
            }
            ValueTree::Map(out)
        }
        other => other.clone(),
    })
}

fn contains_marker(t: &ValueTree) -> bool {
    let mut found = false;
    t.walk(&mut |n| found |= is_marker(n));
    found
}

pub fn contains_compressed(doc: &MrdiDocument) -> bool {
    contains_marker(&doc.to_tree())
}

fn finish(tree: ValueTree) -> Result<MrdiDocument, CompressError> {
    let violations = builtin_mrdi_schema().validate(&tree);
    if let Some(v) = violations.first() {
        return Err(CompressError::Schema(v.to_string()));
    }
    Ok(MrdiDocument::from_tree(&tree)?)
}

fn normalize(path: &str) -> &str {
    path.trim_end_matches('/')
}

/// Replaces the subtree at `path` (slash-separated, e.g. `/data/0`) with
/// a marker node.
pub fn compress_subtree(doc: &MrdiDocument, path: &str) -> Result<MrdiDocument, CompressError> {
    let path = normalize(path);
    if path.is_empty() {
        return Err(CompressError::Root("/".into()));
    }
    let mut tree = doc.to_tree();
    let node = tree.pointer_mut(path).ok_or_else(|| CompressError::BadPath(path.to_string()))?;
    *node = compress_value(node);
    finish(tree)
}

/// Restores the marker node at `path`.
pub fn decompress_subtree(doc: &MrdiDocument, path: &str) -> Result<MrdiDocument, CompressError> {
    let path = normalize(path);
    let mut tree = doc.to_tree();
    let node = tree.pointer_mut(path).ok_or_else(|| CompressError::BadPath(path.to_string()))?;
    *node = decompress_value(node, path)?;
    finish(tree)
}

/// Restores every marker node in the document.
pub fn decompress_all(doc: &MrdiDocument) -> Result<MrdiDocument, CompressError> {
    finish(decompress_tree(&doc.to_tree(), "")?)
}
