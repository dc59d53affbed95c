//! A small JSON Schema engine covering the keywords the `.mrdi` format
//! uses: `type`, `properties`, `patternProperties`, `propertyNames`,
//! `required`, `oneOf`, `$ref`, `$defs` and `format: "uuid"`.
//!
//! Keys matched by neither `properties` nor `patternProperties` are not
//! checked. Unknown keywords compile to warnings.

use std::collections::HashMap;
use std::fmt;
use std::sync::OnceLock;

use regex::Regex;
use thiserror::Error;

use crate::doc::is_uuid;
use crate::value::{join_path, ValueTree};

const BUILTIN_SCHEMA: &str = include_str!("mrdi.schema.json");

/// Keywords accepted without effect.
const ANNOTATIONS: &[&str] = &["$id", "$schema", "$comment", "title", "description"];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemaError {
    #[error("{path}: unresolvable $ref \"{target}\"")]
    UnresolvedRef { path: String, target: String },
    #[error("{path}: invalid regex \"{pattern}\": {reason}")]
    InvalidRegex { path: String, pattern: String, reason: String },
    #[error("{path}: {reason}")]
    InvalidKeyword { path: String, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum JsonType {
    Object,
    Array,
    String,
    Number,
    Integer,
    Boolean,
    Null,
}

impl JsonType {
    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "object" => Self::Object,
            "array" => Self::Array,
            "string" => Self::String,
            "number" => Self::Number,
            "integer" => Self::Integer,
            "boolean" => Self::Boolean,
            "null" => Self::Null,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            Self::Object => "object",
            Self::Array => "array",
            Self::String => "string",
            Self::Number => "number",
            Self::Integer => "integer",
            Self::Boolean => "boolean",
            Self::Null => "null",
        }
    }

    fn matches(self, v: &ValueTree) -> bool {
        match (self, v) {
            (Self::Integer, ValueTree::Number(n)) => !n.contains(['.', 'e', 'E']),
            _ => self.name() == v.kind(),
        }
    }
}

#[derive(Debug, Default)]
struct Node {
    reject_all: bool,
    ty: Option<JsonType>,
    properties: Vec<(String, usize)>,
    pattern_properties: Vec<(Regex, usize)>,
    property_names: Option<usize>,
    required: Vec<String>,
    one_of: Vec<usize>,
    reference: Option<usize>,
    format_uuid: bool,
}

/// A compiled schema. Immutable and shareable.
#[derive(Debug)]
pub struct Schema {
    nodes: Vec<Node>,
    root: usize,
    warnings: Vec<String>,
}

/// One failed check, addressed by a slash-separated path into the tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub path: String,
    pub rule: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}: {}", self.path, self.rule, self.message)
    }
}

struct Compiler {
    nodes: Vec<Node>,
    by_path: HashMap<String, usize>,
    pending_refs: Vec<(usize, String, String)>,
    warnings: Vec<String>,
}

impl Compiler {
    fn compile(&mut self, tree: &ValueTree, path: &str) -> Result<usize, SchemaError> {
        let id = self.nodes.len();
        self.nodes.push(Node::default());
        self.by_path.insert(path.to_string(), id);
        let map = match tree {
            ValueTree::Bool(true) => return Ok(id),
            ValueTree::Bool(false) => {
                self.nodes[id].reject_all = true;
                return Ok(id);
            }
            ValueTree::Map(m) => m,
            other => {
                return Err(SchemaError::InvalidKeyword {
                    path: path.to_string(),
                    reason: format!("schema must be an object or boolean, found {}", other.kind()),
                })
            }
        };
        let bad = |key: &str, reason: &str| SchemaError::InvalidKeyword {
            path: join_path(path, key),
            reason: reason.to_string(),
        };
        for (key, value) in map.iter() {
            let kpath = join_path(path, key);
            match key.as_str() {
                "type" => {
                    let t = value.as_str().and_then(JsonType::parse).ok_or_else(|| bad(key, "unknown type name"))?;
                    self.nodes[id].ty = Some(t);
                }
                "properties" => {
                    let m = value.as_map().ok_or_else(|| bad(key, "expected an object"))?;
                    for (name, sub) in m.iter() {
                        let child = self.compile(sub, &join_path(&kpath, name))?;
                        self.nodes[id].properties.push((name.clone(), child));
                    }
                }
                "patternProperties" => {
                    let m = value.as_map().ok_or_else(|| bad(key, "expected an object"))?;
                    for (pattern, sub) in m.iter() {
                        let re = Regex::new(pattern).map_err(|e| SchemaError::InvalidRegex {
                            path: kpath.clone(),
                            pattern: pattern.clone(),
                            reason: e.to_string(),
                        })?;
                        let child = self.compile(sub, &join_path(&kpath, pattern))?;
                        self.nodes[id].pattern_properties.push((re, child));
                    }
                }
                "propertyNames" => {
                    let child = self.compile(value, &kpath)?;
                    self.nodes[id].property_names = Some(child);
                }
                "required" => {
                    let names = value
                        .as_array()
                        .and_then(|a| a.iter().map(|v| v.as_str().map(str::to_string)).collect::<Option<Vec<_>>>())
                        .ok_or_else(|| bad(key, "expected an array of strings"))?;
                    self.nodes[id].required = names;
                }
                "oneOf" => {
                    let items = value.as_array().ok_or_else(|| bad(key, "expected an array"))?;
                    for (i, sub) in items.iter().enumerate() {
                        let child = self.compile(sub, &join_path(&kpath, &i.to_string()))?;
                        self.nodes[id].one_of.push(child);
                    }
                }
                "$ref" => {
                    let target = value.as_str().ok_or_else(|| bad(key, "expected a string"))?;
                    self.pending_refs.push((id, kpath, target.to_string()));
                }
                "$defs" => {
                    let m = value.as_map().ok_or_else(|| bad(key, "expected an object"))?;
                    for (name, sub) in m.iter() {
                        self.compile(sub, &join_path(&kpath, name))?;
                    }
                }
                "format" => match value.as_str() {
                    Some("uuid") => self.nodes[id].format_uuid = true,
                    Some(other) => self.warnings.push(format!("{kpath}: unsupported format \"{other}\" ignored")),
                    None => return Err(bad(key, "expected a string")),
                },
                k if ANNOTATIONS.contains(&k) => {}
                _ => self.warnings.push(format!("{kpath}: unknown keyword ignored")),
            }
        }
        Ok(id)
    }
}

/// Compiles a schema tree. `$ref` targets are `#` (the root) or `#/...`
/// paths to any compiled subschema, typically `#/$defs/<name>`.
pub fn compile_schema(tree: &ValueTree) -> Result<Schema, SchemaError> {
    let mut c = Compiler { nodes: Vec::new(), by_path: HashMap::new(), pending_refs: Vec::new(), warnings: Vec::new() };
    let root = c.compile(tree, "")?;
    for (node, path, target) in std::mem::take(&mut c.pending_refs) {
        let pointer = target.strip_prefix('#').filter(|p| p.is_empty() || p.starts_with('/'));
        let resolved = pointer.and_then(|p| c.by_path.get(p)).copied();
        match resolved {
            Some(t) => c.nodes[node].reference = Some(t),
            None => return Err(SchemaError::UnresolvedRef { path, target }),
        }
    }
    Ok(Schema { nodes: c.nodes, root, warnings: c.warnings })
}

/// The embedded `.mrdi` document schema.
pub fn builtin_mrdi_schema() -> &'static Schema {
    static SCHEMA: OnceLock<Schema> = OnceLock::new();
    SCHEMA.get_or_init(|| compile_schema(&builtin_schema_tree()).expect("built-in schema compiles"))
}

pub fn builtin_schema_tree() -> ValueTree {
    ValueTree::parse(BUILTIN_SCHEMA).expect("built-in schema is valid JSON")
}

pub fn builtin_schema_text() -> &'static str {
    BUILTIN_SCHEMA
}

/// Checks `tree` against `schema`; an empty result means it conforms.
pub fn validate(tree: &ValueTree, schema: &Schema) -> Vec<Violation> {
    schema.validate(tree)
}

impl Schema {
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn validate(&self, tree: &ValueTree) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut ref_stack = Vec::new();
        self.check(self.root, tree, "/", &mut out, &mut ref_stack);
        out
    }

    pub fn conforms(&self, tree: &ValueTree) -> bool {
        self.validate(tree).is_empty()
    }

    fn check(
        &self,
        id: usize,
        v: &ValueTree,
        path: &str,
        out: &mut Vec<Violation>,
        ref_stack: &mut Vec<(usize, *const ValueTree)>,
    ) {
        let node = &self.nodes[id];
        let mut push = |rule: &str, message: String| {
            out.push(Violation { path: path.to_string(), rule: rule.to_string(), message })
        };
        if node.reject_all {
            push("false", "schema rejects every value".into());
            return;
        }
        if let Some(t) = node.ty {
            if !t.matches(v) {
                push("type", format!("expected {}, found {}", t.name(), v.kind()));
                return;
            }
        }
        if node.format_uuid {
            if let ValueTree::Text(s) = v {
                if !is_uuid(s) {
                    push("format", format!("\"{s}\" is not a valid uuid"));
                }
            }
        }
        if let ValueTree::Map(m) = v {
            for name in &node.required {
                if !m.contains_key(name) {
                    push("required", format!("missing required property \"{name}\""));
                }
            }
            for (key, child) in m.iter() {
                let cpath = join_path(path, key);
                if let Some(names) = node.property_names {
                    // key names are checked as strings located at the key's value
                    let key_tree = ValueTree::Text(key.clone());
                    self.check(names, &key_tree, &cpath, out, &mut Vec::new());
                }
                for (name, sub) in &node.properties {
                    if name == key {
                        self.check(*sub, child, &cpath, out, ref_stack);
                    }
                }
                for (re, sub) in &node.pattern_properties {
                    if re.is_match(key) {
                        self.check(*sub, child, &cpath, out, ref_stack);
                    }
                }
            }
        }
        if !node.one_of.is_empty() {
            let matched = node
                .one_of
                .iter()
                .filter(|&&branch| {
                    let mut tmp = Vec::new();
                    self.check(branch, v, path, &mut tmp, ref_stack);
                    tmp.is_empty()
                })
                .count();
            if matched != 1 {
                out.push(Violation {
                    path: path.to_string(),
                    rule: "oneOf".into(),
                    message: format!(
                        "value matches {matched} of {} alternatives, expected exactly 1",
                        node.one_of.len()
                    ),
                });
            }
        }
        if let Some(target) = node.reference {
            let key = (target, v as *const ValueTree);
            if ref_stack.contains(&key) {
                out.push(Violation {
                    path: path.to_string(),
                    rule: "$ref".into(),
                    message: "recursive reference does not descend into the value".into(),
                });
                return;
            }
            ref_stack.push(key);
            self.check(target, v, path, out, ref_stack);
            ref_stack.pop();
        }
    }
}
