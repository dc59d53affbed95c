//! Human-readable tree rendering of a document. UUIDs are shortened to
//! their first eight characters.

use std::fmt::Write;

use crate::doc::{is_uuid, MrdiDocument, TypeDescriptor};
use crate::refs::{dependency_edges, ref_dependency_order};
use crate::value::ValueTree;

const MAX_CHILDREN: usize = 6;
const MAX_DEPTH: usize = 4;

pub fn abbreviate(uuid: &str) -> &str {
    if is_uuid(uuid) {
        &uuid[..8]
    } else {
        uuid
    }
}

fn short_text(s: &str) -> String {
    if is_uuid(s) {
        format!("-> {}", abbreviate(s))
    } else {
        format!("{s:?}")
    }
}

/// One-line form of a type descriptor, e.g. `MPolyRingElem(-> a7029443)`.
pub fn describe_type(t: &TypeDescriptor) -> String {
    match &t.params {
        None => t.name.clone(),
        Some(p) => format!("{}({})", t.name, inline(p, 2)),
    }
}

fn inline(t: &ValueTree, depth: usize) -> String {
    match t {
        ValueTree::Text(s) => {
            if is_uuid(s) {
                format!("-> {}", abbreviate(s))
            } else {
                s.clone()
            }
        }
        ValueTree::Map(m) if depth > 0 => {
            if let Ok(d) = TypeDescriptor::from_tree(t, "") {
                if m.contains_key("name") {
                    return describe_type(&d);
                }
            }
            let parts: Vec<String> = m.iter().map(|(k, v)| format!("{k}: {}", inline(v, depth - 1))).collect();
            format!("{{{}}}", parts.join(", "))
        }
        ValueTree::Array(a) if depth > 0 => {
            let parts: Vec<String> = a.iter().map(|v| inline(v, depth - 1)).collect();
            format!("[{}]", parts.join(", "))
        }
        ValueTree::Map(m) => format!("{{{} keys}}", m.len()),
        ValueTree::Array(a) => format!("[{} items]", a.len()),
        other => other.to_string(),
    }
}

fn skeleton(out: &mut String, label: &str, t: &ValueTree, indent: usize, depth: usize) {
    let pad = "  ".repeat(indent);
    match t {
        ValueTree::Array(items) => {
            let _ = writeln!(out, "{pad}{label}array[{}]", items.len());
            if depth < MAX_DEPTH {
                for (i, x) in items.iter().take(MAX_CHILDREN).enumerate() {
                    skeleton(out, &format!("[{i}] "), x, indent + 1, depth + 1);
                }
                if items.len() > MAX_CHILDREN {
                    let _ = writeln!(out, "{pad}  ... {} more", items.len() - MAX_CHILDREN);
                }
            }
        }
        ValueTree::Map(m) => {
            let _ = writeln!(out, "{pad}{label}object{{{}}}", m.len());
            if depth < MAX_DEPTH {
                for (k, v) in m.iter().take(MAX_CHILDREN) {
                    skeleton(out, &format!("{k}: "), v, indent + 1, depth + 1);
                }
                if m.len() > MAX_CHILDREN {
                    let _ = writeln!(out, "{pad}  ... {} more", m.len() - MAX_CHILDREN);
                }
            }
        }
        ValueTree::Text(s) => {
            let _ = writeln!(out, "{pad}{label}{}", short_text(s));
        }
        other => {
            let _ = writeln!(out, "{pad}{label}{other}");
        }
    }
}

/// Namespaces, type, data skeleton and refs in dependency order with
/// their dependency edges.
pub fn render(doc: &MrdiDocument) -> String {
    let mut out = String::new();
    for (name, e) in &doc.ns.0 {
        let _ = writeln!(out, "_ns: {name} {} {}", e.url, e.version);
    }
    let _ = writeln!(out, "_type: {}", describe_type(&doc.type_desc));
    if let Some(id) = &doc.id {
        let _ = writeln!(out, "id: {}", abbreviate(id));
    }
    if let Some(d) = &doc.data {
        skeleton(&mut out, "data: ", d, 0, 0);
    }
    if !doc.refs.is_empty() {
        let edges = dependency_edges(doc);
        let order = ref_dependency_order(doc).unwrap_or_else(|_| doc.refs.keys().cloned().collect());
        let _ = writeln!(out, "_refs: {} (dependencies first)", doc.refs.len());
        for uuid in &order {
            let entry = &doc.refs[uuid];
            let deps = edges.iter().find(|(u, _)| u == uuid).map(|(_, d)| d.clone()).unwrap_or_default();
            let mut line = format!("  {} {}", abbreviate(uuid), describe_type(&entry.type_desc));
            if !deps.is_empty() {
                let short: Vec<&str> = deps.iter().map(|d| abbreviate(d)).collect();
                let _ = write!(line, " -> {}", short.join(", "));
            }
            let _ = writeln!(out, "{line}");
        }
    }
    if let Some(m) = &doc.meta {
        if let Some(n) = &m.name {
            let _ = writeln!(out, "_meta.name: {n}");
        }
        if let Some(o) = &m.author_orcid {
            let _ = writeln!(out, "_meta.author_orcid: {o}");
        }
    }
    for (k, v) in doc.extra.iter() {
        let _ = writeln!(out, "{k}: {}", inline(v, 1));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::doc::parse_document;

    #[test]
    fn singleton_is_two_lines() {
        let d = parse_document(r#"{"_ns":{"X":["u","1"]},"_type":"QQField"}"#).unwrap();
        assert_eq!(render(&d), "_ns: X u 1\n_type: QQField\n");
    }

    #[test]
    fn long_arrays_are_elided() {
        let d = parse_document(r#"{"_type":"T","data":[1,2,3,4,5,6,7,8,9]}"#).unwrap();
        let r = render(&d);
        assert!(r.contains("data: array[9]"));
        assert!(r.contains("... 3 more"));
    }
}
