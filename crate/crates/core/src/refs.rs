//! UUID mentions and the dependency order of the reference table.

use std::collections::{BTreeSet, HashMap};

use crate::doc::{is_uuid, DocError, MrdiDocument, RefEntry};
use crate::value::{join_path, ValueTree};

/// Every string in `tree` that has UUID shape.
pub fn collect_uuid_mentions(tree: &ValueTree) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    tree.walk(&mut |node| {
        if let ValueTree::Text(s) = node {
            if is_uuid(s) {
                out.insert(s.clone());
            }
        }
    });
    out
}

pub(crate) fn uuid_mentions_with_paths(tree: &ValueTree, path: &str, out: &mut Vec<(String, String)>) {
    match tree {
        ValueTree::Text(s) if is_uuid(s) => out.push((path.to_string(), s.clone())),
        ValueTree::Array(a) => {
            for (i, v) in a.iter().enumerate() {
                uuid_mentions_with_paths(v, &join_path(path, &i.to_string()), out);
            }
        }
        ValueTree::Map(m) => {
            for (k, v) in m.iter() {
                uuid_mentions_with_paths(v, &join_path(path, k), out);
            }
        }
        _ => {}
    }
}

/// UUIDs mentioned by one reference entry (type parameters and data).
pub fn entry_mentions(entry: &RefEntry) -> BTreeSet<String> {
    let mut m = collect_uuid_mentions(&entry.type_desc.to_tree());
    if let Some(d) = &entry.data {
        m.extend(collect_uuid_mentions(d));
    }
    m
}

/// Dependency edges `uuid -> mentioned uuids` restricted to keys of `_refs`.
pub fn dependency_edges(doc: &MrdiDocument) -> Vec<(String, Vec<String>)> {
    doc.refs
        .iter()
        .map(|(k, e)| {
            let deps = entry_mentions(e).into_iter().filter(|u| doc.refs.contains_key(u)).collect();
            (k.clone(), deps)
        })
        .collect()
}

/// Orders `_refs` keys so that every UUID comes after all UUIDs it mentions.
/// Ties follow insertion order.
pub fn ref_dependency_order(doc: &MrdiDocument) -> Result<Vec<String>, DocError> {
    let edges = dependency_edges(doc);
    let index: HashMap<&str, usize> = edges.iter().enumerate().map(|(i, (k, _))| (k.as_str(), i)).collect();

    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        Open,
        Done,
    }
    let mut marks = vec![Mark::New; edges.len()];
    let mut order = Vec::with_capacity(edges.len());

    for root in 0..edges.len() {
        if marks[root] != Mark::New {
            continue;
        }
        // iterative DFS; the stack holds (node, next dependency position)
        let mut stack = vec![(root, 0usize)];
        marks[root] = Mark::Open;
        while let Some(top) = stack.last_mut() {
            let node = top.0;
            let deps = &edges[node].1;
            if top.1 < deps.len() {
                let dep = index[deps[top.1].as_str()];
                top.1 += 1;
                match marks[dep] {
                    Mark::Done => {}
                    Mark::New => {
                        marks[dep] = Mark::Open;
                        stack.push((dep, 0));
                    }
                    Mark::Open => {
                        let start = stack.iter().position(|&(n, _)| n == dep).expect("open node is on stack");
                        let mut uuids: Vec<String> = stack[start..].iter().map(|&(n, _)| edges[n].0.clone()).collect();
                        uuids.push(edges[dep].0.clone());
                        return Err(DocError::Cycle { uuids });
                    }
                }
            } else {
                marks[node] = Mark::Done;
                order.push(edges[node].0.clone());
                stack.pop();
            }
        }
    }
    Ok(order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::doc::{NamespaceTable, TypeDescriptor};
    use proptest::prelude::*;

    fn uuid(i: usize) -> String {
        format!("00000000-0000-4000-8000-{i:012x}")
    }

    fn doc_with(refs: Vec<(String, Vec<String>)>) -> MrdiDocument {
        let mut doc = MrdiDocument::new(NamespaceTable::default(), TypeDescriptor::bare("T"));
        for (k, deps) in refs {
            let data = ValueTree::Array(deps.into_iter().map(ValueTree::Text).collect());
            doc.refs.insert(k, RefEntry::new(TypeDescriptor::bare("R"), Some(data)));
        }
        doc
    }

    #[test]
    fn mentions() {
        assert!(collect_uuid_mentions(&ValueTree::parse(r#"[["1","2"],3]"#).unwrap()).is_empty());
        let deep = format!(r#"{{"a":{{"b":{{"c":{{"d":{{"e":"{}"}}}}}}}},"f":"not-a-uuid"}}"#, uuid(7));
        let m = collect_uuid_mentions(&ValueTree::parse(&deep).unwrap());
        assert_eq!(m.into_iter().collect::<Vec<_>>(), vec![uuid(7)]);
    }

    #[test]
    fn empty_refs() {
        assert!(ref_dependency_order(&doc_with(vec![])).unwrap().is_empty());
    }

    #[test]
    fn self_mention_is_a_cycle() {
        let d = doc_with(vec![(uuid(1), vec![uuid(1)])]);
        assert!(matches!(ref_dependency_order(&d), Err(DocError::Cycle { .. })));
    }

    // A random DAG: node i may only depend on nodes with a larger index,
    // stored in a shuffled insertion order.
    fn arb_dag() -> impl Strategy<Value = Vec<(String, Vec<String>)>> {
        (2usize..50)
            .prop_flat_map(|n| {
                let deps = prop::collection::vec(prop::collection::vec(any::<prop::sample::Index>(), 0..4), n);
                (Just(n), deps, Just((0..n).collect::<Vec<_>>()).prop_shuffle())
            })
            .prop_map(|(n, deps, perm)| {
                perm.into_iter()
                    .map(|i| {
                        let ds = if i + 1 < n {
                            deps[i].iter().map(|ix| uuid(i + 1 + ix.index(n - i - 1))).collect()
                        } else {
                            vec![]
                        };
                        (uuid(i), ds)
                    })
                    .collect()
            })
    }

    proptest! {
        #[test]
        fn order_respects_every_edge(refs in arb_dag()) {
            let doc = doc_with(refs.clone());
            let order = ref_dependency_order(&doc).unwrap();
            prop_assert_eq!(order.len(), refs.len());
            let pos: HashMap<&String, usize> = order.iter().enumerate().map(|(i, u)| (u, i)).collect();
            for (k, deps) in &refs {
                for d in deps {
                    prop_assert!(pos[d] < pos[k], "{} must precede {}", d, k);
                }
            }
        }
    }
}
