//! Saving [`AlgebraValue`]s to documents and loading them back.
//!
//! A [`Session`] binds ring objects to UUIDs. Saving a value whose parent
//! ring is already bound reuses the UUID; loading a document whose `_refs`
//! mention a bound UUID returns the existing ring object. This is what lets
//! two files written in one session be recombined in another.

mod codec;

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use indexmap::IndexMap;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::algebra::{ring_equals, AlgebraError, AlgebraValue, Ring, RingElem, RingKind};
use crate::compress;
use crate::doc::{is_uuid, DocError, MrdiDocument, NamespaceTable, RefEntry, TypeDescriptor};
use crate::refs::ref_dependency_order;
use crate::value::{join_path, Style, ValueTree};

pub use codec::builtin_codecs;

pub const DEFAULT_NAMESPACE: &str = "Oscar";
pub const DEFAULT_URL: &str = "https://github.com/oscar-system/Oscar.jl";
pub const DEFAULT_VERSION: &str = "0.13.0-DEV";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SessionError {
    #[error(transparent)]
    Doc(#[from] DocError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("no codec registered for type \"{0}\"")]
    UnregisteredType(String),
    #[error("a codec for \"{0}\" is already registered")]
    DuplicateCodec(String),
    #[error("document does not declare namespace \"{0}\" in _ns")]
    MissingNamespace(String),
    #[error("{0}; heterogeneous collections require a Tuple")]
    Heterogeneous(String),
    #[error("cannot save an empty {0}: the entry type is unknown; use a Tuple")]
    EmptyCollection(&'static str),
    #[error("{path}: {message}")]
    Malformed { path: String, message: String },
    #[error("UUID {uuid} is already bound to a different ring in this session: {message}")]
    UuidConflict { uuid: String, message: String },
    #[error("compression: {0}")]
    Compression(String),
}

/// Where fresh UUIDs come from.
pub enum UuidSource {
    /// Random version-4 UUIDs from the operating system.
    #[cfg(feature = "os-rng")]
    Random,
    /// Reproducible version-4 UUIDs from a seeded generator.
    Seeded(Box<ChaCha8Rng>),
}

impl UuidSource {
    pub fn seeded(seed: u64) -> Self {
        UuidSource::Seeded(Box::new(ChaCha8Rng::seed_from_u64(seed)))
    }

    fn next(&mut self) -> String {
        let id = match self {
            #[cfg(feature = "os-rng")]
            UuidSource::Random => uuid::Uuid::new_v4(),
            UuidSource::Seeded(rng) => {
                let mut bytes = [0u8; 16];
                rng.fill_bytes(&mut bytes);
                uuid::Builder::from_random_bytes(bytes).into_uuid()
            }
        };
        id.hyphenated().to_string()
    }
}

impl fmt::Debug for UuidSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            #[cfg(feature = "os-rng")]
            UuidSource::Random => f.write_str("Random"),
            UuidSource::Seeded(_) => f.write_str("Seeded"),
        }
    }
}

/// A type descriptor with its parameters resolved to live objects.
#[derive(Debug, Clone)]
pub struct ResolvedType {
    pub name: String,
    pub params: Params,
}

#[derive(Debug, Clone)]
pub enum Params {
    None,
    /// Parent ring of an element type, or the ring itself for a ring
    /// referenced by UUID.
    Ring(Ring),
    /// Shared entry type of a Vector or Matrix.
    Entry(Box<ResolvedType>),
    /// Per-entry types of a Tuple.
    Entries(Vec<ResolvedType>),
    /// Unresolved parameters, for custom codecs.
    Tree(ValueTree),
}

/// Serialization hooks for one type name.
///
/// `decode_data(encode_data(v))` must give back a value equal to `v`.
pub trait Codec: Send + Sync {
    fn type_name(&self) -> &str;

    /// Type parameters of `value`; `None` gives a bare type name.
    fn encode_params(&self, value: &AlgebraValue, cx: &mut SaveContext<'_>) -> Result<Option<ValueTree>, SessionError>;

    /// The `data` payload; `None` omits the key.
    fn encode_data(&self, value: &AlgebraValue, cx: &mut SaveContext<'_>) -> Result<Option<ValueTree>, SessionError>;

    fn decode_params(&self, params: Option<&ValueTree>, cx: &mut LoadContext<'_>) -> Result<Params, SessionError>;

    fn decode_data(
        &self,
        params: &Params,
        data: Option<&ValueTree>,
        cx: &mut LoadContext<'_>,
    ) -> Result<AlgebraValue, SessionError>;
}

/// UUID bindings and codecs for one save/load session.
pub struct Session {
    namespace: (String, String, String),
    uuids: UuidSource,
    uuid_of: HashMap<usize, String>,
    ring_of: HashMap<String, Ring>,
    /// Inline leaf rings by compact encoding, so that repeated loads of
    /// `GF(7)` give one object.
    leaves: HashMap<String, Ring>,
    codecs: IndexMap<String, Arc<dyn Codec>>,
    aliases: HashMap<String, String>,
}

impl fmt::Debug for Session {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Session")
            .field("namespace", &self.namespace)
            .field("uuids", &self.uuids)
            .field("bound", &self.ring_of.len())
            .field("codecs", &self.codecs.keys().collect::<Vec<_>>())
            .finish()
    }
}

#[cfg(feature = "os-rng")]
impl Default for Session {
    fn default() -> Self {
        Self::new()
    }
}

impl Session {
    /// A session with random UUIDs and all built-in codecs.
    #[cfg(feature = "os-rng")]
    pub fn new() -> Self {
        Self::with_uuid_source(UuidSource::Random)
    }

    /// A session whose UUIDs are a deterministic function of `seed`.
    pub fn seeded(seed: u64) -> Self {
        Self::with_uuid_source(UuidSource::seeded(seed))
    }

    pub fn with_uuid_source(uuids: UuidSource) -> Self {
        let mut s = Self::empty(uuids);
        for c in builtin_codecs() {
            s.register_codec(c).expect("built-in names are distinct");
        }
        s.aliases.insert("Nemo.fpField".into(), "fpField".into());
        s.aliases.insert("Nemo.fpFieldElem".into(), "fpFieldElem".into());
        s
    }

    /// A session without any codecs.
    pub fn empty(uuids: UuidSource) -> Self {
        Session {
            namespace: (DEFAULT_NAMESPACE.into(), DEFAULT_URL.into(), DEFAULT_VERSION.into()),
            uuids,
            uuid_of: HashMap::new(),
            ring_of: HashMap::new(),
            leaves: HashMap::new(),
            codecs: IndexMap::new(),
            aliases: HashMap::new(),
        }
    }

    pub fn namespace(&self) -> (&str, &str, &str) {
        (&self.namespace.0, &self.namespace.1, &self.namespace.2)
    }

    pub fn set_namespace(&mut self, name: &str, url: &str, version: &str) {
        self.namespace = (name.into(), url.into(), version.into());
    }

    pub fn register_codec(&mut self, codec: Arc<dyn Codec>) -> Result<(), SessionError> {
        let name = codec.type_name().to_string();
        if self.codecs.contains_key(&name) || self.aliases.contains_key(&name) {
            return Err(SessionError::DuplicateCodec(name));
        }
        self.codecs.insert(name, codec);
        Ok(())
    }

    pub fn codec_names(&self) -> impl Iterator<Item = &str> {
        self.codecs.keys().map(String::as_str)
    }

    fn codec(&self, name: &str) -> Result<Arc<dyn Codec>, SessionError> {
        let name = self.aliases.get(name).map_or(name, String::as_str);
        self.codecs.get(name).cloned().ok_or_else(|| SessionError::UnregisteredType(name.to_string()))
    }

    pub fn uuid_of(&self, ring: &Ring) -> Option<&str> {
        self.uuid_of.get(&ring.identity()).map(String::as_str)
    }

    pub fn ring_of(&self, uuid: &str) -> Option<&Ring> {
        self.ring_of.get(uuid)
    }

    pub fn bound_count(&self) -> usize {
        self.ring_of.len()
    }

    fn bind(&mut self, uuid: &str, ring: &Ring) {
        debug_assert!(!self.ring_of.contains_key(uuid));
        self.uuid_of.insert(ring.identity(), uuid.to_string());
        self.ring_of.insert(uuid.to_string(), ring.clone());
    }

    fn uuid_for(&mut self, ring: &Ring) -> String {
        if let Some(u) = self.uuid_of.get(&ring.identity()) {
            return u.clone();
        }
        let mut u = self.uuids.next();
        while self.ring_of.contains_key(&u) {
            u = self.uuids.next();
        }
        self.bind(&u, ring);
        u
    }

    fn header(&self) -> NamespaceTable {
        NamespaceTable::single(&self.namespace.0, &self.namespace.1, &self.namespace.2)
    }

    /// Serializes `value` with every ring it depends on in `_refs`.
    pub fn save(&mut self, value: &AlgebraValue) -> Result<MrdiDocument, SessionError> {
        let mut cx = SaveContext { session: self, refs: IndexMap::new(), depth: 0 };
        let type_desc = cx.type_descriptor(value)?;
        let data = cx.encode_data(value)?;
        let refs = std::mem::take(&mut cx.refs);
        let mut doc = MrdiDocument::new(self.header(), type_desc);
        if let AlgebraValue::Ring(r) = value {
            if is_parametric(r) {
                doc.id = Some(self.uuid_for(r));
            }
        }
        doc.data = data;
        doc.refs = refs.into_iter().map(|(k, v)| (k, v.expect("reserved slots are filled"))).collect();
        Ok(doc)
    }

    /// Saves entries of possibly different types and parents.
    pub fn save_tuple(&mut self, entries: &[AlgebraValue]) -> Result<MrdiDocument, SessionError> {
        self.save(&AlgebraValue::Tuple(entries.to_vec()))
    }

    pub fn save_string(&mut self, value: &AlgebraValue, style: Style) -> Result<String, SessionError> {
        Ok(self.save(value)?.emit(style))
    }

    /// Reconstructs the value of `doc`, reusing rings whose UUIDs are
    /// already bound.
    pub fn load(&mut self, doc: &MrdiDocument) -> Result<AlgebraValue, SessionError> {
        let name = &self.namespace.0;
        if doc.ns.get(name).is_none() {
            return Err(SessionError::MissingNamespace(name.clone()));
        }
        let expanded;
        let doc = if compress::contains_compressed(doc) {
            expanded = compress::decompress_all(doc).map_err(|e| SessionError::Compression(e.to_string()))?;
            &expanded
        } else {
            doc
        };
        let order = ref_dependency_order(doc)?;
        for uuid in &order {
            let entry = &doc.refs[uuid];
            let path = join_path("/_refs", uuid);
            self.load_ref(uuid, entry, &path)?;
        }
        let mut cx = LoadContext { session: self, path: String::new() };
        let value = cx.decode_value(&doc.type_desc, doc.data.as_ref())?;
        match (&doc.id, value) {
            (Some(id), AlgebraValue::Ring(r)) => Ok(AlgebraValue::Ring(self.bind_or_reuse(id, r, "/id")?)),
            (Some(_), _) => {
                Err(SessionError::Malformed { path: "/id".into(), message: "only ring documents carry an id".into() })
            }
            (None, AlgebraValue::Ring(r)) if !is_parametric(&r) => Ok(AlgebraValue::Ring(self.intern_leaf(r)?)),
            (None, v) => Ok(v),
        }
    }

    pub fn load_str(&mut self, text: &str) -> Result<AlgebraValue, SessionError> {
        let doc = crate::doc::parse_document(text)?;
        self.load(&doc)
    }

    fn load_ref(&mut self, uuid: &str, entry: &RefEntry, path: &str) -> Result<(), SessionError> {
        let mut cx = LoadContext { session: self, path: path.to_string() };
        let value = cx.decode_value(&entry.type_desc, entry.data.as_ref())?;
        let ring = match value {
            AlgebraValue::Ring(r) => r,
            other => {
                return Err(SessionError::Malformed {
                    path: path.to_string(),
                    message: format!("reference entries must be rings, found {}", other.type_name()),
                })
            }
        };
        self.bind_or_reuse(uuid, ring, path)?;
        Ok(())
    }

    fn bind_or_reuse(&mut self, uuid: &str, ring: Ring, path: &str) -> Result<Ring, SessionError> {
        if !is_uuid(uuid) {
            return Err(DocError::InvalidUuid { path: path.to_string(), value: uuid.to_string() }.into());
        }
        if let Some(existing) = self.ring_of.get(uuid) {
            if !ring_equals(existing, &ring) {
                return Err(SessionError::UuidConflict {
                    uuid: uuid.to_string(),
                    message: format!("bound to {existing}, document describes {ring}"),
                });
            }
            return Ok(existing.clone());
        }
        if let Some(other) = self.uuid_of.get(&ring.identity()) {
            // a freshly decoded ring is never bound yet; this guards custom codecs
            return Err(SessionError::UuidConflict {
                uuid: uuid.to_string(),
                message: format!("ring {ring} is already bound to {other}"),
            });
        }
        self.bind(uuid, &ring);
        Ok(ring)
    }

    fn intern_leaf(&mut self, ring: Ring) -> Result<Ring, SessionError> {
        let key = SaveContext { session: self, refs: IndexMap::new(), depth: 1 }.leaf_key(&ring)?;
        Ok(self.leaves.entry(key).or_insert(ring).clone())
    }
}

/// Rings stored in `_refs` under a UUID. Leaf rings are written inline.
pub fn is_parametric(ring: &Ring) -> bool {
    matches!(ring.kind(), RingKind::Poly(_) | RingKind::Fq(_) | RingKind::MPoly(_))
}

/// State of one `save` call, handed to codecs.
pub struct SaveContext<'s> {
    session: &'s mut Session,
    /// Reserved in pre-order, so a ref precedes the refs it mentions.
    refs: IndexMap<String, Option<RefEntry>>,
    depth: usize,
}

impl SaveContext<'_> {
    /// True while encoding something other than the top-level value.
    pub fn is_nested(&self) -> bool {
        self.depth > 0
    }

    /// A UUID for a parametric ring, adding it to `_refs`; the inline
    /// `{"_type", "data"}` form for a leaf ring.
    pub fn ring_ref(&mut self, ring: &Ring) -> Result<ValueTree, SessionError> {
        if !is_parametric(ring) {
            return self.inline_ring(ring);
        }
        let uuid = self.session.uuid_for(ring);
        if !self.refs.contains_key(&uuid) {
            self.refs.insert(uuid.clone(), None);
            let value = AlgebraValue::Ring(ring.clone());
            let codec = self.session.codec(ring.type_name())?;
            // the body of a ref is the ring's own description, not a back-reference
            let saved = std::mem::replace(&mut self.depth, 0);
            let data = codec.encode_data(&value, self);
            self.depth = saved;
            let entry = RefEntry::new(TypeDescriptor::bare(ring.type_name()), data?);
            self.refs.insert(uuid.clone(), Some(entry));
        }
        Ok(ValueTree::Text(uuid))
    }

    fn inline_ring(&mut self, ring: &Ring) -> Result<ValueTree, SessionError> {
        let value = AlgebraValue::Ring(ring.clone());
        let codec = self.session.codec(ring.type_name())?;
        let mut m = crate::value::Map::new();
        m.insert(crate::doc::KEY_TYPE, ValueTree::text(ring.type_name()));
        if let Some(d) = codec.encode_data(&value, self)? {
            m.insert(crate::doc::KEY_DATA, d);
        }
        let key = ValueTree::Map(m.clone()).emit(Style::Compact);
        self.session.leaves.entry(key).or_insert_with(|| ring.clone());
        Ok(ValueTree::Map(m))
    }

    fn leaf_key(&mut self, ring: &Ring) -> Result<String, SessionError> {
        Ok(self.inline_ring(ring)?.emit(Style::Compact))
    }

    /// Type descriptor of a nested value.
    pub fn type_descriptor(&mut self, value: &AlgebraValue) -> Result<TypeDescriptor, SessionError> {
        let codec = self.session.codec(value.type_name())?;
        let params = codec.encode_params(value, self)?;
        Ok(TypeDescriptor { name: codec.type_name().to_string(), params })
    }

    /// Data payload of a nested value.
    pub fn encode_data(&mut self, value: &AlgebraValue) -> Result<Option<ValueTree>, SessionError> {
        let codec = self.session.codec(value.type_name())?;
        codec.encode_data(value, self)
    }

    /// Runs `f` one level below the current value.
    pub fn nested<T>(&mut self, f: impl FnOnce(&mut Self) -> T) -> T {
        self.depth += 1;
        let out = f(self);
        self.depth -= 1;
        out
    }

    /// Payload of a ring element as it appears inside a larger element.
    pub fn encode_elem(&mut self, e: &RingElem) -> Result<ValueTree, SessionError> {
        let v = AlgebraValue::Elem(e.clone());
        Ok(self.nested(|cx| cx.encode_data(&v))?.unwrap_or(ValueTree::Null))
    }
}

/// State of one `load` call, handed to codecs.
pub struct LoadContext<'s> {
    session: &'s mut Session,
    path: String,
}

impl LoadContext<'_> {
    pub fn path(&self) -> &str {
        if self.path.is_empty() {
            "/"
        } else {
            &self.path
        }
    }

    pub fn malformed(&self, message: impl Into<String>) -> SessionError {
        SessionError::Malformed { path: self.path().to_string(), message: message.into() }
    }

    /// Runs `f` with `segment` appended to the error path.
    pub fn at<T>(
        &mut self,
        segment: &str,
        f: impl FnOnce(&mut Self) -> Result<T, SessionError>,
    ) -> Result<T, SessionError> {
        let saved = self.path.clone();
        self.path = join_path(&self.path, segment);
        let out = f(self);
        self.path = saved;
        out
    }

    /// A ring from a UUID already bound in the session, or from an inline
    /// leaf-ring description.
    pub fn resolve_ring(&mut self, tree: &ValueTree) -> Result<Ring, SessionError> {
        match tree {
            ValueTree::Text(u) if is_uuid(u) => {
                self.session.ring_of.get(u).cloned().ok_or_else(|| self.malformed(format!("UUID {u} is not bound")))
            }
            ValueTree::Map(m) => {
                let desc = TypeDescriptor::from_tree(
                    m.get(crate::doc::KEY_TYPE).ok_or_else(|| self.malformed("inline ring without \"_type\""))?,
                    &join_path(self.path(), "_type"),
                )?;
                let value = self.decode_value(&desc, m.get(crate::doc::KEY_DATA))?;
                match value {
                    AlgebraValue::Ring(r) if !is_parametric(&r) => self.session.intern_leaf(r),
                    AlgebraValue::Ring(r) => Ok(r),
                    other => Err(self.malformed(format!("expected a ring, found {}", other.type_name()))),
                }
            }
            other => Err(self.malformed(format!("expected a ring UUID or inline ring, found {}", other.kind()))),
        }
    }

    pub fn resolve_type(&mut self, desc: &TypeDescriptor) -> Result<ResolvedType, SessionError> {
        let codec = self.session.codec(&desc.name)?;
        let params = self.at("params", |cx| codec.decode_params(desc.params.as_ref(), cx))?;
        Ok(ResolvedType { name: codec.type_name().to_string(), params })
    }

    pub fn decode_type(&mut self, tree: &ValueTree) -> Result<ResolvedType, SessionError> {
        let desc = TypeDescriptor::from_tree(tree, self.path())?;
        self.resolve_type(&desc)
    }

    pub fn decode_with(&mut self, ty: &ResolvedType, data: Option<&ValueTree>) -> Result<AlgebraValue, SessionError> {
        let codec = self.session.codec(&ty.name)?;
        codec.decode_data(&ty.params, data, self)
    }

    pub fn decode_value(
        &mut self,
        desc: &TypeDescriptor,
        data: Option<&ValueTree>,
    ) -> Result<AlgebraValue, SessionError> {
        let ty = self.at("_type", |cx| cx.resolve_type(desc))?;
        self.at("data", |cx| cx.decode_with(&ty, data))
    }

    /// An element of `ring` from its payload.
    pub fn decode_elem(&mut self, ring: &Ring, tree: &ValueTree) -> Result<RingElem, SessionError> {
        let ty = ResolvedType { name: ring.elem_type_name().to_string(), params: Params::Ring(ring.clone()) };
        match self.decode_with(&ty, Some(tree))? {
            AlgebraValue::Elem(e) => Ok(e),
            other => Err(self.malformed(format!("expected an element, found {}", other.type_name()))),
        }
    }
}

#[cfg(test)]
mod tests;
