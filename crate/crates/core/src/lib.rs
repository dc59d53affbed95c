//! Reading, writing, validating and upgrading `.mrdi` documents.
//!
//! A document is a JSON tree with a namespace header (`_ns`), a possibly
//! parametric type descriptor (`_type`), a payload (`data`) and a global
//! table of referenced objects keyed by UUID (`_refs`). [`session::Session`]
//! turns values of the [`algebra`] kernel into documents and back, keeping
//! ring identities stable across files through their UUIDs.

pub mod algebra;
pub mod compress;
pub mod doc;
pub mod inspect;
pub mod migrate;
pub mod refs;
pub mod schema;
pub mod session;
pub mod value;

pub use doc::{emit_document, parse_document, DocError, MrdiDocument, TypeDescriptor};
pub use schema::{builtin_mrdi_schema, compile_schema, Schema, Violation};
pub use session::{Session, SessionError, UuidSource};
pub use value::{Style, ValueTree};
