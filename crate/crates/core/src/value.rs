//! Generic JSON-shaped tree with exact number text and ordered maps.
//!
//! Numbers are kept as the token text that appeared in the source, so a
//! 200-digit integer survives parse/emit unchanged. Map keys keep insertion
//! order and equality between maps is order-sensitive, which makes emission
//! deterministic.

use std::fmt;

use indexmap::IndexMap;
use thiserror::Error;

/// Maximum nesting depth accepted by the parser.
pub const MAX_DEPTH: usize = 512;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValueTree {
    Null,
    Bool(bool),
    /// Exact JSON number token text.
    Number(String),
    Text(String),
    Array(Vec<ValueTree>),
    Map(Map),
}

/// Ordered string-keyed map.
#[derive(Debug, Clone, Default)]
pub struct Map(IndexMap<String, ValueTree>);

impl PartialEq for Map {
    fn eq(&self, other: &Self) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(other.0.iter()).all(|(a, b)| a == b)
    }
}

impl Eq for Map {}

impl Map {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, key: &str) -> Option<&ValueTree> {
        self.0.get(key)
    }

    pub fn get_mut(&mut self, key: &str) -> Option<&mut ValueTree> {
        self.0.get_mut(key)
    }

    pub fn contains_key(&self, key: &str) -> bool {
        self.0.contains_key(key)
    }

    /// Inserts or replaces; a replaced key keeps its position.
    pub fn insert(&mut self, key: impl Into<String>, value: ValueTree) -> Option<ValueTree> {
        self.0.insert(key.into(), value)
    }

    /// Removes a key, preserving the order of the remaining entries.
    pub fn remove(&mut self, key: &str) -> Option<ValueTree> {
        self.0.shift_remove(key)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &ValueTree)> {
        self.0.iter()
    }

    pub fn iter_mut(&mut self) -> impl Iterator<Item = (&String, &mut ValueTree)> {
        self.0.iter_mut()
    }

    pub fn keys(&self) -> impl Iterator<Item = &String> {
        self.0.keys()
    }

    pub fn values(&self) -> impl Iterator<Item = &ValueTree> {
        self.0.values()
    }

    /// Renames `from` to `to` in place. Returns false when `from` is absent
    /// or `to` already exists.
    pub fn rename_key(&mut self, from: &str, to: &str) -> bool {
        if from == to {
            return self.0.contains_key(from);
        }
        if self.0.contains_key(to) {
            return false;
        }
        match self.0.get_index_of(from) {
            Some(idx) => {
                let (_, v) = self.0.shift_remove_index(idx).expect("index exists");
                self.0.shift_insert(idx, to.to_string(), v);
                true
            }
            None => false,
        }
    }
}

impl<K: Into<String>> FromIterator<(K, ValueTree)> for Map {
    fn from_iter<I: IntoIterator<Item = (K, ValueTree)>>(iter: I) -> Self {
        Map(iter.into_iter().map(|(k, v)| (k.into(), v)).collect())
    }
}

impl IntoIterator for Map {
    type Item = (String, ValueTree);
    type IntoIter = indexmap::map::IntoIter<String, ValueTree>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

/// Output layout for [`ValueTree::emit`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Style {
    Compact,
    /// Two-space indentation, one entry per line.
    #[default]
    Pretty,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("JSON syntax error at line {line}, column {column}: {message}")]
pub struct JsonError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ValueTree {
    pub fn text(s: impl Into<String>) -> Self {
        ValueTree::Text(s.into())
    }

    pub fn parse(input: &str) -> Result<Self, JsonError> {
        let mut p = Parser { src: input.as_bytes(), pos: 0 };
        p.skip_ws();
        let v = p.value(0)?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.error("trailing characters after JSON value"));
        }
        Ok(v)
    }

    pub fn emit(&self, style: Style) -> String {
        let mut out = String::new();
        self.write_to(&mut out, style, 0);
        out
    }

    fn write_to(&self, out: &mut String, style: Style, indent: usize) {
        match self {
            ValueTree::Null => out.push_str("null"),
            ValueTree::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
            ValueTree::Number(n) => out.push_str(n),
            ValueTree::Text(s) => write_string(out, s),
            ValueTree::Array(items) => {
                if items.is_empty() {
                    out.push_str("[]");
                    return;
                }
                out.push('[');
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    newline(out, style, indent + 1);
                    item.write_to(out, style, indent + 1);
                }
                newline(out, style, indent);
                out.push(']');
            }
            ValueTree::Map(map) => {
                if map.is_empty() {
                    out.push_str("{}");
                    return;
                }
                out.push('{');
                for (i, (k, v)) in map.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    newline(out, style, indent + 1);
                    write_string(out, k);
                    out.push(':');
                    if style == Style::Pretty {
                        out.push(' ');
                    }
                    v.write_to(out, style, indent + 1);
                }
                newline(out, style, indent);
                out.push('}');
            }
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            ValueTree::Text(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_array(&self) -> Option<&[ValueTree]> {
        match self {
            ValueTree::Array(a) => Some(a),
            _ => None,
        }
    }

    pub fn as_map(&self) -> Option<&Map> {
        match self {
            ValueTree::Map(m) => Some(m),
            _ => None,
        }
    }

    /// Integer payload text: accepts a string or a bare number token.
    pub fn as_integer_text(&self) -> Option<&str> {
        match self {
            ValueTree::Text(s) | ValueTree::Number(s) => Some(s),
            _ => None,
        }
    }

    /// Name of the JSON type, as used by schema `type`.
    pub fn kind(&self) -> &'static str {
        match self {
            ValueTree::Null => "null",
            ValueTree::Bool(_) => "boolean",
            ValueTree::Number(_) => "number",
            ValueTree::Text(_) => "string",
            ValueTree::Array(_) => "array",
            ValueTree::Map(_) => "object",
        }
    }

    /// Looks up a node by slash-separated path (`""` or `"/"` is the root).
    pub fn pointer(&self, path: &str) -> Option<&ValueTree> {
        let mut cur = self;
        for seg in split_path(path) {
            cur = match cur {
                ValueTree::Map(m) => m.get(&seg)?,
                ValueTree::Array(a) => a.get(seg.parse::<usize>().ok()?)?,
                _ => return None,
            };
        }
        Some(cur)
    }

    pub fn pointer_mut(&mut self, path: &str) -> Option<&mut ValueTree> {
        let mut cur = self;
        for seg in split_path(path) {
            cur = match cur {
                ValueTree::Map(m) => m.get_mut(&seg)?,
                ValueTree::Array(a) => a.get_mut(seg.parse::<usize>().ok()?)?,
                _ => return None,
            };
        }
        Some(cur)
    }

    /// Calls `f` on every node, parents before children.
    pub fn walk<'a>(&'a self, f: &mut dyn FnMut(&'a ValueTree)) {
        f(self);
        match self {
            ValueTree::Array(a) => a.iter().for_each(|v| v.walk(f)),
            ValueTree::Map(m) => m.values().for_each(|v| v.walk(f)),
            _ => {}
        }
    }
}

impl fmt::Display for ValueTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.emit(Style::Compact))
    }
}

impl From<Map> for ValueTree {
    fn from(m: Map) -> Self {
        ValueTree::Map(m)
    }
}

impl From<&str> for ValueTree {
    fn from(s: &str) -> Self {
        ValueTree::Text(s.to_string())
    }
}

impl From<String> for ValueTree {
    fn from(s: String) -> Self {
        ValueTree::Text(s)
    }
}

impl From<bool> for ValueTree {
    fn from(b: bool) -> Self {
        ValueTree::Bool(b)
    }
}

/// Splits a slash-separated path into unescaped segments (`~1` is `/`,
/// `~0` is `~`).
pub fn split_path(path: &str) -> Vec<String> {
    let trimmed = path.strip_prefix('/').unwrap_or(path);
    if trimmed.is_empty() {
        return Vec::new();
    }
    trimmed.split('/').map(|s| s.replace("~1", "/").replace("~0", "~")).collect()
}

/// Appends one segment to a path, escaping as needed.
pub fn join_path(base: &str, segment: &str) -> String {
    let esc = segment.replace('~', "~0").replace('/', "~1");
    if base == "/" || base.is_empty() {
        format!("/{esc}")
    } else {
        format!("{base}/{esc}")
    }
}

fn newline(out: &mut String, style: Style, indent: usize) {
    if style == Style::Pretty {
        out.push('\n');
        for _ in 0..indent {
            out.push_str("  ");
        }
    }
}

fn write_string(out: &mut String, s: &str) {
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            '\u{08}' => out.push_str("\\b"),
            '\u{0c}' => out.push_str("\\f"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> JsonError {
        let upto = &self.src[..self.pos.min(self.src.len())];
        let line = upto.iter().filter(|&&b| b == b'\n').count() + 1;
        let line_start = upto.iter().rposition(|&b| b == b'\n').map_or(0, |i| i + 1);
        let column = String::from_utf8_lossy(&upto[line_start..]).chars().count() + 1;
        JsonError { line, column, message: message.to_string() }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while let Some(b' ' | b'\t' | b'\n' | b'\r') = self.peek() {
            self.pos += 1;
        }
    }

    fn expect(&mut self, b: u8) -> Result<(), JsonError> {
        if self.peek() == Some(b) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected '{}'", b as char)))
        }
    }

    fn literal(&mut self, word: &str, v: ValueTree) -> Result<ValueTree, JsonError> {
        if self.src[self.pos..].starts_with(word.as_bytes()) {
            self.pos += word.len();
            Ok(v)
        } else {
            Err(self.error("invalid literal"))
        }
    }

    fn value(&mut self, depth: usize) -> Result<ValueTree, JsonError> {
        if depth > MAX_DEPTH {
            return Err(self.error("nesting too deep"));
        }
        match self.peek() {
            None => Err(self.error("unexpected end of input")),
            Some(b'{') => self.object(depth),
            Some(b'[') => self.array(depth),
            Some(b'"') => Ok(ValueTree::Text(self.string()?)),
            Some(b't') => self.literal("true", ValueTree::Bool(true)),
            Some(b'f') => self.literal("false", ValueTree::Bool(false)),
            Some(b'n') => self.literal("null", ValueTree::Null),
            Some(b'-' | b'0'..=b'9') => self.number(),
            Some(_) => Err(self.error("unexpected character")),
        }
    }

    fn object(&mut self, depth: usize) -> Result<ValueTree, JsonError> {
        self.expect(b'{')?;
        let mut map = Map::new();
        self.skip_ws();
        if self.peek() == Some(b'}') {
            self.pos += 1;
            return Ok(ValueTree::Map(map));
        }
        loop {
            self.skip_ws();
            if self.peek() != Some(b'"') {
                return Err(self.error("expected object key"));
            }
            let key_pos = self.pos;
            let key = self.string()?;
            self.skip_ws();
            self.expect(b':')?;
            self.skip_ws();
            let v = self.value(depth + 1)?;
            if map.contains_key(&key) {
                self.pos = key_pos;
                return Err(self.error(&format!("duplicate key \"{key}\"")));
            }
            map.insert(key, v);
            self.skip_ws();
            match self.peek() {
                Some(b',') => self.pos += 1,
                Some(b'}') => {
                    self.pos += 1;
                    return Ok(ValueTree::Map(map));
                }
                _ => return Err(self.error("expected ',' or '}'")),
            }
        }
    }

    fn array(&mut self, depth: usize) -> Result<ValueTree, JsonError> {
        self.expect(b'[')?;
        let mut items = Vec::new();
        self.skip_ws();
        if self.peek() == Some(b']') {
            self.pos += 1;
            return Ok(ValueTree::Array(items));
        }
        loop {
            self.skip_ws();
            items.push(self.value(depth + 1)?);
            self.skip_ws();
            match self.peek() {
                Some(b',') => self.pos += 1,
                Some(b']') => {
                    self.pos += 1;
                    return Ok(ValueTree::Array(items));
                }
                _ => return Err(self.error("expected ',' or ']'")),
            }
        }
    }

    fn number(&mut self) -> Result<ValueTree, JsonError> {
        let start = self.pos;
        if self.peek() == Some(b'-') {
            self.pos += 1;
        }
        match self.peek() {
            Some(b'0') => self.pos += 1,
            Some(b'1'..=b'9') => self.digits(),
            _ => return Err(self.error("invalid number")),
        }
        if self.peek() == Some(b'.') {
            self.pos += 1;
            if !matches!(self.peek(), Some(b'0'..=b'9')) {
                return Err(self.error("expected digit after decimal point"));
            }
            self.digits();
        }
        if let Some(b'e' | b'E') = self.peek() {
            self.pos += 1;
            if let Some(b'+' | b'-') = self.peek() {
                self.pos += 1;
            }
            if !matches!(self.peek(), Some(b'0'..=b'9')) {
                return Err(self.error("expected digit in exponent"));
            }
            self.digits();
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        Ok(ValueTree::Number(text.to_string()))
    }

    fn digits(&mut self) {
        while let Some(b'0'..=b'9') = self.peek() {
            self.pos += 1;
        }
    }

    fn hex4(&mut self) -> Result<u32, JsonError> {
        let h = self.src.get(self.pos..self.pos + 4).ok_or_else(|| self.error("truncated \\u escape"))?;
        let s = std::str::from_utf8(h).map_err(|_| self.error("invalid \\u escape"))?;
        let v = u32::from_str_radix(s, 16).map_err(|_| self.error("invalid \\u escape"))?;
        self.pos += 4;
        Ok(v)
    }

    fn string(&mut self) -> Result<String, JsonError> {
        self.expect(b'"')?;
        let mut out = String::new();
        loop {
            let run_start = self.pos;
            while let Some(b) = self.peek() {
                if b == b'"' || b == b'\\' || b < 0x20 {
                    break;
                }
                self.pos += 1;
            }
            let run = std::str::from_utf8(&self.src[run_start..self.pos])
                .map_err(|_| self.error("invalid UTF-8 in string"))?;
            out.push_str(run);
            match self.peek() {
                None => return Err(self.error("unterminated string")),
                Some(b'"') => {
                    self.pos += 1;
                    return Ok(out);
                }
                Some(b'\\') => {
                    self.pos += 1;
                    let esc = self.peek().ok_or_else(|| self.error("unterminated escape"))?;
                    self.pos += 1;
                    match esc {
                        b'"' => out.push('"'),
                        b'\\' => out.push('\\'),
                        b'/' => out.push('/'),
                        b'b' => out.push('\u{08}'),
                        b'f' => out.push('\u{0c}'),
                        b'n' => out.push('\n'),
                        b'r' => out.push('\r'),
                        b't' => out.push('\t'),
                        b'u' => {
                            let hi = self.hex4()?;
                            let cp = if (0xD800..0xDC00).contains(&hi) {
                                if !self.src[self.pos..].starts_with(b"\\u") {
                                    return Err(self.error("unpaired surrogate"));
                                }
                                self.pos += 2;
                                let lo = self.hex4()?;
                                if !(0xDC00..0xE000).contains(&lo) {
                                    return Err(self.error("unpaired surrogate"));
                                }
                                0x10000 + ((hi - 0xD800) << 10) + (lo - 0xDC00)
                            } else {
                                hi
                            };
                            out.push(char::from_u32(cp).ok_or_else(|| self.error("invalid code point"))?);
                        }
                        _ => return Err(self.error("invalid escape")),
                    }
                }
                Some(_) => return Err(self.error("control character in string")),
            }
        }
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn numbers_keep_their_text() {
        let big = format!("-{}", "9".repeat(200));
        let src = format!("[{big}, 1.50, 2e10, 0]");
        let v = ValueTree::parse(&src).unwrap();
        assert_eq!(v.as_array().unwrap()[0], ValueTree::Number(big.clone()));
        assert_eq!(v.emit(Style::Compact), format!("[{big},1.50,2e10,0]"));
    }

    #[test]
    fn pretty_uses_two_spaces() {
        let v = ValueTree::parse(r#"{"a":["x",{}],"b":[]}"#).unwrap();
        assert_eq!(v.emit(Style::Pretty), "{\n  \"a\": [\n    \"x\",\n    {}\n  ],\n  \"b\": []\n}");
    }

    #[test]
    fn rejects_bad_input() {
        for bad in ["", "{", "[1,]", "{\"a\" 1}", "01", "1.", "\"\\x\"", "{\"a\":1,\"a\":2}", "[1] x", "nul"] {
            assert!(ValueTree::parse(bad).is_err(), "accepted {bad:?}");
        }
        let err = ValueTree::parse("{\n  \"a\": 1,\n  \"a\": 2\n}").unwrap_err();
        assert_eq!((err.line, err.column), (3, 3));
    }

    #[test]
    fn escapes_roundtrip() {
        let v = ValueTree::parse(r#""q\"\\\n\u00e9\ud83d\ude00\u0001""#).unwrap();
        assert_eq!(v, ValueTree::text("q\"\\\né😀\u{1}"));
        assert_eq!(ValueTree::parse(&v.emit(Style::Compact)).unwrap(), v);
    }

    #[test]
    fn map_equality_is_order_sensitive() {
        let a = ValueTree::parse(r#"{"x":1,"y":2}"#).unwrap();
        let b = ValueTree::parse(r#"{"y":2,"x":1}"#).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn pointer_paths() {
        let v = ValueTree::parse(r#"{"a/b":[10,{"c":true}]}"#).unwrap();
        assert_eq!(v.pointer("/a~1b/1/c"), Some(&ValueTree::Bool(true)));
        assert_eq!(v.pointer(""), Some(&v));
        assert!(v.pointer("/a~1b/7").is_none());
        assert_eq!(join_path("/", "a/b"), "/a~1b");
        assert_eq!(join_path("/x", "0"), "/x/0");
    }

    #[test]
    fn rename_key_keeps_position() {
        let mut m: Map = [("a", ValueTree::Null), ("b", ValueTree::Null), ("c", ValueTree::Null)].into_iter().collect();
        assert!(m.rename_key("b", "z"));
        assert_eq!(m.keys().cloned().collect::<Vec<_>>(), ["a", "z", "c"]);
        assert!(!m.rename_key("a", "c"));
    }

    pub(crate) fn arb_tree() -> impl Strategy<Value = ValueTree> {
        let leaf = prop_oneof![
            Just(ValueTree::Null),
            any::<bool>().prop_map(ValueTree::Bool),
            "-?(0|[1-9][0-9]{0,40})(\\.[0-9]{1,5})?".prop_map(ValueTree::Number),
            any::<String>().prop_map(ValueTree::Text),
        ];
        leaf.prop_recursive(5, 64, 6, |inner| {
            prop_oneof![
                prop::collection::vec(inner.clone(), 0..6).prop_map(ValueTree::Array),
                prop::collection::btree_map("[a-z_]{1,6}", inner, 0..6)
                    .prop_map(|m| ValueTree::Map(m.into_iter().collect())),
            ]
        })
    }

    proptest! {
        #[test]
        fn parse_emit_identity(t in arb_tree()) {
            for style in [Style::Compact, Style::Pretty] {
                let text = t.emit(style);
                let back = ValueTree::parse(&text).unwrap();
                prop_assert_eq!(&back, &t);
                prop_assert_eq!(back.emit(style), text);
            }
        }
    }
}
