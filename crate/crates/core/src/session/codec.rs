use std::collections::HashSet;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::{is_parametric, Codec, LoadContext, Params, ResolvedType, SaveContext, SessionError};
use crate::algebra::{
    integers, make_fq_field_lenient, make_mpoly_ring, make_poly_ring, make_prime_field, rationals, AlgebraValue,
    Matrix, Ring, RingElem, RingKind, Value,
};
use crate::doc::{TypeDescriptor, KEY_DATA, KEY_TYPE};
use crate::value::{Map, ValueTree};

/// The fourteen codecs every session starts with.
pub fn builtin_codecs() -> Vec<Arc<dyn Codec>> {
    vec![
        Arc::new(QQFieldCodec),
        Arc::new(ZZElemCodec),
        Arc::new(QQElemCodec),
        Arc::new(FpFieldCodec),
        Arc::new(FpElemCodec),
        Arc::new(RingCodec(RingSort::Poly)),
        Arc::new(PolyElemCodec),
        Arc::new(RingCodec(RingSort::Fq)),
        Arc::new(FqElemCodec),
        Arc::new(RingCodec(RingSort::MPoly)),
        Arc::new(MPolyElemCodec),
        Arc::new(VectorCodec),
        Arc::new(TupleCodec),
        Arc::new(MatrixCodec),
    ]
}

fn text(s: impl ToString) -> ValueTree {
    ValueTree::Text(s.to_string())
}

fn is_integer_text(s: &str) -> bool {
    let digits = s.strip_prefix('-').unwrap_or(s);
    !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
}

fn int(cx: &LoadContext<'_>, tree: &ValueTree) -> Result<BigInt, SessionError> {
    match tree.as_integer_text() {
        Some(s) if is_integer_text(s) => Ok(s.parse().expect("checked digits")),
        _ => Err(cx.malformed(format!("expected an integer, found {tree}"))),
    }
}

fn nonneg(cx: &LoadContext<'_>, tree: &ValueTree) -> Result<BigUint, SessionError> {
    let n = int(cx, tree)?;
    n.to_biguint().ok_or_else(|| cx.malformed(format!("expected a non-negative integer, found {n}")))
}

fn array<'t>(cx: &LoadContext<'_>, tree: Option<&'t ValueTree>) -> Result<&'t [ValueTree], SessionError> {
    match tree {
        Some(ValueTree::Array(a)) => Ok(a),
        Some(other) => Err(cx.malformed(format!("expected an array, found {}", other.kind()))),
        None => Err(cx.malformed("missing data")),
    }
}

/// `[key, value]` pairs used by every polynomial encoding.
fn pair<'t>(cx: &LoadContext<'_>, tree: &'t ValueTree) -> Result<(&'t ValueTree, &'t ValueTree), SessionError> {
    match tree.as_array() {
        Some([k, v]) => Ok((k, v)),
        _ => Err(cx.malformed("expected a two-element term")),
    }
}

fn no_params(cx: &LoadContext<'_>, params: Option<&ValueTree>) -> Result<Params, SessionError> {
    match params {
        None => Ok(Params::None),
        Some(_) => Err(cx.malformed("this type takes no parameters")),
    }
}

fn parent_param(cx: &mut LoadContext<'_>, params: Option<&ValueTree>) -> Result<Params, SessionError> {
    match params {
        Some(t) => Ok(Params::Ring(cx.resolve_ring(t)?)),
        None => Err(cx.malformed("missing parent ring parameter")),
    }
}

fn parent_of<'p>(
    cx: &LoadContext<'_>,
    params: &'p Params,
    check: fn(&Ring) -> bool,
    what: &str,
) -> Result<&'p Ring, SessionError> {
    match params {
        Params::Ring(r) if check(r) => Ok(r),
        Params::Ring(r) => Err(cx.malformed(format!("parent {r} is not {what}"))),
        _ => Err(cx.malformed("missing parent ring parameter")),
    }
}

fn elem<'v>(value: &'v AlgebraValue, name: &str) -> Result<&'v RingElem, SessionError> {
    value.as_elem().ok_or_else(|| SessionError::UnregisteredType(format!("{} as {name}", value.type_name())))
}

fn ring<'v>(value: &'v AlgebraValue, name: &str) -> Result<&'v Ring, SessionError> {
    value.as_ring().ok_or_else(|| SessionError::UnregisteredType(format!("{} as {name}", value.type_name())))
}

struct QQFieldCodec;

impl Codec for QQFieldCodec {
    fn type_name(&self) -> &str {
        "QQField"
    }

    fn encode_params(&self, _: &AlgebraValue, _: &mut SaveContext<'_>) -> Result<Option<ValueTree>, SessionError> {
        Ok(None)
    }

    fn encode_data(&self, _: &AlgebraValue, _: &mut SaveContext<'_>) -> Result<Option<ValueTree>, SessionError> {
        Ok(None)
    }

    fn decode_params(&self, params: Option<&ValueTree>, cx: &mut LoadContext<'_>) -> Result<Params, SessionError> {
        no_params(cx, params)
    }

    fn decode_data(
        &self,
        _: &Params,
        _: Option<&ValueTree>,
        _: &mut LoadContext<'_>,
    ) -> Result<AlgebraValue, SessionError> {
        Ok(AlgebraValue::Ring(rationals()))
    }
}

struct ZZElemCodec;

impl Codec for ZZElemCodec {
    fn type_name(&self) -> &str {
        "ZZRingElem"
    }

    fn encode_params(&self, _: &AlgebraValue, _: &mut SaveContext<'_>) -> Result<Option<ValueTree>, SessionError> {
        Ok(None)
    }

    fn encode_data(&self, v: &AlgebraValue, _: &mut SaveContext<'_>) -> Result<Option<ValueTree>, SessionError> {
        let e = elem(v, self.type_name())?;
        Ok(Some(text(e.as_integer().expect("integer element"))))
    }

    fn decode_params(&self, params: Option<&ValueTree>, cx: &mut LoadContext<'_>) -> Result<Params, SessionError> {
        no_params(cx, params)
    }

    fn decode_data(
        &self,
        _: &Params,
        data: Option<&ValueTree>,
        cx: &mut LoadContext<'_>,
    ) -> Result<AlgebraValue, SessionError> {
        let t = data.ok_or_else(|| cx.malformed("missing data"))?;
        Ok(integers().from_bigint(&int(cx, t)?).into())
    }
}

struct QQElemCodec;

impl Codec for QQElemCodec {
    fn type_name(&self) -> &str {
        "QQFieldElem"
    }

    fn encode_params(&self, _: &AlgebraValue, _: &mut SaveContext<'_>) -> Result<Option<ValueTree>, SessionError> {
        Ok(None)
    }

    fn encode_data(&self, v: &AlgebraValue, _: &mut SaveContext<'_>) -> Result<Option<ValueTree>, SessionError> {
        Ok(Some(text(elem(v, self.type_name())?)))
    }

    fn decode_params(&self, params: Option<&ValueTree>, cx: &mut LoadContext<'_>) -> Result<Params, SessionError> {
        no_params(cx, params)
    }

    fn decode_data(
        &self,
        _: &Params,
        data: Option<&ValueTree>,
        cx: &mut LoadContext<'_>,
    ) -> Result<AlgebraValue, SessionError> {
        let t = data.ok_or_else(|| cx.malformed("missing data"))?;
        let s = t.as_integer_text().ok_or_else(|| cx.malformed(format!("expected a rational, found {t}")))?;
        let (n, d) = match s.split_once("//") {
            Some((n, d)) if is_integer_text(n) && is_integer_text(d) => (n, d),
            None if is_integer_text(s) => (s, "1"),
            _ => return Err(cx.malformed(format!("\"{s}\" is not of the form n or n//d"))),
        };
        let d: BigInt = d.parse().expect("checked digits");
        if d.is_zero() {
            return Err(cx.malformed("zero denominator"));
        }
        let q = BigRational::new(n.parse().expect("checked digits"), d);
        Ok(rationals().from_rational(q)?.into())
    }
}

struct FpFieldCodec;

impl Codec for FpFieldCodec {
    fn type_name(&self) -> &str {
        "fpField"
    }

    fn encode_params(&self, _: &AlgebraValue, _: &mut SaveContext<'_>) -> Result<Option<ValueTree>, SessionError> {
        Ok(None)
    }

    fn encode_data(&self, v: &AlgebraValue, _: &mut SaveContext<'_>) -> Result<Option<ValueTree>, SessionError> {
        let r = ring(v, self.type_name())?;
        Ok(Some(text(r.as_prime().expect("prime field").modulus())))
    }

    fn decode_params(&self, params: Option<&ValueTree>, cx: &mut LoadContext<'_>) -> Result<Params, SessionError> {
        no_params(cx, params)
    }

    fn decode_data(
        &self,
        _: &Params,
        data: Option<&ValueTree>,
        cx: &mut LoadContext<'_>,
    ) -> Result<AlgebraValue, SessionError> {
        let t = data.ok_or_else(|| cx.malformed("missing modulus"))?;
        let p = cx.at("data", |cx| nonneg(cx, t))?;
        let r = make_prime_field(p)?;
        Ok(AlgebraValue::Ring(cx.session.intern_leaf(r)?))
    }
}

struct FpElemCodec;

impl Codec for FpElemCodec {
    fn type_name(&self) -> &str {
        "fpFieldElem"
    }

    fn encode_params(&self, v: &AlgebraValue, cx: &mut SaveContext<'_>) -> Result<Option<ValueTree>, SessionError> {
        Ok(Some(cx.ring_ref(elem(v, self.type_name())?.parent())?))
    }

    fn encode_data(&self, v: &AlgebraValue, _: &mut SaveContext<'_>) -> Result<Option<ValueTree>, SessionError> {
        Ok(Some(text(elem(v, self.type_name())?.as_prime_residue().expect("prime field element"))))
    }

    fn decode_params(&self, params: Option<&ValueTree>, cx: &mut LoadContext<'_>) -> Result<Params, SessionError> {
        parent_param(cx, params)
    }

    fn decode_data(
        &self,
        params: &Params,
        data: Option<&ValueTree>,
        cx: &mut LoadContext<'_>,
    ) -> Result<AlgebraValue, SessionError> {
        let r = parent_of(cx, params, |r| r.as_prime().is_some(), "a prime field")?;
        let t = data.ok_or_else(|| cx.malformed("missing data"))?;
        let k = nonneg(cx, t)?;
        let p = r.as_prime().expect("checked").modulus();
        if &k >= p {
            return Err(cx.malformed(format!("residue {k} is not in [0, {p})")));
        }
        Ok(RingElem::from_parts(r.clone(), Value::Fp(k)).into())
    }
}

#[derive(Clone, Copy)]
enum RingSort {
    Poly,
    Fq,
    MPoly,
}

/// PolyRing, fqPolyRepField and MPolyRing. At the top level and in
/// `_refs` the data holds the construction; nested inside a collection
/// the ring is written as a UUID parameter without data.
struct RingCodec(RingSort);

impl RingCodec {
    fn matches(&self, r: &Ring) -> bool {
        matches!(
            (self.0, r.kind()),
            (RingSort::Poly, RingKind::Poly(_))
                | (RingSort::Fq, RingKind::Fq(_))
                | (RingSort::MPoly, RingKind::MPoly(_))
        )
    }

    fn symbols(cx: &LoadContext<'_>, m: &Map) -> Result<Vec<String>, SessionError> {
        let syms =
            m.get("symbols").and_then(ValueTree::as_array).ok_or_else(|| cx.malformed("missing \"symbols\" array"))?;
        syms.iter()
            .map(|s| s.as_str().map(str::to_string).ok_or_else(|| cx.malformed("symbols must be strings")))
            .collect()
    }
}

impl Codec for RingCodec {
    fn type_name(&self) -> &str {
        match self.0 {
            RingSort::Poly => "PolyRing",
            RingSort::Fq => "fqPolyRepField",
            RingSort::MPoly => "MPolyRing",
        }
    }

    fn encode_params(&self, v: &AlgebraValue, cx: &mut SaveContext<'_>) -> Result<Option<ValueTree>, SessionError> {
        let r = ring(v, self.type_name())?;
        if cx.is_nested() && is_parametric(r) {
            Ok(Some(cx.ring_ref(r)?))
        } else {
            Ok(None)
        }
    }

    fn encode_data(&self, v: &AlgebraValue, cx: &mut SaveContext<'_>) -> Result<Option<ValueTree>, SessionError> {
        let r = ring(v, self.type_name())?;
        if cx.is_nested() {
            return Ok(None);
        }
        let mut m = Map::new();
        match r.kind() {
            RingKind::Poly(p) => {
                m.insert("base_ring", cx.ring_ref(p.base_ring())?);
                m.insert("symbols", ValueTree::Array(vec![text(p.symbol())]));
            }
            RingKind::MPoly(p) => {
                m.insert("base_ring", cx.ring_ref(p.base_ring())?);
                m.insert("symbols", ValueTree::Array(p.symbols().iter().map(text).collect()));
            }
            RingKind::Fq(f) => {
                let def_pol = AlgebraValue::Elem(f.def_pol().clone());
                let (desc, data) =
                    cx.nested(|cx| Ok::<_, SessionError>((cx.type_descriptor(&def_pol)?, cx.encode_data(&def_pol)?)))?;
                let mut inner = Map::new();
                inner.insert(KEY_TYPE, desc.to_tree());
                if let Some(d) = data {
                    inner.insert(KEY_DATA, d);
                }
                m.insert("def_pol", ValueTree::Map(inner));
            }
            _ => return Err(SessionError::UnregisteredType(r.type_name().into())),
        }
        Ok(Some(ValueTree::Map(m)))
    }

    fn decode_params(&self, params: Option<&ValueTree>, cx: &mut LoadContext<'_>) -> Result<Params, SessionError> {
        match params {
            None => Ok(Params::None),
            Some(t) => {
                let r = cx.resolve_ring(t)?;
                if !self.matches(&r) {
                    return Err(cx.malformed(format!("{r} is not a {}", self.type_name())));
                }
                Ok(Params::Ring(r))
            }
        }
    }

    fn decode_data(
        &self,
        params: &Params,
        data: Option<&ValueTree>,
        cx: &mut LoadContext<'_>,
    ) -> Result<AlgebraValue, SessionError> {
        if let Params::Ring(r) = params {
            return Ok(AlgebraValue::Ring(r.clone()));
        }
        let m = match data {
            Some(ValueTree::Map(m)) => m,
            _ => return Err(cx.malformed(format!("{} data must be an object", self.type_name()))),
        };
        let r = match self.0 {
            RingSort::Poly | RingSort::MPoly => {
                let base_tree = m.get("base_ring").ok_or_else(|| cx.malformed("missing \"base_ring\""))?;
                let base = cx.at("base_ring", |cx| cx.resolve_ring(base_tree))?;
                let symbols = Self::symbols(cx, m)?;
                match self.0 {
                    RingSort::Poly => match symbols.as_slice() {
                        [s] => make_poly_ring(&base, s)?,
                        _ => return Err(cx.malformed("PolyRing takes exactly one symbol")),
                    },
                    _ => make_mpoly_ring(&base, &symbols)?,
                }
            }
            RingSort::Fq => {
                let inner = m
                    .get("def_pol")
                    .and_then(ValueTree::as_map)
                    .ok_or_else(|| cx.malformed("missing \"def_pol\" object"))?;
                let f = cx.at("def_pol", |cx| {
                    let ty = inner.get(KEY_TYPE).ok_or_else(|| cx.malformed("missing \"_type\""))?;
                    let desc = TypeDescriptor::from_tree(ty, &crate::value::join_path(cx.path(), KEY_TYPE))?;
                    match cx.decode_value(&desc, inner.get(KEY_DATA))? {
                        AlgebraValue::Elem(f) => Ok(f),
                        other => Err(cx.malformed(format!("expected a polynomial, found {}", other.type_name()))),
                    }
                })?;
                make_fq_field_lenient(&f)?
            }
        };
        Ok(AlgebraValue::Ring(r))
    }
}

struct PolyElemCodec;

impl Codec for PolyElemCodec {
    fn type_name(&self) -> &str {
        "PolyRingElem"
    }

    fn encode_params(&self, v: &AlgebraValue, cx: &mut SaveContext<'_>) -> Result<Option<ValueTree>, SessionError> {
        Ok(Some(cx.ring_ref(elem(v, self.type_name())?.parent())?))
    }

    fn encode_data(&self, v: &AlgebraValue, cx: &mut SaveContext<'_>) -> Result<Option<ValueTree>, SessionError> {
        let e = elem(v, self.type_name())?;
        let terms = e.poly_terms().expect("univariate element");
        let mut out = Vec::with_capacity(terms.len());
        for (d, c) in terms {
            out.push(ValueTree::Array(vec![text(d), cx.encode_elem(&c)?]));
        }
        Ok(Some(ValueTree::Array(out)))
    }

    fn decode_params(&self, params: Option<&ValueTree>, cx: &mut LoadContext<'_>) -> Result<Params, SessionError> {
        parent_param(cx, params)
    }

    fn decode_data(
        &self,
        params: &Params,
        data: Option<&ValueTree>,
        cx: &mut LoadContext<'_>,
    ) -> Result<AlgebraValue, SessionError> {
        let r = parent_of(cx, params, |r| r.as_poly().is_some(), "a univariate polynomial ring")?.clone();
        let base = r.as_poly().expect("checked").base_ring().clone();
        let mut seen = HashSet::new();
        let mut terms = Vec::new();
        for (i, t) in array(cx, data)?.iter().enumerate() {
            let term = cx.at(&i.to_string(), |cx| {
                let (d, c) = pair(cx, t)?;
                let d = cx.at("0", |cx| nonneg(cx, d))?;
                if !seen.insert(d.clone()) {
                    return Err(cx.malformed(format!("repeated degree {d}")));
                }
                Ok((d, cx.at("1", |cx| cx.decode_elem(&base, c))?))
            })?;
            terms.push(term);
        }
        Ok(r.poly(terms)?.into())
    }
}

struct FqElemCodec;

impl Codec for FqElemCodec {
    fn type_name(&self) -> &str {
        "fqPolyRepFieldElem"
    }

    fn encode_params(&self, v: &AlgebraValue, cx: &mut SaveContext<'_>) -> Result<Option<ValueTree>, SessionError> {
        Ok(Some(cx.ring_ref(elem(v, self.type_name())?.parent())?))
    }

    fn encode_data(&self, v: &AlgebraValue, cx: &mut SaveContext<'_>) -> Result<Option<ValueTree>, SessionError> {
        let e = elem(v, self.type_name())?;
        let mut out = Vec::new();
        for (i, c) in e.fq_coefficients().expect("extension field element") {
            out.push(ValueTree::Array(vec![text(i), cx.encode_elem(&c)?]));
        }
        Ok(Some(ValueTree::Array(out)))
    }

    fn decode_params(&self, params: Option<&ValueTree>, cx: &mut LoadContext<'_>) -> Result<Params, SessionError> {
        parent_param(cx, params)
    }

    fn decode_data(
        &self,
        params: &Params,
        data: Option<&ValueTree>,
        cx: &mut LoadContext<'_>,
    ) -> Result<AlgebraValue, SessionError> {
        let r = parent_of(cx, params, |r| r.as_fq().is_some(), "an extension field")?.clone();
        let f = r.as_fq().expect("checked");
        let prime = f.prime_field().clone();
        let mut dense = vec![BigUint::zero(); f.degree()];
        let mut seen = HashSet::new();
        for (i, t) in array(cx, data)?.iter().enumerate() {
            cx.at(&i.to_string(), |cx| {
                let (k, c) = pair(cx, t)?;
                let k = cx.at("0", |cx| nonneg(cx, k))?;
                let idx = k
                    .to_usize()
                    .filter(|&k| k < dense.len())
                    .ok_or_else(|| cx.malformed(format!("power {k} is not below the degree {}", dense.len())))?;
                if !seen.insert(idx) {
                    return Err(cx.malformed(format!("repeated power {k}")));
                }
                let c = cx.at("1", |cx| cx.decode_elem(&prime, c))?;
                dense[idx] = c.as_prime_residue().expect("prime field element").clone();
                Ok(())
            })?;
        }
        Ok(RingElem::from_parts(r, Value::Fq(dense)).into())
    }
}

struct MPolyElemCodec;

impl Codec for MPolyElemCodec {
    fn type_name(&self) -> &str {
        "MPolyRingElem"
    }

    fn encode_params(&self, v: &AlgebraValue, cx: &mut SaveContext<'_>) -> Result<Option<ValueTree>, SessionError> {
        Ok(Some(cx.ring_ref(elem(v, self.type_name())?.parent())?))
    }

    fn encode_data(&self, v: &AlgebraValue, cx: &mut SaveContext<'_>) -> Result<Option<ValueTree>, SessionError> {
        let e = elem(v, self.type_name())?;
        let terms = e.mpoly_terms().expect("multivariate element");
        let mut out = Vec::with_capacity(terms.len());
        for (exps, c) in terms {
            let exps = ValueTree::Array(exps.iter().map(text).collect());
            out.push(ValueTree::Array(vec![exps, cx.encode_elem(&c)?]));
        }
        Ok(Some(ValueTree::Array(out)))
    }

    fn decode_params(&self, params: Option<&ValueTree>, cx: &mut LoadContext<'_>) -> Result<Params, SessionError> {
        parent_param(cx, params)
    }

    fn decode_data(
        &self,
        params: &Params,
        data: Option<&ValueTree>,
        cx: &mut LoadContext<'_>,
    ) -> Result<AlgebraValue, SessionError> {
        let r = parent_of(cx, params, |r| r.as_mpoly().is_some(), "a multivariate polynomial ring")?.clone();
        let m = r.as_mpoly().expect("checked");
        let (base, nvars) = (m.base_ring().clone(), m.nvars());
        let mut seen = HashSet::new();
        let mut terms = Vec::new();
        for (i, t) in array(cx, data)?.iter().enumerate() {
            let term = cx.at(&i.to_string(), |cx| {
                let (e, c) = pair(cx, t)?;
                let exps = cx.at("0", |cx| {
                    let e = array(cx, Some(e))?;
                    if e.len() != nvars {
                        return Err(cx.malformed(format!(
                            "exponent vector of length {} in a ring with {nvars} variables",
                            e.len()
                        )));
                    }
                    e.iter().map(|x| nonneg(cx, x)).collect::<Result<Vec<_>, _>>()
                })?;
                if !seen.insert(exps.clone()) {
                    return Err(cx.malformed("repeated exponent vector"));
                }
                Ok((exps, cx.at("1", |cx| cx.decode_elem(&base, c))?))
            })?;
            terms.push(term);
        }
        Ok(r.mpoly(terms)?.into())
    }
}

/// Entries of a Vector or Matrix must have one type and one parent object.
fn shared_entry_type(
    kind: &str,
    entries: &[AlgebraValue],
    cx: &mut SaveContext<'_>,
) -> Result<TypeDescriptor, SessionError> {
    let first = entries.first().expect("caller checks emptiness");
    let desc = cx.nested(|cx| cx.type_descriptor(first))?;
    for (i, e) in entries.iter().enumerate().skip(1) {
        let same_parent = match (first, e) {
            (AlgebraValue::Elem(a), AlgebraValue::Elem(b)) => a.parent().same(b.parent()),
            (AlgebraValue::Elem(_), _) | (_, AlgebraValue::Elem(_)) => false,
            _ => true,
        };
        if !same_parent || first.type_name() != e.type_name() || cx.nested(|cx| cx.type_descriptor(e))? != desc {
            let describe = |v: &AlgebraValue| match v {
                AlgebraValue::Elem(x) => format!("{} in {}", x.parent().elem_type_name(), x.parent()),
                other => other.type_name().to_string(),
            };
            return Err(SessionError::Heterogeneous(format!(
                "{kind} entries 0 and {i} do not share one parent ring object ({} vs {})",
                describe(first),
                describe(e)
            )));
        }
    }
    Ok(desc)
}

fn entry_data(cx: &mut SaveContext<'_>, v: &AlgebraValue) -> Result<ValueTree, SessionError> {
    Ok(cx.nested(|cx| cx.encode_data(v))?.unwrap_or(ValueTree::Null))
}

fn decode_entry(cx: &mut LoadContext<'_>, ty: &ResolvedType, t: &ValueTree) -> Result<AlgebraValue, SessionError> {
    cx.decode_with(ty, if matches!(t, ValueTree::Null) { None } else { Some(t) })
}

fn entry_param(cx: &mut LoadContext<'_>, params: Option<&ValueTree>) -> Result<Params, SessionError> {
    let t = params.ok_or_else(|| cx.malformed("missing entry type parameter"))?;
    Ok(Params::Entry(Box::new(cx.decode_type(t)?)))
}

struct VectorCodec;

impl Codec for VectorCodec {
    fn type_name(&self) -> &str {
        "Vector"
    }

    fn encode_params(&self, v: &AlgebraValue, cx: &mut SaveContext<'_>) -> Result<Option<ValueTree>, SessionError> {
        let AlgebraValue::Vector(entries) = v else { return Err(SessionError::UnregisteredType(v.type_name().into())) };
        if entries.is_empty() {
            return Err(SessionError::EmptyCollection("Vector"));
        }
        Ok(Some(shared_entry_type("Vector", entries, cx)?.to_tree()))
    }

    fn encode_data(&self, v: &AlgebraValue, cx: &mut SaveContext<'_>) -> Result<Option<ValueTree>, SessionError> {
        let AlgebraValue::Vector(entries) = v else { return Err(SessionError::UnregisteredType(v.type_name().into())) };
        Ok(Some(ValueTree::Array(entries.iter().map(|e| entry_data(cx, e)).collect::<Result<_, _>>()?)))
    }

    fn decode_params(&self, params: Option<&ValueTree>, cx: &mut LoadContext<'_>) -> Result<Params, SessionError> {
        entry_param(cx, params)
    }

    fn decode_data(
        &self,
        params: &Params,
        data: Option<&ValueTree>,
        cx: &mut LoadContext<'_>,
    ) -> Result<AlgebraValue, SessionError> {
        let Params::Entry(ty) = params else { return Err(cx.malformed("missing entry type parameter")) };
        let items = array(cx, data)?;
        let mut out = Vec::with_capacity(items.len());
        for (i, t) in items.iter().enumerate() {
            out.push(cx.at(&i.to_string(), |cx| decode_entry(cx, ty, t))?);
        }
        Ok(AlgebraValue::Vector(out))
    }
}

struct MatrixCodec;

impl Codec for MatrixCodec {
    fn type_name(&self) -> &str {
        "Matrix"
    }

    fn encode_params(&self, v: &AlgebraValue, cx: &mut SaveContext<'_>) -> Result<Option<ValueTree>, SessionError> {
        let AlgebraValue::Matrix(m) = v else { return Err(SessionError::UnregisteredType(v.type_name().into())) };
        if m.entries().is_empty() {
            return Err(SessionError::EmptyCollection("Matrix"));
        }
        let entries: Vec<_> = m.entries().iter().cloned().map(AlgebraValue::Elem).collect();
        Ok(Some(shared_entry_type("Matrix", &entries, cx)?.to_tree()))
    }

    fn encode_data(&self, v: &AlgebraValue, cx: &mut SaveContext<'_>) -> Result<Option<ValueTree>, SessionError> {
        let AlgebraValue::Matrix(m) = v else { return Err(SessionError::UnregisteredType(v.type_name().into())) };
        let mut rows = Vec::with_capacity(m.rows());
        for r in 0..m.rows() {
            let row =
                m.row(r).iter().map(|e| entry_data(cx, &AlgebraValue::Elem(e.clone()))).collect::<Result<_, _>>()?;
            rows.push(ValueTree::Array(row));
        }
        Ok(Some(ValueTree::Array(rows)))
    }

    fn decode_params(&self, params: Option<&ValueTree>, cx: &mut LoadContext<'_>) -> Result<Params, SessionError> {
        entry_param(cx, params)
    }

    fn decode_data(
        &self,
        params: &Params,
        data: Option<&ValueTree>,
        cx: &mut LoadContext<'_>,
    ) -> Result<AlgebraValue, SessionError> {
        let Params::Entry(ty) = params else { return Err(cx.malformed("missing entry type parameter")) };
        let mut rows = Vec::new();
        for (i, row) in array(cx, data)?.iter().enumerate() {
            let decoded = cx.at(&i.to_string(), |cx| {
                let mut out = Vec::new();
                for (j, t) in array(cx, Some(row))?.iter().enumerate() {
                    match cx.at(&j.to_string(), |cx| decode_entry(cx, ty, t))? {
                        AlgebraValue::Elem(e) => out.push(e),
                        other => {
                            return Err(cx.malformed(format!(
                                "matrix entries must be ring elements, found {}",
                                other.type_name()
                            )))
                        }
                    }
                }
                Ok(out)
            })?;
            rows.push(decoded);
        }
        let m = Matrix::from_rows(rows).map_err(|e| cx.malformed(e.to_string()))?;
        Ok(AlgebraValue::Matrix(m))
    }
}

struct TupleCodec;

impl Codec for TupleCodec {
    fn type_name(&self) -> &str {
        "Tuple"
    }

    fn encode_params(&self, v: &AlgebraValue, cx: &mut SaveContext<'_>) -> Result<Option<ValueTree>, SessionError> {
        let AlgebraValue::Tuple(entries) = v else { return Err(SessionError::UnregisteredType(v.type_name().into())) };
        let descs = entries
            .iter()
            .map(|e| cx.nested(|cx| cx.type_descriptor(e)).map(|d| d.to_tree()))
            .collect::<Result<_, _>>()?;
        Ok(Some(ValueTree::Array(descs)))
    }

    fn encode_data(&self, v: &AlgebraValue, cx: &mut SaveContext<'_>) -> Result<Option<ValueTree>, SessionError> {
        let AlgebraValue::Tuple(entries) = v else { return Err(SessionError::UnregisteredType(v.type_name().into())) };
        Ok(Some(ValueTree::Array(entries.iter().map(|e| entry_data(cx, e)).collect::<Result<_, _>>()?)))
    }

    fn decode_params(&self, params: Option<&ValueTree>, cx: &mut LoadContext<'_>) -> Result<Params, SessionError> {
        let items = match params {
            Some(ValueTree::Array(a)) => a,
            _ => return Err(cx.malformed("Tuple parameters must be an array of type descriptors")),
        };
        let mut out = Vec::with_capacity(items.len());
        for (i, t) in items.iter().enumerate() {
            out.push(cx.at(&i.to_string(), |cx| cx.decode_type(t))?);
        }
        Ok(Params::Entries(out))
    }

    fn decode_data(
        &self,
        params: &Params,
        data: Option<&ValueTree>,
        cx: &mut LoadContext<'_>,
    ) -> Result<AlgebraValue, SessionError> {
        let Params::Entries(types) = params else { return Err(cx.malformed("missing entry types")) };
        let items = array(cx, data)?;
        if items.len() != types.len() {
            return Err(cx.malformed(format!("{} entries for {} type parameters", items.len(), types.len())));
        }
        let mut out = Vec::with_capacity(items.len());
        for (i, (ty, t)) in types.iter().zip(items).enumerate() {
            out.push(cx.at(&i.to_string(), |cx| decode_entry(cx, ty, t))?);
        }
        Ok(AlgebraValue::Tuple(out))
    }
}
