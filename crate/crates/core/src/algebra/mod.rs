//! Exact arithmetic kernel: integers, rationals, prime fields, univariate
//! polynomial rings, finite-field extensions given by a defining polynomial,
//! and multivariate polynomial rings.
//!
//! Rings are reference-counted objects compared by identity. Two rings built
//! from equal arguments are distinct objects; [`ring_equals`] compares
//! structure instead. Element operations require operands with the same
//! parent object and never coerce.

mod elem;
mod finite;
mod matrix;
mod value;

use std::fmt;
use std::sync::{Arc, OnceLock};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

pub(crate) use elem::Value;
pub use elem::{add, equals, exponents, inv, is_zero, mul, neg, pow, sub, RingElem};
pub use finite::{enumerate_field, ENUMERATION_LIMIT, IRREDUCIBILITY_LIMIT, PRIMALITY_LIMIT};
pub use matrix::Matrix;
pub use value::{AlgebraValue, CustomValue};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("{0} is not prime")]
    NotPrime(BigUint),
    #[error("defining polynomial {0} is reducible")]
    Reducible(String),
    #[error("invalid defining polynomial: {0}")]
    InvalidDefiningPolynomial(String),
    #[error("invalid symbols: {0}")]
    InvalidSymbols(String),
    #[error("operands belong to different ring objects ({left} vs {right}); no coercion is performed")]
    ParentMismatch { left: String, right: String },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("{0} is not invertible")]
    NotInvertible(String),
    #[error("{0} is not a field of checkable size")]
    NotEnumerable(String),
    #[error("field of order {0} is too large to enumerate")]
    FieldTooLarge(BigUint),
    #[error("invalid element: {0}")]
    InvalidElement(String),
}

/// A ring object. Cloning shares the same identity.
#[derive(Clone)]
pub struct Ring(Arc<RingData>);

struct RingData {
    kind: RingKind,
    verified: bool,
}

#[derive(Debug)]
pub enum RingKind {
    Integers,
    Rationals,
    Prime(PrimeField),
    Poly(UnivPolyRing),
    Fq(FqField),
    MPoly(MPolyRing),
}

#[derive(Debug)]
pub struct PrimeField {
    modulus: BigUint,
}

impl PrimeField {
    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }
}

#[derive(Debug)]
pub struct UnivPolyRing {
    base: Ring,
    symbol: String,
}

impl UnivPolyRing {
    pub fn base_ring(&self) -> &Ring {
        &self.base
    }

    pub fn symbol(&self) -> &str {
        &self.symbol
    }
}

/// `GF(p)[x] / (f)` for a monic `f`, normally irreducible (see
/// [`FqField::irreducible`]).
#[derive(Debug)]
pub struct FqField {
    def_pol: RingElem,
    prime: Ring,
    p: BigUint,
    /// Dense coefficients of the defining polynomial, constant term first.
    modulus: Vec<BigUint>,
    /// `Some(true)` proven irreducible, `Some(false)` known reducible,
    /// `None` above the checkable bound.
    irreducible: Option<bool>,
}

impl FqField {
    pub fn def_pol(&self) -> &RingElem {
        &self.def_pol
    }

    pub fn prime_field(&self) -> &Ring {
        &self.prime
    }

    pub fn characteristic(&self) -> &BigUint {
        &self.p
    }

    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    pub fn irreducible(&self) -> Option<bool> {
        self.irreducible
    }

    pub(crate) fn modulus_coeffs(&self) -> &[BigUint] {
        &self.modulus
    }

    fn generator_symbol(&self) -> &str {
        match self.def_pol.parent().kind() {
            RingKind::Poly(r) => &r.symbol,
            _ => "a",
        }
    }
}

#[derive(Debug)]
pub struct MPolyRing {
    base: Ring,
    symbols: Vec<String>,
}

impl MPolyRing {
    pub fn base_ring(&self) -> &Ring {
        &self.base
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn nvars(&self) -> usize {
        self.symbols.len()
    }
}

impl Ring {
    fn new(kind: RingKind, verified: bool) -> Self {
        Ring(Arc::new(RingData { kind, verified }))
    }

    pub fn kind(&self) -> &RingKind {
        &self.0.kind
    }

    /// Identity comparison.
    pub fn same(&self, other: &Ring) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    /// Address-based identity key, stable while any clone is alive.
    pub fn identity(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    /// False when primality or irreducibility was above the checkable bounds
    /// and was accepted without proof.
    pub fn is_verified(&self) -> bool {
        self.0.verified
    }

    /// Serialized type name of the ring.
    pub fn type_name(&self) -> &'static str {
        match self.kind() {
            RingKind::Integers => "ZZRing",
            RingKind::Rationals => "QQField",
            RingKind::Prime(_) => "fpField",
            RingKind::Poly(_) => "PolyRing",
            RingKind::Fq(_) => "fqPolyRepField",
            RingKind::MPoly(_) => "MPolyRing",
        }
    }

    /// Serialized type name of the ring's elements.
    pub fn elem_type_name(&self) -> &'static str {
        match self.kind() {
            RingKind::Integers => "ZZRingElem",
            RingKind::Rationals => "QQFieldElem",
            RingKind::Prime(_) => "fpFieldElem",
            RingKind::Poly(_) => "PolyRingElem",
            RingKind::Fq(_) => "fqPolyRepFieldElem",
            RingKind::MPoly(_) => "MPolyRingElem",
        }
    }

    /// False for quotients by a reducible polynomial.
    pub fn is_field(&self) -> bool {
        match self.kind() {
            RingKind::Rationals | RingKind::Prime(_) => true,
            RingKind::Fq(f) => f.irreducible != Some(false),
            _ => false,
        }
    }

    /// Number of elements for finite fields.
    pub fn order(&self) -> Option<BigUint> {
        match self.kind() {
            RingKind::Prime(f) => Some(f.modulus.clone()),
            RingKind::Fq(f) => Some(num_traits::pow::pow(f.p.clone(), f.degree())),
            _ => None,
        }
    }

    pub fn as_prime(&self) -> Option<&PrimeField> {
        match self.kind() {
            RingKind::Prime(f) => Some(f),
            _ => None,
        }
    }

    pub fn as_poly(&self) -> Option<&UnivPolyRing> {
        match self.kind() {
            RingKind::Poly(r) => Some(r),
            _ => None,
        }
    }

    pub fn as_fq(&self) -> Option<&FqField> {
        match self.kind() {
            RingKind::Fq(f) => Some(f),
            _ => None,
        }
    }

    pub fn as_mpoly(&self) -> Option<&MPolyRing> {
        match self.kind() {
            RingKind::MPoly(r) => Some(r),
            _ => None,
        }
    }

    /// Rings this ring is built from, in construction order.
    pub fn dependencies(&self) -> Vec<Ring> {
        match self.kind() {
            RingKind::Integers | RingKind::Rationals | RingKind::Prime(_) => vec![],
            RingKind::Poly(r) => vec![r.base.clone()],
            RingKind::Fq(f) => vec![f.def_pol.parent().clone()],
            RingKind::MPoly(r) => vec![r.base.clone()],
        }
    }
}

impl fmt::Debug for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ring@{:x}({})", self.identity(), self)
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind() {
            RingKind::Integers => write!(f, "ZZ"),
            RingKind::Rationals => write!(f, "QQ"),
            RingKind::Prime(p) => write!(f, "GF({})", p.modulus),
            RingKind::Poly(r) => write!(f, "{}[{}]", r.base, r.symbol),
            RingKind::Fq(q) => write!(f, "{}/({})", q.def_pol.parent(), q.def_pol),
            RingKind::MPoly(r) => write!(f, "{}[{}]", r.base, r.symbols.join(", ")),
        }
    }
}

/// The ring of integers (a single shared object).
pub fn integers() -> Ring {
    static ZZ: OnceLock<Ring> = OnceLock::new();
    ZZ.get_or_init(|| Ring::new(RingKind::Integers, true)).clone()
}

/// The field of rationals (a single shared object).
pub fn rationals() -> Ring {
    static QQ: OnceLock<Ring> = OnceLock::new();
    QQ.get_or_init(|| Ring::new(RingKind::Rationals, true)).clone()
}

/// `GF(p)`. Primality is checked by trial division below
/// [`PRIMALITY_LIMIT`]; larger moduli are accepted unverified.
pub fn make_prime_field(p: impl Into<BigUint>) -> Result<Ring, AlgebraError> {
    let p = p.into();
    if p < BigUint::from(2u32) {
        return Err(AlgebraError::NotPrime(p));
    }
    let verified = match p.to_u64() {
        Some(small) if small < PRIMALITY_LIMIT => {
            if !finite::is_prime_u64(small) {
                return Err(AlgebraError::NotPrime(p));
            }
            true
        }
        _ => false,
    };
    Ok(Ring::new(RingKind::Prime(PrimeField { modulus: p }), verified))
}

pub fn make_poly_ring(base: &Ring, symbol: &str) -> Result<Ring, AlgebraError> {
    if symbol.is_empty() {
        return Err(AlgebraError::InvalidSymbols("empty symbol".into()));
    }
    Ok(Ring::new(RingKind::Poly(UnivPolyRing { base: base.clone(), symbol: symbol.to_string() }), true))
}

pub fn make_mpoly_ring<S: AsRef<str>>(base: &Ring, symbols: &[S]) -> Result<Ring, AlgebraError> {
    let symbols: Vec<String> = symbols.iter().map(|s| s.as_ref().to_string()).collect();
    if symbols.is_empty() {
        return Err(AlgebraError::InvalidSymbols("at least one symbol is required".into()));
    }
    if symbols.iter().any(String::is_empty) {
        return Err(AlgebraError::InvalidSymbols("empty symbol".into()));
    }
    for (i, s) in symbols.iter().enumerate() {
        if symbols[..i].contains(s) {
            return Err(AlgebraError::InvalidSymbols(format!("duplicate symbol \"{s}\"")));
        }
    }
    Ok(Ring::new(RingKind::MPoly(MPolyRing { base: base.clone(), symbols }), true))
}

/// `GF(p)[x]/(def_pol)`. `def_pol` must be a monic polynomial of degree at
/// least one over a prime field. Irreducibility is checked by exhaustive
/// trial division when `p^degree` is at most [`IRREDUCIBILITY_LIMIT`].
pub fn make_fq_field(def_pol: &RingElem) -> Result<Ring, AlgebraError> {
    build_fq(def_pol, false)
}

/// Like [`make_fq_field`] but accepts a reducible defining polynomial,
/// producing a quotient ring flagged as not a field. The loader uses this so
/// stored constructions are read back as written.
pub fn make_fq_field_lenient(def_pol: &RingElem) -> Result<Ring, AlgebraError> {
    build_fq(def_pol, true)
}

fn build_fq(def_pol: &RingElem, allow_reducible: bool) -> Result<Ring, AlgebraError> {
    let poly_ring = def_pol.parent();
    let prime = match poly_ring.kind() {
        RingKind::Poly(r) if r.base.as_prime().is_some() => r.base.clone(),
        _ => {
            return Err(AlgebraError::InvalidDefiningPolynomial(format!(
                "{def_pol} must be a univariate polynomial over a prime field"
            )))
        }
    };
    let p = prime.as_prime().expect("checked").modulus.clone();
    let terms = def_pol.poly_terms().expect("univariate");
    let degree = match terms.last() {
        Some((d, c)) if !d.is_zero() => {
            if c.as_prime_residue().is_none_or(|v| !v.is_one()) {
                return Err(AlgebraError::InvalidDefiningPolynomial(format!("{def_pol} is not monic")));
            }
            d.to_usize().ok_or_else(|| AlgebraError::InvalidDefiningPolynomial("degree too large".into()))?
        }
        _ => {
            return Err(AlgebraError::InvalidDefiningPolynomial(format!("{def_pol} has degree < 1")));
        }
    };
    let mut modulus = vec![BigUint::zero(); degree + 1];
    for (d, c) in &terms {
        modulus[d.to_usize().expect("bounded by degree")] = c.as_prime_residue().expect("prime field").clone();
    }
    let irreducible = finite::small_field_size(&p, degree).map(|_| {
        let p64 = p.to_u64().expect("small");
        let dense: Vec<u64> = modulus.iter().map(|c| c.to_u64().expect("reduced mod p")).collect();
        finite::is_irreducible_mod_p(&dense, p64)
    });
    if irreducible == Some(false) && !allow_reducible {
        return Err(AlgebraError::Reducible(def_pol.to_string()));
    }
    let verified = irreducible == Some(true);
    Ok(Ring::new(RingKind::Fq(FqField { def_pol: def_pol.clone(), prime, p, modulus, irreducible }), verified))
}

/// Structural ring equality (ignores identity).
pub fn ring_equals(a: &Ring, b: &Ring) -> bool {
    if a.same(b) {
        return true;
    }
    match (a.kind(), b.kind()) {
        (RingKind::Integers, RingKind::Integers) | (RingKind::Rationals, RingKind::Rationals) => true,
        (RingKind::Prime(x), RingKind::Prime(y)) => x.modulus == y.modulus,
        (RingKind::Poly(x), RingKind::Poly(y)) => x.symbol == y.symbol && ring_equals(&x.base, &y.base),
        (RingKind::Fq(x), RingKind::Fq(y)) => elem::structurally_equal(&x.def_pol, &y.def_pol),
        (RingKind::MPoly(x), RingKind::MPoly(y)) => x.symbols == y.symbols && ring_equals(&x.base, &y.base),
        _ => false,
    }
}

#[cfg(test)]
mod tests;
