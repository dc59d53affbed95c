use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{AlgebraError, Ring, RingKind};

/// Canonical element representation, interpreted relative to a parent ring.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) enum Value {
    Int(BigInt),
    Rat(BigRational),
    /// Residue in `[0, p)`.
    Fp(BigUint),
    /// Dense residues of length `degree`, constant term first.
    Fq(Vec<BigUint>),
    /// Nonzero terms, strictly ascending degree.
    Poly(Vec<(BigUint, Value)>),
    /// Nonzero terms, strictly descending degree-lexicographic order.
    MPoly(Vec<(Vec<BigUint>, Value)>),
}

/// Total degree first, then lexicographic; `Less` means "comes first".
pub(crate) fn deglex_desc(a: &[BigUint], b: &[BigUint]) -> Ordering {
    let ta: BigUint = a.iter().sum();
    let tb: BigUint = b.iter().sum();
    tb.cmp(&ta).then_with(|| b.cmp(a))
}

/// Converts small exponents to the stored big-integer form.
pub fn exponents(e: &[u64]) -> Vec<BigUint> {
    e.iter().map(|&x| BigUint::from(x)).collect()
}

fn mod_p(n: &BigInt, p: &BigUint) -> BigUint {
    let p = BigInt::from_biguint(Sign::Plus, p.clone());
    n.mod_floor(&p).to_biguint().expect("non-negative")
}

impl Ring {
    pub(crate) fn zero_value(&self) -> Value {
        match self.kind() {
            RingKind::Integers => Value::Int(BigInt::zero()),
            RingKind::Rationals => Value::Rat(BigRational::zero()),
            RingKind::Prime(_) => Value::Fp(BigUint::zero()),
            RingKind::Fq(f) => Value::Fq(vec![BigUint::zero(); f.degree()]),
            RingKind::Poly(_) => Value::Poly(Vec::new()),
            RingKind::MPoly(_) => Value::MPoly(Vec::new()),
        }
    }

    pub(crate) fn int_value(&self, n: &BigInt) -> Value {
        match self.kind() {
            RingKind::Integers => Value::Int(n.clone()),
            RingKind::Rationals => Value::Rat(BigRational::from_integer(n.clone())),
            RingKind::Prime(f) => Value::Fp(mod_p(n, &f.modulus)),
            RingKind::Fq(f) => {
                let mut v = vec![BigUint::zero(); f.degree()];
                v[0] = mod_p(n, &f.p);
                Value::Fq(v)
            }
            RingKind::Poly(r) => {
                let c = r.base.int_value(n);
                Value::Poly(if r.base.is_zero_value(&c) { vec![] } else { vec![(BigUint::zero(), c)] })
            }
            RingKind::MPoly(r) => {
                let c = r.base.int_value(n);
                Value::MPoly(if r.base.is_zero_value(&c) {
                    vec![]
                } else {
                    vec![(vec![BigUint::zero(); r.nvars()], c)]
                })
            }
        }
    }

    pub(crate) fn is_zero_value(&self, v: &Value) -> bool {
        match v {
            Value::Int(n) => n.is_zero(),
            Value::Rat(q) => q.is_zero(),
            Value::Fp(x) => x.is_zero(),
            Value::Fq(xs) => xs.iter().all(Zero::is_zero),
            Value::Poly(t) => t.is_empty(),
            Value::MPoly(t) => t.is_empty(),
        }
    }

    pub(crate) fn add_values(&self, a: &Value, b: &Value) -> Value {
        match (self.kind(), a, b) {
            (RingKind::Integers, Value::Int(x), Value::Int(y)) => Value::Int(x + y),
            (RingKind::Rationals, Value::Rat(x), Value::Rat(y)) => Value::Rat(x + y),
            (RingKind::Prime(f), Value::Fp(x), Value::Fp(y)) => Value::Fp((x + y) % &f.modulus),
            (RingKind::Fq(f), Value::Fq(x), Value::Fq(y)) => {
                Value::Fq(x.iter().zip(y).map(|(u, v)| (u + v) % &f.p).collect())
            }
            (RingKind::Poly(r), Value::Poly(x), Value::Poly(y)) => {
                let mut out = Vec::with_capacity(x.len() + y.len());
                let (mut i, mut j) = (0, 0);
                while i < x.len() || j < y.len() {
                    let ord = match (x.get(i), y.get(j)) {
                        (Some(a), Some(b)) => a.0.cmp(&b.0),
                        (Some(_), None) => Ordering::Less,
                        _ => Ordering::Greater,
                    };
                    match ord {
                        Ordering::Less => {
                            out.push(x[i].clone());
                            i += 1;
                        }
                        Ordering::Greater => {
                            out.push(y[j].clone());
                            j += 1;
                        }
                        Ordering::Equal => {
                            let c = r.base.add_values(&x[i].1, &y[j].1);
                            if !r.base.is_zero_value(&c) {
                                out.push((x[i].0.clone(), c));
                            }
                            i += 1;
                            j += 1;
                        }
                    }
                }
                Value::Poly(out)
            }
            (RingKind::MPoly(r), Value::MPoly(x), Value::MPoly(y)) => {
                Value::MPoly(canonical_mpoly_terms(&r.base, x.iter().chain(y).cloned()))
            }
            _ => unreachable!("value does not belong to ring {self}"),
        }
    }

    pub(crate) fn neg_value(&self, a: &Value) -> Value {
        match (self.kind(), a) {
            (RingKind::Integers, Value::Int(x)) => Value::Int(-x),
            (RingKind::Rationals, Value::Rat(x)) => Value::Rat(-x),
            (RingKind::Prime(f), Value::Fp(x)) => Value::Fp(neg_mod(x, &f.modulus)),
            (RingKind::Fq(f), Value::Fq(xs)) => Value::Fq(xs.iter().map(|x| neg_mod(x, &f.p)).collect()),
            (RingKind::Poly(r), Value::Poly(t)) => {
                Value::Poly(t.iter().map(|(d, c)| (d.clone(), r.base.neg_value(c))).collect())
            }
            (RingKind::MPoly(r), Value::MPoly(t)) => {
                Value::MPoly(t.iter().map(|(e, c)| (e.clone(), r.base.neg_value(c))).collect())
            }
            _ => unreachable!("value does not belong to ring {self}"),
        }
    }

    pub(crate) fn mul_values(&self, a: &Value, b: &Value) -> Value {
        match (self.kind(), a, b) {
            (RingKind::Integers, Value::Int(x), Value::Int(y)) => Value::Int(x * y),
            (RingKind::Rationals, Value::Rat(x), Value::Rat(y)) => Value::Rat(x * y),
            (RingKind::Prime(f), Value::Fp(x), Value::Fp(y)) => Value::Fp((x * y) % &f.modulus),
            (RingKind::Fq(f), Value::Fq(x), Value::Fq(y)) => {
                let d = f.degree();
                let p = &f.p;
                let mut prod = vec![BigUint::zero(); 2 * d - 1];
                for (i, u) in x.iter().enumerate().filter(|(_, u)| !u.is_zero()) {
                    for (j, v) in y.iter().enumerate() {
                        prod[i + j] += u * v;
                    }
                }
                let m = f.modulus_coeffs();
                // eliminate x^k for k >= d using x^d = -(m_0 + ... + m_{d-1} x^{d-1})
                for k in (d..2 * d - 1).rev() {
                    let c = &prod[k] % p;
                    prod[k] = BigUint::zero();
                    if c.is_zero() {
                        continue;
                    }
                    for (j, mj) in m[..d].iter().enumerate() {
                        let t = (&c * mj) % p;
                        prod[k - d + j] += p - t;
                    }
                }
                prod.truncate(d);
                Value::Fq(prod.into_iter().map(|c| c % p).collect())
            }
            (RingKind::Poly(r), Value::Poly(x), Value::Poly(y)) => {
                let mut acc: BTreeMap<BigUint, Value> = BTreeMap::new();
                for (dx, cx) in x {
                    for (dy, cy) in y {
                        let c = r.base.mul_values(cx, cy);
                        let deg = dx + dy;
                        match acc.get_mut(&deg) {
                            Some(existing) => *existing = r.base.add_values(existing, &c),
                            None => {
                                acc.insert(deg, c);
                            }
                        }
                    }
                }
                Value::Poly(acc.into_iter().filter(|(_, c)| !r.base.is_zero_value(c)).collect())
            }
            (RingKind::MPoly(r), Value::MPoly(x), Value::MPoly(y)) => {
                let products = x.iter().flat_map(|(ex, cx)| {
                    y.iter().map(move |(ey, cy)| {
                        let e: Vec<BigUint> = ex.iter().zip(ey).map(|(a, b)| a + b).collect();
                        (e, r.base.mul_values(cx, cy))
                    })
                });
                Value::MPoly(canonical_mpoly_terms(&r.base, products))
            }
            _ => unreachable!("value does not belong to ring {self}"),
        }
    }
}

fn neg_mod(x: &BigUint, p: &BigUint) -> BigUint {
    if x.is_zero() {
        BigUint::zero()
    } else {
        p - x
    }
}

/// Sums duplicate exponent vectors, drops zeros, sorts descending deglex.
pub(crate) fn canonical_mpoly_terms(
    base: &Ring,
    terms: impl IntoIterator<Item = (Vec<BigUint>, Value)>,
) -> Vec<(Vec<BigUint>, Value)> {
    let mut acc: BTreeMap<Vec<BigUint>, Value> = BTreeMap::new();
    for (e, c) in terms {
        match acc.get_mut(&e) {
            Some(existing) => *existing = base.add_values(existing, &c),
            None => {
                acc.insert(e, c);
            }
        }
    }
    let mut out: Vec<_> = acc.into_iter().filter(|(_, c)| !base.is_zero_value(c)).collect();
    out.sort_by(|a, b| deglex_desc(&a.0, &b.0));
    out
}

/// An element together with its parent ring object.
#[derive(Clone, Debug)]
pub struct RingElem {
    parent: Ring,
    pub(crate) value: Value,
}

/// Equal parents (by identity) and equal canonical values.
impl PartialEq for RingElem {
    fn eq(&self, other: &Self) -> bool {
        self.parent.same(&other.parent) && self.value == other.value
    }
}

impl Eq for RingElem {}

impl RingElem {
    pub(crate) fn from_parts(parent: Ring, value: Value) -> Self {
        RingElem { parent, value }
    }

    pub fn parent(&self) -> &Ring {
        &self.parent
    }

    pub fn is_zero(&self) -> bool {
        self.parent.is_zero_value(&self.value)
    }

    pub fn as_integer(&self) -> Option<&BigInt> {
        match &self.value {
            Value::Int(n) => Some(n),
            _ => None,
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match &self.value {
            Value::Rat(q) => Some(q),
            _ => None,
        }
    }

    pub fn as_prime_residue(&self) -> Option<&BigUint> {
        match &self.value {
            Value::Fp(x) => Some(x),
            _ => None,
        }
    }

    /// Sparse `(power, coefficient)` view of a finite-field extension element,
    /// ascending powers, zero coefficients omitted.
    pub fn fq_coefficients(&self) -> Option<Vec<(usize, RingElem)>> {
        match (&self.value, self.parent.as_fq()) {
            (Value::Fq(xs), Some(f)) => Some(
                xs.iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(i, c)| (i, RingElem::from_parts(f.prime.clone(), Value::Fp(c.clone()))))
                    .collect(),
            ),
            _ => None,
        }
    }

    pub fn poly_terms(&self) -> Option<Vec<(BigUint, RingElem)>> {
        match (&self.value, self.parent.as_poly()) {
            (Value::Poly(t), Some(r)) => {
                Some(t.iter().map(|(d, c)| (d.clone(), RingElem::from_parts(r.base.clone(), c.clone()))).collect())
            }
            _ => None,
        }
    }

    pub fn mpoly_terms(&self) -> Option<Vec<(Vec<BigUint>, RingElem)>> {
        match (&self.value, self.parent.as_mpoly()) {
            (Value::MPoly(t), Some(r)) => {
                Some(t.iter().map(|(e, c)| (e.clone(), RingElem::from_parts(r.base.clone(), c.clone()))).collect())
            }
            _ => None,
        }
    }

    /// Number of stored terms for polynomials, nonzero coefficients for
    /// extension-field elements, and 0/1 otherwise.
    pub fn term_count(&self) -> usize {
        match &self.value {
            Value::Poly(t) => t.len(),
            Value::MPoly(t) => t.len(),
            Value::Fq(xs) => xs.iter().filter(|c| !c.is_zero()).count(),
            _ => usize::from(!self.is_zero()),
        }
    }
}

impl Ring {
    pub fn zero(&self) -> RingElem {
        RingElem::from_parts(self.clone(), self.zero_value())
    }

    pub fn one(&self) -> RingElem {
        self.from_int(1)
    }

    pub fn from_int(&self, n: i64) -> RingElem {
        self.from_bigint(&BigInt::from(n))
    }

    /// Image of an integer under the canonical map.
    pub fn from_bigint(&self, n: &BigInt) -> RingElem {
        RingElem::from_parts(self.clone(), self.int_value(n))
    }

    pub fn from_rational(&self, q: BigRational) -> Result<RingElem, AlgebraError> {
        match self.kind() {
            RingKind::Rationals => Ok(RingElem::from_parts(self.clone(), Value::Rat(q))),
            _ => Err(AlgebraError::InvalidElement(format!("rational number in {self}"))),
        }
    }

    /// The generator `x` of a univariate ring or the class of `x` in an
    /// extension field.
    pub fn gen(&self) -> Result<RingElem, AlgebraError> {
        match self.kind() {
            RingKind::Poly(r) => {
                let one = r.base.int_value(&BigInt::one());
                Ok(RingElem::from_parts(self.clone(), Value::Poly(vec![(BigUint::one(), one)])))
            }
            RingKind::Fq(f) => {
                let mut v = vec![BigUint::zero(); f.degree()];
                if f.degree() == 1 {
                    // x = -m_0 in GF(p)[x]/(x + m_0)
                    v[0] = neg_mod(&f.modulus_coeffs()[0], &f.p);
                } else {
                    v[1] = BigUint::one();
                }
                Ok(RingElem::from_parts(self.clone(), Value::Fq(v)))
            }
            _ => Err(AlgebraError::InvalidElement(format!("{self} has no single generator"))),
        }
    }

    pub fn gens(&self) -> Result<Vec<RingElem>, AlgebraError> {
        let r = self.as_mpoly().ok_or_else(|| AlgebraError::InvalidElement(format!("{self} is not multivariate")))?;
        let one = r.base.int_value(&BigInt::one());
        Ok((0..r.nvars())
            .map(|i| {
                let mut e = vec![BigUint::zero(); r.nvars()];
                e[i] = BigUint::one();
                RingElem::from_parts(self.clone(), Value::MPoly(vec![(e, one.clone())]))
            })
            .collect())
    }

    fn check_coeff(&self, base: &Ring, c: &RingElem) -> Result<(), AlgebraError> {
        if c.parent.same(base) {
            Ok(())
        } else {
            Err(AlgebraError::ParentMismatch { left: base.to_string(), right: c.parent.to_string() })
        }
    }

    /// Element of an extension field from dense prime-field coefficients,
    /// constant term first. Extra high coefficients are reduced.
    pub fn fq_from_coeffs(&self, coeffs: &[RingElem]) -> Result<RingElem, AlgebraError> {
        let f =
            self.as_fq().ok_or_else(|| AlgebraError::InvalidElement(format!("{self} is not an extension field")))?;
        let mut acc = self.zero();
        let mut power = self.one();
        let g = self.gen()?;
        for c in coeffs {
            self.check_coeff(&f.prime, c)?;
            let lifted = self.from_bigint(&BigInt::from_biguint(Sign::Plus, c.as_prime_residue().unwrap().clone()));
            acc = add(&acc, &mul(&lifted, &power)?)?;
            power = mul(&power, &g)?;
        }
        Ok(acc)
    }

    /// Univariate polynomial from `(degree, coefficient)` pairs in any order;
    /// repeated degrees are summed.
    pub fn poly(&self, terms: Vec<(BigUint, RingElem)>) -> Result<RingElem, AlgebraError> {
        let r = self.as_poly().ok_or_else(|| AlgebraError::InvalidElement(format!("{self} is not univariate")))?;
        let mut acc: BTreeMap<BigUint, Value> = BTreeMap::new();
        for (d, c) in terms {
            self.check_coeff(&r.base, &c)?;
            match acc.get_mut(&d) {
                Some(e) => *e = r.base.add_values(e, &c.value),
                None => {
                    acc.insert(d, c.value);
                }
            }
        }
        let terms = acc.into_iter().filter(|(_, c)| !r.base.is_zero_value(c)).collect();
        Ok(RingElem::from_parts(self.clone(), Value::Poly(terms)))
    }

    /// Multivariate polynomial from terms in any order; canonicalized.
    pub fn mpoly(&self, terms: Vec<(Vec<BigUint>, RingElem)>) -> Result<RingElem, AlgebraError> {
        let r = self.as_mpoly().ok_or_else(|| AlgebraError::InvalidElement(format!("{self} is not multivariate")))?;
        let mut raw = Vec::with_capacity(terms.len());
        for (e, c) in terms {
            self.check_coeff(&r.base, &c)?;
            if e.len() != r.nvars() {
                return Err(AlgebraError::DimensionMismatch(format!(
                    "exponent vector of length {} in a ring with {} variables",
                    e.len(),
                    r.nvars()
                )));
            }
            raw.push((e, c.value));
        }
        Ok(RingElem::from_parts(self.clone(), Value::MPoly(canonical_mpoly_terms(&r.base, raw))))
    }
}

fn check_same(a: &RingElem, b: &RingElem) -> Result<(), AlgebraError> {
    if a.parent.same(&b.parent) {
        Ok(())
    } else {
        Err(AlgebraError::ParentMismatch { left: a.parent.to_string(), right: b.parent.to_string() })
    }
}

pub fn add(a: &RingElem, b: &RingElem) -> Result<RingElem, AlgebraError> {
    check_same(a, b)?;
    Ok(RingElem::from_parts(a.parent.clone(), a.parent.add_values(&a.value, &b.value)))
}

pub fn sub(a: &RingElem, b: &RingElem) -> Result<RingElem, AlgebraError> {
    add(a, &neg(b))
}

pub fn mul(a: &RingElem, b: &RingElem) -> Result<RingElem, AlgebraError> {
    check_same(a, b)?;
    Ok(RingElem::from_parts(a.parent.clone(), a.parent.mul_values(&a.value, &b.value)))
}

pub fn neg(a: &RingElem) -> RingElem {
    RingElem::from_parts(a.parent.clone(), a.parent.neg_value(&a.value))
}

/// Equality for elements of one ring; a parent mismatch is an error.
pub fn equals(a: &RingElem, b: &RingElem) -> Result<bool, AlgebraError> {
    check_same(a, b)?;
    Ok(a.value == b.value)
}

pub fn is_zero(a: &RingElem) -> bool {
    a.is_zero()
}

pub fn pow(a: &RingElem, exp: &BigUint) -> RingElem {
    let mut result = a.parent.one();
    let mut base = a.clone();
    let bits = exp.bits();
    for i in 0..bits {
        if exp.bit(i) {
            result = mul(&result, &base).expect("same parent");
        }
        if i + 1 < bits {
            base = mul(&base, &base).expect("same parent");
        }
    }
    result
}

/// Multiplicative inverse in a field.
pub fn inv(a: &RingElem) -> Result<RingElem, AlgebraError> {
    if a.is_zero() || !matches!(a.parent.kind(), RingKind::Rationals | RingKind::Prime(_) | RingKind::Fq(_)) {
        return Err(AlgebraError::NotInvertible(a.to_string()));
    }
    match &a.value {
        Value::Rat(q) => Ok(RingElem::from_parts(a.parent.clone(), Value::Rat(q.recip()))),
        _ => {
            let order = a.parent.order().expect("finite field");
            let candidate = pow(a, &(order - 2u32));
            // a quotient by a reducible polynomial has zero divisors
            if mul(a, &candidate)?.value != a.parent.one().value {
                return Err(AlgebraError::NotInvertible(a.to_string()));
            }
            Ok(candidate)
        }
    }
}

/// Equal values over structurally equal parents.
pub(crate) fn structurally_equal(a: &RingElem, b: &RingElem) -> bool {
    super::ring_equals(&a.parent, &b.parent) && a.value == b.value
}

impl fmt::Display for RingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_value(&self.parent, &self.value))
    }
}

fn is_compound(s: &str) -> bool {
    s.contains(" + ") || s.contains(" - ") || s.contains("//")
}

fn monomial(coeff: &str, factors: &[String]) -> String {
    if factors.is_empty() {
        return coeff.to_string();
    }
    let mono = factors.join("*");
    match coeff {
        "1" => mono,
        "-1" => format!("-{mono}"),
        c if is_compound(c) => format!("({c})*{mono}"),
        c => format!("{c}*{mono}"),
    }
}

fn power(sym: &str, e: &BigUint) -> Option<String> {
    if e.is_zero() {
        None
    } else if e.is_one() {
        Some(sym.to_string())
    } else {
        Some(format!("{sym}^{e}"))
    }
}

fn join_terms(parts: Vec<String>) -> String {
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

fn format_value(ring: &Ring, v: &Value) -> String {
    match (ring.kind(), v) {
        (_, Value::Int(n)) => n.to_string(),
        (_, Value::Rat(q)) => {
            if q.is_integer() {
                q.numer().to_string()
            } else {
                format!("{}//{}", q.numer(), q.denom())
            }
        }
        (_, Value::Fp(x)) => x.to_string(),
        (RingKind::Fq(f), Value::Fq(xs)) => {
            let sym = f.generator_symbol();
            let parts = xs
                .iter()
                .enumerate()
                .rev()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| monomial(&c.to_string(), &power(sym, &BigUint::from(i)).into_iter().collect::<Vec<_>>()))
                .collect();
            join_terms(parts)
        }
        (RingKind::Poly(r), Value::Poly(t)) => {
            let parts = t
                .iter()
                .rev()
                .map(|(d, c)| {
                    let cs = format_value(&r.base, c);
                    monomial(&cs, &power(&r.symbol, d).into_iter().collect::<Vec<_>>())
                })
                .collect();
            join_terms(parts)
        }
        (RingKind::MPoly(r), Value::MPoly(t)) => {
            let parts = t
                .iter()
                .map(|(e, c)| {
                    let cs = format_value(&r.base, c);
                    let factors: Vec<String> = r.symbols.iter().zip(e).filter_map(|(s, x)| power(s, x)).collect();
                    monomial(&cs, &factors)
                })
                .collect();
            join_terms(parts)
        }
        _ => "?".into(),
    }
}
