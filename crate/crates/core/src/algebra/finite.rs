use num_bigint::BigUint;
use num_traits::ToPrimitive;

use super::elem::Value;
use super::{AlgebraError, Ring, RingElem, RingKind};

/// Moduli below this bound are checked for primality.
pub const PRIMALITY_LIMIT: u64 = 1 << 31;
/// Defining polynomials are checked for irreducibility when `p^deg` is at
/// most this bound.
pub const IRREDUCIBILITY_LIMIT: u64 = 1_000_000;
/// Largest field order [`enumerate_field`] accepts.
pub const ENUMERATION_LIMIT: u64 = 1_000_000;

pub(crate) fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// `p^degree` when it is within [`IRREDUCIBILITY_LIMIT`].
pub(crate) fn small_field_size(p: &BigUint, degree: usize) -> Option<u64> {
    let p = p.to_u64()?;
    let mut size = 1u64;
    for _ in 0..degree {
        size = size.checked_mul(p)?;
        if size > IRREDUCIBILITY_LIMIT {
            return None;
        }
    }
    Some(size)
}

/// Remainder of `num` modulo the monic `den` over `GF(p)`, dense, constant
/// term first.
fn rem_monic(num: &[u64], den: &[u64], p: u64) -> Vec<u64> {
    let mut r = num.to_vec();
    let dd = den.len() - 1;
    for k in (dd..r.len()).rev() {
        let c = r[k] % p;
        if c == 0 {
            continue;
        }
        for (j, &dj) in den.iter().enumerate() {
            r[k - dd + j] = (r[k - dd + j] + p - (c * dj) % p) % p;
        }
    }
    r.truncate(dd);
    r
}

/// Exhaustive trial division by every monic polynomial of degree
/// `1..=deg/2`. `coeffs` is dense and monic.
pub(crate) fn is_irreducible_mod_p(coeffs: &[u64], p: u64) -> bool {
    let deg = coeffs.len() - 1;
    for d in 1..=deg / 2 {
        let count = p.pow(d as u32);
        for idx in 0..count {
            let mut cand = Vec::with_capacity(d + 1);
            let mut rest = idx;
            for _ in 0..d {
                cand.push(rest % p);
                rest /= p;
            }
            cand.push(1);
            if rem_monic(coeffs, &cand, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

/// All elements of a finite field, each exactly once. Prime fields list
/// `0..p`; extension fields list coefficient vectors in base-`p` counting
/// order.
pub fn enumerate_field(ring: &Ring) -> Result<Vec<RingElem>, AlgebraError> {
    let order = ring.order().ok_or_else(|| AlgebraError::NotEnumerable(ring.to_string()))?;
    let n = match order.to_u64() {
        Some(n) if n <= ENUMERATION_LIMIT => n,
        _ => return Err(AlgebraError::FieldTooLarge(order)),
    };
    match ring.kind() {
        RingKind::Prime(_) => Ok((0..n).map(|i| RingElem::from_parts(ring.clone(), Value::Fp(i.into()))).collect()),
        RingKind::Fq(f) => {
            let p = f.characteristic().to_u64().expect("small");
            let d = f.degree();
            Ok((0..n)
                .map(|mut i| {
                    let mut v = Vec::with_capacity(d);
                    for _ in 0..d {
                        v.push(BigUint::from(i % p));
                        i /= p;
                    }
                    RingElem::from_parts(ring.clone(), Value::Fq(v))
                })
                .collect())
        }
        _ => Err(AlgebraError::NotEnumerable(ring.to_string())),
    }
}
