#![allow(dead_code)]

use std::path::PathBuf;

use mrdi_core::algebra::{
    add, exponents, make_fq_field, make_fq_field_lenient, make_mpoly_ring, make_poly_ring, make_prime_field, Ring,
    RingElem,
};
use num_bigint::BigUint;
use rand::Rng;
use regex::Regex;

pub fn fixture_path(name: &str) -> PathBuf {
    // also included from the cli crate's tests
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures").join(name)
}

pub fn fixture(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).unwrap()
}

pub fn upoly(ring: &Ring, dense: &[i64]) -> RingElem {
    let base = ring.as_poly().unwrap().base_ring().clone();
    ring.poly(dense.iter().enumerate().map(|(d, &c)| (BigUint::from(d), base.from_int(c))).collect()).unwrap()
}

/// `GF(7)[x]/(x^2 + x + 1)`, built without the irreducibility check.
pub fn reference_quotient() -> Ring {
    let r = make_poly_ring(&make_prime_field(7u32).unwrap(), "x").unwrap();
    make_fq_field_lenient(&upoly(&r, &[1, 1, 1])).unwrap()
}

/// `2y^3z^4 + (a + 3)z^2 + 5ay + 1` over `k[y, z]`.
pub fn reference_polynomial(k: &Ring) -> RingElem {
    let r = make_mpoly_ring(k, &["y", "z"]).unwrap();
    let a = k.gen().unwrap();
    let terms = vec![
        (exponents(&[3, 4]), k.from_int(2)),
        (exponents(&[0, 2]), add(&a, &k.from_int(3)).unwrap()),
        (exponents(&[1, 0]), mul_int(&a, 5)),
        (exponents(&[0, 0]), k.one()),
    ];
    r.mpoly(terms).unwrap()
}

pub fn mul_int(e: &RingElem, n: i64) -> RingElem {
    mrdi_core::algebra::mul(e, &e.parent().from_int(n)).unwrap()
}

/// `GF(p^2)` from the first irreducible `x^2 + c`, or `x^2 + x + c`.
pub fn gf_p2(p: u64) -> Ring {
    let r = make_poly_ring(&make_prime_field(p).unwrap(), "x").unwrap();
    for lin in [0, 1] {
        for c in 1..p as i64 {
            if let Ok(f) = make_fq_field(&upoly(&r, &[c, lin, 1])) {
                return f;
            }
        }
    }
    unreachable!("every prime field has an irreducible quadratic")
}

pub fn random_fq(rng: &mut impl Rng, k: &Ring) -> RingElem {
    let f = k.as_fq().unwrap();
    let p = f.characteristic().to_string().parse::<i64>().unwrap();
    let prime = f.prime_field();
    let coeffs: Vec<_> = (0..f.degree()).map(|_| prime.from_int(rng.gen_range(0..p))).collect();
    k.fq_from_coeffs(&coeffs).unwrap()
}

pub fn random_mpoly(rng: &mut impl Rng, r: &Ring) -> RingElem {
    let m = r.as_mpoly().unwrap();
    let base = m.base_ring().clone();
    let n = rng.gen_range(0..6);
    let terms = (0..n)
        .map(|_| {
            let e: Vec<u64> = (0..m.nvars()).map(|_| rng.gen_range(0..5)).collect();
            (exponents(&e), random_fq(rng, &base))
        })
        .collect();
    r.mpoly(terms).unwrap()
}

pub fn random_upoly(rng: &mut impl Rng, r: &Ring) -> RingElem {
    let base = r.as_poly().unwrap().base_ring().clone();
    let n = rng.gen_range(0..6);
    let terms = (0..n)
        .map(|_| {
            let c = if base.as_fq().is_some() { random_fq(rng, &base) } else { base.from_int(rng.gen_range(-50..50)) };
            (BigUint::from(rng.gen_range(0u32..9)), c)
        })
        .collect();
    r.poly(terms).unwrap()
}

/// Replaces UUIDs by `uuid-0`, `uuid-1`, ... in order of first appearance.
pub fn normalize_uuids(text: &str) -> String {
    let re = Regex::new(r"[0-9a-f]{8}-[0-9a-f]{4}-[0-9a-f]{4}-[0-9a-f]{4}-[0-9a-f]{12}").unwrap();
    let mut seen: Vec<String> = Vec::new();
    re.replace_all(text, |c: &regex::Captures<'_>| {
        let u = c[0].to_string();
        let i = seen.iter().position(|s| *s == u).unwrap_or_else(|| {
            seen.push(u);
            seen.len() - 1
        });
        format!("uuid-{i}")
    })
    .into_owned()
}
