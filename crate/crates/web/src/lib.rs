//! Browser bindings for the demo page in `www/`. Every export takes and
//! returns plain strings or numbers; the `*_report` functions hold the logic
//! so they can be tested natively.

use mrdi_core::algebra::{
    enumerate_field, exponents, make_fq_field_lenient, make_mpoly_ring, make_poly_ring, make_prime_field, mul, Ring,
};
use mrdi_core::inspect::render;
use mrdi_core::{builtin_mrdi_schema, parse_document, Session, Style, ValueTree};
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wasm_bindgen::prelude::*;

/// Schema violations, then the tree rendering when the file is usable.
pub fn inspect_report(text: &str) -> String {
    let tree = match ValueTree::parse(text) {
        Ok(t) => t,
        Err(e) => return format!("not JSON: {e}"),
    };
    let violations = builtin_mrdi_schema().validate(&tree);
    let mut out = if violations.is_empty() {
        "schema: ok\n".to_string()
    } else {
        let lines: Vec<String> = violations.iter().map(ToString::to_string).collect();
        format!("schema: {} violation(s)\n{}\n", lines.len(), lines.join("\n"))
    };
    match parse_document(text) {
        Ok(doc) => {
            match Session::seeded(0).load(&doc) {
                Ok(v) => out.push_str(&format!("loads as: {}\n", v.type_name())),
                Err(e) => out.push_str(&format!("does not load: {e}\n")),
            }
            out.push('\n');
            out.push_str(&render(&doc));
        }
        Err(e) => out.push_str(&format!("document: {e}\n")),
    }
    out
}

/// Structure of `GF(p)[x]/(f)` where `f` is given by its coefficients,
/// constant term first.
pub fn field_report(p: u32, coeffs: &[i32]) -> Result<String, String> {
    let prime = make_prime_field(p).map_err(|e| e.to_string())?;
    let r = make_poly_ring(&prime, "x").map_err(|e| e.to_string())?;
    let terms = coeffs.iter().enumerate().map(|(d, &c)| (BigUint::from(d), prime.from_int(c.into()))).collect();
    let f = r.poly(terms).map_err(|e| e.to_string())?;
    let k = make_fq_field_lenient(&f).map_err(|e| e.to_string())?;
    let order = k.order().map(|o| o.to_string()).unwrap_or_default();
    if k.order().is_some_and(|o| o > BigUint::from(4096u32)) {
        return Ok(format!("GF({p})[x]/({f}) has {order} elements; too many to enumerate here"));
    }
    let elems = enumerate_field(&k).map_err(|e| e.to_string())?;
    let units = elems.iter().filter(|a| elems.iter().any(|b| mul(a, b).is_ok_and(|c| c == k.one()))).count();
    let a = k.gen().map_err(|e| e.to_string())?;
    let mut x = a.clone();
    let mut gen_order = None;
    for n in 1..=elems.len() {
        if x == k.one() {
            gen_order = Some(n);
            break;
        }
        x = mul(&x, &a).map_err(|e| e.to_string())?;
    }
    let verdict = if k.is_field() { "a field" } else { "not a field: the modulus is reducible" };
    Ok(format!(
        "GF({p})[x]/({f}) is {verdict}\nelements: {order}\nunits: {units}\nmultiplicative order of x: {}",
        gen_order.map_or("x is not a unit".into(), |n| n.to_string())
    ))
}

/// A random polynomial over `GF(p^2)` saved by a seeded session.
pub fn random_polynomial_document(p: u32, seed: u64, compact: bool) -> Result<String, String> {
    let prime = make_prime_field(p).map_err(|e| e.to_string())?;
    let r = make_poly_ring(&prime, "x").map_err(|e| e.to_string())?;
    let k = (1..p)
        .find_map(|c| {
            let f = r
                .poly(vec![(BigUint::from(0u32), prime.from_int(c.into())), (BigUint::from(2u32), prime.one())])
                .ok()?;
            mrdi_core::algebra::make_fq_field(&f).ok()
        })
        .or_else(|| {
            let f = r
                .poly(vec![
                    (BigUint::from(0u32), prime.one()),
                    (BigUint::from(1u32), prime.one()),
                    (BigUint::from(2u32), prime.one()),
                ])
                .ok()?;
            mrdi_core::algebra::make_fq_field(&f).ok()
        })
        .ok_or("no quadratic extension found")?;
    let ring = make_mpoly_ring(&k, &["y", "z"]).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let terms = (0..rng.gen_range(1..6))
        .map(|_| {
            let coeff = random_coefficient(&mut rng, &k, p);
            (exponents(&[rng.gen_range(0..5), rng.gen_range(0..5)]), coeff)
        })
        .collect();
    let poly = ring.mpoly(terms).map_err(|e| e.to_string())?;
    let style = if compact { Style::Compact } else { Style::Pretty };
    Session::seeded(seed).save_string(&poly.into(), style).map_err(|e| e.to_string())
}

fn random_coefficient(rng: &mut ChaCha8Rng, k: &Ring, p: u32) -> mrdi_core::algebra::RingElem {
    let prime = k.as_fq().unwrap().prime_field().clone();
    let c: Vec<_> = (0..2).map(|_| prime.from_int(rng.gen_range(0..p).into())).collect();
    k.fq_from_coeffs(&c).unwrap()
}

#[wasm_bindgen]
pub fn inspect(text: &str) -> String {
    inspect_report(text)
}

#[wasm_bindgen]
pub fn explore_field(p: u32, coeffs: Vec<i32>) -> Result<String, JsError> {
    field_report(p, &coeffs).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn random_polynomial(p: u32, seed: u32, compact: bool) -> Result<String, JsError> {
    random_polynomial_document(p, seed.into(), compact).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reducible_quotient_report() {
        let r = field_report(7, &[1, 1, 1]).unwrap();
        assert!(r.contains("not a field"), "{r}");
        assert!(r.contains("elements: 49\nunits: 36\nmultiplicative order of x: 3"), "{r}");
        let g = field_report(7, &[1, 0, 1]).unwrap();
        assert!(g.contains("is a field") && g.contains("units: 48"), "{g}");
        assert!(field_report(8, &[1, 1]).is_err());
    }

    #[test]
    fn generated_documents_inspect_cleanly() {
        for p in [2, 3, 5, 7] {
            let doc = random_polynomial_document(p, 11, false).unwrap();
            assert_eq!(doc, random_polynomial_document(p, 11, false).unwrap());
            let report = inspect_report(&doc);
            assert!(report.starts_with("schema: ok\nloads as: MPolyRingElem\n"), "{report}");
            assert!(report.contains("_refs: 3 (dependencies first)"), "{report}");
        }
        assert!(inspect_report("{").starts_with("not JSON"));
        assert!(inspect_report(r#"{"_refs":{"xyz":{}}}"#).contains("violation"));
    }
}
