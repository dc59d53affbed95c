use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use proptest::prelude::*;

use super::*;

fn fp(p: u64) -> Ring {
    make_prime_field(p).unwrap()
}

fn upoly(ring: &Ring, dense: &[i64]) -> RingElem {
    let base = ring.as_poly().unwrap().base_ring().clone();
    ring.poly(dense.iter().enumerate().map(|(d, &c)| (BigUint::from(d), base.from_int(c))).collect()).unwrap()
}

/// `GF(p)[x]/(modulus)` with `modulus` dense, constant term first.
fn quotient(p: u64, modulus: &[i64], lenient: bool) -> Result<Ring, AlgebraError> {
    let r = make_poly_ring(&fp(p), "x")?;
    let f = upoly(&r, modulus);
    if lenient {
        make_fq_field_lenient(&f)
    } else {
        make_fq_field(&f)
    }
}

fn dense(e: &RingElem) -> Vec<u64> {
    match &e.value {
        Value::Fq(v) => v.iter().map(|c| c.to_u64().unwrap()).collect(),
        Value::Fp(c) => vec![c.to_u64().unwrap()],
        _ => panic!("not a finite field element"),
    }
}

fn index(e: &RingElem, p: u64) -> usize {
    dense(e).iter().rev().fold(0u64, |acc, &c| acc * p + c) as usize
}

/// Schoolbook product reduced by long division; independent of the kernel.
fn oracle_mul(a: &[u64], b: &[u64], modulus: &[u64], p: u64) -> Vec<u64> {
    let d = modulus.len() - 1;
    let mut prod = vec![0u64; a.len() + b.len()];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    for k in (d..prod.len()).rev() {
        let c = prod[k];
        if c == 0 {
            continue;
        }
        for (j, &m) in modulus.iter().enumerate() {
            prod[k - d + j] = (prod[k - d + j] + p * p - c * m) % p;
        }
    }
    prod.truncate(d);
    prod
}

struct Tables {
    n: usize,
    add: Vec<usize>,
    mul: Vec<usize>,
}

fn tables(ring: &Ring) -> (Vec<RingElem>, Tables) {
    let elems = enumerate_field(ring).unwrap();
    let p = ring
        .as_fq()
        .map_or_else(|| ring.as_prime().unwrap().modulus().to_u64().unwrap(), |f| f.characteristic().to_u64().unwrap());
    let n = elems.len();
    for (i, e) in elems.iter().enumerate() {
        assert_eq!(index(e, p), i, "enumeration order");
    }
    let mut add_t = vec![0; n * n];
    let mut mul_t = vec![0; n * n];
    for i in 0..n {
        for j in 0..n {
            add_t[i * n + j] = index(&add(&elems[i], &elems[j]).unwrap(), p);
            mul_t[i * n + j] = index(&mul(&elems[i], &elems[j]).unwrap(), p);
        }
    }
    (elems, Tables { n, add: add_t, mul: mul_t })
}

fn assert_field_axioms(ring: &Ring) {
    let (elems, t) = tables(ring);
    let n = t.n;
    let (a, m) = (&t.add, &t.mul);
    assert_eq!(index(&ring.zero(), characteristic(ring)), 0);
    let one = index(&ring.one(), characteristic(ring));
    for x in 0..n {
        assert_eq!(a[x * n], x, "additive identity");
        assert_eq!(m[x * n + one], x, "multiplicative identity");
        assert_eq!((0..n).filter(|&y| a[x * n + y] == 0).count(), 1, "unique additive inverse");
        if x != 0 {
            assert_eq!((0..n).filter(|&y| m[x * n + y] == one).count(), 1, "unique multiplicative inverse");
            let xi = inv(&elems[x]).unwrap();
            assert_eq!(m[x * n + index(&xi, characteristic(ring))], one);
        }
        for y in 0..n {
            assert_eq!(a[x * n + y], a[y * n + x], "additive commutativity");
            assert_eq!(m[x * n + y], m[y * n + x], "multiplicative commutativity");
            for z in 0..n {
                let xy = x * n + y;
                assert_eq!(a[a[xy] * n + z], a[x * n + a[y * n + z]], "additive associativity");
                assert_eq!(m[m[xy] * n + z], m[x * n + m[y * n + z]], "multiplicative associativity");
                assert_eq!(m[x * n + a[y * n + z]], a[m[xy] * n + m[x * n + z]], "distributivity");
            }
        }
    }
}

fn characteristic(ring: &Ring) -> u64 {
    match ring.kind() {
        RingKind::Prime(f) => f.modulus().to_u64().unwrap(),
        RingKind::Fq(f) => f.characteristic().to_u64().unwrap(),
        _ => panic!("not finite"),
    }
}

#[test]
fn prime_field_axioms_exhaustive() {
    for p in [2u64, 3, 5, 7, 11, 13] {
        assert_field_axioms(&fp(p));
    }
}

#[test]
fn extension_field_axioms_exhaustive() {
    // GF(4), GF(8), GF(9), GF(25), GF(27), GF(49), GF(121), GF(125), GF(343)
    let cases: &[(u64, &[i64])] = &[
        (2, &[1, 1, 1]),
        (2, &[1, 1, 0, 1]),
        (3, &[1, 0, 1]),
        (5, &[2, 0, 1]),
        (3, &[1, 2, 0, 1]),
        (7, &[1, 0, 1]),
        (11, &[1, 0, 1]),
        (5, &[1, 1, 0, 1]),
        (7, &[2, 0, 0, 1]),
    ];
    for &(p, m) in cases {
        let f = quotient(p, m, false).unwrap_or_else(|e| panic!("GF({p})[x]/{m:?}: {e}"));
        assert!(f.is_field());
        assert!(f.is_verified());
        assert_eq!(f.order().unwrap(), BigUint::from(p).pow((m.len() - 1) as u32));
        assert_field_axioms(&f);
    }
}

#[test]
fn gf49_multiplicative_group_has_order_48() {
    let f = quotient(7, &[1, 0, 1], false).unwrap();
    let units: Vec<_> = enumerate_field(&f).unwrap().into_iter().filter(|e| !e.is_zero()).collect();
    assert_eq!(units.len(), 48);
    for u in &units {
        assert_eq!(pow(u, &BigUint::from(48u32)), f.one());
    }
    // 3 + x is a generator: its order is exactly 48
    let g = add(&f.from_int(3), &f.gen().unwrap()).unwrap();
    for d in [1u32, 2, 3, 4, 6, 8, 12, 16, 24] {
        assert_ne!(pow(&g, &BigUint::from(d)), f.one(), "order divides {d}");
    }
}

#[test]
fn multiplication_matches_oracle() {
    let cases: &[(u64, &[i64])] = &[(7, &[1, 0, 1]), (7, &[1, 1, 1]), (2, &[1, 1, 0, 1]), (5, &[1, 1, 0, 1])];
    for &(p, m) in cases {
        let f = quotient(p, m, true).unwrap();
        let modulus: Vec<u64> = m.iter().map(|&c| c as u64).collect();
        let elems = enumerate_field(&f).unwrap();
        for a in &elems {
            for b in &elems {
                assert_eq!(dense(&mul(a, b).unwrap()), oracle_mul(&dense(a), &dense(b), &modulus, p));
            }
        }
    }
}

#[test]
fn reducible_quotient_is_not_a_field() {
    // x^2 + x + 1 = (x - 2)(x - 4) over GF(7)
    assert!(matches!(quotient(7, &[1, 1, 1], false), Err(AlgebraError::Reducible(_))));
    let r = quotient(7, &[1, 1, 1], true).unwrap();
    assert!(!r.is_field());
    assert_eq!(r.as_fq().unwrap().irreducible(), Some(false));
    let elems = enumerate_field(&r).unwrap();
    assert_eq!(elems.len(), 49);
    let a = r.gen().unwrap();
    let lhs = add(&add(&mul(&a, &a).unwrap(), &a).unwrap(), &r.one()).unwrap();
    assert!(lhs.is_zero());
    let units = elems.iter().filter(|e| inv(e).is_ok()).count();
    assert_eq!(units, 36);
    let zero_div = sub(&a, &r.from_int(2)).unwrap();
    assert!(matches!(inv(&zero_div), Err(AlgebraError::NotInvertible(_))));
}

#[test]
fn worked_product_in_quotient() {
    // (a + 3) * 5a = 5a^2 + 15a = 5(-a - 1) + a = -4a - 5 = 3a + 2
    let f = quotient(7, &[1, 1, 1], true).unwrap();
    let a = f.gen().unwrap();
    let lhs = mul(&add(&a, &f.from_int(3)).unwrap(), &mul(&f.from_int(5), &a).unwrap()).unwrap();
    assert_eq!(dense(&lhs), vec![2, 3]);
    assert_eq!(dense(&lhs), oracle_mul(&[3, 1], &[0, 5], &[1, 1, 1], 7));
    assert_eq!(lhs.to_string(), "3*x + 2");
}

#[test]
fn gf8_enumeration() {
    let f = quotient(2, &[1, 1, 0, 1], false).unwrap();
    let elems = enumerate_field(&f).unwrap();
    let mut seen: Vec<Vec<u64>> = elems.iter().map(dense).collect();
    seen.sort();
    seen.dedup();
    assert_eq!(seen.len(), 8);
    let g = f.gen().unwrap();
    // powers of x cover all seven units
    let mut powers: Vec<Vec<u64>> = (0..7u32).map(|k| dense(&pow(&g, &BigUint::from(k)))).collect();
    powers.sort();
    powers.dedup();
    assert_eq!(powers.len(), 7);
}

#[test]
fn defining_polynomial_checks() {
    assert!(matches!(quotient(2, &[1, 0, 1], false), Err(AlgebraError::Reducible(_))));
    assert!(matches!(quotient(7, &[1, 0, 2], false), Err(AlgebraError::InvalidDefiningPolynomial(_))));
    assert!(matches!(quotient(7, &[3], false), Err(AlgebraError::InvalidDefiningPolynomial(_))));
    let zz = make_poly_ring(&integers(), "x").unwrap();
    assert!(matches!(make_fq_field(&upoly(&zz, &[1, 0, 1])), Err(AlgebraError::InvalidDefiningPolynomial(_))));
    assert!(matches!(make_prime_field(9u32), Err(AlgebraError::NotPrime(_))));
    assert!(matches!(make_prime_field(1u32), Err(AlgebraError::NotPrime(_))));
    let huge = make_prime_field(BigUint::from(1u64) << 80).unwrap();
    assert!(!huge.is_verified());
}

#[test]
fn degree_one_extension_generator() {
    let f = quotient(7, &[4, 1], false).unwrap();
    let g = f.gen().unwrap();
    assert_eq!(dense(&g), vec![3]);
    assert!(add(&g, &f.from_int(4)).unwrap().is_zero());
}

#[test]
fn rings_compare_by_identity() {
    let a = fp(7);
    let b = fp(7);
    assert!(!a.same(&b));
    assert!(ring_equals(&a, &b));
    assert!(a.same(&a.clone()));
    assert!(matches!(add(&a.one(), &b.one()), Err(AlgebraError::ParentMismatch { .. })));
    assert!(equals(&a.one(), &b.one()).is_err());
    assert_ne!(a.one(), b.one());
    assert!(structurally_equal_elems(&a.one(), &b.one()));
    assert!(integers().same(&integers()));
    assert!(rationals().same(&rationals()));
}

fn structurally_equal_elems(a: &RingElem, b: &RingElem) -> bool {
    AlgebraValue::Elem(a.clone()).structurally_equal(&AlgebraValue::Elem(b.clone()))
}

#[test]
fn mpoly_display_and_order() {
    let f = quotient(7, &[1, 1, 1], true).unwrap();
    let r = make_mpoly_ring(&f, &["y", "z"]).unwrap();
    let a = f.gen().unwrap();
    let terms = vec![
        (exponents(&[0, 0]), f.one()),
        (exponents(&[3, 4]), f.from_int(2)),
        (exponents(&[1, 0]), f.from_int(5)),
        (exponents(&[0, 2]), add(&a, &f.from_int(3)).unwrap()),
    ];
    let e = r.mpoly(terms).unwrap();
    assert_eq!(e.to_string(), "2*y^3*z^4 + (x + 3)*z^2 + 5*y + 1");
    let order: Vec<_> = e.mpoly_terms().unwrap().into_iter().map(|(e, _)| e).collect();
    assert_eq!(order, vec![exponents(&[3, 4]), exponents(&[0, 2]), exponents(&[1, 0]), exponents(&[0, 0])]);
}

#[test]
fn rationals_and_integers() {
    let q = rationals();
    let half = q.from_rational(BigRational::new(BigInt::from(1), BigInt::from(2))).unwrap();
    let two = inv(&half).unwrap();
    assert_eq!(two, q.from_int(2));
    assert_eq!(half.to_string(), "1//2");
    assert!(inv(&integers().from_int(2)).is_err());
    assert!(integers().from_rational(BigRational::new(BigInt::from(1), BigInt::from(2))).is_err());
}

#[test]
fn mul_vec_dimension_errors() {
    let k = fp(5);
    let m = Matrix::from_rows(vec![vec![k.one(), k.zero()]]).unwrap();
    assert!(matches!(m.mul_vec(&[k.one()]), Err(AlgebraError::DimensionMismatch(_))));
    assert!(Matrix::from_rows(vec![vec![k.one()], vec![]]).is_err());
    let other = fp(5);
    assert!(matches!(m.mul_vec(&[k.one(), other.one()]), Err(AlgebraError::ParentMismatch { .. })));
}

fn gf7_mpoly() -> (Ring, Ring) {
    let k = fp(7);
    let r = make_mpoly_ring(&k, &["y", "z"]).unwrap();
    (k, r)
}

fn arb_terms() -> impl Strategy<Value = Vec<(u64, u64, i64)>> {
    prop::collection::vec((0u64..4, 0u64..4, -10i64..10), 0..8)
}

fn build(r: &Ring, k: &Ring, t: &[(u64, u64, i64)]) -> RingElem {
    r.mpoly(t.iter().map(|&(a, b, c)| (exponents(&[a, b]), k.from_int(c))).collect()).unwrap()
}

proptest! {
    #[test]
    fn mpoly_equality_ignores_term_order(t in arb_terms(), seed in any::<u64>()) {
        let (k, r) = gf7_mpoly();
        let mut shuffled = t.clone();
        let n = shuffled.len();
        if n > 1 {
            for i in 0..n {
                shuffled.swap(i, (seed as usize).wrapping_add(i * 31) % n);
            }
        }
        prop_assert!(equals(&build(&r, &k, &t), &build(&r, &k, &shuffled)).unwrap());
    }

    #[test]
    fn canonicalization_is_idempotent(t in arb_terms()) {
        let (k, r) = gf7_mpoly();
        let e = build(&r, &k, &t);
        let again = r.mpoly(e.mpoly_terms().unwrap()).unwrap();
        prop_assert_eq!(&again, &e);
        let terms = e.mpoly_terms().unwrap();
        for w in terms.windows(2) {
            prop_assert_eq!(elem::deglex_desc(&w[0].0, &w[1].0), std::cmp::Ordering::Less);
        }
        prop_assert!(terms.iter().all(|(_, c)| !c.is_zero()));
    }

    #[test]
    fn mpoly_ring_laws(a in arb_terms(), b in arb_terms(), c in arb_terms()) {
        let (k, r) = gf7_mpoly();
        let (a, b, c) = (build(&r, &k, &a), build(&r, &k, &b), build(&r, &k, &c));
        prop_assert_eq!(mul(&a, &add(&b, &c).unwrap()).unwrap(), add(&mul(&a, &b).unwrap(), &mul(&a, &c).unwrap()).unwrap());
        prop_assert_eq!(mul(&a, &b).unwrap(), mul(&b, &a).unwrap());
        prop_assert!(sub(&a, &a).unwrap().is_zero());
        prop_assert!(add(&a, &neg(&a)).unwrap().is_zero());
        prop_assert_eq!(mul(&a, &r.one()).unwrap(), a.clone());
        prop_assert_eq!(add(&a, &r.zero()).unwrap(), a.clone());
        prop_assert_eq!(mul(&mul(&a, &b).unwrap(), &c).unwrap(), mul(&a, &mul(&b, &c).unwrap()).unwrap());
    }

    #[test]
    fn mul_vec_is_linear(
        rows in 1usize..4,
        cols in 1usize..4,
        seed in prop::collection::vec(0i64..49, 64),
    ) {
        let f = quotient(7, &[1, 0, 1], false).unwrap();
        let el = |i: usize| {
            let v = seed[i % seed.len()];
            f.fq_from_coeffs(&[f.as_fq().unwrap().prime_field().from_int(v % 7), f.as_fq().unwrap().prime_field().from_int(v / 7)]).unwrap()
        };
        let m = Matrix::new(rows, cols, (0..rows * cols).map(el).collect()).unwrap();
        let u: Vec<_> = (0..cols).map(|i| el(i + 20)).collect();
        let v: Vec<_> = (0..cols).map(|i| el(i + 40)).collect();
        let s = el(63);
        let uv: Vec<_> = u.iter().zip(&v).map(|(x, y)| add(x, y).unwrap()).collect();
        let su: Vec<_> = u.iter().map(|x| mul(&s, x).unwrap()).collect();
        let mu = m.mul_vec(&u).unwrap();
        let mv = m.mul_vec(&v).unwrap();
        let muv = m.mul_vec(&uv).unwrap();
        let msu = m.mul_vec(&su).unwrap();
        for i in 0..rows {
            prop_assert_eq!(&muv[i], &add(&mu[i], &mv[i]).unwrap());
            prop_assert_eq!(&msu[i], &mul(&s, &mu[i]).unwrap());
        }
        let id = Matrix::identity(&f, cols);
        prop_assert_eq!(id.mul_vec(&u).unwrap(), u);
    }
}
