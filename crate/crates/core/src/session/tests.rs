use super::*;
use crate::algebra::{make_mpoly_ring, make_prime_field};

#[test]
fn seeded_uuids_are_reproducible_v4() {
    let mut a = UuidSource::seeded(7);
    let mut b = UuidSource::seeded(7);
    let xs: Vec<_> = (0..5).map(|_| a.next()).collect();
    let ys: Vec<_> = (0..5).map(|_| b.next()).collect();
    assert_eq!(xs, ys);
    for u in &xs {
        assert!(is_uuid(u), "{u}");
        assert_eq!(&u[14..15], "4");
        assert!("89ab".contains(&u[19..20]));
    }
    assert_ne!(UuidSource::seeded(8).next(), xs[0]);
}

#[test]
fn builtin_registry() {
    let s = Session::seeded(0);
    assert_eq!(s.codec_names().count(), 14);
    assert_eq!(s.codec("Nemo.fpField").unwrap().type_name(), "fpField");
    assert!(matches!(s.codec("Nope"), Err(SessionError::UnregisteredType(_))));
}

#[test]
fn bindings_are_mutually_inverse() {
    let mut s = Session::seeded(1);
    let k = make_prime_field(5u32).unwrap();
    let r = make_mpoly_ring(&k, &["u", "v"]).unwrap();
    let u = s.uuid_for(&r);
    assert_eq!(s.uuid_for(&r), u);
    assert!(s.ring_of(&u).unwrap().same(&r));
    assert_eq!(s.uuid_of(&r), Some(u.as_str()));
    let other = make_mpoly_ring(&k, &["u", "v"]).unwrap();
    assert_ne!(s.uuid_for(&other), u);
    assert_eq!(s.bound_count(), 2);
}

#[test]
fn leaf_rings_are_interned() {
    let mut s = Session::seeded(2);
    let a = s.intern_leaf(make_prime_field(7u32).unwrap()).unwrap();
    let b = s.intern_leaf(make_prime_field(7u32).unwrap()).unwrap();
    let c = s.intern_leaf(make_prime_field(11u32).unwrap()).unwrap();
    assert!(a.same(&b));
    assert!(!a.same(&c));
}

#[test]
fn rebinding_a_uuid_to_another_ring_fails() {
    let mut s = Session::seeded(3);
    let k = make_prime_field(5u32).unwrap();
    let r = make_mpoly_ring(&k, &["u"]).unwrap();
    let u = s.uuid_for(&r);
    let same_shape = make_mpoly_ring(&k, &["u"]).unwrap();
    assert!(s.bind_or_reuse(&u, same_shape, "/").unwrap().same(&r));
    let different = make_mpoly_ring(&k, &["w"]).unwrap();
    assert!(matches!(s.bind_or_reuse(&u, different, "/"), Err(SessionError::UuidConflict { .. })));
}
