//! Property tests for the algebraic core.

use proptest::prelude::*;

use cgw::class_data::Partition;
use cgw::field_tower::{frobenius, make_field, FieldElement, FieldSpec};
use cgw::polyalg::{dual, factorize, twisted_dual, Poly};

fn f9() -> FieldSpec {
    make_field(3, 2).unwrap()
}

fn f25() -> FieldSpec {
    make_field(5, 2).unwrap()
}

fn element(spec: FieldSpec) -> impl Strategy<Value = FieldElement> {
    let p = spec.p();
    let k = spec.k();
    proptest::collection::vec(0..p, k).prop_map(move |coords| spec.element(coords).unwrap())
}

fn poly(spec: FieldSpec, max_deg: usize) -> impl Strategy<Value = Poly> {
    let inner = spec.clone();
    (1..=max_deg)
        .prop_flat_map(move |deg| proptest::collection::vec(element(inner.clone()), deg + 1))
        .prop_map(move |coeffs| Poly::new(&spec, coeffs))
}

proptest! {
    #[test]
    fn field_axioms_f9(a in element(f9()), b in element(f9()), c in element(f9())) {
        prop_assert_eq!(a.add_ref(&b), b.add_ref(&a));
        prop_assert_eq!(a.mul_ref(&b), b.mul_ref(&a));
        prop_assert_eq!(a.add_ref(&b).add_ref(&c), a.add_ref(&b.add_ref(&c)));
        prop_assert_eq!(a.mul_ref(&b).mul_ref(&c), a.mul_ref(&b.mul_ref(&c)));
        prop_assert_eq!(
            a.mul_ref(&b.add_ref(&c)),
            a.mul_ref(&b).add_ref(&a.mul_ref(&c))
        );
        if !a.is_zero() {
            let inv = a.inverse().unwrap();
            prop_assert!(a.mul_ref(&inv).is_one());
        }
    }

    #[test]
    fn frobenius_is_additive_and_multiplicative_f25(a in element(f25()), b in element(f25())) {
        prop_assert_eq!(
            frobenius(&a.add_ref(&b), 1),
            frobenius(&a, 1).add_ref(&frobenius(&b, 1))
        );
        prop_assert_eq!(
            frobenius(&a.mul_ref(&b), 1),
            frobenius(&a, 1).mul_ref(&frobenius(&b, 1))
        );
    }

    #[test]
    fn dual_and_twisted_dual_are_involutions(f in poly(f9(), 5)) {
        prop_assume!(!f.is_zero());
        let monic = f.make_monic();
        prop_assume!(!monic.coeff(0).is_zero());
        let d = dual(&monic).unwrap();
        prop_assert_eq!(d.deg(), monic.deg());
        prop_assert_eq!(dual(&d).unwrap(), monic.clone());
        let td = twisted_dual(&monic, 3).unwrap();
        prop_assert_eq!(twisted_dual(&td, 3).unwrap(), monic);
    }

    #[test]
    fn factorization_remultiplies(f in poly(f9(), 5)) {
        prop_assume!(!f.is_zero());
        let fact = factorize(&f).unwrap();
        prop_assert_eq!(fact.product(), f);
    }

    #[test]
    fn partition_predicates_match_direct_recount(parts in proptest::collection::vec(1u32..6, 0..6)) {
        let mut sorted = parts.clone();
        sorted.sort_unstable_by(|a, b| b.cmp(a));
        let partition = Partition::new(sorted.clone()).unwrap();
        let mult = |x: u32| sorted.iter().filter(|&&y| y == x).count();
        let symplectic = sorted.iter().all(|&x| x % 2 == 0 || mult(x) % 2 == 0);
        let orthogonal = sorted.iter().all(|&x| x % 2 == 1 || mult(x) % 2 == 0);
        prop_assert_eq!(partition.is_symplectic(), symplectic);
        prop_assert_eq!(partition.is_orthogonal(), orthogonal);
    }
}
