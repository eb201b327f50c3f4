//! Invariants of the diagonal Witt calculus, as property tests.

use std::sync::Arc;

use proptest::prelude::*;
use wittforms_core::diagform::DiagonalForm;
use wittforms_core::group::{AbGroup, Subgroup};
use wittforms_core::groupring::NormIdeal;
use wittforms_core::powerclass::PowerClassGroup;

/// A context, one of its subgroups, and a few random multiplicity vectors.
fn setup() -> impl Strategy<Value = (Arc<PowerClassGroup>, Subgroup, Vec<Vec<u64>>)> {
    let groups = prop_oneof![
        Just(vec![2u32]),
        Just(vec![3]),
        Just(vec![4]),
        Just(vec![6]),
        Just(vec![2, 2]),
        Just(vec![2, 4]),
    ];
    groups.prop_flat_map(|factors| {
        let ctx = PowerClassGroup::abstract_group(AbGroup::new(factors).unwrap(), 3);
        let subs = Subgroup::enumerate_all(ctx.group().clone());
        let n = ctx.order();
        (
            Just(ctx),
            proptest::sample::select(subs),
            proptest::collection::vec(proptest::collection::vec(0u64..5, n), 3),
        )
    })
}

fn form(ctx: &Arc<PowerClassGroup>, m: &[u64]) -> DiagonalForm {
    DiagonalForm::from_mult(ctx.clone(), m.to_vec()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn decomposition_is_exact_and_idempotent((ctx, h, ms) in setup()) {
        let f = form(&ctx, &ms[0]);
        let (r, t) = f.h_decompose(&h).unwrap();
        prop_assert_eq!(r.osum(&t).unwrap(), f.clone());
        prop_assert!(t.is_h_form(&h).unwrap());
        prop_assert!(r.is_h_reduced(&h).unwrap());
        let (r2, t2) = r.h_decompose(&h).unwrap();
        prop_assert_eq!(r2, r);
        prop_assert!(t2.is_zero());
    }

    #[test]
    fn h_forms_are_unions_of_cosets((ctx, h, ms) in setup()) {
        let f = form(&ctx, &ms[0]);
        let (_, t) = f.h_decompose(&h).unwrap();
        prop_assert_eq!(t.dim() % h.order() as u64, 0);
        for coset in h.cosets() {
            let m = t.mult()[coset[0]];
            prop_assert!(coset.iter().all(|&g| t.mult()[g] == m));
        }
        prop_assert_eq!(f.dim_index(&h).unwrap(), f.h_reduce(&h).unwrap().dim() % h.order() as u64);
    }

    #[test]
    fn reduction_commutes_with_h_scaling((ctx, h, ms) in setup()) {
        let f = form(&ctx, &ms[0]);
        for &x in h.members() {
            prop_assert_eq!(f.scale(x).unwrap().h_reduce(&h).unwrap(), f.h_reduce(&h).unwrap().scale(x).unwrap());
        }
    }

    #[test]
    fn equivalence_is_norm_ideal_membership((ctx, h, ms) in setup()) {
        let (a, b) = (form(&ctx, &ms[0]), form(&ctx, &ms[1]));
        let diff = a.to_groupring_raw().sub(&b.to_groupring_raw()).unwrap();
        prop_assert_eq!(a.h_equivalent(&b, &h).unwrap(), NormIdeal::new(&h).contains(&diff).unwrap());
    }

    #[test]
    fn witt_operations_respect_equivalence((ctx, h, ms) in setup()) {
        let (a, b, c) = (form(&ctx, &ms[0]), form(&ctx, &ms[1]), form(&ctx, &ms[2]));
        // replacing a by an equivalent form changes neither sum nor product class
        let a2 = a.osum(&DiagonalForm::coset_form(ctx.clone(), &h, ms[2][0] as usize % ctx.order()).unwrap()).unwrap();
        prop_assert!(a.osum(&b).unwrap().h_equivalent(&a2.osum(&b).unwrap(), &h).unwrap());
        prop_assert!(a.tensor(&b).unwrap().h_equivalent(&a2.tensor(&b).unwrap(), &h).unwrap());
        // distributivity holds already at multiset level
        prop_assert_eq!(
            a.tensor(&b.osum(&c).unwrap()).unwrap(),
            a.tensor(&b).unwrap().osum(&a.tensor(&c).unwrap()).unwrap()
        );
        // inverse: Φ ⊥ -Φ is an H-form, and the orbit inverse agrees
        let n = a.witt_neg(&h).unwrap();
        prop_assert!(a.osum(&n).unwrap().is_h_form(&h).unwrap());
        prop_assert!(n.h_equivalent(&a.orbit_inverse(&h).unwrap(), &h).unwrap());
    }

    #[test]
    fn tensor_is_group_ring_product((ctx, _h, ms) in setup()) {
        let (a, b) = (form(&ctx, &ms[0]), form(&ctx, &ms[1]));
        let prod = a.to_groupring_raw().mul(&b.to_groupring_raw()).unwrap();
        prop_assert_eq!(a.tensor(&b).unwrap().to_groupring_raw(), prod);
        // permanent identity of the product
        let g = ctx.group();
        let expect = g.add(g.times(b.dim() as i128, a.permanent()), g.times(a.dim() as i128, b.permanent()));
        prop_assert_eq!(a.tensor(&b).unwrap().permanent(), expect);
    }

    #[test]
    fn similarity_group_is_a_subgroup((ctx, _h, ms) in setup()) {
        let f = form(&ctx, &ms[0]);
        let s = f.similarity_group();
        prop_assert!(s.contains(0));
        for &x in s.members() {
            prop_assert_eq!(f.scale(x).unwrap(), f.clone());
        }
        prop_assert!(f.is_h_form(&s).unwrap());
    }
}
