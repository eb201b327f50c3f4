//! Exhaustive checks of the finite-field evaluation layer.

use std::sync::Arc;

use wittforms_core::diagform::DiagonalForm;
use wittforms_core::equivalence::multisets;
use wittforms_core::ffield::make_field;
use wittforms_core::pointwise::{
    brute_force_zero, classify, evaluate, i_decompose, is_i_form, is_isotropic, represented_classes, IsotropyMethod,
    SearchBudget,
};
use wittforms_core::powerclass::PowerClassGroup;

fn ctx(p: u64, d: u32) -> Arc<PowerClassGroup> {
    PowerClassGroup::of_field(make_field(p, 1, d).unwrap())
}

fn forms(ctx: &Arc<PowerClassGroup>, max_dim: u64) -> Vec<DiagonalForm> {
    multisets(ctx.order(), max_dim)
        .into_iter()
        .map(|m| {
            let f = DiagonalForm::from_mult(ctx.clone(), m).unwrap();
            DiagonalForm::from_coeffs(ctx.clone(), &f.representative_coeffs().unwrap()).unwrap()
        })
        .collect()
}

#[test]
fn represented_set_depends_only_on_classes() {
    for p in [7, 13] {
        let ctx = ctx(p, 3);
        let field = ctx.require_field().unwrap().clone();
        for f in forms(&ctx, 3) {
            let base = represented_classes(&f).unwrap().represented;
            let coeffs = f.representative_coeffs().unwrap();
            // swap every coefficient for another member of its class
            let moved: Vec<u32> = coeffs.iter().map(|&a| *field.class_members(field.class_of(a).unwrap()).last().unwrap()).collect();
            let g = DiagonalForm::from_coeffs(ctx.clone(), &moved).unwrap();
            assert_eq!(represented_classes(&g).unwrap().represented, base);
        }
    }
}

#[test]
fn similarity_factors_preserve_represented_set() {
    for p in [7, 13] {
        let ctx = ctx(p, 3);
        let group = ctx.group().clone();
        for f in forms(&ctx, 4) {
            let d = represented_classes(&f).unwrap().represented;
            for &g in f.similarity_group().members() {
                let mut shifted: Vec<usize> = d.iter().map(|&x| group.add(x, g)).collect();
                shifted.sort_unstable();
                assert_eq!(shifted, d, "G(phi) D(phi) = D(phi) fails for {f}");
            }
        }
    }
}

#[test]
fn round_universal_equivalence_f13() {
    for d in [3, 4] {
        let ctx = ctx(13, d);
        for f in forms(&ctx, 5).into_iter().filter(|f| !f.is_zero()) {
            let c = classify(&f, SearchBudget::default()).unwrap();
            assert!(c.consistent, "d = {d}, {f}: {c:?}");
        }
    }
}

#[test]
fn shortcut_agrees_with_brute_force() {
    let budget = SearchBudget::default();
    for (p, max_dim) in [(7u64, 6u64), (13, 5)] {
        let ctx = ctx(p, 3);
        let field = ctx.require_field().unwrap().clone();
        for f in forms(&ctx, max_dim).into_iter().filter(|f| f.dim() > 3) {
            let r = is_isotropic(&f, budget).unwrap();
            assert_eq!(r.method, IsotropyMethod::Shortcut);
            let coeffs = f.representative_coeffs().unwrap();
            let w = r.witness.unwrap();
            assert!(w.iter().any(|&x| x != 0));
            assert_eq!(evaluate(&field, &coeffs, &w), 0);
            let brute = brute_force_zero(&field, &coeffs, budget.cross_check).unwrap();
            assert!(brute.is_some(), "{f}");
        }
    }
}

#[test]
fn isotropy_is_monotone_under_sums() {
    let ctx = ctx(7, 3);
    let budget = SearchBudget::default();
    let all = forms(&ctx, 3);
    for a in &all {
        if !is_isotropic(a, budget).unwrap().isotropic {
            continue;
        }
        for b in &all {
            let s = DiagonalForm::from_coeffs(
                ctx.clone(),
                &[a.representative_coeffs().unwrap(), b.representative_coeffs().unwrap()].concat(),
            )
            .unwrap();
            assert!(is_isotropic(&s, budget).unwrap().isotropic);
        }
    }
}

#[test]
fn i_forms_are_h_forms_and_decompose() {
    let budget = SearchBudget::default();
    for p in [7, 13] {
        let ctx = ctx(p, 3);
        for f in forms(&ctx, 5) {
            if is_i_form(&f, budget).unwrap() {
                assert!(f.is_h_form(&ctx.maximal()).unwrap());
            }
            let (r, t) = i_decompose(&f, budget).unwrap();
            assert_eq!(r.osum(&t).unwrap(), f);
            assert!(is_i_form(&t, budget).unwrap());
        }
    }
}
