use std::time::{Duration, Instant};

use ghk_core::fincat::{load, transversal, verify_size_lemmas};
use ghk_core::fixtures;
use ghk_core::kgraph::validate_kgraph;
use ghk_core::laws::{
    check_cancellative_both, check_equidivisible, check_levi_equivalence, check_r_condition, check_wfp, LawError,
};
use ghk_core::product::{build_product, verify_product_laws};
use ghk_core::zsaction::validate_action;
use ghk_core::Degree;

#[test]
fn diamond_fails_both_sides_of_levi() {
    let (cat, size) = load(&fixtures::diamond()).unwrap();
    let size = size.unwrap();
    let r = check_levi_equivalence(&cat, &size).unwrap();
    let sides = r.levi.unwrap();
    assert!(r.holds);
    assert!(!sides.levi && !sides.wfp && !sides.equidivisible);
    for w in &check_wfp(&cat, &size).witnesses {
        assert!(w.reverify(&cat, Some(&size)));
    }
}

#[test]
fn free_monoid_window_is_levi() {
    let kg = validate_kgraph(&fixtures::free2()).unwrap();
    let (cat, size) = kg.truncation(&Degree::from_vec(vec![4])).unwrap();
    let r = check_levi_equivalence(&cat, &size).unwrap();
    let sides = r.levi.unwrap();
    assert!(sides.levi && sides.wfp && sides.atoms_are_degree_one);
    assert!(check_cancellative_both(&cat).holds);
}

#[test]
fn levi_rejects_higher_rank() {
    let kg = validate_kgraph(&fixtures::n2()).unwrap();
    let (cat, size) = kg.truncation(&Degree::from_vec(vec![2, 2])).unwrap();
    assert_eq!(check_levi_equivalence(&cat, &size), Err(LawError::WrongRank(2)));
    assert!(check_wfp(&cat, &size).holds);
    // ef = fe has no interpolant in either direction.
    assert!(!check_equidivisible(&cat).holds);
}

#[test]
fn n2_window_satisfies_r_condition() {
    let kg = validate_kgraph(&fixtures::n2()).unwrap();
    let (cat, size) = kg.truncation(&Degree::from_vec(vec![3, 3])).unwrap();
    assert_eq!(cat.arrow_count(), 16);
    let xs = transversal(&cat, &size).unwrap();
    assert_eq!(xs.len(), 2);
    assert!(check_r_condition(&cat, &xs).holds);
}

#[test]
fn swap_windows_satisfy_product_laws() {
    let a = validate_action(&fixtures::swap()).unwrap();
    for b in 1..=4 {
        let laws = verify_product_laws(&a, &Degree::from_vec(vec![b]));
        assert!(laws.all_hold(), "bound {b}: {laws:?}");
    }
    assert_eq!(build_product(&a, &Degree::from_vec(vec![2])).unwrap().len(), 14);
}

#[test]
fn lemma_suite_is_quick_on_small_fixtures() {
    let start = Instant::now();
    let (diamond, dsize) = load(&fixtures::diamond()).unwrap();
    assert!(verify_size_lemmas(&diamond, &dsize.unwrap()).is_empty());
    let a = validate_action(&fixtures::swap()).unwrap();
    let p = build_product(&a, &Degree::from_vec(vec![4])).unwrap();
    assert!(p.len() <= 200);
    assert!(verify_size_lemmas(&p.category, &p.size).is_empty());
    let kg = validate_kgraph(&fixtures::n2()).unwrap();
    let (cat, size) = kg.truncation(&Degree::from_vec(vec![3, 3])).unwrap();
    assert!(verify_size_lemmas(&cat, &size).is_empty());
    assert!(start.elapsed() < Duration::from_secs(10));
}
