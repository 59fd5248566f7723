//! Unique factorization checked against the brute-force model in
//! `support/oracle.rs`.

#[path = "support/oracle.rs"]
mod oracle;

use ghk_core::fixtures;
use ghk_core::fuzz::{gen_skeleton, GenParams};
use oracle::check_skeleton;

#[test]
fn n2_factorizations_match_brute_force() {
    assert!(check_skeleton(&fixtures::n2(), &[3, 3]) > 0);
}

#[test]
fn free2_factorizations_match_brute_force() {
    assert!(check_skeleton(&fixtures::free2(), &[3]) > 0);
}

#[test]
fn random_rank2_skeletons_match_brute_force() {
    let mut with_squares = 0;
    for seed in 0..200 {
        let doc = gen_skeleton(&GenParams::new(seed), 2);
        with_squares += usize::from(!doc.squares.is_empty());
        check_skeleton(&doc, &[3, 3]);
    }
    assert!(with_squares >= 30, "only {with_squares} skeletons had squares");
}

#[test]
fn random_rank3_skeletons_match_brute_force() {
    let mut with_squares = 0;
    for seed in 0..200 {
        let doc = gen_skeleton(&GenParams::new(seed), 3);
        with_squares += usize::from(!doc.squares.is_empty());
        check_skeleton(&doc, &[3, 3, 3]);
    }
    assert!(with_squares >= 30, "only {with_squares} skeletons had squares");
}
