use proptest::prelude::*;

use ghk_core::fincat::{atom_factorize, transversal, xg_factorize};
use ghk_core::fuzz::{gen_action, gen_skeleton, GenParams};
use ghk_core::kgraph::{validate_kgraph, EdgeIx, KGraph};
use ghk_core::product::build_product;
use ghk_core::zsaction::validate_action;
use ghk_core::Degree;

/// A composable edge word picked by walking backwards from the choices.
fn walk(kg: &KGraph, start: usize, choices: &[usize]) -> Vec<EdgeIx> {
    let mut word = Vec::new();
    let mut v = ghk_core::fincat::ObjIx(start % kg.object_count());
    for &c in choices {
        let into = kg.edges_into(v);
        if into.is_empty() {
            break;
        }
        let e = into[c % into.len()];
        word.push(e);
        v = kg.edge(e).dom;
    }
    word
}

fn skeleton(seed: u64, k: usize) -> KGraph {
    validate_kgraph(&gen_skeleton(&GenParams::new(seed), k)).expect("generated skeletons are valid")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn normalize_is_idempotent_and_sorted(seed in 0u64..500, k in 1usize..=3, start in 0usize..3,
                                          choices in prop::collection::vec(0usize..8, 1..8)) {
        let kg = skeleton(seed, k);
        let word = walk(&kg, start, &choices);
        prop_assume!(!word.is_empty());
        let p = kg.normalize(&word).unwrap();
        let colors: Vec<usize> = p.edges().iter().map(|&e| kg.color(e)).collect();
        prop_assert!(colors.windows(2).all(|w| w[0] <= w[1]));
        prop_assert_eq!(kg.normalize(p.edges()).unwrap(), p.clone());
        prop_assert!(kg.all_normal_forms(&word).len() == 1);
        prop_assert_eq!(p.degree().total() as usize, word.len());
    }

    #[test]
    fn composition_adds_degrees_and_associates(seed in 0u64..500, k in 1usize..=3, start in 0usize..3,
                                               choices in prop::collection::vec(0usize..8, 3..9),
                                               cut1 in 0usize..9, cut2 in 0usize..9) {
        let kg = skeleton(seed, k);
        let word = walk(&kg, start, &choices);
        prop_assume!(word.len() >= 3);
        let (i, j) = { let a = 1 + cut1 % (word.len() - 1); let b = 1 + cut2 % (word.len() - 1); (a.min(b), a.max(b)) };
        prop_assume!(i < j);
        let p = kg.normalize(&word[..i]).unwrap();
        let q = kg.normalize(&word[i..j]).unwrap();
        let r = kg.normalize(&word[j..]).unwrap();
        let pq = kg.compose_paths(&p, &q).unwrap();
        let qr = kg.compose_paths(&q, &r).unwrap();
        let left = kg.compose_paths(&pq, &r).unwrap();
        prop_assert_eq!(&left, &kg.compose_paths(&p, &qr).unwrap());
        prop_assert_eq!(&left, &kg.normalize(&word).unwrap());
        prop_assert_eq!(pq.degree(), &p.degree().checked_add(q.degree()).unwrap());
    }

    #[test]
    fn factor_recomposes(seed in 0u64..500, k in 1usize..=3, start in 0usize..3,
                         choices in prop::collection::vec(0usize..8, 0..8), pick in 0usize..1000) {
        let kg = skeleton(seed, k);
        let word = walk(&kg, start, &choices);
        prop_assume!(!word.is_empty());
        let p = kg.normalize(&word).unwrap();
        let splits = p.degree().splits();
        let (m, n) = &splits[pick % splits.len()];
        let (h, t) = kg.factor(&p, m).unwrap();
        prop_assert_eq!(h.degree(), m);
        prop_assert_eq!(t.degree(), n);
        prop_assert_eq!(kg.compose_paths(&h, &t).unwrap(), p);
    }

    #[test]
    fn splits_enumerate_the_box(d in prop::collection::vec(0u32..4, 1..4)) {
        let deg = Degree::from_vec(d.clone());
        let splits = deg.splits();
        prop_assert_eq!(splits.len() as u32, d.iter().map(|n| n + 1).product::<u32>());
        for (m, n) in &splits {
            prop_assert_eq!(&m.checked_add(n).unwrap(), &deg);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    /// Product windows of generated actions are associative categories whose
    /// arrows all factor over the transversal.
    #[test]
    fn product_windows_factor(seed in 0u64..100_000) {
        let cand = gen_action(&GenParams::new(seed));
        let Ok(a) = validate_action(&cand.doc) else { return Ok(()) };
        let bound = Degree::from_vec(vec![2; a.kgraph().rank()]);
        let p = build_product(&a, &bound).unwrap();
        let cat = &p.category;
        for x in cat.arrows() {
            for &(y, xy) in cat.right_products(x) {
                for &(z, yz) in cat.right_products(y) {
                    prop_assert_eq!(cat.compose(xy, z), cat.compose(x, yz));
                }
            }
        }
        let xs = transversal(cat, &p.size).unwrap();
        for t in cat.arrows() {
            let f = xg_factorize(cat, &p.size, &xs, t).unwrap();
            let mut seq = f.xs.clone();
            seq.push(f.residue);
            prop_assert_eq!(cat.compose_all(&seq), Some(t));
            if !cat.is_invertible(t) {
                let atoms = atom_factorize(cat, &p.size, t).unwrap();
                prop_assert_eq!(cat.compose_all(&atoms), Some(t));
            }
        }
    }
}
