//! Small named structures used throughout the tests and the CLI examples.

use crate::doc::{ActionDoc, CategoryDoc, SkeletonDoc};

pub const DIAMOND_JSON: &str = include_str!("../fixtures/fx-diamond.json");
pub const Z2_JSON: &str = include_str!("../fixtures/fx-z2.json");
pub const FREE2_JSON: &str = include_str!("../fixtures/fx-free2.json");
pub const N2_JSON: &str = include_str!("../fixtures/fx-n2.json");
pub const SWAP_JSON: &str = include_str!("../fixtures/fx-swap.json");
pub const SWAP_BROKEN_JSON: &str = include_str!("../fixtures/fx-swap-broken.json");

fn parse<T: serde::de::DeserializeOwned>(s: &str) -> T {
    serde_json::from_str(s).expect("fixture parses")
}

/// Objects 0, 1, 2; atoms `a, b: 2 -> 1` and `c, d: 1 -> 0`; composites
/// `x = ca = db`, `y = cb`, `z = da`; degree 1 on atoms.
pub fn diamond() -> CategoryDoc {
    parse(DIAMOND_JSON)
}

/// The group `{1, s}` of order two on object `0`.
pub fn z2_groupoid() -> CategoryDoc {
    parse(Z2_JSON)
}

/// The free monoid on `a, b` as a 1-graph.
pub fn free2() -> SkeletonDoc {
    parse(FREE2_JSON)
}

/// `N^2`: one loop of each color and the square `f·e = e·f`.
pub fn n2() -> SkeletonDoc {
    parse(N2_JSON)
}

/// `s` swaps `a` and `b` and restricts to itself.
pub fn swap() -> ActionDoc {
    parse(SWAP_JSON)
}

/// As [`swap`] but with `s|a = 1`, which breaks `(gh)|x = g|(h·x) h|x`.
pub fn swap_broken() -> ActionDoc {
    parse(SWAP_BROKEN_JSON)
}

/// The identity-only groupoid on the objects of `skeleton`, acting trivially.
pub fn trivial_action(skeleton: SkeletonDoc) -> ActionDoc {
    use crate::doc::{ActionRowDoc, ArrowDoc};
    let ident = |o: &str| format!("1_{o}");
    let groupoid = CategoryDoc {
        objects: skeleton.objects.clone(),
        arrows: skeleton.objects.iter().map(|o| ArrowDoc { id: ident(o), dom: o.clone(), cod: o.clone() }).collect(),
        identities: skeleton.objects.iter().map(|o| (o.clone(), ident(o))).collect(),
        compose: Vec::new(),
        ..Default::default()
    };
    let on_edges = skeleton
        .edges
        .iter()
        .map(|e| ActionRowDoc { g: ident(&e.cod), e: e.id.clone(), ge: e.id.clone(), rest: ident(&e.dom) })
        .collect();
    ActionDoc { kgraph: skeleton, groupoid, on_edges }
}
