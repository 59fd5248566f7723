//! Checkers for the defining properties of generalized higher-rank graphs.
//!
//! Each checker scans the whole table and returns a [`LawReport`]. On a
//! truncated table the scan covers only arrows and composites inside the
//! window, and the report records the window.

use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::fincat::{ArrowIx, FinCategory, SizeFunctor};

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Law {
    Wfp,
    Equidivisible,
    LeftCancellative,
    RightCancellative,
    Cancellative,
    RCondition,
    LeviEquivalence,
    AtomDegree,
    TrivialStabilizers,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CancelSide {
    Left,
    Right,
}

/// A counterexample, named by arrow ids so it survives serialization.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness {
    /// No factorization of `arrow` at the split `m + n`.
    MissingSplit { arrow: String, m: Vec<u32>, n: Vec<u32> },
    /// The factorizations at the split fall into several orbits.
    SplitOrbits { arrow: String, m: Vec<u32>, n: Vec<u32>, orbits: Vec<Vec<[String; 2]>> },
    /// `ab = cd` with no interpolant either way.
    NoInterpolant { ab: [String; 2], cd: [String; 2] },
    /// `ax = ay` (left) or `xa = ya` (right) with `x != y`.
    NotCancellative { side: CancelSide, a: String, x: String, y: String },
    /// `u = v·g` inside the subcategory generated by the transversal, with
    /// `g` not an identity.
    NonUniqueRepresentation { u: String, v: String, g: String },
    /// `u·g = u` with `g` not an identity.
    NontrivialStabilizer { u: String, g: String },
    /// Being an atom disagrees with having a unit degree.
    AtomDegree { arrow: String, atom: bool, degree: Vec<u32> },
    /// The two sides of the Levi equivalence disagree.
    LeviMismatch { levi: bool, wfp: bool },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LeviSides {
    pub equidivisible: bool,
    pub atoms_are_degree_one: bool,
    pub levi: bool,
    pub wfp: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LawReport {
    pub law: Law,
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transversal: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub levi: Option<LeviSides>,
    pub witnesses: Vec<Witness>,
}

impl LawReport {
    fn new(law: Law, cat: &FinCategory, mut witnesses: Vec<Witness>) -> Self {
        witnesses.sort();
        witnesses.dedup();
        LawReport {
            law,
            holds: witnesses.is_empty(),
            bound: cat.bound().map(|b| b.as_slice().to_vec()),
            transversal: None,
            levi: None,
            witnesses,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LawError {
    #[error("the Levi equivalence needs a size functor of rank 1, found rank {0}")]
    WrongRank(usize),
}

pub fn is_atom(cat: &FinCategory, a: ArrowIx) -> bool {
    !cat.is_invertible(a) && cat.factorizations(a).iter().all(|&(b, c)| cat.is_invertible(b) || cat.is_invertible(c))
}

fn pair(cat: &FinCategory, a: ArrowIx, b: ArrowIx) -> [String; 2] {
    [cat.id(a).to_string(), cat.id(b).to_string()]
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Orbits of the factorizations of `a` whose left factor has degree `m`,
/// under `(a1, a2) ~ (a1·g, g⁻¹·a2)`.
fn split_orbits(cat: &FinCategory, size: &SizeFunctor, a: ArrowIx, m: &[u32]) -> Vec<Vec<(ArrowIx, ArrowIx)>> {
    let facts: Vec<(ArrowIx, ArrowIx)> =
        cat.factorizations(a).iter().copied().filter(|&(b, _)| size.degree(b).as_slice() == m).collect();
    let index: HashMap<(ArrowIx, ArrowIx), usize> = facts.iter().enumerate().map(|(i, &f)| (f, i)).collect();
    let mut parent: Vec<usize> = (0..facts.len()).collect();
    for (i, &(a1, a2)) in facts.iter().enumerate() {
        for &(g, a1g) in cat.right_products(a1) {
            let Some(ginv) = cat.inverse(g) else { continue };
            let Some(a2s) = cat.compose(ginv, a2) else { continue };
            if let Some(&j) = index.get(&(a1g, a2s)) {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                parent[ri] = rj;
            }
        }
    }
    let mut groups: HashMap<usize, Vec<(ArrowIx, ArrowIx)>> = HashMap::new();
    for (i, &f) in facts.iter().enumerate() {
        groups.entry(find(&mut parent, i)).or_default().push(f);
    }
    groups.into_values().collect()
}

fn wfp_witnesses(cat: &FinCategory, size: &SizeFunctor, a: ArrowIx) -> Vec<Witness> {
    let mut out = Vec::new();
    for (m, n) in size.degree(a).splits() {
        let orbits = split_orbits(cat, size, a, m.as_slice());
        let (m, n) = (m.as_slice().to_vec(), n.as_slice().to_vec());
        match orbits.len() {
            0 => out.push(Witness::MissingSplit { arrow: cat.id(a).to_string(), m, n }),
            1 => {}
            _ => {
                let mut orbits: Vec<Vec<[String; 2]>> = orbits
                    .into_iter()
                    .map(|o| {
                        let mut o: Vec<[String; 2]> = o.into_iter().map(|(b, c)| pair(cat, b, c)).collect();
                        o.sort();
                        o
                    })
                    .collect();
                orbits.sort();
                out.push(Witness::SplitOrbits { arrow: cat.id(a).to_string(), m, n, orbits });
            }
        }
    }
    out
}

/// For every arrow and every split of its degree, the factorizations at that
/// split exist and form a single orbit under sliding an invertible between
/// the factors.
pub fn check_wfp(cat: &FinCategory, size: &SizeFunctor) -> LawReport {
    let arrows: Vec<ArrowIx> = cat.arrows().collect();
    let witnesses = arrows.par_iter().flat_map_iter(|&a| wfp_witnesses(cat, size, a)).collect();
    LawReport::new(Law::Wfp, cat, witnesses)
}

fn has_interpolant(cat: &FinCategory, (a, b): (ArrowIx, ArrowIx), (c, d): (ArrowIx, ArrowIx)) -> bool {
    // a = c·u and d = u·b
    let via_u = cat.right_products(c).iter().any(|&(u, cu)| cu == a && cat.compose(u, b) == Some(d));
    // c = a·v and b = v·d
    let via_v = cat.right_products(a).iter().any(|&(v, av)| av == c && cat.compose(v, d) == Some(b));
    via_u || via_v
}

/// Whenever `ab = cd` there is `u` with `a = cu, d = ub` or `v` with
/// `c = av, b = vd`.
pub fn check_equidivisible(cat: &FinCategory) -> LawReport {
    let arrows: Vec<ArrowIx> = cat.arrows().collect();
    let witnesses = arrows
        .par_iter()
        .flat_map_iter(|&t| {
            let facts = cat.factorizations(t);
            let mut out = Vec::new();
            for (i, &ab) in facts.iter().enumerate() {
                for &cd in &facts[i + 1..] {
                    if !has_interpolant(cat, ab, cd) {
                        out.push(Witness::NoInterpolant { ab: pair(cat, ab.0, ab.1), cd: pair(cat, cd.0, cd.1) });
                    }
                }
            }
            out
        })
        .collect();
    LawReport::new(Law::Equidivisible, cat, witnesses)
}

fn cancel_witnesses(cat: &FinCategory, side: CancelSide) -> Vec<Witness> {
    let mut out = Vec::new();
    for a in cat.arrows() {
        let products = match side {
            CancelSide::Left => cat.right_products(a),
            CancelSide::Right => cat.left_products(a),
        };
        let mut seen: HashMap<ArrowIx, ArrowIx> = HashMap::new();
        for &(x, p) in products {
            if let Some(&y) = seen.get(&p) {
                let (x, y) = if cat.id(y) < cat.id(x) { (y, x) } else { (x, y) };
                out.push(Witness::NotCancellative {
                    side,
                    a: cat.id(a).to_string(),
                    x: cat.id(x).to_string(),
                    y: cat.id(y).to_string(),
                });
            } else {
                seen.insert(p, x);
            }
        }
    }
    out
}

/// `ax = ay ⇒ x = y` on the given side; [`check_cancellative_both`] checks
/// both.
pub fn check_cancellative(cat: &FinCategory, side: CancelSide) -> LawReport {
    let law = match side {
        CancelSide::Left => Law::LeftCancellative,
        CancelSide::Right => Law::RightCancellative,
    };
    LawReport::new(law, cat, cancel_witnesses(cat, side))
}

pub fn check_cancellative_both(cat: &FinCategory) -> LawReport {
    let mut w = cancel_witnesses(cat, CancelSide::Left);
    w.extend(cancel_witnesses(cat, CancelSide::Right));
    LawReport::new(Law::Cancellative, cat, w)
}

/// The subcategory generated by `xs`: identities and every composite of
/// elements of `xs` present in the table.
pub fn generated_subcategory(cat: &FinCategory, xs: &[ArrowIx]) -> BTreeSet<ArrowIx> {
    let mut set: BTreeSet<ArrowIx> = cat.objects().map(|v| cat.identity(v)).collect();
    let mut frontier: Vec<ArrowIx> = set.iter().copied().collect();
    while let Some(u) = frontier.pop() {
        for &x in xs {
            if let Some(ux) = cat.compose(u, x) {
                if set.insert(ux) {
                    frontier.push(ux);
                }
            }
        }
    }
    set
}

fn with_transversal(mut r: LawReport, cat: &FinCategory, xs: &[ArrowIx]) -> LawReport {
    let mut ids: Vec<String> = xs.iter().map(|&x| cat.id(x).to_string()).collect();
    ids.sort();
    r.transversal = Some(ids);
    r
}

/// For `u, v` in the subcategory generated by `xs` and invertible `g`,
/// `u = vg` forces `u = v` and `g` an identity.
pub fn check_r_condition(cat: &FinCategory, xs: &[ArrowIx]) -> LawReport {
    let gen = generated_subcategory(cat, xs);
    let mut w = Vec::new();
    for &v in &gen {
        for &(g, vg) in cat.right_products(v) {
            if cat.is_invertible(g) && !cat.is_identity(g) && gen.contains(&vg) {
                w.push(Witness::NonUniqueRepresentation {
                    u: cat.id(vg).to_string(),
                    v: cat.id(v).to_string(),
                    g: cat.id(g).to_string(),
                });
            }
        }
    }
    with_transversal(LawReport::new(Law::RCondition, cat, w), cat, xs)
}

/// `ug = u` with `u` in the subcategory generated by `xs` and `g` invertible
/// forces `g = d(u)`. Under the WFP this is equivalent to left
/// cancellativity.
pub fn check_trivial_stabilizers(cat: &FinCategory, xs: &[ArrowIx]) -> LawReport {
    let gen = generated_subcategory(cat, xs);
    let mut w = Vec::new();
    for &u in &gen {
        for &(g, ug) in cat.right_products(u) {
            if ug == u && !cat.is_identity(g) && cat.is_invertible(g) {
                w.push(Witness::NontrivialStabilizer { u: cat.id(u).to_string(), g: cat.id(g).to_string() });
            }
        }
    }
    with_transversal(LawReport::new(Law::TrivialStabilizers, cat, w), cat, xs)
}

/// Atoms are exactly the arrows whose degree is a unit vector. Holds in any
/// category with the WFP.
pub fn check_atom_degree(cat: &FinCategory, size: &SizeFunctor) -> LawReport {
    let w = cat
        .arrows()
        .filter_map(|a| {
            let atom = is_atom(cat, a);
            let unit = size.degree(a).unit_index().is_some();
            (atom != unit).then(|| Witness::AtomDegree {
                arrow: cat.id(a).to_string(),
                atom,
                degree: size.degree(a).as_slice().to_vec(),
            })
        })
        .collect();
    LawReport::new(Law::AtomDegree, cat, w)
}

/// Computes "equidivisible with atoms exactly the degree-one arrows" and the
/// WFP independently and reports whether the two agree.
pub fn check_levi_equivalence(cat: &FinCategory, size: &SizeFunctor) -> Result<LawReport, LawError> {
    if size.rank() != 1 {
        return Err(LawError::WrongRank(size.rank()));
    }
    let equidivisible = check_equidivisible(cat).holds;
    let atoms_are_degree_one = cat.arrows().all(|a| is_atom(cat, a) == (size.degree(a).as_slice() == [1]));
    let levi = equidivisible && atoms_are_degree_one;
    let wfp = check_wfp(cat, size).holds;
    let w = if levi == wfp { Vec::new() } else { vec![Witness::LeviMismatch { levi, wfp }] };
    let mut r = LawReport::new(Law::LeviEquivalence, cat, w);
    r.levi = Some(LeviSides { equidivisible, atoms_are_degree_one, levi, wfp });
    Ok(r)
}

impl Witness {
    /// Re-evaluates the violated law on this witness alone.
    pub fn reverify(&self, cat: &FinCategory, size: Option<&SizeFunctor>) -> bool {
        let ix = |id: &str| cat.arrow(id);
        match self {
            Witness::MissingSplit { arrow, m, .. } => match (ix(arrow), size) {
                (Some(a), Some(s)) => split_orbits(cat, s, a, m).is_empty(),
                _ => false,
            },
            Witness::SplitOrbits { arrow, m, orbits, .. } => match (ix(arrow), size) {
                (Some(a), Some(s)) => {
                    let found = split_orbits(cat, s, a, m);
                    found.len() == orbits.len() && found.len() > 1
                }
                _ => false,
            },
            Witness::NoInterpolant { ab, cd } => {
                let get = |p: &[String; 2]| Some((ix(&p[0])?, ix(&p[1])?));
                match (get(ab), get(cd)) {
                    (Some(ab), Some(cd)) => {
                        let t = cat.compose(ab.0, ab.1);
                        t.is_some() && t == cat.compose(cd.0, cd.1) && !has_interpolant(cat, ab, cd)
                    }
                    _ => false,
                }
            }
            Witness::NotCancellative { side, a, x, y } => match (ix(a), ix(x), ix(y)) {
                (Some(a), Some(x), Some(y)) if x != y => {
                    let (p, q) = match side {
                        CancelSide::Left => (cat.compose(a, x), cat.compose(a, y)),
                        CancelSide::Right => (cat.compose(x, a), cat.compose(y, a)),
                    };
                    p.is_some() && p == q
                }
                _ => false,
            },
            Witness::NonUniqueRepresentation { u, v, g } => match (ix(u), ix(v), ix(g)) {
                (Some(u), Some(v), Some(g)) => {
                    cat.is_invertible(g) && !cat.is_identity(g) && cat.compose(v, g) == Some(u)
                }
                _ => false,
            },
            Witness::NontrivialStabilizer { u, g } => match (ix(u), ix(g)) {
                (Some(u), Some(g)) => cat.is_invertible(g) && !cat.is_identity(g) && cat.compose(u, g) == Some(u),
                _ => false,
            },
            Witness::AtomDegree { arrow, atom, .. } => match (ix(arrow), size) {
                (Some(a), Some(s)) => is_atom(cat, a) == *atom && (s.degree(a).unit_index().is_some() != *atom),
                _ => false,
            },
            Witness::LeviMismatch { .. } => match size {
                Some(s) => check_levi_equivalence(cat, s).map(|r| !r.holds).unwrap_or(false),
                None => false,
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::{load, transversal};
    use crate::fixtures;

    #[test]
    fn diamond_fails_wfp_at_x() {
        let (cat, size) = load(&fixtures::diamond()).unwrap();
        let size = size.unwrap();
        let r = check_wfp(&cat, &size);
        assert!(!r.holds);
        let orbits = |o: &[[&str; 2]]| o.iter().map(|p| [p[0].to_string(), p[1].to_string()]).collect::<Vec<_>>();
        assert_eq!(
            r.witnesses,
            vec![Witness::SplitOrbits {
                arrow: "x".into(),
                m: vec![1],
                n: vec![1],
                orbits: vec![orbits(&[["c", "a"]]), orbits(&[["d", "b"]])],
            }]
        );
        assert!(r.witnesses.iter().all(|w| w.reverify(&cat, Some(&size))));
    }

    #[test]
    fn diamond_is_not_equidivisible_but_cancellative() {
        let (cat, size) = load(&fixtures::diamond()).unwrap();
        let r = check_equidivisible(&cat);
        assert!(!r.holds);
        assert!(r
            .witnesses
            .contains(&Witness::NoInterpolant { ab: ["c".into(), "a".into()], cd: ["d".into(), "b".into()] }));
        assert!(r.witnesses.iter().all(|w| w.reverify(&cat, None)));
        assert!(check_cancellative(&cat, CancelSide::Left).holds);
        assert!(check_cancellative_both(&cat).holds);
        let levi = check_levi_equivalence(&cat, size.as_ref().unwrap()).unwrap();
        assert!(levi.holds);
        let sides = levi.levi.unwrap();
        assert!(!sides.levi && !sides.wfp);
    }

    #[test]
    fn groupoid_laws_hold() {
        let (cat, _) = load(&fixtures::z2_groupoid()).unwrap();
        let size = crate::fincat::validate_size_functor(
            &cat,
            &crate::doc::SizeDoc { k: 1, deg: [("1".into(), vec![0]), ("s".into(), vec![0])].into() },
        )
        .unwrap();
        assert!(check_wfp(&cat, &size).holds);
        assert!(check_equidivisible(&cat).holds);
        assert!(check_r_condition(&cat, &[]).holds);
        assert!(check_atom_degree(&cat, &size).holds);
    }

    #[test]
    fn non_cancellative_witness() {
        // ca = cb with a != b
        let mut doc = fixtures::diamond();
        for t in &mut doc.compose {
            if t[0] == "d" && t[1] == "b" {
                t[2] = "y".into();
            }
        }
        // now c·b = y and d·b = y; right cancellation by b fails
        doc.compose.retain(|t| !(t[0] == "d" && t[1] == "a"));
        doc.compose.push(["d".into(), "a".into(), "x".into()]);
        doc.arrows.retain(|a| a.id != "z");
        doc.size.as_mut().unwrap().deg.remove("z");
        let (cat, _) = load(&doc).unwrap();
        let r = check_cancellative(&cat, CancelSide::Right);
        assert!(!r.holds);
        assert!(r.witnesses.iter().all(|w| w.reverify(&cat, None)));
        assert!(check_cancellative(&cat, CancelSide::Left).holds);
    }

    #[test]
    fn r_condition_on_diamond() {
        let (cat, size) = load(&fixtures::diamond()).unwrap();
        let xs = transversal(&cat, size.as_ref().unwrap()).unwrap();
        let r = check_r_condition(&cat, &xs);
        assert!(r.holds);
        assert_eq!(r.transversal.unwrap(), ["a", "b", "c", "d"]);
        assert_eq!(generated_subcategory(&cat, &xs).len(), 10);
    }
}
