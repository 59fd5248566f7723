//! Random actions and skeletons, a greedy shrinker, and a campaign runner.
//!
//! Candidates come in three kinds. `structured` ones are built to satisfy
//! every axiom: a transitive groupoid `S × S × Z/n` per component acting on
//! edges through orbits of `Z/n`, with restrictions given by a carry cocycle
//! (rank 1) or by `g|e = g` with equivariant squares (higher rank).
//! `mutated` ones perturb a structured table, and `random` ones fill tables
//! with arbitrary entries of the right shape. Generation is a pure function
//! of the seed and the parameters.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path as FsPath;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::decompose::{decompose, verify_iso};
use crate::degree::Degree;
use crate::doc::{ActionDoc, ActionRowDoc, ArrowDoc, CategoryDoc, EdgeDoc, SkeletonDoc, SquareDoc};
use crate::kgraph::validate_kgraph;
use crate::product::{build_product, verify_product_laws};
use crate::zsaction::{validate_action, ActionError, ZSAction};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GenParams {
    pub seed: u64,
    pub max_objects: usize,
    pub max_edges: usize,
    /// Rank; drawn from `1..=3` when absent.
    pub k: Option<usize>,
    /// Largest cyclic group `Z/n` used in a groupoid component.
    pub max_group: u32,
}

impl GenParams {
    pub fn new(seed: u64) -> Self {
        GenParams { seed, max_objects: 3, max_edges: 4, k: None, max_group: 4 }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CandidateKind {
    Structured,
    Mutated,
    Random,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Candidate {
    pub kind: CandidateKind,
    pub doc: ActionDoc,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FuzzError {
    #[error("candidate does not fail {0}")]
    NotFailing(String),
}

fn object_id(v: usize) -> String {
    v.to_string()
}

fn garrow_id(w: usize, h: u32, v: usize) -> String {
    if w == v && h == 0 {
        format!("1_{v}")
    } else {
        format!("g{h}_{w}_{v}")
    }
}

/// A transitive groupoid component: objects `objs`, arrows `(w, h, v)` with
/// `h` in `Z/n`.
#[derive(Clone, Debug)]
struct Comp {
    objs: Vec<usize>,
    n: u32,
}

fn groupoid_doc(n_objects: usize, comps: &[Comp]) -> CategoryDoc {
    let mut arrows = Vec::new();
    let mut compose = Vec::new();
    for c in comps {
        for &w in &c.objs {
            for &v in &c.objs {
                for h in 0..c.n {
                    arrows.push(ArrowDoc { id: garrow_id(w, h, v), dom: object_id(v), cod: object_id(w) });
                }
            }
        }
        for &w in &c.objs {
            for &u in &c.objs {
                for &v in &c.objs {
                    for h1 in 0..c.n {
                        for h2 in 0..c.n {
                            if (w == u && h1 == 0) || (u == v && h2 == 0) {
                                continue;
                            }
                            compose.push([garrow_id(w, h1, u), garrow_id(u, h2, v), garrow_id(w, (h1 + h2) % c.n, v)]);
                        }
                    }
                }
            }
        }
    }
    CategoryDoc {
        objects: (0..n_objects).map(object_id).collect(),
        arrows,
        identities: (0..n_objects).map(|v| (object_id(v), garrow_id(v, 0, v))).collect(),
        compose,
        ..Default::default()
    }
}

fn divisors(n: u32) -> Vec<u32> {
    (1..=n).filter(|d| n.is_multiple_of(*d)).collect()
}

fn random_components(rng: &mut ChaCha8Rng, n_objects: usize, max_group: u32) -> Vec<Comp> {
    let mut order: Vec<usize> = (0..n_objects).collect();
    order.shuffle(rng);
    let mut comps: Vec<Comp> = Vec::new();
    for v in order {
        if !comps.is_empty() && rng.gen_bool(0.4) {
            let i = rng.gen_range(0..comps.len());
            comps[i].objs.push(v);
        } else {
            comps.push(Comp { objs: vec![v], n: 1 });
        }
    }
    for c in &mut comps {
        c.objs.sort();
        // keep |S|^2 n small
        let cap = (12 / (c.objs.len() * c.objs.len()) as u32).clamp(1, max_group.max(1));
        c.n = rng.gen_range(1..=cap);
    }
    comps.sort_by_key(|c| c.objs[0]);
    comps
}

/// Rank one: edges `e_{v,f}` for `v` in a component and `f = (orbit, i)`,
/// `(w,h,v)·e_{v,f} = e_{w,h·f}` and the restriction twisted by a carry
/// cocycle into the component of the edge's domain.
fn structured_rank_one(rng: &mut ChaCha8Rng, p: &GenParams) -> ActionDoc {
    let n_objects = rng.gen_range(1..=p.max_objects.max(1));
    let comps = random_components(rng, n_objects, p.max_group);
    let comp_of: HashMap<usize, usize> =
        comps.iter().enumerate().flat_map(|(ci, c)| c.objs.iter().map(move |&v| (v, ci))).collect();

    struct Orbit {
        comp: usize,
        d: u32,
        target: usize,
        doms: Vec<usize>,
        offsets: Vec<u32>,
        c: u32,
    }
    let mut orbits: Vec<Orbit> = Vec::new();
    let mut budget = p.max_edges;
    let tries = rng.gen_range(0..=4);
    for _ in 0..tries {
        let ci = rng.gen_range(0..comps.len());
        let comp = &comps[ci];
        let ds = divisors(comp.n);
        let d = *ds.choose(rng).expect("1 divides n");
        let cost = d as usize * comp.objs.len();
        if cost > budget {
            continue;
        }
        budget -= cost;
        let target = rng.gen_range(0..comps.len());
        let tc = &comps[target];
        let doms = (0..d).map(|_| *tc.objs.choose(rng).expect("non-empty")).collect();
        let offsets = (0..d).map(|_| rng.gen_range(0..tc.n)).collect();
        let step = comp.n / d;
        let cs: Vec<u32> = (0..tc.n).filter(|c| (step * c).is_multiple_of(tc.n)).collect();
        let c = *cs.choose(rng).expect("0 qualifies");
        orbits.push(Orbit { comp: ci, d, target, doms, offsets, c });
    }

    let edge_id = |v: usize, o: usize, i: u32| format!("e{v}o{o}i{i}");
    let mut edges = Vec::new();
    let mut rows = Vec::new();
    for (oi, o) in orbits.iter().enumerate() {
        let comp = &comps[o.comp];
        let tn = comps[o.target].n;
        for &v in &comp.objs {
            for i in 0..o.d {
                edges.push(EdgeDoc {
                    id: edge_id(v, oi, i),
                    color: 1,
                    dom: object_id(o.doms[i as usize]),
                    cod: object_id(v),
                });
                for &w in &comp.objs {
                    for h in 0..comp.n {
                        let j = (i + h) % o.d;
                        let carry = (i + h) / o.d;
                        let label = (o.offsets[j as usize] + carry * o.c + tn * 4 - o.offsets[i as usize]) % tn;
                        rows.push(ActionRowDoc {
                            g: garrow_id(w, h, v),
                            e: edge_id(v, oi, i),
                            ge: edge_id(w, oi, j),
                            rest: garrow_id(o.doms[j as usize], label, o.doms[i as usize]),
                        });
                    }
                }
            }
        }
    }
    debug_assert!(orbits.iter().all(|o| comp_of[&o.doms[0]] == o.target));
    ActionDoc {
        kgraph: SkeletonDoc { k: 1, objects: (0..n_objects).map(object_id).collect(), edges, squares: Vec::new() },
        groupoid: groupoid_doc(n_objects, &comps),
        on_edges: rows,
    }
}

/// Orbits of `Z/n` (generated by `+1`) on a finite set given by a successor
/// map.
fn cyclic_orbits<T: Clone + Ord>(items: &[T], succ: impl Fn(&T) -> T) -> Vec<Vec<T>> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for x in items {
        if seen.contains(x) {
            continue;
        }
        let mut orbit = vec![x.clone()];
        seen.insert(x.clone());
        let mut y = succ(x);
        while &y != x {
            seen.insert(y.clone());
            orbit.push(y.clone());
            y = succ(&y);
        }
        out.push(orbit);
    }
    out
}

/// Higher rank on one object: `Z/n` permutes each color through orbits,
/// `g|e = g`, and squares are `Z/n`-equivariant.
fn structured_one_object(rng: &mut ChaCha8Rng, p: &GenParams, k: usize) -> ActionDoc {
    let n = rng.gen_range(1..=p.max_group.max(1));
    let ds = divisors(n);
    // edges as (color, orbit, i) with orbit size d
    let mut edges: Vec<(usize, usize, u32, u32)> = Vec::new();
    let mut budget = p.max_edges;
    let mut orbit_count = 0;
    for _ in 0..rng.gen_range(0..=k + 2) {
        let d = *ds.choose(rng).expect("non-empty");
        if d as usize > budget {
            continue;
        }
        budget -= d as usize;
        let color = rng.gen_range(0..k);
        for i in 0..d {
            edges.push((color, orbit_count, i, d));
        }
        orbit_count += 1;
    }
    let id = |e: &(usize, usize, u32, u32)| format!("c{}o{}i{}", e.0 + 1, e.1, e.2);
    let shift = |e: &(usize, usize, u32, u32), h: u32| (e.0, e.1, (e.2 + h) % e.3, e.3);
    let mut base = SkeletonDoc {
        k,
        objects: vec![object_id(0)],
        edges: edges
            .iter()
            .map(|e| EdgeDoc { id: id(e), color: e.0 + 1, dom: object_id(0), cod: object_id(0) })
            .collect(),
        squares: Vec::new(),
    };

    let flip = |edges: &[(usize, usize, u32, u32)]| {
        let mut sq = Vec::new();
        for f in edges {
            for e in edges.iter().filter(|e| e.0 < f.0) {
                sq.push(SquareDoc { lhs: [id(f), id(e)], rhs: [id(e), id(f)] });
            }
        }
        sq
    };
    let mut chosen = None;
    for _ in 0..8 {
        let mut sq = Vec::new();
        for j in 0..k {
            for i in 0..j {
                let fj: Vec<_> = edges.iter().filter(|e| e.0 == j).cloned().collect();
                let ei: Vec<_> = edges.iter().filter(|e| e.0 == i).cloned().collect();
                let lhs: Vec<_> = fj.iter().flat_map(|f| ei.iter().map(move |e| (*f, *e))).collect();
                let rhs: Vec<_> = ei.iter().flat_map(|e| fj.iter().map(move |f| (*e, *f))).collect();
                let succ = |(a, b): &(_, _)| (shift(a, 1), shift(b, 1));
                let lo = cyclic_orbits(&lhs, succ);
                let mut ro = cyclic_orbits(&rhs, succ);
                ro.shuffle(rng);
                let mut used = vec![false; ro.len()];
                for o in lo {
                    let r = (0..ro.len()).find(|&r| !used[r] && ro[r].len() == o.len()).expect("swap matches sizes");
                    used[r] = true;
                    let start = rng.gen_range(0..o.len());
                    for (t, l) in o.iter().enumerate() {
                        let rr = &ro[r][(start + t) % o.len()];
                        sq.push(SquareDoc { lhs: [id(&l.0), id(&l.1)], rhs: [id(&rr.0), id(&rr.1)] });
                    }
                }
            }
        }
        let mut sk = base.clone();
        sk.squares = sq;
        if validate_kgraph(&sk).is_ok() {
            chosen = Some(sk.squares);
            break;
        }
    }
    base.squares = chosen.unwrap_or_else(|| flip(&edges));

    let comps = [Comp { objs: vec![0], n }];
    let mut rows = Vec::new();
    for h in 0..n {
        for e in &edges {
            rows.push(ActionRowDoc { g: garrow_id(0, h, 0), e: id(e), ge: id(&shift(e, h)), rest: garrow_id(0, h, 0) });
        }
    }
    ActionDoc { kgraph: base, groupoid: groupoid_doc(1, &comps), on_edges: rows }
}

fn random_squares(rng: &mut ChaCha8Rng, sk: &SkeletonDoc) -> Option<Vec<SquareDoc>> {
    let mut out = Vec::new();
    for j in 1..=sk.k {
        for i in 1..j {
            let mut lhs: BTreeMap<(String, String), Vec<[String; 2]>> = BTreeMap::new();
            let mut rhs: BTreeMap<(String, String), Vec<[String; 2]>> = BTreeMap::new();
            for f in sk.edges.iter().filter(|f| f.color == j) {
                for e in sk.edges.iter().filter(|e| e.color == i && e.cod == f.dom) {
                    lhs.entry((e.dom.clone(), f.cod.clone())).or_default().push([f.id.clone(), e.id.clone()]);
                }
            }
            for e in sk.edges.iter().filter(|e| e.color == i) {
                for f in sk.edges.iter().filter(|f| f.color == j && f.cod == e.dom) {
                    rhs.entry((f.dom.clone(), e.cod.clone())).or_default().push([e.id.clone(), f.id.clone()]);
                }
            }
            let keys: BTreeSet<_> = lhs.keys().chain(rhs.keys()).cloned().collect();
            for key in keys {
                let l = lhs.remove(&key).unwrap_or_default();
                let mut r = rhs.remove(&key).unwrap_or_default();
                if l.len() != r.len() {
                    return None;
                }
                r.shuffle(rng);
                out.extend(l.into_iter().zip(r).map(|(lhs, rhs)| SquareDoc { lhs, rhs }));
            }
        }
    }
    Some(out)
}

/// A random k-graph skeleton on up to `max_objects` objects; retries until
/// the squares can be chosen bijectively and pass the cube check, falling
/// back to a single object.
pub fn gen_skeleton(params: &GenParams, k: usize) -> SkeletonDoc {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed ^ 0x5ce1_e7a1);
    random_skeleton(&mut rng, params, k)
}

fn random_skeleton(rng: &mut ChaCha8Rng, p: &GenParams, k: usize) -> SkeletonDoc {
    for attempt in 0..40 {
        let n_objects = if attempt < 30 { rng.gen_range(1..=p.max_objects.max(1)) } else { 1 };
        let n_edges = rng.gen_range(0..=p.max_edges);
        let edges = (0..n_edges)
            .map(|i| EdgeDoc {
                id: format!("e{i}"),
                color: rng.gen_range(1..=k),
                dom: object_id(rng.gen_range(0..n_objects)),
                cod: object_id(rng.gen_range(0..n_objects)),
            })
            .collect();
        let mut sk = SkeletonDoc { k, objects: (0..n_objects).map(object_id).collect(), edges, squares: Vec::new() };
        for _ in 0..6 {
            let Some(sq) = random_squares(rng, &sk) else { break };
            sk.squares = sq;
            if validate_kgraph(&sk).is_ok() {
                return sk;
            }
        }
    }
    SkeletonDoc { k, objects: vec![object_id(0)], edges: Vec::new(), squares: Vec::new() }
}

fn identity_groupoid(objects: &[String]) -> CategoryDoc {
    CategoryDoc {
        objects: objects.to_vec(),
        arrows: objects.iter().map(|o| ArrowDoc { id: format!("1_{o}"), dom: o.clone(), cod: o.clone() }).collect(),
        identities: objects.iter().map(|o| (o.clone(), format!("1_{o}"))).collect(),
        compose: Vec::new(),
        ..Default::default()
    }
}

fn structured(rng: &mut ChaCha8Rng, p: &GenParams, k: usize) -> ActionDoc {
    if k == 1 {
        return structured_rank_one(rng, p);
    }
    if rng.gen_bool(0.75) {
        structured_one_object(rng, p, k)
    } else {
        let sk = random_skeleton(rng, p, k);
        let groupoid = identity_groupoid(&sk.objects);
        let on_edges = sk
            .edges
            .iter()
            .map(|e| ActionRowDoc {
                g: format!("1_{}", e.cod),
                e: e.id.clone(),
                ge: e.id.clone(),
                rest: format!("1_{}", e.dom),
            })
            .collect();
        ActionDoc { kgraph: sk, groupoid, on_edges }
    }
}

fn mutate(rng: &mut ChaCha8Rng, doc: &mut ActionDoc) {
    let arrows: Vec<String> = doc.groupoid.arrows.iter().map(|a| a.id.clone()).collect();
    let edges: Vec<String> = doc.kgraph.edges.iter().map(|e| e.id.clone()).collect();
    for _ in 0..rng.gen_range(1..=2) {
        let choice = rng.gen_range(0..3);
        if choice == 2 && !doc.kgraph.squares.is_empty() {
            let i = rng.gen_range(0..doc.kgraph.squares.len());
            let j = rng.gen_range(0..doc.kgraph.squares.len());
            let r = doc.kgraph.squares[j].rhs.clone();
            doc.kgraph.squares[j].rhs = doc.kgraph.squares[i].rhs.clone();
            doc.kgraph.squares[i].rhs = r;
        } else if !doc.on_edges.is_empty() {
            let i = rng.gen_range(0..doc.on_edges.len());
            if choice == 0 {
                doc.on_edges[i].ge = edges.choose(rng).expect("rows imply edges").clone();
            } else {
                doc.on_edges[i].rest = arrows.choose(rng).expect("groupoid has identities").clone();
            }
        }
    }
}

fn random_tables(rng: &mut ChaCha8Rng, p: &GenParams, k: usize) -> ActionDoc {
    let sk = random_skeleton(rng, p, k);
    let comps = random_components(rng, sk.objects.len(), p.max_group);
    let groupoid = groupoid_doc(sk.objects.len(), &comps);
    let mut rows = Vec::new();
    for g in &groupoid.arrows {
        for e in sk.edges.iter().filter(|e| e.cod == g.dom) {
            let same: Vec<&EdgeDoc> = sk.edges.iter().filter(|x| x.color == e.color && x.cod == g.cod).collect();
            let ge = if !same.is_empty() && rng.gen_bool(0.8) {
                same.choose(rng).unwrap()
            } else {
                sk.edges.choose(rng).unwrap()
            };
            let fit: Vec<&ArrowDoc> = groupoid.arrows.iter().filter(|a| a.dom == e.dom && a.cod == ge.dom).collect();
            let rest = if !fit.is_empty() && rng.gen_bool(0.8) {
                fit.choose(rng).unwrap().id.clone()
            } else {
                groupoid.arrows.choose(rng).unwrap().id.clone()
            };
            rows.push(ActionRowDoc { g: g.id.clone(), e: e.id.clone(), ge: ge.id.clone(), rest });
        }
    }
    ActionDoc { kgraph: sk, groupoid, on_edges: rows }
}

/// A candidate action; not necessarily valid. Deterministic in `params`.
pub fn gen_action(params: &GenParams) -> Candidate {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let k = params.k.unwrap_or_else(|| rng.gen_range(1..=3));
    let roll = rng.gen_range(0..10);
    let (kind, mut doc) = match roll {
        0..=5 => (CandidateKind::Structured, structured(&mut rng, params, k)),
        6 | 7 => {
            let mut d = structured(&mut rng, params, k);
            mutate(&mut rng, &mut d);
            (CandidateKind::Mutated, d)
        }
        _ => (CandidateKind::Random, random_tables(&mut rng, params, k)),
    };
    doc.on_edges.sort();
    doc.on_edges.dedup();
    Candidate { kind, doc }
}

/// Short tag for an action validation error: the axiom name for axiom
/// failures, the variant name otherwise.
pub fn error_tag(e: &ActionError) -> String {
    match e {
        ActionError::AxiomFailure { axiom, .. } => (*axiom).to_string(),
        ActionError::KGraph(k) => format!("kgraph:{}", variant_name(&format!("{k:?}"))),
        ActionError::Category(c) => format!("groupoid:{}", variant_name(&format!("{c:?}"))),
        other => variant_name(&format!("{other:?}")),
    }
}

fn variant_name(debug: &str) -> String {
    debug.split(|c: char| !c.is_alphanumeric()).next().unwrap_or("").to_string()
}

/// A property a candidate can fail.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "check", content = "arg", rename_all = "kebab-case")]
pub enum Check {
    /// Validation rejects the candidate with this tag (see [`error_tag`]).
    Rejected(String),
    /// Valid, but a path-level law fails up to the bound.
    PathAxioms(Vec<u32>),
    /// Valid, but a law fails on the product window.
    ProductLaws(Vec<u32>),
    /// Valid, but decomposing the product window does not give it back.
    RoundTrip(Vec<u32>),
}

impl std::fmt::Display for Check {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Check::Rejected(t) => write!(f, "rejected:{t}"),
            Check::PathAxioms(b) => write!(f, "path-axioms{}", Degree::from_vec(b.clone())),
            Check::ProductLaws(b) => write!(f, "product-laws{}", Degree::from_vec(b.clone())),
            Check::RoundTrip(b) => write!(f, "round-trip{}", Degree::from_vec(b.clone())),
        }
    }
}

fn bound_for(a: &ZSAction, b: &[u32]) -> Option<Degree> {
    (b.len() == a.kgraph().rank()).then(|| Degree::from_vec(b.to_vec()))
}

/// `Some(detail)` when the check fails on `a`.
pub fn path_axioms_failure(a: &ZSAction, bound: &Degree) -> Option<String> {
    match a.check_path_axioms(bound) {
        Ok(v) if v.is_empty() => None,
        Ok(v) => Some(format!("{} at {}", v[0].axiom, v[0].witness)),
        Err(e) => Some(e.to_string()),
    }
}

pub fn product_laws_failure(a: &ZSAction, bound: &Degree) -> Option<String> {
    let laws = verify_product_laws(a, bound);
    if laws.all_hold() {
        return None;
    }
    if let Some(e) = laws.error {
        return Some(e);
    }
    laws.reports.iter().find(|r| !r.holds).map(|r| format!("{:?}: {:?}", r.law, r.witnesses.first()))
}

pub fn round_trip_failure(a: &ZSAction, bound: &Degree) -> Option<String> {
    let p = match build_product(a, bound) {
        Ok(p) => p,
        Err(e) => return Some(e.to_string()),
    };
    let d = match decompose(&p.category, &p.size) {
        Ok(d) => d,
        Err(e) => return Some(e.to_string()),
    };
    match verify_iso(&p.category, &p.size, &d) {
        Ok(r) if r.holds() => None,
        Ok(r) => Some(r.witnesses.first().cloned().unwrap_or_else(|| "not an isomorphism".into())),
        Err(e) => Some(e.to_string()),
    }
}

impl Check {
    pub fn fails(&self, doc: &ActionDoc) -> bool {
        let valid = validate_action(doc);
        match (self, valid) {
            (Check::Rejected(tag), Err(e)) => &error_tag(&e) == tag,
            (Check::Rejected(_), Ok(_)) => false,
            (_, Err(_)) => false,
            (Check::PathAxioms(b), Ok(a)) => bound_for(&a, b).is_some_and(|b| path_axioms_failure(&a, &b).is_some()),
            (Check::ProductLaws(b), Ok(a)) => bound_for(&a, b).is_some_and(|b| product_laws_failure(&a, &b).is_some()),
            (Check::RoundTrip(b), Ok(a)) => bound_for(&a, b).is_some_and(|b| round_trip_failure(&a, &b).is_some()),
        }
    }
}

/// Every document obtained by one removal: an object, an edge, a
/// non-identity groupoid arrow with its inverse, a row, or a square.
fn single_removals(doc: &ActionDoc) -> Vec<ActionDoc> {
    let mut out = Vec::new();
    let drop_edges = |doc: &ActionDoc, gone: &BTreeSet<String>| {
        let mut d = doc.clone();
        d.kgraph.edges.retain(|e| !gone.contains(&e.id));
        d.kgraph.squares.retain(|s| !s.lhs.iter().chain(&s.rhs).any(|x| gone.contains(x)));
        d.on_edges.retain(|r| !gone.contains(&r.e) && !gone.contains(&r.ge));
        d
    };
    let drop_arrows = |d: &mut ActionDoc, gone: &BTreeSet<String>| {
        d.groupoid.arrows.retain(|a| !gone.contains(&a.id));
        d.groupoid.compose.retain(|t| !t.iter().any(|x| gone.contains(x)));
        if let Some(inv) = d.groupoid.inverses.as_mut() {
            inv.retain(|p| !p.iter().any(|x| gone.contains(x)));
        }
        d.on_edges.retain(|r| !gone.contains(&r.g) && !gone.contains(&r.rest));
    };

    if doc.kgraph.objects.len() > 1 {
        for o in &doc.kgraph.objects {
            let edges: BTreeSet<String> =
                doc.kgraph.edges.iter().filter(|e| &e.dom == o || &e.cod == o).map(|e| e.id.clone()).collect();
            let mut d = drop_edges(doc, &edges);
            let arrows: BTreeSet<String> =
                d.groupoid.arrows.iter().filter(|a| &a.dom == o || &a.cod == o).map(|a| a.id.clone()).collect();
            drop_arrows(&mut d, &arrows);
            d.kgraph.objects.retain(|x| x != o);
            d.groupoid.objects.retain(|x| x != o);
            d.groupoid.identities.remove(o);
            out.push(d);
        }
    }
    for e in &doc.kgraph.edges {
        out.push(drop_edges(doc, &BTreeSet::from([e.id.clone()])));
    }
    let identities: BTreeSet<&String> = doc.groupoid.identities.values().collect();
    let inverse_of: HashMap<String, String> = {
        let mut m = HashMap::new();
        for t in &doc.groupoid.compose {
            if identities.contains(&t[2]) {
                m.insert(t[0].clone(), t[1].clone());
            }
        }
        m
    };
    for a in doc.groupoid.arrows.iter().filter(|a| !identities.contains(&a.id)) {
        let mut gone = BTreeSet::from([a.id.clone()]);
        if let Some(inv) = inverse_of.get(&a.id) {
            gone.insert(inv.clone());
        }
        let mut d = doc.clone();
        drop_arrows(&mut d, &gone);
        out.push(d);
    }
    for i in 0..doc.on_edges.len() {
        let mut d = doc.clone();
        d.on_edges.remove(i);
        out.push(d);
    }
    for i in 0..doc.kgraph.squares.len() {
        let mut d = doc.clone();
        d.kgraph.squares.remove(i);
        out.push(d);
    }
    out
}

/// Greedily removes pieces of `doc` while it keeps failing `check`. The
/// result fails `check` and no single removal from it still does.
pub fn shrink(doc: &ActionDoc, check: &Check) -> Result<ActionDoc, FuzzError> {
    if !check.fails(doc) {
        return Err(FuzzError::NotFailing(check.to_string()));
    }
    let mut cur = doc.clone();
    'outer: loop {
        for next in single_removals(&cur) {
            if check.fails(&next) {
                cur = next;
                continue 'outer;
            }
        }
        return Ok(cur);
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CampaignParams {
    pub first_seed: u64,
    pub count: u64,
    pub max_objects: usize,
    pub max_edges: usize,
    pub k: Option<usize>,
    pub max_group: u32,
    /// Per-color bound for the path-level laws.
    pub path_bound: u32,
    /// Per-color bound for the product window and the round trip.
    pub product_bound: u32,
}

impl Default for CampaignParams {
    fn default() -> Self {
        CampaignParams {
            first_seed: 0,
            count: 500,
            max_objects: 3,
            max_edges: 4,
            k: None,
            max_group: 4,
            path_bound: 3,
            product_bound: 2,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CampaignFailure {
    pub seed: u64,
    pub check: String,
    pub detail: String,
    pub shrunk: ActionDoc,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct CampaignReport {
    pub seeds: u64,
    pub valid: u64,
    pub valid_by_kind: BTreeMap<String, u64>,
    pub valid_by_rank: BTreeMap<usize, u64>,
    pub rejected_by_tag: BTreeMap<String, u64>,
    pub product_arrows: u64,
    pub failures: Vec<CampaignFailure>,
}

impl CampaignReport {
    pub fn clean(&self) -> bool {
        self.failures.is_empty()
    }
}

type Checker = fn(&ZSAction, &Degree) -> Option<String>;

enum SeedOutcome {
    Rejected(String),
    Valid { kind: CandidateKind, k: usize, arrows: usize, failures: Vec<CampaignFailure> },
}

fn run_seed(p: &CampaignParams, seed: u64) -> SeedOutcome {
    let gp = GenParams { seed, max_objects: p.max_objects, max_edges: p.max_edges, k: p.k, max_group: p.max_group };
    let cand = gen_action(&gp);
    let a = match validate_action(&cand.doc) {
        Ok(a) => a,
        Err(e) => return SeedOutcome::Rejected(error_tag(&e)),
    };
    let k = a.kgraph().rank();
    let pb = vec![p.path_bound; k];
    let qb = vec![p.product_bound; k];
    let mut failures = Vec::new();
    let checks: [(Check, Checker); 3] = [
        (Check::PathAxioms(pb), path_axioms_failure),
        (Check::ProductLaws(qb.clone()), product_laws_failure),
        (Check::RoundTrip(qb.clone()), round_trip_failure),
    ];
    for (check, run) in checks {
        let b = match &check {
            Check::PathAxioms(b) | Check::ProductLaws(b) | Check::RoundTrip(b) => Degree::from_vec(b.clone()),
            Check::Rejected(_) => unreachable!(),
        };
        if let Some(detail) = run(&a, &b) {
            let shrunk = shrink(&cand.doc, &check).unwrap_or_else(|_| cand.doc.clone());
            failures.push(CampaignFailure { seed, check: check.to_string(), detail, shrunk });
        }
    }
    let arrows = build_product(&a, &Degree::from_vec(qb)).map(|p| p.len()).unwrap_or(0);
    SeedOutcome::Valid { kind: cand.kind, k, arrows, failures }
}

/// Runs every seed in `first_seed..first_seed + count` in parallel. The
/// report does not depend on scheduling.
pub fn run_campaign(p: &CampaignParams) -> CampaignReport {
    let seeds: Vec<u64> = (p.first_seed..p.first_seed.saturating_add(p.count)).collect();
    let outcomes: Vec<(u64, SeedOutcome)> = seeds.par_iter().map(|&s| (s, run_seed(p, s))).collect();
    let mut r = CampaignReport { seeds: seeds.len() as u64, ..Default::default() };
    for (_, o) in outcomes {
        match o {
            SeedOutcome::Rejected(tag) => *r.rejected_by_tag.entry(tag).or_default() += 1,
            SeedOutcome::Valid { kind, k, arrows, failures } => {
                r.valid += 1;
                *r.valid_by_kind
                    .entry(serde_json::to_string(&kind).unwrap().trim_matches('"').to_string())
                    .or_default() += 1;
                *r.valid_by_rank.entry(k).or_default() += 1;
                r.product_arrows += arrows as u64;
                r.failures.extend(failures);
            }
        }
    }
    r
}

/// Writes each failure's shrunk candidate to `dir/seed-<seed>-<check>.json`.
pub fn write_corpus(dir: &FsPath, report: &CampaignReport) -> std::io::Result<Vec<std::path::PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for f in &report.failures {
        let name: String =
            f.check.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' }).collect();
        let path = dir.join(format!("seed-{}-{}.json", f.seed, name));
        let body = serde_json::to_string_pretty(&f.shrunk).map_err(std::io::Error::other)?;
        std::fs::write(&path, body + "\n")?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn generation_is_deterministic() {
        for seed in 0..20 {
            assert_eq!(gen_action(&GenParams::new(seed)), gen_action(&GenParams::new(seed)));
        }
    }

    #[test]
    fn structured_candidates_are_valid() {
        for seed in 0..200 {
            let c = gen_action(&GenParams::new(seed));
            if c.kind == CandidateKind::Structured {
                if let Err(e) = validate_action(&c.doc) {
                    panic!("seed {seed}: {e}\n{}", serde_json::to_string(&c.doc).unwrap());
                }
            }
        }
    }

    #[test]
    fn zero_edge_budget_gives_a_valid_action() {
        for seed in 0..20 {
            let p = GenParams { max_edges: 0, ..GenParams::new(seed) };
            let c = gen_action(&p);
            assert!(c.doc.kgraph.edges.is_empty());
            if c.kind != CandidateKind::Random {
                validate_action(&c.doc).unwrap();
            }
        }
    }

    #[test]
    fn shrinking_a_broken_swap() {
        let doc = fixtures::swap_broken();
        let check = Check::Rejected("SS7".into());
        let small = shrink(&doc, &check).unwrap();
        assert!(check.fails(&small));
        assert!(single_removals(&small).iter().all(|d| !check.fails(d)));
        assert!(small.on_edges.len() <= doc.on_edges.len());

        let valid = fixtures::swap();
        assert_eq!(shrink(&valid, &check), Err(FuzzError::NotFailing("rejected:SS7".into())));
        assert_eq!(shrink(&small, &check).unwrap(), small);
    }

    #[test]
    fn random_skeletons_are_valid() {
        for seed in 0..50 {
            for k in 2..=3 {
                let sk = gen_skeleton(&GenParams::new(seed), k);
                validate_kgraph(&sk).unwrap();
            }
        }
    }

    #[test]
    fn small_campaign_is_clean() {
        let r = run_campaign(&CampaignParams { count: 40, ..Default::default() });
        assert!(r.clean(), "{:?}", r.failures);
        assert!(r.valid > 10);
    }
}
