//! Zappa-Szép actions of a groupoid on a k-graph.
//!
//! The action is given on edges by rows `g·e` and `g|e` and extended to paths
//! by `g·(e p) = (g·e)((g|e)·p)` and `g|(e p) = (g|e)|p`. Validation checks
//! the axioms on generators together with compatibility with every square,
//! which is what makes the extension well defined on normal forms.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::Serialize;
use thiserror::Error;

use crate::degree::Degree;
use crate::doc::{ActionDoc, ActionRowDoc};
use crate::fincat::{validate_category, ArrowIx, FinCategory, FincatError, ObjIx};
use crate::kgraph::{validate_kgraph, EdgeIx, KGraph, KGraphError, Path};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ActionError {
    #[error(transparent)]
    KGraph(#[from] KGraphError),
    #[error(transparent)]
    Category(#[from] FincatError),
    #[error("groupoid arrow `{0}` is not invertible")]
    NotGroupoid(String),
    #[error("groupoid and k-graph objects differ: {0}")]
    ObjectMismatch(String),
    #[error("unknown groupoid arrow `{0}`")]
    UnknownArrow(String),
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("row ({g}, {e}) given twice")]
    DuplicateEntry { g: String, e: String },
    #[error("row ({g}, {e}) given but d({g}) != r({e})")]
    UndefinedEntry { g: String, e: String },
    #[error("no row for ({g}, {e})")]
    MissingEntry { g: String, e: String },
    #[error("{g}·{e} changes the color of {e}")]
    ColorChanged { g: String, e: String },
    #[error("axiom {axiom} fails at {witness}")]
    AxiomFailure { axiom: &'static str, witness: String },
    #[error("square {square:?} is not respected by `{g}`")]
    SquareIncompatible { square: [String; 4], g: String },
}

/// A single failed instance of a path-level law.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomViolation {
    pub axiom: &'static str,
    pub witness: String,
}

#[derive(Clone, Debug)]
pub struct ZSAction {
    kg: KGraph,
    g: FinCategory,
    // k-graph object -> groupoid object and back
    to_g: Vec<ObjIx>,
    to_kg: Vec<ObjIx>,
    // indexed by g * edges + e
    table: Vec<Option<(EdgeIx, ArrowIx)>>,
}

fn fail(axiom: &'static str, witness: String) -> ActionError {
    ActionError::AxiomFailure { axiom, witness }
}

pub fn validate_action(doc: &ActionDoc) -> Result<ZSAction, ActionError> {
    let kg = validate_kgraph(&doc.kgraph)?;
    let g = validate_category(&doc.groupoid)?;
    if let Some(a) = g.arrows().find(|&a| !g.is_invertible(a)) {
        return Err(ActionError::NotGroupoid(g.id(a).to_string()));
    }
    if g.object_count() != kg.object_count() {
        return Err(ActionError::ObjectMismatch(format!(
            "{} groupoid objects, {} k-graph objects",
            g.object_count(),
            kg.object_count()
        )));
    }
    let mut to_g = Vec::with_capacity(kg.object_count());
    for id in kg.object_ids() {
        to_g.push(g.object(id).ok_or_else(|| ActionError::ObjectMismatch(format!("`{id}` has no groupoid object")))?);
    }
    let mut to_kg = vec![ObjIx(0); to_g.len()];
    for (i, v) in to_g.iter().enumerate() {
        to_kg[v.0] = ObjIx(i);
    }

    let n_edges = kg.edge_count();
    let mut action = ZSAction { table: vec![None; g.arrow_count() * n_edges], kg, g, to_g, to_kg };
    for row in &doc.on_edges {
        let ga = action.arrow_or_err(&row.g)?;
        let e = action.edge_or_err(&row.e)?;
        let ge = action.edge_or_err(&row.ge)?;
        let rest = action.arrow_or_err(&row.rest)?;
        if action.g_dom(ga) != action.kg.edge(e).cod {
            return Err(ActionError::UndefinedEntry { g: row.g.clone(), e: row.e.clone() });
        }
        let slot = &mut action.table[ga.0 * n_edges + e.0];
        if slot.is_some() {
            return Err(ActionError::DuplicateEntry { g: row.g.clone(), e: row.e.clone() });
        }
        *slot = Some((ge, rest));
    }
    action.check_generators()?;
    action.check_squares()?;
    Ok(action)
}

impl ZSAction {
    fn arrow_or_err(&self, id: &str) -> Result<ArrowIx, ActionError> {
        self.g.arrow(id).ok_or_else(|| ActionError::UnknownArrow(id.to_string()))
    }

    fn edge_or_err(&self, id: &str) -> Result<EdgeIx, ActionError> {
        self.kg.edge_by_id(id).ok_or_else(|| ActionError::UnknownEdge(id.to_string()))
    }

    pub fn kgraph(&self) -> &KGraph {
        &self.kg
    }

    pub fn groupoid(&self) -> &FinCategory {
        &self.g
    }

    /// Domain of a groupoid arrow as a k-graph object.
    pub fn g_dom(&self, g: ArrowIx) -> ObjIx {
        self.to_kg[self.g.dom(g).0]
    }

    /// Codomain of a groupoid arrow as a k-graph object.
    pub fn g_cod(&self, g: ArrowIx) -> ObjIx {
        self.to_kg[self.g.cod(g).0]
    }

    /// The groupoid identity at a k-graph object.
    pub fn identity_at(&self, v: ObjIx) -> ArrowIx {
        self.g.identity(self.to_g[v.0])
    }

    /// Groupoid arrows with domain `v` (a k-graph object).
    pub fn arrows_from(&self, v: ObjIx) -> impl Iterator<Item = ArrowIx> + '_ {
        self.g.arrows().filter(move |&g| self.g_dom(g) == v)
    }

    /// `(g·e, g|e)`; panics unless `d(g) = r(e)`.
    pub fn act_edge(&self, g: ArrowIx, e: EdgeIx) -> (EdgeIx, ArrowIx) {
        self.table[g.0 * self.kg.edge_count() + e.0].expect("validated action is total on composable pairs")
    }

    fn check_composable(&self, g: ArrowIx, p: &Path) -> Result<(), KGraphError> {
        if self.g_dom(g) != p.cod() {
            return Err(KGraphError::NotComposable(format!("d({}) != r({})", self.g.id(g), self.kg.path_id(p))));
        }
        Ok(())
    }

    /// `(g·p, g|p)` computed edge by edge from the outermost factor inwards.
    pub fn act_restrict(&self, g: ArrowIx, p: &Path) -> Result<(Path, ArrowIx), KGraphError> {
        self.check_composable(g, p)?;
        if p.is_empty() {
            return Ok((self.kg.identity_path(self.g_cod(g)), g));
        }
        let mut h = g;
        let mut out = Vec::with_capacity(p.len());
        for &e in p.edges() {
            let (he, rest) = self.act_edge(h, e);
            out.push(he);
            h = rest;
        }
        Ok((self.kg.normalize(&out)?, h))
    }

    pub fn act_path(&self, g: ArrowIx, p: &Path) -> Result<Path, KGraphError> {
        Ok(self.act_restrict(g, p)?.0)
    }

    pub fn restrict_path(&self, g: ArrowIx, p: &Path) -> Result<ArrowIx, KGraphError> {
        Ok(self.act_restrict(g, p)?.1)
    }

    fn check_generators(&self) -> Result<(), ActionError> {
        let (g, kg) = (&self.g, &self.kg);
        for ga in g.arrows() {
            for e in kg.edge_ids() {
                if self.g_dom(ga) != kg.edge(e).cod {
                    continue;
                }
                let Some((ge, rest)) = self.table[ga.0 * kg.edge_count() + e.0] else {
                    return Err(ActionError::MissingEntry { g: g.id(ga).into(), e: kg.edge(e).id.clone() });
                };
                let w = || format!("({}, {})", g.id(ga), kg.edge(e).id);
                if kg.edge(ge).cod != self.g_cod(ga) {
                    return Err(fail("C1", w()));
                }
                if kg.edge(ge).dom != self.g_cod(rest) {
                    return Err(fail("C2", w()));
                }
                if kg.edge(e).dom != self.g_dom(rest) {
                    return Err(fail("C3", w()));
                }
                if kg.color(ge) != kg.color(e) {
                    return Err(ActionError::ColorChanged { g: g.id(ga).into(), e: kg.edge(e).id.clone() });
                }
            }
        }
        for e in kg.edge_ids() {
            let (ee, rest) = self.act_edge(self.identity_at(kg.edge(e).cod), e);
            if ee != e {
                return Err(fail("SS1", kg.edge(e).id.clone()));
            }
            if rest != self.identity_at(kg.edge(e).dom) {
                return Err(fail("SS4", kg.edge(e).id.clone()));
            }
        }
        for gi in g.arrows() {
            for &(h, gh) in g.right_products(gi) {
                for e in kg.edge_ids().filter(|&e| self.g_dom(h) == kg.edge(e).cod) {
                    let (he, h_e) = self.act_edge(h, e);
                    let (g_he, g_rest) = self.act_edge(gi, he);
                    let (gh_e, gh_rest) = self.act_edge(gh, e);
                    let w = || format!("({}, {}, {})", g.id(gi), g.id(h), kg.edge(e).id);
                    if gh_e != g_he {
                        return Err(fail("SS2", w()));
                    }
                    if g.compose(g_rest, h_e) != Some(gh_rest) {
                        return Err(fail("SS7", w()));
                    }
                }
            }
        }
        Ok(())
    }

    fn check_squares(&self) -> Result<(), ActionError> {
        let kg = &self.kg;
        for f in kg.edge_ids() {
            for &e in kg.edges_into(kg.edge(f).dom) {
                if kg.color(f) <= kg.color(e) {
                    continue;
                }
                let lhs = kg.normalize(&[f, e])?;
                let (e2, f2) = (lhs.edges()[0], lhs.edges()[1]);
                for ga in self.arrows_from(kg.edge(f).cod) {
                    let (gf, g_f) = self.act_edge(ga, f);
                    let (ge, g_fe) = self.act_edge(g_f, e);
                    let (ge2, g_e2) = self.act_edge(ga, e2);
                    let (gf2, g_e2f2) = self.act_edge(g_e2, f2);
                    let left = kg.normalize(&[gf, ge])?;
                    if left.edges() != [ge2, gf2] || g_fe != g_e2f2 {
                        let id = |x: EdgeIx| kg.edge(x).id.clone();
                        return Err(ActionError::SquareIncompatible {
                            square: [id(f), id(e), id(e2), id(f2)],
                            g: self.g.id(ga).to_string(),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// Exhaustively checks the path-level laws on every path of degree at
    /// most `bound`: the constraints (C1)-(C3), (SS1)-(SS8), degree
    /// preservation, `g⁻¹|p = (g|(g⁻¹·p))⁻¹`, and that each `g` acts
    /// injectively.
    pub fn check_path_axioms(&self, bound: &Degree) -> Result<Vec<AxiomViolation>, KGraphError> {
        let (g, kg) = (&self.g, &self.kg);
        let paths = kg.enumerate_paths(bound)?;
        let mut out = Vec::new();
        let mut push = |axiom: &'static str, witness: String| out.push(AxiomViolation { axiom, witness });
        let pid = |p: &Path| kg.path_id(p);

        let mut images: HashMap<(ArrowIx, Degree), HashSet<Path>> = HashMap::new();
        for p in &paths {
            let cod = p.cod();
            let (rp, r_rest) = self.act_restrict(self.identity_at(cod), p)?;
            if &rp != p {
                push("SS1", pid(p));
            }
            if r_rest != self.identity_at(p.dom()) {
                push("SS4", pid(p));
            }
            let splits = p.degree().splits();
            let factored: Vec<(Path, Path)> = splits.iter().map(|(m, _)| kg.factor(p, m)).collect::<Result<_, _>>()?;

            for ga in self.arrows_from(cod) {
                let w = || format!("({}, {})", g.id(ga), pid(p));
                let (gp, g_p) = self.act_restrict(ga, p)?;
                if gp.degree() != p.degree() {
                    push("degree", w());
                }
                if gp.cod() != self.g_cod(ga) {
                    push("C1", w());
                }
                if gp.dom() != self.g_cod(g_p) {
                    push("C2", w());
                }
                if p.dom() != self.g_dom(g_p) {
                    push("C3", w());
                }
                if !images.entry((ga, p.degree().clone())).or_default().insert(gp.clone()) {
                    push("bijective", w());
                }

                for (p1, p2) in &factored {
                    let (gp1, g_p1) = self.act_restrict(ga, p1)?;
                    let (gp2, g_p1_p2) = self.act_restrict(g_p1, p2)?;
                    if g_p1_p2 != g_p {
                        push("SS6", format!("({}, {}, {})", g.id(ga), pid(p1), pid(p2)));
                    }
                    if kg.compose_paths(&gp1, &gp2)? != gp {
                        push("SS8", format!("({}, {}, {})", g.id(ga), pid(p1), pid(p2)));
                    }
                }
            }

            for h in self.arrows_from(cod) {
                let (hp, h_p) = self.act_restrict(h, p)?;
                for &(gi, gh) in g.left_products(h) {
                    let w = || format!("({}, {}, {})", g.id(gi), g.id(h), pid(p));
                    let (ghp, gh_p) = self.act_restrict(gh, p)?;
                    let (g_hp, g_rest) = self.act_restrict(gi, &hp)?;
                    if ghp != g_hp {
                        push("SS2", w());
                    }
                    if g.compose(g_rest, h_p) != Some(gh_p) {
                        push("SS7", w());
                    }
                }
                // with g = h⁻¹ the identity g⁻¹|p = (g|(g⁻¹·p))⁻¹ reads h|p = (h⁻¹|(h·p))⁻¹
                let hinv = g.inverse(h).expect("groupoid");
                let back = self.restrict_path(hinv, &hp)?;
                if g.inverse(back) != Some(h_p) {
                    push("inverse-restriction", format!("({}, {})", g.id(hinv), pid(p)));
                }
            }
        }

        for v in (0..kg.object_count()).map(ObjIx) {
            let idp = kg.identity_path(v);
            for ga in self.arrows_from(v) {
                let (gp, rest) = self.act_restrict(ga, &idp)?;
                if gp != kg.identity_path(self.g_cod(ga)) {
                    push("SS3", g.id(ga).to_string());
                }
                if rest != ga {
                    push("SS5", g.id(ga).to_string());
                }
            }
        }
        Ok(out)
    }

    pub fn to_doc(&self) -> ActionDoc {
        let (g, kg) = (&self.g, &self.kg);
        let mut on_edges = Vec::new();
        for ga in g.arrows() {
            for e in kg.edge_ids().filter(|&e| self.g_dom(ga) == kg.edge(e).cod) {
                let (ge, rest) = self.act_edge(ga, e);
                on_edges.push(ActionRowDoc {
                    g: g.id(ga).to_string(),
                    e: kg.edge(e).id.clone(),
                    ge: kg.edge(ge).id.clone(),
                    rest: g.id(rest).to_string(),
                });
            }
        }
        on_edges.sort();
        ActionDoc { kgraph: kg.to_doc(), groupoid: g.to_doc(None), on_edges }
    }

    /// Table of `g·e` and `g|e` keyed by ids, for comparing two actions.
    pub fn rows_by_id(&self) -> BTreeMap<(String, String), (String, String)> {
        self.to_doc().on_edges.into_iter().map(|r| ((r.g, r.e), (r.ge, r.rest))).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn swap_is_valid() {
        let a = validate_action(&fixtures::swap()).unwrap();
        let kg = a.kgraph();
        let s = a.groupoid().arrow("s").unwrap();
        let ab = kg.normalize_ids(&["a", "b"]).unwrap();
        let (sab, s_ab) = a.act_restrict(s, &ab).unwrap();
        assert_eq!(kg.path_id(&sab), "b.a");
        assert_eq!(s_ab, s);
        let aa = kg.normalize_ids(&["a", "a"]).unwrap();
        assert_eq!(kg.path_id(&a.act_path(s, &aa).unwrap()), "b.b");
        assert_eq!(a.restrict_path(s, &kg.normalize_ids(&["a"]).unwrap()).unwrap(), s);
        assert_eq!(a.check_path_axioms(&Degree::from_vec(vec![3])).unwrap(), vec![]);
    }

    #[test]
    fn broken_swap_fails_ss7() {
        let err = validate_action(&fixtures::swap_broken()).unwrap_err();
        assert!(matches!(err, ActionError::AxiomFailure { axiom: "SS7", .. }), "{err}");
    }

    #[test]
    fn trivial_action_on_n2() {
        let a = validate_action(&fixtures::trivial_action(fixtures::n2())).unwrap();
        assert_eq!(a.check_path_axioms(&Degree::from_vec(vec![2, 2])).unwrap(), vec![]);
        assert_eq!(a.to_doc().on_edges.len(), 2);
    }

    #[test]
    fn missing_and_recolored_rows() {
        let mut doc = fixtures::swap();
        doc.on_edges.pop();
        assert!(matches!(validate_action(&doc), Err(ActionError::MissingEntry { .. })));

        let mut doc = fixtures::swap();
        doc.on_edges.push(doc.on_edges[0].clone());
        assert!(matches!(validate_action(&doc), Err(ActionError::DuplicateEntry { .. })));
    }

    #[test]
    fn square_compatibility_is_enforced() {
        // Z/2 swapping two color-1 loops e0, e1 on N x (two loops) with squares
        // f·e_i = e_i·f; restriction to the identity is compatible, and a
        // square that swaps indices while s fixes f is not.
        let mut doc = fixtures::trivial_action(crate::doc::SkeletonDoc {
            k: 2,
            objects: vec!["0".into()],
            edges: vec![
                crate::doc::EdgeDoc { id: "e0".into(), color: 1, dom: "0".into(), cod: "0".into() },
                crate::doc::EdgeDoc { id: "e1".into(), color: 1, dom: "0".into(), cod: "0".into() },
                crate::doc::EdgeDoc { id: "f".into(), color: 2, dom: "0".into(), cod: "0".into() },
            ],
            squares: vec![
                crate::doc::SquareDoc { lhs: ["f".into(), "e0".into()], rhs: ["e1".into(), "f".into()] },
                crate::doc::SquareDoc { lhs: ["f".into(), "e1".into()], rhs: ["e0".into(), "f".into()] },
            ],
        });
        assert!(validate_action(&doc).is_ok());

        doc.groupoid = fixtures::z2_groupoid();
        let row = |g: &str, e: &str, ge: &str, rest: &str| ActionRowDoc {
            g: g.into(),
            e: e.into(),
            ge: ge.into(),
            rest: rest.into(),
        };
        // s swaps e0 and e1 but restricts to 1 on f: f·e0 = e1·f maps to
        // s·f (s|f)·e0 = f·e0 = e1·f, while s·e1 (s|e1)·f = e0·f
        doc.on_edges = vec![
            row("1", "e0", "e0", "1"),
            row("1", "e1", "e1", "1"),
            row("1", "f", "f", "1"),
            row("s", "e0", "e1", "1"),
            row("s", "e1", "e0", "1"),
            row("s", "f", "f", "1"),
        ];
        assert!(matches!(validate_action(&doc), Err(ActionError::SquareIncompatible { .. })));
    }
}
