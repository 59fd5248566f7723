//! Recovers the action behind a generalized higher-rank graph with the
//! R-condition.
//!
//! With `X` the canonical transversal, `X` becomes the skeleton of a k-graph,
//! the invertibles become the groupoid, and `g·x` and `g|x` are read off the
//! unique factorization `gx = (g·x)(g|x)`. Every arrow `a` is sent to the
//! pair `θ(a) = (u, g)` with `a = ug`, `u` a word over `X`.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::degree::Degree;
use crate::doc::{ActionDoc, ActionRowDoc, ArrowDoc, CategoryDoc, EdgeDoc, SkeletonDoc, SquareDoc};
use crate::fincat::{ArrowIx, Factorizer, FinCategory, FincatError, SizeFunctor};
use crate::kgraph::{identity_path_id, EdgeIx, KGraphError};
use crate::laws::{check_r_condition, check_wfp, LawReport};
use crate::product::{build_product, product_arrow_id, ProductArrow, ProductError};
use crate::zsaction::{validate_action, ActionError, ZSAction};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecomposeError {
    #[error("precondition failed: {} does not hold", serde_json::to_string(&.0.law).unwrap_or_default())]
    PreconditionFailed(Box<LawReport>),
    #[error("`{0}` has two representations as a word over the transversal times an invertible")]
    NonUniqueRepresentation(String),
    #[error("transversal element `{0}` does not have a unit degree")]
    NotUnitDegree(String),
    #[error(transparent)]
    Category(#[from] FincatError),
    #[error("recovered action is invalid: {0}")]
    Action(#[from] ActionError),
    #[error(transparent)]
    KGraph(#[from] KGraphError),
    #[error(transparent)]
    Product(#[from] ProductError),
}

/// `θ` as a document: arrow id -> `[path id, groupoid arrow id]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThetaDoc {
    pub bound: Vec<u32>,
    pub transversal: Vec<String>,
    /// Transversal arrow id -> edge id, where they differ.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub edge_names: BTreeMap<String, String>,
    pub theta: BTreeMap<String, [String; 2]>,
}

#[derive(Clone, Debug)]
pub struct Decomposition {
    pub transversal: Vec<ArrowIx>,
    pub action: ZSAction,
    /// Indexed by arrows of the input category.
    pub theta: Vec<ProductArrow>,
    pub bound: Degree,
    edge_of: HashMap<ArrowIx, EdgeIx>,
    pub action_doc: ActionDoc,
}

fn edge_name(id: &str, objects: &HashSet<String>, used: &HashSet<String>) -> bool {
    !id.is_empty() && !id.contains(['.', '|']) && !objects.contains(id) && !used.contains(id)
}

/// Splits `(C, λ)` into a k-graph, a groupoid and an action. The input must
/// satisfy the WFP and the R-condition for the canonical transversal.
pub fn decompose(cat: &FinCategory, size: &SizeFunctor) -> Result<Decomposition, DecomposeError> {
    let wfp = check_wfp(cat, size);
    if !wfp.holds {
        return Err(DecomposeError::PreconditionFailed(Box::new(wfp)));
    }
    let fz = Factorizer::canonical(cat, size)?;
    let xs = fz.transversal();
    let rc = check_r_condition(cat, &xs);
    if !rc.holds {
        return Err(DecomposeError::PreconditionFailed(Box::new(rc)));
    }
    let k = size.rank();
    let obj = |a: ArrowIx, dom: bool| cat.object_id(if dom { cat.dom(a) } else { cat.cod(a) }).to_string();

    let reserved: HashSet<String> = cat.objects().map(|v| identity_path_id(cat.object_id(v))).collect();
    let mut used = HashSet::new();
    let mut names = HashMap::new();
    let mut edges = Vec::new();
    for (i, &x) in xs.iter().enumerate() {
        let color = size.degree(x).unit_index().ok_or_else(|| DecomposeError::NotUnitDegree(cat.id(x).into()))?;
        let mut name = cat.id(x).to_string();
        if !edge_name(&name, &reserved, &used) {
            name = (i..)
                .map(|j| format!("x{j}"))
                .find(|n| edge_name(n, &reserved, &used) && cat.arrow(n).is_none())
                .unwrap();
        }
        used.insert(name.clone());
        names.insert(x, name.clone());
        edges.push(EdgeDoc { id: name, color: color + 1, dom: obj(x, true), cod: obj(x, false) });
    }

    // one letter times an invertible
    let letter = |a: ArrowIx| -> Result<(ArrowIx, ArrowIx), DecomposeError> {
        let f = fz.xg_factorize(a)?;
        match f.xs.as_slice() {
            [x] => Ok((*x, f.residue)),
            _ => Err(DecomposeError::NotUnitDegree(cat.id(a).into())),
        }
    };

    let mut squares = Vec::new();
    for &f in &xs {
        for &e in &xs {
            let (cf, ce) = (size.degree(f).unit_index(), size.degree(e).unit_index());
            if cf <= ce || cat.dom(f) != cat.cod(e) {
                continue;
            }
            let Some(t) = cat.compose(f, e) else { continue };
            let &(b, c) = cat
                .factorizations(t)
                .iter()
                .find(|(b, _)| size.degree(*b).unit_index() == ce)
                .ok_or_else(|| DecomposeError::NonUniqueRepresentation(cat.id(t).into()))?;
            let (e2, h) = letter(b)?;
            let hc = cat.compose(h, c).ok_or_else(|| DecomposeError::NonUniqueRepresentation(cat.id(t).into()))?;
            let (f2, h2) = letter(hc)?;
            if !cat.is_identity(h2) {
                return Err(DecomposeError::NonUniqueRepresentation(cat.id(t).into()));
            }
            squares.push(SquareDoc {
                lhs: [names[&f].clone(), names[&e].clone()],
                rhs: [names[&e2].clone(), names[&f2].clone()],
            });
        }
    }
    let skeleton =
        SkeletonDoc { k, objects: cat.objects().map(|v| cat.object_id(v).to_string()).collect(), edges, squares };

    let invertibles = cat.invertibles();
    let inv_set: HashSet<ArrowIx> = invertibles.iter().copied().collect();
    let mut compose = Vec::new();
    for &g in &invertibles {
        for &(h, gh) in cat.right_products(g) {
            if inv_set.contains(&h) && !cat.is_identity(g) && !cat.is_identity(h) {
                compose.push([cat.id(g).to_string(), cat.id(h).to_string(), cat.id(gh).to_string()]);
            }
        }
    }
    compose.sort();
    let groupoid = CategoryDoc {
        objects: skeleton.objects.clone(),
        arrows: invertibles
            .iter()
            .map(|&g| ArrowDoc { id: cat.id(g).to_string(), dom: obj(g, true), cod: obj(g, false) })
            .collect(),
        identities: cat
            .objects()
            .map(|v| (cat.object_id(v).to_string(), cat.id(cat.identity(v)).to_string()))
            .collect(),
        compose,
        ..Default::default()
    };

    let mut on_edges = Vec::new();
    for &g in &invertibles {
        for &(x, gx) in cat.right_products(g) {
            if !names.contains_key(&x) {
                continue;
            }
            let (y, h) = letter(gx)?;
            on_edges.push(ActionRowDoc {
                g: cat.id(g).to_string(),
                e: names[&x].clone(),
                ge: names[&y].clone(),
                rest: cat.id(h).to_string(),
            });
        }
    }
    on_edges.sort();
    let action_doc = ActionDoc { kgraph: skeleton, groupoid, on_edges };
    let action = validate_action(&action_doc)?;

    let (kg, g) = (action.kgraph(), action.groupoid());
    let edge_of: HashMap<ArrowIx, EdgeIx> =
        names.iter().map(|(&x, n)| (x, kg.edge_by_id(n).expect("edge was declared"))).collect();
    let mut theta = Vec::with_capacity(cat.arrow_count());
    for a in cat.arrows() {
        let f = fz.xg_factorize(a)?;
        let path = if f.xs.is_empty() {
            kg.identity_path(kg.object(cat.object_id(cat.cod(a))).expect("shared objects"))
        } else {
            let word: Vec<EdgeIx> = f.xs.iter().map(|x| edge_of[x]).collect();
            kg.normalize(&word)?
        };
        let gi = g.arrow(cat.id(f.residue)).expect("residue is invertible");
        theta.push(ProductArrow { path, g: gi });
    }
    let bound = cat.bound().cloned().unwrap_or_else(|| size.max_degree());
    Ok(Decomposition { transversal: xs, action, theta, bound, edge_of, action_doc })
}

/// Outcome of comparing the input category against the product of the
/// recovered action on the same window.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IsoReport {
    pub arrows: usize,
    pub product_arrows: usize,
    pub bijective: bool,
    pub functorial: bool,
    pub degree_preserved: bool,
    pub witnesses: Vec<String>,
}

impl IsoReport {
    pub fn holds(&self) -> bool {
        self.bijective && self.functorial && self.degree_preserved
    }
}

/// Checks that `θ` is a bijection onto the product window, carries the table
/// of `cat` exactly onto the product table, and turns `λ` into the path
/// degree.
pub fn verify_iso(cat: &FinCategory, size: &SizeFunctor, d: &Decomposition) -> Result<IsoReport, DecomposeError> {
    let p = build_product(&d.action, &d.bound)?;
    let mut w = Vec::new();
    let image: Vec<Option<ArrowIx>> = d.theta.iter().map(|t| p.arrow_of(t)).collect();
    let name = |t: &ProductArrow| product_arrow_id(&d.action, t);

    let mut bijective = cat.arrow_count() == p.len();
    if !bijective {
        w.push(format!("{} arrows against {} in the product", cat.arrow_count(), p.len()));
    }
    let mut hit = HashMap::new();
    for a in cat.arrows() {
        match image[a.0] {
            None => {
                bijective = false;
                w.push(format!("θ({}) = {} is outside the window", cat.id(a), name(&d.theta[a.0])));
            }
            Some(t) => {
                if let Some(prev) = hit.insert(t, a) {
                    bijective = false;
                    w.push(format!("θ({}) = θ({})", cat.id(prev), cat.id(a)));
                }
            }
        }
    }

    let mut functorial = true;
    let mut cat_entries = 0usize;
    for a in cat.arrows() {
        for &(b, ab) in cat.right_products(a) {
            cat_entries += 1;
            let (Some(ta), Some(tb), Some(tab)) = (image[a.0], image[b.0], image[ab.0]) else { continue };
            if p.category.compose(ta, tb) != Some(tab) {
                functorial = false;
                w.push(format!("θ({}·{}) != θ({})·θ({})", cat.id(a), cat.id(b), cat.id(a), cat.id(b)));
            }
        }
    }
    let product_entries: usize = p.category.arrows().map(|a| p.category.right_products(a).len()).sum();
    if bijective && cat_entries != product_entries {
        functorial = false;
        w.push(format!("{cat_entries} composites against {product_entries} in the product"));
    }

    let mut degree_preserved = true;
    for a in cat.arrows() {
        if size.degree(a) != d.theta[a.0].path.degree() {
            degree_preserved = false;
            w.push(format!("λ({}) != δ of its path", cat.id(a)));
        }
    }
    Ok(IsoReport {
        arrows: cat.arrow_count(),
        product_arrows: p.len(),
        bijective,
        functorial,
        degree_preserved,
        witnesses: w,
    })
}

impl Decomposition {
    pub fn theta_doc(&self, cat: &FinCategory) -> ThetaDoc {
        let (kg, g) = (self.action.kgraph(), self.action.groupoid());
        let mut transversal: Vec<String> = self.transversal.iter().map(|&x| cat.id(x).to_string()).collect();
        transversal.sort();
        let edge_names = self
            .edge_of
            .iter()
            .filter(|(&x, &e)| cat.id(x) != kg.edge(e).id)
            .map(|(&x, &e)| (cat.id(x).to_string(), kg.edge(e).id.clone()))
            .collect();
        ThetaDoc {
            bound: self.bound.as_slice().to_vec(),
            transversal,
            edge_names,
            theta: cat
                .arrows()
                .map(|a| {
                    let t = &self.theta[a.0];
                    (cat.id(a).to_string(), [kg.path_id(&t.path), g.id(t.g).to_string()])
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::load;
    use crate::fixtures;

    #[test]
    fn swap_round_trip() {
        let a = validate_action(&fixtures::swap()).unwrap();
        let p = build_product(&a, &Degree::from_vec(vec![2])).unwrap();
        let d = decompose(&p.category, &p.size).unwrap();
        assert_eq!(d.transversal.len(), 2);
        assert_eq!(d.action.groupoid().arrow_count(), 2);
        let r = verify_iso(&p.category, &p.size, &d).unwrap();
        assert!(r.holds(), "{r:?}");
        assert_eq!(r.arrows, 14);

        // relabel groupoid arrows back through the embedding and compare rows
        let emb = &p.doc.embeddings.as_ref().unwrap().groupoid;
        let back: BTreeMap<&str, &str> = emb.iter().map(|(k, v)| (v.as_str(), k.as_str())).collect();
        let recovered: BTreeMap<(String, String), (String, String)> = d
            .action
            .rows_by_id()
            .into_iter()
            .map(|((g, e), (ge, r))| ((back[g.as_str()].to_string(), e), (ge, back[r.as_str()].to_string())))
            .collect();
        assert_eq!(recovered, a.rows_by_id());
    }

    #[test]
    fn groupoid_decomposes_to_no_edges() {
        let (cat, _) = load(&fixtures::z2_groupoid()).unwrap();
        let size = crate::fincat::validate_size_functor(
            &cat,
            &crate::doc::SizeDoc { k: 1, deg: [("1".into(), vec![0]), ("s".into(), vec![0])].into() },
        )
        .unwrap();
        let d = decompose(&cat, &size).unwrap();
        assert!(d.transversal.is_empty());
        assert!(d.theta.iter().all(|t| t.path.is_empty()));
        assert!(verify_iso(&cat, &size, &d).unwrap().holds());
    }

    #[test]
    fn trivial_product_over_n2_recovers_the_trivial_action() {
        let a = validate_action(&fixtures::trivial_action(fixtures::n2())).unwrap();
        let p = build_product(&a, &Degree::from_vec(vec![2, 2])).unwrap();
        let d = decompose(&p.category, &p.size).unwrap();
        assert_eq!(d.action.groupoid().arrow_count(), 1);
        assert_eq!(d.action.kgraph().to_doc().squares, fixtures::n2().squares);
        assert!(verify_iso(&p.category, &p.size, &d).unwrap().holds());
    }

    #[test]
    fn diamond_is_rejected() {
        let (cat, size) = load(&fixtures::diamond()).unwrap();
        assert!(matches!(decompose(&cat, &size.unwrap()), Err(DecomposeError::PreconditionFailed(_))));
    }

    #[test]
    fn corrupted_table_is_caught() {
        let a = validate_action(&fixtures::swap()).unwrap();
        let p = build_product(&a, &Degree::from_vec(vec![2])).unwrap();
        let d = decompose(&p.category, &p.size).unwrap();
        let mut cat = p.category.clone();
        let id = |s: &str| cat.arrow(s).unwrap();
        let (x, y, wrong) = (id("a"), id("b"), id("b.a"));
        cat.corrupt_composite(x, y, wrong);
        let r = verify_iso(&cat, &p.size, &d).unwrap();
        assert!(!r.functorial);
        assert!(!r.holds());
    }
}
