//! The Zappa-Szép product `X ⋈ G` of a validated action and its finite
//! windows.
//!
//! Arrows are pairs `(x, g)` with `d(x) = r(g)`, composed by
//! `(x, g)(y, h) = (x (g·y), g|y h)`, graded by the degree of `x`.
//!
//! In emitted documents the arrow `(x, d(x))` is named by the path id of `x`
//! and any other `(x, g)` by `x|g`, so each image of a path sorts before the
//! other arrows in its right class.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;
use thiserror::Error;

use crate::degree::Degree;
use crate::doc::{ArrowDoc, CategoryDoc, EmbeddingsDoc, SizeDoc};
use crate::fincat::{
    transversal, validate_category, validate_size_functor, ArrowIx, FinCategory, FincatError, SizeFunctor,
};
use crate::kgraph::{identity_path_id, KGraphError, Path};
use crate::laws::{check_cancellative, check_r_condition, check_wfp, CancelSide, LawReport};
use crate::zsaction::ZSAction;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProductArrow {
    pub path: Path,
    pub g: ArrowIx,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProductError {
    #[error(transparent)]
    KGraph(#[from] KGraphError),
    #[error("product table is not a category: {0}")]
    Category(FincatError),
    #[error("degree map on the product is not a size functor: {0}")]
    Size(FincatError),
    #[error("embedding check failed: {0}")]
    Embedding(String),
}

/// `(x, g)(y, h) = (x (g·y), g|y h)`.
pub fn compose_product(a: &ZSAction, p: &ProductArrow, q: &ProductArrow) -> Result<ProductArrow, KGraphError> {
    let g = a.groupoid();
    if a.g_dom(p.g) != q.path.cod() {
        return Err(KGraphError::NotComposable(format!("d({}) != r({})", g.id(p.g), a.kgraph().path_id(&q.path))));
    }
    let (gy, g_y) = a.act_restrict(p.g, &q.path)?;
    let path = a.kgraph().compose_paths(&p.path, &gy)?;
    let gh = g.compose(g_y, q.g).expect("restriction lands at the range of the right factor");
    Ok(ProductArrow { path, g: gh })
}

pub fn product_arrow_id(a: &ZSAction, p: &ProductArrow) -> String {
    let x = a.kgraph().path_id(&p.path);
    if a.groupoid().is_identity(p.g) {
        x
    } else {
        format!("{x}|{}", a.groupoid().id(p.g))
    }
}

/// A degree window of `X ⋈ G` as a validated finite category.
#[derive(Clone, Debug)]
pub struct Product {
    pub bound: Degree,
    pub category: FinCategory,
    pub size: SizeFunctor,
    /// Indexed by the category's arrow indices.
    pub arrows: Vec<ProductArrow>,
    index: HashMap<ProductArrow, ArrowIx>,
    pub doc: CategoryDoc,
}

impl Product {
    pub fn arrow_of(&self, p: &ProductArrow) -> Option<ArrowIx> {
        self.index.get(p).copied()
    }

    pub fn len(&self) -> usize {
        self.arrows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arrows.is_empty()
    }
}

/// Every `(x, g)` with `deg(x) <= bound`, with the table restricted to
/// composites inside the window and `λ(x, g) = deg(x)`.
pub fn build_product(a: &ZSAction, bound: &Degree) -> Result<Product, ProductError> {
    let (kg, g) = (a.kgraph(), a.groupoid());
    let paths = kg.enumerate_paths(bound)?;
    let mut arrows = Vec::new();
    for x in &paths {
        for h in g.arrows().filter(|&h| a.g_cod(h) == x.dom()) {
            arrows.push(ProductArrow { path: x.clone(), g: h });
        }
    }
    let ids: Vec<String> = arrows.iter().map(|p| product_arrow_id(a, p)).collect();
    let index: HashMap<ProductArrow, usize> = arrows.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();

    let mut by_cod: HashMap<_, Vec<usize>> = HashMap::new();
    for (i, p) in arrows.iter().enumerate() {
        by_cod.entry(p.path.cod()).or_default().push(i);
    }
    let mut compose = Vec::new();
    for (i, p) in arrows.iter().enumerate() {
        if p.path.is_empty() && g.is_identity(p.g) {
            continue;
        }
        for &j in by_cod.get(&a.g_dom(p.g)).map(Vec::as_slice).unwrap_or(&[]) {
            let q = &arrows[j];
            if q.path.is_empty() && g.is_identity(q.g) {
                continue;
            }
            match p.path.degree().checked_add(q.path.degree()) {
                Some(d) if d.le(bound) => {}
                _ => continue,
            }
            let pq = compose_product(a, p, q)?;
            compose.push([ids[i].clone(), ids[j].clone(), ids[index[&pq]].clone()]);
        }
    }

    let object = |v| kg.object_id(v).to_string();
    let mut paths_emb = BTreeMap::new();
    for x in &paths {
        let iota = ProductArrow { path: x.clone(), g: a.identity_at(x.dom()) };
        paths_emb.insert(kg.path_id(x), ids[index[&iota]].clone());
    }
    let mut groupoid_emb = BTreeMap::new();
    for h in g.arrows() {
        let iota = ProductArrow { path: kg.identity_path(a.g_cod(h)), g: h };
        groupoid_emb.insert(g.id(h).to_string(), ids[index[&iota]].clone());
    }
    let doc = CategoryDoc {
        objects: kg.object_ids().to_vec(),
        arrows: arrows
            .iter()
            .zip(&ids)
            .map(|(p, id)| ArrowDoc { id: id.clone(), dom: object(a.g_dom(p.g)), cod: object(p.path.cod()) })
            .collect(),
        identities: kg.object_ids().iter().map(|o| (o.clone(), identity_path_id(o))).collect(),
        compose,
        inverses: None,
        size: Some(SizeDoc {
            k: kg.rank(),
            deg: arrows.iter().zip(&ids).map(|(p, id)| (id.clone(), p.path.degree().as_slice().to_vec())).collect(),
        }),
        bound: Some(bound.as_slice().to_vec()),
        embeddings: Some(EmbeddingsDoc { paths: paths_emb, groupoid: groupoid_emb }),
    };

    let category = validate_category(&doc).map_err(ProductError::Category)?;
    let size =
        validate_size_functor(&category, doc.size.as_ref().expect("size section")).map_err(ProductError::Size)?;
    let index: HashMap<ProductArrow, ArrowIx> = index.into_iter().map(|(p, i)| (p, ArrowIx(i))).collect();
    let product = Product { bound: bound.clone(), category, size, arrows, index, doc };
    check_embeddings(a, &product)?;
    Ok(product)
}

/// `ι_X(x) = (x, d(x))` and `ι_G(g) = (r(g), g)` are injective functors on
/// the window and every arrow is `ι_X(x) ι_G(g)`.
fn check_embeddings(a: &ZSAction, p: &Product) -> Result<(), ProductError> {
    let (kg, g, cat) = (a.kgraph(), a.groupoid(), &p.category);
    let emb = p.doc.embeddings.as_ref().expect("embeddings section");
    let mut seen = std::collections::HashSet::new();
    for target in emb.paths.values() {
        if !seen.insert(target) {
            return Err(ProductError::Embedding(format!("`{target}` is hit twice by paths")));
        }
    }
    seen.clear();
    for target in emb.groupoid.values() {
        if !seen.insert(target) {
            return Err(ProductError::Embedding(format!("`{target}` is hit twice by the groupoid")));
        }
    }
    for (i, pa) in p.arrows.iter().enumerate() {
        let ix = ProductArrow { path: pa.path.clone(), g: a.identity_at(pa.path.dom()) };
        let ig = ProductArrow { path: kg.identity_path(pa.path.dom()), g: pa.g };
        let (ix, ig) = (p.index[&ix], p.index[&ig]);
        if cat.compose(ix, ig) != Some(ArrowIx(i)) {
            return Err(ProductError::Embedding(format!("`{}` is not ι_X(x) ι_G(g)", cat.id(ArrowIx(i)))));
        }
    }
    let emb = |x: ArrowIx| p.index[&ProductArrow { path: kg.identity_path(a.g_cod(x)), g: x }];
    for h1 in g.arrows() {
        for &(h2, h) in g.right_products(h1) {
            if cat.compose(emb(h1), emb(h2)) != Some(emb(h)) {
                return Err(ProductError::Embedding(format!("ι_G is not a functor at ({}, {})", g.id(h1), g.id(h2))));
            }
        }
    }
    Ok(())
}

/// Results of running the law checkers on one product window.
#[derive(Clone, Debug, Serialize)]
pub struct ProductLaws {
    pub bound: Vec<u32>,
    pub arrows: usize,
    pub category_valid: bool,
    pub size_functor_valid: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub reports: Vec<LawReport>,
}

impl ProductLaws {
    pub fn all_hold(&self) -> bool {
        self.category_valid && self.size_functor_valid && self.error.is_none() && self.reports.iter().all(|r| r.holds)
    }
}

/// Builds the window and runs the category and size-functor validation, the
/// WFP, the R-condition and left cancellativity on it.
pub fn verify_product_laws(a: &ZSAction, bound: &Degree) -> ProductLaws {
    let mut out = ProductLaws {
        bound: bound.as_slice().to_vec(),
        arrows: 0,
        category_valid: false,
        size_functor_valid: false,
        error: None,
        reports: Vec::new(),
    };
    let p = match build_product(a, bound) {
        Ok(p) => p,
        Err(e) => {
            match &e {
                ProductError::Size(_) => out.category_valid = true,
                ProductError::Embedding(_) => {
                    out.category_valid = true;
                    out.size_functor_valid = true;
                }
                _ => {}
            }
            out.error = Some(e.to_string());
            return out;
        }
    };
    out.arrows = p.len();
    out.category_valid = true;
    out.size_functor_valid = true;
    out.reports.push(check_wfp(&p.category, &p.size));
    match transversal(&p.category, &p.size) {
        Ok(xs) => out.reports.push(check_r_condition(&p.category, &xs)),
        Err(e) => out.error = Some(e.to_string()),
    }
    out.reports.push(check_cancellative(&p.category, CancelSide::Left));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::{atoms, ideal_classes, xg_factorize, Side};
    use crate::fixtures;
    use crate::zsaction::validate_action;

    fn swap() -> ZSAction {
        validate_action(&fixtures::swap()).unwrap()
    }

    #[test]
    fn swap_composition_example() {
        let a = swap();
        let (kg, g) = (a.kgraph(), a.groupoid());
        let s = g.arrow("s").unwrap();
        let one = g.arrow("1").unwrap();
        let pa = ProductArrow { path: kg.normalize_ids(&["a"]).unwrap(), g: s };
        let qa = ProductArrow { path: kg.normalize_ids(&["a"]).unwrap(), g: one };
        let r = compose_product(&a, &pa, &qa).unwrap();
        assert_eq!(kg.path_id(&r.path), "a.b");
        assert_eq!(r.g, s);
    }

    #[test]
    fn swap_window_of_degree_two() {
        let a = swap();
        let p = build_product(&a, &Degree::from_vec(vec![2])).unwrap();
        assert_eq!(p.len(), 14);
        let cat = &p.category;
        let id = |s: &str| cat.arrow(s).unwrap();
        let mut atom_ids: Vec<&str> = atoms(cat, &p.size).unwrap().into_iter().map(|x| cat.id(x)).collect();
        atom_ids.sort();
        assert_eq!(atom_ids, ["a", "a|s", "b", "b|s"]);
        let t = transversal(cat, &p.size).unwrap();
        assert_eq!(t, vec![id("a"), id("b")]);
        let rc = ideal_classes(cat, Side::Right, Some(&p.size)).unwrap();
        assert_eq!(rc.class_of(id("a")), rc.class_of(id("a|s")));
        let f = xg_factorize(cat, &p.size, &t, id("b.a|s")).unwrap();
        assert_eq!(f.xs, vec![id("b"), id("a")]);
        assert_eq!(f.residue, id("1_0|s"));
    }

    #[test]
    fn swap_laws_hold_at_three() {
        let laws = verify_product_laws(&swap(), &Degree::from_vec(vec![3]));
        assert!(laws.all_hold(), "{laws:?}");
        assert_eq!(laws.arrows, 30);
    }

    #[test]
    fn trivial_product_over_n2_is_the_kgraph() {
        let a = validate_action(&fixtures::trivial_action(fixtures::n2())).unwrap();
        let p = build_product(&a, &Degree::from_vec(vec![1, 1])).unwrap();
        assert_eq!(p.len(), 4);
        assert!(verify_product_laws(&a, &Degree::from_vec(vec![1, 1])).all_hold());
    }

    #[test]
    fn zero_bound_gives_the_groupoid() {
        let p = build_product(&swap(), &Degree::from_vec(vec![0])).unwrap();
        assert_eq!(p.len(), 2);
        assert!(p.category.is_groupoid());
    }
}
