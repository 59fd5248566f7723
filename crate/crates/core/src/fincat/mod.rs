//! Explicit finite categories, size functors, principal ideals and atoms.
//!
//! A [`FinCategory`] is only ever obtained through [`validate_category`], so
//! every value of the type satisfies the category axioms on its table. Arrows
//! and objects are addressed by dense indices ([`ArrowIx`], [`ObjIx`]) in
//! document order; string ids are kept for reporting and tie-breaking.

mod factor;
mod ideals;
mod lemmas;
mod size;

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::degree::Degree;
use crate::doc::{ArrowDoc, CategoryDoc};

pub(crate) use factor::Factorizer;
pub use factor::{atom_factorize, xg_factorize, XgFactorization};
pub use ideals::{atoms, ideal_classes, transversal, IdealReport, Side};
pub use lemmas::{verify_size_lemmas, LemmaFailure};
pub use size::{validate_size_functor, SizeFunctor};

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ArrowIx(pub usize);

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ObjIx(pub usize);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FincatError {
    #[error("duplicate object id `{0}`")]
    DuplicateObject(String),
    #[error("duplicate arrow id `{0}`")]
    DuplicateArrow(String),
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("unknown arrow `{0}`")]
    UnknownArrow(String),
    #[error("composition entry [{f}, {g}, {fg}] violates the domain/codomain rule")]
    NotComposable { f: String, g: String, fg: String },
    #[error("composite of {f} and {g} listed twice with different results")]
    ConflictingComposite { f: String, g: String },
    #[error("composable pair ({f}, {g}) has no composite")]
    MissingComposite { f: String, g: String },
    #[error("associativity fails on ({a}, {b}, {c})")]
    NonAssociative { a: String, b: String, c: String },
    #[error("bad identity at object `{object}`: {detail}")]
    BadIdentity { object: String, detail: String },
    #[error("bad inverse data for `{0}`")]
    BadInverse(String),
    #[error("degree window requires a size functor")]
    MissingSize,
    #[error("size functor has rank {found}, expected {expected}")]
    RankMismatch { expected: usize, found: usize },
    #[error("no degree given for arrow `{0}`")]
    MissingDegree(String),
    #[error("size functor is not additive on ({a}, {b})")]
    NotFunctorial { a: String, b: String },
    #[error("non-invertible arrow `{0}` has degree zero")]
    ZeroOnNonInvertible(String),
    #[error("invertible arrow `{0}` has non-zero degree")]
    NonZeroOnInvertible(String),
    #[error("degree overflow on ({a}, {b})")]
    DegreeOverflow { a: String, b: String },
    #[error("composite of ({a}, {b}) lies outside the degree window")]
    OutOfWindow { a: String, b: String },
    #[error("right ideal and coset relations disagree on ({a}, {b})")]
    IdealCosetMismatch { a: String, b: String },
    #[error("structural check `{lemma}` fails: {detail}")]
    LemmaViolation { lemma: &'static str, detail: String },
    #[error("arrow `{0}` is invertible")]
    InvertibleInput(String),
}

#[derive(Clone, Debug)]
struct ArrowData {
    id: String,
    dom: ObjIx,
    cod: ObjIx,
}

/// A validated finite category, possibly a degree-bounded window of a larger
/// one (see [`FinCategory::bound`]).
#[derive(Clone, Debug)]
pub struct FinCategory {
    objects: Vec<String>,
    arrows: Vec<ArrowData>,
    identities: Vec<ArrowIx>,
    table: HashMap<(ArrowIx, ArrowIx), ArrowIx>,
    // a -> [(x, ax)]
    right_products: Vec<Vec<(ArrowIx, ArrowIx)>>,
    // b -> [(x, xb)]
    left_products: Vec<Vec<(ArrowIx, ArrowIx)>>,
    // t -> [(a, b)] with ab = t
    factorizations: Vec<Vec<(ArrowIx, ArrowIx)>>,
    inverse: Vec<Option<ArrowIx>>,
    bound: Option<Degree>,
    arrow_index: HashMap<String, ArrowIx>,
    object_index: HashMap<String, ObjIx>,
}

impl FinCategory {
    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn arrow_count(&self) -> usize {
        self.arrows.len()
    }

    pub fn objects(&self) -> impl Iterator<Item = ObjIx> + '_ {
        (0..self.objects.len()).map(ObjIx)
    }

    pub fn arrows(&self) -> impl Iterator<Item = ArrowIx> + '_ {
        (0..self.arrows.len()).map(ArrowIx)
    }

    pub fn object_id(&self, v: ObjIx) -> &str {
        &self.objects[v.0]
    }

    pub fn id(&self, a: ArrowIx) -> &str {
        &self.arrows[a.0].id
    }

    pub fn dom(&self, a: ArrowIx) -> ObjIx {
        self.arrows[a.0].dom
    }

    pub fn cod(&self, a: ArrowIx) -> ObjIx {
        self.arrows[a.0].cod
    }

    pub fn identity(&self, v: ObjIx) -> ArrowIx {
        self.identities[v.0]
    }

    pub fn is_identity(&self, a: ArrowIx) -> bool {
        self.identities[self.dom(a).0] == a
    }

    pub fn arrow(&self, id: &str) -> Option<ArrowIx> {
        self.arrow_index.get(id).copied()
    }

    pub fn object(&self, id: &str) -> Option<ObjIx> {
        self.object_index.get(id).copied()
    }

    /// `a·b`, defined when `dom(a) = cod(b)` and the composite is in the table.
    pub fn compose(&self, a: ArrowIx, b: ArrowIx) -> Option<ArrowIx> {
        self.table.get(&(a, b)).copied()
    }

    /// Composite of a non-empty sequence, outermost first.
    pub fn compose_all(&self, seq: &[ArrowIx]) -> Option<ArrowIx> {
        let (&last, rest) = seq.split_last()?;
        rest.iter().rev().try_fold(last, |acc, &a| self.compose(a, acc))
    }

    pub fn is_invertible(&self, a: ArrowIx) -> bool {
        self.inverse[a.0].is_some()
    }

    pub fn inverse(&self, a: ArrowIx) -> Option<ArrowIx> {
        self.inverse[a.0]
    }

    pub fn invertibles(&self) -> Vec<ArrowIx> {
        self.arrows().filter(|&a| self.is_invertible(a)).collect()
    }

    /// All `(x, a·x)` present in the table.
    pub fn right_products(&self, a: ArrowIx) -> &[(ArrowIx, ArrowIx)] {
        &self.right_products[a.0]
    }

    /// All `(x, x·b)` present in the table.
    pub fn left_products(&self, b: ArrowIx) -> &[(ArrowIx, ArrowIx)] {
        &self.left_products[b.0]
    }

    /// All `(a, b)` with `a·b = t`.
    pub fn factorizations(&self, t: ArrowIx) -> &[(ArrowIx, ArrowIx)] {
        &self.factorizations[t.0]
    }

    /// The degree window this table was truncated to, if any.
    pub fn bound(&self) -> Option<&Degree> {
        self.bound.as_ref()
    }

    pub fn is_groupoid(&self) -> bool {
        self.inverse.iter().all(Option::is_some)
    }

    /// Arrows ordered by id string.
    pub fn arrows_by_id(&self) -> Vec<ArrowIx> {
        let mut v: Vec<ArrowIx> = self.arrows().collect();
        v.sort_by(|a, b| self.id(*a).cmp(self.id(*b)));
        v
    }

    /// Serializes back to a document. Identity products are omitted.
    pub fn to_doc(&self, size: Option<&SizeFunctor>) -> CategoryDoc {
        let mut compose: Vec<[String; 3]> = self
            .table
            .iter()
            .filter(|((a, b), _)| !self.is_identity(*a) && !self.is_identity(*b))
            .map(|((a, b), c)| [self.id(*a).to_string(), self.id(*b).to_string(), self.id(*c).to_string()])
            .collect();
        compose.sort();
        let mut inverses: Vec<[String; 2]> = self
            .arrows()
            .filter_map(|a| self.inverse(a).map(|b| [self.id(a).to_string(), self.id(b).to_string()]))
            .collect();
        inverses.sort();
        CategoryDoc {
            objects: self.objects.clone(),
            arrows: self
                .arrows
                .iter()
                .map(|d| ArrowDoc {
                    id: d.id.clone(),
                    dom: self.objects[d.dom.0].clone(),
                    cod: self.objects[d.cod.0].clone(),
                })
                .collect(),
            identities: self
                .objects()
                .map(|v| (self.object_id(v).to_string(), self.id(self.identity(v)).to_string()))
                .collect(),
            compose,
            inverses: Some(inverses),
            size: size.map(|s| s.to_doc(self)),
            bound: self.bound.as_ref().map(|b| b.as_slice().to_vec()),
            embeddings: None,
        }
    }

    /// Overwrites one table entry without re-validation.
    #[cfg(test)]
    pub(crate) fn corrupt_composite(&mut self, a: ArrowIx, b: ArrowIx, result: ArrowIx) {
        self.table.insert((a, b), result);
        self.rebuild_indexes();
    }

    fn rebuild_indexes(&mut self) {
        let n = self.arrows.len();
        self.right_products = vec![Vec::new(); n];
        self.left_products = vec![Vec::new(); n];
        self.factorizations = vec![Vec::new(); n];
        for (&(a, b), &c) in &self.table {
            self.right_products[a.0].push((b, c));
            self.left_products[b.0].push((a, c));
            self.factorizations[c.0].push((a, b));
        }
        for list in
            self.right_products.iter_mut().chain(self.left_products.iter_mut()).chain(self.factorizations.iter_mut())
        {
            list.sort();
        }
    }
}

/// Validates a category document exhaustively: composition rule, identities,
/// associativity on every composable triple, and inverse data.
///
/// The `size` section is not looked at here; see [`validate_size_functor`]
/// or [`load`].
pub fn validate_category(doc: &CategoryDoc) -> Result<FinCategory, FincatError> {
    let mut object_index = HashMap::new();
    for (i, o) in doc.objects.iter().enumerate() {
        if object_index.insert(o.clone(), ObjIx(i)).is_some() {
            return Err(FincatError::DuplicateObject(o.clone()));
        }
    }
    let obj = |id: &str| object_index.get(id).copied().ok_or_else(|| FincatError::UnknownObject(id.to_string()));

    let mut arrows = Vec::with_capacity(doc.arrows.len());
    let mut arrow_index = HashMap::new();
    for (i, a) in doc.arrows.iter().enumerate() {
        if arrow_index.insert(a.id.clone(), ArrowIx(i)).is_some() {
            return Err(FincatError::DuplicateArrow(a.id.clone()));
        }
        arrows.push(ArrowData { id: a.id.clone(), dom: obj(&a.dom)?, cod: obj(&a.cod)? });
    }
    let arr = |id: &str| arrow_index.get(id).copied().ok_or_else(|| FincatError::UnknownArrow(id.to_string()));

    let mut identities = vec![None; doc.objects.len()];
    for (o, a) in &doc.identities {
        let v = obj(o)?;
        let ia = arr(a)?;
        if arrows[ia.0].dom != v || arrows[ia.0].cod != v {
            return Err(FincatError::BadIdentity {
                object: o.clone(),
                detail: format!("`{a}` is not a loop at `{o}`"),
            });
        }
        identities[v.0] = Some(ia);
    }
    let identities: Vec<ArrowIx> = identities
        .into_iter()
        .enumerate()
        .map(|(i, id)| {
            id.ok_or_else(|| FincatError::BadIdentity {
                object: doc.objects[i].clone(),
                detail: "no identity given".into(),
            })
        })
        .collect::<Result<_, _>>()?;

    let mut table: HashMap<(ArrowIx, ArrowIx), ArrowIx> = HashMap::new();
    for [f, g, fg] in &doc.compose {
        let (fi, gi, fgi) = (arr(f)?, arr(g)?, arr(fg)?);
        let (df, cf) = (arrows[fi.0].dom, arrows[fi.0].cod);
        let (dg, cg) = (arrows[gi.0].dom, arrows[gi.0].cod);
        if df != cg || arrows[fgi.0].dom != dg || arrows[fgi.0].cod != cf {
            return Err(FincatError::NotComposable { f: f.clone(), g: g.clone(), fg: fg.clone() });
        }
        if let Some(prev) = table.insert((fi, gi), fgi) {
            if prev != fgi {
                return Err(FincatError::ConflictingComposite { f: f.clone(), g: g.clone() });
            }
        }
    }

    // identity products: checked when listed, filled in otherwise
    for (i, a) in arrows.iter().enumerate() {
        let ai = ArrowIx(i);
        for key in [(identities[a.cod.0], ai), (ai, identities[a.dom.0])] {
            match table.get(&key) {
                Some(&r) if r != ai => {
                    let obj_ix = if key.0 == ai { a.dom } else { a.cod };
                    return Err(FincatError::BadIdentity {
                        object: doc.objects[obj_ix.0].clone(),
                        detail: format!("identity is not neutral for `{}`", a.id),
                    });
                }
                Some(_) => {}
                None => {
                    table.insert(key, ai);
                }
            }
        }
    }

    let bound = doc.bound.as_ref().map(|b| Degree::from_vec(b.clone()));
    if bound.is_some() && doc.size.is_none() {
        return Err(FincatError::MissingSize);
    }

    let mut cat = FinCategory {
        objects: doc.objects.clone(),
        arrows,
        identities,
        table,
        right_products: Vec::new(),
        left_products: Vec::new(),
        factorizations: Vec::new(),
        inverse: Vec::new(),
        bound,
        arrow_index,
        object_index,
    };
    cat.rebuild_indexes();

    if cat.bound.is_none() {
        let mut by_cod: Vec<Vec<ArrowIx>> = vec![Vec::new(); cat.object_count()];
        for a in cat.arrows() {
            by_cod[cat.cod(a).0].push(a);
        }
        for a in cat.arrows() {
            for &b in &by_cod[cat.dom(a).0] {
                if cat.compose(a, b).is_none() {
                    return Err(FincatError::MissingComposite { f: cat.id(a).into(), g: cat.id(b).into() });
                }
            }
        }
    }

    check_associativity(&cat)?;

    cat.inverse = compute_inverses(&cat);
    if let Some(pairs) = &doc.inverses {
        let mut listed = BTreeSet::new();
        for [a, b] in pairs {
            let (ai, bi) = (cat.arr_or_err(a)?, cat.arr_or_err(b)?);
            if cat.inverse(ai) != Some(bi) {
                return Err(FincatError::BadInverse(a.clone()));
            }
            listed.insert(ai);
            listed.insert(bi);
        }
        if let Some(missing) =
            cat.arrows().find(|&a| cat.is_invertible(a) && !cat.is_identity(a) && !listed.contains(&a))
        {
            return Err(FincatError::BadInverse(cat.id(missing).to_string()));
        }
    }
    Ok(cat)
}

impl FinCategory {
    fn arr_or_err(&self, id: &str) -> Result<ArrowIx, FincatError> {
        self.arrow(id).ok_or_else(|| FincatError::UnknownArrow(id.to_string()))
    }
}

fn check_associativity(cat: &FinCategory) -> Result<(), FincatError> {
    for a in cat.arrows() {
        for &(b, ab) in cat.right_products(a) {
            for &(c, bc) in cat.right_products(b) {
                let lhs = cat.compose(ab, c);
                let rhs = cat.compose(a, bc);
                if lhs != rhs {
                    return Err(FincatError::NonAssociative {
                        a: cat.id(a).into(),
                        b: cat.id(b).into(),
                        c: cat.id(c).into(),
                    });
                }
            }
        }
    }
    Ok(())
}

fn compute_inverses(cat: &FinCategory) -> Vec<Option<ArrowIx>> {
    cat.arrows()
        .map(|a| {
            let want_r = cat.identity(cat.cod(a));
            let want_d = cat.identity(cat.dom(a));
            cat.right_products(a)
                .iter()
                .find(|&&(b, ab)| ab == want_r && cat.compose(b, a) == Some(want_d))
                .map(|&(b, _)| b)
        })
        .collect()
}

/// Validates a document and its optional `size` section together.
pub fn load(doc: &CategoryDoc) -> Result<(FinCategory, Option<SizeFunctor>), FincatError> {
    let cat = validate_category(doc)?;
    let size = match &doc.size {
        Some(s) => Some(validate_size_functor(&cat, s)?),
        None => None,
    };
    Ok((cat, size))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn monoid(elements: &[&str], table: &[(&str, &str, &str)]) -> CategoryDoc {
        CategoryDoc {
            objects: vec!["*".into()],
            arrows: elements.iter().map(|e| ArrowDoc { id: e.to_string(), dom: "*".into(), cod: "*".into() }).collect(),
            identities: [("*".to_string(), elements[0].to_string())].into(),
            compose: table.iter().map(|(a, b, c)| [a.to_string(), b.to_string(), c.to_string()]).collect(),
            ..Default::default()
        }
    }

    #[test]
    fn diamond_is_valid_with_ten_arrows() {
        let cat = validate_category(&fixtures::diamond()).unwrap();
        assert_eq!(cat.arrow_count(), 10);
        assert_eq!(cat.invertibles().len(), 3);
        let (c, a) = (cat.arrow("c").unwrap(), cat.arrow("a").unwrap());
        assert_eq!(cat.compose(c, a), cat.arrow("x"));
    }

    #[test]
    fn single_identity_category() {
        let cat = validate_category(&monoid(&["1"], &[])).unwrap();
        assert_eq!(cat.arrow_count(), 1);
        assert!(cat.is_groupoid());
    }

    #[test]
    fn entry_with_wrong_domain_is_not_composable() {
        let mut doc = fixtures::diamond();
        // c·a must have domain 2; claim it is y... then break by pointing at c itself
        doc.compose.retain(|t| !(t[0] == "c" && t[1] == "a"));
        doc.compose.push(["c".into(), "a".into(), "c".into()]);
        assert!(matches!(validate_category(&doc), Err(FincatError::NotComposable { .. })));
    }

    #[test]
    fn missing_composite_is_reported() {
        let mut doc = fixtures::diamond();
        doc.compose.retain(|t| !(t[0] == "c" && t[1] == "b"));
        assert!(matches!(validate_category(&doc), Err(FincatError::MissingComposite { .. })));
    }

    #[test]
    fn non_associative_table() {
        // x·x = y, y·x = 1 but x·y = x: (x x) x = 1, x (x x) = x
        let doc = monoid(&["1", "x", "y"], &[("x", "x", "y"), ("x", "y", "x"), ("y", "x", "1"), ("y", "y", "y")]);
        assert!(matches!(validate_category(&doc), Err(FincatError::NonAssociative { .. })));
    }

    #[test]
    fn wrong_identity_product_is_rejected() {
        let doc = monoid(&["1", "a"], &[("1", "a", "1"), ("a", "a", "a")]);
        assert!(matches!(validate_category(&doc), Err(FincatError::BadIdentity { .. })));
    }

    #[test]
    fn inverses_are_checked() {
        let mut doc = monoid(&["1", "s"], &[("s", "s", "1")]);
        doc.inverses = Some(vec![["s".into(), "s".into()]]);
        let cat = validate_category(&doc).unwrap();
        assert!(cat.is_groupoid());

        doc.inverses = Some(vec![]);
        assert!(matches!(validate_category(&doc), Err(FincatError::BadInverse(_))));

        let mut idem = monoid(&["1", "a"], &[("a", "a", "a")]);
        idem.inverses = Some(vec![["a".into(), "a".into()]]);
        assert!(matches!(validate_category(&idem), Err(FincatError::BadInverse(_))));
    }

    #[test]
    fn dangling_arrow_reference() {
        let mut doc = fixtures::diamond();
        doc.compose.push(["c".into(), "q".into(), "x".into()]);
        assert_eq!(validate_category(&doc).unwrap_err(), FincatError::UnknownArrow("q".into()));
    }

    #[test]
    fn round_trip_through_document() {
        let (cat, size) = load(&fixtures::diamond()).unwrap();
        let doc = cat.to_doc(size.as_ref());
        let (again, size2) = load(&doc).unwrap();
        assert_eq!(again.arrow_count(), cat.arrow_count());
        assert_eq!(size2.unwrap().degree(again.arrow("x").unwrap()).as_slice(), &[2]);
    }
}
