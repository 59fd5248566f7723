use std::collections::HashMap;

use fixedbitset::FixedBitSet;
use serde::Serialize;

use super::{ArrowIx, FinCategory, FincatError, SizeFunctor};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    Right,
    Left,
    TwoSided,
}

/// Equality classes of principal ideals on one side.
#[derive(Clone, Debug)]
pub struct IdealReport {
    pub side: Side,
    /// Classes ordered by their first arrow; members in arrow order.
    pub classes: Vec<Vec<ArrowIx>>,
    /// Indices into `classes` of classes whose right ideal is maximal.
    /// Empty unless `side` is [`Side::Right`].
    pub maximal_right_classes: Vec<usize>,
}

impl IdealReport {
    pub fn class_of(&self, a: ArrowIx) -> usize {
        self.classes.iter().position(|c| c.contains(&a)).expect("classes partition the arrows")
    }
}

fn bitset_from(n: usize, items: impl Iterator<Item = ArrowIx>) -> FixedBitSet {
    let mut s = FixedBitSet::with_capacity(n);
    for a in items {
        s.insert(a.0);
    }
    s
}

pub(super) fn right_ideal(cat: &FinCategory, a: ArrowIx) -> FixedBitSet {
    bitset_from(cat.arrow_count(), cat.right_products(a).iter().map(|&(_, ax)| ax))
}

fn left_ideal(cat: &FinCategory, a: ArrowIx) -> FixedBitSet {
    bitset_from(cat.arrow_count(), cat.left_products(a).iter().map(|&(_, xa)| xa))
}

fn ideals(cat: &FinCategory, side: Side) -> Vec<FixedBitSet> {
    match side {
        Side::Right => cat.arrows().map(|a| right_ideal(cat, a)).collect(),
        Side::Left => cat.arrows().map(|a| left_ideal(cat, a)).collect(),
        Side::TwoSided => {
            let right: Vec<_> = cat.arrows().map(|a| right_ideal(cat, a)).collect();
            cat.arrows()
                .map(|a| {
                    let mut s = FixedBitSet::with_capacity(cat.arrow_count());
                    for b in left_ideal(cat, a).ones() {
                        s.union_with(&right[b]);
                    }
                    s
                })
                .collect()
        }
    }
}

/// `aG`, `Ga` or `GaG` for every arrow.
fn cosets(cat: &FinCategory, side: Side) -> Vec<FixedBitSet> {
    let n = cat.arrow_count();
    let right = |a: ArrowIx| {
        bitset_from(n, cat.right_products(a).iter().filter(|(g, _)| cat.is_invertible(*g)).map(|&(_, ag)| ag))
    };
    let left = |a: ArrowIx| {
        bitset_from(n, cat.left_products(a).iter().filter(|(g, _)| cat.is_invertible(*g)).map(|&(_, ga)| ga))
    };
    match side {
        Side::Right => cat.arrows().map(right).collect(),
        Side::Left => cat.arrows().map(left).collect(),
        Side::TwoSided => cat
            .arrows()
            .map(|a| {
                let mut s = FixedBitSet::with_capacity(n);
                for b in left(a).ones() {
                    s.union_with(&right(ArrowIx(b)));
                }
                s
            })
            .collect(),
    }
}

/// Labels each arrow by the equality class of its set.
fn partition(sets: &[FixedBitSet]) -> Vec<usize> {
    let mut seen: HashMap<&FixedBitSet, usize> = HashMap::new();
    sets.iter()
        .map(|s| {
            let next = seen.len();
            *seen.entry(s).or_insert(next)
        })
        .collect()
}

fn group(labels: &[usize]) -> Vec<Vec<ArrowIx>> {
    let count = labels.iter().max().map_or(0, |m| m + 1);
    let mut classes = vec![Vec::new(); count];
    for (i, &l) in labels.iter().enumerate() {
        classes[l].push(ArrowIx(i));
    }
    classes
}

/// First pair on which two partitions disagree.
fn disagreement(p: &[usize], q: &[usize]) -> Option<(usize, usize)> {
    let mut p_to_q: HashMap<usize, (usize, usize)> = HashMap::new();
    let mut q_to_p: HashMap<usize, (usize, usize)> = HashMap::new();
    for i in 0..p.len() {
        if let Some(&(ql, j)) = p_to_q.get(&p[i]) {
            if ql != q[i] {
                return Some((j, i));
            }
        } else {
            p_to_q.insert(p[i], (q[i], i));
        }
        if let Some(&(pl, j)) = q_to_p.get(&q[i]) {
            if pl != p[i] {
                return Some((j, i));
            }
        } else {
            q_to_p.insert(q[i], (p[i], i));
        }
    }
    None
}

/// Indices of right classes generating a maximal principal right ideal: `aC`
/// is properly inside `r(a)C` with nothing principal strictly between.
fn maximal_classes(cat: &FinCategory, right: &[FixedBitSet], classes: &[Vec<ArrowIx>]) -> Vec<usize> {
    classes
        .iter()
        .enumerate()
        .filter(|(_, class)| {
            let a = class[0];
            let top = &right[cat.identity(cat.cod(a)).0];
            let ideal = &right[a.0];
            if ideal == top {
                return false;
            }
            !cat.arrows().any(|b| {
                let ib = &right[b.0];
                ib != ideal && ib != top && ideal.is_subset(ib) && ib.is_subset(top)
            })
        })
        .map(|(i, _)| i)
        .collect()
}

/// Principal ideal classes on `side`, with the coset cross-check.
///
/// With a size functor attached, ideal equality must coincide with coset
/// equality (`aC = bC` iff `aG = bG` and the left and two-sided analogues);
/// a mismatch there is a falsified lemma. Without one, a mismatch is reported
/// as [`FincatError::IdealCosetMismatch`] to show the hypothesis is needed.
pub fn ideal_classes(cat: &FinCategory, side: Side, size: Option<&SizeFunctor>) -> Result<IdealReport, FincatError> {
    let sets = ideals(cat, side);
    let labels = partition(&sets);
    let coset_labels = partition(&cosets(cat, side));
    if let Some((i, j)) = disagreement(&labels, &coset_labels) {
        let (a, b) = (cat.id(ArrowIx(i)).to_string(), cat.id(ArrowIx(j)).to_string());
        return Err(match size {
            Some(_) => FincatError::LemmaViolation {
                lemma: "ideals-are-cosets",
                detail: format!("{side:?} ideals and cosets disagree on ({a}, {b})"),
            },
            None => FincatError::IdealCosetMismatch { a, b },
        });
    }
    let classes = group(&labels);
    let maximal_right_classes = if side == Side::Right { maximal_classes(cat, &sets, &classes) } else { Vec::new() };
    Ok(IdealReport { side, classes, maximal_right_classes })
}

/// Right-ideal data shared by the atom, transversal and factorization code.
pub(crate) struct RightStructure {
    pub class_of: Vec<usize>,
    pub classes: Vec<Vec<ArrowIx>>,
    pub maximal: Vec<bool>,
}

impl RightStructure {
    pub fn new(cat: &FinCategory) -> Self {
        let sets = ideals(cat, Side::Right);
        let class_of = partition(&sets);
        let classes = group(&class_of);
        let mut maximal = vec![false; classes.len()];
        for i in maximal_classes(cat, &sets, &classes) {
            maximal[i] = true;
        }
        RightStructure { class_of, classes, maximal }
    }

    pub fn is_maximal(&self, a: ArrowIx) -> bool {
        self.maximal[self.class_of[a.0]]
    }
}

fn atoms_by_definition(cat: &FinCategory) -> Vec<ArrowIx> {
    cat.arrows()
        .filter(|&a| {
            !cat.is_invertible(a)
                && cat.factorizations(a).iter().all(|&(b, c)| cat.is_invertible(b) || cat.is_invertible(c))
        })
        .collect()
}

/// Non-invertible arrows admitting no factorization into two non-invertibles,
/// cross-checked against the arrows generating maximal principal right ideals.
pub fn atoms(cat: &FinCategory, size: &SizeFunctor) -> Result<Vec<ArrowIx>, FincatError> {
    let rs = RightStructure::new(cat);
    atoms_with(cat, size, &rs)
}

pub(crate) fn atoms_with(
    cat: &FinCategory,
    size: &SizeFunctor,
    rs: &RightStructure,
) -> Result<Vec<ArrowIx>, FincatError> {
    let by_def = atoms_by_definition(cat);
    let by_ideal: Vec<ArrowIx> = cat.arrows().filter(|&a| rs.is_maximal(a)).collect();
    if by_def != by_ideal {
        let odd =
            by_def.iter().chain(&by_ideal).find(|a| by_def.contains(a) != by_ideal.contains(a)).expect("sets differ");
        return Err(FincatError::LemmaViolation {
            lemma: "atoms-are-maximal",
            detail: format!("`{}` is an atom xor generates a maximal right ideal", cat.id(*odd)),
        });
    }
    if let Some(a) = by_def.iter().find(|&&a| size.degree(a).is_zero()) {
        return Err(FincatError::LemmaViolation {
            lemma: "atoms-are-maximal",
            detail: format!("atom `{}` has degree 0", cat.id(*a)),
        });
    }
    Ok(by_def)
}

/// One generator per maximal principal right ideal: the least arrow id in each
/// class. Returned in id order.
pub fn transversal(cat: &FinCategory, size: &SizeFunctor) -> Result<Vec<ArrowIx>, FincatError> {
    let rs = RightStructure::new(cat);
    transversal_with(cat, size, &rs)
}

pub(crate) fn transversal_with(
    cat: &FinCategory,
    size: &SizeFunctor,
    rs: &RightStructure,
) -> Result<Vec<ArrowIx>, FincatError> {
    atoms_with(cat, size, rs)?;
    let mut reps: Vec<ArrowIx> = rs
        .classes
        .iter()
        .enumerate()
        .filter(|(i, _)| rs.maximal[*i])
        .map(|(_, class)| *class.iter().min_by(|a, b| cat.id(**a).cmp(cat.id(**b))).expect("non-empty"))
        .collect();
    reps.sort_by(|a, b| cat.id(*a).cmp(cat.id(*b)));
    Ok(reps)
}
