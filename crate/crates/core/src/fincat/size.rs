use std::collections::BTreeMap;

use super::{ArrowIx, FinCategory, FincatError};
use crate::degree::Degree;
use crate::doc::SizeDoc;

/// A functor `C -> N^k` whose zero fibre is exactly the invertible arrows.
#[derive(Clone, Debug)]
pub struct SizeFunctor {
    k: usize,
    deg: Vec<Degree>,
}

impl SizeFunctor {
    pub fn rank(&self) -> usize {
        self.k
    }

    pub fn degree(&self, a: ArrowIx) -> &Degree {
        &self.deg[a.0]
    }

    /// Componentwise maximum over all arrows.
    pub fn max_degree(&self) -> Degree {
        self.deg.iter().fold(Degree::zero(self.k), |acc, d| acc.join(d))
    }

    pub fn to_doc(&self, cat: &FinCategory) -> SizeDoc {
        SizeDoc {
            k: self.k,
            deg: cat
                .arrows()
                .map(|a| (cat.id(a).to_string(), self.degree(a).as_slice().to_vec()))
                .collect::<BTreeMap<_, _>>(),
        }
    }
}

/// Checks additivity on every composable pair and that `deg(a) = 0` exactly
/// on invertibles.
///
/// On a degree window, a composable pair may be absent from the table only
/// when its degree sum leaves the window, and no present composite may leave
/// it.
pub fn validate_size_functor(cat: &FinCategory, raw: &SizeDoc) -> Result<SizeFunctor, FincatError> {
    let k = raw.k;
    if k == 0 {
        return Err(FincatError::RankMismatch { expected: 1, found: 0 });
    }
    let mut deg = Vec::with_capacity(cat.arrow_count());
    for a in cat.arrows() {
        let d = raw.deg.get(cat.id(a)).ok_or_else(|| FincatError::MissingDegree(cat.id(a).to_string()))?;
        if d.len() != k {
            return Err(FincatError::RankMismatch { expected: k, found: d.len() });
        }
        deg.push(Degree::from_vec(d.clone()));
    }
    for id in raw.deg.keys() {
        if cat.arrow(id).is_none() {
            return Err(FincatError::UnknownArrow(id.clone()));
        }
    }
    if let Some(b) = cat.bound() {
        if b.rank() != k {
            return Err(FincatError::RankMismatch { expected: k, found: b.rank() });
        }
        if let Some(a) = cat.arrows().find(|&a| !deg[a.0].le(b)) {
            return Err(FincatError::OutOfWindow { a: cat.id(a).into(), b: cat.id(a).into() });
        }
    }

    let mut by_cod: Vec<Vec<ArrowIx>> = vec![Vec::new(); cat.object_count()];
    for a in cat.arrows() {
        by_cod[cat.cod(a).0].push(a);
    }
    for a in cat.arrows() {
        for &b in &by_cod[cat.dom(a).0] {
            let err_ids = || (cat.id(a).to_string(), cat.id(b).to_string());
            let sum = deg[a.0].checked_add(&deg[b.0]).ok_or_else(|| {
                let (a, b) = err_ids();
                FincatError::DegreeOverflow { a, b }
            })?;
            let in_window = cat.bound().is_none_or(|bd| sum.le(bd));
            match cat.compose(a, b) {
                Some(ab) => {
                    if !in_window {
                        let (a, b) = err_ids();
                        return Err(FincatError::OutOfWindow { a, b });
                    }
                    if deg[ab.0] != sum {
                        let (a, b) = err_ids();
                        return Err(FincatError::NotFunctorial { a, b });
                    }
                }
                None if in_window => {
                    let (f, g) = err_ids();
                    return Err(FincatError::MissingComposite { f, g });
                }
                None => {}
            }
        }
    }

    for a in cat.arrows() {
        match (deg[a.0].is_zero(), cat.is_invertible(a)) {
            (true, false) => return Err(FincatError::ZeroOnNonInvertible(cat.id(a).into())),
            (false, true) => return Err(FincatError::NonZeroOnInvertible(cat.id(a).into())),
            _ => {}
        }
    }
    Ok(SizeFunctor { k, deg })
}
