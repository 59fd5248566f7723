//! Exhaustive checks of the structural facts that hold in any category with a
//! size functor. Each returns the list of violations; an empty list means the
//! statement held on every arrow.

use serde::Serialize;

use super::factor::Factorizer;
use super::ideals::{ideal_classes, right_ideal, Side};
use super::{FinCategory, FincatError, SizeFunctor};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LemmaFailure {
    pub lemma: &'static str,
    pub detail: String,
}

impl LemmaFailure {
    fn new(lemma: &'static str, detail: impl Into<String>) -> Self {
        LemmaFailure { lemma, detail: detail.into() }
    }
}

impl From<FincatError> for LemmaFailure {
    fn from(e: FincatError) -> Self {
        match e {
            FincatError::LemmaViolation { lemma, detail } => LemmaFailure { lemma, detail },
            other => LemmaFailure::new("other", other.to_string()),
        }
    }
}

/// Runs every check against `(cat, size)`:
///
/// * ideal equality matches coset equality on all three sides;
/// * `a` is invertible iff `aC = eC` for an identity `e`;
/// * atoms are exactly the generators of maximal right ideals;
/// * every non-invertible arrow recomposes from its atom factorization;
/// * invertibles translate atoms to atoms on either side, and `ga` lies in
///   the right class of a transversal element;
/// * every arrow is a transversal word times an invertible.
pub fn verify_size_lemmas(cat: &FinCategory, size: &SizeFunctor) -> Vec<LemmaFailure> {
    let mut out = Vec::new();

    for side in [Side::Right, Side::Left, Side::TwoSided] {
        if let Err(e) = ideal_classes(cat, side, Some(size)) {
            out.push(e.into());
        }
    }

    let identity_ideals: Vec<_> = cat.objects().map(|v| right_ideal(cat, cat.identity(v))).collect();
    for a in cat.arrows() {
        let ideal = right_ideal(cat, a);
        let principal_at_identity = identity_ideals.contains(&ideal);
        if principal_at_identity != cat.is_invertible(a) {
            out.push(LemmaFailure::new("identity-ideals", format!("`{}`", cat.id(a))));
        }
    }

    let fz = match Factorizer::canonical(cat, size) {
        Ok(f) => f,
        Err(e) => {
            out.push(e.into());
            return out;
        }
    };
    let transversal = fz.transversal();

    for a in cat.arrows().filter(|&a| !cat.is_invertible(a)) {
        match fz.atom_factorize(a) {
            Ok(atoms) => {
                if cat.compose_all(&atoms) != Some(a) || !atoms.iter().all(|&t| fz.is_atom(t)) {
                    out.push(LemmaFailure::new("atom-factorization", format!("`{}`", cat.id(a))));
                }
            }
            Err(e) => out.push(e.into()),
        }
    }

    let atoms: Vec<_> = cat.arrows().filter(|&a| fz.is_atom(a)).collect();
    for g in cat.invertibles() {
        for &(a, ga) in cat.right_products(g) {
            if fz.is_atom(a) {
                if !fz.is_atom(ga) {
                    out.push(LemmaFailure::new("atoms-translate", format!("`{}`·`{}` is not an atom", cat.id(g), cat.id(a))));
                } else if let Err(e) = fz.split_atom(ga) {
                    out.push(e.into());
                }
            }
        }
        for &(a, ag) in cat.left_products(g) {
            if fz.is_atom(a) && !fz.is_atom(ag) {
                out.push(LemmaFailure::new("atoms-translate", format!("`{}`·`{}` is not an atom", cat.id(a), cat.id(g))));
            }
        }
    }
    debug_assert!(atoms.iter().all(|&a| !size.degree(a).is_zero()));

    for a in cat.arrows() {
        match fz.xg_factorize(a) {
            Ok(f) => {
                if !f.xs.iter().all(|x| transversal.contains(x)) || !cat.is_invertible(f.residue) {
                    out.push(LemmaFailure::new("transversal-factorization", format!("`{}`", cat.id(a))));
                }
            }
            Err(e) => out.push(e.into()),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::load;
    use crate::fixtures;

    #[test]
    fn diamond_satisfies_all_lemmas() {
        let (cat, size) = load(&fixtures::diamond()).unwrap();
        assert_eq!(verify_size_lemmas(&cat, &size.unwrap()), vec![]);
    }
}
