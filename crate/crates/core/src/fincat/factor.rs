use std::collections::HashMap;

use super::ideals::RightStructure;
use super::{ArrowIx, FinCategory, FincatError, SizeFunctor};

/// `a = x_1 ··· x_n · residue` with every `x_i` in the transversal and the
/// residue invertible.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct XgFactorization {
    pub xs: Vec<ArrowIx>,
    pub residue: ArrowIx,
}

/// Caches the right-ideal structure so repeated factorizations are cheap.
pub(crate) struct Factorizer<'a> {
    cat: &'a FinCategory,
    size: &'a SizeFunctor,
    rs: RightStructure,
    rep_of_class: HashMap<usize, ArrowIx>,
}

impl<'a> Factorizer<'a> {
    pub fn new(cat: &'a FinCategory, size: &'a SizeFunctor, transversal: &[ArrowIx]) -> Result<Self, FincatError> {
        let rs = RightStructure::new(cat);
        let mut rep_of_class = HashMap::new();
        for &x in transversal {
            let class = rs.class_of[x.0];
            if !rs.maximal[class] || rep_of_class.insert(class, x).is_some() {
                return Err(FincatError::LemmaViolation {
                    lemma: "atoms-translate",
                    detail: format!("`{}` does not pick out a single maximal right class", cat.id(x)),
                });
            }
        }
        if let Some(i) = (0..rs.classes.len()).find(|i| rs.maximal[*i] && !rep_of_class.contains_key(i)) {
            return Err(FincatError::LemmaViolation {
                lemma: "atoms-translate",
                detail: format!("no representative for the class of `{}`", cat.id(rs.classes[i][0])),
            });
        }
        Ok(Factorizer { cat, size, rs, rep_of_class })
    }

    /// Builds its own deterministic transversal.
    pub fn canonical(cat: &'a FinCategory, size: &'a SizeFunctor) -> Result<Self, FincatError> {
        let rs = RightStructure::new(cat);
        let x = super::ideals::transversal_with(cat, size, &rs)?;
        Self::new(cat, size, &x)
    }

    pub fn transversal(&self) -> Vec<ArrowIx> {
        let mut x: Vec<ArrowIx> = self.rep_of_class.values().copied().collect();
        x.sort_by(|a, b| self.cat.id(*a).cmp(self.cat.id(*b)));
        x
    }

    pub fn is_atom(&self, a: ArrowIx) -> bool {
        let cat = self.cat;
        !cat.is_invertible(a)
            && cat.factorizations(a).iter().all(|&(b, c)| cat.is_invertible(b) || cat.is_invertible(c))
    }

    pub fn atom_factorize(&self, a: ArrowIx) -> Result<Vec<ArrowIx>, FincatError> {
        let cat = self.cat;
        if cat.is_invertible(a) {
            return Err(FincatError::InvertibleInput(cat.id(a).to_string()));
        }
        let mut out = Vec::new();
        self.split_into_atoms(a, &mut out)?;
        Ok(out)
    }

    fn split_into_atoms(&self, a: ArrowIx, out: &mut Vec<ArrowIx>) -> Result<(), FincatError> {
        let cat = self.cat;
        let split = cat
            .factorizations(a)
            .iter()
            .filter(|(b, c)| !cat.is_invertible(*b) && !cat.is_invertible(*c))
            .min_by(|(b1, c1), (b2, c2)| (cat.id(*b1), cat.id(*c1)).cmp(&(cat.id(*b2), cat.id(*c2))));
        let Some(&(b, c)) = split else {
            out.push(a);
            return Ok(());
        };
        let da = self.size.degree(a);
        for part in [b, c] {
            let dp = self.size.degree(part);
            if dp == da || !dp.le(da) {
                return Err(FincatError::LemmaViolation {
                    lemma: "atom-factorization",
                    detail: format!("factor `{}` of `{}` does not shrink the degree", cat.id(part), cat.id(a)),
                });
            }
        }
        self.split_into_atoms(b, out)?;
        self.split_into_atoms(c, out)
    }

    /// Writes an atom `t` as `x·h` with `x` the representative of its right
    /// class and `h` invertible.
    pub fn split_atom(&self, t: ArrowIx) -> Result<(ArrowIx, ArrowIx), FincatError> {
        let cat = self.cat;
        let x = self.rep_of_class.get(&self.rs.class_of[t.0]).copied().ok_or_else(|| FincatError::LemmaViolation {
            lemma: "atoms-translate",
            detail: format!("`{}` is not in a maximal right class", cat.id(t)),
        })?;
        let h = cat
            .right_products(x)
            .iter()
            .find(|&&(h, xh)| xh == t && cat.is_invertible(h))
            .map(|&(h, _)| h)
            .ok_or_else(|| FincatError::LemmaViolation {
                lemma: "ideals-are-cosets",
                detail: format!("`{}` and `{}` share a right class but differ by no invertible", cat.id(t), cat.id(x)),
            })?;
        Ok((x, h))
    }

    pub fn xg_factorize(&self, a: ArrowIx) -> Result<XgFactorization, FincatError> {
        let cat = self.cat;
        if cat.is_invertible(a) {
            return Ok(XgFactorization { xs: Vec::new(), residue: a });
        }
        let mut g = cat.identity(cat.cod(a));
        let mut xs = Vec::new();
        for atom in self.atom_factorize(a)? {
            let t = cat.compose(g, atom).ok_or_else(|| FincatError::LemmaViolation {
                lemma: "transversal-factorization",
                detail: format!("`{}`·`{}` left the table", cat.id(g), cat.id(atom)),
            })?;
            if !self.is_atom(t) {
                return Err(FincatError::LemmaViolation {
                    lemma: "atoms-translate",
                    detail: format!("`{}`·`{}` is not an atom", cat.id(g), cat.id(atom)),
                });
            }
            let (x, h) = self.split_atom(t)?;
            xs.push(x);
            g = h;
        }
        let mut seq = xs.clone();
        seq.push(g);
        if cat.compose_all(&seq) != Some(a) {
            return Err(FincatError::LemmaViolation {
                lemma: "transversal-factorization",
                detail: format!("factorization of `{}` does not recompose", cat.id(a)),
            });
        }
        Ok(XgFactorization { xs, residue: g })
    }
}

/// Splits a non-invertible arrow into atoms, always taking the factorization
/// into two non-invertibles with the least `(id, id)` pair.
pub fn atom_factorize(cat: &FinCategory, size: &SizeFunctor, a: ArrowIx) -> Result<Vec<ArrowIx>, FincatError> {
    Factorizer::canonical(cat, size)?.atom_factorize(a)
}

/// Writes `a` as a word over the transversal followed by an invertible,
/// pushing invertibles rightwards past each atom.
pub fn xg_factorize(
    cat: &FinCategory,
    size: &SizeFunctor,
    transversal: &[ArrowIx],
    a: ArrowIx,
) -> Result<XgFactorization, FincatError> {
    Factorizer::new(cat, size, transversal)?.xg_factorize(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::{load, transversal};
    use crate::fixtures;

    #[test]
    fn diamond_atom_factorizations() {
        let (cat, size) = load(&fixtures::diamond()).unwrap();
        let size = size.unwrap();
        let x = cat.arrow("x").unwrap();
        let f = atom_factorize(&cat, &size, x).unwrap();
        assert_eq!(f, vec![cat.arrow("c").unwrap(), cat.arrow("a").unwrap()]);
        let a = cat.arrow("a").unwrap();
        assert_eq!(atom_factorize(&cat, &size, a).unwrap(), vec![a]);
        let id = cat.arrow("id1").unwrap();
        assert!(matches!(atom_factorize(&cat, &size, id), Err(FincatError::InvertibleInput(_))));
    }

    #[test]
    fn diamond_xg_factorization_has_domain_identity_residue() {
        let (cat, size) = load(&fixtures::diamond()).unwrap();
        let size = size.unwrap();
        let t = transversal(&cat, &size).unwrap();
        let x = cat.arrow("x").unwrap();
        let f = xg_factorize(&cat, &size, &t, x).unwrap();
        assert_eq!(f.xs, vec![cat.arrow("c").unwrap(), cat.arrow("a").unwrap()]);
        // x: 2 -> 0, so the residue is the identity at the domain
        assert_eq!(f.residue, cat.arrow("id2").unwrap());
    }

    #[test]
    fn invertible_input_has_empty_word() {
        let (cat, _) = load(&fixtures::z2_groupoid()).unwrap();
        let size = crate::fincat::validate_size_functor(
            &cat,
            &crate::doc::SizeDoc { k: 1, deg: [("1".into(), vec![0]), ("s".into(), vec![0])].into() },
        )
        .unwrap();
        let s = cat.arrow("s").unwrap();
        let f = xg_factorize(&cat, &size, &[], s).unwrap();
        assert!(f.xs.is_empty());
        assert_eq!(f.residue, s);
    }
}
