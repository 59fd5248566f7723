//! Degree vectors in `N^k` with the componentwise partial order.

use std::fmt;

use serde::{Deserialize, Serialize};

/// An element of `N^k`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Degree(Vec<u32>);

impl Degree {
    pub fn zero(k: usize) -> Self {
        Degree(vec![0; k])
    }

    /// The unit vector `e_i` (0-based `i`).
    pub fn unit(k: usize, i: usize) -> Self {
        let mut v = vec![0; k];
        v[i] = 1;
        Degree(v)
    }

    pub fn from_vec(v: Vec<u32>) -> Self {
        Degree(v)
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// `Some(i)` when this is `e_i`.
    pub fn unit_index(&self) -> Option<usize> {
        let mut found = None;
        for (i, &c) in self.0.iter().enumerate() {
            match c {
                0 => {}
                1 if found.is_none() => found = Some(i),
                _ => return None,
            }
        }
        found
    }

    pub fn total(&self) -> u64 {
        self.0.iter().map(|&c| c as u64).sum()
    }

    /// Componentwise sum; `None` on overflow or rank mismatch.
    pub fn checked_add(&self, other: &Degree) -> Option<Degree> {
        if self.rank() != other.rank() {
            return None;
        }
        self.0.iter().zip(&other.0).map(|(a, b)| a.checked_add(*b)).collect::<Option<Vec<_>>>().map(Degree)
    }

    /// `self - other` when `other <= self`.
    pub fn checked_sub(&self, other: &Degree) -> Option<Degree> {
        if self.rank() != other.rank() {
            return None;
        }
        self.0.iter().zip(&other.0).map(|(a, b)| a.checked_sub(*b)).collect::<Option<Vec<_>>>().map(Degree)
    }

    /// The order `m <= n` iff `m + p = n` for some `p`.
    pub fn le(&self, other: &Degree) -> bool {
        self.rank() == other.rank() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn increment(&mut self, i: usize) {
        self.0[i] += 1;
    }

    /// Every `m` with `0 <= m <= self`, in lexicographic order.
    pub fn below(&self) -> Vec<Degree> {
        let mut out = vec![Vec::with_capacity(self.rank())];
        for &c in &self.0 {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    (0..=c).map(move |x| {
                        let mut p = prefix.clone();
                        p.push(x);
                        p
                    })
                })
                .collect();
        }
        out.into_iter().map(Degree).collect()
    }

    /// Every split `self = m + n`, as `(m, n)`.
    pub fn splits(&self) -> Vec<(Degree, Degree)> {
        self.below()
            .into_iter()
            .map(|m| {
                let n = self.checked_sub(&m).expect("m below self");
                (m, n)
            })
            .collect()
    }

    /// Componentwise maximum.
    pub fn join(&self, other: &Degree) -> Degree {
        Degree(self.0.iter().zip(&other.0).map(|(a, b)| *a.max(b)).collect())
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splits_cover_the_box() {
        let d = Degree::from_vec(vec![2, 1]);
        let s = d.splits();
        assert_eq!(s.len(), 6);
        for (m, n) in s {
            assert_eq!(m.checked_add(&n).unwrap(), d);
        }
    }

    #[test]
    fn unit_index() {
        assert_eq!(Degree::unit(3, 1).unit_index(), Some(1));
        assert_eq!(Degree::from_vec(vec![1, 1]).unit_index(), None);
        assert_eq!(Degree::from_vec(vec![0, 2]).unit_index(), None);
        assert_eq!(Degree::zero(2).unit_index(), None);
    }

    #[test]
    fn overflow_is_detected() {
        let a = Degree::from_vec(vec![u32::MAX]);
        assert!(a.checked_add(&Degree::from_vec(vec![1])).is_none());
    }
}
