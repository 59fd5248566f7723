//! Brute-force model of unique factorization.
//!
//! It never touches the library's normal forms. It enumerates every
//! composable edge word below the bound, merges words related by a single
//! square move (in either direction) with a union-find, and then counts the
//! pairs of classes whose concatenation lands in each class.

use std::collections::HashMap;

use ghk_core::doc::SkeletonDoc;
use ghk_core::kgraph::validate_kgraph;
use ghk_core::Degree;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Word {
    cod: usize,
    dom: usize,
    edges: Vec<usize>,
}

/// `(class, m)` to the class pairs `(A, B)` with `deg A = m` and `A·B` in the class.
type Splits = HashMap<(usize, Vec<u32>), Vec<(usize, usize)>>;

struct Oracle {
    k: usize,
    words: Vec<Word>,
    index: HashMap<Word, usize>,
    class: Vec<usize>,
    classes: Vec<usize>,
    degree: Vec<Vec<u32>>,
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

impl Oracle {
    fn build(doc: &SkeletonDoc, bound: &[u32]) -> Oracle {
        let obj = |id: &str| doc.objects.iter().position(|o| o == id).unwrap();
        let edge = |id: &str| doc.edges.iter().position(|e| e.id == id).unwrap();
        let ends: Vec<(usize, usize, usize)> =
            doc.edges.iter().map(|e| (e.color - 1, obj(&e.cod), obj(&e.dom))).collect();
        let mut moves: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
        for sq in &doc.squares {
            let l = (edge(&sq.lhs[0]), edge(&sq.lhs[1]));
            let r = (edge(&sq.rhs[0]), edge(&sq.rhs[1]));
            moves.insert(l, r);
            moves.insert(r, l);
        }

        let mut words = Vec::new();
        let mut stack: Vec<(Word, Vec<u32>)> =
            (0..doc.objects.len()).map(|v| (Word { cod: v, dom: v, edges: vec![] }, vec![0; doc.k])).collect();
        while let Some((w, deg)) = stack.pop() {
            for (e, &(c, cod, dom)) in ends.iter().enumerate() {
                if cod != w.dom || deg[c] >= bound[c] {
                    continue;
                }
                let mut w2 = w.clone();
                w2.edges.push(e);
                w2.dom = dom;
                if w.edges.is_empty() {
                    w2.cod = cod;
                }
                let mut d2 = deg.clone();
                d2[c] += 1;
                stack.push((w2, d2));
            }
            words.push(w);
        }
        let index: HashMap<Word, usize> = words.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
        let mut parent: Vec<usize> = (0..words.len()).collect();
        for (i, w) in words.iter().enumerate() {
            for p in 0..w.edges.len().saturating_sub(1) {
                if let Some(&(a, b)) = moves.get(&(w.edges[p], w.edges[p + 1])) {
                    let mut w2 = w.clone();
                    w2.edges[p] = a;
                    w2.edges[p + 1] = b;
                    let j = index[&w2];
                    let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                    parent[ri] = rj;
                }
            }
        }
        let mut root_to_class = HashMap::new();
        let mut classes = Vec::new();
        let mut class = vec![0; words.len()];
        for (i, slot) in class.iter_mut().enumerate() {
            let r = find(&mut parent, i);
            let c = *root_to_class.entry(r).or_insert_with(|| {
                classes.push(i);
                classes.len() - 1
            });
            *slot = c;
        }
        let degree = classes
            .iter()
            .map(|&i| {
                let mut d = vec![0; doc.k];
                for &e in &words[i].edges {
                    d[ends[e].0] += 1;
                }
                d
            })
            .collect();
        Oracle { k: doc.k, words, index, class, classes, degree }
    }

    fn class_of(&self, w: &Word) -> usize {
        self.class[self.index[w]]
    }

    fn rep(&self, c: usize) -> &Word {
        &self.words[self.classes[c]]
    }

    /// For every class and every split `m`, the list of `(A, B)` class pairs
    /// with `deg A = m` and `A·B` in the class.
    fn factorizations(&self) -> Splits {
        let mut out: Splits = HashMap::new();
        for a in 0..self.classes.len() {
            for b in 0..self.classes.len() {
                let (wa, wb) = (self.rep(a), self.rep(b));
                if wa.dom != wb.cod {
                    continue;
                }
                let mut cat = Word { cod: wa.cod, dom: wb.dom, edges: wa.edges.clone() };
                cat.edges.extend(&wb.edges);
                let Some(&i) = self.index.get(&cat) else { continue };
                out.entry((self.class[i], self.degree[a].clone())).or_default().push((a, b));
            }
        }
        out
    }
}

fn splits(d: &[u32]) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for &n in d {
        out = out.into_iter().flat_map(|p| (0..=n).map(move |i| [p.clone(), vec![i]].concat())).collect();
    }
    out
}

/// Checks one skeleton and returns the number of (path, split) pairs seen.
pub fn check_skeleton(doc: &SkeletonDoc, bound: &[u32]) -> usize {
    let oracle = Oracle::build(doc, bound);
    assert_eq!(oracle.k, doc.k);
    let facts = oracle.factorizations();
    let mut checked = 0;
    for c in 0..oracle.classes.len() {
        for m in splits(&oracle.degree[c]) {
            let pairs = facts.get(&(c, m.clone())).map(Vec::as_slice).unwrap_or(&[]);
            assert_eq!(pairs.len(), 1, "class {:?} split {m:?} has {} factorizations", oracle.rep(c), pairs.len());
        }
    }

    let kg = validate_kgraph(doc).expect("valid skeleton");
    let lib_edge = |e: ghk_core::kgraph::EdgeIx| doc.edges.iter().position(|d| d.id == kg.edge(e).id).unwrap();
    let obj = |v: ghk_core::fincat::ObjIx| doc.objects.iter().position(|o| o == kg.object_id(v)).unwrap();
    let word = |p: &ghk_core::kgraph::Path| Word {
        cod: obj(p.cod()),
        dom: obj(p.dom()),
        edges: p.edges().iter().map(|&e| lib_edge(e)).collect(),
    };
    let paths = kg.enumerate_paths(&Degree::from_vec(bound.to_vec())).unwrap();
    assert_eq!(paths.len(), oracle.classes.len(), "one normal form per morphism");
    for p in &paths {
        let c = oracle.class_of(&word(p));
        assert_eq!(p.degree().as_slice(), oracle.degree[c].as_slice());
        for m in splits(&oracle.degree[c]) {
            let (h, t) = kg.factor(p, &Degree::from_vec(m.clone())).unwrap();
            let (a, b) = facts[&(c, m.clone())][0];
            assert_eq!(oracle.class_of(&word(&h)), a, "head of {} at {m:?}", kg.path_id(p));
            assert_eq!(oracle.class_of(&word(&t)), b, "tail of {} at {m:?}", kg.path_id(p));
            checked += 1;
        }
    }
    checked
}
