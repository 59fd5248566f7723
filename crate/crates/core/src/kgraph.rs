//! Higher-rank graphs presented by a colored skeleton and factorization
//! squares.
//!
//! A path is a sequence of edges `[p1, ..., pn]` with `dom(p_i) = cod(p_{i+1})`,
//! so `p1` is the outermost factor. The normal form of a path has colors
//! non-decreasing from left to right; squares rewrite a descending adjacent
//! pair `[f, e]` into `[e', f']`.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::degree::Degree;
use crate::doc::{ArrowDoc, CategoryDoc, EdgeDoc, SizeDoc, SkeletonDoc, SquareDoc};
use crate::fincat::{self, FinCategory, FincatError, ObjIx, SizeFunctor};

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeIx(pub usize);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KGraphError {
    #[error("rank must be positive")]
    ZeroRank,
    #[error("duplicate object id `{0}`")]
    DuplicateObject(String),
    #[error("duplicate edge id `{0}`")]
    DuplicateEdge(String),
    #[error("edge id `{0}` is reserved or contains `.` or `|`")]
    BadEdgeId(String),
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("edge `{edge}` has color {color} outside 1..={k}")]
    BadColor { edge: String, color: usize, k: usize },
    #[error("square {lhs:?} = {rhs:?} does not pair a higher color over a lower one")]
    BadSquareColors { lhs: [String; 2], rhs: [String; 2] },
    #[error("square {lhs:?} = {rhs:?} has mismatched endpoints")]
    EndpointMismatch { lhs: [String; 2], rhs: [String; 2] },
    #[error("squares are not a bijection: {0}")]
    NotBijective(String),
    #[error("tri-colored path {0:?} normalizes to more than one path")]
    CubeFailure([String; 3]),
    #[error("not composable: {0}")]
    NotComposable(String),
    #[error("split {m} is not below degree {degree}")]
    BadSplit { m: Degree, degree: Degree },
    #[error("bound has rank {found}, expected {expected}")]
    RankMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Category(#[from] FincatError),
}

#[derive(Clone, Debug)]
pub struct Edge {
    pub id: String,
    /// 0-based color.
    pub color: usize,
    pub dom: ObjIx,
    pub cod: ObjIx,
}

/// A morphism of the k-graph, kept in normal form.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Path {
    degree: Degree,
    cod: ObjIx,
    dom: ObjIx,
    edges: Vec<EdgeIx>,
}

impl Path {
    pub fn edges(&self) -> &[EdgeIx] {
        &self.edges
    }

    pub fn dom(&self) -> ObjIx {
        self.dom
    }

    pub fn cod(&self) -> ObjIx {
        self.cod
    }

    pub fn degree(&self) -> &Degree {
        &self.degree
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct KGraph {
    k: usize,
    objects: Vec<String>,
    object_index: HashMap<String, ObjIx>,
    edges: Vec<Edge>,
    edge_index: HashMap<String, EdgeIx>,
    // [f, e] -> [e', f'] for descending pairs
    forward: HashMap<(EdgeIx, EdgeIx), (EdgeIx, EdgeIx)>,
    backward: HashMap<(EdgeIx, EdgeIx), (EdgeIx, EdgeIx)>,
    // edges by codomain, sorted by (color, index)
    by_cod: Vec<Vec<EdgeIx>>,
}

pub fn validate_kgraph(doc: &SkeletonDoc) -> Result<KGraph, KGraphError> {
    if doc.k == 0 {
        return Err(KGraphError::ZeroRank);
    }
    let mut object_index = HashMap::new();
    for (i, o) in doc.objects.iter().enumerate() {
        if object_index.insert(o.clone(), ObjIx(i)).is_some() {
            return Err(KGraphError::DuplicateObject(o.clone()));
        }
    }
    let reserved: BTreeSet<String> = doc.objects.iter().map(|o| identity_path_id(o)).collect();
    let obj = |id: &str| object_index.get(id).copied().ok_or_else(|| KGraphError::UnknownObject(id.to_string()));

    let mut edges = Vec::with_capacity(doc.edges.len());
    let mut edge_index = HashMap::new();
    for (i, e) in doc.edges.iter().enumerate() {
        if e.id.is_empty() || e.id.contains(['.', '|']) || reserved.contains(&e.id) {
            return Err(KGraphError::BadEdgeId(e.id.clone()));
        }
        if edge_index.insert(e.id.clone(), EdgeIx(i)).is_some() {
            return Err(KGraphError::DuplicateEdge(e.id.clone()));
        }
        if e.color == 0 || e.color > doc.k {
            return Err(KGraphError::BadColor { edge: e.id.clone(), color: e.color, k: doc.k });
        }
        edges.push(Edge { id: e.id.clone(), color: e.color - 1, dom: obj(&e.dom)?, cod: obj(&e.cod)? });
    }
    let mut by_cod = vec![Vec::new(); doc.objects.len()];
    for (i, e) in edges.iter().enumerate() {
        by_cod[e.cod.0].push(EdgeIx(i));
    }
    for list in &mut by_cod {
        list.sort_by_key(|e| (edges[e.0].color, e.0));
    }

    let mut kg = KGraph {
        k: doc.k,
        objects: doc.objects.clone(),
        object_index,
        edges,
        edge_index,
        forward: HashMap::new(),
        backward: HashMap::new(),
        by_cod,
    };

    for sq in &doc.squares {
        let [f, e] = [kg.edge_or_err(&sq.lhs[0])?, kg.edge_or_err(&sq.lhs[1])?];
        let [e2, f2] = [kg.edge_or_err(&sq.rhs[0])?, kg.edge_or_err(&sq.rhs[1])?];
        let (cf, ce, ce2, cf2) = (kg.color(f), kg.color(e), kg.color(e2), kg.color(f2));
        if !(ce == ce2 && cf == cf2 && ce < cf) {
            return Err(KGraphError::BadSquareColors { lhs: sq.lhs.clone(), rhs: sq.rhs.clone() });
        }
        let chain_ok = kg.edge(f).dom == kg.edge(e).cod && kg.edge(e2).dom == kg.edge(f2).cod;
        let ends_ok = kg.edge(f).cod == kg.edge(e2).cod && kg.edge(e).dom == kg.edge(f2).dom;
        if !chain_ok || !ends_ok {
            return Err(KGraphError::EndpointMismatch { lhs: sq.lhs.clone(), rhs: sq.rhs.clone() });
        }
        if let Some(prev) = kg.forward.insert((f, e), (e2, f2)) {
            if prev != (e2, f2) {
                return Err(KGraphError::NotBijective(format!("[{}, {}] has two squares", sq.lhs[0], sq.lhs[1])));
            }
        }
        if let Some(prev) = kg.backward.insert((e2, f2), (f, e)) {
            if prev != (f, e) {
                return Err(KGraphError::NotBijective(format!("[{}, {}] has two squares", sq.rhs[0], sq.rhs[1])));
            }
        }
    }
    for x in (0..kg.edges.len()).map(EdgeIx) {
        for &y in &kg.by_cod[kg.edge(x).dom.0] {
            let (cx, cy) = (kg.color(x), kg.color(y));
            let missing =
                (cx > cy && !kg.forward.contains_key(&(x, y))) || (cx < cy && !kg.backward.contains_key(&(x, y)));
            if missing {
                return Err(KGraphError::NotBijective(format!("[{}, {}] has no square", kg.edge(x).id, kg.edge(y).id)));
            }
        }
    }
    if kg.k >= 3 {
        kg.check_cubes()?;
    }
    Ok(kg)
}

pub fn identity_path_id(object: &str) -> String {
    format!("1_{object}")
}

impl KGraph {
    pub fn rank(&self) -> usize {
        self.k
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn object_id(&self, v: ObjIx) -> &str {
        &self.objects[v.0]
    }

    pub fn object(&self, id: &str) -> Option<ObjIx> {
        self.object_index.get(id).copied()
    }

    pub fn object_ids(&self) -> &[String] {
        &self.objects
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edge(&self, e: EdgeIx) -> &Edge {
        &self.edges[e.0]
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeIx> + '_ {
        (0..self.edges.len()).map(EdgeIx)
    }

    pub fn edge_by_id(&self, id: &str) -> Option<EdgeIx> {
        self.edge_index.get(id).copied()
    }

    fn edge_or_err(&self, id: &str) -> Result<EdgeIx, KGraphError> {
        self.edge_by_id(id).ok_or_else(|| KGraphError::UnknownEdge(id.to_string()))
    }

    pub fn color(&self, e: EdgeIx) -> usize {
        self.edges[e.0].color
    }

    /// Edges with codomain `v`, ordered by color.
    pub fn edges_into(&self, v: ObjIx) -> &[EdgeIx] {
        &self.by_cod[v.0]
    }

    pub fn identity_path(&self, v: ObjIx) -> Path {
        Path { degree: Degree::zero(self.k), cod: v, dom: v, edges: Vec::new() }
    }

    pub fn edge_path(&self, e: EdgeIx) -> Path {
        let ed = self.edge(e);
        Path { degree: Degree::unit(self.k, ed.color), cod: ed.cod, dom: ed.dom, edges: vec![e] }
    }

    /// Square rewrite of an adjacent pair of distinct colors, in whichever
    /// direction sorts or unsorts it.
    fn swap(&self, x: EdgeIx, y: EdgeIx) -> (EdgeIx, EdgeIx) {
        let map = if self.color(x) > self.color(y) { &self.forward } else { &self.backward };
        *map.get(&(x, y)).expect("validated squares cover every mixed pair")
    }

    fn check_chain(&self, raw: &[EdgeIx]) -> Result<(), KGraphError> {
        for w in raw.windows(2) {
            if self.edge(w[0]).dom != self.edge(w[1]).cod {
                return Err(KGraphError::NotComposable(format!(
                    "dom({}) != cod({})",
                    self.edge(w[0]).id,
                    self.edge(w[1]).id
                )));
            }
        }
        Ok(())
    }

    fn sort_in_place(&self, seq: &mut [EdgeIx]) {
        while let Some(i) = (0..seq.len().saturating_sub(1)).find(|&i| self.color(seq[i]) > self.color(seq[i + 1])) {
            let (a, b) = self.swap(seq[i], seq[i + 1]);
            seq[i] = a;
            seq[i + 1] = b;
        }
    }

    fn path_from_sorted(&self, edges: Vec<EdgeIx>) -> Path {
        let mut degree = Degree::zero(self.k);
        for &e in &edges {
            degree.increment(self.color(e));
        }
        let cod = self.edge(edges[0]).cod;
        let dom = self.edge(*edges.last().expect("non-empty")).dom;
        Path { degree, cod, dom, edges }
    }

    /// Rewrites a composable edge sequence into normal form by applying
    /// squares to the leftmost descending pair until none is left.
    pub fn normalize(&self, raw: &[EdgeIx]) -> Result<Path, KGraphError> {
        if raw.is_empty() {
            return Err(KGraphError::NotComposable("empty edge sequence has no endpoints".into()));
        }
        self.check_chain(raw)?;
        let mut seq = raw.to_vec();
        self.sort_in_place(&mut seq);
        Ok(self.path_from_sorted(seq))
    }

    pub fn normalize_ids(&self, raw: &[&str]) -> Result<Path, KGraphError> {
        let edges = raw.iter().map(|id| self.edge_or_err(id)).collect::<Result<Vec<_>, _>>()?;
        self.normalize(&edges)
    }

    /// `p ∘ q`, defined when `dom(p) = cod(q)`.
    pub fn compose_paths(&self, p: &Path, q: &Path) -> Result<Path, KGraphError> {
        if p.dom != q.cod {
            return Err(KGraphError::NotComposable(format!("dom({}) != cod({})", self.path_id(p), self.path_id(q))));
        }
        if p.is_empty() {
            return Ok(q.clone());
        }
        if q.is_empty() {
            return Ok(p.clone());
        }
        let mut seq = p.edges.clone();
        seq.extend_from_slice(&q.edges);
        self.sort_in_place(&mut seq);
        Ok(self.path_from_sorted(seq))
    }

    /// The unique `(p1, p2)` with `p = p1 ∘ p2` and `degree(p1) = m`.
    ///
    /// The normal form is walked into the color word `sort(m) ++ sort(n)` by
    /// moving each wanted edge leftwards through squares, read forwards or
    /// backwards as needed, and then cut.
    pub fn factor(&self, p: &Path, m: &Degree) -> Result<(Path, Path), KGraphError> {
        let n =
            p.degree.checked_sub(m).ok_or_else(|| KGraphError::BadSplit { m: m.clone(), degree: p.degree.clone() })?;
        let word: Vec<usize> = [m, &n]
            .iter()
            .flat_map(|d| d.as_slice().iter().enumerate().flat_map(|(c, &cnt)| std::iter::repeat_n(c, cnt as usize)))
            .collect();
        let mut seq = p.edges.clone();
        for (pos, &want) in word.iter().enumerate() {
            let from = (pos..seq.len()).find(|&q| self.color(seq[q]) == want).expect("color counts agree");
            for q in (pos..from).rev() {
                let (a, b) = self.swap(seq[q], seq[q + 1]);
                seq[q] = a;
                seq[q + 1] = b;
            }
        }
        let cut = m.total() as usize;
        let head = if cut == 0 { self.identity_path(p.cod) } else { self.path_from_sorted(seq[..cut].to_vec()) };
        let tail =
            if cut == seq.len() { self.identity_path(p.dom) } else { self.path_from_sorted(seq[cut..].to_vec()) };
        debug_assert_eq!(self.compose_paths(&head, &tail).as_ref(), Ok(p));
        Ok((head, tail))
    }

    /// Every normal-form path with degree at most `bound`, sorted by degree.
    pub fn enumerate_paths(&self, bound: &Degree) -> Result<Vec<Path>, KGraphError> {
        if bound.rank() != self.k {
            return Err(KGraphError::RankMismatch { expected: self.k, found: bound.rank() });
        }
        let mut out = Vec::new();
        for v in (0..self.objects.len()).map(ObjIx) {
            out.push(self.identity_path(v));
            let mut stack: Vec<(Vec<EdgeIx>, Degree)> = Vec::new();
            for &e in self.edges_into(v) {
                let d = Degree::unit(self.k, self.color(e));
                if d.le(bound) {
                    stack.push((vec![e], d));
                }
            }
            while let Some((seq, deg)) = stack.pop() {
                let last = *seq.last().expect("non-empty");
                for &e in self.edges_into(self.edge(last).dom) {
                    if self.color(e) < self.color(last)
                        || deg.as_slice()[self.color(e)] >= bound.as_slice()[self.color(e)]
                    {
                        continue;
                    }
                    let mut s = seq.clone();
                    s.push(e);
                    let mut d = deg.clone();
                    d.increment(self.color(e));
                    stack.push((s, d));
                }
                out.push(self.path_from_sorted(seq));
            }
        }
        out.sort();
        Ok(out)
    }

    pub fn path_id(&self, p: &Path) -> String {
        if p.edges.is_empty() {
            identity_path_id(self.object_id(p.cod))
        } else {
            p.edges.iter().map(|e| self.edge(*e).id.as_str()).collect::<Vec<_>>().join(".")
        }
    }

    /// All normal forms reachable from `raw` under every order of square
    /// applications.
    pub fn all_normal_forms(&self, raw: &[EdgeIx]) -> BTreeSet<Vec<EdgeIx>> {
        let mut seen = BTreeSet::new();
        let mut results = BTreeSet::new();
        let mut stack = vec![raw.to_vec()];
        while let Some(seq) = stack.pop() {
            if !seen.insert(seq.clone()) {
                continue;
            }
            let mut terminal = true;
            for i in 0..seq.len().saturating_sub(1) {
                if self.color(seq[i]) > self.color(seq[i + 1]) {
                    terminal = false;
                    let mut next = seq.clone();
                    let (a, b) = self.swap(seq[i], seq[i + 1]);
                    next[i] = a;
                    next[i + 1] = b;
                    stack.push(next);
                }
            }
            if terminal {
                results.insert(seq);
            }
        }
        results
    }

    fn check_cubes(&self) -> Result<(), KGraphError> {
        for h in (0..self.edges.len()).map(EdgeIx) {
            for &g in self.edges_into(self.edge(h).dom) {
                if self.color(g) >= self.color(h) {
                    continue;
                }
                for &f in self.edges_into(self.edge(g).dom) {
                    if self.color(f) >= self.color(g) {
                        continue;
                    }
                    if self.all_normal_forms(&[h, g, f]).len() != 1 {
                        return Err(KGraphError::CubeFailure([
                            self.edge(h).id.clone(),
                            self.edge(g).id.clone(),
                            self.edge(f).id.clone(),
                        ]));
                    }
                }
            }
        }
        Ok(())
    }

    /// The window of the k-graph below `bound` as a finite category with its
    /// degree functor.
    pub fn truncation(&self, bound: &Degree) -> Result<(FinCategory, SizeFunctor), KGraphError> {
        let paths = self.enumerate_paths(bound)?;
        let index: HashMap<&Path, usize> = paths.iter().enumerate().map(|(i, p)| (p, i)).collect();
        let ids: Vec<String> = paths.iter().map(|p| self.path_id(p)).collect();
        let mut compose = Vec::new();
        for p in paths.iter().filter(|p| !p.is_empty()) {
            for q in paths.iter().filter(|q| !q.is_empty() && q.cod == p.dom) {
                let Some(d) = p.degree.checked_add(&q.degree) else { continue };
                if !d.le(bound) {
                    continue;
                }
                let pq = self.compose_paths(p, q)?;
                compose.push([ids[index[p]].clone(), ids[index[q]].clone(), ids[index[&pq]].clone()]);
            }
        }
        let doc = CategoryDoc {
            objects: self.objects.clone(),
            arrows: paths
                .iter()
                .zip(&ids)
                .map(|(p, id)| ArrowDoc {
                    id: id.clone(),
                    dom: self.object_id(p.dom).to_string(),
                    cod: self.object_id(p.cod).to_string(),
                })
                .collect(),
            identities: self.objects.iter().map(|o| (o.clone(), identity_path_id(o))).collect(),
            compose,
            inverses: None,
            size: Some(SizeDoc {
                k: self.k,
                deg: paths.iter().zip(&ids).map(|(p, id)| (id.clone(), p.degree.as_slice().to_vec())).collect(),
            }),
            bound: Some(bound.as_slice().to_vec()),
            embeddings: None,
        };
        let (cat, size) = fincat::load(&doc)?;
        Ok((cat, size.expect("size section present")))
    }

    pub fn to_doc(&self) -> SkeletonDoc {
        let mut squares: Vec<SquareDoc> = self
            .forward
            .iter()
            .map(|(&(f, e), &(e2, f2))| SquareDoc {
                lhs: [self.edge(f).id.clone(), self.edge(e).id.clone()],
                rhs: [self.edge(e2).id.clone(), self.edge(f2).id.clone()],
            })
            .collect();
        squares.sort_by(|a, b| (&a.lhs, &a.rhs).cmp(&(&b.lhs, &b.rhs)));
        SkeletonDoc {
            k: self.k,
            objects: self.objects.clone(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeDoc {
                    id: e.id.clone(),
                    color: e.color + 1,
                    dom: self.objects[e.dom.0].clone(),
                    cod: self.objects[e.cod.0].clone(),
                })
                .collect(),
            squares,
        }
    }
}
