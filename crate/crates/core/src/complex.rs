//! Finite abstract simplicial complexes, rooted complexes and balls.
//!
//! A [`SimplicialComplex`] keeps the full downward closure of its maximal
//! simplices, grouped by dimension and sorted lexicographically, together
//! with a hash index per dimension and per-vertex incidence lists. All
//! values are immutable once built.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use crate::error::{Error, Result};

/// Vertex identifier. Input ids are arbitrary non-negative integers.
pub type Vertex = u64;

/// Largest simplex (in vertices) accepted by [`SimplicialComplex::closure`].
/// The closure of a simplex with `k` vertices has `2^k - 1` faces.
pub const MAX_SIMPLEX_VERTICES: usize = 24;

/// A simplex, stored as its strictly increasing list of vertices.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Simplex(Vec<Vertex>);

impl Simplex {
    /// Builds a simplex from vertices in any order.
    pub fn new(vertices: impl IntoIterator<Item = Vertex>) -> Result<Self> {
        let mut vs: Vec<Vertex> = vertices.into_iter().collect();
        if vs.is_empty() {
            return Err(Error::malformed("empty simplex"));
        }
        vs.sort_unstable();
        if let Some(w) = vs.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::malformed(format!(
                "vertex {} repeated inside one simplex",
                w[0]
            )));
        }
        Ok(Simplex(vs))
    }

    pub(crate) fn from_sorted(vs: Vec<Vertex>) -> Self {
        debug_assert!(!vs.is_empty() && vs.windows(2).all(|w| w[0] < w[1]));
        Simplex(vs)
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn contains_all(&self, other: &Simplex) -> bool {
        other.0.iter().all(|&v| self.contains(v))
    }

    /// Codimension-one faces as `(i, face)`, where vertex `i` was dropped.
    /// With the increasing-order orientation the face carries sign `(-1)^i`.
    pub fn facets(&self) -> impl Iterator<Item = (usize, Simplex)> + '_ {
        let n = self.0.len();
        (0..if n > 1 { n } else { 0 }).map(move |i| {
            let mut f = Vec::with_capacity(n - 1);
            f.extend_from_slice(&self.0[..i]);
            f.extend_from_slice(&self.0[i + 1..]);
            (i, Simplex(f))
        })
    }
}

impl fmt::Debug for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

/// A finite abstract simplicial complex.
#[derive(Clone)]
pub struct SimplicialComplex {
    vertices: Vec<Vertex>,
    position: HashMap<Vertex, usize>,
    by_dim: Vec<Vec<Simplex>>,
    index: Vec<HashMap<Simplex, usize>>,
    /// `(dim, index)` of every simplex containing the vertex at this position.
    star: Vec<Vec<(usize, usize)>>,
    /// Neighbour positions in the 1-skeleton, sorted.
    neighbors: Vec<Vec<usize>>,
}

impl SimplicialComplex {
    /// Downward closure of a list of simplices.
    pub fn closure<I, S>(maximal: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: IntoIterator<Item = Vertex>,
    {
        let mut all: HashSet<Simplex> = HashSet::new();
        for s in maximal {
            let s = Simplex::new(s)?;
            if s.len() > MAX_SIMPLEX_VERTICES {
                return Err(Error::TooLarge(format!(
                    "simplex with {} vertices (limit {MAX_SIMPLEX_VERTICES})",
                    s.len()
                )));
            }
            if all.contains(&s) {
                continue;
            }
            let k = s.len();
            for mask in 1u32..(1u32 << k) {
                let face: Vec<Vertex> = (0..k)
                    .filter(|i| mask & (1 << i) != 0)
                    .map(|i| s.0[i])
                    .collect();
                all.insert(Simplex(face));
            }
        }
        Ok(Self::from_closed(all))
    }

    /// Builds a complex from a simplex set that is already downward closed.
    pub(crate) fn from_closed(simplices: impl IntoIterator<Item = Simplex>) -> Self {
        let mut by_dim: Vec<Vec<Simplex>> = Vec::new();
        for s in simplices {
            let d = s.dim();
            if by_dim.len() <= d {
                by_dim.resize_with(d + 1, Vec::new);
            }
            by_dim[d].push(s);
        }
        for layer in &mut by_dim {
            layer.sort_unstable();
            layer.dedup();
        }
        let vertices: Vec<Vertex> = by_dim
            .first()
            .map(|l| l.iter().map(|s| s.0[0]).collect())
            .unwrap_or_default();
        let position: HashMap<Vertex, usize> =
            vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let index: Vec<HashMap<Simplex, usize>> = by_dim
            .iter()
            .map(|l| l.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect())
            .collect();
        let mut star = vec![Vec::new(); vertices.len()];
        let mut neighbors = vec![Vec::new(); vertices.len()];
        for (d, layer) in by_dim.iter().enumerate() {
            for (i, s) in layer.iter().enumerate() {
                for v in &s.0 {
                    star[position[v]].push((d, i));
                }
                if d == 1 {
                    let (a, b) = (position[&s.0[0]], position[&s.0[1]]);
                    neighbors[a].push(b);
                    neighbors[b].push(a);
                }
            }
        }
        for n in &mut neighbors {
            n.sort_unstable();
        }
        debug_assert!(by_dim
            .iter()
            .flatten()
            .all(|s| s.facets().all(|(_, f)| index[f.dim()].contains_key(&f))));
        SimplicialComplex {
            vertices,
            position,
            by_dim,
            index,
            star,
            neighbors,
        }
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Maximal simplex dimension, `None` for the empty complex.
    pub fn dim(&self) -> Option<usize> {
        self.by_dim.len().checked_sub(1)
    }

    /// The `p`-simplices in lexicographic order.
    pub fn simplices(&self, p: usize) -> &[Simplex] {
        self.by_dim.get(p).map(Vec::as_slice).unwrap_or(&[])
    }

    /// `|K(p)|`.
    pub fn count(&self, p: usize) -> usize {
        self.simplices(p).len()
    }

    pub fn all_simplices(&self) -> impl Iterator<Item = &Simplex> {
        self.by_dim.iter().flatten()
    }

    pub fn total_simplices(&self) -> usize {
        self.by_dim.iter().map(Vec::len).sum()
    }

    pub fn contains(&self, s: &Simplex) -> bool {
        self.index_of(s).is_some()
    }

    /// Position of `s` in [`Self::simplices`] for its dimension.
    pub fn index_of(&self, s: &Simplex) -> Option<usize> {
        self.index.get(s.dim())?.get(s).copied()
    }

    pub fn has_vertex(&self, v: Vertex) -> bool {
        self.position.contains_key(&v)
    }

    pub(crate) fn position(&self, v: Vertex) -> Option<usize> {
        self.position.get(&v).copied()
    }

    pub(crate) fn neighbor_positions(&self, pos: usize) -> &[usize] {
        &self.neighbors[pos]
    }

    pub(crate) fn star_positions(&self, pos: usize) -> &[(usize, usize)] {
        &self.star[pos]
    }

    /// Vertices adjacent to `v` in the 1-skeleton.
    pub fn neighbors(&self, v: Vertex) -> impl Iterator<Item = Vertex> + '_ {
        self.position(v)
            .map(|p| self.neighbors[p].as_slice())
            .unwrap_or(&[])
            .iter()
            .map(|&q| self.vertices[q])
    }

    /// Simplices containing `v`, ordered by dimension.
    pub fn star(&self, v: Vertex) -> impl Iterator<Item = &Simplex> + '_ {
        self.position(v)
            .map(|p| self.star[p].as_slice())
            .unwrap_or(&[])
            .iter()
            .map(|&(d, i)| &self.by_dim[d][i])
    }

    /// Number of `p`-simplices containing `v`.
    pub fn p_degree(&self, v: Vertex, p: usize) -> usize {
        self.position(v)
            .map(|pos| self.star[pos].iter().filter(|(d, _)| *d == p).count())
            .unwrap_or(0)
    }

    /// Vertex degree, i.e. the number of edges at `v`.
    pub fn degree(&self, v: Vertex) -> usize {
        self.position(v).map(|p| self.neighbors[p].len()).unwrap_or(0)
    }

    pub fn max_degree(&self) -> usize {
        self.neighbors.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Graph distances (in the 1-skeleton) from `source`, indexed by vertex
    /// position; `None` for unreachable vertices.
    pub(crate) fn distances_from(&self, source: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.vertices.len()];
        let mut queue = VecDeque::new();
        dist[source] = Some(0);
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap();
            for &w in &self.neighbors[u] {
                if dist[w].is_none() {
                    dist[w] = Some(du + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Positions of the vertices within distance `r` of `source`, in BFS
    /// order.
    pub(crate) fn positions_within(&self, source: usize, r: usize) -> Vec<usize> {
        let mut dist: HashMap<usize, usize> = HashMap::from([(source, 0)]);
        let mut order = vec![source];
        let mut head = 0;
        while head < order.len() {
            let u = order[head];
            head += 1;
            let du = dist[&u];
            if du == r {
                continue;
            }
            for &w in &self.neighbors[u] {
                if let std::collections::hash_map::Entry::Vacant(e) = dist.entry(w) {
                    e.insert(du + 1);
                    order.push(w);
                }
            }
        }
        order
    }

    /// The closed ball of radius `r` around `root`, built from the stars of
    /// the vertices inside it.
    pub fn ball_around(&self, root: Vertex, r: usize) -> Result<RootedComplex> {
        let src = self.position(root).ok_or(Error::UnknownVertex(root))?;
        let inside = self.positions_within(src, r);
        let members: HashSet<Vertex> = inside.iter().map(|&p| self.vertices[p]).collect();
        let mut simplices = Vec::new();
        for &pos in &inside {
            let v = self.vertices[pos];
            for &(d, i) in &self.star[pos] {
                let s = &self.by_dim[d][i];
                if s.0[0] == v && s.0.iter().all(|w| members.contains(w)) {
                    simplices.push(s.clone());
                }
            }
        }
        Ok(RootedComplex {
            complex: SimplicialComplex::from_closed(simplices),
            root,
        })
    }

    /// Graph distance between two vertices, `None` if in different components.
    pub fn distance(&self, a: Vertex, b: Vertex) -> Option<usize> {
        let (pa, pb) = (self.position(a)?, self.position(b)?);
        self.distances_from(pa)[pb]
    }

    /// Connected components, each sorted, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<Vertex>> {
        let mut seen = vec![false; self.vertices.len()];
        let mut out = Vec::new();
        for start in 0..self.vertices.len() {
            if seen[start] {
                continue;
            }
            let mut comp = Vec::new();
            let mut stack = vec![start];
            seen[start] = true;
            while let Some(u) = stack.pop() {
                comp.push(self.vertices[u]);
                for &w in &self.neighbors[u] {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.vertices.is_empty() || self.components().len() == 1
    }

    /// Subcomplex of all simplices whose vertices satisfy `keep`.
    pub fn induced(&self, keep: impl Fn(Vertex) -> bool) -> SimplicialComplex {
        SimplicialComplex::from_closed(
            self.all_simplices()
                .filter(|s| s.0.iter().all(|&v| keep(v)))
                .cloned(),
        )
    }

    /// Removes every simplex containing `face`; the vertices of the complex
    /// are kept unless `face` is itself a vertex.
    pub fn without_cofaces(&self, face: &Simplex) -> SimplicialComplex {
        SimplicialComplex::from_closed(
            self.all_simplices()
                .filter(|s| !s.contains_all(face))
                .cloned(),
        )
    }

    /// Relabels vertices through an injective map.
    pub fn relabel(&self, map: impl Fn(Vertex) -> Vertex) -> Result<SimplicialComplex> {
        let mut out = Vec::with_capacity(self.total_simplices());
        for s in self.all_simplices() {
            out.push(Simplex::new(s.0.iter().map(|&v| map(v)))?);
        }
        let relabeled = SimplicialComplex::from_closed(out);
        if relabeled.n_vertices() != self.n_vertices() {
            return Err(Error::malformed("relabeling is not injective"));
        }
        Ok(relabeled)
    }

    /// Simplices not properly contained in any other simplex.
    pub fn maximal_simplices(&self) -> Vec<Simplex> {
        let mut is_face: Vec<Vec<bool>> = self.by_dim.iter().map(|l| vec![false; l.len()]).collect();
        for layer in self.by_dim.iter().skip(1) {
            for s in layer {
                for (_, f) in s.facets() {
                    let d = f.dim();
                    is_face[d][self.index[d][&f]] = true;
                }
            }
        }
        let mut out: Vec<Simplex> = self
            .by_dim
            .iter()
            .zip(&is_face)
            .flat_map(|(l, m)| l.iter().zip(m).filter(|(_, f)| !**f).map(|(s, _)| s.clone()))
            .collect();
        out.sort_unstable();
        out
    }

    /// `Σ (-1)^p |K(p)|`.
    pub fn euler_characteristic(&self) -> i64 {
        self.by_dim
            .iter()
            .enumerate()
            .map(|(p, l)| if p % 2 == 0 { l.len() as i64 } else { -(l.len() as i64) })
            .sum()
    }

    /// Checks the structural invariants: downward closure and that every
    /// vertex is a 0-simplex.
    pub fn is_downward_closed(&self) -> bool {
        self.all_simplices().all(|s| {
            s.facets().all(|(_, f)| self.contains(&f))
                && s.0.iter().all(|v| self.position.contains_key(v))
        })
    }
}

impl PartialEq for SimplicialComplex {
    fn eq(&self, other: &Self) -> bool {
        self.by_dim == other.by_dim
    }
}

impl Eq for SimplicialComplex {}

impl fmt::Debug for SimplicialComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SimplicialComplex")
            .field("f_vector", &self.by_dim.iter().map(Vec::len).collect::<Vec<_>>())
            .field("maximal", &self.maximal_simplices())
            .finish()
    }
}

/// A complex with a distinguished root vertex.
///
/// Construction only checks that the root is a vertex. Operations that need
/// a class in the space of connected rooted complexes (canonical codes,
/// distances) either work on the root component or reject disconnected input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootedComplex {
    complex: SimplicialComplex,
    root: Vertex,
}

impl RootedComplex {
    pub fn new(complex: SimplicialComplex, root: Vertex) -> Result<Self> {
        if !complex.has_vertex(root) {
            return Err(Error::UnknownVertex(root));
        }
        Ok(RootedComplex { complex, root })
    }

    pub fn complex(&self) -> &SimplicialComplex {
        &self.complex
    }

    pub fn root(&self) -> Vertex {
        self.root
    }

    pub fn into_complex(self) -> SimplicialComplex {
        self.complex
    }

    /// Closed ball of radius `r`: the simplices all of whose vertices are
    /// within graph distance `r` of the root.
    pub fn ball(&self, r: usize) -> RootedComplex {
        self.complex.ball_around(self.root, r).expect("root is a vertex")
    }

    /// The connected component containing the root.
    pub fn root_component(&self) -> RootedComplex {
        if self.complex.is_connected() {
            return self.clone();
        }
        let k = &self.complex;
        let dist = k.distances_from(k.position(self.root).unwrap());
        RootedComplex {
            complex: k.induced(|v| dist[k.position(v).unwrap()].is_some()),
            root: self.root,
        }
    }

    /// Largest graph distance from the root within its component.
    pub fn eccentricity(&self) -> usize {
        let k = &self.complex;
        k.distances_from(k.position(self.root).unwrap())
            .into_iter()
            .flatten()
            .max()
            .unwrap_or(0)
    }

    /// Number of `p`-simplices containing the root.
    pub fn p_degree(&self, p: usize) -> usize {
        self.complex.p_degree(self.root, p)
    }
}

/// A complex with an ordered pair of roots `(from, to)`, as seen by a
/// mass-transport test function.
#[derive(Clone, Copy, Debug)]
pub struct DoublyRooted<'a> {
    pub complex: &'a SimplicialComplex,
    pub from: Vertex,
    pub to: Vertex,
}
