//! Canonical encoding of rooted complexes as subcomplexes of the full
//! simplex on `ℕ₀`.
//!
//! Finite vertex sets are enumerated by [`upsilon`]: index `n` maps to the
//! set of bit positions of `n + 1`, so `0 ↦ {0}`, `1 ↦ {1}`, `2 ↦ {0,1}`,
//! `3 ↦ {2}`, and every subset of `{0..n}` appears among the first
//! `2^(n+1)` indices. A subcomplex is then a 0/1 sequence, and sequences are
//! ordered lexicographically with a 1 beating a 0 at the first difference.
//! The canonical code of a rooted complex is the smallest sequence over all
//! relabelings sending the root to `0`.
//!
//! Comparing simplex indices is comparing vertex sets in colexicographic
//! order (largest vertex first), so codes are kept as colex-sorted simplex
//! lists and no big integers are needed except when printing bit indices.
//!
//! # Search
//!
//! Simplices with largest vertex `k` form the `k`-th block of the sequence
//! and depend only on which vertex receives label `k` and on the labels
//! already placed. The minimal sequence is therefore built label by label,
//! keeping every partial labeling whose blocks are minimal so far. The
//! second entry of a block is the edge to the smallest labeled neighbour,
//! which forces breadth-first label order: candidates are restricted to the
//! unlabeled neighbours of the earliest labeled vertex that still has any.
//! Candidates that are exchanged by a transposition automorphism ("twins")
//! lead to identical subtrees and only one of them is expanded.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::complex::{RootedComplex, Simplex, SimplicialComplex, Vertex};
use crate::error::{Error, Result};

/// `Υ(n)`: the vertex set with enumeration index `n`.
pub fn upsilon(n: &BigUint) -> Vec<Vertex> {
    let m = n + 1u32;
    (0..m.bits()).filter(|&i| m.bit(i)).collect()
}

/// `Υ⁻¹(s)`: the enumeration index of a non-empty vertex set.
pub fn upsilon_inverse(s: &[Vertex]) -> Result<BigUint> {
    if s.is_empty() {
        return Err(Error::param("the empty set has no enumeration index"));
    }
    let mut m = BigUint::zero();
    for &v in s {
        if m.bit(v) {
            return Err(Error::malformed(format!("vertex {v} repeated")));
        }
        m.set_bit(v, true);
    }
    Ok(m - BigUint::one())
}

fn colex_cmp(a: &[u32], b: &[u32]) -> Ordering {
    a.iter().rev().cmp(b.iter().rev())
}

/// The canonical 0/1 sequence of a rooted class, stored as the
/// colex-sorted list of simplices (each an increasing label list) of the
/// minimal representative. Vertices are `0..n_vertices` and the root is `0`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CanonicalCode {
    n_vertices: u32,
    simplices: Vec<Vec<u32>>,
}

impl CanonicalCode {
    pub fn n_vertices(&self) -> usize {
        self.n_vertices as usize
    }

    /// Simplices in increasing sequence position.
    pub fn simplices(&self) -> &[Vec<u32>] {
        &self.simplices
    }

    /// Positions of the 1-bits, i.e. `Υ⁻¹` of every simplex, increasing.
    pub fn bit_indices(&self) -> Vec<BigUint> {
        self.simplices
            .iter()
            .map(|s| {
                let vs: Vec<Vertex> = s.iter().map(|&v| v as Vertex).collect();
                upsilon_inverse(&vs).expect("simplices are non-empty")
            })
            .collect()
    }

    /// Decodes a set of bit positions, checking that it describes a valid
    /// minimal-representative shape: downward closed, connected, vertices
    /// forming an initial interval.
    pub fn from_bit_indices(bits: &[BigUint]) -> Result<Self> {
        let mut simplices: Vec<Vec<u32>> = Vec::with_capacity(bits.len());
        for b in bits {
            let vs = upsilon(b);
            let vs = vs
                .into_iter()
                .map(|v| u32::try_from(v).map_err(|_| Error::malformed("vertex label too large")))
                .collect::<Result<Vec<u32>>>()?;
            simplices.push(vs);
        }
        simplices.sort_by(|a, b| colex_cmp(a, b));
        simplices.dedup();
        let n = simplices.iter().filter(|s| s.len() == 1).count() as u32;
        let code = CanonicalCode { n_vertices: n, simplices };
        let k = code.to_complex();
        if !k.is_downward_closed() || !k.is_connected() || k.vertices().iter().any(|&v| v >= n as Vertex) {
            return Err(Error::malformed(
                "bit set is not a connected downward-closed complex on an initial interval",
            ));
        }
        if k.is_empty() {
            return Err(Error::Empty);
        }
        Ok(code)
    }

    /// The minimal representative as a complex on `0..n`.
    pub fn to_complex(&self) -> SimplicialComplex {
        SimplicialComplex::from_closed(
            self.simplices
                .iter()
                .map(|s| Simplex::from_sorted(s.iter().map(|&v| v as Vertex).collect())),
        )
    }

    /// The minimal representative rooted at `0`.
    pub fn to_rooted(&self) -> RootedComplex {
        RootedComplex::new(self.to_complex(), 0).expect("codes always contain vertex 0")
    }
}

impl Ord for CanonicalCode {
    /// Lexicographic order of the 0/1 sequences: at the first differing
    /// position the sequence with the 1 is smaller. On simplex lists this
    /// means the smaller simplex wins, and a strict prefix is the larger code.
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.simplices.iter().zip(&other.simplices) {
            match colex_cmp(a, b) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        other.simplices.len().cmp(&self.simplices.len())
    }
}

impl PartialOrd for CanonicalCode {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for CanonicalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CanonicalCode[")?;
        for (i, s) in self.simplices.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{s:?}")?;
        }
        write!(f, "]")
    }
}

/// A canonical code together with one labeling that realises it.
#[derive(Clone, Debug)]
pub struct CanonicalForm {
    pub code: CanonicalCode,
    /// `labeling[i]` is the original vertex that receives label `i`.
    pub labeling: Vec<Vertex>,
}

const UNSET: u32 = u32::MAX;

struct Search<'a> {
    complex: &'a SimplicialComplex,
    /// Simplices through each vertex, as position lists, excluding the vertex itself.
    star: Vec<Vec<Vec<usize>>>,
    twins: HashMap<(usize, usize), bool>,
}

#[derive(Clone)]
struct Branch {
    label: Vec<u32>,
    order: Vec<usize>,
    head: usize,
}

impl<'a> Search<'a> {
    fn new(complex: &'a SimplicialComplex) -> Self {
        let n = complex.n_vertices();
        let mut star = Vec::with_capacity(n);
        for pos in 0..n {
            let v = complex.vertices()[pos];
            let mut through = Vec::new();
            for &(d, i) in complex.star_positions(pos) {
                if d == 0 {
                    continue;
                }
                let s = &complex.simplices(d)[i];
                through.push(
                    s.vertices()
                        .iter()
                        .filter(|&&w| w != v)
                        .map(|&w| complex.position(w).unwrap())
                        .collect(),
                );
            }
            star.push(through);
        }
        Search {
            complex,
            star,
            twins: HashMap::new(),
        }
    }

    /// Whether swapping `a` and `b` is an automorphism of the complex.
    fn twins(&mut self, a: usize, b: usize) -> bool {
        let key = (a.min(b), a.max(b));
        if let Some(&t) = self.twins.get(&key) {
            return t;
        }
        let k = self.complex;
        // every simplex through `from` but not `to` must survive replacing `from` by `to`
        let moves_onto = |star: &[Vec<usize>], to: usize| {
            star.iter().all(|rest| {
                rest.contains(&to) || {
                    let s = Simplex::new(rest.iter().chain(std::iter::once(&to)).map(|&p| k.vertices()[p]))
                        .expect("distinct vertices");
                    k.contains(&s)
                }
            })
        };
        let t = self.star[a].len() == self.star[b].len()
            && moves_onto(&self.star[a], b)
            && moves_onto(&self.star[b], a);
        self.twins.insert(key, t);
        t
    }

    /// Block of candidate `c`: the labels of the other vertices of each
    /// simplex through `c` whose vertices are all labeled, each sorted
    /// decreasingly, the list sorted increasingly. `None` entries are skipped.
    fn block(&self, branch: &Branch, c: usize) -> Vec<Vec<u32>> {
        let mut keys: Vec<Vec<u32>> = Vec::new();
        'simplex: for rest in &self.star[c] {
            let mut key = Vec::with_capacity(rest.len());
            for &p in rest {
                let l = branch.label[p];
                if l == UNSET {
                    continue 'simplex;
                }
                key.push(l);
            }
            key.sort_unstable_by(|a, b| b.cmp(a));
            keys.push(key);
        }
        keys.sort_unstable();
        keys
    }
}

/// Block order with the implicit sentinel: a block that is a strict prefix
/// of another is the larger one.
fn block_cmp(a: &[Vec<u32>], b: &[Vec<u32>]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    b.len().cmp(&a.len())
}

/// Canonical form of a connected rooted complex.
pub fn canonical_form(rc: &RootedComplex) -> Result<CanonicalForm> {
    let k = rc.complex();
    if !k.is_connected() {
        return Err(Error::Disconnected);
    }
    let n = k.n_vertices();
    if n > u32::MAX as usize - 1 {
        return Err(Error::TooLarge(format!("{n} vertices")));
    }
    let mut search = Search::new(k);
    let root = k.position(rc.root()).expect("root is a vertex");
    let mut start = Branch {
        label: vec![UNSET; n],
        order: vec![root],
        head: 0,
    };
    start.label[root] = 0;
    let mut branches = vec![start];
    let mut simplices: Vec<Vec<u32>> = vec![vec![0]];

    for next in 1..n as u32 {
        let mut best: Option<Vec<Vec<u32>>> = None;
        let mut winners: Vec<(usize, usize)> = Vec::new();
        for (bi, branch) in branches.iter_mut().enumerate() {
            while k
                .neighbor_positions(branch.order[branch.head])
                .iter()
                .all(|&w| branch.label[w] != UNSET)
            {
                branch.head += 1;
                debug_assert!(branch.head < branch.order.len(), "connected complex");
            }
            let head = branch.order[branch.head];
            let mut reps: Vec<usize> = Vec::new();
            for &c in k.neighbor_positions(head) {
                if branch.label[c] != UNSET {
                    continue;
                }
                if reps.iter().all(|&r| !search.twins(r, c)) {
                    reps.push(c);
                }
            }
            for c in reps {
                let block = search.block(branch, c);
                let ord = match &best {
                    None => Ordering::Less,
                    Some(b) => block_cmp(&block, b),
                };
                match ord {
                    Ordering::Less => {
                        best = Some(block);
                        winners.clear();
                        winners.push((bi, c));
                    }
                    Ordering::Equal => winners.push((bi, c)),
                    Ordering::Greater => {}
                }
            }
        }
        let best = best.expect("connected complex always has a candidate");
        simplices.push(vec![next]);
        for key in &best {
            let mut s: Vec<u32> = key.iter().rev().copied().collect();
            s.push(next);
            simplices.push(s);
        }
        branches = winners
            .into_iter()
            .map(|(bi, c)| {
                let mut b = branches[bi].clone();
                b.label[c] = next;
                b.order.push(c);
                b
            })
            .collect();
    }

    let labeling = branches[0].order.iter().map(|&p| k.vertices()[p]).collect();
    Ok(CanonicalForm {
        code: CanonicalCode {
            n_vertices: n as u32,
            simplices,
        },
        labeling,
    })
}

/// Canonical code of a connected rooted complex.
pub fn canonical_code(rc: &RootedComplex) -> Result<CanonicalCode> {
    canonical_form(rc).map(|f| f.code)
}

/// Whether a root-preserving simplicial isomorphism exists.
pub fn rooted_isomorphic(a: &RootedComplex, b: &RootedComplex) -> Result<bool> {
    let (ka, kb) = (a.complex(), b.complex());
    if ka.n_vertices() != kb.n_vertices()
        || (0..=ka.dim().unwrap_or(0)).any(|p| ka.count(p) != kb.count(p))
    {
        return Ok(false);
    }
    Ok(canonical_code(a)? == canonical_code(b)?)
}

/// Distance `inf { 2^-r : B_r(a) ≅ B_r(b) }` between rooted classes,
/// computed on the root components.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BsDistance {
    /// The classes are equal.
    Zero,
    /// `2^-r`, where `r` is the largest radius with isomorphic balls.
    Exact(u32),
    /// Balls agree up to the radius cap `r`; the distance is at most `2^-r`.
    AtMost(u32),
}

impl BsDistance {
    pub fn value(&self) -> f64 {
        match *self {
            BsDistance::Zero => 0.0,
            BsDistance::Exact(r) | BsDistance::AtMost(r) => 0.5f64.powi(r as i32),
        }
    }
}

impl fmt::Display for BsDistance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            BsDistance::Zero => write!(f, "0"),
            BsDistance::Exact(0) => write!(f, "1"),
            BsDistance::Exact(r) => write!(f, "1/2^{r}"),
            BsDistance::AtMost(r) => write!(f, "<= 1/2^{r}"),
        }
    }
}

/// Benjamini–Schramm distance between two rooted complexes. With
/// `r_max`, radii above the cap are not inspected.
pub fn bs_distance(a: &RootedComplex, b: &RootedComplex, r_max: Option<usize>) -> Result<BsDistance> {
    let (a, b) = (a.root_component(), b.root_component());
    let whole = a.eccentricity().max(b.eccentricity());
    for r in 0.. {
        if let Some(cap) = r_max {
            if r > cap {
                return Ok(BsDistance::AtMost(cap as u32));
            }
        }
        if canonical_code(&a.ball(r))? != canonical_code(&b.ball(r))? {
            // 0-balls are single vertices, so r >= 1 here.
            return Ok(BsDistance::Exact(r as u32 - 1));
        }
        if r >= whole {
            return Ok(BsDistance::Zero);
        }
    }
    unreachable!()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rc(max: &[&[Vertex]], root: Vertex) -> RootedComplex {
        RootedComplex::new(
            SimplicialComplex::closure(max.iter().map(|s| s.to_vec())).unwrap(),
            root,
        )
        .unwrap()
    }

    #[test]
    fn upsilon_table() {
        let expect: [&[Vertex]; 8] = [&[0], &[1], &[0, 1], &[2], &[0, 2], &[1, 2], &[0, 1, 2], &[3]];
        for (n, e) in expect.iter().enumerate() {
            assert_eq!(upsilon(&BigUint::from(n)), e.to_vec());
        }
        assert_eq!(upsilon_inverse(&[0, 2]).unwrap(), BigUint::from(4u32));
        assert!(upsilon_inverse(&[]).is_err());
    }

    #[test]
    fn upsilon_round_trip_and_prefix_property() {
        for n in 0u32..4096 {
            let s = upsilon(&BigUint::from(n));
            assert_eq!(upsilon_inverse(&s).unwrap(), BigUint::from(n));
        }
        for n in 0..8u64 {
            let limit = 1u32 << (n + 1);
            let mut hit = vec![false; limit as usize];
            for i in 0..limit {
                let s = upsilon(&BigUint::from(i));
                if s.iter().all(|&v| v <= n) {
                    let mask: usize = s.iter().map(|&v| 1usize << v).sum();
                    hit[mask] = true;
                }
            }
            assert!(hit[1..].iter().all(|&h| h), "subsets of 0..={n}");
        }
    }

    #[test]
    fn code_order_prefers_early_ones() {
        let a = CanonicalCode { n_vertices: 2, simplices: vec![vec![0], vec![1], vec![0, 1]] };
        let b = CanonicalCode { n_vertices: 2, simplices: vec![vec![0], vec![1]] };
        assert!(a < b);
        let c = CanonicalCode { n_vertices: 3, simplices: vec![vec![0], vec![1], vec![2]] };
        assert!(a < c);
        assert!(c < b);
    }

    #[test]
    fn single_vertex_and_edge() {
        let v = canonical_code(&rc(&[&[5]], 5)).unwrap();
        assert_eq!(v.bit_indices(), vec![BigUint::zero()]);
        for root in [3, 8] {
            let e = canonical_code(&rc(&[&[3, 8]], root)).unwrap();
            let bits: Vec<u32> = e.bit_indices().iter().map(|b| b.try_into().unwrap()).collect();
            assert_eq!(bits, vec![0, 1, 2]);
        }
    }

    #[test]
    fn hollow_triangle_code_is_root_independent() {
        let codes: Vec<_> = [0, 1, 2]
            .iter()
            .map(|&r| canonical_code(&rc(&[&[0, 1], &[1, 2], &[0, 2]], r)).unwrap())
            .collect();
        assert!(codes.windows(2).all(|w| w[0] == w[1]));
        let relabeled = canonical_code(&rc(&[&[10, 40], &[40, 7], &[10, 7]], 40)).unwrap();
        assert_eq!(codes[0], relabeled);
    }

    #[test]
    fn path_isomorphism() {
        let center = rc(&[&[0, 1], &[1, 2]], 1);
        let other = rc(&[&[7, 8], &[8, 9]], 8);
        let end = rc(&[&[0, 1], &[1, 2]], 0);
        assert!(rooted_isomorphic(&center, &other).unwrap());
        assert!(!rooted_isomorphic(&center, &end).unwrap());
        let hollow = rc(&[&[0, 1], &[1, 2], &[0, 2]], 0);
        let filled = rc(&[&[0, 1, 2]], 0);
        assert!(!rooted_isomorphic(&hollow, &filled).unwrap());
    }

    #[test]
    fn disconnected_is_rejected() {
        assert!(matches!(canonical_code(&rc(&[&[0, 1], &[2]], 0)), Err(Error::Disconnected)));
    }

    #[test]
    fn decoding_round_trip() {
        let code = canonical_code(&rc(&[&[0, 1, 2], &[2, 3], &[3, 4, 0]], 3)).unwrap();
        let back = CanonicalCode::from_bit_indices(&code.bit_indices()).unwrap();
        assert_eq!(back, code);
        assert_eq!(canonical_code(&code.to_rooted()).unwrap(), code);
        // {1} alone is not connected to the root's component
        let bad = [BigUint::from(0u32), BigUint::from(1u32)];
        assert!(CanonicalCode::from_bit_indices(&bad).is_err());
    }

    #[test]
    fn cycle_distances() {
        let c5 = rc(&[&[0, 1], &[1, 2], &[2, 3], &[3, 4], &[4, 0]], 0);
        let c6 = rc(&[&[0, 1], &[1, 2], &[2, 3], &[3, 4], &[4, 5], &[5, 0]], 0);
        assert_eq!(bs_distance(&c5, &c6, None).unwrap(), BsDistance::Exact(1));
        assert_eq!(bs_distance(&c5, &c6, None).unwrap().value(), 0.5);
        assert_eq!(bs_distance(&c5, &c5, None).unwrap(), BsDistance::Zero);
        assert_eq!(bs_distance(&c5, &c6, Some(0)).unwrap(), BsDistance::AtMost(0));
        let hollow = rc(&[&[0, 1], &[1, 2], &[0, 2]], 0);
        let filled = rc(&[&[0, 1, 2]], 0);
        assert_eq!(bs_distance(&hollow, &filled, None).unwrap().value(), 1.0);
    }
}
