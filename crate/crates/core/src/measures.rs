//! Finite-support random rooted complexes and their local statistics.
//!
//! A [`RandomRootedComplex`] is a finite list of rooted classes with exact
//! rational weights. Local statistics (ball distributions, expected
//! degrees) are available through [`LocalStatistics`], which is also
//! implemented by the lazy [`UniformRooting`] view of a finite complex so
//! that large complexes never need to be canonicalised as a whole.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::canon::{canonical_code, CanonicalCode};
use crate::complex::{RootedComplex, Simplex, SimplicialComplex, Vertex};
use crate::error::{Error, Result};
use crate::spectral::ratio;

/// A probability measure with finite support on connected rooted classes.
/// The support is sorted by code and codes are pairwise distinct.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RandomRootedComplex {
    support: Vec<(CanonicalCode, BigRational)>,
}

impl RandomRootedComplex {
    /// Builds a measure from canonical codes, merging repeated codes.
    /// Weights must be positive and sum to exactly one.
    pub fn from_codes(entries: impl IntoIterator<Item = (CanonicalCode, BigRational)>) -> Result<Self> {
        let mut merged: BTreeMap<CanonicalCode, BigRational> = BTreeMap::new();
        for (code, w) in entries {
            if !w.is_positive() {
                return Err(Error::param(format!("weight {w} is not positive")));
            }
            *merged.entry(code).or_insert_with(BigRational::zero) += w;
        }
        let total: BigRational = merged.values().sum();
        if !total.is_one() {
            return Err(Error::param(format!("weights sum to {total}, not 1")));
        }
        Ok(RandomRootedComplex {
            support: merged.into_iter().collect(),
        })
    }

    /// Builds a measure from rooted complexes, which must be connected.
    pub fn from_rooted(entries: impl IntoIterator<Item = (RootedComplex, BigRational)>) -> Result<Self> {
        let coded = entries
            .into_iter()
            .map(|(rc, w)| Ok((canonical_code(&rc)?, w)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_codes(coded)
    }

    /// The Dirac measure at one rooted class.
    pub fn dirac(rc: &RootedComplex) -> Result<Self> {
        Self::from_rooted([(rc.clone(), BigRational::one())])
    }

    pub fn support(&self) -> &[(CanonicalCode, BigRational)] {
        &self.support
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn to_json(&self) -> String {
        let doc = MeasureDoc {
            support: self
                .support
                .iter()
                .map(|(code, w)| MeasureEntryDoc {
                    weight: w.to_string(),
                    maximal_simplices: code
                        .to_complex()
                        .maximal_simplices()
                        .iter()
                        .map(|s| s.vertices().to_vec())
                        .collect(),
                    root: 0,
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("measure documents always serialise")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: MeasureDoc = serde_json::from_str(text)?;
        if doc.support.is_empty() {
            return Err(Error::malformed("measure has empty support"));
        }
        let entries = doc
            .support
            .into_iter()
            .map(|e| {
                let w = BigRational::from_str(e.weight.trim())
                    .map_err(|_| Error::malformed(format!("weight {:?} is not a rational p/q", e.weight)))?;
                let k = SimplicialComplex::closure(e.maximal_simplices)?;
                Ok((RootedComplex::new(k, e.root)?, w))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_rooted(entries)
    }
}

#[derive(Serialize, Deserialize)]
struct MeasureDoc {
    support: Vec<MeasureEntryDoc>,
}

#[derive(Serialize, Deserialize)]
struct MeasureEntryDoc {
    weight: String,
    maximal_simplices: Vec<Vec<Vertex>>,
    root: Vertex,
}

/// Distribution of the radius-`r` ball class around the root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BallDistribution {
    pub radius: usize,
    pub weights: BTreeMap<CanonicalCode, BigRational>,
}

impl BallDistribution {
    /// Total variation distance `½ Σ |a − b|`.
    pub fn total_variation(&self, other: &BallDistribution) -> BigRational {
        let mut sum = BigRational::zero();
        for (code, w) in &self.weights {
            match other.weights.get(code) {
                Some(v) => sum += (w - v).abs(),
                None => sum += w,
            }
        }
        for (code, v) in &other.weights {
            if !self.weights.contains_key(code) {
                sum += v;
            }
        }
        sum / BigRational::from_integer(BigInt::from(2))
    }

    pub fn total(&self) -> BigRational {
        self.weights.values().sum()
    }
}

/// Statistics of a random rooted complex that only look at finite balls
/// around the root.
pub trait LocalStatistics {
    /// Pushforward under the radius-`r` ball map.
    fn ball_distribution(&self, r: usize) -> Result<BallDistribution>;

    /// `E(deg_p)`: the expected number of `p`-simplices at the root.
    fn expected_p_degree(&self, p: usize) -> BigRational;
}

fn collect_distribution(radius: usize, items: Vec<(CanonicalCode, BigRational)>) -> BallDistribution {
    let mut weights: BTreeMap<CanonicalCode, BigRational> = BTreeMap::new();
    for (code, w) in items {
        *weights.entry(code).or_insert_with(BigRational::zero) += w;
    }
    BallDistribution { radius, weights }
}

impl LocalStatistics for RandomRootedComplex {
    fn ball_distribution(&self, r: usize) -> Result<BallDistribution> {
        let items = self
            .support
            .par_iter()
            .map(|(code, w)| Ok((canonical_code(&code.to_rooted().ball(r))?, w.clone())))
            .collect::<Result<Vec<_>>>()?;
        Ok(collect_distribution(r, items))
    }

    fn expected_p_degree(&self, p: usize) -> BigRational {
        self.support
            .iter()
            .map(|(code, w)| w * BigInt::from(code.to_complex().p_degree(0, p)))
            .sum()
    }
}

/// The uniform rooting `μ_K` of a finite complex, evaluated lazily: every
/// vertex is a root with mass `1/|V|`, and a root sees its own component.
#[derive(Clone, Copy, Debug)]
pub struct UniformRooting<'a>(pub &'a SimplicialComplex);

impl LocalStatistics for UniformRooting<'_> {
    fn ball_distribution(&self, r: usize) -> Result<BallDistribution> {
        let k = self.0;
        if k.is_empty() {
            return Err(Error::Empty);
        }
        let w = ratio(1, k.n_vertices());
        let items = k
            .vertices()
            .par_iter()
            .map(|&x| Ok((canonical_code(&k.ball_around(x, r)?)?, w.clone())))
            .collect::<Result<Vec<_>>>()?;
        Ok(collect_distribution(r, items))
    }

    fn expected_p_degree(&self, p: usize) -> BigRational {
        let k = self.0;
        ratio((p + 1) * k.count(p), k.n_vertices().max(1))
    }
}

/// `μ_K = Σ_x δ_[K_x, x] / |V|`, where `K_x` is the component of `x`.
pub fn uniform_rooting(k: &SimplicialComplex) -> Result<RandomRootedComplex> {
    if k.is_empty() {
        return Err(Error::Empty);
    }
    let w = ratio(1, k.n_vertices());
    let components = k.components();
    let items = components
        .par_iter()
        .flat_map(|comp| {
            let sub = if components.len() == 1 {
                k.clone()
            } else {
                let members: std::collections::HashSet<Vertex> = comp.iter().copied().collect();
                k.induced(|v| members.contains(&v))
            };
            comp.par_iter()
                .map(|&x| {
                    let rc = RootedComplex::new(sub.clone(), x)?;
                    Ok((canonical_code(&rc)?, w.clone()))
                })
                .collect::<Vec<Result<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    RandomRootedComplex::from_codes(items)
}

pub fn ball_distribution(m: &impl LocalStatistics, r: usize) -> Result<BallDistribution> {
    m.ball_distribution(r)
}

pub fn expected_p_degree(m: &impl LocalStatistics, p: usize) -> BigRational {
    m.expected_p_degree(p)
}

/// `Σ_{r=0}^{r_max} 2^{−r} · TV(B_r(m1), B_r(m2))`.
pub fn measure_distance(m1: &impl LocalStatistics, m2: &impl LocalStatistics, r_max: usize) -> Result<BigRational> {
    let mut total = BigRational::zero();
    for r in 0..=r_max {
        let tv = m1.ball_distribution(r)?.total_variation(&m2.ball_distribution(r)?);
        total += tv / BigRational::from_integer(BigInt::from(2).pow(r as u32));
    }
    Ok(total)
}

/// Pairwise data of one finite complex used to evaluate transport
/// functions: graph distances and cached ball codes.
pub struct PairContext<'a> {
    complex: &'a SimplicialComplex,
    distances: HashMap<Vertex, Vec<Option<usize>>>,
    codes: RefCell<HashMap<(Vertex, usize), CanonicalCode>>,
}

impl<'a> PairContext<'a> {
    pub fn new(complex: &'a SimplicialComplex) -> Self {
        let distances = complex
            .vertices()
            .iter()
            .map(|&v| (v, complex.distances_from(complex.position(v).unwrap())))
            .collect();
        PairContext {
            complex,
            distances,
            codes: RefCell::new(HashMap::new()),
        }
    }

    pub fn complex(&self) -> &SimplicialComplex {
        self.complex
    }

    pub fn distance(&self, x: Vertex, y: Vertex) -> Option<usize> {
        self.distances[&x][self.complex.position(y).unwrap()]
    }

    pub fn adjacent(&self, x: Vertex, y: Vertex) -> bool {
        self.distance(x, y) == Some(1)
    }

    pub fn degree(&self, x: Vertex) -> usize {
        self.complex.degree(x)
    }

    pub fn ball_code(&self, x: Vertex, r: usize) -> Result<CanonicalCode> {
        if let Some(c) = self.codes.borrow().get(&(x, r)) {
            return Ok(c.clone());
        }
        let code = canonical_code(&self.complex.ball_around(x, r)?)?;
        self.codes.borrow_mut().insert((x, r), code.clone());
        Ok(code)
    }
}

/// A non-negative function of a doubly rooted class `[K, x, y]`.
/// Implementations must be invariant under root-preserving isomorphisms.
pub trait TransportFunction: Sync {
    fn name(&self) -> String;
    fn eval(&self, ctx: &PairContext<'_>, x: Vertex, y: Vertex) -> Result<BigRational>;
}

/// A transport function given by a plain function pointer.
pub struct BuiltinFunction {
    pub name: &'static str,
    pub f: fn(&PairContext<'_>, Vertex, Vertex) -> Result<BigRational>,
}

impl TransportFunction for BuiltinFunction {
    fn name(&self) -> String {
        self.name.to_string()
    }

    fn eval(&self, ctx: &PairContext<'_>, x: Vertex, y: Vertex) -> Result<BigRational> {
        (self.f)(ctx, x, y)
    }
}

/// A transport function given by a table keyed on
/// `(d(x, y), code of B_r(x), code of B_r(y))`; pairs not in the table, or
/// farther apart than `radius`, map to zero.
pub struct TableFunction {
    pub name: String,
    pub radius: usize,
    pub table: HashMap<(usize, CanonicalCode, CanonicalCode), BigRational>,
}

impl TransportFunction for TableFunction {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn eval(&self, ctx: &PairContext<'_>, x: Vertex, y: Vertex) -> Result<BigRational> {
        let Some(d) = ctx.distance(x, y).filter(|&d| d <= self.radius) else {
            return Ok(BigRational::zero());
        };
        let key = (d, ctx.ball_code(x, self.radius)?, ctx.ball_code(y, self.radius)?);
        Ok(self.table.get(&key).cloned().unwrap_or_else(BigRational::zero))
    }
}

fn int(v: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

fn indicator(b: bool) -> BigRational {
    int(b as usize)
}

fn common_neighbours(ctx: &PairContext<'_>, x: Vertex, y: Vertex) -> usize {
    ctx.complex().neighbors(x).filter(|&z| ctx.adjacent(z, y)).count()
}

fn edge_triangles(ctx: &PairContext<'_>, x: Vertex, y: Vertex) -> usize {
    match Simplex::new([x, y]) {
        Ok(e) => ctx.complex().star(x).filter(|s| s.dim() == 2 && s.contains_all(&e)).count(),
        Err(_) => 0,
    }
}

/// The twelve built-in test functions.
pub fn standard_battery() -> Vec<Box<dyn TransportFunction>> {
    let b = |name, f| Box::new(BuiltinFunction { name, f }) as Box<dyn TransportFunction>;
    vec![
        b("adjacent", |c, x, y| Ok(indicator(c.adjacent(x, y)))),
        b("within_distance_2", |c, x, y| Ok(indicator(matches!(c.distance(x, y), Some(1 | 2))))),
        b("degree_on_diagonal", |c, x, y| Ok(int(if x == y { c.degree(y) } else { 0 }))),
        b("adjacent_times_target_degree", |c, x, y| {
            Ok(int(if c.adjacent(x, y) { c.degree(y) } else { 0 }))
        }),
        b("adjacent_target_degree_2", |c, x, y| Ok(indicator(c.adjacent(x, y) && c.degree(y) == 2))),
        b("random_walk_step", |c, x, y| {
            Ok(if c.adjacent(x, y) { BigRational::new(1.into(), c.degree(x).into()) } else { BigRational::zero() })
        }),
        b("edge_triangle_count", |c, x, y| {
            Ok(int(if c.adjacent(x, y) { edge_triangles(c, x, y) } else { 0 }))
        }),
        b("distance_2_degree_product", |c, x, y| {
            Ok(int(if c.distance(x, y) == Some(2) { c.degree(x) * c.degree(y) } else { 0 }))
        }),
        b("adjacent_smaller_ball_1", |c, x, y| {
            Ok(indicator(c.adjacent(x, y) && c.ball_code(x, 1)? < c.ball_code(y, 1)?))
        }),
        b("near_equal_ball_2", |c, x, y| {
            Ok(indicator(matches!(c.distance(x, y), Some(0..=2)) && c.ball_code(x, 2)? == c.ball_code(y, 2)?))
        }),
        b("adjacent_source_triangle_degree", |c, x, y| {
            Ok(int(if c.adjacent(x, y) { c.complex().p_degree(x, 2) } else { 0 }))
        }),
        b("common_neighbours", |c, x, y| {
            Ok(int(if matches!(c.distance(x, y), Some(1 | 2)) { common_neighbours(c, x, y) } else { 0 }))
        }),
    ]
}

/// Both sides of the mass-transport identity for one test function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MassTransport {
    pub name: String,
    /// `E Σ_y f(K, o, y)`: mass sent from the root.
    pub lhs: BigRational,
    /// `E Σ_x f(K, x, o)`: mass received at the root.
    pub rhs: BigRational,
}

impl MassTransport {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }

    pub fn within(&self, tolerance: &BigRational) -> bool {
        (&self.lhs - &self.rhs).abs() <= *tolerance
    }
}

impl fmt::Display for MassTransport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} lhs={} rhs={} {}",
            self.name,
            self.lhs,
            self.rhs,
            if self.holds() { "pass" } else { "FAIL" }
        )
    }
}

/// Evaluates both sides of the mass-transport identity by exhaustive
/// summation over the support and all vertices of each representative.
pub fn mass_transport_check(m: &RandomRootedComplex, f: &dyn TransportFunction) -> Result<MassTransport> {
    let parts = m
        .support()
        .par_iter()
        .map(|(code, w)| {
            let k = code.to_complex();
            let ctx = PairContext::new(&k);
            let mut sent = BigRational::zero();
            let mut received = BigRational::zero();
            for &v in k.vertices() {
                sent += f.eval(&ctx, 0, v)?;
                received += f.eval(&ctx, v, 0)?;
            }
            Ok((w * sent, w * received))
        })
        .collect::<Result<Vec<_>>>()?;
    let (lhs, rhs) = parts
        .into_iter()
        .fold((BigRational::zero(), BigRational::zero()), |(a, b), (x, y)| (a + x, b + y));
    Ok(MassTransport { name: f.name(), lhs, rhs })
}

pub fn run_battery(m: &RandomRootedComplex) -> Result<Vec<MassTransport>> {
    standard_battery().iter().map(|f| mass_transport_check(m, f.as_ref())).collect()
}

/// The Dirac measure on a path of length two rooted at an end. It is not
/// unimodular: the root sends mass along its edge but receives none back
/// under `adjacent_target_degree_2`.
pub fn non_unimodular_example() -> RandomRootedComplex {
    let path = SimplicialComplex::closure([vec![0, 1], vec![1, 2]]).expect("valid path");
    RandomRootedComplex::dirac(&RootedComplex::new(path, 0).expect("0 is a vertex")).expect("path is connected")
}

/// Removes edges, and every simplex containing them, until every vertex
/// degree is at most `d`. Each step takes the vertex of largest degree
/// (lowest id on ties) and deletes its edge to the neighbour of largest
/// degree (lowest id on ties). Vertices are never removed.
pub fn degree_truncate(k: &SimplicialComplex, d: usize) -> SimplicialComplex {
    let mut cur = k.clone();
    loop {
        let Some(v) = cur
            .vertices()
            .iter()
            .copied()
            .filter(|&v| cur.degree(v) > d)
            .max_by_key(|&v| (cur.degree(v), std::cmp::Reverse(v)))
        else {
            return cur;
        };
        let w = cur
            .neighbors(v)
            .max_by_key(|&w| (cur.degree(w), std::cmp::Reverse(w)))
            .expect("positive degree");
        let edge = Simplex::new([v, w]).expect("distinct endpoints");
        cur = cur.without_cofaces(&edge);
    }
}
