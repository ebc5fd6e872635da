//! Spectral moments from local data, Monte Carlo estimation, the
//! small-eigenvalue bound and the convergence experiment.
//!
//! `⟨Δ_p^r σ, σ⟩` only involves simplices within `r + 1` steps of the root,
//! so moments are computed on balls by propagating sparse chains:
//! `⟨Δ^r σ, σ⟩ = ⟨Δ^a σ, Δ^b σ⟩` with `a = ⌈r/2⌉`, `b = ⌊r/2⌋`, which gives
//! every order up to `R` from `⌈R/2⌉` matrix–vector products. Orders up to
//! [`EXACT_MAX_ORDER`] use checked 128-bit integers.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::complex::{RootedComplex, SimplicialComplex};
use crate::error::{Error, Result};
use crate::linalg::SparseIntMatrix;
use crate::measures::{measure_distance, RandomRootedComplex, UniformRooting};
use crate::rng::stream_rng;
use crate::spectral::{self, ratio, SpectralMeasure};

/// Highest moment order computed in exact integer arithmetic.
pub const EXACT_MAX_ORDER: usize = 8;

/// `Σ_σ ⟨Δ^a σ, Δ^b σ⟩` for every order `r ≤ max_order`, summed over the
/// `p`-simplices `σ` selected by `roots` (indices into `K(p)`).
fn propagate_exact(lap: &SparseIntMatrix, roots: &[usize], max_order: usize) -> Result<Vec<i128>> {
    let half = max_order.div_ceil(2);
    let mut out = vec![0i128; max_order + 1];
    let overflow = || Error::Numerical(format!("moment of order {max_order} overflows 128-bit integers"));
    for &s in roots {
        let mut powers: Vec<BTreeMap<usize, i128>> = vec![BTreeMap::from([(s, 1)])];
        for _ in 0..half {
            let next = lap.apply_sparse(powers.last().unwrap()).ok_or_else(overflow)?;
            powers.push(next);
        }
        for (r, slot) in out.iter_mut().enumerate() {
            let (a, b) = (&powers[r.div_ceil(2)], &powers[r / 2]);
            let mut dot: i128 = 0;
            for (i, x) in a {
                if let Some(y) = b.get(i) {
                    dot = x.checked_mul(*y).and_then(|v| dot.checked_add(v)).ok_or_else(overflow)?;
                }
            }
            *slot = slot.checked_add(dot).ok_or_else(overflow)?;
        }
    }
    Ok(out)
}

fn propagate_f64(lap: &SparseIntMatrix, roots: &[usize], max_order: usize) -> Vec<f64> {
    let half = max_order.div_ceil(2);
    let mut out = vec![0.0; max_order + 1];
    for &s in roots {
        let mut powers: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::from([(s, 1.0)])];
        for _ in 0..half {
            let next = lap.apply_sparse_f64(powers.last().unwrap());
            powers.push(next);
        }
        for (r, slot) in out.iter_mut().enumerate() {
            let (a, b) = (&powers[r.div_ceil(2)], &powers[r / 2]);
            *slot += a.iter().filter_map(|(i, x)| b.get(i).map(|y| x * y)).sum::<f64>();
        }
    }
    out
}

/// Indices of the `p`-simplices of `k` containing `root`.
fn simplices_at(k: &SimplicialComplex, root: u64, p: usize) -> Vec<usize> {
    k.simplices(p)
        .iter()
        .enumerate()
        .filter(|(_, s)| s.contains(root))
        .map(|(i, _)| i)
        .collect()
}

/// Exact local moments `Σ_{σ ∋ o} ⟨Δ_p^r σ, σ⟩ / (p+1)` for `r = 0..=max_order`,
/// computed inside the `(max_order + 1)`-ball around the root.
pub fn local_moments_exact(rc: &RootedComplex, p: usize, max_order: usize) -> Result<Vec<BigRational>> {
    let ball = rc.complex().ball_around(rc.root(), max_order + 1)?;
    let k = ball.complex();
    let lap = spectral::laplacian(k, p).matrix;
    let sums = propagate_exact(&lap, &simplices_at(k, rc.root(), p), max_order)?;
    Ok(sums
        .into_iter()
        .map(|s| BigRational::new(BigInt::from(s), BigInt::from(p + 1)))
        .collect())
}

/// Local moments in floating point; exact up to [`EXACT_MAX_ORDER`].
pub fn local_moments(rc: &RootedComplex, p: usize, max_order: usize) -> Result<Vec<f64>> {
    if max_order <= EXACT_MAX_ORDER {
        return Ok(local_moments_exact(rc, p, max_order)?.iter().map(to_f64).collect());
    }
    let ball = rc.complex().ball_around(rc.root(), max_order + 1)?;
    let k = ball.complex();
    let lap = spectral::laplacian(k, p).matrix;
    Ok(propagate_f64(&lap, &simplices_at(k, rc.root(), p), max_order)
        .into_iter()
        .map(|s| s / (p + 1) as f64)
        .collect())
}

/// The single local moment of order `r`.
pub fn local_moment(rc: &RootedComplex, p: usize, r: usize) -> Result<f64> {
    Ok(local_moments(rc, p, r)?[r])
}

pub fn local_moment_exact(rc: &RootedComplex, p: usize, r: usize) -> Result<BigRational> {
    Ok(local_moments_exact(rc, p, r)?.swap_remove(r))
}

/// `tr(Δ_p^r)` for `r = 0..=max_order`, exactly.
pub fn trace_powers(k: &SimplicialComplex, p: usize, max_order: usize) -> Result<Vec<BigInt>> {
    let lap = spectral::laplacian(k, p).matrix;
    let all: Vec<usize> = (0..k.count(p)).collect();
    let chunks: Vec<Vec<i128>> = all
        .par_chunks(256)
        .map(|c| propagate_exact(&lap, c, max_order))
        .collect::<Result<_>>()?;
    let mut out = vec![BigInt::zero(); max_order + 1];
    for c in chunks {
        for (o, v) in out.iter_mut().zip(c) {
            *o += v;
        }
    }
    Ok(out)
}

pub(crate) fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Moments `m_0..m_R` of a spectral measure, with exact values and standard
/// errors when available.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentVector {
    pub p: usize,
    pub moments: Vec<f64>,
    pub exact: Option<Vec<BigRational>>,
    pub std_errors: Option<Vec<f64>>,
}

impl MomentVector {
    fn from_exact(p: usize, exact: Vec<BigRational>) -> Self {
        MomentVector {
            p,
            moments: exact.iter().map(to_f64).collect(),
            exact: Some(exact),
            std_errors: None,
        }
    }

    /// `m_0 m_2 − m_1²`, non-negative for the moments of a positive measure.
    pub fn hankel_2x2(&self) -> Option<f64> {
        match self.moments.as_slice() {
            [m0, m1, m2, ..] => Some(m0 * m2 - m1 * m1),
            _ => None,
        }
    }
}

/// Moments of `ν_p` for a finite-support measure, exact up to
/// [`EXACT_MAX_ORDER`].
pub fn moments_of_measure(m: &RandomRootedComplex, p: usize, max_order: usize) -> Result<MomentVector> {
    let per_root: Vec<(Vec<f64>, Option<Vec<BigRational>>, &BigRational)> = m
        .support()
        .par_iter()
        .map(|(code, w)| {
            let rc = code.to_rooted();
            if max_order <= EXACT_MAX_ORDER {
                let e = local_moments_exact(&rc, p, max_order)?;
                Ok((e.iter().map(to_f64).collect(), Some(e), w))
            } else {
                Ok((local_moments(&rc, p, max_order)?, None, w))
            }
        })
        .collect::<Result<_>>()?;
    if max_order <= EXACT_MAX_ORDER {
        let mut exact = vec![BigRational::zero(); max_order + 1];
        for (_, e, w) in &per_root {
            for (acc, v) in exact.iter_mut().zip(e.as_ref().unwrap()) {
                *acc += *w * v;
            }
        }
        return Ok(MomentVector::from_exact(p, exact));
    }
    let mut moments = vec![0.0; max_order + 1];
    for (f, _, w) in &per_root {
        for (acc, v) in moments.iter_mut().zip(f) {
            *acc += to_f64(w) * v;
        }
    }
    Ok(MomentVector {
        p,
        moments,
        exact: None,
        std_errors: None,
    })
}

/// Moments of the uniform rooting of `k`: `tr(Δ_p^r) / |V|`.
pub fn uniform_moments(k: &SimplicialComplex, p: usize, max_order: usize) -> Result<MomentVector> {
    if k.is_empty() {
        return Err(Error::Empty);
    }
    let n = BigInt::from(k.n_vertices());
    let exact = trace_powers(k, p, max_order)?
        .into_iter()
        .map(|t| BigRational::new(t, n.clone()))
        .collect();
    Ok(MomentVector::from_exact(p, exact))
}

/// One sampled root: its ball and, for exhaustive enumeration, its mass.
#[derive(Clone, Debug)]
pub struct RootSample {
    pub ball: RootedComplex,
    pub weight: BigRational,
}

/// Source of random roots. `draw` must return a rooted complex containing
/// the full ball of the requested radius around its root.
pub trait RootSampler: Sync {
    /// Size of the finite population, if enumeration is possible.
    fn population_size(&self) -> Option<usize>;
    /// The `index`-th member of the population with its exact mass.
    fn root(&self, index: usize, radius: usize) -> Result<RootSample>;
    fn draw(&self, rng: &mut ChaCha8Rng, radius: usize) -> Result<RootedComplex>;
}

/// Uniform vertex of a finite complex.
pub struct UniformVertexSampler<'a>(pub &'a SimplicialComplex);

impl RootSampler for UniformVertexSampler<'_> {
    fn population_size(&self) -> Option<usize> {
        Some(self.0.n_vertices())
    }

    fn root(&self, index: usize, radius: usize) -> Result<RootSample> {
        let v = *self
            .0
            .vertices()
            .get(index)
            .ok_or_else(|| Error::param(format!("root index {index} out of range")))?;
        Ok(RootSample {
            ball: self.0.ball_around(v, radius)?,
            weight: ratio(1, self.0.n_vertices()),
        })
    }

    fn draw(&self, rng: &mut ChaCha8Rng, radius: usize) -> Result<RootedComplex> {
        if self.0.is_empty() {
            return Err(Error::Empty);
        }
        let v = self.0.vertices()[rng.random_range(0..self.0.n_vertices())];
        self.0.ball_around(v, radius)
    }
}

/// Root drawn from a finite-support measure.
pub struct MeasureSampler<'a> {
    measure: &'a RandomRootedComplex,
    cumulative: Vec<f64>,
}

impl<'a> MeasureSampler<'a> {
    pub fn new(measure: &'a RandomRootedComplex) -> Self {
        let mut acc = 0.0;
        let cumulative = measure
            .support()
            .iter()
            .map(|(_, w)| {
                acc += to_f64(w);
                acc
            })
            .collect();
        MeasureSampler { measure, cumulative }
    }
}

impl RootSampler for MeasureSampler<'_> {
    fn population_size(&self) -> Option<usize> {
        Some(self.measure.len())
    }

    fn root(&self, index: usize, radius: usize) -> Result<RootSample> {
        let (code, w) = self
            .measure
            .support()
            .get(index)
            .ok_or_else(|| Error::param(format!("root index {index} out of range")))?;
        Ok(RootSample {
            ball: code.to_rooted().ball(radius),
            weight: w.clone(),
        })
    }

    fn draw(&self, rng: &mut ChaCha8Rng, radius: usize) -> Result<RootedComplex> {
        let u: f64 = rng.random::<f64>() * self.cumulative.last().copied().unwrap_or(0.0);
        let i = self.cumulative.partition_point(|&c| c <= u).min(self.measure.len() - 1);
        Ok(self.measure.support()[i].0.to_rooted().ball(radius))
    }
}

/// Empirical moments from `n_samples` independent roots. Sample `i` uses
/// stream `i` of `seed`; the reduction runs in index order, so the output
/// does not depend on the thread count.
pub fn monte_carlo_moments(
    sampler: &dyn RootSampler,
    p: usize,
    max_order: usize,
    n_samples: usize,
    seed: u64,
) -> Result<MomentVector> {
    if n_samples == 0 {
        return Err(Error::param("at least one sample is required"));
    }
    let samples: Vec<Vec<f64>> = (0..n_samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i as u64);
            let ball = sampler.draw(&mut rng, max_order + 1)?;
            local_moments(&ball, p, max_order)
        })
        .collect::<Result<_>>()?;
    let n = n_samples as f64;
    let mut moments = vec![0.0; max_order + 1];
    for s in &samples {
        for (m, v) in moments.iter_mut().zip(s) {
            *m += v;
        }
    }
    moments.iter_mut().for_each(|m| *m /= n);
    let std_errors = (0..=max_order)
        .map(|r| {
            if n_samples < 2 {
                return f64::NAN;
            }
            let var = samples.iter().map(|s| (s[r] - moments[r]).powi(2)).sum::<f64>() / (n - 1.0);
            (var / n).sqrt()
        })
        .collect();
    Ok(MomentVector {
        p,
        moments,
        exact: None,
        std_errors: Some(std_errors),
    })
}

/// Exact moments by enumerating the sampler's whole population.
pub fn exhaustive_moments(sampler: &dyn RootSampler, p: usize, max_order: usize) -> Result<MomentVector> {
    let n = sampler
        .population_size()
        .ok_or_else(|| Error::param("sampler population cannot be enumerated"))?;
    let parts: Vec<Vec<BigRational>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let s = sampler.root(i, max_order + 1)?;
            Ok(local_moments_exact(&s.ball, p, max_order)?
                .into_iter()
                .map(|m| m * &s.weight)
                .collect())
        })
        .collect::<Result<_>>()?;
    let mut exact = vec![BigRational::zero(); max_order + 1];
    for part in parts {
        for (acc, v) in exact.iter_mut().zip(part) {
            *acc += v;
        }
    }
    Ok(MomentVector::from_exact(p, exact))
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `ln(‖Δ_p‖)·C(D, p) / ((p+1)·ln(1/ε))`, the bound on `ν((−ε, ε) ∖ {0})`.
/// `norm` must be an upper bound for `‖Δ_p‖`; norms below one are replaced
/// by one (an integer matrix has no non-zero eigenvalue below one unless it
/// has one above one).
pub fn kernel_mass_bound(norm: f64, d: usize, p: usize, eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::param(format!("ε = {eps} must lie in (0, 1)")));
    }
    Ok(norm.max(1.0).ln() * binomial(d, p) / ((p + 1) as f64 * (1.0 / eps).ln()))
}

/// Outcome of comparing a spectrum with [`kernel_mass_bound`].
#[derive(Clone, Debug, PartialEq)]
pub struct KernelMassCheck {
    pub eps: f64,
    pub mass: BigRational,
    pub bound: f64,
}

impl KernelMassCheck {
    pub fn holds(&self) -> bool {
        to_f64(&self.mass) <= self.bound
    }
}

/// Checks `ν((−ε, ε) ∖ {0}) ≤ bound` on a full spectrum, using its spectral
/// radius as `‖Δ_p‖`.
pub fn check_kernel_mass(nu: &SpectralMeasure, d: usize, eps: f64) -> Result<KernelMassCheck> {
    let bound = kernel_mass_bound(nu.spectral_radius(), d, nu.p, eps)?;
    Ok(KernelMassCheck {
        eps,
        mass: nu.small_nonzero_mass(eps),
        bound,
    })
}

/// Parameters of [`convergence_experiment`].
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub p: usize,
    pub max_order: usize,
    pub eps: Vec<f64>,
    pub r_max: usize,
    /// Uniform degree bound; `None` uses the first level's maximal degree.
    pub degree_bound: Option<usize>,
}

/// One row of the experiment: statistics of one complex in the sequence.
#[derive(Clone, Debug)]
pub struct ExperimentRow {
    pub label: String,
    pub n_vertices: usize,
    pub betti: usize,
    pub betti_normalized: BigRational,
    pub moments: MomentVector,
    /// `ν([0, ε)) = ν((−ε, ε))` per configured `ε`.
    pub window_mass: Vec<BigRational>,
    pub distance_to_last: BigRational,
}

#[derive(Clone, Debug)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub degree_bound: usize,
    pub rows: Vec<ExperimentRow>,
    /// A priori `‖Δ_p‖` bound for the degree bound.
    pub norm_bound: f64,
    /// [`kernel_mass_bound`] per configured `ε`.
    pub kernel_bounds: Vec<f64>,
}

/// Direction of a column along the sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Trend {
    Constant,
    NonIncreasing,
    NonDecreasing,
    Mixed,
}

impl Trend {
    pub fn of(values: &[f64]) -> Trend {
        let down = values.windows(2).all(|w| w[1] <= w[0]);
        let up = values.windows(2).all(|w| w[1] >= w[0]);
        match (down, up) {
            (true, true) => Trend::Constant,
            (true, false) => Trend::NonIncreasing,
            (false, true) => Trend::NonDecreasing,
            (false, false) => Trend::Mixed,
        }
    }

    fn label(self) -> &'static str {
        match self {
            Trend::Constant => "constant",
            Trend::NonIncreasing => "nonincreasing",
            Trend::NonDecreasing => "nondecreasing",
            Trend::Mixed => "mixed",
        }
    }
}

/// Statistics along a sequence of complexes of uniformly bounded degree:
/// normalised Betti numbers, moments, small-eigenvalue masses and the
/// distance of every level's uniform rooting to the last one.
pub fn convergence_experiment(levels: &[(String, SimplicialComplex)], config: &ExperimentConfig) -> Result<ExperimentReport> {
    let Some((_, first)) = levels.first() else {
        return Err(Error::param("the sequence is empty"));
    };
    let bound = config.degree_bound.unwrap_or_else(|| first.max_degree());
    for (label, k) in levels {
        if k.is_empty() {
            return Err(Error::Empty);
        }
        let found = k.max_degree();
        if found > bound {
            return Err(Error::Hypothesis(format!(
                "level {label} has vertex degree {found} > {bound}; spectral convergence needs uniformly bounded degree"
            )));
        }
    }
    for &e in &config.eps {
        kernel_mass_bound(1.0, bound, config.p, e)?;
    }
    let (_, last) = levels.last().unwrap();
    let p = config.p;
    let rows = levels
        .par_iter()
        .map(|(label, k)| {
            let betti = spectral::betti(k, p);
            let window_mass = config
                .eps
                .iter()
                .map(|&e| spectral::mass_below(k, p, e))
                .collect::<Result<_>>()?;
            Ok(ExperimentRow {
                label: label.clone(),
                n_vertices: k.n_vertices(),
                betti,
                betti_normalized: ratio(betti, k.n_vertices()),
                moments: uniform_moments(k, p, config.max_order)?,
                window_mass,
                distance_to_last: measure_distance(&UniformRooting(k), &UniformRooting(last), config.r_max)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let norm_bound = spectral::laplacian_norm_a_priori(bound, p);
    let kernel_bounds = config
        .eps
        .iter()
        .map(|&e| kernel_mass_bound(norm_bound, bound, p, e))
        .collect::<Result<_>>()?;
    Ok(ExperimentReport {
        config: config.clone(),
        degree_bound: bound,
        rows,
        norm_bound,
        kernel_bounds,
    })
}

impl ExperimentReport {
    /// CSV with a header row and `#` footer lines holding the bounds and
    /// column trends.
    pub fn to_csv(&self) -> String {
        let c = &self.config;
        let mut out = String::from("n,|V|,p,b_p,b_p_normalized");
        for r in 0..=c.max_order {
            write!(out, ",m{r}").unwrap();
        }
        for e in &c.eps {
            write!(out, ",nu_eps_{e}").unwrap();
        }
        out.push_str(",dist_to_last\n");
        for row in &self.rows {
            write!(out, "{},{},{},{},{}", row.label, row.n_vertices, c.p, row.betti, to_f64(&row.betti_normalized)).unwrap();
            for m in &row.moments.moments {
                write!(out, ",{m}").unwrap();
            }
            for w in &row.window_mass {
                write!(out, ",{}", to_f64(w)).unwrap();
            }
            writeln!(out, ",{}", to_f64(&row.distance_to_last)).unwrap();
        }
        writeln!(out, "# degree_bound={} norm_bound={}", self.degree_bound, self.norm_bound).unwrap();
        for (e, b) in c.eps.iter().zip(&self.kernel_bounds) {
            writeln!(out, "# kernel_mass_bound eps={e} value={b}").unwrap();
        }
        for (name, trend) in self.trends() {
            writeln!(out, "# trend {name} {}", trend.label()).unwrap();
        }
        out
    }

    /// Trend of the normalised Betti number, each moment, each window mass
    /// and the distance to the last level.
    pub fn trends(&self) -> Vec<(String, Trend)> {
        let col = |f: &dyn Fn(&ExperimentRow) -> f64| self.rows.iter().map(f).collect::<Vec<f64>>();
        let mut out = vec![("b_p_normalized".to_string(), Trend::of(&col(&|r| to_f64(&r.betti_normalized))))];
        for i in 0..=self.config.max_order {
            out.push((format!("m{i}"), Trend::of(&col(&|r| r.moments.moments[i]))));
        }
        for (j, e) in self.config.eps.iter().enumerate() {
            out.push((format!("nu_eps_{e}"), Trend::of(&col(&|r| to_f64(&r.window_mass[j])))));
        }
        out.push(("dist_to_last".to_string(), Trend::of(&col(&|r| to_f64(&r.distance_to_last)))));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{fixture, torus_tower};
    use crate::measures::{uniform_rooting, LocalStatistics};
    use crate::spectral::spectral_measure;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    /// Dense oracle: diagonal entries of `Δ^r` summed over simplices at the root.
    fn dense_local(k: &SimplicialComplex, root: u64, p: usize, r: u32) -> f64 {
        let l = spectral::laplacian(k, p).matrix.to_dense();
        let n = l.nrows();
        let mut pow = nalgebra::DMatrix::<f64>::identity(n, n);
        for _ in 0..r {
            pow = &pow * &l;
        }
        simplices_at(k, root, p).iter().map(|&i| pow[(i, i)]).sum::<f64>() / (p + 1) as f64
    }

    #[test]
    fn hollow_triangle_local_moments() {
        let h = RootedComplex::new(fixture("hollow_triangle").unwrap(), 0).unwrap();
        let m = local_moments_exact(&h, 1, 2).unwrap();
        assert_eq!(m, vec![q(1, 1), q(2, 1), q(6, 1)]);
        for r in 0..5 {
            assert!((local_moment(&h, 1, r as usize).unwrap() - dense_local(h.complex(), 0, 1, r)).abs() < 1e-9);
        }
    }

    #[test]
    fn order_zero_is_degree() {
        let f = RootedComplex::new(fixture("filled_triangle").unwrap(), 1).unwrap();
        assert_eq!(local_moment_exact(&f, 1, 0).unwrap(), q(2, 2));
        assert_eq!(local_moment_exact(&f, 2, 0).unwrap(), q(1, 3));
    }

    #[test]
    fn measure_moments() {
        let h = uniform_rooting(&fixture("hollow_triangle").unwrap()).unwrap();
        let mv = moments_of_measure(&h, 1, 2).unwrap();
        assert_eq!(mv.exact.unwrap(), vec![q(1, 1), q(2, 1), q(6, 1)]);
        let f = uniform_rooting(&fixture("filled_triangle").unwrap()).unwrap();
        let mf = moments_of_measure(&f, 1, 4).unwrap();
        assert_eq!(mf.exact.unwrap(), (0..5).map(|r| q(3i64.pow(r), 1)).collect::<Vec<_>>());
        assert_eq!(
            moments_of_measure(&f, 1, 0).unwrap().exact.unwrap()[0],
            f.expected_p_degree(1) / BigRational::from_integer(2.into())
        );
    }

    #[test]
    fn float_path_beyond_exact_orders() {
        let h = RootedComplex::new(fixture("hollow_triangle").unwrap(), 0).unwrap();
        let m = local_moments(&h, 1, 10).unwrap();
        // diagonal of Δ^r is 2·3^r/3 on each edge; two edges at the root, halved
        assert!((m[10] - 2.0 * 3f64.powi(9)).abs() < 1e-6);
    }

    #[test]
    fn trace_moments_match_spectrum() {
        for name in ["octahedron", "bowtie", "torus4", "rp2"] {
            let k = fixture(name).unwrap();
            for p in 0..=2 {
                let mv = uniform_moments(&k, p, 6).unwrap();
                let nu = spectral_measure(&k, p).unwrap();
                for r in 0..=6 {
                    let (a, b) = (mv.moments[r], nu.moment(r as u32));
                    assert!((a - b).abs() <= 1e-8 * b.abs().max(1.0), "{name} p={p} r={r}: {a} vs {b}");
                }
                let um = moments_of_measure(&uniform_rooting(&k).unwrap(), p, 4).unwrap();
                assert_eq!(um.exact.unwrap(), mv.exact.as_ref().unwrap()[..5].to_vec());
            }
        }
    }

    #[test]
    fn monte_carlo_on_torus() {
        let t = torus_tower(2, 12).unwrap();
        let s = UniformVertexSampler(&t);
        let a = monte_carlo_moments(&s, 1, 2, 64, 9).unwrap();
        assert_eq!(a.moments[0], 3.0);
        assert_eq!(a.std_errors.as_ref().unwrap()[0], 0.0);
        assert_eq!(a, monte_carlo_moments(&s, 1, 2, 64, 9).unwrap());
        let ex = exhaustive_moments(&s, 1, 3).unwrap();
        assert_eq!(ex.exact, uniform_moments(&t, 1, 3).unwrap().exact);
    }

    #[test]
    fn measure_sampler_exhaustive_equals_exact() {
        let m = uniform_rooting(&fixture("path5").unwrap()).unwrap();
        let s = MeasureSampler::new(&m);
        assert_eq!(exhaustive_moments(&s, 0, 4).unwrap().exact, moments_of_measure(&m, 0, 4).unwrap().exact);
        let mc = monte_carlo_moments(&s, 0, 1, 200, 1).unwrap();
        assert!((mc.moments[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn kernel_bound_values() {
        let nu = spectral_measure(&fixture("hollow_triangle").unwrap(), 1).unwrap();
        let c = check_kernel_mass(&nu, 2, 0.1).unwrap();
        assert!(c.mass.is_zero() && c.holds());
        assert!(kernel_mass_bound(3.0, 2, 1, 0.999999).unwrap() > 1e5);
        assert!(kernel_mass_bound(3.0, 2, 1, 1.0).is_err());
        assert!(kernel_mass_bound(3.0, 2, 1, 0.0).is_err());
        assert_eq!(binomial(6, 2), 15.0);
    }

    #[test]
    fn torus_experiment() {
        let levels: Vec<(String, SimplicialComplex)> =
            [4, 8].iter().map(|&n| (n.to_string(), torus_tower(2, n).unwrap())).collect();
        let cfg = ExperimentConfig {
            p: 1,
            max_order: 2,
            eps: vec![0.1],
            r_max: 2,
            degree_bound: Some(6),
        };
        let rep = convergence_experiment(&levels, &cfg).unwrap();
        assert_eq!(rep.rows[0].betti_normalized, q(1, 8));
        assert_eq!(rep.rows[1].betti_normalized, q(1, 32));
        let csv = rep.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "n,|V|,p,b_p,b_p_normalized,m0,m1,m2,nu_eps_0.1,dist_to_last");
        assert!(lines.next().unwrap().starts_with("4,16,1,2,0.125,3,"));
        assert!(lines.next().unwrap().starts_with("8,64,1,2,0.03125,3,"));
        assert!(csv.contains("# trend b_p_normalized nonincreasing"));
        let bad = ExperimentConfig { degree_bound: Some(4), ..cfg };
        assert!(matches!(convergence_experiment(&levels, &bad), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn constant_sequence_rows_agree() {
        let k = fixture("octahedron").unwrap();
        let levels = vec![("a".to_string(), k.clone()), ("b".to_string(), k.clone()), ("c".to_string(), k)];
        let cfg = ExperimentConfig { p: 1, max_order: 3, eps: vec![0.5], r_max: 2, degree_bound: None };
        let rep = convergence_experiment(&levels, &cfg).unwrap();
        let csv = rep.to_csv();
        let body: Vec<&str> = csv.lines().skip(1).take(3).map(|l| l.split_once(',').unwrap().1).collect();
        assert!(body.windows(2).all(|w| w[0] == w[1]));
    }
}
