//! Oriented chain complexes, boundary and Laplace operators, Betti numbers
//! and spectral measures of finite complexes.
//!
//! Every `p`-simplex is oriented by increasing vertex order and the face
//! opposite the `i`-th vertex enters the boundary with sign `(-1)^i`. Traces
//! and spectra do not depend on this choice.
//!
//! Betti numbers are always computed from exact integer ranks. Spectra come
//! from a dense floating-point eigensolver, and the number of eigenvalues
//! below [`ZERO_TOL`] must agree with the exact kernel dimension.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::complex::{Simplex, SimplicialComplex};
use crate::error::{Error, Result};
use crate::linalg::{self, SparseIntMatrix};

/// Eigenvalues of magnitude below this count as zero.
pub const ZERO_TOL: f64 = 1e-7;
/// Most negative eigenvalue tolerated before the solver result is rejected.
pub const NEGATIVE_TOL: f64 = 1e-9;
/// Largest number of `p`-simplices handled by the dense eigensolver.
pub const DENSE_LIMIT: usize = 2000;

/// The ordered basis of oriented `p`-chains: the `p`-simplices of a complex
/// in lexicographic order, each with its increasing-vertex orientation.
#[derive(Clone, Copy, Debug)]
pub struct OrientedBasis<'a> {
    complex: &'a SimplicialComplex,
    p: usize,
}

impl<'a> OrientedBasis<'a> {
    pub fn new(complex: &'a SimplicialComplex, p: usize) -> Self {
        OrientedBasis { complex, p }
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn len(&self) -> usize {
        self.complex.count(self.p)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn simplex(&self, i: usize) -> &'a Simplex {
        &self.complex.simplices(self.p)[i]
    }

    pub fn index(&self, s: &Simplex) -> Option<usize> {
        (s.dim() == self.p).then(|| self.complex.index_of(s)).flatten()
    }
}

/// The signed incidence matrix `∂_p`: rows are `(p-1)`-simplices, columns
/// are `p`-simplices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryOperator {
    pub p: usize,
    pub matrix: SparseIntMatrix,
}

/// The Laplacian `Δ_p = ∂_pᵀ∂_p + ∂_{p+1}∂_{p+1}ᵀ` on `p`-chains.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Laplacian {
    pub p: usize,
    pub matrix: SparseIntMatrix,
}

/// `∂_p`. For `p = 0` this is the zero map to the zero space.
pub fn boundary(k: &SimplicialComplex, p: usize) -> BoundaryOperator {
    if p == 0 {
        return BoundaryOperator {
            p,
            matrix: SparseIntMatrix::zeros(0, k.count(0)),
        };
    }
    let rows = OrientedBasis::new(k, p - 1);
    let triplets = k.simplices(p).iter().enumerate().flat_map(|(c, s)| {
        s.facets().map(move |(i, f)| {
            let r = rows.index(&f).expect("complex is downward closed");
            (r, c, if i % 2 == 0 { 1 } else { -1 })
        })
    });
    BoundaryOperator {
        p,
        matrix: SparseIntMatrix::from_triplets(k.count(p - 1), k.count(p), triplets),
    }
}

pub fn laplacian(k: &SimplicialComplex, p: usize) -> Laplacian {
    let down = boundary(k, p).matrix;
    let up = boundary(k, p + 1).matrix;
    let lower = down.transpose().mul(&down);
    let upper = up.mul(&up.transpose());
    let matrix = if up.ncols() == 0 {
        lower
    } else if p == 0 {
        upper
    } else {
        lower.add(&upper)
    };
    Laplacian { p, matrix }
}

/// Exact `b_p = |K(p)| − rank ∂_p − rank ∂_{p+1}`.
pub fn betti(k: &SimplicialComplex, p: usize) -> usize {
    let n = k.count(p);
    if n == 0 {
        return 0;
    }
    let down = if p == 0 { 0 } else { linalg::exact_rank(&boundary(k, p).matrix) };
    let up = linalg::exact_rank(&boundary(k, p + 1).matrix);
    n - down - up
}

/// `b_0, …, b_dim`.
pub fn betti_numbers(k: &SimplicialComplex) -> Vec<usize> {
    match k.dim() {
        None => Vec::new(),
        Some(d) => (0..=d).map(|p| betti(k, p)).collect(),
    }
}

/// `β_p` of the uniform rooting: `b_p / |V|`.
pub fn betti_normalized(k: &SimplicialComplex, p: usize) -> Result<BigRational> {
    if k.is_empty() {
        return Err(Error::Empty);
    }
    Ok(ratio(betti(k, p), k.n_vertices()))
}

pub(crate) fn ratio(a: usize, b: usize) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

/// One atom of a spectral measure: an eigenvalue and its multiplicity. The
/// atom's mass is `multiplicity / |V|`.
#[derive(Clone, Debug, PartialEq)]
pub struct Atom {
    pub eigenvalue: f64,
    pub multiplicity: usize,
    /// Set when the eigenvalue is within `1e-9` of an integer and was
    /// snapped to it.
    pub integral: bool,
}

/// The `p`-th spectral measure of the uniform rooting of a finite complex:
/// every eigenvalue of `Δ_p` with mass `1/|V|`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralMeasure {
    pub p: usize,
    pub n_vertices: usize,
    pub atoms: Vec<Atom>,
}

impl SpectralMeasure {
    pub fn weight(&self, atom: &Atom) -> BigRational {
        ratio(atom.multiplicity, self.n_vertices)
    }

    /// `ν(ℝ) = |K(p)| / |V|`.
    pub fn total_mass(&self) -> BigRational {
        ratio(self.atoms.iter().map(|a| a.multiplicity).sum(), self.n_vertices)
    }

    /// `ν({0})`.
    pub fn mass_at_zero(&self) -> BigRational {
        ratio(self.zero_multiplicity(), self.n_vertices)
    }

    pub fn zero_multiplicity(&self) -> usize {
        self.atoms.iter().filter(|a| a.eigenvalue == 0.0).map(|a| a.multiplicity).sum()
    }

    /// Mass of the open interval `(lo, hi)`.
    pub fn mass_in(&self, lo: f64, hi: f64) -> BigRational {
        let m = self
            .atoms
            .iter()
            .filter(|a| a.eigenvalue > lo && a.eigenvalue < hi)
            .map(|a| a.multiplicity)
            .sum();
        ratio(m, self.n_vertices)
    }

    /// `ν((−ε, ε) ∖ {0})`.
    pub fn small_nonzero_mass(&self, eps: f64) -> BigRational {
        self.mass_in(-eps, eps) - self.mass_at_zero()
    }

    /// `∫ λ^r dν`.
    pub fn moment(&self, r: u32) -> f64 {
        self.atoms
            .iter()
            .map(|a| a.eigenvalue.powi(r as i32) * a.multiplicity as f64)
            .sum::<f64>()
            / self.n_vertices as f64
    }

    pub fn spectral_radius(&self) -> f64 {
        self.atoms.last().map_or(0.0, |a| a.eigenvalue)
    }

    /// `eigenvalue,weight` rows with exact weights.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("eigenvalue,weight\n");
        for a in &self.atoms {
            writeln!(out, "{},{}", a.eigenvalue, self.weight(a)).unwrap();
        }
        out
    }
}

/// Groups sorted eigenvalues into atoms. Values closer than a relative
/// `1e-8` are merged; values within `1e-9` of an integer are snapped.
fn cluster(eigenvalues: &[f64], zero_count: usize) -> Vec<Atom> {
    let mut atoms: Vec<Atom> = Vec::new();
    if zero_count > 0 {
        atoms.push(Atom {
            eigenvalue: 0.0,
            multiplicity: zero_count,
            integral: true,
        });
    }
    let mut group: Vec<f64> = Vec::new();
    let flush = |group: &mut Vec<f64>, atoms: &mut Vec<Atom>| {
        if group.is_empty() {
            return;
        }
        let mean = group.iter().sum::<f64>() / group.len() as f64;
        let rounded = mean.round();
        let integral = (mean - rounded).abs() <= 1e-9;
        atoms.push(Atom {
            eigenvalue: if integral { rounded } else { mean },
            multiplicity: group.len(),
            integral,
        });
        group.clear();
    };
    for &e in &eigenvalues[zero_count..] {
        if let Some(&last) = group.last() {
            if e - last > 1e-8 * e.abs().max(1.0) {
                flush(&mut group, &mut atoms);
            }
        }
        group.push(e);
    }
    flush(&mut group, &mut atoms);
    atoms
}

/// Eigenvalues of `Δ_p`, increasing, after the sign and kernel cross-checks.
pub fn laplacian_eigenvalues(k: &SimplicialComplex, p: usize) -> Result<Vec<f64>> {
    let n = k.count(p);
    if n > DENSE_LIMIT {
        return Err(Error::TooLarge(format!(
            "{n} {p}-simplices exceed the dense eigensolver limit of {DENSE_LIMIT}"
        )));
    }
    let lap = laplacian(k, p);
    let ev = linalg::symmetric_eigenvalues(&lap.matrix);
    if let Some(&min) = ev.first() {
        if min < -NEGATIVE_TOL {
            return Err(Error::Numerical(format!("Δ_{p} has eigenvalue {min:e} < 0")));
        }
    }
    let zeros = ev.iter().filter(|e| e.abs() < ZERO_TOL).count();
    let exact = betti(k, p);
    if zeros != exact {
        return Err(Error::Numerical(format!(
            "Δ_{p}: {zeros} eigenvalues below {ZERO_TOL:e} but exact kernel dimension is {exact}"
        )));
    }
    Ok(ev)
}

/// The spectral measure `ν_p` of the uniform rooting of `k`.
pub fn spectral_measure(k: &SimplicialComplex, p: usize) -> Result<SpectralMeasure> {
    if k.is_empty() {
        return Err(Error::Empty);
    }
    let ev = laplacian_eigenvalues(k, p)?;
    let zeros = ev.iter().take_while(|e| e.abs() < ZERO_TOL).count();
    Ok(SpectralMeasure {
        p,
        n_vertices: k.n_vertices(),
        atoms: cluster(&ev, zeros),
    })
}

/// `ν_p([0, ε))` for complexes of any size. Small complexes use the dense
/// spectrum; larger ones count eigenvalues below `ε` through an `LDLᵀ`
/// inertia computation.
pub fn mass_below(k: &SimplicialComplex, p: usize, eps: f64) -> Result<BigRational> {
    if k.is_empty() {
        return Err(Error::Empty);
    }
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::param(format!("window radius {eps} must be positive")));
    }
    let count = if k.count(p) <= DENSE_LIMIT {
        let ev = laplacian_eigenvalues(k, p)?;
        ev.iter().filter(|&&e| e < eps).count()
    } else {
        let c = linalg::count_eigenvalues_below(&laplacian(k, p).matrix, eps)?;
        let b = betti(k, p);
        if c < b {
            return Err(Error::Numerical(format!(
                "inertia count {c} below {eps} is smaller than the exact kernel dimension {b}"
            )));
        }
        c
    };
    Ok(ratio(count, k.n_vertices()))
}

/// Spectral radius of `Δ_p` by dense eigensolve, or, above the dense
/// limit, a power-iteration estimate (a lower estimate).
pub fn spectral_radius(k: &SimplicialComplex, p: usize) -> Result<f64> {
    if k.count(p) <= DENSE_LIMIT {
        Ok(laplacian_eigenvalues(k, p)?.last().copied().unwrap_or(0.0))
    } else {
        Ok(linalg::power_iteration_radius(&laplacian(k, p).matrix, 500))
    }
}

/// `det(x·I − Δ_p)` with integer coefficients, highest degree first. The
/// recursion runs over `ℚ`; a non-integral coefficient is reported as a
/// numerical failure.
pub fn characteristic_polynomial(k: &SimplicialComplex, p: usize) -> Result<Vec<BigInt>> {
    let cp = linalg::characteristic_polynomial(&laplacian(k, p).matrix);
    cp.into_iter()
        .map(|c| {
            if c.is_integer() {
                Ok(c.to_integer())
            } else {
                Err(Error::Numerical(format!("characteristic polynomial coefficient {c} is not an integer")))
            }
        })
        .collect()
}

/// The three bounds of the boundedness estimate for degree bound `D`
/// together with the actual norms of `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct NormBounds {
    pub p: usize,
    pub degree_bound: usize,
    /// `√(p+1)`.
    pub boundary_bound: f64,
    /// `√(D−p+1)`.
    pub coboundary_bound: f64,
    /// `2√((p+2)D)`.
    pub laplacian_bound: f64,
    /// `‖∂_p‖ = ‖∂_p*‖`, the largest singular value.
    pub boundary_norm: f64,
    /// Spectral radius of `Δ_p`.
    pub laplacian_norm: f64,
    /// Rigorous bound from the Schur test on both parts of `Δ_p`:
    /// `max(‖∂_p‖₁‖∂_p‖_∞, ‖∂_{p+1}‖₁‖∂_{p+1}‖_∞)`.
    pub schur_bound: f64,
}

impl NormBounds {
    pub fn boundary_holds(&self, tol: f64) -> bool {
        self.boundary_norm <= self.boundary_bound + tol
    }

    pub fn coboundary_holds(&self, tol: f64) -> bool {
        self.boundary_norm <= self.coboundary_bound + tol
    }

    pub fn laplacian_holds(&self, tol: f64) -> bool {
        self.laplacian_norm <= self.laplacian_bound + tol
    }
}

/// Schur-test bound `‖∂‖² ≤ (max column sum)·(max row sum)`.
fn schur_square(m: &SparseIntMatrix) -> f64 {
    let (c, r) = m.max_abs_column_and_row_sums();
    (c * r) as f64
}

/// A priori bound on `‖Δ_p‖` for vertex degree at most `D`:
/// `max((p+1)(D−p+1), (p+2)(D−p))`, from the Schur test and the fact that
/// the up and down parts of `Δ_p` act on orthogonal subspaces.
pub fn laplacian_norm_a_priori(d: usize, p: usize) -> f64 {
    let down = if p == 0 { 0 } else { (p + 1) * (d + 1).saturating_sub(p) };
    let up = (p + 2) * d.saturating_sub(p);
    down.max(up) as f64
}

pub fn operator_norm_bounds(k: &SimplicialComplex, p: usize, d: usize) -> Result<NormBounds> {
    let found = k.max_degree();
    if found > d {
        return Err(Error::DegreeBound { found, bound: d });
    }
    let down = boundary(k, p).matrix;
    let up = boundary(k, p + 1).matrix;
    let boundary_norm = linalg::singular_values(&down).first().copied().unwrap_or(0.0);
    let laplacian_norm = spectral_radius(k, p)?;
    Ok(NormBounds {
        p,
        degree_bound: d,
        boundary_bound: ((p + 1) as f64).sqrt(),
        coboundary_bound: ((d + 1) as f64 - p as f64).max(0.0).sqrt(),
        laplacian_bound: 2.0 * (((p + 2) * d) as f64).sqrt(),
        boundary_norm,
        laplacian_norm,
        schur_bound: schur_square(&down).max(schur_square(&up)),
    })
}

/// Both sides of the Euler–Poincaré identity for the uniform rooting.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EulerPoincare {
    /// `Σ (−1)^p β_p`.
    pub lhs: BigRational,
    /// `Σ (−1)^p |K(p)| / |V| = Σ (−1)^p E(deg_p)/(p+1)`.
    pub rhs: BigRational,
}

impl EulerPoincare {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

pub fn euler_poincare_check(k: &SimplicialComplex) -> Result<EulerPoincare> {
    if k.is_empty() {
        return Err(Error::Empty);
    }
    let n = BigInt::from(k.n_vertices());
    let alt = |p: usize, x: usize| if p.is_multiple_of(2) { BigInt::from(x) } else { -BigInt::from(x) };
    let dim = k.dim().unwrap_or(0);
    let lhs: BigInt = (0..=dim).map(|p| alt(p, betti(k, p))).sum();
    let rhs: BigInt = (0..=dim).map(|p| alt(p, k.count(p))).sum();
    Ok(EulerPoincare {
        lhs: BigRational::new(lhs, n.clone()),
        rhs: BigRational::new(rhs, n),
    })
}

/// `p,b_p,normalized` rows for every dimension of `k`.
pub fn betti_csv(k: &SimplicialComplex) -> Result<String> {
    if k.is_empty() {
        return Err(Error::Empty);
    }
    let mut out = String::from("p,b_p,normalized\n");
    for (p, b) in betti_numbers(k).into_iter().enumerate() {
        writeln!(out, "{p},{b},{}", ratio(b, k.n_vertices())).unwrap();
    }
    Ok(out)
}

/// Sanity check used by tests and the CLI: `∂_{p-1} ∘ ∂_p = 0`.
pub fn boundary_squares_to_zero(k: &SimplicialComplex, p: usize) -> bool {
    if p < 2 {
        return true;
    }
    boundary(k, p - 1).matrix.mul(&boundary(k, p).matrix).is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::Vertex;
    use num_traits::{One, Zero};

    fn k(max: &[&[Vertex]]) -> SimplicialComplex {
        SimplicialComplex::closure(max.iter().map(|s| s.to_vec())).unwrap()
    }

    fn hollow() -> SimplicialComplex {
        k(&[&[0, 1], &[1, 2], &[0, 2]])
    }

    fn filled() -> SimplicialComplex {
        k(&[&[0, 1, 2]])
    }

    fn close(a: &[f64], b: &[f64]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-9)
    }

    #[test]
    fn boundary_shapes_and_signs() {
        let b = boundary(&hollow(), 1).matrix;
        assert_eq!((b.nrows(), b.ncols()), (3, 3));
        assert!((0..3).all(|c| b.column(c).len() == 2));
        assert_eq!(linalg::exact_rank(&b), 2);
        let b2 = boundary(&filled(), 2).matrix;
        assert_eq!((b2.nrows(), b2.ncols()), (3, 1));
        // faces 12, 02, 01 of 012 with signs +, -, +
        assert_eq!(b2.column(0), &[(0, 1), (1, -1), (2, 1)]);
        assert!(boundary_squares_to_zero(&filled(), 2));
        let single = boundary(&k(&[&[0]]), 1).matrix;
        assert_eq!(single.ncols(), 0);
    }

    #[test]
    fn laplacian_spectra() {
        assert!(close(&laplacian_eigenvalues(&hollow(), 1).unwrap(), &[0.0, 3.0, 3.0]));
        assert!(close(&laplacian_eigenvalues(&filled(), 1).unwrap(), &[3.0, 3.0, 3.0]));
        let c4 = k(&[&[0, 1], &[1, 2], &[2, 3], &[0, 3]]);
        assert!(close(&laplacian_eigenvalues(&c4, 0).unwrap(), &[0.0, 2.0, 2.0, 4.0]));
        assert!(laplacian(&filled(), 1).matrix.is_symmetric());
    }

    #[test]
    fn betti_of_small_complexes() {
        assert_eq!(betti_numbers(&hollow()), vec![1, 1]);
        assert_eq!(betti_numbers(&filled()), vec![1, 0, 0]);
        let octa = k(&[
            &[0, 2, 4], &[0, 2, 5], &[0, 3, 4], &[0, 3, 5],
            &[1, 2, 4], &[1, 2, 5], &[1, 3, 4], &[1, 3, 5],
        ]);
        assert_eq!(betti_numbers(&octa), vec![1, 0, 1]);
    }

    #[test]
    fn hollow_triangle_measure() {
        let nu = spectral_measure(&hollow(), 1).unwrap();
        assert_eq!(nu.to_csv(), "eigenvalue,weight\n0,1/3\n3,2/3\n");
        assert_eq!(nu.mass_at_zero(), ratio(1, 3));
        assert_eq!(nu.total_mass(), BigRational::one());
        let f = spectral_measure(&filled(), 1).unwrap();
        assert_eq!(f.atoms.len(), 1);
        assert!(f.mass_at_zero().is_zero());
    }

    #[test]
    fn normalized_betti_of_disjoint_union() {
        let two = k(&[&[0, 1], &[1, 2], &[0, 2], &[3, 4], &[4, 5], &[3, 5]]);
        assert_eq!(betti_normalized(&two, 1).unwrap(), ratio(1, 3));
    }

    #[test]
    fn norm_bounds_report() {
        let nb = operator_norm_bounds(&hollow(), 1, 2).unwrap();
        assert!((nb.laplacian_bound - 2.0 * 6f64.sqrt()).abs() < 1e-12);
        assert!((nb.laplacian_norm - 3.0).abs() < 1e-9);
        assert!(nb.laplacian_holds(1e-9));
        assert!(nb.schur_bound >= nb.laplacian_norm);
        assert!(matches!(operator_norm_bounds(&hollow(), 1, 1), Err(Error::DegreeBound { .. })));
        let f2 = operator_norm_bounds(&filled(), 2, 2).unwrap();
        assert!((f2.laplacian_norm - 3.0).abs() < 1e-9);
    }

    #[test]
    fn a_priori_bound_dominates_schur() {
        for (cx, d) in [(hollow(), 2), (filled(), 2)] {
            for p in 0..=2 {
                let nb = operator_norm_bounds(&cx, p, d).unwrap();
                assert!(nb.schur_bound <= laplacian_norm_a_priori(d, p) + 1e-12);
                assert!(nb.laplacian_norm <= nb.schur_bound + 1e-9);
            }
        }
    }

    #[test]
    fn euler_poincare_on_triangles() {
        let e = euler_poincare_check(&filled()).unwrap();
        assert!(e.holds());
        assert_eq!(e.lhs, ratio(1, 3));
        assert!(euler_poincare_check(&hollow()).unwrap().lhs.is_zero());
    }

    #[test]
    fn char_poly_of_hollow_triangle() {
        // eigenvalues 0,3,3: x^3 - 6x^2 + 9x
        let cp = characteristic_polynomial(&hollow(), 1).unwrap();
        assert_eq!(cp, [1, -6, 9, 0].map(BigInt::from).to_vec());
    }

    #[test]
    fn betti_csv_layout() {
        assert_eq!(betti_csv(&hollow()).unwrap(), "p,b_p,normalized\n0,1,1/3\n1,1,1/3\n");
    }
}
