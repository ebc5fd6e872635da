//! Sparse integer matrices and the two independent rank routes used by the
//! spectral code: exact integer column reduction and floating-point
//! symmetric eigenvalues. Also spectrum slicing by inertia for matrices
//! too large for a dense eigensolve.

use std::collections::{BTreeMap, VecDeque};

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Sparse integer matrix stored by columns; each column is sorted by row
/// and holds no explicit zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseIntMatrix {
    nrows: usize,
    ncols: usize,
    cols: Vec<Vec<(usize, i64)>>,
}

impl SparseIntMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        SparseIntMatrix {
            nrows,
            ncols,
            cols: vec![Vec::new(); ncols],
        }
    }

    /// Builds from `(row, col, value)` triplets, summing duplicates.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: impl IntoIterator<Item = (usize, usize, i64)>) -> Self {
        let mut acc: Vec<BTreeMap<usize, i64>> = vec![BTreeMap::new(); ncols];
        for (r, c, v) in triplets {
            assert!(r < nrows && c < ncols, "triplet out of bounds");
            *acc[c].entry(r).or_insert(0) += v;
        }
        let cols = acc
            .into_iter()
            .map(|m| m.into_iter().filter(|&(_, v)| v != 0).collect())
            .collect();
        SparseIntMatrix { nrows, ncols, cols }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(Vec::len).sum()
    }

    pub fn column(&self, c: usize) -> &[(usize, i64)] {
        &self.cols[c]
    }

    pub fn get(&self, r: usize, c: usize) -> i64 {
        self.cols[c]
            .binary_search_by_key(&r, |&(row, _)| row)
            .map(|i| self.cols[c][i].1)
            .unwrap_or(0)
    }

    pub fn transpose(&self) -> SparseIntMatrix {
        let mut cols = vec![Vec::new(); self.nrows];
        for (c, col) in self.cols.iter().enumerate() {
            for &(r, v) in col {
                cols[r].push((c, v));
            }
        }
        SparseIntMatrix {
            nrows: self.ncols,
            ncols: self.nrows,
            cols,
        }
    }

    /// Sparse product `self * rhs`.
    pub fn mul(&self, rhs: &SparseIntMatrix) -> SparseIntMatrix {
        assert_eq!(self.ncols, rhs.nrows, "dimension mismatch");
        let mut cols = Vec::with_capacity(rhs.ncols);
        let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
        for rc in &rhs.cols {
            acc.clear();
            for &(k, b) in rc {
                for &(r, a) in &self.cols[k] {
                    *acc.entry(r).or_insert(0) += a * b;
                }
            }
            cols.push(acc.iter().filter(|(_, &v)| v != 0).map(|(&r, &v)| (r, v)).collect());
        }
        SparseIntMatrix {
            nrows: self.nrows,
            ncols: rhs.ncols,
            cols,
        }
    }

    pub fn add(&self, rhs: &SparseIntMatrix) -> SparseIntMatrix {
        assert_eq!((self.nrows, self.ncols), (rhs.nrows, rhs.ncols), "dimension mismatch");
        let triplets = self
            .cols
            .iter()
            .chain(&rhs.cols)
            .enumerate()
            .flat_map(|(i, col)| col.iter().map(move |&(r, v)| (r, i % self.ncols.max(1), v)));
        SparseIntMatrix::from_triplets(self.nrows, self.ncols, triplets)
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(Vec::is_empty)
    }

    pub fn is_symmetric(&self) -> bool {
        self.nrows == self.ncols && *self == self.transpose()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.nrows, self.ncols);
        for (c, col) in self.cols.iter().enumerate() {
            for &(r, v) in col {
                m[(r, c)] = v as f64;
            }
        }
        m
    }

    /// Largest absolute column sum and largest absolute row sum.
    pub fn max_abs_column_and_row_sums(&self) -> (i64, i64) {
        let col = self.cols.iter().map(|c| c.iter().map(|(_, v)| v.abs()).sum()).max().unwrap_or(0);
        let mut rows = vec![0i64; self.nrows];
        for c in &self.cols {
            for &(r, v) in c {
                rows[r] += v.abs();
            }
        }
        (col, rows.into_iter().max().unwrap_or(0))
    }

    /// `self * x` for a sparse integer vector, exact; `None` on overflow.
    pub(crate) fn apply_sparse(&self, x: &BTreeMap<usize, i128>) -> Option<BTreeMap<usize, i128>> {
        let mut out: BTreeMap<usize, i128> = BTreeMap::new();
        for (&c, &xv) in x {
            for &(r, a) in &self.cols[c] {
                let e = out.entry(r).or_insert(0);
                *e = e.checked_add((a as i128).checked_mul(xv)?)?;
            }
        }
        out.retain(|_, v| *v != 0);
        Some(out)
    }

    /// `self * x` for a sparse float vector.
    pub(crate) fn apply_sparse_f64(&self, x: &BTreeMap<usize, f64>) -> BTreeMap<usize, f64> {
        let mut out: BTreeMap<usize, f64> = BTreeMap::new();
        for (&c, &xv) in x {
            for &(r, a) in &self.cols[c] {
                *out.entry(r).or_insert(0.0) += a as f64 * xv;
            }
        }
        out
    }

    pub(crate) fn apply_dense_f64(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.nrows];
        for (c, col) in self.cols.iter().enumerate() {
            let xc = x[c];
            if xc != 0.0 {
                for &(r, a) in col {
                    y[r] += a as f64 * xc;
                }
            }
        }
        y
    }
}

trait ExactRing: Clone + PartialEq {
    fn is_zero(&self) -> bool;
    fn from_i64(v: i64) -> Self;
    /// `a*x - b*y`, `None` on overflow.
    fn mul_sub(a: &Self, x: &Self, b: &Self, y: &Self) -> Option<Self>;
    fn gcd(&self, other: &Self) -> Self;
    fn div_exact(&self, d: &Self) -> Self;
    fn is_unit(&self) -> bool;
}

impl ExactRing for i64 {
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn from_i64(v: i64) -> Self {
        v
    }
    fn mul_sub(a: &Self, x: &Self, b: &Self, y: &Self) -> Option<Self> {
        a.checked_mul(*x)?.checked_sub(b.checked_mul(*y)?)
    }
    fn gcd(&self, other: &Self) -> Self {
        Integer::gcd(self, other)
    }
    fn div_exact(&self, d: &Self) -> Self {
        self / d
    }
    fn is_unit(&self) -> bool {
        self.abs() == 1
    }
}

impl ExactRing for BigInt {
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
    fn mul_sub(a: &Self, x: &Self, b: &Self, y: &Self) -> Option<Self> {
        Some(a * x - b * y)
    }
    fn gcd(&self, other: &Self) -> Self {
        Integer::gcd(self, other)
    }
    fn div_exact(&self, d: &Self) -> Self {
        self / d
    }
    fn is_unit(&self) -> bool {
        self.abs().is_one()
    }
}

struct Overflow;

fn reduce_columns<T: ExactRing>(m: &SparseIntMatrix) -> std::result::Result<usize, Overflow> {
    let mut pivot_of_row: Vec<Option<usize>> = vec![None; m.nrows];
    let mut reduced: Vec<Vec<(usize, T)>> = Vec::new();
    for col in &m.cols {
        let mut c: Vec<(usize, T)> = col.iter().map(|&(r, v)| (r, T::from_i64(v))).collect();
        loop {
            let Some((low, a)) = c.last().cloned() else { break };
            let Some(j) = pivot_of_row[low] else {
                pivot_of_row[low] = Some(reduced.len());
                reduced.push(c);
                break;
            };
            let pc = &reduced[j];
            let b = pc.last().unwrap().1.clone();
            // c <- (b/g) c - (a/g) pc cancels the entry at `low`
            let g = a.gcd(&b);
            let (ca, cb) = (b.div_exact(&g), a.div_exact(&g));
            let mut next = Vec::with_capacity(c.len() + pc.len());
            let (mut i, mut k) = (0, 0);
            let zero = T::from_i64(0);
            while i < c.len() || k < pc.len() {
                let (r, x, y) = match (c.get(i), pc.get(k)) {
                    (Some(&(ri, ref xi)), Some(&(rk, _))) if ri < rk => {
                        i += 1;
                        (ri, xi.clone(), zero.clone())
                    }
                    (Some(&(ri, _)), Some(&(rk, ref yk))) if rk < ri => {
                        k += 1;
                        (rk, zero.clone(), yk.clone())
                    }
                    (Some(&(ri, ref xi)), Some((_, yk))) => {
                        i += 1;
                        k += 1;
                        (ri, xi.clone(), yk.clone())
                    }
                    (Some(&(ri, ref xi)), None) => {
                        i += 1;
                        (ri, xi.clone(), zero.clone())
                    }
                    (None, Some(&(rk, ref yk))) => {
                        k += 1;
                        (rk, zero.clone(), yk.clone())
                    }
                    (None, None) => unreachable!(),
                };
                let v = T::mul_sub(&ca, &x, &cb, &y).ok_or(Overflow)?;
                if !v.is_zero() {
                    next.push((r, v));
                }
            }
            if let Some(first) = next.first().map(|e| e.1.clone()) {
                let content = next.iter().skip(1).fold(first, |g, (_, v)| g.gcd(v));
                if !content.is_unit() {
                    for e in &mut next {
                        e.1 = e.1.div_exact(&content);
                    }
                }
            }
            c = next;
        }
    }
    Ok(reduced.len())
}

/// Rank over `ℚ` by integer column reduction. Runs in machine integers and
/// restarts with arbitrary precision if an intermediate value overflows.
pub fn exact_rank(m: &SparseIntMatrix) -> usize {
    match reduce_columns::<i64>(m) {
        Ok(r) => r,
        Err(Overflow) => reduce_columns::<BigInt>(m).unwrap_or_else(|_| unreachable!()),
    }
}

/// Characteristic polynomial `det(xI - A)` by the Faddeev–LeVerrier
/// recursion over `ℚ`; coefficients from `x^n` down to the constant term.
pub fn characteristic_polynomial(m: &SparseIntMatrix) -> Vec<BigRational> {
    assert_eq!(m.nrows, m.ncols, "square matrix required");
    let n = m.nrows;
    let a: Vec<Vec<BigRational>> = (0..n)
        .map(|r| (0..n).map(|c| BigRational::from_integer(m.get(r, c).into())).collect())
        .collect();
    let matmul = |x: &Vec<Vec<BigRational>>, y: &Vec<Vec<BigRational>>| -> Vec<Vec<BigRational>> {
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (0..n).fold(BigRational::zero(), |s, k| s + &x[i][k] * &y[k][j]))
                    .collect()
            })
            .collect()
    };
    let mut coeffs = vec![BigRational::one()];
    let mut mk: Vec<Vec<BigRational>> = vec![vec![BigRational::zero(); n]; n];
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I ; c_{n-k} = -tr(A M_k)/k
        let mut next = matmul(&a, &mk);
        let prev = coeffs.last().unwrap().clone();
        for (i, row) in next.iter_mut().enumerate() {
            row[i] += &prev;
        }
        mk = next;
        let am = matmul(&a, &mk);
        let tr = (0..n).fold(BigRational::zero(), |s, i| s + &am[i][i]);
        coeffs.push(-tr / BigRational::from_integer(BigInt::from(k)));
    }
    coeffs
}

/// Eigenvalues of a symmetric integer matrix, increasing.
pub fn symmetric_eigenvalues(m: &SparseIntMatrix) -> Vec<f64> {
    assert_eq!(m.nrows, m.ncols, "square matrix required");
    if m.nrows == 0 {
        return Vec::new();
    }
    let mut ev: Vec<f64> = m.to_dense().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Singular values, decreasing.
pub fn singular_values(m: &SparseIntMatrix) -> Vec<f64> {
    if m.nrows == 0 || m.ncols == 0 {
        return Vec::new();
    }
    let mut sv: Vec<f64> = m.to_dense().singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Reverse Cuthill–McKee ordering of a symmetric sparsity pattern.
fn reverse_cuthill_mckee(m: &SparseIntMatrix) -> Vec<usize> {
    let n = m.ncols;
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|c| m.cols[c].iter().map(|&(r, _)| r).filter(|&r| r != c).collect())
        .collect();
    let deg: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let bfs_last = |start: usize| {
        let mut seen = vec![false; n];
        let mut q = VecDeque::from([start]);
        seen[start] = true;
        let mut last = start;
        while let Some(u) = q.pop_front() {
            last = u;
            for &w in &adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    q.push_back(w);
                }
            }
        }
        last
    };
    let mut by_degree: Vec<usize> = (0..n).collect();
    by_degree.sort_by_key(|&i| (deg[i], i));
    for &seed in &by_degree {
        if visited[seed] {
            continue;
        }
        // two sweeps towards a pseudo-peripheral start
        let start = bfs_last(bfs_last(seed));
        let mut q = VecDeque::from([start]);
        visited[start] = true;
        while let Some(u) = q.pop_front() {
            order.push(u);
            let mut next: Vec<usize> = adj[u].iter().copied().filter(|&w| !visited[w]).collect();
            next.sort_by_key(|&w| (deg[w], w));
            for w in next {
                visited[w] = true;
                q.push_back(w);
            }
        }
    }
    order.reverse();
    order
}

/// Number of eigenvalues of the symmetric matrix `m` strictly below
/// `threshold`, by Sylvester's law of inertia: the count of negative pivots
/// in an `LDLᵀ` factorisation of `m - threshold·I`. The matrix is reordered
/// by reverse Cuthill–McKee and factored in envelope storage.
pub fn count_eigenvalues_below(m: &SparseIntMatrix, threshold: f64) -> Result<usize> {
    assert_eq!(m.nrows, m.ncols, "square matrix required");
    let n = m.ncols;
    if n == 0 {
        return Ok(0);
    }
    let order = reverse_cuthill_mckee(m);
    let mut inv = vec![0; n];
    for (new, &old) in order.iter().enumerate() {
        inv[old] = new;
    }
    // lower-triangular envelope rows: row i stores columns first[i]..=i
    let mut first: Vec<usize> = (0..n).collect();
    for (c, col) in m.cols.iter().enumerate() {
        for &(r, _) in col {
            let (i, j) = (inv[r].max(inv[c]), inv[r].min(inv[c]));
            first[i] = first[i].min(j);
        }
    }
    let mut rows: Vec<Vec<f64>> = (0..n).map(|i| vec![0.0; i - first[i] + 1]).collect();
    for (c, col) in m.cols.iter().enumerate() {
        for &(r, v) in col {
            let (i, j) = (inv[r], inv[c]);
            if j <= i {
                rows[i][j - first[i]] = v as f64;
            }
        }
    }
    let scale = m.cols.iter().flatten().map(|&(_, v)| (v as f64).abs()).fold(threshold.abs(), f64::max).max(1.0);
    let mut d = vec![0.0; n];
    let mut negatives = 0;
    for i in 0..n {
        rows[i][i - first[i]] -= threshold;
        for j in first[i]..i {
            let lo = first[i].max(first[j]);
            let mut s = rows[i][j - first[i]];
            for k in lo..j {
                s -= rows[i][k - first[i]] * d[k] * rows[j][k - first[j]];
            }
            rows[i][j - first[i]] = s / d[j];
        }
        let mut s = rows[i][i - first[i]];
        for k in first[i]..i {
            let l = rows[i][k - first[i]];
            s -= l * l * d[k];
        }
        if !s.is_finite() || s.abs() <= 1e-13 * scale {
            return Err(Error::Numerical(format!(
                "inertia count: pivot {s:e} at row {i} is numerically zero (threshold {threshold})"
            )));
        }
        d[i] = s;
        if s < 0.0 {
            negatives += 1;
        }
    }
    Ok(negatives)
}

/// Rigorous upper bound on the spectral radius: the largest absolute row
/// sum (Gershgorin).
pub fn gershgorin_bound(m: &SparseIntMatrix) -> f64 {
    m.max_abs_column_and_row_sums().1 as f64
}

/// Power-iteration estimate of the spectral radius of a symmetric positive
/// semidefinite matrix (a lower estimate that improves with `iterations`).
pub fn power_iteration_radius(m: &SparseIntMatrix, iterations: usize) -> f64 {
    let n = m.ncols;
    if n == 0 {
        return 0.0;
    }
    let mut x: Vec<f64> = (0..n).map(|i| 1.0 + ((i * 7919) % 101) as f64 / 101.0).collect();
    let mut rayleigh = 0.0;
    for _ in 0..iterations {
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        x.iter_mut().for_each(|v| *v /= norm);
        let y = m.apply_dense_f64(&x);
        rayleigh = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        x = y;
    }
    rayleigh
}
