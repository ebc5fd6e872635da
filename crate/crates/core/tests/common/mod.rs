#![allow(dead_code)]

use std::collections::BTreeSet;

use l2limits::generators::{fixtures, linial_meshulam, random_flag, torus_tower};
use l2limits::{RootedComplex, SimplicialComplex, Vertex};
use num_bigint::BigUint;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// A complex on `0..n` spanned by `m` random simplices of dimension at most
/// `max_dim`, together with every vertex.
pub fn random_complex(rng: &mut ChaCha8Rng, n: usize, m: usize, max_dim: usize) -> SimplicialComplex {
    let mut lists: Vec<Vec<Vertex>> = (0..n as Vertex).map(|v| vec![v]).collect();
    for _ in 0..m {
        let size = rng.random_range(2..=(max_dim + 1).min(n).max(2)).min(n);
        let mut s = BTreeSet::new();
        while s.len() < size {
            s.insert(rng.random_range(0..n as Vertex));
        }
        lists.push(s.into_iter().collect());
    }
    SimplicialComplex::closure(lists).unwrap()
}

/// Draws random complexes until a connected one appears.
pub fn random_connected(rng: &mut ChaCha8Rng, n: usize, max_dim: usize) -> SimplicialComplex {
    loop {
        let m = rng.random_range(n.saturating_sub(1).max(1)..=2 * n);
        let k = random_complex(rng, n, m, max_dim);
        if k.is_connected() {
            return k;
        }
    }
}

/// Fixtures plus generated Linial–Meshulam, flag and torus samples.
pub fn test_corpus() -> Vec<(String, SimplicialComplex)> {
    let mut out: Vec<(String, SimplicialComplex)> =
        fixtures().into_iter().map(|(n, k)| (n.to_string(), k)).collect();
    for (n, p, seed) in [(6, 0.5, 1), (8, 0.3, 2), (10, 0.2, 3), (12, 0.1, 4)] {
        out.push((format!("Y2({n},{p})#{seed}"), linial_meshulam(2, n, p, seed).unwrap()));
    }
    for (n, p, seed) in [(8, 0.5, 5), (10, 0.4, 6), (12, 0.35, 7), (12, 0.6, 8)] {
        out.push((format!("X({n},{p})#{seed}"), random_flag(n, p, 3, seed).unwrap()));
    }
    for n in [3, 6] {
        out.push((format!("torus2d({n})"), torus_tower(2, n).unwrap()));
    }
    out.push(("torus1d(7)".into(), torus_tower(1, 7).unwrap()));
    out
}

/// Bit positions of the 0/1 sequence of a complex labelled by `label`
/// (old vertex to new label), sorted increasingly.
pub fn bits_under(k: &SimplicialComplex, label: &dyn Fn(Vertex) -> u64) -> Vec<BigUint> {
    let mut bits: Vec<BigUint> = k
        .all_simplices()
        .map(|s| {
            let mut m = BigUint::from(0u32);
            for &v in s.vertices() {
                m.set_bit(label(v), true);
            }
            m - 1u32
        })
        .collect();
    bits.sort();
    bits
}

/// Order of 0/1 sequences given by their sorted 1-positions: at the first
/// difference the sequence with the 1 is smaller, so a strict prefix is larger.
pub fn seq_less(a: &[BigUint], b: &[BigUint]) -> bool {
    for (x, y) in a.iter().zip(b) {
        if x != y {
            return x < y;
        }
    }
    a.len() > b.len()
}

/// Minimal sequence over every relabelling that fixes the root at 0.
pub fn brute_force_minimum(rc: &RootedComplex) -> Vec<BigUint> {
    let k = rc.complex();
    let others: Vec<Vertex> = k.vertices().iter().copied().filter(|&v| v != rc.root()).collect();
    let mut best: Option<Vec<BigUint>> = None;
    let mut perm: Vec<usize> = (0..others.len()).collect();
    loop {
        let label = |v: Vertex| -> u64 {
            if v == rc.root() {
                0
            } else {
                let i = others.iter().position(|&o| o == v).unwrap();
                perm[i] as u64 + 1
            }
        };
        let bits = bits_under(k, &label);
        if best.as_ref().is_none_or(|b| seq_less(&bits, b)) {
            best = Some(bits);
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    best.unwrap()
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).unwrap();
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Exact diagonal sums of `Δ^r` over the simplices at `root`, using a dense
/// integer matrix of the whole complex.
pub fn dense_local_moments(k: &SimplicialComplex, root: Vertex, p: usize, max_order: usize) -> Vec<i128> {
    let lap = l2limits::spectral::laplacian(k, p).matrix;
    let n = lap.nrows();
    let a: Vec<Vec<i128>> = (0..n).map(|r| (0..n).map(|c| lap.get(r, c) as i128).collect()).collect();
    let at: Vec<usize> = k
        .simplices(p)
        .iter()
        .enumerate()
        .filter(|(_, s)| s.contains(root))
        .map(|(i, _)| i)
        .collect();
    let mut out = vec![0i128; max_order + 1];
    for &i in &at {
        let mut row: Vec<i128> = (0..n).map(|j| (i == j) as i128).collect();
        for slot in out.iter_mut() {
            *slot += row[i];
            row = (0..n).map(|j| (0..n).map(|l| row[l] * a[l][j]).sum()).collect();
        }
    }
    out
}
