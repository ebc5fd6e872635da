//! Families of complexes: torus quotients, Linial–Meshulam and random flag
//! complexes, and the small fixture corpus.

use rand::Rng;

use crate::complex::{SimplicialComplex, Vertex};
use crate::error::{Error, Result};
use crate::rng::stream_rng;

/// Quotient of the standard triangulation of `ℝ^d` by `(nℤ)^d` for
/// `d ∈ {1, 2}`: the cycle `C_n`, or the `n × n` torus where each unit square
/// is split along its `(+1, +1)` diagonal. Vertex `(i, j)` has id `i·n + j`.
pub fn torus_tower(d: usize, n: usize) -> Result<SimplicialComplex> {
    if n < 3 {
        return Err(Error::param(format!("torus side length {n} must be at least 3")));
    }
    let n64 = n as Vertex;
    match d {
        1 => SimplicialComplex::closure((0..n64).map(|i| vec![i, (i + 1) % n64])),
        2 => {
            let id = |i: Vertex, j: Vertex| (i % n64) * n64 + (j % n64);
            let mut tris = Vec::with_capacity(2 * n * n);
            for i in 0..n64 {
                for j in 0..n64 {
                    tris.push(vec![id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
                    tris.push(vec![id(i, j), id(i, j + 1), id(i + 1, j + 1)]);
                }
            }
            SimplicialComplex::closure(tris)
        }
        _ => Err(Error::param(format!("torus dimension {d} not supported (use 1 or 2)"))),
    }
}

/// All `k`-element subsets of `0..n` in lexicographic order.
fn subsets(n: usize, k: usize) -> impl Iterator<Item = Vec<Vertex>> {
    let mut cur: Option<Vec<usize>> = (k <= n).then(|| (0..k).collect());
    std::iter::from_fn(move || {
        let out = cur.clone()?;
        let c = cur.as_mut().unwrap();
        match (0..k).rev().find(|&i| c[i] < n - k + i) {
            Some(i) => {
                c[i] += 1;
                for j in i + 1..k {
                    c[j] = c[j - 1] + 1;
                }
            }
            None => cur = None,
        }
        Some(out.into_iter().map(|v| v as Vertex).collect())
    })
}

fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::param(format!("probability {p} not in [0, 1]")))
    }
}

/// `Y_d(n, p)`: the full `(d−1)`-skeleton of the simplex on `n` vertices
/// with each `d`-face added independently with probability `p`. Faces are
/// decided in lexicographic order from stream 0 of `seed`.
pub fn linial_meshulam(d: usize, n: usize, p: f64, seed: u64) -> Result<SimplicialComplex> {
    check_probability(p)?;
    if d == 0 || n < d + 1 {
        return Err(Error::param(format!("Linial–Meshulam needs d ≥ 1 and n ≥ d+1 (got d={d}, n={n})")));
    }
    let mut rng = stream_rng(seed, 0);
    let mut faces: Vec<Vec<Vertex>> = subsets(n, d).collect();
    faces.extend(subsets(n, d + 1).filter(|_| rng.random::<f64>() < p));
    SimplicialComplex::closure(faces)
}

/// `X(n, p)`: the clique complex of `G(n, p)` up to dimension `max_dim`.
/// Edges are decided in lexicographic order from stream 0 of `seed`.
pub fn random_flag(n: usize, p: f64, max_dim: usize, seed: u64) -> Result<SimplicialComplex> {
    check_probability(p)?;
    if max_dim == 0 {
        return Err(Error::param("flag complex dimension must be at least 1"));
    }
    if n == 0 {
        return Err(Error::Empty);
    }
    let mut rng = stream_rng(seed, 0);
    let mut adj = vec![vec![false; n]; n];
    for e in subsets(n, 2) {
        if rng.random::<f64>() < p {
            let (a, b) = (e[0] as usize, e[1] as usize);
            adj[a][b] = true;
            adj[b][a] = true;
        }
    }
    let mut cliques: Vec<Vec<Vertex>> = Vec::new();
    // extend each clique only by larger vertices so every clique is listed once
    let mut stack: Vec<Vec<usize>> = (0..n).map(|v| vec![v]).collect();
    while let Some(c) = stack.pop() {
        if c.len() <= max_dim {
            let last = *c.last().unwrap();
            for w in last + 1..n {
                if c.iter().all(|&u| adj[u][w]) {
                    let mut next = c.clone();
                    next.push(w);
                    stack.push(next);
                }
            }
        }
        cliques.push(c.into_iter().map(|v| v as Vertex).collect());
    }
    SimplicialComplex::closure(cliques)
}

/// Names accepted by [`fixture`].
pub const FIXTURE_NAMES: &[&str] = &[
    "single_vertex",
    "edge",
    "path3",
    "path5",
    "hollow_triangle",
    "filled_triangle",
    "c4",
    "c5",
    "c6",
    "star5",
    "octahedron",
    "tetrahedron_boundary",
    "simplex3",
    "torus4",
    "torus5",
    "two_triangles",
    "bowtie",
    "rp2",
];

fn from_lists(lists: &[&[Vertex]]) -> SimplicialComplex {
    SimplicialComplex::closure(lists.iter().map(|s| s.to_vec())).expect("fixture lists are valid")
}

fn cycle(n: Vertex) -> SimplicialComplex {
    SimplicialComplex::closure((0..n).map(|i| vec![i, (i + 1) % n])).expect("valid cycle")
}

/// A named complex from the fixture corpus.
pub fn fixture(name: &str) -> Result<SimplicialComplex> {
    Ok(match name {
        "single_vertex" => from_lists(&[&[0]]),
        "edge" => from_lists(&[&[0, 1]]),
        "path3" => from_lists(&[&[0, 1], &[1, 2]]),
        "path5" => from_lists(&[&[0, 1], &[1, 2], &[2, 3], &[3, 4]]),
        "hollow_triangle" => from_lists(&[&[0, 1], &[1, 2], &[0, 2]]),
        "filled_triangle" => from_lists(&[&[0, 1, 2]]),
        "c4" => cycle(4),
        "c5" => cycle(5),
        "c6" => cycle(6),
        "star5" => from_lists(&[&[0, 1], &[0, 2], &[0, 3], &[0, 4], &[0, 5]]),
        // antipodal pairs {0,1}, {2,3}, {4,5}
        "octahedron" => from_lists(&[
            &[0, 2, 4],
            &[0, 2, 5],
            &[0, 3, 4],
            &[0, 3, 5],
            &[1, 2, 4],
            &[1, 2, 5],
            &[1, 3, 4],
            &[1, 3, 5],
        ]),
        "tetrahedron_boundary" => from_lists(&[&[0, 1, 2], &[0, 1, 3], &[0, 2, 3], &[1, 2, 3]]),
        "simplex3" => from_lists(&[&[0, 1, 2, 3]]),
        "torus4" => torus_tower(2, 4)?,
        "torus5" => torus_tower(2, 5)?,
        "two_triangles" => from_lists(&[&[0, 1], &[1, 2], &[0, 2], &[3, 4], &[4, 5], &[3, 5]]),
        "bowtie" => from_lists(&[&[0, 1, 2], &[0, 3, 4]]),
        // six-vertex real projective plane
        "rp2" => from_lists(&[
            &[0, 1, 2],
            &[0, 2, 3],
            &[0, 3, 4],
            &[0, 4, 5],
            &[0, 1, 5],
            &[1, 2, 4],
            &[2, 3, 5],
            &[1, 3, 4],
            &[2, 4, 5],
            &[1, 3, 5],
        ]),
        _ => return Err(Error::param(format!("unknown fixture {name:?}; known: {}", FIXTURE_NAMES.join(", ")))),
    })
}

/// The whole fixture corpus.
pub fn fixtures() -> Vec<(&'static str, SimplicialComplex)> {
    FIXTURE_NAMES
        .iter()
        .map(|&n| (n, fixture(n).expect("every listed fixture builds")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::betti_numbers;

    #[test]
    fn torus_counts_and_degrees() {
        let t = torus_tower(2, 4).unwrap();
        assert_eq!((t.count(0), t.count(1), t.count(2)), (16, 48, 32));
        assert!(t.vertices().iter().all(|&v| t.degree(v) == 6));
        assert_eq!(betti_numbers(&t), vec![1, 2, 1]);
        assert_eq!(torus_tower(1, 5).unwrap(), fixture("c5").unwrap());
        assert!(torus_tower(2, 2).is_err());
    }

    #[test]
    fn subsets_enumerate_binomials() {
        assert_eq!(subsets(5, 2).count(), 10);
        assert_eq!(subsets(6, 3).count(), 20);
        assert_eq!(subsets(2, 3).count(), 0);
        assert_eq!(subsets(3, 2).collect::<Vec<_>>(), vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
    }

    #[test]
    fn linial_meshulam_extremes() {
        assert_eq!(linial_meshulam(2, 3, 1.0, 1).unwrap(), fixture("filled_triangle").unwrap());
        let k5 = linial_meshulam(2, 5, 0.0, 1).unwrap();
        assert_eq!((k5.count(1), k5.count(2)), (10, 0));
        assert_eq!(linial_meshulam(2, 5, 0.5, 7).unwrap(), linial_meshulam(2, 5, 0.5, 7).unwrap());
        assert!(linial_meshulam(2, 5, 1.5, 7).is_err());
    }

    #[test]
    fn flag_extremes_and_flag_property() {
        assert_eq!(random_flag(4, 1.0, 3, 0).unwrap(), fixture("simplex3").unwrap());
        let empty = random_flag(6, 0.0, 2, 0).unwrap();
        assert_eq!((empty.count(0), empty.count(1)), (6, 0));
        let x = random_flag(12, 0.5, 2, 3).unwrap();
        for t in subsets(12, 3) {
            let edges = [[t[0], t[1]], [t[0], t[2]], [t[1], t[2]]];
            let all = edges.iter().all(|e| x.neighbors(e[0]).any(|w| w == e[1]));
            let tri = crate::complex::Simplex::new(t.clone()).unwrap();
            assert_eq!(all, x.contains(&tri));
        }
    }

    #[test]
    fn fixture_corpus() {
        let oct = fixture("octahedron").unwrap();
        assert_eq!((oct.count(0), oct.count(1), oct.count(2)), (6, 12, 8));
        let star = fixture("star5").unwrap();
        assert_eq!((star.count(0), star.count(1)), (6, 5));
        let rp2 = fixture("rp2").unwrap();
        assert_eq!((rp2.count(0), rp2.count(1), rp2.count(2)), (6, 15, 10));
        assert_eq!(betti_numbers(&rp2), vec![1, 0, 0]);
        for (name, k) in fixtures() {
            assert!(k.is_downward_closed(), "{name}");
        }
        assert!(fixture("nope").is_err());
    }
}
