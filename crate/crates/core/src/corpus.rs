//! Deterministic instance generators and the brute-force census oracle used
//! by the property tests. The oracle works straight from an edge list with
//! its own adjacency sets and shares no code with the incremental graph.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::Rat;

/// A reproducible instance family: the same spec always yields the same
/// edge list.
#[derive(Debug, Clone, PartialEq)]
pub enum GeneratorSpec {
    /// Disjoint cliques on consecutive id ranges.
    UnionOfCliques { sizes: Vec<usize> },
    /// Complete tripartite graph with three parts of the given size.
    CompleteTripartite { part: usize },
    /// `m` vertices split into blocks of `d/3` arranged in a cycle; every
    /// vertex is adjacent to its own block and both neighboring blocks.
    /// Requires `3 | d`, `(d/3) | m`, and `m > 4d/3`. Vertices are numbered
    /// block-major so block `k` is the id range `[k*d/3, (k+1)*d/3)`.
    Bracelet { m: usize, d: usize },
    /// A clique on the smallest `q` with `q^3 >= n`, disjoint from a random
    /// `degree`-regular-style graph on the remaining vertices.
    CliquePlusSparse { n: usize, degree: usize, seed: u64 },
    /// One clique over blocks `A_1..A_m` of size `m` each, plus `m` extra
    /// vertices `b_k`, each adjacent to all of `A_k`.
    BlocksPlusB { m: usize },
    /// `ceil(n/3)` disjoint triangles with a random bounded-degree overlay.
    TrianglesPlusExpander { n: usize, degree: usize, seed: u64 },
    /// G(n, p) with a seeded generator.
    ErdosRenyi { n: usize, p: f64, seed: u64 },
}

impl GeneratorSpec {
    /// Short stable name for reports and file headers.
    pub fn kind_name(&self) -> &'static str {
        match self {
            GeneratorSpec::UnionOfCliques { .. } => "union_of_cliques",
            GeneratorSpec::CompleteTripartite { .. } => "complete_tripartite",
            GeneratorSpec::Bracelet { .. } => "bracelet",
            GeneratorSpec::CliquePlusSparse { .. } => "clique_plus_sparse",
            GeneratorSpec::BlocksPlusB { .. } => "blocks_plus_b",
            GeneratorSpec::TrianglesPlusExpander { .. } => "triangles_plus_expander",
            GeneratorSpec::ErdosRenyi { .. } => "erdos_renyi",
        }
    }

    pub fn generate(&self) -> Result<Vec<(u32, u32)>> {
        match self {
            GeneratorSpec::UnionOfCliques { sizes } => {
                if sizes.is_empty() || sizes.iter().any(|&s| s < 2) {
                    return Err(Error::input("clique sizes must all be at least 2"));
                }
                let mut edges = Vec::new();
                let mut base = 0u32;
                for &s in sizes {
                    push_clique(&mut edges, base, s as u32);
                    base += s as u32;
                }
                Ok(edges)
            }
            GeneratorSpec::CompleteTripartite { part } => {
                let n = *part as u32;
                if n == 0 {
                    return Err(Error::input("tripartite part size must be positive"));
                }
                let mut edges = Vec::new();
                let parts = [(0, n), (n, 2 * n), (2 * n, 3 * n)];
                for a in 0..3 {
                    for b in a + 1..3 {
                        for u in parts[a].0..parts[a].1 {
                            for v in parts[b].0..parts[b].1 {
                                edges.push((u, v));
                            }
                        }
                    }
                }
                Ok(edges)
            }
            GeneratorSpec::Bracelet { m, d } => {
                let (m, d) = (*m, *d);
                if d == 0 || d % 3 != 0 {
                    return Err(Error::input("bracelet degree must be a positive multiple of 3"));
                }
                let block = d / 3;
                if m % block != 0 {
                    return Err(Error::input("bracelet block size d/3 must divide m"));
                }
                if 3 * m <= 4 * d {
                    return Err(Error::input("bracelet requires m > 4d/3"));
                }
                let blocks = m / block;
                let mut edges = Vec::new();
                let id = |k: usize, off: usize| (k * block + off) as u32;
                for k in 0..blocks {
                    // within-block clique
                    for a in 0..block {
                        for b in a + 1..block {
                            edges.push((id(k, a), id(k, b)));
                        }
                    }
                    // full join to the next block (covers k-1 via the previous k)
                    let next = (k + 1) % blocks;
                    for a in 0..block {
                        for b in 0..block {
                            edges.push((id(k, a), id(next, b)));
                        }
                    }
                }
                Ok(edges)
            }
            GeneratorSpec::CliquePlusSparse { n, degree, seed } => {
                let n = *n;
                let q = cube_root_ceil(n);
                if q < 2 || q >= n {
                    return Err(Error::input("clique_plus_sparse needs n with 2 <= ceil(n^(1/3)) < n"));
                }
                let mut edges = Vec::new();
                push_clique(&mut edges, 0, q as u32);
                let rest: Vec<u32> = (q as u32..n as u32).collect();
                edges.extend(random_regular(&rest, *degree, *seed));
                Ok(edges)
            }
            GeneratorSpec::BlocksPlusB { m } => {
                let m = *m;
                if m < 2 {
                    return Err(Error::input("blocks_plus_b requires m >= 2"));
                }
                // ids [0, m^2) form the clique, block A_k = [k*m, (k+1)*m);
                // ids [m^2, m^2 + m) are the b_k vertices.
                let mut edges = Vec::new();
                push_clique(&mut edges, 0, (m * m) as u32);
                for k in 0..m {
                    let b = (m * m + k) as u32;
                    for v in 0..m {
                        edges.push((b, (k * m + v) as u32));
                    }
                }
                Ok(edges)
            }
            GeneratorSpec::TrianglesPlusExpander { n, degree, seed } => {
                if *n < 3 {
                    return Err(Error::input("triangles_plus_expander requires n >= 3"));
                }
                let groups = n.div_ceil(3);
                let nn = 3 * groups;
                let mut edges = Vec::new();
                for g in 0..groups as u32 {
                    edges.push((3 * g, 3 * g + 1));
                    edges.push((3 * g + 1, 3 * g + 2));
                    edges.push((3 * g, 3 * g + 2));
                }
                let all: Vec<u32> = (0..nn as u32).collect();
                edges.extend(random_regular(&all, *degree, *seed));
                Ok(edges)
            }
            GeneratorSpec::ErdosRenyi { n, p, seed } => {
                if !(0.0..=1.0).contains(p) {
                    return Err(Error::input("edge probability must lie in [0,1]"));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let mut edges = Vec::new();
                for i in 0..*n as u32 {
                    for j in i + 1..*n as u32 {
                        if rng.gen::<f64>() < *p {
                            edges.push((i, j));
                        }
                    }
                }
                Ok(edges)
            }
        }
    }
}

fn push_clique(edges: &mut Vec<(u32, u32)>, base: u32, size: u32) {
    for a in 0..size {
        for b in a + 1..size {
            edges.push((base + a, base + b));
        }
    }
}

/// Smallest q with q^3 >= n.
pub fn cube_root_ceil(n: usize) -> usize {
    let mut q = 1;
    while q * q * q < n {
        q += 1;
    }
    q
}

/// Random near-regular graph by stub pairing (configuration model),
/// simplified: self-loops and duplicates are dropped.
fn random_regular(ids: &[u32], degree: usize, seed: u64) -> Vec<(u32, u32)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stubs: Vec<u32> = ids
        .iter()
        .flat_map(|&v| std::iter::repeat(v).take(degree))
        .collect();
    stubs.shuffle(&mut rng);
    let mut seen = BTreeSet::new();
    let mut edges = Vec::new();
    for pair in stubs.chunks_exact(2) {
        let (a, b) = (pair[0], pair[1]);
        if a != b && seen.insert((a.min(b), a.max(b))) {
            edges.push((a.min(b), a.max(b)));
        }
    }
    edges
}

/// Everything the brute-force oracle knows about a graph.
#[derive(Debug, Clone)]
pub struct OracleCensus {
    pub n: usize,
    pub m: usize,
    pub triangles: u64,
    pub wedges: u64,
    /// `(i, j) -> t_e` over normalized present edges.
    pub per_edge_triangles: BTreeMap<(u32, u32), u64>,
    /// `(i, j) -> J_e` computed from explicit neighborhood sets.
    pub per_edge_jaccard: BTreeMap<(u32, u32), Rat>,
}

impl OracleCensus {
    pub fn triangle_density(&self) -> Rat {
        if self.wedges == 0 {
            Rat::new(0, 1)
        } else {
            Rat::new(3 * self.triangles, self.wedges)
        }
    }
}

/// Brute-force census from a raw edge list. Duplicates and self-loops are
/// normalized away with the same conventions the graph builder documents,
/// but by an independent code path: explicit neighbor sets, explicit
/// intersections and unions.
pub fn oracle_census(edges: &[(u32, u32)]) -> OracleCensus {
    let mut adj: BTreeMap<u32, BTreeSet<u32>> = BTreeMap::new();
    for &(a, b) in edges {
        if a == b {
            adj.entry(a).or_default();
            continue;
        }
        adj.entry(a).or_default().insert(b);
        adj.entry(b).or_default().insert(a);
    }
    let empty = BTreeSet::new();
    let nbrs = |v: u32| adj.get(&v).unwrap_or(&empty);

    let mut per_edge_triangles = BTreeMap::new();
    let mut per_edge_jaccard = BTreeMap::new();
    let mut tri3 = 0u64;
    let mut m = 0usize;
    for (&i, ni) in &adj {
        for &j in ni.iter().filter(|&&j| j > i) {
            m += 1;
            let nj = nbrs(j);
            let common: BTreeSet<u32> = ni.intersection(nj).copied().collect();
            let t = common.len() as u64;
            tri3 += t;
            let mut union: BTreeSet<u32> = ni.union(nj).copied().collect();
            union.remove(&i);
            union.remove(&j);
            let jac = if union.is_empty() {
                Rat::new(0, 1)
            } else {
                Rat::new(t, union.len() as u64)
            };
            per_edge_triangles.insert((i, j), t);
            per_edge_jaccard.insert((i, j), jac);
        }
    }
    let wedges: u64 = adj
        .values()
        .map(|s| {
            let d = s.len() as u64;
            d * d.saturating_sub(1) / 2
        })
        .sum();
    OracleCensus {
        n: adj.len(),
        m,
        triangles: tri3 / 3,
        wedges,
        per_edge_triangles,
        per_edge_jaccard,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    #[test]
    fn oracle_on_triangle_and_k6() {
        let tri = oracle_census(&[(0, 1), (1, 2), (0, 2)]);
        assert_eq!(tri.triangles, 1);

        let k6 = GeneratorSpec::UnionOfCliques { sizes: vec![6] }
            .generate()
            .unwrap();
        let c = oracle_census(&k6);
        assert_eq!((c.triangles, c.wedges), (20, 60));
        assert_eq!(c.triangle_density(), Rat::new(1, 1));
    }

    #[test]
    fn oracle_agrees_with_incremental_on_random_graph() {
        let edges = GeneratorSpec::ErdosRenyi {
            n: 50,
            p: 0.3,
            seed: 7,
        }
        .generate()
        .unwrap();
        let oracle = oracle_census(&edges);
        let g = Graph::build(&edges).unwrap();
        let c = g.census();
        assert_eq!(c.triangles, oracle.triangles);
        assert_eq!(c.wedges, oracle.wedges);
        for (&(i, j), &t) in &oracle.per_edge_triangles {
            assert_eq!(g.edge_triangles(i.into(), j.into()).unwrap(), t);
        }
    }

    #[test]
    fn bracelet_shape() {
        let edges = GeneratorSpec::Bracelet { m: 30, d: 15 }.generate().unwrap();
        let g = Graph::build(&edges).unwrap();
        assert_eq!(g.vertex_count(), 30);
        // construction yields degree d-1 everywhere
        for v in g.vertices() {
            assert_eq!(g.degree(v), 14);
        }
        // same-block edges close fully; cross-block edges have J = (2d/3-2)/(4d/3-2)
        let c = oracle_census(&edges);
        let cross = Rat::new(8, 18);
        for (&(i, j), jac) in &c.per_edge_jaccard {
            if i / 5 == j / 5 {
                assert_eq!(*jac, Rat::new(1, 1));
            } else {
                assert_eq!(*jac, cross);
            }
        }
        assert!(GeneratorSpec::Bracelet { m: 20, d: 15 }.generate().is_err());
        assert!(GeneratorSpec::Bracelet { m: 30, d: 14 }.generate().is_err());
    }

    #[test]
    fn tripartite_census() {
        let edges = GeneratorSpec::CompleteTripartite { part: 4 }.generate().unwrap();
        let c = oracle_census(&edges);
        assert_eq!((c.triangles, c.wedges), (64, 336));
        assert_eq!(c.triangle_density(), Rat::new(4, 7));
    }

    #[test]
    fn union_of_cliques_density_one() {
        let edges = GeneratorSpec::UnionOfCliques {
            sizes: vec![3, 3, 3],
        }
        .generate()
        .unwrap();
        assert_eq!(oracle_census(&edges).triangle_density(), Rat::new(1, 1));
    }

    #[test]
    fn generators_are_deterministic_and_simple() {
        let specs = [
            GeneratorSpec::CliquePlusSparse { n: 64, degree: 3, seed: 11 },
            GeneratorSpec::TrianglesPlusExpander { n: 30, degree: 3, seed: 5 },
            GeneratorSpec::ErdosRenyi { n: 40, p: 0.2, seed: 3 },
            GeneratorSpec::BlocksPlusB { m: 4 },
        ];
        for spec in specs {
            let a = spec.generate().unwrap();
            let b = spec.generate().unwrap();
            assert_eq!(a, b, "{} not deterministic", spec.kind_name());
            let mut seen = BTreeSet::new();
            for &(x, y) in &a {
                assert_ne!(x, y);
                assert!(seen.insert((x.min(y), x.max(y))), "duplicate in {}", spec.kind_name());
            }
        }
    }

    #[test]
    fn clique_plus_sparse_sizes() {
        assert_eq!(cube_root_ceil(64), 4);
        assert_eq!(cube_root_ceil(216), 6);
        assert_eq!(cube_root_ceil(512), 8);
        assert_eq!(cube_root_ceil(100), 5);
    }
}
