//! Mutable undirected simple graph with incremental bookkeeping: constant-time
//! degree lookups, maximum-degree tracking via degree buckets, and a per-edge
//! triangle counter maintained under edge deletion.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};
use crate::Rat;

/// Dense non-negative vertex index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub u32);

impl VertexId {
    #[inline]
    pub fn idx(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u32> for VertexId {
    fn from(v: u32) -> Self {
        VertexId(v)
    }
}

/// Unordered edge key; `new` normalizes so `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeKey {
    lo: VertexId,
    hi: VertexId,
}

impl EdgeKey {
    pub fn new(a: VertexId, b: VertexId) -> Self {
        debug_assert_ne!(a, b, "self-loops are not edges");
        if a < b {
            EdgeKey { lo: a, hi: b }
        } else {
            EdgeKey { lo: b, hi: a }
        }
    }

    pub fn endpoints(self) -> (VertexId, VertexId) {
        (self.lo, self.hi)
    }
}

impl fmt::Display for EdgeKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.lo, self.hi)
    }
}

/// Global triangle and wedge counts of a graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriangleWedgeCensus {
    pub triangles: u64,
    pub wedges: u64,
}

impl TriangleWedgeCensus {
    /// 3t/w, the fraction of wedges closed into triangles; 0 when there are
    /// no wedges.
    pub fn triangle_density(&self) -> Rat {
        if self.wedges == 0 {
            Rat::new(0, 1)
        } else {
            Rat::new(3 * self.triangles, self.wedges)
        }
    }
}

/// Mutable undirected simple graph.
///
/// Maintains, under edge deletion:
/// - neighbor sets `N(i)` (ordered, so scans are deterministic),
/// - exact degrees plus an inverse degree-bucket index,
/// - the maximum degree over non-isolated vertices,
/// - the number of triangles through every present edge.
///
/// Single-writer: mutation requires `&mut`, read-only queries may be shared.
/// All structure operations bump an internal counter so that asymptotic cost
/// contracts can be checked by counting rather than timing.
pub struct Graph {
    adj: Vec<BTreeSet<VertexId>>,
    present: Vec<bool>,
    degree_buckets: Vec<BTreeSet<VertexId>>,
    d_max: usize,
    triangles_per_edge: HashMap<EdgeKey, u64>,
    n_present: usize,
    m: usize,
    ops: AtomicU64,
}

impl Clone for Graph {
    fn clone(&self) -> Self {
        Graph {
            adj: self.adj.clone(),
            present: self.present.clone(),
            degree_buckets: self.degree_buckets.clone(),
            d_max: self.d_max,
            triangles_per_edge: self.triangles_per_edge.clone(),
            n_present: self.n_present,
            m: self.m,
            ops: AtomicU64::new(0),
        }
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n_present)
            .field("m", &self.m)
            .field("d_max", &self.d_max)
            .finish()
    }
}

impl Graph {
    /// Builds a graph from an edge list. Duplicate edges are collapsed and
    /// self-loops dropped; a vertex mentioned only in a self-loop is kept as
    /// an isolated vertex. Triangle counters are populated in one pass over
    /// the deduplicated edges.
    pub fn build(edges: &[(u32, u32)]) -> Result<Graph> {
        let n = edges
            .iter()
            .map(|&(a, b)| a.max(b) as usize + 1)
            .max()
            .unwrap_or(0);
        let mut g = Graph {
            adj: vec![BTreeSet::new(); n],
            present: vec![false; n],
            degree_buckets: vec![BTreeSet::new(); n.max(1)],
            d_max: 0,
            triangles_per_edge: HashMap::new(),
            n_present: 0,
            m: 0,
            ops: AtomicU64::new(0),
        };
        for &(a, b) in edges {
            let (a, b) = (VertexId(a), VertexId(b));
            g.mark_present(a);
            g.mark_present(b);
            if a == b {
                continue;
            }
            g.bump(1);
            if g.adj[a.idx()].insert(b) {
                g.adj[b.idx()].insert(a);
                g.m += 1;
            }
        }
        g.rebuild_degree_index();
        g.populate_triangles();
        Ok(g)
    }

    /// Like `build`, but the vertex universe is `[0, n)` even for ids that
    /// appear in no edge.
    pub fn build_with_universe(n: u32, edges: &[(u32, u32)]) -> Result<Graph> {
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::input(format!(
                    "edge ({a},{b}) outside vertex universe [0,{n})"
                )));
            }
        }
        let mut g = Graph::build(edges)?;
        let n = n as usize;
        if g.adj.len() < n {
            g.adj.resize(n, BTreeSet::new());
            g.present.resize(n, false);
        }
        if g.degree_buckets.is_empty() {
            g.degree_buckets.push(BTreeSet::new());
        }
        for id in 0..n {
            if !g.present[id] {
                g.present[id] = true;
                g.n_present += 1;
                g.degree_buckets[0].insert(VertexId(id as u32));
            }
        }
        Ok(g)
    }

    fn mark_present(&mut self, v: VertexId) {
        if !self.present[v.idx()] {
            self.present[v.idx()] = true;
            self.n_present += 1;
        }
    }

    fn rebuild_degree_index(&mut self) {
        for bucket in &mut self.degree_buckets {
            bucket.clear();
        }
        self.d_max = 0;
        for id in 0..self.adj.len() {
            if !self.present[id] {
                continue;
            }
            let d = self.adj[id].len();
            self.bump(1);
            self.degree_buckets[d].insert(VertexId(id as u32));
            if d > self.d_max {
                self.d_max = d;
            }
        }
    }

    fn populate_triangles(&mut self) {
        self.triangles_per_edge.clear();
        for id in 0..self.adj.len() {
            let i = VertexId(id as u32);
            for &j in self.adj[id].iter() {
                if j <= i {
                    continue;
                }
                let t = self.count_common(i, j);
                self.bump(1);
                self.triangles_per_edge.insert(EdgeKey::new(i, j), t);
            }
        }
    }

    fn count_common(&self, i: VertexId, j: VertexId) -> u64 {
        let (small, large) = if self.adj[i.idx()].len() <= self.adj[j.idx()].len() {
            (&self.adj[i.idx()], &self.adj[j.idx()])
        } else {
            (&self.adj[j.idx()], &self.adj[i.idx()])
        };
        let mut t = 0;
        for &k in small {
            self.bump(1);
            if large.contains(&k) {
                t += 1;
            }
        }
        t
    }

    #[inline]
    fn bump(&self, n: u64) {
        self.ops.fetch_add(n, Ordering::Relaxed);
    }

    /// Elementary structure operations performed so far.
    pub fn ops(&self) -> u64 {
        self.ops.load(Ordering::Relaxed)
    }

    pub fn reset_ops(&self) {
        self.ops.store(0, Ordering::Relaxed);
    }

    pub fn add_ops(&self, n: u64) {
        self.bump(n);
    }

    /// Number of present vertices.
    pub fn vertex_count(&self) -> usize {
        self.n_present
    }

    /// Number of present edges.
    pub fn edge_count(&self) -> usize {
        self.m
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        v.idx() < self.present.len() && self.present[v.idx()]
    }

    pub fn has_edge(&self, i: VertexId, j: VertexId) -> bool {
        self.contains_vertex(i) && self.adj[i.idx()].contains(&j)
    }

    /// Present vertices in ascending id order.
    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.present
            .iter()
            .enumerate()
            .filter(|(_, &p)| p)
            .map(|(id, _)| VertexId(id as u32))
    }

    /// Neighbors of `i` in ascending id order.
    pub fn neighbors(&self, i: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.adj[i.idx()].iter().copied()
    }

    pub fn neighbor_set(&self, i: VertexId) -> &BTreeSet<VertexId> {
        &self.adj[i.idx()]
    }

    pub fn degree(&self, i: VertexId) -> usize {
        if self.contains_vertex(i) {
            self.adj[i.idx()].len()
        } else {
            0
        }
    }

    /// Present edges `(i, j)` with `i < j`, ascending.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        (0..self.adj.len()).flat_map(move |id| {
            let i = VertexId(id as u32);
            self.adj[id]
                .iter()
                .copied()
                .filter(move |&j| j > i)
                .map(move |j| (i, j))
        })
    }

    /// Sorted edge list as raw id pairs.
    pub fn edge_list(&self) -> Vec<(u32, u32)> {
        self.edges().map(|(i, j)| (i.0, j.0)).collect()
    }

    /// Number of triangles through a present edge.
    pub fn edge_triangles(&self, i: VertexId, j: VertexId) -> Result<u64> {
        if !self.has_edge(i, j) {
            return Err(Error::contract(format!("edge ({i},{j}) not present")));
        }
        self.bump(1);
        Ok(self.triangles_per_edge[&EdgeKey::new(i, j)])
    }

    /// Current maximum degree over non-isolated vertices (0 when edgeless).
    pub fn max_degree(&self) -> usize {
        self.d_max
    }

    /// True when no edges remain.
    pub fn is_empty_graph(&self) -> bool {
        self.m == 0
    }

    /// Lowest-id vertex among those of maximum degree.
    pub fn max_degree_vertex(&self) -> Result<VertexId> {
        if self.m == 0 {
            return Err(Error::contract("max_degree_vertex on an edgeless graph"));
        }
        self.bump(1);
        Ok(*self.degree_buckets[self.d_max]
            .iter()
            .next()
            .expect("top bucket nonempty whenever edges exist"))
    }

    /// Jaccard similarity of a present edge: the overlap of the endpoint
    /// neighborhoods over their union with the endpoints excluded,
    /// `t_e / (d_i + d_j - 2 - t_e)`. An isolated edge (denominator 0)
    /// has similarity 0.
    pub fn jaccard(&self, i: VertexId, j: VertexId) -> Result<Rat> {
        let t = self.edge_triangles(i, j)?;
        let denom = (self.degree(i) + self.degree(j)) as u64 - 2 - t;
        self.bump(1);
        if denom == 0 {
            Ok(Rat::new(0, 1))
        } else {
            Ok(Rat::new(t, denom))
        }
    }

    /// Exact test `J_(i,j) < p/q` by cross-multiplication; no rounding.
    pub fn jaccard_below(&self, i: VertexId, j: VertexId, p: u64, q: u64) -> Result<bool> {
        let t = self.edge_triangles(i, j)?;
        let denom = (self.degree(i) + self.degree(j)) as u64 - 2 - t;
        self.bump(1);
        if denom == 0 {
            // J defined as 0; below any positive threshold.
            return Ok(p > 0);
        }
        Ok((t as u128) * (q as u128) < (p as u128) * (denom as u128))
    }

    fn move_bucket(&mut self, v: VertexId, from: usize, to: usize) {
        self.bump(2);
        self.degree_buckets[from].remove(&v);
        self.degree_buckets[to].insert(v);
        if to > self.d_max {
            self.d_max = to;
        }
        if from == self.d_max && self.degree_buckets[from].is_empty() {
            // Linear downward scan; amortized against prior increases.
            while self.d_max > 0 && self.degree_buckets[self.d_max].is_empty() {
                self.bump(1);
                self.d_max -= 1;
            }
        }
    }

    /// Deletes a present edge, updating degrees, buckets, `d_max`, and the
    /// triangle counters of every edge that spanned a common neighbor.
    /// Returns the number of triangles the edge participated in at deletion
    /// time.
    pub fn delete_edge(&mut self, i: VertexId, j: VertexId) -> Result<u64> {
        if !self.has_edge(i, j) {
            return Err(Error::contract(format!("delete of absent edge ({i},{j})")));
        }
        let common: Vec<VertexId> = {
            let (small, large) = if self.adj[i.idx()].len() <= self.adj[j.idx()].len() {
                (&self.adj[i.idx()], &self.adj[j.idx()])
            } else {
                (&self.adj[j.idx()], &self.adj[i.idx()])
            };
            small
                .iter()
                .copied()
                .filter(|k| {
                    self.bump(1);
                    large.contains(k)
                })
                .collect()
        };
        for &k in &common {
            self.bump(2);
            *self
                .triangles_per_edge
                .get_mut(&EdgeKey::new(i, k))
                .expect("triangle edge present") -= 1;
            *self
                .triangles_per_edge
                .get_mut(&EdgeKey::new(j, k))
                .expect("triangle edge present") -= 1;
        }
        self.bump(3);
        self.triangles_per_edge.remove(&EdgeKey::new(i, j));
        self.adj[i.idx()].remove(&j);
        self.adj[j.idx()].remove(&i);
        let di = self.adj[i.idx()].len();
        let dj = self.adj[j.idx()].len();
        self.move_bucket(i, di + 1, di);
        self.move_bucket(j, dj + 1, dj);
        self.m -= 1;
        Ok(common.len() as u64)
    }

    /// Deletes a present vertex: all incident edges via `delete_edge`
    /// semantics, then the vertex itself. Returns the number of triangles
    /// destroyed (each counted once, at the deletion that broke it).
    pub fn delete_vertex(&mut self, i: VertexId) -> Result<u64> {
        if !self.contains_vertex(i) {
            return Err(Error::contract(format!("delete of absent vertex {i}")));
        }
        let neighbors: Vec<VertexId> = self.adj[i.idx()].iter().copied().collect();
        let mut destroyed = 0;
        for j in neighbors {
            destroyed += self.delete_edge(i, j)?;
        }
        self.bump(1);
        self.degree_buckets[0].remove(&i);
        self.present[i.idx()] = false;
        self.n_present -= 1;
        Ok(destroyed)
    }

    /// Exact triangle and wedge totals: `t = (Σ_e t_e)/3`, `w = Σ_i C(d_i,2)`.
    pub fn census(&self) -> TriangleWedgeCensus {
        let sum_te: u64 = self.triangles_per_edge.values().sum();
        debug_assert_eq!(sum_te % 3, 0, "each triangle is counted on 3 edges");
        let wedges: u64 = self
            .vertices()
            .map(|v| {
                let d = self.degree(v) as u64;
                d * d.saturating_sub(1) / 2
            })
            .sum();
        self.bump((self.n_present + self.m) as u64);
        TriangleWedgeCensus {
            triangles: sum_te / 3,
            wedges,
        }
    }

    /// Wedge count per vertex, `C(d_i, 2)`.
    pub fn per_vertex_wedges(&self) -> std::collections::BTreeMap<VertexId, u64> {
        self.vertices()
            .map(|v| {
                let d = self.degree(v) as u64;
                (v, d * d.saturating_sub(1) / 2)
            })
            .collect()
    }

    /// Checks every structural invariant by recomputation; test support.
    pub fn check_invariants(&self) -> Result<()> {
        let mut m = 0;
        for id in 0..self.adj.len() {
            let i = VertexId(id as u32);
            if !self.present[id] {
                if !self.adj[id].is_empty() {
                    return Err(Error::contract(format!("absent vertex {i} has edges")));
                }
                continue;
            }
            let d = self.adj[id].len();
            if !self.degree_buckets[d].contains(&i) {
                return Err(Error::contract(format!("vertex {i} missing from bucket {d}")));
            }
            for &j in &self.adj[id] {
                if i == j {
                    return Err(Error::contract(format!("self-loop at {i}")));
                }
                if !self.adj[j.idx()].contains(&i) {
                    return Err(Error::contract(format!("asymmetric edge ({i},{j})")));
                }
                if j > i {
                    m += 1;
                    let t = self.count_common(i, j);
                    let stored = self.triangles_per_edge[&EdgeKey::new(i, j)];
                    if stored != t {
                        return Err(Error::contract(format!(
                            "edge ({i},{j}) stores t={stored}, recount {t}"
                        )));
                    }
                }
            }
        }
        if m != self.m {
            return Err(Error::contract(format!("edge count {} != {}", self.m, m)));
        }
        let expect_dmax = (0..self.adj.len())
            .filter(|&id| self.present[id])
            .map(|id| self.adj[id].len())
            .max()
            .unwrap_or(0);
        // d_max only tracks non-isolated vertices when edges exist.
        if self.m > 0 && expect_dmax != self.d_max {
            return Err(Error::contract(format!(
                "d_max {} != recomputed {}",
                self.d_max, expect_dmax
            )));
        }
        Ok(())
    }
}
