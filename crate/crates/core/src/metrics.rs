//! Read-only analytics over a graph: density measures, local-similarity
//! classification, induced-subgraph statistics, and certification that a
//! proposed family of vertex sets is tightly knit.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};
use crate::Rat;

/// Snapshot of a graph's global density structure. `jaccard_desc` holds the
/// similarity of every edge, sorted descending, so threshold queries are a
/// binary search.
#[derive(Debug, Clone)]
pub struct DensityProfile {
    pub n: usize,
    pub m: usize,
    pub triangles: u64,
    pub wedges: u64,
    pub triangle_density: Rat,
    pub edge_density: Rat,
    pub has_isolated: bool,
    jaccard_desc: Vec<Rat>,
}

impl DensityProfile {
    /// Fraction of edges with similarity at least `eps`, as an exact
    /// count-over-`|E|` rational. An edgeless graph is vacuously 1.
    pub fn mu_at(&self, eps: Rat) -> Rat {
        if self.m == 0 {
            return Rat::new(1, 1);
        }
        let count = self.jaccard_desc.partition_point(|j| *j >= eps) as u64;
        Rat::new(count, self.m as u64)
    }

    /// Every edge has similarity at least `eps` and no vertex is isolated.
    pub fn everywhere_dense_at(&self, eps: Rat) -> bool {
        if self.has_isolated {
            return false;
        }
        match self.jaccard_desc.last() {
            None => true,
            Some(min) => *min >= eps,
        }
    }

    /// Smallest edge similarity, if any edge exists.
    pub fn min_jaccard(&self) -> Option<Rat> {
        self.jaccard_desc.last().copied()
    }
}

pub fn density_profile(g: &Graph) -> DensityProfile {
    let census = g.census();
    let n = g.vertex_count();
    let m = g.edge_count();
    let mut jaccard_desc: Vec<Rat> = g
        .edges()
        .map(|(i, j)| g.jaccard(i, j).expect("edge present"))
        .collect();
    jaccard_desc.sort_unstable_by(|a, b| b.cmp(a));
    let pairs = n as u64 * (n as u64).saturating_sub(1) / 2;
    let edge_density = if pairs == 0 {
        Rat::new(1, 1)
    } else {
        Rat::new(m as u64, pairs)
    };
    DensityProfile {
        n,
        m,
        triangles: census.triangles,
        wedges: census.wedges,
        triangle_density: census.triangle_density(),
        edge_density,
        has_isolated: g.vertices().any(|v| g.degree(v) == 0),
        jaccard_desc,
    }
}

/// Statistics of one induced subgraph, measured in a fixed host graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InducedStats {
    pub size: usize,
    pub edges: u64,
    /// `edges / C(size, 2)`; a single vertex is vacuously 1.
    pub edge_density: Rat,
    /// Triangles entirely inside the induced subgraph.
    pub t_internal: u64,
    /// Triangles of the host graph with at least one vertex in the set.
    pub t_incident: u64,
    pub wedges_internal: u64,
    /// `3 t_internal / wedges_internal`, 0 when wedge-free.
    pub triangle_density: Rat,
    /// Minimum eccentricity in the induced subgraph; `None` when it is
    /// disconnected.
    pub radius: Option<u32>,
}

impl InducedStats {
    /// Def-style pass check: both densities at least `rho` and radius at
    /// most 2.
    pub fn tightly_knit_at(&self, rho: Rat) -> bool {
        self.edge_density >= rho
            && self.triangle_density >= rho
            && matches!(self.radius, Some(r) if r <= 2)
    }
}

fn binom2(x: u64) -> u64 {
    x * x.saturating_sub(1) / 2
}

/// Edge count, per-vertex degrees, internal triangles, wedges, and radius of
/// the subgraph induced by `members` (assumed present in `g`).
fn induced_core(g: &Graph, members: &BTreeSet<VertexId>) -> (u64, u64, u64, Option<u32>) {
    let verts: Vec<VertexId> = members.iter().copied().collect();
    let index = |v: VertexId| verts.binary_search(&v).ok();
    let mut local_adj: Vec<Vec<usize>> = vec![Vec::new(); verts.len()];
    let mut edges = 0u64;
    for (a, &v) in verts.iter().enumerate() {
        for u in g.neighbors(v) {
            g.add_ops(1);
            if let Some(b) = index(u) {
                local_adj[a].push(b);
                if b > a {
                    edges += 1;
                }
            }
        }
    }
    let wedges: u64 = local_adj.iter().map(|nb| binom2(nb.len() as u64)).sum();
    // triangles: for each induced edge a<b, count common local neighbors c>b
    let mut t_internal = 0u64;
    for a in 0..verts.len() {
        for &b in &local_adj[a] {
            if b <= a {
                continue;
            }
            let (sa, sb) = (&local_adj[a], &local_adj[b]);
            let (small, large) = if sa.len() <= sb.len() { (sa, sb) } else { (sb, sa) };
            let large: BTreeSet<usize> = large.iter().copied().collect();
            for &c in small {
                g.add_ops(1);
                if c > b && large.contains(&c) {
                    t_internal += 1;
                }
            }
        }
    }
    let radius = induced_radius(&local_adj);
    (edges, wedges, t_internal, radius)
}

fn induced_radius(local_adj: &[Vec<usize>]) -> Option<u32> {
    let n = local_adj.len();
    if n == 0 {
        return None;
    }
    let mut best: Option<u32> = None;
    let mut dist = vec![u32::MAX; n];
    let mut queue = std::collections::VecDeque::new();
    for start in 0..n {
        dist.iter_mut().for_each(|d| *d = u32::MAX);
        queue.clear();
        dist[start] = 0;
        queue.push_back(start);
        let mut seen = 1;
        let mut ecc = 0;
        while let Some(v) = queue.pop_front() {
            for &u in &local_adj[v] {
                if dist[u] == u32::MAX {
                    dist[u] = dist[v] + 1;
                    ecc = ecc.max(dist[u]);
                    seen += 1;
                    queue.push_back(u);
                }
            }
        }
        if seen < n {
            return None; // disconnected: every eccentricity is infinite
        }
        best = Some(best.map_or(ecc, |b: u32| b.min(ecc)));
    }
    best
}

/// Full statistics of `G|_S`, including triangles of `g` merely incident to
/// `S`.
pub fn induced_stats(g: &Graph, members: &BTreeSet<VertexId>) -> Result<InducedStats> {
    if members.is_empty() {
        return Err(Error::input("induced_stats of an empty set"));
    }
    for &v in members {
        if !g.contains_vertex(v) {
            return Err(Error::input(format!("vertex {v} not in the graph")));
        }
    }
    let (edges, wedges_internal, t_internal, radius) = induced_core(g, members);
    // incident triangles: enumerate each host triangle once
    let mut t_incident = 0u64;
    for (a, b) in g.edges() {
        let (sa, sb) = (g.neighbor_set(a), g.neighbor_set(b));
        let (small, large) = if sa.len() <= sb.len() { (sa, sb) } else { (sb, sa) };
        for &c in small.iter().filter(|&&c| c > b) {
            g.add_ops(1);
            if large.contains(&c) && (members.contains(&a) || members.contains(&b) || members.contains(&c)) {
                t_incident += 1;
            }
        }
    }
    Ok(build_stats(members.len(), edges, wedges_internal, t_internal, t_incident, radius))
}

fn build_stats(
    size: usize,
    edges: u64,
    wedges_internal: u64,
    t_internal: u64,
    t_incident: u64,
    radius: Option<u32>,
) -> InducedStats {
    let pairs = binom2(size as u64);
    let edge_density = if pairs == 0 {
        Rat::new(1, 1)
    } else {
        Rat::new(edges, pairs)
    };
    let triangle_density = if wedges_internal == 0 {
        Rat::new(0, 1)
    } else {
        Rat::new(3 * t_internal, wedges_internal)
    };
    InducedStats {
        size,
        edges,
        edge_density,
        t_internal,
        t_incident,
        wedges_internal,
        triangle_density,
        radius,
    }
}

/// Snapshot of one cluster inside a certificate.
#[derive(Debug, Clone)]
pub struct ClusterCertificate {
    pub members: BTreeSet<VertexId>,
    pub stats: InducedStats,
    pub passes: bool,
}

/// Certification of a family of disjoint vertex sets against a host graph.
#[derive(Debug, Clone)]
pub struct FamilyCertificate {
    pub per_cluster: Vec<ClusterCertificate>,
    pub rho_requested: Rat,
    /// Smallest per-cluster density over both measures; 0 for an empty
    /// family.
    pub rho_achieved: Rat,
    pub triangles_kept: u64,
    pub triangles_total: u64,
    pub edges_kept: u64,
    pub edges_total: u64,
    pub passes: bool,
}

impl FamilyCertificate {
    pub fn triangle_fraction(&self) -> Rat {
        if self.triangles_total == 0 {
            Rat::new(1, 1)
        } else {
            Rat::new(self.triangles_kept, self.triangles_total)
        }
    }

    pub fn edge_fraction(&self) -> Rat {
        if self.edges_total == 0 {
            Rat::new(1, 1)
        } else {
            Rat::new(self.edges_kept, self.edges_total)
        }
    }
}

/// Checks a proposed family against `g`: pairwise-disjoint sets, per-cluster
/// density and radius at `rho`, and global retention fractions. One global
/// triangle enumeration serves every cluster.
pub fn certify_family(
    g: &Graph,
    family: &[BTreeSet<VertexId>],
    rho: Rat,
) -> Result<FamilyCertificate> {
    let mut owner: Vec<Option<usize>> = Vec::new();
    for (k, set) in family.iter().enumerate() {
        if set.is_empty() {
            return Err(Error::input(format!("cluster {k} is empty")));
        }
        for &v in set {
            if !g.contains_vertex(v) {
                return Err(Error::input(format!("cluster {k}: vertex {v} not in graph")));
            }
            if owner.len() <= v.idx() {
                owner.resize(v.idx() + 1, None);
            }
            if owner[v.idx()].is_some() {
                return Err(Error::input(format!("vertex {v} appears in two clusters")));
            }
            owner[v.idx()] = Some(k);
        }
    }

    let census = g.census();
    let mut t_incident = vec![0u64; family.len()];
    let mut t_internal = vec![0u64; family.len()];
    for (a, b) in g.edges() {
        let (sa, sb) = (g.neighbor_set(a), g.neighbor_set(b));
        let (small, large) = if sa.len() <= sb.len() { (sa, sb) } else { (sb, sa) };
        for &c in small.iter().filter(|&&c| c > b) {
            g.add_ops(1);
            if !large.contains(&c) {
                continue;
            }
            let of = |v: VertexId| owner.get(v.idx()).copied().flatten();
            let (oa, ob, oc) = (of(a), of(b), of(c));
            let mut touched = [oa, ob, oc];
            touched.sort_unstable();
            let mut last = None;
            for o in touched.into_iter().flatten() {
                if Some(o) != last {
                    t_incident[o] += 1;
                    last = Some(o);
                }
            }
            if let (Some(x), Some(y), Some(z)) = (oa, ob, oc) {
                if x == y && y == z {
                    t_internal[x] += 1;
                }
            }
        }
    }

    let mut per_cluster = Vec::with_capacity(family.len());
    let mut rho_achieved: Option<Rat> = None;
    let mut edges_kept = 0u64;
    let mut passes = true;
    for (k, set) in family.iter().enumerate() {
        let (edges, wedges, t_int, radius) = induced_core(g, set);
        debug_assert_eq!(t_int, t_internal[k]);
        let stats = build_stats(set.len(), edges, wedges, t_int, t_incident[k], radius);
        edges_kept += edges;
        let cluster_min = stats.edge_density.min(stats.triangle_density);
        rho_achieved = Some(match rho_achieved {
            None => cluster_min,
            Some(r) => r.min(cluster_min),
        });
        let ok = stats.tightly_knit_at(rho);
        passes &= ok;
        per_cluster.push(ClusterCertificate {
            members: set.clone(),
            stats,
            passes: ok,
        });
    }

    Ok(FamilyCertificate {
        per_cluster,
        rho_requested: rho,
        rho_achieved: rho_achieved.unwrap_or_else(|| Rat::new(0, 1)),
        triangles_kept: t_internal.iter().sum(),
        triangles_total: census.triangles,
        edges_kept,
        edges_total: g.edge_count() as u64,
        passes,
    })
}

/// Degree balance of a locally dense graph: for every edge `(i, j)`,
/// `d_i >= eps * d_j` and symmetrically. Exact cross-multiplied check.
pub fn degree_balance_holds(g: &Graph, eps: Rat) -> bool {
    let (p, q) = (*eps.numer(), *eps.denom());
    g.edges().all(|(i, j)| {
        let (di, dj) = (g.degree(i) as u128, g.degree(j) as u128);
        di * q as u128 >= p as u128 * dj && dj * q as u128 >= p as u128 * di
    })
}

/// Neighborhood density of a locally dense graph: every `N(i)` induces at
/// least `eps * C(d_i, 2)` edges.
pub fn neighborhood_density_holds(g: &Graph, eps: Rat) -> bool {
    let (p, q) = (*eps.numer(), *eps.denom());
    g.vertices().filter(|&v| g.degree(v) > 0).all(|v| {
        let nbrs: BTreeSet<VertexId> = g.neighbors(v).collect();
        let mut inside = 0u128;
        for &a in &nbrs {
            inside += g.neighbors(a).filter(|b| *b > a && nbrs.contains(b)).count() as u128;
        }
        let d = g.degree(v) as u128;
        2 * inside * q as u128 >= p as u128 * d * (d - 1)
    })
}
