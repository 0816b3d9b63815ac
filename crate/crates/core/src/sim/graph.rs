//! Configuration-model Tanner graphs.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ensemble::DegreeDistribution;
use crate::error::{Error, Result};

const INTEGRALITY_TOL: f64 = 1e-9;

/// Node degrees for one block length, sockets laid out node by node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    var_degrees: Vec<usize>,
    check_degrees: Vec<usize>,
    var_offsets: Vec<usize>,
    check_offsets: Vec<usize>,
}

impl Layout {
    /// Degree sequences for `n` variable nodes, or `None` if the node-perspective
    /// counts are not integral.
    fn try_new(ens: &DegreeDistribution, n: usize) -> Option<Layout> {
        let var_degrees = expand_counts(ens.l_coeffs().iter().map(|(&d, &w)| (d, w)), n as f64)?;
        let edges: usize = var_degrees.iter().sum();
        let m = edges as f64 / ens.mean_check_degree();
        let check_degrees = expand_counts(ens.r_coeffs().iter().map(|(&d, &w)| (d, w)), m)?;
        if check_degrees.iter().sum::<usize>() != edges || var_degrees.is_empty() {
            return None;
        }
        Some(Layout {
            var_offsets: offsets(&var_degrees),
            check_offsets: offsets(&check_degrees),
            var_degrees,
            check_degrees,
        })
    }

    pub fn new(ens: &DegreeDistribution, n: usize) -> Result<Layout> {
        Layout::try_new(ens, n).ok_or_else(|| Error::InfeasibleBlocklength {
            n,
            nearest: nearest_feasible(ens, n),
        })
    }

    pub fn n(&self) -> usize {
        self.var_degrees.len()
    }

    pub fn m(&self) -> usize {
        self.check_degrees.len()
    }

    pub fn edges(&self) -> usize {
        *self.var_offsets.last().unwrap()
    }
}

fn expand_counts(weights: impl Iterator<Item = (u32, f64)>, total: f64) -> Option<Vec<usize>> {
    let mut out = Vec::new();
    for (d, w) in weights {
        let count = w * total;
        let rounded = count.round();
        if (count - rounded).abs() > INTEGRALITY_TOL * total.max(1.0) {
            return None;
        }
        out.extend(std::iter::repeat_n(d as usize, rounded as usize));
    }
    Some(out)
}

fn offsets(degrees: &[usize]) -> Vec<usize> {
    let mut off = Vec::with_capacity(degrees.len() + 1);
    off.push(0);
    for d in degrees {
        off.push(off.last().unwrap() + d);
    }
    off
}

/// Closest feasible block lengths below and above `n`.
pub fn nearest_feasible(ens: &DegreeDistribution, n: usize) -> Vec<usize> {
    const SEARCH: usize = 100_000;
    let below = (1..n.min(SEARCH + 1)).map(|k| n - k).find(|&c| c > 0 && Layout::try_new(ens, c).is_some());
    let above = (1..=SEARCH).map(|k| n + k).find(|&c| Layout::try_new(ens, c).is_some());
    below.into_iter().chain(above).collect()
}

/// A bipartite multigraph with edges identified by variable sockets.
///
/// Edge `e` is variable socket `e`; `edge_perm[e]` is the check socket it is
/// matched to. Variable sockets are contiguous per variable node and check
/// sockets per check node, so both adjacency lists are slices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TannerGraph {
    layout: Layout,
    edge_perm: Vec<usize>,
    /// edge id at each check socket (inverse of `edge_perm`)
    check_socket_edge: Vec<usize>,
    /// variable node of each edge
    edge_var: Vec<usize>,
}

impl TannerGraph {
    pub fn from_permutation(layout: Layout, edge_perm: Vec<usize>) -> TannerGraph {
        assert_eq!(edge_perm.len(), layout.edges(), "permutation length");
        let mut check_socket_edge = vec![usize::MAX; edge_perm.len()];
        for (e, &s) in edge_perm.iter().enumerate() {
            assert_eq!(check_socket_edge[s], usize::MAX, "not a permutation");
            check_socket_edge[s] = e;
        }
        let mut edge_var = Vec::with_capacity(edge_perm.len());
        for (v, &d) in layout.var_degrees.iter().enumerate() {
            edge_var.extend(std::iter::repeat_n(v, d));
        }
        TannerGraph {
            layout,
            edge_perm,
            check_socket_edge,
            edge_var,
        }
    }

    /// Builds a graph from explicit `(variable, check)` pairs, one per edge.
    pub fn from_edges(n: usize, m: usize, edges: &[(usize, usize)]) -> TannerGraph {
        let mut var_degrees = vec![0; n];
        let mut check_degrees = vec![0; m];
        for &(v, c) in edges {
            var_degrees[v] += 1;
            check_degrees[c] += 1;
        }
        let layout = Layout {
            var_offsets: offsets(&var_degrees),
            check_offsets: offsets(&check_degrees),
            var_degrees,
            check_degrees,
        };
        let mut next_var = layout.var_offsets.clone();
        let mut next_check = layout.check_offsets.clone();
        let mut perm = vec![0; edges.len()];
        for &(v, c) in edges {
            perm[next_var[v]] = next_check[c];
            next_var[v] += 1;
            next_check[c] += 1;
        }
        TannerGraph::from_permutation(layout, perm)
    }

    pub fn n(&self) -> usize {
        self.layout.n()
    }

    pub fn m(&self) -> usize {
        self.layout.m()
    }

    pub fn edges(&self) -> usize {
        self.edge_perm.len()
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn edge_perm(&self) -> &[usize] {
        &self.edge_perm
    }

    /// Edge ids at variable node `v`.
    pub fn var_edges(&self, v: usize) -> std::ops::Range<usize> {
        self.layout.var_offsets[v]..self.layout.var_offsets[v + 1]
    }

    /// Edge ids at check node `c`.
    pub fn check_edges(&self, c: usize) -> &[usize] {
        &self.check_socket_edge[self.layout.check_offsets[c]..self.layout.check_offsets[c + 1]]
    }

    pub fn edge_var(&self, e: usize) -> usize {
        self.edge_var[e]
    }

    pub fn var_degree(&self, v: usize) -> usize {
        self.layout.var_degrees[v]
    }

    pub fn check_degree(&self, c: usize) -> usize {
        self.layout.check_degrees[c]
    }

    /// Draws a fresh uniform socket matching in place. The result depends only
    /// on `rng`, not on the matching being replaced.
    pub fn resample<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        for (e, s) in self.edge_perm.iter_mut().enumerate() {
            *s = e;
        }
        self.edge_perm.shuffle(rng);
        for (e, &s) in self.edge_perm.iter().enumerate() {
            self.check_socket_edge[s] = e;
        }
    }
}

/// Samples a graph with a uniformly random socket matching. Multi-edges are kept.
pub fn sample_graph(ens: &DegreeDistribution, n: usize, seed: u64) -> Result<TannerGraph> {
    let layout = Layout::new(ens, n)?;
    let identity = (0..layout.edges()).collect();
    let mut graph = TannerGraph::from_permutation(layout, identity);
    graph.resample(&mut ChaCha8Rng::seed_from_u64(seed));
    Ok(graph)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reg(l: u32, r: u32) -> DegreeDistribution {
        DegreeDistribution::regular(l, r).unwrap()
    }

    #[test]
    fn block_sizes() {
        let g = sample_graph(&reg(2, 3), 51, 1).unwrap();
        assert_eq!((g.n(), g.m(), g.edges()), (51, 34, 102));
        let g = sample_graph(&reg(3, 6), 512, 1).unwrap();
        assert_eq!((g.n(), g.m(), g.edges()), (512, 256, 1536));
    }

    #[test]
    fn infeasible_length_names_neighbours() {
        match sample_graph(&reg(2, 3), 50, 1) {
            Err(Error::InfeasibleBlocklength { n, nearest }) => {
                assert_eq!(n, 50);
                assert_eq!(nearest, vec![48, 51]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn irregular_layout() {
        let ens = DegreeDistribution::from_json(r#"{"lambda": {"2": 0.5, "3": 0.5}, "rho": {"6": 1.0}}"#)
            .unwrap();
        // L_2 = 0.6, L_3 = 0.4; n = 10 gives 6·2 + 4·3 = 24 edges, 4 checks
        let g = sample_graph(&ens, 10, 3).unwrap();
        assert_eq!((g.n(), g.m(), g.edges()), (10, 4, 24));
        assert!(sample_graph(&ens, 7, 3).is_err());
    }

    #[test]
    fn adjacency_is_consistent() {
        let g = sample_graph(&reg(3, 6), 64, 9).unwrap();
        let mut seen = vec![0; g.edges()];
        for c in 0..g.m() {
            assert_eq!(g.check_edges(c).len(), 6);
            for &e in g.check_edges(c) {
                seen[e] += 1;
            }
        }
        assert!(seen.iter().all(|&k| k == 1));
        for v in 0..g.n() {
            for e in g.var_edges(v) {
                assert_eq!(g.edge_var(e), v);
            }
        }
    }

    #[test]
    fn seeded_sampling_is_reproducible() {
        let a = sample_graph(&reg(3, 6), 128, 42).unwrap();
        let b = sample_graph(&reg(3, 6), 128, 42).unwrap();
        let c = sample_graph(&reg(3, 6), 128, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn resampling_ignores_previous_matching() {
        let mut a = sample_graph(&reg(3, 6), 32, 1).unwrap();
        let mut b = sample_graph(&reg(3, 6), 32, 2).unwrap();
        a.resample(&mut ChaCha8Rng::seed_from_u64(5));
        b.resample(&mut ChaCha8Rng::seed_from_u64(5));
        assert_eq!(a, b);
    }
}
