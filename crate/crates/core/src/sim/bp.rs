//! Flooding BP on the erasure channel, tracking erasures only.
//!
//! A variable-to-check message is erased iff the channel value and every other
//! incoming check message are erased; a check-to-variable message is erased iff
//! any other incoming variable message is. Check messages start erased. A bit
//! is erased after round τ iff its channel value and all its incoming check
//! messages of round τ are erased (round 0 is the channel alone).

use super::graph::TannerGraph;

/// Reusable message buffers for one graph size.
#[derive(Debug, Default, Clone)]
pub struct Decoder {
    /// c2v erased flag per edge
    c2v: Vec<bool>,
    /// v2c erased flag per edge
    v2c: Vec<bool>,
    /// number of erased incoming c2v messages per variable
    erased_in: Vec<u32>,
}

impl Decoder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Puts every check message back to erased.
    pub fn reset(&mut self, g: &TannerGraph) {
        let ne = g.edges();
        self.c2v.clear();
        self.c2v.resize(ne, true);
        self.v2c.clear();
        self.v2c.resize(ne, false);
        self.erased_in.clear();
        self.erased_in.extend((0..g.n()).map(|v| g.var_degree(v) as u32));
    }

    /// One flooding round; returns whether any check message changed.
    pub fn round(&mut self, g: &TannerGraph, channel: &[bool]) -> bool {
        for v in 0..g.n() {
            if !channel[v] {
                continue;
            }
            let full = self.erased_in[v] + 1;
            let deg = g.var_degree(v) as u32;
            for e in g.var_edges(v) {
                // all other incoming messages erased
                self.v2c[e] = full - self.c2v[e] as u32 == deg;
            }
        }
        let mut changed = false;
        for c in 0..g.m() {
            let edges = g.check_edges(c);
            let count: u32 = edges.iter().map(|&e| self.v2c[e] as u32).sum();
            for &e in edges {
                let out = count - self.v2c[e] as u32 > 0;
                if out != self.c2v[e] {
                    self.c2v[e] = out;
                    changed = true;
                    // messages only ever go from erased to known
                    self.erased_in[g.edge_var(e)] -= 1;
                }
            }
        }
        changed
    }

    pub fn erased_count(&self, g: &TannerGraph, channel: &[bool]) -> usize {
        (0..g.n())
            .filter(|&v| channel[v] && self.erased_in[v] == g.var_degree(v) as u32)
            .count()
    }

    /// Runs `t` rounds from scratch and calls `record(τ, erased_bits)` for τ = 0..=t.
    ///
    /// Once a round leaves every check message unchanged the state is a fixed
    /// point and the remaining rounds are reported without recomputation.
    pub fn run<F: FnMut(usize, usize)>(&mut self, g: &TannerGraph, channel: &[bool], t: usize, mut record: F) {
        self.reset(g);
        let mut erased = channel.iter().filter(|&&x| x).count();
        record(0, erased);
        let mut settled = false;
        for tau in 1..=t {
            if !settled {
                settled = !self.round(g, channel);
                erased = self.erased_count(g, channel);
            }
            record(tau, erased);
        }
    }

    /// Per-bit erasure state after the latest round.
    pub fn erased_bits(&self, g: &TannerGraph, channel: &[bool]) -> Vec<bool> {
        (0..g.n())
            .map(|v| channel[v] && self.erased_in[v] == g.var_degree(v) as u32)
            .collect()
    }
}

/// Erasure flags of every bit after each round 0..=t.
pub fn bp_decode(g: &TannerGraph, channel: &[bool], t: usize) -> Vec<Vec<bool>> {
    assert_eq!(channel.len(), g.n(), "one channel flag per variable node");
    let mut dec = Decoder::new();
    dec.reset(g);
    let mut out = vec![dec.erased_bits(g, channel)];
    for _ in 0..t {
        dec.round(g, channel);
        out.push(dec.erased_bits(g, channel));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Depth-one neighbourhood of a (2,3) bit with a double edge: root 0 joins
    /// check 0 (with bits 1, 2) and check 1 (with bit 3 twice), bits 1 and 2
    /// closing through check 2.
    fn toy() -> TannerGraph {
        TannerGraph::from_edges(
            4,
            3,
            &[(0, 0), (0, 1), (1, 0), (1, 2), (2, 0), (2, 2), (3, 1), (3, 1)],
        )
    }

    #[test]
    fn no_erasures_means_nothing_to_decode() {
        let g = toy();
        let rounds = bp_decode(&g, &[false; 4], 3);
        assert!(rounds.iter().flatten().all(|&x| !x));
    }

    #[test]
    fn everything_erased_stays_erased() {
        let g = toy();
        let rounds = bp_decode(&g, &[true; 4], 5);
        assert!(rounds.iter().flatten().all(|&x| x));
    }

    #[test]
    fn root_and_neighbours_erased() {
        let g = toy();
        let rounds = bp_decode(&g, &[true; 4], 1);
        assert!(rounds[1][0]);
        // a check resolves the root once all its other bits are known
        let rounds = bp_decode(&g, &[true, true, true, false], 1);
        assert!(!rounds[1][0]);
        let rounds = bp_decode(&g, &[true, false, true, true], 1);
        assert!(rounds[1][0]);
        let rounds = bp_decode(&g, &[true, false, false, true], 1);
        assert!(!rounds[1][0]);
    }

    #[test]
    fn chain_resolves_one_hop_per_round() {
        // v0 - c0 - v1 - c1 - v2 - c2 - v3, v3 known
        let g = TannerGraph::from_edges(4, 3, &[(0, 0), (1, 0), (1, 1), (2, 1), (2, 2), (3, 2)]);
        let rounds = bp_decode(&g, &[true, true, true, false], 4);
        let erased: Vec<usize> = rounds.iter().map(|r| r.iter().filter(|&&x| x).count()).collect();
        assert_eq!(erased, vec![3, 2, 1, 0, 0]);
    }

    #[test]
    fn counts_match_flags() {
        let g = toy();
        let ch = [true, true, false, true];
        let flags = bp_decode(&g, &ch, 4);
        let mut counts = Vec::new();
        Decoder::new().run(&g, &ch, 4, |tau, k| counts.push((tau, k)));
        for (tau, k) in counts {
            assert_eq!(flags[tau].iter().filter(|&&x| x).count(), k);
        }
    }
}
