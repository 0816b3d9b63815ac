//! Independent check of β and γ against a direct enumeration of the
//! configuration model around one bit.
//!
//! The depth-t neighbourhood is explored breadth-first, one socket at a time.
//! At every step the new edge either opens a fresh node (probability 1 − O(1/n))
//! or lands on one of the free sockets of an already discovered node of the
//! opposite type (probability c/E each, E = n·l). To first order in 1/n the bit
//! erasure probability is therefore
//!
//!   P_b(tree) + (1/n)·[Σ_collisions c·P_b(G) − Σ_steps free·P_b(tree)] / l,
//!
//! where the second sum is the tree-deficit part (β) and the first the
//! single-cycle part (γ). P_b of each small graph is evaluated by brute-force
//! BP over every erasure pattern.

use ldpc_scaling::{alpha, DegreeDistribution, PrecisionConfig};

#[derive(Clone)]
struct Node {
    var: bool,
    depth: usize,
    sockets: usize,
    used: usize,
}

struct Explored {
    nodes: Vec<Node>,
    /// (variable, check)
    edges: Vec<(usize, usize)>,
    /// per step: (node, free sockets) over discovered nodes of the opposite type
    free: Vec<Vec<(usize, usize)>>,
}

fn explore(l: usize, r: usize, t: usize, collision: Option<(usize, usize)>) -> Explored {
    let mut nodes = vec![Node {
        var: true,
        depth: 0,
        sockets: l,
        used: 0,
    }];
    let mut edges = Vec::new();
    let mut free = Vec::new();
    let mut queue = vec![0usize];
    let mut head = 0;
    let mut step = 0;
    while head < queue.len() {
        let u = queue[head];
        head += 1;
        let (var, depth, sockets) = (nodes[u].var, nodes[u].depth, nodes[u].sockets);
        if var && depth == 2 * t {
            continue;
        }
        while nodes[u].used < sockets {
            nodes[u].used += 1;
            let avail: Vec<(usize, usize)> = nodes
                .iter()
                .enumerate()
                .filter(|(_, n)| n.var != var && n.used < n.sockets)
                .map(|(i, n)| (i, n.sockets - n.used))
                .collect();
            free.push(avail);
            let x = match collision {
                Some((k, x)) if k == step => {
                    nodes[x].used += 1;
                    x
                }
                _ => {
                    nodes.push(Node {
                        var: !var,
                        depth: depth + 1,
                        sockets: if var { r } else { l },
                        used: 1,
                    });
                    queue.push(nodes.len() - 1);
                    nodes.len() - 1
                }
            };
            edges.push(if var { (u, x) } else { (x, u) });
            step += 1;
        }
    }
    Explored { nodes, edges, free }
}

type Bits = Vec<u64>;

fn and(a: &Bits, b: &Bits) -> Bits {
    a.iter().zip(b).map(|(x, y)| x & y).collect()
}

fn or(a: &Bits, b: &Bits) -> Bits {
    a.iter().zip(b).map(|(x, y)| x | y).collect()
}

/// Erasure probability of node 0 after `t` flooding rounds, exact over all
/// channel patterns of the graph's variable nodes.
fn root_erasure(g: &Explored, t: usize, eps: f64) -> f64 {
    let vars: Vec<usize> = (0..g.nodes.len()).filter(|&i| g.nodes[i].var).collect();
    let nv = vars.len();
    assert!(nv <= 24, "graph too large for brute force");
    let patterns = 1usize << nv;
    let words = patterns.div_ceil(64);
    let index = |node: usize| vars.iter().position(|&v| v == node).unwrap();

    let channel: Vec<Bits> = (0..nv)
        .map(|i| {
            let mut b = vec![0u64; words];
            for p in 0..patterns {
                if p >> i & 1 == 1 {
                    b[p / 64] |= 1 << (p % 64);
                }
            }
            b
        })
        .collect();
    let all = vec![u64::MAX; words];

    let ne = g.edges.len();
    let var_edges = |v: usize| (0..ne).filter(move |&e| g.edges[e].0 == v);
    let chk_edges = |c: usize| (0..ne).filter(move |&e| g.edges[e].1 == c);

    let mut c2v: Vec<Bits> = vec![all.clone(); ne];
    for _ in 0..t {
        let v2c: Vec<Bits> = (0..ne)
            .map(|e| {
                let v = g.edges[e].0;
                var_edges(v)
                    .filter(|&f| f != e)
                    .fold(channel[index(v)].clone(), |m, f| and(&m, &c2v[f]))
            })
            .collect();
        c2v = (0..ne)
            .map(|e| {
                let c = g.edges[e].1;
                chk_edges(c)
                    .filter(|&f| f != e)
                    .fold(vec![0u64; words], |m, f| or(&m, &v2c[f]))
            })
            .collect();
    }
    let mut root = channel[index(0)].clone();
    if t > 0 {
        for e in var_edges(0) {
            root = and(&root, &c2v[e]);
        }
    }

    let mut by_weight = vec![0u64; nv + 1];
    for p in 0..patterns {
        if root[p / 64] >> (p % 64) & 1 == 1 {
            by_weight[p.count_ones() as usize] += 1;
        }
    }
    by_weight
        .iter()
        .enumerate()
        .map(|(k, &c)| c as f64 * eps.powi(k as i32) * (1.0 - eps).powi((nv - k) as i32))
        .sum()
}

/// (β, γ) from the enumeration.
fn oracle(l: usize, r: usize, t: usize, eps: f64) -> (f64, f64) {
    let tree = explore(l, r, t, None);
    let pb_tree = root_erasure(&tree, t, eps);
    let total_free: usize = tree.free.iter().flatten().map(|&(_, c)| c).sum();
    let mut cycles = 0.0;
    for (k, avail) in tree.free.iter().enumerate() {
        for &(x, c) in avail {
            let g = explore(l, r, t, Some((k, x)));
            cycles += c as f64 * root_erasure(&g, t, eps);
        }
    }
    (-(total_free as f64) * pb_tree / l as f64, cycles / l as f64)
}

fn check(l: u32, r: u32, t: usize, eps: f64) {
    let (beta, gamma) = oracle(l as usize, r as usize, t, eps);
    let ens = DegreeDistribution::regular(l, r).unwrap();
    let res = alpha(&ens, eps, t, PrecisionConfig::default()).unwrap();
    let (b, g) = (res.beta.to_f64(), res.gamma.to_f64());
    let tol = |x: f64| 1e-11 * x.abs().max(1.0);
    assert!((b - beta).abs() <= tol(beta), "({l},{r}) t={t} eps={eps}: beta {b} vs {beta}");
    assert!((g - gamma).abs() <= tol(gamma), "({l},{r}) t={t} eps={eps}: gamma {g} vs {gamma}");
}

#[test]
fn cycle_ensemble_several_depths() {
    for t in 1..=5 {
        check(2, 2, t, 0.37);
    }
}

#[test]
fn two_three_depths_one_and_two() {
    for eps in [0.2, 0.4, 0.65] {
        check(2, 3, 1, eps);
        check(2, 3, 2, eps);
    }
}

#[test]
fn variable_degree_three_exercises_variable_bifurcations() {
    check(3, 2, 1, 0.3);
    check(3, 2, 2, 0.3);
    check(3, 2, 2, 0.55);
}

#[test]
fn depth_one_regular_ensembles() {
    for (l, r) in [(3, 3), (2, 4), (3, 6), (4, 3), (3, 4)] {
        check(l, r, 1, 0.35);
    }
}

#[test]
fn one_iteration_two_three_hand_values() {
    let (beta, gamma) = oracle(2, 3, 1, 0.4);
    assert!((beta + 0.65536).abs() < 1e-12);
    assert!((gamma - 0.8992).abs() < 1e-12);
}
