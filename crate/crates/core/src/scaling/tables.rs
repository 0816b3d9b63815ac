//! Memoized single-cycle recursions f, g, H, G1, G2, G2′ and H2.
//!
//! Notation: `a(t) = ε λ'(P(t))/λ'(1)` is the erasure probability of a
//! variable node sitting on a path (two path edges, the rest fed by round-`t`
//! check messages), `b(t) = ρ'(1 − Q(t))/ρ'(1)` the probability that a check
//! node on a path sees no erasure on its off-path edges at round `t`.
//!
//! `g(t, s, p)` is affine in `p`, so it is stored as the pair `(A, B)` with
//! `g = A + B·p`. H and G1 are swept one outer depth `u` at a time with only
//! the previous row kept; the diagonals `H(u, u, ·)` and `G1(u, u, ·)` are the
//! only slices the γ sums read, which keeps the memory at O(t²).

use crate::density::DeTrace;
use crate::ensemble::{DegreeDistribution, Poly};
use crate::real::Real;

/// How the depth arguments of the G2/G2′ terminals are read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RecursionVariant {
    /// `H(u,t,0) = a(t)·G2(t,u)` and `G1(u,t,0) = G2′(t,u)`: the outer depth
    /// occupies the descending slot, so the base cases `u = t+1` and `u = t`
    /// are reached.
    #[default]
    AsPrinted,
    /// Arguments swapped (`G2(u,t)`, `G2′(u,t)`). The descending index then
    /// starts at or below its base case, which is clamped to the base value 1.
    Swapped,
}

impl RecursionVariant {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "a" | "as-printed" => Some(RecursionVariant::AsPrinted),
            "b" | "swapped" => Some(RecursionVariant::Swapped),
            _ => None,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            RecursionVariant::AsPrinted => "a",
            RecursionVariant::Swapped => "b",
        }
    }
}

/// The three families of single-cycle terms making up γ.
#[derive(Debug, Clone)]
pub struct GammaTerms<R> {
    /// cycle closing through a variable node below the root
    pub f12: R,
    /// cycle closing through a check node below the root
    pub f34: R,
    /// cycle through the root itself
    pub f56: R,
}

impl<R: Real> GammaTerms<R> {
    pub fn total(&self) -> R {
        self.f12.clone() + self.f34.clone() + self.f56.clone()
    }
}

/// One outer depth `u` of the H/G1 sweep.
struct Sweep<R> {
    /// H(u, u, s) for s = 1..=2u, at index s-1
    h_diag: Vec<R>,
    /// G1(u, u, s) for s = 0..2u
    g1_diag: Vec<R>,
}

pub struct RecursionTables<R: Real> {
    ens: DegreeDistribution,
    variant: RecursionVariant,
    capacity: usize,
    epsilon: R,
    de: DeTrace<R>,
    /// a(t), t = 0..=capacity
    a: Vec<R>,
    /// b(t), t = 1..=capacity+1 (index 0 unused)
    b: Vec<R>,
    /// ε λ''(P(t))/λ''(1) when λ''(1) > 0
    a2: Option<Vec<R>>,
    /// ρ''(1 − Q(t))/ρ''(1) when ρ''(1) > 0 (index 0 unused)
    c2: Option<Vec<R>>,
    /// g(t, s, ·) as (A, B), t = 0..=capacity, s = 0..=2·capacity+1
    g: Vec<Vec<(R, R)>>,
    h_diag: Vec<Vec<R>>,
    g1_diag: Vec<Vec<R>>,
    /// H2(t, s) for t = 1..=processed, s = 1..=2t-1 at [t][s-1] (row 0 empty)
    h2: Vec<Vec<R>>,
    /// G2(t, u) for t < u at the last processed u
    g2_col: Vec<R>,
    /// G2′(t, u) for t ≤ u at the last processed u
    g2p_col: Vec<R>,
    /// K^j = (λ'(1)ρ'(1))^j, j = 0..=2·capacity
    powers: Vec<R>,
    coef12: R,
    coef34: R,
}

impl<R: Real> RecursionTables<R> {
    /// Prepares tables able to answer every query up to depth `capacity`,
    /// with scalars at `bits` of precision.
    pub fn new(
        ens: &DegreeDistribution,
        epsilon: f64,
        capacity: usize,
        bits: usize,
        variant: RecursionVariant,
    ) -> Self {
        let eps = R::from_f64(epsilon, bits);
        let one = eps.one();
        let de = DeTrace::run(ens, eps.clone(), capacity + 1);

        let d_lambda = ens.eval_in(Poly::Lambda, 1, &one);
        let d_rho = ens.eval_in(Poly::Rho, 1, &one);
        let dd_lambda = ens.eval_in(Poly::Lambda, 2, &one);
        let dd_rho = ens.eval_in(Poly::Rho, 2, &one);

        let a: Vec<R> = (0..=capacity)
            .map(|t| eps.clone() * ens.eval_in(Poly::Lambda, 1, de.p(t)) / d_lambda.clone())
            .collect();
        let b: Vec<R> = (0..=capacity + 1)
            .map(|t| match t {
                0 => one.clone(),
                _ => ens.eval_in(Poly::Rho, 1, &(one.clone() - de.q(t).clone())) / d_rho.clone(),
            })
            .collect();
        let a2 = (!dd_lambda.is_zero()).then(|| {
            (0..=capacity)
                .map(|t| {
                    eps.clone() * ens.eval_in(Poly::Lambda, 2, de.p(t)) / dd_lambda.clone()
                })
                .collect()
        });
        let c2 = (!dd_rho.is_zero()).then(|| {
            (0..=capacity)
                .map(|t| match t {
                    0 => one.clone(),
                    _ => {
                        ens.eval_in(Poly::Rho, 2, &(one.clone() - de.q(t).clone()))
                            / dd_rho.clone()
                    }
                })
                .collect()
        });

        let k = d_lambda.clone() * d_rho.clone();
        let mut powers = Vec::with_capacity(2 * capacity + 1);
        powers.push(one.clone());
        for j in 1..=2 * capacity {
            let next = powers[j - 1].clone() * k.clone();
            powers.push(next);
        }
        let half = one.lift(0.5);
        let coef12 = half.clone() * dd_lambda * d_rho.clone() * d_rho;
        let coef34 = half * dd_rho * d_lambda;

        let mut tables = RecursionTables {
            ens: ens.clone(),
            variant,
            capacity,
            epsilon: eps,
            de,
            a,
            b,
            a2,
            c2,
            g: Vec::new(),
            h_diag: Vec::new(),
            g1_diag: Vec::new(),
            h2: vec![Vec::new()],
            g2_col: Vec::new(),
            g2p_col: Vec::new(),
            powers,
            coef12,
            coef34,
        };
        tables.fill_g();
        tables
    }

    fn fill_g(&mut self) {
        let zero = self.epsilon.zero();
        let one = self.epsilon.one();
        let width = 2 * self.capacity + 2;
        let mut rows: Vec<Vec<(R, R)>> = Vec::with_capacity(self.capacity + 1);
        // round 0: nothing has been received yet
        let mut row0 = vec![(one.clone(), zero.clone()); width];
        row0[0] = (zero.clone(), one.clone());
        rows.push(row0);
        for t in 1..=self.capacity {
            let bt = self.b[t].clone();
            let mut row = Vec::with_capacity(width);
            row.push((zero.clone(), one.clone()));
            for s in 1..width {
                let (fa, fb) = self.f_coeffs_from(&rows, t - 1, s);
                // g = 1 − b(1 − f)
                row.push((one.clone() - bt.clone() * (one.clone() - fa), bt.clone() * fb));
            }
            rows.push(row);
        }
        self.g = rows;
    }

    fn f_coeffs_from(&self, g: &[Vec<(R, R)>], t: usize, s: usize) -> (R, R) {
        if t == 0 {
            return (self.epsilon.clone(), self.epsilon.zero());
        }
        let (ga, gb) = &g[t][s - 1];
        (self.a[t].clone() * ga.clone(), self.a[t].clone() * gb.clone())
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn variant(&self) -> RecursionVariant {
        self.variant
    }

    pub fn epsilon(&self) -> &R {
        &self.epsilon
    }

    pub fn trace(&self) -> &DeTrace<R> {
        &self.de
    }

    /// Number of outer depths swept so far.
    pub fn processed(&self) -> usize {
        self.h_diag.len()
    }

    /// f(t, s, p): erasure probability of a variable-to-check message at
    /// round t+1 travelling along a path with `s` more check hops, the path end
    /// being erased with probability `p`.
    pub fn f(&self, t: usize, s: usize, p: &R) -> R {
        let (fa, fb) = self.f_coeffs_from(&self.g, t, s);
        fa + fb * p.clone()
    }

    /// g(t, s, p): the matching check-to-variable message at round t.
    pub fn g(&self, t: usize, s: usize, p: &R) -> R {
        let (ga, gb) = &self.g[t][s];
        ga.clone() + gb.clone() * p.clone()
    }

    pub fn g_coeffs(&self, t: usize, s: usize) -> (&R, &R) {
        let (ga, gb) = &self.g[t][s];
        (ga, gb)
    }

    fn g_at_one(&self, t: usize, s: usize) -> R {
        let (ga, gb) = &self.g[t][s];
        ga.clone() + gb.clone()
    }

    /// G2 in its defining slot order: G2(u, t) for t ≥ u+1.
    pub fn g2(&self, u: usize, t: usize) -> R {
        let mut val = self.epsilon.one();
        for k in u + 2..=t {
            val = self.g2_step(k, self.g_at_one(u, k - u - 1), val);
        }
        val
    }

    /// G2′(u, t) for t ≥ u.
    pub fn g2p(&self, u: usize, t: usize) -> R {
        let mut val = self.epsilon.one();
        for k in u + 1..=t {
            val = self.g2_step(k, self.g_at_one(u, k - u), val);
        }
        val
    }

    /// (1 − b(k))·g + b(k)·a(k−1)·prev
    fn g2_step(&self, k: usize, g: R, prev: R) -> R {
        let one = self.epsilon.one();
        (one - self.b[k].clone()) * g + self.b[k].clone() * self.a[k - 1].clone() * prev
    }

    /// Columns G2(t, u) for t < u and G2′(t, u) for t ≤ u, computed directly.
    fn columns(&self, u: usize) -> (Vec<R>, Vec<R>) {
        let g2 = (0..u).map(|t| self.g2(t, u)).collect();
        let g2p = (0..=u).map(|t| self.g2p(t, u)).collect();
        (g2, g2p)
    }

    /// Runs the H/G1 sweep for outer depth `u`, calling `visit(t, h_row, g1_row)`
    /// for each inner depth t = 0..=u. `h_row[s]` is H(u, t, s) (entry 0 is
    /// meaningless when t = u), `g1_row[s]` is G1(u, t, s).
    fn sweep<F: FnMut(usize, &[R], &[R])>(&self, u: usize, g2_col: &[R], g2p_col: &[R], mut visit: F) {
        let one = self.epsilon.one();
        let mut h_prev: Vec<R> = Vec::new();
        for t in 0..=u {
            let mut g1_row = Vec::with_capacity(2 * t);
            if t >= 1 {
                g1_row.push(match self.variant {
                    RecursionVariant::AsPrinted => g2p_col[t].clone(),
                    RecursionVariant::Swapped => one.clone(),
                });
                let bt = self.b[t].clone();
                let off = one.clone() - bt.clone();
                for s in 1..2 * t {
                    let v = off.clone() * self.g_at_one(u, u - t + s)
                        + bt.clone() * h_prev[s - 1].clone();
                    g1_row.push(v);
                }
            }
            let at = self.a[t].clone();
            let mut h_row = Vec::with_capacity(2 * t + 1);
            h_row.push(if t < u {
                match self.variant {
                    RecursionVariant::AsPrinted => at.clone() * g2_col[t].clone(),
                    RecursionVariant::Swapped => at.clone(),
                }
            } else {
                self.epsilon.zero()
            });
            for s in 1..=2 * t {
                h_row.push(at.clone() * g1_row[s - 1].clone());
            }
            visit(t, &h_row, &g1_row);
            h_prev = h_row;
        }
    }

    fn advance_columns(&mut self, u: usize) {
        let one = self.epsilon.one();
        if u == 0 {
            self.g2_col.clear();
            self.g2p_col = vec![one];
            return;
        }
        for t in 0..u.saturating_sub(1) {
            let g = self.g_at_one(t, u - t - 1);
            let prev = self.g2_col[t].clone();
            self.g2_col[t] = self.g2_step(u, g, prev);
        }
        self.g2_col.push(one.clone());
        for t in 0..u {
            let g = self.g_at_one(t, u - t);
            let prev = self.g2p_col[t].clone();
            self.g2p_col[t] = self.g2_step(u, g, prev);
        }
        self.g2p_col.push(one);
    }

    /// Sweeps outer depths up to `t` (≤ capacity) and fills H2 rows up to `t`.
    pub fn ensure(&mut self, t: usize) {
        assert!(t <= self.capacity, "depth {t} beyond table capacity {}", self.capacity);
        while self.processed() <= t {
            let u = self.processed();
            self.advance_columns(u);
            let mut out = Sweep {
                h_diag: Vec::new(),
                g1_diag: Vec::new(),
            };
            self.sweep(u, &self.g2_col, &self.g2p_col, |depth, h_row, g1_row| {
                if depth == u {
                    out.h_diag = h_row[1..].to_vec();
                    out.g1_diag = g1_row.to_vec();
                }
            });
            self.h_diag.push(out.h_diag);
            self.g1_diag.push(out.g1_diag);
            if u + 1 <= self.capacity {
                let row = self.h2_row(u + 1);
                self.h2.push(row);
            }
        }
    }

    /// H2(t, s) for s = 1..=2t-1; needs the diagonal of depth t-1.
    fn h2_row(&self, t: usize) -> Vec<R> {
        let Some(c2) = &self.c2 else {
            return Vec::new();
        };
        let one = self.epsilon.one();
        let two = one.lift(2.0);
        let c = c2[t].clone();
        let at = self.a[t - 1].clone();
        let mut row = Vec::with_capacity(2 * t - 1);
        row.push(one.clone() - c.clone() * (one.clone() - at.clone()));
        for s in 2..2 * t {
            let f = self.f(t - 1, s, &one);
            let h = self.h_diag[t - 1][s - 2].clone();
            let both_known = one.clone() - two.clone() * f + at.clone() * h;
            row.push(one.clone() - c.clone() * both_known);
        }
        row
    }

    /// H(u, u, s) for 1 ≤ s ≤ 2u.
    pub fn h_diagonal(&self, u: usize, s: usize) -> &R {
        &self.h_diag[u][s - 1]
    }

    /// G1(u, u, s) for 0 ≤ s < 2u.
    pub fn g1_diagonal(&self, u: usize, s: usize) -> &R {
        &self.g1_diag[u][s]
    }

    /// H2(t, s) for 1 ≤ t ≤ processed, 1 ≤ s ≤ 2t-1; `None` when ρ''(1) = 0.
    pub fn h2(&self, t: usize, s: usize) -> Option<&R> {
        self.c2.as_ref()?;
        self.h2.get(t)?.get(s - 1)
    }

    /// H(u, t, s) for any reachable triple (t ≤ u, s ≤ 2t, not t = u with s = 0).
    /// Recomputes the sweep for `u`.
    pub fn h(&self, u: usize, t: usize, s: usize) -> Option<R> {
        if t > u || s > 2 * t || (t == u && s == 0) || u > self.capacity {
            return None;
        }
        let (g2, g2p) = self.columns(u);
        let mut out = None;
        self.sweep(u, &g2, &g2p, |depth, h_row, _| {
            if depth == t {
                out = Some(h_row[s].clone());
            }
        });
        out
    }

    /// G1(u, t, s) for 1 ≤ t ≤ u, s < 2t. Recomputes the sweep for `u`.
    pub fn g1(&self, u: usize, t: usize, s: usize) -> Option<R> {
        if t == 0 || t > u || s >= 2 * t || u > self.capacity {
            return None;
        }
        let (g2, g2p) = self.columns(u);
        let mut out = None;
        self.sweep(u, &g2, &g2p, |depth, _, g1_row| {
            if depth == t {
                out = Some(g1_row[s].clone());
            }
        });
        out
    }

    /// γ(ε, t): the single-cycle part of the 1/n coefficient.
    pub fn gamma(&mut self, t: usize) -> R {
        self.gamma_terms(t).total()
    }

    /// γ(ε, t) split by where the cycle closes.
    pub fn gamma_terms(&mut self, t: usize) -> GammaTerms<R> {
        let zero = self.epsilon.zero();
        let mut terms = GammaTerms {
            f12: zero.clone(),
            f34: zero.clone(),
            f56: zero.clone(),
        };
        if t == 0 {
            return terms;
        }
        self.ensure(t);
        let one = self.epsilon.one();
        let half = one.lift(0.5);
        let q_root = self.de.q(t + 1).clone();

        // bifurcation at a variable node at depth s1 ≥ 1
        if let Some(a2) = &self.a2 {
            for s1 in 1..t {
                let u = t - s1;
                let bu = self.b[u + 1].clone();
                let (ga, gb) = &self.g[t][s1 - 1];
                for s2 in 2 * s1 + 1..=2 * t {
                    let g1 = self.g1_diag[u][s2 - 2 * s1 - 1].clone();
                    let inner =
                        one.clone() - bu.clone() * (one.clone() - a2[u].clone() * g1);
                    let term = self.coef12.clone()
                        * self.powers[s2 - s1 - 2].clone()
                        * q_root.clone()
                        * (ga.clone() + gb.clone() * inner);
                    terms.f12 = terms.f12.clone() + term;
                }
            }
        }

        // bifurcation at a check node
        if self.c2.is_some() {
            for s1 in 0..t {
                let u = t - s1;
                let (ga, gb) = &self.g[t][s1];
                for s2 in 2 * s1 + 2..=2 * t {
                    let h2 = self.h2[u][s2 - 2 * s1 - 2].clone();
                    let term = self.coef34.clone()
                        * self.powers[s2 - s1 - 2].clone()
                        * q_root.clone()
                        * (ga.clone() + gb.clone() * h2);
                    terms.f34 = terms.f34.clone() + term;
                }
            }
        }

        // cycle through the root
        for s in 1..=2 * t {
            let term = half.clone() * self.powers[s].clone() * self.h_diag[t][s - 1].clone();
            terms.f56 = terms.f56.clone() + term;
        }
        terms
    }

    /// β(ε, t) for a regular ensemble: the tree-deficit part of the coefficient.
    pub fn beta(&self, t: usize) -> Option<R> {
        let (l, r) = self.ens.as_regular()?;
        Some(super::beta_from_trace(l, r, &self.epsilon, self.de.p(t), t))
    }

    /// Visits every memoized value and every H/G1/G2/G2′ entry reachable up to
    /// the processed depth, tagged by table name.
    pub fn visit_all<F: FnMut(&'static str, &R)>(&self, mut visit: F) {
        let one = self.epsilon.one();
        let zero = self.epsilon.zero();
        let depth = self.processed();
        for t in 0..depth.min(self.capacity + 1) {
            for s in 0..self.g[t].len() {
                visit("g", &self.g(t, s, &zero));
                visit("g", &self.g(t, s, &one));
                if s >= 1 {
                    visit("f", &self.f(t, s, &zero));
                    visit("f", &self.f(t, s, &one));
                }
            }
        }
        for u in 0..depth {
            let (g2, g2p) = self.columns(u);
            for v in g2.iter() {
                visit("G2", v);
            }
            for v in g2p.iter() {
                visit("G2'", v);
            }
            self.sweep(u, &g2, &g2p, |t, h_row, g1_row| {
                let start = usize::from(t == u);
                for v in &h_row[start..] {
                    visit("H", v);
                }
                for v in g1_row {
                    visit("G1", v);
                }
            });
        }
        for row in &self.h2 {
            for v in row {
                visit("H2", v);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tables(l: u32, r: u32, eps: f64, cap: usize) -> RecursionTables<f64> {
        let ens = DegreeDistribution::regular(l, r).unwrap();
        RecursionTables::new(&ens, eps, cap, 53, RecursionVariant::AsPrinted)
    }

    /// g and f straight from their recursive definitions, one p at a time.
    fn g_naive(tb: &RecursionTables<f64>, t: usize, s: usize, p: f64) -> f64 {
        if s == 0 {
            return p;
        }
        if t == 0 {
            return 1.0;
        }
        1.0 - tb.b[t] * (1.0 - f_naive(tb, t - 1, s, p))
    }

    fn f_naive(tb: &RecursionTables<f64>, t: usize, s: usize, p: f64) -> f64 {
        if t == 0 {
            return *tb.epsilon();
        }
        tb.a[t] * g_naive(tb, t, s - 1, p)
    }

    #[test]
    fn affine_g_matches_recursive_definition() {
        let tb = tables(3, 6, 0.41, 6);
        for t in 0..=6 {
            for s in 0..=13 {
                for p in [0.0, 0.3, 0.77, 1.0] {
                    let direct = g_naive(&tb, t, s, p);
                    assert!((tb.g(t, s, &p) - direct).abs() < 1e-14, "g({t},{s},{p})");
                    if s >= 1 {
                        let direct = f_naive(&tb, t, s, p);
                        assert!((tb.f(t, s, &p) - direct).abs() < 1e-14);
                    }
                }
            }
        }
    }

    #[test]
    fn base_cases() {
        let tb = tables(2, 3, 0.4, 4);
        assert_eq!(tb.f(0, 3, &0.2), 0.4);
        assert_eq!(tb.g(3, 0, &0.2), 0.2);
        assert_eq!(tb.g(0, 2, &0.2), 1.0);
        assert_eq!(tb.g2(1, 2), 1.0);
        assert_eq!(tb.g2p(2, 2), 1.0);
    }

    #[test]
    fn incremental_columns_match_direct() {
        let mut tb = tables(3, 4, 0.5, 8);
        tb.ensure(8);
        let (g2, g2p) = tb.columns(8);
        for (x, y) in tb.g2_col.iter().zip(&g2) {
            assert!((x - y).abs() < 1e-15);
        }
        for (x, y) in tb.g2p_col.iter().zip(&g2p) {
            assert!((x - y).abs() < 1e-15);
        }
    }

    #[test]
    fn diagonals_match_full_sweep() {
        let mut tb = tables(3, 6, 0.43, 5);
        tb.ensure(5);
        for u in 1..=5 {
            for s in 1..=2 * u {
                assert_eq!(tb.h(u, u, s).unwrap(), *tb.h_diagonal(u, s));
            }
            for s in 0..2 * u {
                assert_eq!(tb.g1(u, u, s).unwrap(), *tb.g1_diagonal(u, s));
            }
        }
        assert!(tb.h(3, 3, 0).is_none());
        assert!(tb.h(3, 1, 3).is_none());
        assert!(tb.g1(3, 0, 0).is_none());
    }

    #[test]
    fn h2_double_edge_branch() {
        let mut tb = tables(3, 6, 0.3, 3);
        tb.ensure(3);
        let t = 2;
        let c = tb.c2.as_ref().unwrap()[t];
        let expected = 1.0 - c * (1.0 - tb.a[t - 1]);
        assert!((tb.h2(t, 1).unwrap() - expected).abs() < 1e-15);
        // ρ''(1) = 0 for check degree 2
        let mut tb = tables(3, 2, 0.3, 3);
        tb.ensure(3);
        assert!(tb.h2(2, 1).is_none());
    }

    #[test]
    fn one_iteration_f34_term() {
        // F34(1,0,2) for (2,3) reduces to ½λ'(1)ρ''(1)·Q(2)·H2(1,1) = ε²P(1)
        let mut tb = tables(2, 3, 0.4, 1);
        tb.ensure(1);
        let q2 = *tb.trace().q(2);
        let f34 = 0.5 * 1.0 * 2.0 * q2 * tb.h2(1, 1).unwrap();
        assert!((f34 - 0.1024).abs() < 1e-15);
    }
}
