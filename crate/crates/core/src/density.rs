//! Infinite-length density evolution on the BEC.
//!
//! `Q(t) = ε λ(P(t-1))` is the erasure probability of variable-to-check
//! messages at round `t`, `P(t) = 1 − ρ(1 − Q(t))` that of check-to-variable
//! messages, with `P(0) = 1`. (Some texts swap the "into check"/"into
//! variable" labels; the recursion is what matters.)

use crate::ensemble::{DegreeDistribution, Poly};
use crate::error::{check_unit, Result};
use crate::real::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct DeTrace<R = f64> {
    pub epsilon: R,
    /// P(0..=t)
    p: Vec<R>,
    /// Q(1..=t), stored at index t-1
    q: Vec<R>,
}

impl<R: Real> DeTrace<R> {
    /// Runs `t` rounds starting from `P(0) = 1`.
    pub fn run(ens: &DegreeDistribution, epsilon: R, t: usize) -> Self {
        let mut trace = DeTrace {
            p: vec![epsilon.one()],
            q: Vec::with_capacity(t),
            epsilon,
        };
        trace.extend(ens, t);
        trace
    }

    /// Continues the recursion until the trace has `t` rounds.
    pub fn extend(&mut self, ens: &DegreeDistribution, t: usize) {
        while self.depth() < t {
            let prev = self.p.last().expect("P(0) always present");
            let q = self.epsilon.clone() * ens.eval_in(Poly::Lambda, 0, prev);
            let mut p = ens.rho_complement(&q);
            // the exact recursion is non-increasing; don't let rounding at a
            // fixed point flip-flop by an ulp
            if p > *prev {
                p = prev.clone();
            }
            self.q.push(q);
            self.p.push(p);
        }
    }

    /// Number of completed rounds.
    pub fn depth(&self) -> usize {
        self.q.len()
    }

    pub fn p(&self, t: usize) -> &R {
        &self.p[t]
    }

    /// Q(t) for `t ≥ 1`.
    pub fn q(&self, t: usize) -> &R {
        assert!(t >= 1, "Q(t) is defined for t >= 1");
        &self.q[t - 1]
    }

    pub fn p_values(&self) -> &[R] {
        &self.p
    }

    pub fn q_values(&self) -> &[R] {
        &self.q
    }

    /// ε L(P(t)): erasure probability of a bit after `t` rounds.
    pub fn bit_erasure(&self, ens: &DegreeDistribution, t: usize) -> R {
        self.epsilon.clone() * ens.eval_in(Poly::L, 0, self.p(t))
    }
}

/// Double-precision trace of `t` rounds at channel erasure probability `epsilon`.
pub fn evolve(ens: &DegreeDistribution, epsilon: f64, t: usize) -> Result<DeTrace> {
    check_unit("epsilon", epsilon)?;
    Ok(DeTrace::run(ens, epsilon, t))
}

/// Asymptotic bit erasure probability `P_b(∞, ε, t) = ε L(P(t))`.
pub fn pb_infinite(ens: &DegreeDistribution, epsilon: f64, t: usize) -> Result<f64> {
    Ok(evolve(ens, epsilon, t)?.bit_erasure(ens, t))
}

/// Iterates density evolution until it settles.
///
/// Returns `true` when `P(t) < 1e-12` is reached, `false` when the erasure
/// probability stalls above `1e-6` or `t_max` rounds pass first.
pub fn converges(ens: &DegreeDistribution, epsilon: f64, t_max: usize) -> bool {
    let mut p = 1.0f64;
    for _ in 0..t_max {
        let next = ens.rho_complement(&(epsilon * ens.eval_in(Poly::Lambda, 0, &p)));
        if next < 1e-12 {
            return true;
        }
        if next > 1e-6 && (p - next).abs() < 1e-14 {
            return false;
        }
        p = next;
    }
    false
}

/// Ratio x / λ(1 − ρ(1 − x)); density evolution converges at ε iff ε is below it for all x.
fn fixed_point_ratio(ens: &DegreeDistribution, x: f64) -> f64 {
    x / ens.eval_in(Poly::Lambda, 0, &ens.rho_complement(&x))
}

/// BP threshold ε_BP = inf over x ∈ (0, 1] of x / λ(1 − ρ(1 − x)).
///
/// The infimum is located on a logarithmic grid and refined by golden-section
/// search; for λ₂ > 0 the x → 0 limit 1/(λ'(0)ρ'(1)) is included.
pub fn threshold(ens: &DegreeDistribution) -> f64 {
    const GRID: usize = 4000;
    let lo_exp = -12.0f64;
    let xs: Vec<f64> = (0..=GRID)
        .map(|i| 10f64.powf(lo_exp * (1.0 - i as f64 / GRID as f64)))
        .collect();
    let mut best = (f64::INFINITY, 0usize);
    for (i, &x) in xs.iter().enumerate() {
        let v = fixed_point_ratio(ens, x);
        if v < best.0 {
            best = (v, i);
        }
    }
    let (a, b) = (
        xs[best.1.saturating_sub(1)],
        xs[(best.1 + 1).min(GRID)],
    );
    let refined = golden_min(|x| fixed_point_ratio(ens, x), a, b, 1e-13);
    let mut eps = best.0.min(refined);

    let slope = ens.eval(Poly::Lambda, 1, 0.0).unwrap_or(0.0) * ens.at_one(Poly::Rho, 1);
    if slope > 0.0 {
        eps = eps.min(1.0 / slope);
    }
    eps.min(1.0)
}

fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol * (1.0 + a.abs()) {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    fc.min(fd)
}
