//! The 1/n coefficient α(ε, t) = β(ε, t) + γ(ε, t) of the finite-length bit
//! erasure probability under BP decoding.
//!
//! β and γ individually grow like K^{2t} with K = λ'(1)ρ'(1), while their sum
//! stays moderate, so results are computed in extended precision. The
//! requested mantissa is padded by `2t·log2 K + 32` guard bits to absorb that
//! cancellation; [`AlphaResult::working_bits`] reports the total.

mod tables;

pub use tables::{GammaTerms, RecursionTables, RecursionVariant};

use std::fmt;
use std::str::FromStr;

use crate::ensemble::{DegreeDistribution, Poly};
use crate::error::{check_unit, Error, Result};
use crate::real::{Hp, IntoValue, Real, Value};

pub const DEFAULT_MANTISSA_BITS: usize = 256;
const GUARD_BITS: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrecisionMode {
    Double,
    High,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrecisionConfig {
    pub mantissa_bits: usize,
    pub mode: PrecisionMode,
}

impl Default for PrecisionConfig {
    fn default() -> Self {
        PrecisionConfig {
            mantissa_bits: DEFAULT_MANTISSA_BITS,
            mode: PrecisionMode::High,
        }
    }
}

impl PrecisionConfig {
    pub fn double() -> Self {
        PrecisionConfig {
            mantissa_bits: 53,
            mode: PrecisionMode::Double,
        }
    }

    /// Extended precision targeting `bits` of accuracy in the result; guard
    /// bits are added on top, so even 53 is safe at large t. Plain f64 without
    /// guard bits is [`PrecisionConfig::double`].
    pub fn from_bits(bits: usize) -> Result<Self> {
        if bits < 53 {
            return Err(Error::Precision(format!(
                "mantissa_bits must be at least 53, got {bits}"
            )));
        }
        Ok(PrecisionConfig {
            mantissa_bits: bits,
            mode: PrecisionMode::High,
        })
    }

    /// Bits actually carried for tables of depth up to `capacity`.
    pub fn working_bits(&self, ens: &DegreeDistribution, capacity: usize) -> usize {
        match self.mode {
            PrecisionMode::Double => 53,
            PrecisionMode::High => {
                let log_k = ens.branching_factor().log2().max(0.0);
                self.mantissa_bits + (2.0 * capacity as f64 * log_k).ceil() as usize + GUARD_BITS
            }
        }
    }
}

impl fmt::Display for PrecisionConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.mode {
            PrecisionMode::Double => write!(f, "double"),
            PrecisionMode::High => write!(f, "{} bits", self.mantissa_bits),
        }
    }
}

impl FromStr for RecursionVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        RecursionVariant::parse(s)
            .ok_or_else(|| Error::Precision(format!("unknown recursion variant {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlphaResult {
    pub beta: Value,
    pub gamma: Value,
    pub alpha: Value,
    pub epsilon: f64,
    pub t: usize,
    pub precision: PrecisionConfig,
    pub working_bits: usize,
}

enum Tables {
    Double(RecursionTables<f64>),
    High(RecursionTables<Hp>),
}

/// Recursion tables for one (ensemble, ε) at a fixed precision, reusable for
/// every t up to the capacity.
pub struct ScalingContext {
    tables: Tables,
    precision: PrecisionConfig,
    working_bits: usize,
    epsilon: f64,
}

impl ScalingContext {
    pub fn new(
        ens: &DegreeDistribution,
        epsilon: f64,
        capacity: usize,
        precision: PrecisionConfig,
        variant: RecursionVariant,
    ) -> Result<Self> {
        check_unit("epsilon", epsilon)?;
        let working_bits = precision.working_bits(ens, capacity);
        let tables = match precision.mode {
            PrecisionMode::Double => Tables::Double(RecursionTables::new(
                ens, epsilon, capacity, 53, variant,
            )),
            PrecisionMode::High => Tables::High(RecursionTables::new(
                ens,
                epsilon,
                capacity,
                working_bits,
                variant,
            )),
        };
        Ok(ScalingContext {
            tables,
            precision,
            working_bits,
            epsilon,
        })
    }

    pub fn capacity(&self) -> usize {
        match &self.tables {
            Tables::Double(tb) => tb.capacity(),
            Tables::High(tb) => tb.capacity(),
        }
    }

    pub fn working_bits(&self) -> usize {
        self.working_bits
    }

    fn check_depth(&self, t: usize) -> Result<()> {
        if t > self.capacity() {
            return Err(Error::domain("t", t as f64, "[0, capacity]"));
        }
        Ok(())
    }

    pub fn gamma(&mut self, t: usize) -> Result<Value> {
        self.check_depth(t)?;
        Ok(match &mut self.tables {
            Tables::Double(tb) => tb.gamma(t).into_value(),
            Tables::High(tb) => tb.gamma(t).into_value(),
        })
    }

    /// γ split into its three term families, converted to f64.
    pub fn gamma_terms(&mut self, t: usize) -> Result<GammaTerms<f64>> {
        self.check_depth(t)?;
        fn cast<R: Real>(g: GammaTerms<R>) -> GammaTerms<f64> {
            GammaTerms {
                f12: g.f12.to_f64(),
                f34: g.f34.to_f64(),
                f56: g.f56.to_f64(),
            }
        }
        Ok(match &mut self.tables {
            Tables::Double(tb) => cast(tb.gamma_terms(t)),
            Tables::High(tb) => cast(tb.gamma_terms(t)),
        })
    }

    /// β for regular ensembles; unsupported otherwise.
    pub fn beta(&self, t: usize) -> Result<Value> {
        self.check_depth(t)?;
        let unsupported = || {
            Error::UnsupportedEnsemble(
                "beta(epsilon, t) is only available for regular ensembles".into(),
            )
        };
        Ok(match &self.tables {
            Tables::Double(tb) => tb.beta(t).ok_or_else(unsupported)?.into_value(),
            Tables::High(tb) => tb.beta(t).ok_or_else(unsupported)?.into_value(),
        })
    }

    pub fn alpha(&mut self, t: usize) -> Result<AlphaResult> {
        self.check_depth(t)?;
        fn combine<R: Real + IntoValue>(tb: &mut RecursionTables<R>, t: usize) -> Option<[Value; 3]> {
            let beta = tb.beta(t)?;
            let gamma = tb.gamma(t);
            let alpha = beta.clone() + gamma.clone();
            Some([beta.into_value(), gamma.into_value(), alpha.into_value()])
        }
        let parts = match &mut self.tables {
            Tables::Double(tb) => combine(tb, t),
            Tables::High(tb) => combine(tb, t),
        };
        let [beta, gamma, alpha] = parts.ok_or_else(|| {
            Error::UnsupportedEnsemble(
                "alpha needs beta(epsilon, t), which is only available for regular ensembles"
                    .into(),
            )
        })?;
        Ok(AlphaResult {
            beta,
            gamma,
            alpha,
            epsilon: self.epsilon,
            t,
            precision: self.precision,
            working_bits: self.working_bits,
        })
    }

    /// Calls `visit` on every value held in or derivable from the tables.
    pub fn visit_table_values<F: FnMut(&'static str, f64)>(&mut self, t: usize, mut visit: F) -> Result<()> {
        self.check_depth(t)?;
        match &mut self.tables {
            Tables::Double(tb) => {
                tb.ensure(t);
                tb.visit_all(|name, v| visit(name, *v));
            }
            Tables::High(tb) => {
                tb.ensure(t);
                tb.visit_all(|name, v| visit(name, v.to_f64()));
            }
        }
        Ok(())
    }

    pub fn tables_f64(&mut self) -> Option<&mut RecursionTables<f64>> {
        match &mut self.tables {
            Tables::Double(tb) => Some(tb),
            Tables::High(_) => None,
        }
    }

    pub fn tables_high(&mut self) -> Option<&mut RecursionTables<Hp>> {
        match &mut self.tables {
            Tables::High(tb) => Some(tb),
            Tables::Double(_) => None,
        }
    }
}

/// γ(ε, t) for any ensemble.
pub fn gamma(ens: &DegreeDistribution, epsilon: f64, t: usize, prec: PrecisionConfig) -> Result<Value> {
    gamma_with(ens, epsilon, t, prec, RecursionVariant::AsPrinted)
}

pub fn gamma_with(
    ens: &DegreeDistribution,
    epsilon: f64,
    t: usize,
    prec: PrecisionConfig,
    variant: RecursionVariant,
) -> Result<Value> {
    ScalingContext::new(ens, epsilon, t, prec, variant)?.gamma(t)
}

/// β(ε, t) for the (l, r)-regular ensemble.
pub fn beta_regular(l: u32, r: u32, epsilon: f64, t: usize, prec: PrecisionConfig) -> Result<Value> {
    let ens = DegreeDistribution::regular(l, r)?;
    check_unit("epsilon", epsilon)?;
    // β only needs the density evolution trace, not the tables
    let bits = prec.working_bits(&ens, t);
    Ok(match prec.mode {
        PrecisionMode::Double => beta_closed_form(&ens, epsilon, t).into_value(),
        PrecisionMode::High => beta_closed_form(&ens, Hp::new(epsilon, bits), t).into_value(),
    })
}

fn beta_closed_form<R: Real>(ens: &DegreeDistribution, epsilon: R, t: usize) -> R {
    let (l, r) = ens.as_regular().expect("regular ensemble");
    let de = crate::density::DeTrace::run(ens, epsilon.clone(), t);
    beta_from_trace(l, r, &epsilon, de.p(t), t)
}

/// −½·l(r−1)·Σ_{j<t} K^j·K^t·ε·P(t)^l with K = (l−1)(r−1); the geometric sum
/// is the K = 1 safe form of (1 − K^t)/(1 − K).
pub(crate) fn beta_from_trace<R: Real>(l: u32, r: u32, epsilon: &R, p_t: &R, t: usize) -> R {
    if t == 0 {
        return epsilon.zero();
    }
    let k = epsilon.lift(((l - 1) * (r - 1)) as f64);
    let mut geometric = epsilon.zero();
    let mut kt = epsilon.one();
    for _ in 0..t {
        geometric = geometric + kt.clone();
        kt = kt * k.clone();
    }
    let prefactor = epsilon.lift(-0.5 * l as f64 * (r - 1) as f64);
    prefactor * geometric * kt * epsilon.clone() * p_t.powi(l)
}

/// α(ε, t) = β(ε, t) + γ(ε, t); regular ensembles only.
pub fn alpha(ens: &DegreeDistribution, epsilon: f64, t: usize, prec: PrecisionConfig) -> Result<AlphaResult> {
    alpha_with(ens, epsilon, t, prec, RecursionVariant::AsPrinted)
}

pub fn alpha_with(
    ens: &DegreeDistribution,
    epsilon: f64,
    t: usize,
    prec: PrecisionConfig,
    variant: RecursionVariant,
) -> Result<AlphaResult> {
    require_regular(ens)?;
    ScalingContext::new(ens, epsilon, t, prec, variant)?.alpha(t)
}

/// α(ε, t) for t = 0..=t_max, sharing one set of tables.
pub fn alpha_sweep(
    ens: &DegreeDistribution,
    epsilon: f64,
    t_max: usize,
    prec: PrecisionConfig,
    variant: RecursionVariant,
) -> Result<Vec<AlphaResult>> {
    require_regular(ens)?;
    let mut ctx = ScalingContext::new(ens, epsilon, t_max, prec, variant)?;
    (0..=t_max).map(|t| ctx.alpha(t)).collect()
}

fn require_regular(ens: &DegreeDistribution) -> Result<()> {
    if ens.as_regular().is_none() {
        return Err(Error::UnsupportedEnsemble(format!(
            "{ens}: beta(epsilon, t) is only available for regular ensembles, so alpha is too"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub enum LimitOutcome {
    /// α settled: successive values stayed within tolerance for a full window.
    Converged(f64),
    /// |α| kept growing; `rate` is the fitted per-iteration growth factor.
    Diverged { rate: f64 },
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitResult {
    pub outcome: LimitOutcome,
    /// α(ε, t) for t = 0..=last evaluated depth
    pub history: Vec<AlphaResult>,
}

impl LimitResult {
    pub fn last(&self) -> &AlphaResult {
        self.history.last().expect("history starts at t = 0")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitOptions {
    pub t_max: usize,
    pub rel_tol: f64,
    /// differences below this count as settled even when α is ≈ 0
    pub abs_tol: f64,
    pub window: usize,
    pub variant: RecursionVariant,
}

impl Default for LimitOptions {
    fn default() -> Self {
        LimitOptions {
            t_max: 400,
            rel_tol: 1e-8,
            abs_tol: 1e-12,
            window: 10,
            variant: RecursionVariant::AsPrinted,
        }
    }
}

/// Iterates α(ε, t) in t until it settles, grows without bound, or `t_max` is hit.
///
/// Tables are built for a small depth first and rebuilt at twice the depth
/// when exhausted, so the guard precision tracks the depth actually reached.
pub fn alpha_limit(
    ens: &DegreeDistribution,
    epsilon: f64,
    prec: PrecisionConfig,
    opts: LimitOptions,
) -> Result<LimitResult> {
    require_regular(ens)?;
    check_unit("epsilon", epsilon)?;
    if !(opts.rel_tol > 0.0 && opts.rel_tol < 1.0) {
        return Err(Error::domain("rel_tol", opts.rel_tol, "(0, 1)"));
    }
    let window = opts.window.max(1);
    let mut capacity = 32.min(opts.t_max).max(1);
    let mut ctx = ScalingContext::new(ens, epsilon, capacity, prec, opts.variant)?;
    let mut history = vec![ctx.alpha(0)?];
    let mut streak = 0usize;
    for t in 1..=opts.t_max {
        if t > capacity {
            capacity = (2 * capacity).min(opts.t_max);
            ctx = ScalingContext::new(ens, epsilon, capacity, prec, opts.variant)?;
        }
        let res = ctx.alpha(t)?;
        let cur = res.alpha.to_f64();
        let prev = history[t - 1].alpha.to_f64();
        history.push(res);
        let settled = cur.is_finite()
            && (cur - prev).abs() <= (opts.rel_tol * cur.abs()).max(opts.abs_tol);
        streak = if settled { streak + 1 } else { 0 };
        if streak >= window {
            return Ok(LimitResult {
                outcome: LimitOutcome::Converged(cur),
                history,
            });
        }
    }
    let outcome = growth_rate(&history, window)
        .map(|rate| LimitOutcome::Diverged { rate })
        .unwrap_or(LimitOutcome::Inconclusive);
    Ok(LimitResult { outcome, history })
}

/// Least-squares slope of log2|α| over the last `window + 1` depths, as a
/// growth factor; `None` unless |α| grew monotonically and the steps did not
/// shrink (a slowly contracting sequence is not divergent).
fn growth_rate(history: &[AlphaResult], window: usize) -> Option<f64> {
    if history.len() < window + 2 {
        return None;
    }
    let tail = &history[history.len() - window - 1..];
    let logs: Vec<f64> = tail.iter().map(|r| log2_abs(&r.alpha)).collect();
    if logs.iter().any(|x| !x.is_finite()) || logs.windows(2).any(|w| w[1] <= w[0]) {
        return None;
    }
    let values: Vec<f64> = tail.iter().map(|r| r.alpha.to_f64()).collect();
    let steps: Vec<f64> = values.windows(2).map(|w| (w[1] - w[0]).abs().log2()).collect();
    if steps.iter().any(|x| !x.is_finite()) || slope(&steps) < 0.0 {
        return None;
    }
    let rate = slope(&logs).exp2();
    (rate > 1.0).then_some(rate)
}

fn slope(ys: &[f64]) -> f64 {
    let n = ys.len() as f64;
    let mean_x = (n - 1.0) / 2.0;
    let mean_y = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (i, y) in ys.iter().enumerate() {
        let dx = i as f64 - mean_x;
        sxy += dx * (y - mean_y);
        sxx += dx * dx;
    }
    sxy / sxx
}

fn log2_abs(v: &Value) -> f64 {
    match v {
        Value::Double(x) => x.log2_abs(),
        Value::High(x) => x.log2_abs(),
    }
}

/// Error-floor coefficient ½·λ'(0)ρ'(1)ε / (1 − λ'(0)ρ'(1)ε).
pub fn errorfloor_coefficient(ens: &DegreeDistribution, epsilon: f64) -> Result<f64> {
    check_unit("epsilon", epsilon)?;
    let x = ens.eval(Poly::Lambda, 1, 0.0)? * ens.at_one(Poly::Rho, 1) * epsilon;
    if x >= 1.0 {
        return Err(Error::Pole(x));
    }
    Ok(0.5 * x / (1.0 - x))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reg(l: u32, r: u32) -> DegreeDistribution {
        DegreeDistribution::regular(l, r).unwrap()
    }

    fn history(values: impl Iterator<Item = f64>) -> Vec<AlphaResult> {
        values
            .enumerate()
            .map(|(t, a)| AlphaResult {
                beta: Value::Double(0.0),
                gamma: Value::Double(a),
                alpha: Value::Double(a),
                epsilon: 0.5,
                t,
                precision: PrecisionConfig::double(),
                working_bits: 53,
            })
            .collect()
    }

    #[test]
    fn growth_needs_non_shrinking_steps() {
        let geometric = history((0..30).map(|t| 1.1f64.powi(t)));
        let rate = growth_rate(&geometric, 10).unwrap();
        assert!((rate - 1.1).abs() < 1e-9);
        // monotone but contracting towards -100 in magnitude
        let settling = history((0..30).map(|t| -100.0 * (1.0 - 0.99f64.powi(t + 1))));
        assert_eq!(growth_rate(&settling, 10), None);
    }

    #[test]
    fn zero_iterations() {
        for prec in [PrecisionConfig::double(), PrecisionConfig::default()] {
            let res = alpha(&reg(3, 6), 0.3, 0, prec).unwrap();
            assert_eq!(res.alpha.to_f64(), 0.0);
            assert_eq!(res.beta.to_f64(), 0.0);
            assert_eq!(res.gamma.to_f64(), 0.0);
        }
    }

    #[test]
    fn one_iteration_two_three() {
        let prec = PrecisionConfig::default();
        let b = beta_regular(2, 3, 0.4, 1, prec).unwrap().to_f64();
        assert!((b + 0.65536).abs() < 1e-14);
        let g = gamma(&reg(2, 3), 0.4, 1, prec).unwrap().to_f64();
        assert!((g - 0.8992).abs() < 1e-14, "{g}");
        let terms = ScalingContext::new(&reg(2, 3), 0.4, 1, prec, RecursionVariant::AsPrinted)
            .unwrap()
            .gamma_terms(1)
            .unwrap();
        assert!((terms.f34 - 0.1024).abs() < 1e-15);
        assert_eq!(terms.f12, 0.0);
    }

    #[test]
    fn one_iteration_three_six_beta() {
        let b = beta_regular(3, 6, 0.3, 1, PrecisionConfig::default()).unwrap().to_f64();
        let p1: f64 = 1.0 - 0.7f64.powi(5);
        let expected = -75.0 * 0.3 * p1.powi(3);
        assert!((b - expected).abs() < 1e-12);
        assert!((b + 12.955).abs() < 1e-3);
    }

    #[test]
    fn beta_of_cycle_ensemble_uses_limit_form() {
        // K = 1: (1 − K^t)/(1 − K) → t, and P(t) = ε^t for (2,2)
        let b = beta_regular(2, 2, 0.3, 5, PrecisionConfig::double()).unwrap().to_f64();
        let expected = -0.5 * 2.0 * 5.0 * 0.3 * 0.3f64.powi(10);
        assert!((b - expected).abs() < 1e-15);
    }

    #[test]
    fn noiseless_channel_has_no_correction() {
        for (l, r) in [(2, 3), (3, 6), (4, 5)] {
            for t in 0..6 {
                let res = alpha(&reg(l, r), 0.0, t, PrecisionConfig::default()).unwrap();
                assert_eq!(res.gamma.to_f64(), 0.0);
                assert_eq!(res.beta.to_f64(), 0.0);
            }
        }
    }

    #[test]
    fn irregular_alpha_is_unsupported() {
        let ens = DegreeDistribution::from_json(r#"{"lambda": {"2": 0.5, "3": 0.5}, "rho": {"6": 1.0}}"#)
            .unwrap();
        assert!(matches!(
            alpha(&ens, 0.3, 3, PrecisionConfig::default()),
            Err(Error::UnsupportedEnsemble(_))
        ));
        assert!(gamma(&ens, 0.3, 3, PrecisionConfig::default()).is_ok());
    }

    #[test]
    fn fifty_three_bits_and_default_agree_at_small_depth() {
        let lo_prec = PrecisionConfig::from_bits(53).unwrap();
        for (l, r) in [(2, 3), (3, 6)] {
            for t in 1..=10 {
                let lo = alpha(&reg(l, r), 0.4, t, lo_prec).unwrap();
                let hi = alpha(&reg(l, r), 0.4, t, PrecisionConfig::default()).unwrap();
                let (a, b) = (lo.alpha.to_f64(), hi.alpha.to_f64());
                assert!((a - b).abs() <= 1e-6 * b.abs(), "({l},{r}) t={t}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn plain_double_loses_digits_to_cancellation() {
        // β and γ are ~K^{2t} apart from α, so f64 keeps about 16 − 2t·log10 K digits
        let lo = alpha(&reg(2, 3), 0.4, 10, PrecisionConfig::double()).unwrap();
        let hi = alpha(&reg(2, 3), 0.4, 10, PrecisionConfig::default()).unwrap();
        let (a, b) = (lo.alpha.to_f64(), hi.alpha.to_f64());
        assert!((a - b).abs() <= 1e-6 * b.abs(), "{a} vs {b}");
    }

    #[test]
    fn sweep_matches_single_calls() {
        let sweep = alpha_sweep(&reg(3, 5), 0.35, 8, PrecisionConfig::default(), RecursionVariant::AsPrinted).unwrap();
        for t in [1, 4, 8] {
            let single = alpha(&reg(3, 5), 0.35, t, PrecisionConfig::default()).unwrap();
            let (a, b) = (sweep[t].alpha.to_f64(), single.alpha.to_f64());
            assert!((a - b).abs() <= 1e-30 * b.abs().max(1.0) + 1e-60, "t={t}");
        }
    }

    #[test]
    fn precision_config_parsing() {
        assert!(PrecisionConfig::from_bits(40).is_err());
        assert_eq!(PrecisionConfig::from_bits(53).unwrap().mode, PrecisionMode::High);
        assert_eq!(PrecisionConfig::double().working_bits(&reg(3, 6), 40), 53);
        assert_eq!(PrecisionConfig::from_bits(300).unwrap().mantissa_bits, 300);
        let p = PrecisionConfig::default();
        assert_eq!(p.working_bits(&reg(2, 3), 10), 256 + 20 + 32);
    }

    #[test]
    fn errorfloor() {
        let c = errorfloor_coefficient(&reg(2, 3), 0.2).unwrap();
        assert!((c - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(errorfloor_coefficient(&reg(3, 6), 0.4).unwrap(), 0.0);
        assert!(matches!(errorfloor_coefficient(&reg(2, 3), 0.5), Err(Error::Pole(_))));
    }

    #[test]
    fn limit_converges_below_threshold() {
        let res = alpha_limit(&reg(2, 3), 0.2, PrecisionConfig::default(), LimitOptions::default()).unwrap();
        match res.outcome {
            LimitOutcome::Converged(v) => assert!((v - 1.0 / 3.0).abs() < 1e-6, "{v}"),
            other => panic!("{other:?}"),
        }
    }
}
