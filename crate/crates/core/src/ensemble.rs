//! Degree distribution pairs (λ, ρ) and their polynomials.
//!
//! λ and ρ are edge-perspective: λ(x) = Σ λ_d x^{d-1}. The node-perspective
//! variable distribution L(x) = Σ L_d x^d (and its check counterpart R) is
//! always derived from the edge-perspective one, never supplied.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{check_unit, Error, Result};
use crate::real::Real;

pub const MAX_DEGREE: u32 = 10_000;

/// Input sums within this distance of 1 are renormalized, anything further is rejected.
const NORMALIZATION_SLACK: f64 = 1e-6;

/// Which of the ensemble polynomials to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Poly {
    Lambda,
    Rho,
    /// Node-perspective variable degree distribution.
    L,
}

/// Sparse polynomial Σ c_d x^{d - shift}, stored by degree.
#[derive(Debug, Clone, PartialEq)]
struct Terms {
    coeffs: BTreeMap<u32, f64>,
    /// 1 for edge perspective (x^{d-1}), 0 for node perspective (x^d).
    shift: u32,
}

impl Terms {
    fn eval<R: Real>(&self, order: u8, x: &R) -> R {
        let mut acc = x.zero();
        for (&d, &c) in &self.coeffs {
            let power = d - self.shift;
            if (power as u64) < order as u64 {
                continue;
            }
            let falling = (0..order as u32).fold(1.0, |f, i| f * (power - i) as f64);
            let term = x.powi(power - order as u32) * x.lift(c * falling);
            acc = acc + term;
        }
        acc
    }

    fn eval_at_one(&self, order: u8) -> f64 {
        self.eval(order, &1.0f64)
    }
}

/// An LDPC ensemble described by its degree distribution pair.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeDistribution {
    lambda: Terms,
    rho: Terms,
    node_l: Terms,
    node_r: Terms,
    regular: Option<(u32, u32)>,
}

/// JSON descriptor: either `{"regular": [l, r]}` or explicit edge-perspective maps.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EnsembleSpec {
    Regular { regular: (u32, u32) },
    Irregular {
        lambda: BTreeMap<String, f64>,
        rho: BTreeMap<String, f64>,
    },
}

fn normalize(name: &str, raw: &BTreeMap<u32, f64>) -> Result<BTreeMap<u32, f64>> {
    if raw.is_empty() {
        return Err(Error::InvalidEnsemble(format!("{name} has no terms")));
    }
    let mut sum = 0.0;
    for (&d, &w) in raw {
        if d < 2 {
            return Err(Error::InvalidEnsemble(format!(
                "{name} has degree {d}; degrees must be at least 2"
            )));
        }
        if d > MAX_DEGREE {
            return Err(Error::InvalidEnsemble(format!(
                "{name} has degree {d}; maximum supported degree is {MAX_DEGREE}"
            )));
        }
        if !(w >= 0.0) || !w.is_finite() {
            return Err(Error::InvalidEnsemble(format!(
                "{name}_{d} = {w} is not a non-negative weight"
            )));
        }
        sum += w;
    }
    if (sum - 1.0).abs() > NORMALIZATION_SLACK {
        return Err(Error::InvalidEnsemble(format!(
            "{name} weights sum to {sum}, expected 1"
        )));
    }
    Ok(raw
        .iter()
        .filter(|(_, &w)| w > 0.0)
        .map(|(&d, &w)| (d, w / sum))
        .collect())
}

/// Node-perspective weights ∝ c_d / d.
fn node_perspective(edge: &BTreeMap<u32, f64>) -> BTreeMap<u32, f64> {
    let total: f64 = edge.iter().map(|(&d, &w)| w / d as f64).sum();
    edge.iter()
        .map(|(&d, &w)| (d, w / d as f64 / total))
        .collect()
}

impl DegreeDistribution {
    /// The (l, r)-regular ensemble: λ(x) = x^{l-1}, ρ(x) = x^{r-1}.
    pub fn regular(l: u32, r: u32) -> Result<Self> {
        for (name, d) in [("variable degree", l), ("check degree", r)] {
            if d < 2 {
                return Err(Error::InvalidEnsemble(format!(
                    "{name} {d} is below 2"
                )));
            }
        }
        let mut ens = Self::from_edge_perspective(
            &BTreeMap::from([(l, 1.0)]),
            &BTreeMap::from([(r, 1.0)]),
        )?;
        ens.regular = Some((l, r));
        Ok(ens)
    }

    /// Builds an ensemble from edge-perspective weights keyed by degree.
    pub fn from_edge_perspective(
        lambda: &BTreeMap<u32, f64>,
        rho: &BTreeMap<u32, f64>,
    ) -> Result<Self> {
        let lambda = normalize("lambda", lambda)?;
        let rho = normalize("rho", rho)?;
        let regular = match (lambda.len(), rho.len()) {
            (1, 1) => Some((
                *lambda.keys().next().unwrap(),
                *rho.keys().next().unwrap(),
            )),
            _ => None,
        };
        Ok(DegreeDistribution {
            node_l: Terms {
                coeffs: node_perspective(&lambda),
                shift: 0,
            },
            node_r: Terms {
                coeffs: node_perspective(&rho),
                shift: 0,
            },
            lambda: Terms {
                coeffs: lambda,
                shift: 1,
            },
            rho: Terms {
                coeffs: rho,
                shift: 1,
            },
            regular,
        })
    }

    pub fn from_spec(spec: &EnsembleSpec) -> Result<Self> {
        match spec {
            EnsembleSpec::Regular { regular: (l, r) } => Self::regular(*l, *r),
            EnsembleSpec::Irregular { lambda, rho } => {
                let parse = |name: &str, m: &BTreeMap<String, f64>| -> Result<BTreeMap<u32, f64>> {
                    m.iter()
                        .map(|(k, &w)| {
                            k.trim().parse::<u32>().map(|d| (d, w)).map_err(|_| {
                                Error::InvalidEnsemble(format!(
                                    "{name} key {k:?} is not an integer degree"
                                ))
                            })
                        })
                        .collect()
                };
                Self::from_edge_perspective(&parse("lambda", lambda)?, &parse("rho", rho)?)
            }
        }
    }

    /// Parses the JSON ensemble descriptor.
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: EnsembleSpec = serde_json::from_str(text)?;
        Self::from_spec(&spec)
    }

    pub fn to_spec(&self) -> EnsembleSpec {
        match self.regular {
            Some(lr) => EnsembleSpec::Regular { regular: lr },
            None => {
                let keyed = |t: &Terms| {
                    t.coeffs
                        .iter()
                        .map(|(d, &w)| (d.to_string(), w))
                        .collect::<BTreeMap<_, _>>()
                };
                EnsembleSpec::Irregular {
                    lambda: keyed(&self.lambda),
                    rho: keyed(&self.rho),
                }
            }
        }
    }

    /// `(l, r)` when both sides have a single degree.
    pub fn as_regular(&self) -> Option<(u32, u32)> {
        self.regular
    }

    pub fn lambda_coeffs(&self) -> &BTreeMap<u32, f64> {
        &self.lambda.coeffs
    }

    pub fn rho_coeffs(&self) -> &BTreeMap<u32, f64> {
        &self.rho.coeffs
    }

    pub fn l_coeffs(&self) -> &BTreeMap<u32, f64> {
        &self.node_l.coeffs
    }

    pub fn r_coeffs(&self) -> &BTreeMap<u32, f64> {
        &self.node_r.coeffs
    }

    fn terms(&self, poly: Poly) -> &Terms {
        match poly {
            Poly::Lambda => &self.lambda,
            Poly::Rho => &self.rho,
            Poly::L => &self.node_l,
        }
    }

    /// Value of the `order`-th derivative of `poly` at `x ∈ [0, 1]`.
    pub fn eval(&self, poly: Poly, order: u8, x: f64) -> Result<f64> {
        check_unit("x", x)?;
        if order > 2 {
            return Err(Error::domain("derivative order", order as f64, "{0, 1, 2}"));
        }
        Ok(self.eval_in(poly, order, &x))
    }

    /// Unchecked evaluation in any scalar type.
    pub fn eval_in<R: Real>(&self, poly: Poly, order: u8, x: &R) -> R {
        self.terms(poly).eval(order, x)
    }

    /// Derivative value at 1, e.g. λ'(1) = Σ λ_d (d-1).
    pub fn at_one(&self, poly: Poly, order: u8) -> f64 {
        self.terms(poly).eval_at_one(order)
    }

    /// 1 − ρ(1 − x), computed without cancellation for small `x`.
    pub fn rho_complement<R: Real>(&self, x: &R) -> R {
        let one = x.one();
        let y = one.clone() - x.clone();
        if x.to_f64() > 0.25 {
            return one - self.rho.eval(0, &y);
        }
        // 1 − y^k = x · Σ_{j<k} y^j
        let mut acc = x.zero();
        for (&d, &w) in &self.rho.coeffs {
            let k = d - 1;
            let mut geo = x.zero();
            for _ in 0..k {
                geo = geo * y.clone() + one.clone();
            }
            acc = acc + x.lift(w) * geo;
        }
        acc * x.clone()
    }

    /// Design rate 1 − ∫ρ / ∫λ.
    pub fn design_rate(&self) -> f64 {
        let integral = |t: &Terms| -> f64 { t.coeffs.iter().map(|(&d, &w)| w / d as f64).sum() };
        1.0 - integral(&self.rho) / integral(&self.lambda)
    }

    /// λ'(1)ρ'(1): growth factor of the expected neighbourhood per iteration.
    pub fn branching_factor(&self) -> f64 {
        self.at_one(Poly::Lambda, 1) * self.at_one(Poly::Rho, 1)
    }

    /// Average variable node degree L'(1).
    pub fn mean_variable_degree(&self) -> f64 {
        self.node_l.eval_at_one(1)
    }

    pub fn mean_check_degree(&self) -> f64 {
        self.node_r.eval_at_one(1)
    }
}

impl fmt::Display for DegreeDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some((l, r)) = self.regular {
            return write!(f, "({l},{r})-regular");
        }
        let side = |t: &Terms| {
            t.coeffs
                .iter()
                .map(|(d, w)| format!("{d}:{w}"))
                .collect::<Vec<_>>()
                .join(" ")
        };
        write!(f, "lambda[{}] rho[{}]", side(&self.lambda), side(&self.rho))
    }
}
