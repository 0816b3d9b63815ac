use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),

    #[error("{what} = {value} is outside its domain {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("unsupported ensemble: {0}")]
    UnsupportedEnsemble(String),

    #[error("error-floor coefficient has a pole: lambda'(0) rho'(1) epsilon = {0} >= 1")]
    Pole(f64),

    #[error("block length {n} is infeasible for this ensemble{}", nearest_hint(.nearest))]
    InfeasibleBlocklength { n: usize, nearest: Vec<usize> },

    #[error("exact enumeration needs at most {max} edges, got {edges}")]
    TooLarge { edges: usize, max: usize },

    #[error("invalid precision: {0}")]
    Precision(String),

    #[error("ensemble descriptor: {0}")]
    Json(#[from] serde_json::Error),
}

fn nearest_hint(nearest: &[usize]) -> String {
    match nearest {
        [] => String::new(),
        [n] => format!(" (nearest feasible: {n})"),
        ns => {
            let list: Vec<String> = ns.iter().map(|n| n.to_string()).collect();
            format!(" (nearest feasible: {})", list.join(", "))
        }
    }
}

impl Error {
    pub(crate) fn domain(what: &'static str, value: f64, domain: &'static str) -> Self {
        Error::Domain {
            what,
            value,
            domain,
        }
    }
}

/// Checks that `x` is a probability.
pub(crate) fn check_unit(what: &'static str, x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::domain(what, x, "[0, 1]"))
    }
}
