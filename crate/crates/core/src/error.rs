use thiserror::Error;

use crate::eigensolver::EigResult;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("function not resolved with {cap} Chebyshev points")]
    Resolution { cap: usize },

    #[error("point {x} outside domain [{a}, {b}]")]
    Domain { x: f64, a: f64, b: f64 },

    #[error("domain mismatch: [{}, {}] vs [{}, {}]", .0.0, .0.1, .1.0, .1.1)]
    DomainMismatch((f64, f64), (f64, f64)),

    #[error("ill-conditioned shift z = {re}{im:+}i: solution/rhs norm ratio {ratio:.3e}{}", node_suffix(.node))]
    IllConditionedShift {
        re: f64,
        im: f64,
        ratio: f64,
        node: Option<usize>,
    },

    #[error("evaluation point lies within {distance:.3e} of pole {pole}")]
    PoleProximity { pole: usize, distance: f64 },

    #[error("invalid argument: {0}")]
    Invalid(String),

    #[error("zero inner product: condition number is infinite")]
    Orthogonal,

    #[error("subspace iteration stagnated after {} iterations (residual {:.3e}); try a larger ell or m", .0.iterations, .0.residuals.last().copied().unwrap_or(f64::NAN))]
    Stagnation(Box<EigResult>),

    #[error("subspace rank collapsed to zero")]
    RankCollapse,

    #[error("iteration did not converge in {0} steps")]
    NoConvergence(usize),
}

fn node_suffix(node: &Option<usize>) -> String {
    match node {
        Some(k) => format!(" at filter node {k}"),
        None => String::new(),
    }
}

impl Error {
    pub(crate) fn at_node(self, k: usize) -> Self {
        match self {
            Error::IllConditionedShift { re, im, ratio, .. } => Error::IllConditionedShift {
                re,
                im,
                ratio,
                node: Some(k),
            },
            other => other,
        }
    }
}
