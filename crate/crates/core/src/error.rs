use thiserror::Error;

/// Errors raised by the numerical kernels and the models built on them.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{function}: argument {value} is a pole")]
    Pole { function: &'static str, value: f64 },

    #[error("{function}: domain error: {detail}")]
    Domain {
        function: &'static str,
        detail: String,
    },

    #[error("Meijer-G pole collision: b[{b_index}] = {b} and a[{a_index}] = {a} put poles of both families on the same point")]
    PoleCollision {
        a_index: usize,
        a: f64,
        b_index: usize,
        b: f64,
    },

    #[error("{function} failed to converge: {detail} (abscissa {abscissa:?}, truncation height {height:?})")]
    NonConvergence {
        function: &'static str,
        detail: String,
        abscissa: Vec<f64>,
        height: Vec<f64>,
    },

    #[error("internal consistency check failed in {function}: {detail}")]
    Consistency {
        function: &'static str,
        detail: String,
    },

    #[error("moment sequence is inconsistent: {detail} (mu2 = {mu2}, mu4 = {mu4}, mu6 = {mu6})")]
    InconsistentMoments {
        detail: String,
        mu2: f64,
        mu4: f64,
        mu6: f64,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn domain(function: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            function,
            detail: detail.into(),
        }
    }
}
