use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Argument outside the domain where the quantity is defined.
    #[error("{what}: argument {value} is outside the domain")]
    Domain { what: &'static str, value: f64 },

    #[error("{what}: integral diverges ({detail})")]
    Divergence { what: &'static str, detail: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    /// Adaptive quadrature gave up; the best estimate is kept.
    #[error("quadrature did not reach tolerance: estimate {estimate}, error bound {error}")]
    Accuracy { estimate: f64, error: f64 },

    #[error("theta unwrapping is ambiguous near mu = {mu} after maximal refinement")]
    Resolution { mu: f64 },

    #[error("winding {winding} is not an integer")]
    Consistency { winding: f64 },

    #[error("{what}: {value} lies outside the tabulated range [{lo}, {hi}]")]
    Range { what: &'static str, value: f64, lo: f64, hi: f64 },

    #[error("root solver: {0}")]
    Solver(String),

    #[error("source iteration stopped after {iterations} iterations with residual {residual}")]
    Convergence { iterations: usize, residual: f64 },

    #[error("far-field fit rejected: slope {slope} vs gradient {expected}, r^2 = {r_squared}")]
    Extraction { slope: f64, expected: f64, r_squared: f64 },
}
