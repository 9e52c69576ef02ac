use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("state is not faithful: smallest symplectic eigenvalue {nu_minus} is within {tol} of 1")]
    NotFaithful { nu_minus: f64, tol: f64 },
    #[error("unphysical: {0}")]
    Unphysical(String),
    #[error("degenerate homodyne measurement: conditioning block eigenvalue {0:e} below threshold")]
    DegenerateMeasurement(f64),
    #[error("degenerate variance: {0:e}")]
    DegenerateVariance(f64),
    #[error("truncation insufficient: tail mass {tail:e} exceeds 1e-12, try n_max >= {suggested}")]
    TruncationInsufficient { tail: f64, suggested: usize },
    #[error("undefined divergence: reference probability vanishes at index {0}")]
    UndefinedDivergence(usize),
    #[error("{0}")]
    NoBracket(Box<NoBracket>),
    #[error("resource state does not match channel: {0}")]
    ResourceMismatch(String),
}

/// Diagnostics for a failed resource-state search.
#[derive(Debug, Clone, PartialEq)]
pub struct NoBracket {
    pub a_interval: (f64, f64),
    pub gains_tried: Vec<f64>,
    pub valid_samples: usize,
    pub positive_samples: usize,
    pub negative_samples: usize,
    /// Smallest |REE residual| seen on valid samples, if any.
    pub best_residual: Option<f64>,
    pub best_a: Option<f64>,
}

impl std::fmt::Display for NoBracket {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "no REE residual sign change for a in [{:.6e}, {:.6e}] with gains {:?}: {} valid samples ({} positive, {} negative)",
            self.a_interval.0,
            self.a_interval.1,
            self.gains_tried,
            self.valid_samples,
            self.positive_samples,
            self.negative_samples
        )?;
        if let (Some(r), Some(a)) = (self.best_residual, self.best_a) {
            write!(f, ", closest residual {r:.6e} bits at a = {a:.6e}")?;
        }
        Ok(())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
