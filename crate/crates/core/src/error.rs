use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not skew-symmetric (symmetric part {0:.3e})")]
    NotSkew(f64),
    #[error("axis index {0} out of range")]
    InvalidAxis(usize),
    #[error("matrix is not a rotation (orthogonality residual {ortho:.3e}, det {det})")]
    NotRotation { ortho: f64, det: f64 },
    #[error("frame is degenerate (condition number {0:.3e})")]
    DegenerateFrame(f64),
    #[error("vector is not tangent to the frame (residual {0:.3e})")]
    NotTangent(f64),
    #[error("singular Hessian")]
    SingularHessian,
    #[error("invalid step size {0}")]
    InvalidStep(f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("invalid body: {0}")]
    InvalidBody(String),
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("charge support radius {support} exceeds half box length {half_box}")]
    SupportExceedsBox { support: f64, half_box: f64 },
    #[error("magnetic field is not solenoidal (max |div B| = {0:.3e})")]
    NonSolenoidal(f64),
    #[error("non-finite state after t = {last_good_t}")]
    NonFinite { last_good_t: f64 },
    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn config(line: usize, msg: impl Into<String>) -> Self {
        Error::Config {
            line,
            msg: msg.into(),
        }
    }
}
