use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{quantity} = {value} is outside [{min}, {max}]")]
    OutOfRange {
        quantity: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("thin-wire assumption violated: a/R = {ratio:.4} (must be < 0.1)")]
    ThinWire { ratio: f64 },

    #[error("coincident filaments: mutual inductance diverges")]
    CoincidentFilaments,

    #[error("geometry: {0}")]
    Geometry(String),

    #[error("coupling coefficient |k| = {0} exceeds 1 (numerics bug)")]
    CouplingExceedsUnity(f64),

    #[error("singular loop impedance at {frequency} Hz")]
    Singular { frequency: f64 },

    #[error("missing parameter `{0}`")]
    MissingParameter(&'static str),

    #[error("S21 needs resistive source and load with a common reference impedance ({0}); use voltage_gain instead")]
    S21Convention(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("tissue `{tissue}`: field `{field}` {reason}")]
    Invariant {
        tissue: String,
        field: String,
        reason: String,
    },

    #[error("unknown tissue `{name}` (available: {available})")]
    UnknownTissue { name: String, available: String },

    #[error("scenario: {0}")]
    Scenario(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures of the numerics themselves rather than of the inputs.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::Singular { .. } | Error::CouplingExceedsUnity(_) | Error::Numeric(_)
        )
    }
}
