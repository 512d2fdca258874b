use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot decompose gate `{0}` into the basis alphabet")]
    Decomposition(String),

    #[error("gate `{gate}` is outside the basis alphabet {{X, SX, SXdg, RZ, CX}}")]
    NotInBasis { gate: String },

    #[error("invalid gate: {0}")]
    InvalidGate(String),

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error("{qubits} qubits exceeds the simulator cap of {cap}")]
    QubitCap { qubits: usize, cap: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid memory: {0}")]
    InvalidMemory(String),

    #[error("distribution is not normalized (sum = {sum})")]
    Unnormalized { sum: f64 },

    #[error("missing tomography setting `{0}`")]
    MissingSetting(String),

    #[error("extrapolation fit failed: {0}")]
    Fit(String),

    #[error("matrix is not Hermitian (deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("resource budget exceeded: estimated {estimate:.3e} amplitude updates > budget {budget:.3e}")]
    Resource { estimate: f64, budget: f64 },

    #[error("records disagree: {0}")]
    Mismatch(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Stable machine-readable category, used for CLI exit codes.
    pub fn category(&self) -> &'static str {
        match self {
            Error::Decomposition(_) | Error::NotInBasis { .. } => "circuit",
            Error::InvalidGate(_) | Error::InvalidCircuit(_) => "circuit",
            Error::QubitCap { .. } | Error::Resource { .. } => "resource",
            Error::InvalidArgument(_) | Error::InvalidMemory(_) => "input",
            Error::Unnormalized { .. } | Error::MissingSetting(_) | Error::Mismatch(_) => "input",
            Error::Fit(_) | Error::NotHermitian(_) => "numeric",
            Error::Io(_) | Error::Json(_) | Error::Csv(_) => "io",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.category() {
            "input" => 2,
            "circuit" => 3,
            "resource" => 4,
            "numeric" => 5,
            _ => 1,
        }
    }
}
