use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("qubit count {0} outside supported range 1..=12")]
    QubitCount(usize),
    #[error("gate references qubit {qubit} on a {n_qubits}-qubit register")]
    QubitIndex { qubit: usize, n_qubits: usize },
    #[error("CX control and target are both qubit {0}")]
    ControlIsTarget(usize),
    #[error("rotation gate requires an angle")]
    MissingAngle,
    #[error("CX gate takes no angle")]
    UnexpectedAngle,
    #[error("{what}: expected length {expected}, got {got}")]
    Shape {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("cache does not match the parameters it is used with")]
    StaleCache,
    #[error("need at least {need} samples, got {got}")]
    NotEnoughSamples { need: usize, got: usize },
    #[error("k = {k} out of range for {dim} features")]
    ComponentCount { k: usize, dim: usize },
    #[error("layout error: {0}")]
    Layout(String),
    #[error("dataset is empty")]
    EmptyDataset,
}

impl Error {
    pub(crate) fn shape(what: &'static str, expected: usize, got: usize) -> Self {
        Error::Shape {
            what,
            expected,
            got,
        }
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}

pub(crate) fn check_len(what: &'static str, expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::shape(what, expected, got))
    }
}
