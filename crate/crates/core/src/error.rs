use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A conserved state with non-positive density or pressure.
    #[error("invalid state{}: rho = {rho}, p = {p}", cell_suffix(.cell))]
    InvalidState {
        cell: Option<(isize, isize)>,
        rho: f64,
        p: f64,
    },

    /// The relaxation star density denominator became non-positive, i.e. the
    /// relaxation speed does not dominate the local wave structure.
    #[error("subcharacteristic condition violated at face {face:?}: a = {a}")]
    Subcharacteristic {
        face: Option<(isize, isize)>,
        a: f64,
    },

    /// A time step could not be completed (negative compression factor or a
    /// non-physical updated state). The caller retries with a smaller step.
    #[error("step failure at t = {time}: {reason}")]
    StepFailure { time: f64, reason: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("io error: {0}")]
    Io(String),
}

fn cell_suffix(cell: &Option<(isize, isize)>) -> String {
    match cell {
        Some((i, j)) => format!(" in cell ({i}, {j})"),
        None => String::new(),
    }
}

impl Error {
    pub(crate) fn at_cell(self, i: isize, j: isize) -> Self {
        match self {
            Error::InvalidState { rho, p, .. } => Error::InvalidState {
                cell: Some((i, j)),
                rho,
                p,
            },
            other => other,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}
