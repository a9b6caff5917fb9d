use thiserror::Error;

/// Errors produced while building groups or deciding questions about them.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid presentation: {0}")]
    InvalidPresentation(String),

    /// A triple `(a, b, c)` of normal-form exponent vectors with `(ab)c != a(bc)`,
    /// or a generator whose left/right multiplication is not a bijection.
    #[error("inconsistent presentation: {reason} (witness {witness:?})")]
    InconsistentPresentation { reason: String, witness: Vec<Vec<u32>> },

    /// `witness` holds elements whose commutator is not central.
    #[error("group is not nilpotent of class at most 2: {reason} (witness {witness:?})")]
    NotClass2 { reason: String, witness: Vec<Vec<u32>> },

    #[error("invalid multiplication table: {reason} (witness {witness:?})")]
    InvalidTable { reason: String, witness: Vec<usize> },

    #[error("invalid element {exps:?} for group {group}")]
    InvalidElement { group: String, exps: Vec<u32> },

    #[error("group is not nilpotent: elements of {prime}-power order do not form a subgroup")]
    NotNilpotent { prime: u64 },

    #[error("group order {0} is even; strings are defined for odd order only")]
    EvenOrder(u64),

    #[error("order structure is not realized by any abelian group: {0}")]
    NotAbelianRealizable(String),

    #[error("isomorphism search budget exceeded after {explored} nodes ({context})")]
    SearchBudgetExceeded { explored: u64, context: String },

    #[error("could not parse group spec {spec:?}: {reason}")]
    BadSpec { spec: String, reason: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
