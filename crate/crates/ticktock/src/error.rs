use thiserror::Error;

/// Errors surfaced by state construction, evolution, analysis, and the
/// scenario runner.
#[derive(Debug, Error)]
pub enum Error {
    /// A site is incompatible with the lattice or operator it is used with
    /// (e.g. a ring site fed to a line-only shift).
    #[error("topology: {0}")]
    Topology(String),

    /// Particle count or register layout mismatch between states/operators.
    #[error("layout: {0}")]
    Layout(String),

    /// An argument is outside its documented range.
    #[error("argument: {0}")]
    Argument(String),

    /// A closed form was evaluated outside its domain of validity.
    #[error("domain: {0}")]
    Domain(String),

    /// A numerical invariant (hermiticity, unit trace, exchange symmetry)
    /// failed beyond tolerance.
    #[error("numeric: {0}")]
    Numeric(String),

    /// A scenario configuration failed validation.
    #[error("config: {0}")]
    Config(String),

    /// A piecewise schedule does not cover the requested step.
    #[error("schedule: no port unitary covers step {0}")]
    Schedule(usize),

    /// Brute-force evolution disagrees with a closed form beyond tolerance.
    #[error("discrepancy in {context}: |delta| = {found:.3e} exceeds {limit:.3e}")]
    Discrepancy {
        context: String,
        found: f64,
        limit: f64,
    },

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for the CLI: 1 validation, 2 oracle discrepancy,
    /// 3 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Discrepancy { .. } => 2,
            Error::Io(_) => 3,
            _ => 1,
        }
    }
}
