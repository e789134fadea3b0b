use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] gliou::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 0 success, 1 I/O, 2 configuration, 3 degenerate postselection,
    /// 4 numerical failure.
    pub fn exit_code(&self) -> i32 {
        use gliou::Error as E;
        match self {
            CliError::Config(_) => 2,
            CliError::Io(_) => 1,
            CliError::Core(e) => match e {
                E::Validation(_) | E::Domain(_) | E::Config(_) => 2,
                E::DegeneratePostselection { .. } => 3,
                E::Dimension(_) | E::NoConvergence { .. } | E::Singular | E::Numerical(_) => 4,
            },
        }
    }
}
