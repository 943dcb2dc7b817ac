use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("invalid game: {0}")]
    InvalidGame(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("invalid mixed strategy: {0}")]
    InvalidStrategy(String),
    #[error("invalid group element: {0}")]
    InvalidGroupElement(String),
    #[error("group closure exceeded cap of {0} elements")]
    ClosureCap(usize),
    #[error("materialization would need {needed} cells, cap is {cap}")]
    CellCap { needed: usize, cap: usize },
    #[error("invalid linear program: {0}")]
    InvalidProgram(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid certificate: {0}")]
    InvalidCertificate(String),
    #[error("input is not an equilibrium: {0}")]
    NotAnEquilibrium(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
