use thiserror::Error;

use crate::emission::EmissionError;
use crate::fock::FockError;
use crate::grating::GratingError;
use crate::numeric::NumericError;
use crate::protocols::ProtocolError;
use crate::trap::TrapError;

/// Any failure raised by this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Fock(#[from] FockError),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    Trap(#[from] TrapError),
    #[error(transparent)]
    Emission(#[from] EmissionError),
    #[error(transparent)]
    Grating(#[from] GratingError),
    #[error(transparent)]
    Numeric(#[from] NumericError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
