//! Triply periodic minimal surfaces (TPMS) and their polysynthetic twins.
//!
//! The crate has two halves that meet in [`pipelines`]:
//!
//! * An *exact* half: Jacobi theta and Weierstrass elliptic functions
//!   ([`elliptic`]), Weierstrass representations of the rPD family and its
//!   twin surfaces together with the period problem ([`weierstrass`]), and
//!   Traizet's force balancing for catenoid-limit configurations
//!   ([`traizet`]).
//! * A *discrete* half: a constraint-tagged triangle mesh with slicing,
//!   symmetry-slab generation and periodic (torus-model) cells ([`mesh`]),
//!   plus discrete area/Willmore energies and a projected quasi-Newton
//!   minimizer ([`energy`]).
//!
//! [`pipelines`] chains them into reproducible experiments: rPD-twin and
//! G-twin construction, the G→D stretch family, extended-tD probes and
//! mesh deviation analysis. The `tpms-twin` binary exposes the same runs as
//! subcommands; the `examples/` directory has one runnable example per
//! capability.

use std::fmt;

pub mod cli;
pub mod elliptic;
pub mod energy;
pub mod mesh;
pub mod numeric;
pub mod pipelines;
pub mod traizet;
pub mod weierstrass;

/// Crate-wide error type.
#[derive(Debug, Clone)]
pub enum Error {
    /// Invalid input (non-finite value, parameter out of range, bad word...).
    Domain(String),
    /// Evaluation too close to a pole, zero or branch point.
    Singular(String),
    /// A numerical procedure failed (quadrature, root search, SVD...).
    Numeric(String),
    /// A contract between modules was violated (e.g. corank of an
    /// unbalanced configuration).
    Contract(String),
    /// File I/O or parse failure.
    Io(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(m) => write!(f, "domain error: {m}"),
            Error::Singular(m) => write!(f, "singularity: {m}"),
            Error::Numeric(m) => write!(f, "numeric error: {m}"),
            Error::Contract(m) => write!(f, "contract violation: {m}"),
            Error::Io(m) => write!(f, "io error: {m}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
