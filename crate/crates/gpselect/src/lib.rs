//! Subset selection in planar point sets with bounded collinearity.
//!
//! Given a set of `n` points with at most `s` on a common line, this crate
//! builds, measures and verifies three kinds of structured subsets:
//!
//! - **general position** subsets (no collinear triple),
//! - **monotone general position** subsets (left-to-right with non-decreasing
//!   or non-increasing `y`, and no collinear triple),
//! - subsets with **pairwise distinct slopes**.
//!
//! The crate is organised around six modules:
//!
//! - [`geometry`]: exact rational points and canonical slope/line keys,
//! - [`detectors`]: obstacle counting (collinear tuples, trapezoids,
//!   descending pairs) and certification,
//! - [`generators`]: the reference constructions (grids, perturbed cluster
//!   grids, parabola and Sidon sets, annulus sectors, Jarník arcs, projected
//!   3D samples),
//! - [`selectors`]: greedy, sample-and-delete and coloring procedures that
//!   return certified subsets,
//! - [`oracle`]: brute-force ground truth for small instances,
//! - [`harness`]: seeded experiments, CSV output and scaling-exponent fits.
//!
//! All geometry is exact: coordinates are arbitrary-precision rationals with
//! an integer fast path, so collinearity and slope equality are never decided
//! by floating point.

pub mod detectors;
pub mod generators;
pub mod geometry;
pub mod harness;
pub mod oracle;
pub mod selectors;

pub(crate) mod util;

pub use geometry::{line_key, orientation, slope_key};
pub use geometry::{LineKey, Point, Point3, PointSet, Rational, SlopeKey};

use std::fmt;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Two of the three points handed to an orientation test coincide.
    DegenerateTriple,
    /// The two points handed to a slope or line key coincide.
    ZeroDirection,
    /// A point set contained the same point twice. The line number is set
    /// when the duplicate was found while parsing a file.
    DuplicatePoint { line: Option<usize> },
    /// An operation needs more points than the input provides.
    InsufficientPoints { needed: usize, got: usize },
    /// A numeric parameter is outside its documented range.
    InvalidParameter(String),
    /// An oracle refused an input larger than its configured budget.
    BudgetExceeded(String),
    /// A randomized construction exhausted its retry budget.
    RetryExhausted(&'static str),
    /// A selector produced a subset that failed its own certificate check.
    Certification(String),
    /// A point-set or CSV file could not be parsed.
    Parse { line: usize, msg: String },
    /// No experiment is registered under the requested id.
    UnknownExperiment(String),
    Io(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DegenerateTriple => write!(f, "degenerate triple"),
            Error::ZeroDirection => write!(f, "zero direction"),
            Error::DuplicatePoint { line: Some(l) } => {
                write!(f, "duplicate point at line {l}")
            }
            Error::DuplicatePoint { line: None } => write!(f, "duplicate point"),
            Error::InsufficientPoints { needed, got } => {
                write!(f, "insufficient points: need {needed}, got {got}")
            }
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::BudgetExceeded(msg) => write!(f, "budget exceeded: {msg}"),
            Error::RetryExhausted(msg) => write!(f, "{msg}"),
            Error::Certification(msg) => write!(f, "certification failure: {msg}"),
            Error::Parse { line, msg } => write!(f, "parse error at line {line}: {msg}"),
            Error::UnknownExperiment(id) => write!(f, "unknown experiment: {id}"),
            Error::Io(msg) => write!(f, "io error: {msg}"),
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
