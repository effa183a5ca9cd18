//! Counting and enumerating the (-1)-curves of minimal rational elliptic
//! surfaces through exact lattice combinatorics.
//!
//! The pipeline: a characteristic sequence of nine points in a finite
//! abelian group determines a blow-up model of the plane; the classes of
//! its fiber components are reconstructed inside the Picard lattice; the
//! cokernel of the dual embedding map yields a grading matrix and a
//! distinguished degree; the integral points of the corresponding fiber
//! polytope are exactly the (-1)-curve classes, recovered explicitly by
//! integer linear algebra. A truncated multigraded series expansion
//! provides an independent count of the same points.

pub mod fixtures;
pub mod hilbert;
pub mod linalg;
pub mod model;
pub mod picard;
pub mod polytope;
pub mod root_data;
pub mod tables;
pub mod verify;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("not in the K-orthogonal sublattice: {0}")]
    NotInKPerp(String),
    #[error("unknown type: {0}")]
    UnknownType(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
    #[error("postcondition failed: {0}")]
    Postcondition(String),
    #[error("non-integral solution: {0}")]
    NonIntegral(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("fixture error: {0}")]
    Fixture(String),
}
