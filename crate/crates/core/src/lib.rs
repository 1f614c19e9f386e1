//! Numerical toolkit for the ascending discrete-series representations of
//! su(1,1): truncated Fock-space generator matrices, Perelomov-Gilmore and
//! Barut-Girardello coherent states, systematic 1/k expansions of
//! coherent-state operator products, and the pseudoharmonic-oscillator
//! application with classical matching, energy statistics, and real-space
//! eigenfunctions.

pub mod algebra;
pub mod coherent;
pub mod error;
pub mod fockrep;
pub mod invariants;
pub mod pho;
pub(crate) mod quad;
pub mod semiclassical;
pub mod specialfn;

pub use algebra::{boost_matrix, AxisKind, BoostMatrix, Vec3M};
pub use coherent::{BGState, CoherentRef, GroupState, PGState, SeriesState};
pub use error::{Error, Result};
pub use fockrep::{FockRep, StateVec, TriDiagOp};
pub use pho::{ClassicalOrbit, PhoParams};
pub use semiclassical::{ExpansionReport, Gen, GenPoly};
pub use specialfn::SpecialFnConfig;
