//! Cellular complexes as sparse signed integer matrices.
//!
//! Complexes are stored as cell-to-vertex tables over a vertex geometry,
//! with boundary operators as compressed sparse column matrices. On top of
//! that the crate computes regularized arrangements of segments in the
//! plane and of polygonal faces in space, extracting the cells with
//! topological gift wrapping.

pub mod arrange2d;
pub mod arrange3d;
pub mod error;
pub mod generators;
pub mod geom;
pub mod io;
pub mod lar;
pub mod operators;
pub mod shells;
pub mod sparse;
pub mod tgw;

pub use error::{LarError, Result};
pub use lar::{CellTable, ChainComplexResult, Complex, Geometry, ValidationReport};
pub use sparse::{Chain, SignedSparseMatrix};
