//! Multi-component floating point, an arbitrary-precision reference type, and
//! dense linear algebra with mixed-precision iterative refinement.

pub mod bigfloat;
pub mod error;
pub mod linalg;
pub mod matfile;
pub mod mcfloat;
pub mod par;
pub mod refine;
pub mod testgen;

pub use bigfloat::{BigFloat, PrecisionContext};
pub use error::{Error, Result};
pub use mcfloat::{DoubleDouble, MultiComp, PrecisionTag, QuadDouble, TripleDouble};
pub use par::Execution;
