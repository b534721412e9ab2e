//! Scalar grid fields, analytic quadratic test fields, gauge frames, level-set
//! helpers and PGM/CSV file I/O.

pub mod error;
pub mod field;
pub mod frame;
pub mod io;
pub mod levelset;
pub mod poly;

pub use error::{Error, Result};
pub use field::ScalarField;
pub use frame::{LocalFrame, EPS_SING};
pub use poly::{Jet, PolyField, PolyKind};
