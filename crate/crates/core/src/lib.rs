//! Exact IVHS computations for Fermat hypersurfaces.
//!
//! The crate builds the symbolic matrices `M`, `M̌_α` and `N_{j,α}` of the
//! infinitesimal variation of Hodge structures at the Fermat point, the
//! determinantal ideals generated by their minors, and the machinery that
//! certifies or bounds the largest `s` for which those ideals vanish only
//! at the origin.

pub mod bounds;
pub mod cyclotomic;
pub mod detideal;
pub mod error;
pub mod fermat_ivhs;
pub mod field;
pub mod linalg;
pub mod multiindex;
pub mod poly;
pub mod witness;
pub mod zerodim;

pub use error::{IvhsError, Result};
pub use multiindex::{IndexOrZero, IndexSet, MultiIndex, Params};
