//! Time-independent mean-field approximation of resolvent matrix elements for two
//! soluble two-particle models.
//!
//! The crate derives the polynomial conditions satisfied by the mean-field amplitude
//! through exact elimination, follows every solution branch over the complex energy
//! plane, decides which branch is physical, and checks the result against exact
//! resolvents computed by quadrature.

pub mod branch;
pub mod elim;
pub mod error;
pub mod grid;
pub mod model_bound;
pub mod model_free;
pub mod oracle;
pub mod params;
pub mod poly;
pub mod quad;
pub mod roots;

pub use error::{Result, TimfError};
