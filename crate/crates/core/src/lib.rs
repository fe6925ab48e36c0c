//! Finite-set polynomial functors and the operad machinery built on them:
//! composition and cartesian morphisms, trees and grafting, free monads,
//! W-types, twisting maps, the dendroidal category with nerves and Segal
//! checks, and an exact species layer.

pub mod error;
pub mod finset;
pub mod dendroidal;
pub mod freemonad;
pub mod guard;
pub mod poly;
pub mod species;
pub mod tag;
pub mod tree;

pub use error::{Error, Result};
pub use guard::Guard;
