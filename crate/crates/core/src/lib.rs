//! Horizontal curves in the Engel group.
//!
//! Exact Carnot-group arithmetic for step at most three, horizontal lifting
//! of planar controls, polynomial steering with Newton shooting, and C¹
//! horizontal extension of curve fragments with Lusin-type approximation.

pub mod algebra;
pub mod engel;
pub mod error;
pub mod group;
pub mod horizontal;
pub mod io;
pub mod poly;
pub mod quadrature;
pub mod steering;
pub mod whitney;

pub use algebra::{AlgebraVector, StratifiedAlgebra};
pub use engel::{Coords, Horizontal};
pub use error::{Error, Result};
pub use group::{CarnotGroup, CoordKind, GroupPoint};
pub use horizontal::{lift, Controls, SampledCurve};
pub use poly::Poly;
