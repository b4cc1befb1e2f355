//! Grid-scale certification of secant-set upper limits for graphs in 2 and
//! 3 dimensions, and numerical checks for separable null Lagrangians.

pub mod compact_sets;
pub mod error;
pub mod expr;
pub mod io;
pub mod null_lagrangian;
pub mod numerics;
pub mod secant_geometry;
pub mod tolerances;

pub use compact_sets::{PointCloudSet, SetSequence};
pub use error::{DomainError, Error, Result};
pub use expr::{Dual, Dual2, Expression, Scalar};
pub use null_lagrangian::{Curve, Generators, KineticEnergy, SeparableLagrangian};
pub use numerics::{AxisBox, Grid};
pub use secant_geometry::{CoefficientSequence, GraphSpec, InclusionReport};
pub use tolerances::Tolerances;
