//! Mass of asymptotically hyperbolic manifolds with a non-compact boundary.
//!
//! The core is generic over the scalar type; the aliases below fix `f64`.

pub mod engine;
pub mod error;
pub mod geometry;
pub mod reference;
pub mod scalar;
pub mod spin;
pub mod zoo;

pub use error::{Error, Result};
pub use scalar::Real;

pub type ChartPoint = geometry::ChartPoint<f64>;
pub type StaticPotential = reference::StaticPotential<f64>;
pub type LorentzVector = reference::LorentzVector<f64>;
pub type IsometryElement = reference::IsometryElement<f64>;
pub type QuadratureRule = engine::QuadratureRule<f64>;
pub type Curvature = geometry::Curvature<f64>;
pub type BoundaryGeometry = geometry::BoundaryGeometry<f64>;
pub type CliffordRep = spin::CliffordRep<f64>;
pub type KillingSpec = spin::KillingSpec<f64>;
pub type Spinor = spin::Spinor<f64>;
