//! Charts, metric fields, numerical differentiation, curvature and boundary geometry.

pub mod boundary;
pub mod chart;
pub mod connection;
pub mod frame;
pub mod gauge;
pub mod jet;
pub mod lie;
pub mod linearized;
pub mod metric;
pub mod norms;

pub use boundary::{boundary_geometry, boundary_geometry_from_jet, BoundaryGeometry};
pub use chart::{Background, Chart, ChartPoint};
pub use connection::{christoffel, christoffel_from_jet, curvature, curvature_from_jet, Curvature};
pub use frame::{frame, frame_at, outward_normal, to_frame};
pub use gauge::{gauge_map, GaugeMap};
pub use jet::{covariant_jet, fd_derivatives, perturbation_derivatives, CovariantJet, Differentiation};
pub use lie::{lie_derivative_b, vector_jet, LieDerivativeField, PolynomialField, VectorField, VectorJet};
pub use linearized::{linearized_mean_curvature, linearized_scalar, linearized_scalar_from_jet};
pub use metric::{Decay, Derivs, FnMetric, MetricField, Scaled};
