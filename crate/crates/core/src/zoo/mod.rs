//! Asymptotically hyperbolic test metrics with known or oracle-computable mass.

pub mod ccdata;
pub mod conformal;
pub mod diffeo;
pub mod radial;
pub mod reference;
pub mod schwarzschild;
pub mod spline;
pub mod trace;
pub mod validate;

pub use ccdata::{load_conformal_data, parse_conformal_data, ConformalFile, GridTensor};
pub use conformal::{
    collar_coordinate, collar_radius, conformally_compact, ConformallyCompact, ConformallyCompactData, ConstantTensor,
    FnSphereTensor, Remainder, RoundMultiple, SphereTensor,
};
pub use diffeo::{
    exp_displacement, geodesic_flow_rk4, isometric_pullback, pushforward, DiffeoSpec, IsometricPullback, Pushforward,
};
pub use radial::Jet2;
pub use reference::{reference, ReferenceMetric};
pub use schwarzschild::{ads_schwarzschild_half, horizon_radius, AdsSchwarzschild};
pub use spline::CubicSpline;
pub use trace::{trace_perturbation, RadialProfile, TracePerturbation};
pub use validate::{dominant_energy, sample_hemisphere, validate_decay, DecayCheck, EnergyCheck};
