//! The model half-space, its static potentials and isometries.

pub mod isometry;
pub mod lorentz;
pub mod model;
pub mod potential;

pub use isometry::{isometry_action, minkowski, IsometryElement};
pub use lorentz::{lorentz_product, CausalClass, LorentzVector};
pub use model::{ball_to_polar, conformal_field, model_transform, polar_to_ball, pullback_to_ball, GradientField};
pub use potential::{basis_jet, static_basis_eval, ScalarJet, StaticPotential};
