//! Charge form, mass quadrature, extrapolation and the Ricci-form mass.

pub mod charge;
pub mod extrapolate;
pub mod mass;
pub mod quadrature;
pub mod report;
pub mod ricci;
pub mod sum;

pub use charge::{
    charge_divergence_from_jet, charge_form, charge_form_from_jet, exactness_residual, exactness_sides,
    expansion_residual, linearization_pair,
};
pub use extrapolate::{extrapolate_mass, Extrapolation};
pub use mass::{default_radii, mass_at_radius, mass_vector, MassEngine, MassVector, RadiusSample};
pub use quadrature::{sphere_area, QuadNode, QuadratureRule};
pub use report::{CheckOutcome, MassReport, REPORT_SCHEMA};
pub use ricci::{calibrate_dn, ricci_mass_at_radius, Calibration, CalibrationInput, RicciSample};
pub use sum::pairwise_sum;
