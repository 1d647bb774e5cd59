//! Clifford algebra, chirality and imaginary Killing spinors on the half-ball.

pub mod clifford;
pub mod killing;
pub mod nullcone;

pub use clifford::{
    boundary_chirality, build_clifford, inner, BoundaryChirality, Chirality, CliffordRep, CliffordResiduals, Spinor,
    MAX_DIM, MIN_DIM,
};
pub use killing::{killing_residual, killing_spinor_eval, spin_connection, KillingSign, KillingSpec, BOUNDARY_MARGIN};
pub use nullcone::{null_cone_inverse, v_phi, v_phi_coefficients, CHIRALITY_TOL, NULL_TOL};
