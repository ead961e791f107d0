//! Condition numbers, Newton's method and certified path following for the
//! eigenvalue problem.
//!
//! An eigentriple (A, λ, v) with (λI − A)v = 0 is handled projectively in
//! (A, λ) and in v. The [`condition`] module measures how far a triple is from
//! the ill-posed locus, [`newton`] corrects approximate eigenpairs for a fixed
//! matrix, and [`tracker`] follows an eigenpair along a matrix path with a step
//! size driven by the condition number.

pub mod condition;
pub mod eigen;
pub mod error;
pub mod io;
pub mod linalg;
pub mod newton;
pub mod projective;
pub mod random;
pub mod suite;
pub mod tracker;

pub use condition::{
    condition_operator, condition_report, dist_to_illposed_fiber, is_well_posed, mu, mu_lambda,
    mu_translation, mu_v, nearest_illposed_candidate, sensitivity_constant, ConditionReport,
    Tangent,
};
pub use error::{Error, Result};
pub use linalg::{CMatrix, CVector, Field, C64};
pub use newton::{
    certify_approximate_solution, gamma_radius, gamma_radius_affine, newton_iterate, newton_step,
    NewtonTrace,
};
pub use projective::{dist_p, dist_p2, dist_t, EigenTriple};
pub use tracker::{
    build_mesh, condition_length, lift_path, path_speed, start_by_index, starting_projection,
    starting_rank_one, starting_roots_of_unity, track, LiftedPath, MatrixPath, Mesh, TrackerConfig,
    TrackerRun,
};
