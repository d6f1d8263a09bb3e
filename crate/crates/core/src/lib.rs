//! Maslov-type indices for Lagrangian planes and symplectic paths.
//!
//! Planes are handled through orthonormal frames and their Souriau matrices
//! `w = u u^T`; points of the universal cover are pairs `(w, θ)` with
//! `det w = e^{iθ}`. All index values are exact integers (or half-integers
//! stored as twice their value) obtained from thresholded rank and
//! signature decisions.

pub mod derived;
pub mod error;
pub mod job;
pub mod lagrangian;
pub mod leray;
pub mod linalg;
pub mod paths;
pub mod random;
pub mod signature;
pub mod symplectic;
pub mod tolerance;
pub mod verify;

pub use derived::{
    direct_sum_lift, graph_path, hormander_xi, hormander_xi_by_path, robbin_salamon, shear_path, spectral_flow,
    HalfInteger, SymmetricFamily,
};
pub use error::{Error, ErrorCode, Result};
pub use lagrangian::{
    apply_symplectic, frame_from_graph, frame_from_w, intersection_dim, souriau_w, transversal_companion,
    LagrangianFrame, SouriauMatrix, StratumLabel,
};
pub use leray::{deck_apply, lift_of, mu_bar, souriau_m, DeckAction, LagrangianLift};
pub use paths::{
    act_on_lift, keller_maslov, lift_path, mu_ell, mu_lagrangian, mu_symplectic, winding_integral, LagrangianPath,
    LiftedPath, SampledPath, SymplecticPath,
};
pub use signature::{coboundary, inert_index, kashiwara_tau, Cochain, TripleSignature};
pub use symplectic::{
    direct_sum_symplectic, embed_unitary, is_symplectic, omega, SymplecticMatrix, SymplecticVector, UnitaryEmbedding,
};
pub use tolerance::Tolerances;
