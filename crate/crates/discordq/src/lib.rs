//! Detection of nonzero quantum discord in two-mode continuous-variable
//! states via a single phase-space marker.
//!
//! The marker Q is a difference of two Gaussian-weighted overlap integrals
//! of the state's Wigner function; it vanishes exactly on the states that
//! are classical on the first mode — mixtures Σᵢ pᵢ|i⟩⟨i|₁ ⊗ σᵢ over an
//! orthonormal basis of mode 1, the states of zero discord — and is
//! strictly positive otherwise. For Gaussian states in standard form Q has a closed form; for
//! polynomial × Gaussian Wigner functions it is evaluated exactly by moment
//! integration, and an independent truncated number-basis computation
//! cross-checks both routes.
//!
//! Quadrature conventions throughout: x̂ = (â+â†)/2, p̂ = −i(â−â†)/2,
//! vacuum variance 1/4, mode ordering (x₁, p₁, x₂, p₂).

pub mod cv;
pub mod error;
pub mod fock;
pub mod gauss;
pub mod marker;
pub mod poly;
pub mod verify;
pub mod wigner;

pub use cv::{CovarianceMatrix, GaussianParams};
pub use error::{Error, Result};
pub use marker::{DiscordVerdict, Method, QReport, Verdict};
