//! Closed-form statistics of photon-added two-mode squeezed thermal states
//! (PA-TMSTS) together with an independent truncated Fock-space oracle.
//!
//! The state is `a†^m b†^n S(r) (ρ_th ⊗ ρ_th) S†(r) a^m b^n / N_{m,n}` with
//! `S(r) = exp[r(a†b† − ab)]` and both thermal modes at mean occupation `n̄`.
//!
//! * [`special_poly`]: Jacobi/Legendre/Laguerre/two-variable Hermite
//!   polynomials and the four-variable source-derivative engine.
//! * [`state_params`]: derived scalars of the underlying Gaussian state,
//!   plus its P and Q functions.
//! * [`closed_form`]: normalization, moments, correlations, photon-number
//!   distributions, the Shchukin-Vogel witness and teleportation fidelity.
//! * [`phase_space`]: Wigner function, characteristic function and the
//!   quadrature form of the fidelity.
//! * [`fock_oracle`]: brute-force density matrices used as ground truth.
//! * [`cli`]: the command-line front end.

pub mod cli;
pub mod closed_form;
pub mod error;
pub mod fock_oracle;
pub mod phase_space;
pub mod special_poly;
pub mod state_params;

pub use error::{Error, Result};
pub use state_params::{DerivedParams, StateParams};
