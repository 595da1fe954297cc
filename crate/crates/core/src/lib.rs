//! Numerical laboratory for normalized ground states of the doubly coupled
//! Choquard system
//!
//! ```text
//! -Δu + μ₁u = λ₁(I_α∗|u|^{r₁})|u|^{r₁-2}u + βp(I_α∗|v|^q)|u|^{p-2}u + κv
//! -Δv + μ₂v = λ₂(I_α∗|v|^{r₂})|v|^{r₂-2}v + βq(I_α∗|u|^p)|v|^{q-2}v + κu
//! ∫u² = ρ₁²,  ∫v² = ρ₂²
//! ```
//!
//! The crate classifies exponent regimes, evaluates the landscape function
//! `h(s)` and its thresholds, discretizes radial fields with a dense Riesz
//! kernel, and searches for constrained critical points.

pub mod cli;
pub mod config;
pub mod energy;
pub mod error;
pub mod io;
pub mod params;
pub mod quadrature;
pub mod radial;
pub mod riesz;
pub mod roots;
pub mod solver;
pub mod thresholds;
pub mod verify;

pub use error::{Error, Result};
pub use params::{ProblemParams, Rat};
