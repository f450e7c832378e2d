//! Eigenvalues of the Laplace–Beltrami operator on spherical caps with
//! Robin, Neumann, or Dirichlet boundary conditions, with a focus on the
//! hemisphere.
//!
//! Separation of variables on a cap of aperture `θ₀` reduces the eigenvalue
//! problem to Legendre functions `P_ν^m(cos θ)` with the boundary condition
//! imposed at `θ = θ₀`; the eigenvalues are `Λ = ν(ν+1)`. On the hemisphere
//! the condition collapses to a secular equation in Gamma functions whose
//! roots this crate localizes to machine precision ([`secular`]); on general
//! caps a guarded scan over `ν` finds sign changes of the boundary
//! combination ([`cap`]).
//!
//! Module map:
//!
//! - [`specfun`]: Legendre `P_ν^m` for real degree via three routes (a
//!   hypergeometric series in double-double arithmetic, an adaptive
//!   Runge–Kutta shooting integrator with overflow rescaling, and a
//!   trapezoidal contour integral), plus exact equator values and `ln Γ`.
//! - [`secular`]: the hemisphere Robin secular function, its poles, and a
//!   pole-free root solver delivering one root per `(ℓ, m)` window.
//! - [`spectrum`]: assembled hemisphere spectra — per-window clusters,
//!   global ordering, closed-form Neumann reference, and first-order gap
//!   approximations with certified error envelopes.
//! - [`stats`]: gap statistics — cluster means, the arcsine-type limit law
//!   of within-cluster gaps, Kolmogorov–Smirnov distances, normalized
//!   spacing histograms, and two-sided gap-bound constants.
//! - [`cap`]: eigenvalues of general caps by dense scan + bracketed
//!   refinement, with residual certificates and spacing reports.
//! - [`io`]: deterministic CSV serialization (17 significant digits,
//!   byte-stable) with strict round-trip readers.
//! - [`verify`]: the numbered end-to-end check suite used by the CLI and
//!   the acceptance tests.
//!
//! Everything is `f64`-based; internal double-double arithmetic absorbs
//! cancellation where the series route needs headroom.

pub mod cap;
mod dd;
pub mod error;
pub mod io;
pub mod secular;
pub mod specfun;
pub mod spectrum;
pub mod stats;
pub mod verify;

pub use error::{Error, Result};
