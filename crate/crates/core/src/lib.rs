//! Convergence certificates for fixed slope iterations
//! `x_{k+1} = x_k - B F(x_k)`.
//!
//! A scalar majorant built from `eta = ||B F(x0)||` and a continuity measure
//! of `B F'(x) - I` around `x0` decides whether the iteration provably
//! converges, how far it travels, and where its limit is unique.
//!
//! * [`majorant`]: continuity measures, the majorant and its roots.
//! * [`certificate`]: certificates and the closed forms of the Hoelder case.
//! * [`solver`]: the iteration, majorization checks, measure estimation and
//!   uniqueness probes.
//! * [`comparison`]: rival sufficient conditions side by side.
//! * [`problems`]: fixtures with known constants.
//! * [`cli`]: the workflows behind the `fsi-cert` binary.

pub mod certificate;
pub mod cli;
pub mod comparison;
pub mod error;
pub mod majorant;
pub mod norm;
pub mod problems;
pub mod solver;

pub use certificate::{certify, ConvergenceCertificate, HoelderParams};
pub use error::{Error, Result};
pub use majorant::{MajorantModel, OmegaMeasure};
pub use norm::Norm;
pub use problems::{build_fixture, FixtureSpec};
pub use solver::{fsi_solve, Problem, StopCriteria};
