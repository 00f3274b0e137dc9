//! Differentially private convex optimization with subquadratic gradient
//! complexity for non-smooth ERM and SCO.
//!
//! The building blocks are a ball-convolution smoothing oracle
//! ([`smoothing`]), the accelerated stochastic approximation solver
//! ([`acsa`]), a truncated-CDP accountant ([`accountant`]), the private ERM
//! reductions ([`erm`]) and iterative localization for SCO
//! ([`localization`]). [`harness`] runs experiments with exact
//! gradient-query accounting.

pub mod accountant;
pub mod acsa;
pub mod erm;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod localization;
pub mod problem;
pub mod sampling;
pub mod smoothing;

pub use accountant::{AccountantConstants, ApproxDpBudget, TcdpBudget};
pub use error::{Error, Result};
pub use problem::{DataView, Dataset, Domain, Loss, LossFamily, QuadraticOffset};
pub use sampling::{RandomStream, StreamRole, Streams};
