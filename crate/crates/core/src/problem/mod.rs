//! Problem definition: per-sample convex losses, datasets, feasible sets and
//! the quadratic-offset regularizer.

mod data;
mod domain;
mod loss;
pub mod synthetic;

pub use data::{DataView, Dataset, SampleRef};
pub use domain::{Domain, Shape};
pub use loss::{hinge_loss_subgrad, regularize, Loss, LossFamily, QuadraticOffset};
