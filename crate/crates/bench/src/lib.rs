//! Fixtures shared by the benchmarks.

use dpsco_core::harness::{TaskInstance, TaskKind, TaskParams};

/// A planted hinge task of the given size, generated from seed 0.
pub fn hinge_task(n: usize, d: usize) -> TaskInstance {
    TaskInstance::generate(TaskKind::Hinge, n, d, 0, &TaskParams::default()).expect("valid task size")
}
