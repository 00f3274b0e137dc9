//! Synthetic benchmark tasks.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::synthetic::{self, PlantedHalfspace};
use crate::problem::{regularize, Dataset, Domain, LossFamily, QuadraticOffset};
use crate::sampling::{RandomStream, StreamRole};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TaskKind {
    Hinge,
    StronglyConvexHinge,
    Quadratic,
}

impl TaskKind {
    pub const ALL: [TaskKind; 3] = [TaskKind::Hinge, TaskKind::StronglyConvexHinge, TaskKind::Quadratic];

    pub fn name(self) -> &'static str {
        match self {
            TaskKind::Hinge => "hinge",
            TaskKind::StronglyConvexHinge => "strongly-convex-hinge",
            TaskKind::Quadratic => "quadratic",
        }
    }
}

impl std::str::FromStr for TaskKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TaskKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown task '{s}'")))
    }
}

impl std::fmt::Display for TaskKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Shape parameters shared by all tasks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TaskParams {
    /// Radius of K, a centered ball.
    pub radius: f64,
    /// Label flip probability of the planted halfspace.
    pub flip_prob: f64,
    /// λ of the λ‖ω‖² term in the strongly convex task.
    pub reg_lambda: f64,
    /// Per-coordinate std of the quadratic task's point cloud.
    pub cloud_std: f64,
}

impl Default for TaskParams {
    fn default() -> Self {
        TaskParams { radius: 1.0, flip_prob: 0.1, reg_lambda: 0.1, cloud_std: 0.3 }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Generator {
    Planted(PlantedHalfspace),
    Cloud { mean: Vec<f64>, std: f64 },
}

/// A generated problem: loss family, domain, training data and start point.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskInstance {
    pub kind: TaskKind,
    pub family: LossFamily,
    pub domain: Domain,
    pub data: Dataset,
    pub omega0: Vec<f64>,
    generator: Generator,
}

impl TaskInstance {
    /// Draws the task and N training samples from the `Data` stream of `seed`.
    /// The domain's expansion radius is its diameter, which bounds every
    /// smoothing radius the solvers use.
    pub fn generate(kind: TaskKind, n: usize, d: usize, seed: u64, params: &TaskParams) -> Result<Self> {
        let mut rng = RandomStream::for_role(seed, StreamRole::Data);
        let domain = Domain::centered_ball(d, params.radius)?.with_expansion(2.0 * params.radius)?;
        let (generator, data) = match kind {
            TaskKind::Hinge | TaskKind::StronglyConvexHinge => {
                let task = PlantedHalfspace::new(d, 1.0, params.flip_prob, &mut rng)?;
                let data = task.sample(n, &mut rng)?;
                (Generator::Planted(task), data)
            }
            TaskKind::Quadratic => {
                let mean = synthetic::sphere_point(d, 0.5 * params.radius, &mut rng);
                let data = synthetic::gaussian_cloud(n, &mean, params.cloud_std, &mut rng)?;
                (Generator::Cloud { mean, std: params.cloud_std }, data)
            }
        };
        let family = match kind {
            TaskKind::Hinge => LossFamily::hinge(1.0)?,
            TaskKind::StronglyConvexHinge => {
                regularize(&LossFamily::hinge(1.0)?, &QuadraticOffset::new(params.reg_lambda, vec![0.0; d])?, &domain)?
            }
            TaskKind::Quadratic => LossFamily::half_squared(&domain, data.view()),
        };
        Ok(TaskInstance { kind, family, domain, data, omega0: vec![0.0; d], generator })
    }

    /// Fresh samples from the task distribution, e.g. for population loss.
    pub fn fresh_samples(&self, n: usize, rng: &mut RandomStream) -> Result<Dataset> {
        match &self.generator {
            Generator::Planted(task) => task.sample(n, rng),
            Generator::Cloud { mean, std } => synthetic::gaussian_cloud(n, mean, *std, rng),
        }
    }

    /// The planted direction, if the task has one.
    pub fn planted_direction(&self) -> Option<&[f64]> {
        match &self.generator {
            Generator::Planted(task) => Some(&task.w_star),
            Generator::Cloud { .. } => None,
        }
    }
}
