use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ExperimentConfig, Prepared, TrialResult};
use crate::error::Result;

/// Version of the JSON/CSV layout.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
    pub count: usize,
}

impl MeanStd {
    pub fn of(values: &[f64]) -> Option<MeanStd> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std = if values.len() > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Some(MeanStd { mean, std, count: values.len() })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregates {
    pub trials: usize,
    pub failures: usize,
    pub excess_empirical_risk: Option<MeanStd>,
    pub excess_population_loss: Option<MeanStd>,
    pub gradient_count: Option<MeanStd>,
    pub max_spent_epsilon: f64,
    pub max_spent_delta: f64,
}

impl Aggregates {
    pub fn of(trials: &[TrialResult]) -> Aggregates {
        let ok: Vec<&TrialResult> = trials.iter().filter(|t| t.error.is_none()).collect();
        let risk: Vec<f64> = ok.iter().map(|t| t.excess_empirical_risk).collect();
        let pop: Vec<f64> = ok.iter().filter_map(|t| t.excess_population_loss).collect();
        let counts: Vec<f64> = ok.iter().map(|t| t.gradient_count as f64).collect();
        Aggregates {
            trials: trials.len(),
            failures: trials.len() - ok.len(),
            excess_empirical_risk: MeanStd::of(&risk),
            excess_population_loss: MeanStd::of(&pop),
            gradient_count: MeanStd::of(&counts),
            max_spent_epsilon: ok.iter().map(|t| t.spent.epsilon).fold(0.0, f64::max),
            max_spent_delta: ok.iter().map(|t| t.spent.delta).fold(0.0, f64::max),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub config: ExperimentConfig,
    pub optimum_value: f64,
    pub optimum_gap: f64,
    pub population_optimum: Option<f64>,
    pub trials: Vec<TrialResult>,
    pub aggregates: Aggregates,
}

impl Report {
    pub fn new(config: ExperimentConfig, prep: &Prepared, trials: Vec<TrialResult>) -> Report {
        Report {
            schema_version: SCHEMA_VERSION,
            config,
            optimum_value: prep.optimum.value,
            optimum_gap: prep.optimum.gap,
            population_optimum: prep.population.as_ref().map(|p| p.1.value),
            aggregates: Aggregates::of(&trials),
            trials,
        }
    }

    pub fn write_json<W: Write>(&self, mut out: W) -> Result<()> {
        serde_json::to_writer_pretty(&mut out, self).map_err(|e| crate::Error::Io(e.to_string()))?;
        writeln!(out)?;
        Ok(())
    }

    /// One row per trial.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "seed",
            "digest",
            "excess_empirical_risk",
            "excess_population_loss",
            "gradient_count",
            "spent_epsilon",
            "spent_delta",
            "wall_time_ms",
            "error",
        ])?;
        for t in &self.trials {
            w.write_record([
                t.seed.to_string(),
                t.digest.clone(),
                t.excess_empirical_risk.to_string(),
                t.excess_population_loss.map(|v| v.to_string()).unwrap_or_default(),
                t.gradient_count.to_string(),
                t.spent.epsilon.to_string(),
                t.spent.delta.to_string(),
                t.wall_time_ms.map(|v| v.to_string()).unwrap_or_default(),
                t.error.clone().unwrap_or_default(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Writes `report.json` and `trials.csv` into `dir`.
    pub fn write_to_dir(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        self.write_json(std::io::BufWriter::new(std::fs::File::create(dir.join("report.json"))?))?;
        self.write_csv(std::fs::File::create(dir.join("trials.csv"))?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Structural assertions every report must satisfy.
pub fn check_report(report: &Report) -> Vec<CheckOutcome> {
    let budget_eps = report.config.eps;
    let budget_delta = report.config.delta;
    let mut out = Vec::new();
    let mut push = |name: &str, passed: bool, detail: String| out.push(CheckOutcome { name: name.into(), passed, detail });
    let failed: Vec<String> = report.trials.iter().filter_map(|t| t.error.as_ref().map(|e| format!("seed {}: {e}", t.seed))).collect();
    push("trials succeed", failed.is_empty(), failed.join("; "));
    let mismatched: Vec<u64> = report
        .trials
        .iter()
        .filter(|t| t.error.is_none() && t.gradient_count != t.phases.iter().map(|p| p.gradient_count).sum::<u64>())
        .map(|t| t.seed)
        .collect();
    push("gradient counts reconcile with phase records", mismatched.is_empty(), format!("{mismatched:?}"));
    let slack = 1.0 + 1e-12;
    let over: Vec<u64> = report
        .trials
        .iter()
        .filter(|t| t.spent.epsilon > budget_eps * slack || t.spent.delta > budget_delta * slack)
        .map(|t| t.seed)
        .collect();
    push("spent budget within request", over.is_empty(), format!("{over:?}"));
    let nonfinite = report.trials.iter().filter(|t| t.error.is_none() && !t.excess_empirical_risk.is_finite()).count();
    push("excess risks finite", nonfinite == 0, format!("{nonfinite} non-finite"));
    out
}

/// Least-squares slope of ln y against ln x over the positive pairs.
pub fn fit_loglog_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = xs.iter().zip(ys).filter(|(x, y)| **x > 0.0 && **y > 0.0).map(|(x, y)| (x.ln(), y.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub n: usize,
    pub dim: usize,
    pub eps: f64,
    pub aggregates: Aggregates,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Slopes {
    pub risk: Option<f64>,
    pub population: Option<f64>,
    pub gradient_count: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub schema_version: u32,
    pub base: ExperimentConfig,
    pub points: Vec<SweepPoint>,
    /// Log-log slopes against the swept axis, when exactly one axis varies.
    pub axis: Option<String>,
    pub slopes: Slopes,
}

impl SweepReport {
    pub fn new(base: ExperimentConfig, points: Vec<SweepPoint>) -> SweepReport {
        let distinct = |f: &dyn Fn(&SweepPoint) -> f64| {
            let mut v: Vec<f64> = points.iter().map(f).collect();
            v.sort_by(f64::total_cmp);
            v.dedup();
            v.len()
        };
        let axes = [
            ("n", distinct(&|p| p.n as f64)),
            ("dim", distinct(&|p| p.dim as f64)),
            ("eps", distinct(&|p| p.eps)),
        ];
        let varying: Vec<&str> = axes.iter().filter(|a| a.1 > 1).map(|a| a.0).collect();
        let (axis, slopes) = if varying.len() == 1 {
            let name = varying[0];
            let xs: Vec<f64> = points
                .iter()
                .map(|p| match name {
                    "n" => p.n as f64,
                    "dim" => p.dim as f64,
                    _ => p.eps,
                })
                .collect();
            let series = |g: &dyn Fn(&Aggregates) -> Option<MeanStd>| -> Option<f64> {
                let ys: Option<Vec<f64>> = points.iter().map(|p| g(&p.aggregates).map(|m| m.mean)).collect();
                fit_loglog_slope(&xs, &ys?)
            };
            let slopes = Slopes {
                risk: series(&|a| a.excess_empirical_risk),
                population: series(&|a| a.excess_population_loss),
                gradient_count: series(&|a| a.gradient_count),
            };
            (Some(name.to_string()), slopes)
        } else {
            (None, Slopes::default())
        };
        SweepReport { schema_version: SCHEMA_VERSION, base, points, axis, slopes }
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["n", "dim", "eps", "risk_mean", "risk_std", "population_mean", "gradient_count_mean", "failures"])?;
        let opt = |m: Option<MeanStd>, f: fn(MeanStd) -> f64| m.map(|m| f(m).to_string()).unwrap_or_default();
        for p in &self.points {
            let a = &p.aggregates;
            w.write_record([
                p.n.to_string(),
                p.dim.to_string(),
                p.eps.to_string(),
                opt(a.excess_empirical_risk, |m| m.mean),
                opt(a.excess_empirical_risk, |m| m.std),
                opt(a.excess_population_loss, |m| m.mean),
                opt(a.gradient_count, |m| m.mean),
                a.failures.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_to_dir(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let file = std::io::BufWriter::new(std::fs::File::create(dir.join("sweep.json"))?);
        serde_json::to_writer_pretty(file, self).map_err(|e| crate::Error::Io(e.to_string()))?;
        self.write_csv(std::fs::File::create(dir.join("sweep.csv"))?)
    }
}
