//! Run report (JSON) and trajectory (CSV) serialization.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{RunOutcome, SnakeConfig};
use crate::objective::ObjectiveFamily;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MemberReport {
    pub lambda: f64,
    pub theta: Vec<f64>,
    pub value: f64,
    pub grad_norm: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub optimizer: String,
    pub config: SnakeConfig,
    pub iterations: usize,
    pub converged: bool,
    pub max_grad_norm: f64,
    pub members: Vec<MemberReport>,
    /// Per-member equilibrium residual `|A·r_i + ∂E/∂r_i|∞`, snake only.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub equilibrium_residuals: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub max_equilibrium_residual: Option<f64>,
    /// Omitted unless requested, so reports stay byte-reproducible.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub wall_time_seconds: Option<f64>,
}

impl RunReport {
    pub fn new<F: ObjectiveFamily + ?Sized>(
        optimizer: &str,
        config: &SnakeConfig,
        family: &F,
        outcome: &RunOutcome,
        include_wall_time: bool,
    ) -> Self {
        let members = (0..outcome.state.members())
            .map(|m| MemberReport {
                lambda: family.label(m),
                theta: outcome.state.row(m).to_vec(),
                value: outcome.values[m],
                grad_norm: outcome.grad_norms[m],
            })
            .collect();
        RunReport {
            optimizer: optimizer.to_string(),
            config: config.clone(),
            iterations: outcome.iterations(),
            converged: outcome.converged,
            max_grad_norm: outcome.max_grad_norm(),
            members,
            max_equilibrium_residual: outcome
                .residuals
                .as_ref()
                .map(|r| r.iter().copied().fold(0.0, f64::max)),
            equilibrium_residuals: outcome.residuals.clone(),
            wall_time_seconds: include_wall_time.then_some(outcome.elapsed_seconds),
        }
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }
}

/// One row per (snapshot, member):
/// `iteration,member,lambda,theta_0..theta_{K−1},value`.
pub fn trajectory_csv<F: ObjectiveFamily + ?Sized>(family: &F, outcome: &RunOutcome) -> String {
    let dim = outcome.state.dim();
    let mut out = String::from("iteration,member,lambda");
    for i in 0..dim {
        write!(out, ",theta_{i}").unwrap();
    }
    out.push_str(",value\n");
    for snap in &outcome.snapshots {
        for m in 0..snap.state.members() {
            write!(out, "{},{},{}", snap.state.iteration, m, family.label(m)).unwrap();
            for x in snap.state.row(m) {
                write!(out, ",{x}").unwrap();
            }
            writeln!(out, ",{}", snap.values[m]).unwrap();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::QuadraticFamily;
    use crate::optimize::{gd_run, snake_run, GdConfig};

    fn family() -> QuadraticFamily {
        QuadraticFamily::new((0..6).map(|m| vec![m as f64 * 0.1, 1.0]).collect()).unwrap()
    }

    #[test]
    fn report_round_trip() {
        let config = SnakeConfig {
            max_iters: 30,
            ..Default::default()
        };
        let out = snake_run(&family(), &config, None, 10).unwrap();
        let report = RunReport::new("snake", &config, &family(), &out, false);
        let text = report.to_json();
        assert!(!text.contains("wall_time"));
        let back: RunReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, report);
        assert_eq!(back.members.len(), 6);
        assert!(back.equilibrium_residuals.is_some());
    }

    #[test]
    fn gd_report_has_no_residuals() {
        let config = SnakeConfig::default();
        let out = gd_run(&family(), &GdConfig::from(&config), None, 0).unwrap();
        let report = RunReport::new("gd", &config, &family(), &out, true);
        assert!(report.equilibrium_residuals.is_none());
        assert!(report.to_json().contains("wall_time_seconds"));
    }

    #[test]
    fn trajectory_layout() {
        let config = SnakeConfig {
            max_iters: 4,
            grad_tol: 0.0,
            ..Default::default()
        };
        let out = snake_run(&family(), &config, None, 2).unwrap();
        let csv = trajectory_csv(&family(), &out);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "iteration,member,lambda,theta_0,theta_1,value");
        // Snapshots at iterations 0, 2, 4.
        assert_eq!(lines.len(), 1 + 3 * 6);
        assert!(lines[7].starts_with("2,0,0,"));
    }
}
