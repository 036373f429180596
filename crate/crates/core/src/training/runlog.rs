use std::fmt::Write as _;

use serde::Serialize;

/// Metrics of one generator iteration. Critic quantities come from the last
/// critic step of that iteration.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunRecord {
    pub iter: usize,
    /// `mean f(y) − mean f(x)` over the critic batch, without the penalty.
    pub d_loss: f64,
    pub penalty: f64,
    pub grad_norm_mean: f64,
    pub grad_norm_max: f64,
    /// Generator loss `−mean f(G(z))`.
    pub g_loss: f64,
    pub emd: Option<f64>,
    pub wall_ms: f64,
}

/// Per-iteration metric stream plus the run outcome.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct RunLog {
    pub records: Vec<RunRecord>,
    /// Set when the run stopped early.
    pub failure: Option<String>,
}

pub const RUNLOG_HEADER: &str = "iter,d_loss,penalty,grad_norm_mean,grad_norm_max,emd,wall_ms";

impl RunLog {
    pub fn is_failed(&self) -> bool {
        self.failure.is_some()
    }

    /// CSV with the columns of [`RUNLOG_HEADER`]. `emd` is empty on unscheduled
    /// iterations; `wall_ms` is empty unless `include_wall_time`.
    pub fn to_csv(&self, include_wall_time: bool) -> String {
        let mut out = String::with_capacity(64 * (self.records.len() + 1));
        out.push_str(RUNLOG_HEADER);
        out.push('\n');
        for r in &self.records {
            let emd = r.emd.map(|e| e.to_string()).unwrap_or_default();
            let wall = if include_wall_time {
                format!("{:.3}", r.wall_ms)
            } else {
                String::new()
            };
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.iter, r.d_loss, r.penalty, r.grad_norm_mean, r.grad_norm_max, emd, wall
            );
        }
        out
    }

    /// Records with wall-clock times zeroed, for bitwise comparisons.
    pub fn without_timing(&self) -> RunLog {
        RunLog {
            records: self
                .records
                .iter()
                .map(|r| RunRecord { wall_ms: 0.0, ..r.clone() })
                .collect(),
            failure: self.failure.clone(),
        }
    }

    pub fn emd_series(&self) -> Vec<(usize, f64)> {
        self.records.iter().filter_map(|r| r.emd.map(|e| (r.iter, e))).collect()
    }

    pub fn last_emd(&self) -> Option<f64> {
        self.records.iter().rev().find_map(|r| r.emd)
    }
}
