//! Cross-seed summaries of run logs.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use wganlab_core::training::RunLog;

pub const AGGREGATE_HEADER: &str = "iter,runs,d_loss_median,d_loss_q25,d_loss_q75,emd_runs,emd_median,emd_q25,emd_q75";

/// Quantile with linear interpolation between order statistics, so the
/// median of two values is their midpoint. `sorted` must be ascending.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of an empty sample");
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    quantile(&v, 0.5)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quartiles {
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
}

impl Quartiles {
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        Some(Quartiles {
            q25: quantile(&v, 0.25),
            median: quantile(&v, 0.5),
            q75: quantile(&v, 0.75),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AggregateRow {
    pub iter: usize,
    /// Runs that logged this iteration.
    pub runs: usize,
    pub d_loss: Quartiles,
    pub emd_runs: usize,
    pub emd: Option<Quartiles>,
}

/// One row per iteration reached by at least one log.
pub fn aggregate<'a>(logs: impl IntoIterator<Item = &'a RunLog>) -> Vec<AggregateRow> {
    let mut by_iter: BTreeMap<usize, (Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for log in logs {
        for r in &log.records {
            let entry = by_iter.entry(r.iter).or_default();
            entry.0.push(r.d_loss);
            if let Some(e) = r.emd {
                entry.1.push(e);
            }
        }
    }
    by_iter
        .into_iter()
        .map(|(iter, (d, e))| AggregateRow {
            iter,
            runs: d.len(),
            d_loss: Quartiles::of(&d).expect("every entry has a record"),
            emd_runs: e.len(),
            emd: Quartiles::of(&e),
        })
        .collect()
}

pub fn to_csv(rows: &[AggregateRow]) -> String {
    let mut out = String::from(AGGREGATE_HEADER);
    out.push('\n');
    for r in rows {
        let emd = r
            .emd
            .map(|q| format!("{},{},{}", q.median, q.q25, q.q75))
            .unwrap_or_else(|| ",,".into());
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.iter, r.runs, r.d_loss.median, r.d_loss.q25, r.d_loss.q75, r.emd_runs, emd
        );
    }
    out
}

/// Standard deviation (population) of `d_loss` over the last `window`
/// records.
pub fn volatility(log: &RunLog, window: usize) -> Option<f64> {
    let n = log.records.len();
    if window == 0 || n < window {
        return None;
    }
    let tail: Vec<f64> = log.records[n - window..].iter().map(|r| r.d_loss).collect();
    let mean = tail.iter().sum::<f64>() / window as f64;
    Some((tail.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / window as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use wganlab_core::training::RunRecord;

    fn log(values: &[(f64, Option<f64>)]) -> RunLog {
        RunLog {
            records: values
                .iter()
                .enumerate()
                .map(|(i, &(d, emd))| RunRecord {
                    iter: i + 1,
                    d_loss: d,
                    penalty: 0.0,
                    grad_norm_mean: 0.0,
                    grad_norm_max: 0.0,
                    g_loss: 0.0,
                    emd,
                    wall_ms: 0.0,
                })
                .collect(),
            failure: None,
        }
    }

    #[test]
    fn quantiles_interpolate() {
        assert_eq!(quantile(&[1.0, 3.0], 0.5), 2.0);
        assert_eq!(quantile(&[1.0, 3.0], 0.25), 1.5);
        assert_eq!(quantile(&[5.0], 0.75), 5.0);
        assert_eq!(median(&[4.0, 1.0, 9.0]), 4.0);
    }

    #[test]
    fn runs_counted_per_iteration() {
        let a = log(&[(1.0, None), (2.0, Some(0.5))]);
        let b = log(&[(3.0, None)]);
        let rows = aggregate([&a, &b]);
        assert_eq!(rows.len(), 2);
        assert_eq!((rows[0].runs, rows[0].d_loss.median), (2, 2.0));
        assert_eq!((rows[1].runs, rows[1].emd_runs), (1, 1));
        assert!(rows[0].emd.is_none());
        let csv = to_csv(&rows);
        assert!(csv.starts_with(AGGREGATE_HEADER));
        assert!(csv.contains("\n1,2,2,1.5,2.5,0,,,\n"), "{csv}");
    }

    #[test]
    fn volatility_of_constant_is_zero() {
        let l = log(&[(1.0, None), (5.0, None), (2.0, None), (2.0, None)]);
        assert_eq!(volatility(&l, 2), Some(0.0));
        assert_eq!(volatility(&l, 5), None);
        assert!((volatility(&l, 4).unwrap() - 1.5).abs() < 1e-12);
    }
}
