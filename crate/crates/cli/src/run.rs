//! Executing runs and writing their artifacts.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use wganlab_core::training::{train_run, LevelSet, TrainConfig, TrainOutcome};

use crate::aggregate;
use crate::error::{CliError, Result};

pub const RUNLOG_FILE: &str = "runlog.csv";
pub const CHECKPOINT_FILE: &str = "final.ckpt";
pub const CONFIG_ECHO_FILE: &str = "config-echo.json";
pub const FAILURE_FILE: &str = "failure.txt";
pub const AGGREGATE_FILE: &str = "aggregate.csv";
pub const SWEEP_STATUS_FILE: &str = "sweep.csv";

pub(crate) fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, contents).map_err(|e| CliError::io(format!("cannot write {}", path.display()), e))
}

pub(crate) fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| CliError::io(format!("cannot create {}", path.display()), e))
}

/// File stem of the level set taken after `iteration`.
pub fn levelset_stem(iteration: usize) -> String {
    format!("levelset_{iteration:04}")
}

/// Writes `<stem>.csv`, `<stem>.pgm` and `<stem>.json` into `dir`.
pub fn write_levelset(dir: &Path, levelset: &LevelSet) -> Result<()> {
    let stem = levelset_stem(levelset.iteration);
    write(&dir.join(format!("{stem}.csv")), levelset.to_csv())?;
    write(&dir.join(format!("{stem}.pgm")), levelset.to_pgm())?;
    let meta = serde_json::to_string_pretty(&levelset.meta()).expect("level-set metadata serializes");
    write(&dir.join(format!("{stem}.json")), meta + "\n")
}

/// Writes everything a run produced, including a partial log and
/// `failure.txt` if it aborted.
pub fn write_outcome(dir: &Path, config: &TrainConfig, outcome: &TrainOutcome) -> Result<()> {
    create_dir(dir)?;
    let echo = serde_json::to_string_pretty(config).expect("config serializes");
    write(&dir.join(CONFIG_ECHO_FILE), echo + "\n")?;
    write(&dir.join(RUNLOG_FILE), outcome.log.to_csv(config.log_wall_time))?;
    for ls in &outcome.levelsets {
        write_levelset(dir, ls)?;
    }
    write(&dir.join(CHECKPOINT_FILE), outcome.checkpoint.to_bytes())?;
    let failure = dir.join(FAILURE_FILE);
    match &outcome.log.failure {
        Some(reason) => write(&failure, format!("{reason}\n"))?,
        None if failure.exists() => {
            fs::remove_file(&failure).map_err(|e| CliError::io(format!("cannot remove {}", failure.display()), e))?
        }
        None => {}
    }
    Ok(())
}

/// Outcome of one seed of a sweep.
#[derive(Debug)]
pub struct SeedRun {
    pub seed: u64,
    pub outcome: TrainOutcome,
}

impl SeedRun {
    pub fn survived(&self) -> bool {
        !self.outcome.log.is_failed()
    }
}

/// Per-seed output directory inside a sweep directory.
pub fn seed_dir(out: &Path, seed: u64) -> PathBuf {
    out.join(format!("seed_{seed}"))
}

/// Trains every config on a pool of `jobs` threads (all cores if `None`).
/// Results come back in input order; runs share no state.
pub fn run_many(configs: Vec<TrainConfig>, jobs: Option<usize>) -> Result<Vec<TrainOutcome>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Input(format!("cannot start worker pool: {e}")))?;
    let results: Vec<wganlab_core::Result<TrainOutcome>> =
        pool.install(|| configs.into_par_iter().map(train_run).collect());
    results.into_iter().map(|r| r.map_err(CliError::from)).collect()
}

/// Runs all seeds and writes per-seed directories, `aggregate.csv` over the
/// surviving seeds, and `sweep.csv` with each seed's status.
pub fn sweep(base: &TrainConfig, seeds: &[u64], out: &Path, jobs: Option<usize>) -> Result<Vec<SeedRun>> {
    if seeds.is_empty() {
        return Err(CliError::Input("sweep needs at least one seed".into()));
    }
    create_dir(out)?;
    let configs: Vec<TrainConfig> = seeds
        .iter()
        .map(|&seed| TrainConfig {
            seed,
            ..base.clone()
        })
        .collect();
    let outcomes = run_many(configs.clone(), jobs)?;
    let runs: Vec<SeedRun> = seeds
        .iter()
        .zip(outcomes)
        .map(|(&seed, outcome)| SeedRun { seed, outcome })
        .collect();
    for (run, config) in runs.iter().zip(&configs) {
        write_outcome(&seed_dir(out, run.seed), config, &run.outcome)?;
    }
    let rows = aggregate::aggregate(runs.iter().filter(|r| r.survived()).map(|r| &r.outcome.log));
    write(&out.join(AGGREGATE_FILE), aggregate::to_csv(&rows))?;
    write(&out.join(SWEEP_STATUS_FILE), status_csv(&runs))?;
    Ok(runs)
}

fn status_csv(runs: &[SeedRun]) -> String {
    let mut out = String::from("seed,status,iterations,final_emd,failure\n");
    for r in runs {
        let log = &r.outcome.log;
        let emd = log.last_emd().map(|e| e.to_string()).unwrap_or_default();
        let (status, reason) = match &log.failure {
            Some(f) => ("failed", format!("\"{}\"", f.replace('"', "\"\""))),
            None => ("ok", String::new()),
        };
        out.push_str(&format!("{},{status},{},{emd},{reason}\n", r.seed, log.records.len()));
    }
    out
}
