//! The `wganlab` subcommands.

use std::path::{Path, PathBuf};

use wganlab_core::data::{Dataset, DatasetKind};
use wganlab_core::nn::evaluate;
use wganlab_core::training::{default_levelset_bounds, levelset_grid, Bounds, Checkpoint, LevelSet, TrainConfig};
use wganlab_core::transport::emd_empirical;
use wganlab_core::RngState;

use crate::config::{seed_from_env, ExperimentConfig};
use crate::csvio::{points_to_csv, read_points};
use crate::error::{CliError, Result};
use crate::run::{self, CONFIG_ECHO_FILE};
use crate::verify::{self, Suite};

/// Bounds for `levelset` when neither `--bounds` nor a `config-echo.json`
/// next to the checkpoint is available.
pub const FALLBACK_BOUNDS: Bounds = Bounds {
    x_min: -2.5,
    x_max: 2.5,
    y_min: -2.5,
    y_max: 2.5,
};

fn load_config(path: &Path) -> Result<ExperimentConfig> {
    Ok(ExperimentConfig::load(path)?.with_seed(seed_from_env()?))
}

pub fn train(config: &Path, out: Option<&Path>) -> Result<()> {
    let exp = load_config(config)?;
    let out = exp.resolve_out(out)?;
    let cfg = exp.train.clone();
    let outcome = wganlab_core::training::train_run(cfg.clone())?;
    run::write_outcome(&out, &cfg, &outcome)?;
    let log = &outcome.log;
    if let Some(reason) = &log.failure {
        return Err(CliError::Aborted(format!(
            "seed {}: {reason} (partial outputs in {})",
            cfg.seed,
            out.display()
        )));
    }
    let emd = log.last_emd().map_or_else(|| "n/a".to_string(), |e| format!("{e:.6}"));
    println!(
        "seed {}: {} iterations, final EMD {emd}, outputs in {}",
        cfg.seed,
        log.records.len(),
        out.display()
    );
    Ok(())
}

pub fn sweep(config: &Path, out: Option<&Path>, jobs: Option<usize>) -> Result<()> {
    let exp = load_config(config)?;
    let out = exp.resolve_out(out)?;
    if jobs == Some(0) {
        return Err(CliError::Input("--jobs must be >= 1".into()));
    }
    let seeds = exp.seeds();
    let runs = run::sweep(&exp.train, &seeds, &out, jobs)?;
    let failed: Vec<String> = runs
        .iter()
        .filter(|r| !r.survived())
        .map(|r| format!("seed {}: {}", r.seed, r.outcome.log.failure.as_deref().unwrap_or_default()))
        .collect();
    println!(
        "{} of {} seeds completed, aggregate in {}",
        runs.len() - failed.len(),
        runs.len(),
        out.join(run::AGGREGATE_FILE).display()
    );
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Aborted(failed.join("; ")))
    }
}

pub fn verify(suite: Suite) -> Result<()> {
    let checks = verify::run(suite)?;
    for c in &checks {
        println!("{c}");
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    if failed == 0 {
        Ok(())
    } else {
        Err(CliError::Verification {
            failed,
            total: checks.len(),
        })
    }
}

/// EMD between two point files, formatted with 9 decimals.
pub fn emd(a: &Path, b: &Path) -> Result<String> {
    let pa = read_points(a)?;
    let pb = read_points(b)?;
    if pa.rows() != pb.rows() {
        return Err(CliError::Input(format!(
            "length mismatch: {} has {} points, {} has {}",
            a.display(),
            pa.rows(),
            b.display(),
            pb.rows()
        )));
    }
    if pa.cols() != pb.cols() {
        return Err(CliError::Input(format!(
            "dimension mismatch: {} has {} columns, {} has {}",
            a.display(),
            pa.cols(),
            b.display(),
            pb.cols()
        )));
    }
    Ok(format!("{:.9}", emd_empirical(&pa, &pb)?))
}

/// Parses `x0,x1,y0,y1`.
pub fn parse_bounds(s: &str) -> std::result::Result<Bounds, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|_| format!("{p:?} is not a number")))
        .collect::<std::result::Result<_, _>>()?;
    let [x0, x1, y0, y1] = v[..] else {
        return Err(format!("expected x0,x1,y0,y1, got {} values", v.len()));
    };
    Bounds::new(x0, x1, y0, y1).map_err(|e| e.to_string())
}

/// Bounds used for a checkpoint's level set: the dataset box of the run's
/// `config-echo.json` when it sits next to the checkpoint.
pub fn default_bounds_for(ckpt: &Path) -> Bounds {
    let echo = ckpt.parent().unwrap_or(Path::new(".")).join(CONFIG_ECHO_FILE);
    std::fs::read_to_string(echo)
        .ok()
        .and_then(|text| serde_json::from_str::<TrainConfig>(&text).ok())
        .map_or(FALLBACK_BOUNDS, |c| default_levelset_bounds(&c.data()))
}

pub fn levelset(ckpt: &Path, out: &Path, res: usize, bounds: Option<Bounds>) -> Result<PathBuf> {
    if res < 2 {
        return Err(CliError::Input(format!("--res must be >= 2, got {res}")));
    }
    let checkpoint = Checkpoint::load(ckpt).map_err(|e| CliError::Input(format!("{}: {e}", ckpt.display())))?;
    let bounds = bounds.unwrap_or_else(|| default_bounds_for(ckpt));
    let ls = LevelSet {
        iteration: checkpoint.iteration,
        bounds,
        grid: levelset_grid(&checkpoint.critic, bounds, res)?,
    };
    run::create_dir(out)?;
    run::write_levelset(out, &ls)?;
    Ok(out.join(format!("{}.csv", run::levelset_stem(ls.iteration))))
}

/// `n` points as `x,y` CSV: real samples of `dataset`, or generator samples
/// of a checkpoint.
pub fn sample(dataset: Option<&str>, ckpt: Option<&Path>, n: usize, seed: Option<u64>) -> Result<String> {
    let seed = match seed {
        Some(s) => s,
        None => seed_from_env()?.unwrap_or(0),
    };
    let mut rng = RngState::new(seed);
    let points = match (dataset, ckpt) {
        (Some(name), None) => {
            let kind: DatasetKind = name.parse().map_err(|e: wganlab_core::Error| CliError::Input(e.to_string()))?;
            Dataset::standard(kind).sample(n, &mut rng)
        }
        (None, Some(path)) => {
            let c = Checkpoint::load(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            let z = rng.normal_matrix(n, c.generator.spec().input_dim());
            evaluate(&c.generator, &z)?
        }
        _ => return Err(CliError::Input("pass exactly one of --dataset and --ckpt".into())),
    };
    Ok(points_to_csv(&points))
}
