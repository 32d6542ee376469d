//! The four harness commands. Each writes self-describing files under the
//! output directory: every file opens with the resolved config and seed base.

use std::fs;
use std::io::{BufRead, BufReader, Cursor};
use std::path::{Path, PathBuf};

use crowdnav_core::learner::{cross_entropy_optimize, OptimizationResult, CURVE_HEADER};
use crowdnav_core::metrics::{compute_metrics, MetricsReport, TABLE_HEADER};
use crowdnav_core::simulator::{run_batch, EpisodeRecord};

use crate::config::{provenance_header, ExperimentConfig};
use crate::error::{HarnessError, Result};
use crate::policy::{PolicyFile, RobotPolicy};
use crate::surface::{emit_reward_surface, surface_csv};

pub const RESULTS_FILE: &str = "results.csv";
pub const REPORT_FILE: &str = "report.txt";
pub const CONFIG_FILE: &str = "config.toml";
pub const EPISODES_DIR: &str = "episodes";
pub const SURFACE_FILE: &str = "surface.csv";
pub const CURVE_FILE: &str = "learning_curve.csv";
pub const POLICY_FILE: &str = "policy.json";

fn write(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    }
    fs::write(path, contents).map_err(|e| HarnessError::io(path, e))
}

fn write_config(cfg: &ExperimentConfig, out: &Path) -> Result<()> {
    let body = format!("# seed_base: {}\n{}", cfg.seed_base, cfg.to_toml());
    write(&out.join(CONFIG_FILE), &body)
}

pub fn episode_path(out: &Path, seed: u64) -> PathBuf {
    out.join(EPISODES_DIR).join(format!("episode_{seed}.jsonl"))
}

/// Runs `cfg.episodes` seeded episodes and writes the results table, a
/// readable report, one record per episode and the resolved config.
pub fn run_eval(cfg: &ExperimentConfig) -> Result<MetricsReport<f64>> {
    let (report, records) = evaluate(cfg)?;
    let out = &cfg.output_dir;
    let head = provenance_header("eval", cfg);
    write(
        &out.join(RESULTS_FILE),
        &format!("{head}{TABLE_HEADER}\n{}\n", report.table_row(&cfg.label)),
    )?;
    write(&out.join(REPORT_FILE), &format!("{head}{}", report.render()))?;
    for r in &records {
        let mut body = Vec::new();
        r.write_jsonl(&mut body).map_err(|e| HarnessError::io(episode_path(out, r.seed), e))?;
        let body = String::from_utf8(body).expect("records are utf-8");
        write(&episode_path(out, r.seed), &format!("{head}{body}"))?;
    }
    write_config(cfg, out)?;
    Ok(report)
}

/// Runs the episodes without touching the filesystem.
pub fn evaluate(cfg: &ExperimentConfig) -> Result<(MetricsReport<f64>, Vec<EpisodeRecord<f64>>)> {
    let policy = RobotPolicy::resolve(cfg)?;
    let records = run_batch(&cfg.world, &cfg.reward, cfg.predictor, || policy.clone(), &cfg.seeds())?;
    let report = compute_metrics(&records, cfg.reward.d_disc)?;
    Ok((report, records))
}

/// Writes the reward surface grid and returns its path.
pub fn run_surface(cfg: &ExperimentConfig) -> Result<PathBuf> {
    let points = emit_reward_surface(&cfg.reward, &cfg.surface);
    let path = cfg.output_dir.join(SURFACE_FILE);
    write(&path, &format!("{}{}", provenance_header("surface", cfg), surface_csv(&points)))?;
    Ok(path)
}

/// Runs the optimizer, writing the curve as it grows and the best policy at
/// the end. `progress` sees each curve row.
pub fn run_learning_campaign(cfg: &ExperimentConfig, mut progress: impl FnMut(&str)) -> Result<OptimizationResult> {
    let out = &cfg.output_dir;
    let curve_path = out.join(CURVE_FILE);
    let head = format!("{}{CURVE_HEADER}\n", provenance_header("learn", cfg));
    write(&curve_path, &head)?;
    let mut rows = head;
    let mut io_error = None;
    let result = cross_entropy_optimize(&cfg.learner, &cfg.reward, &cfg.world, cfg.predictor, |point| {
        let row = crowdnav_core::learner::LearningCurve { points: vec![point.clone()] }.to_csv_rows().remove(0);
        progress(&row);
        rows.push_str(&row);
        rows.push('\n');
        if io_error.is_none() {
            io_error = write(&curve_path, &rows).err();
        }
    })?;
    if let Some(e) = io_error {
        return Err(e);
    }
    write(&out.join(POLICY_FILE), &PolicyFile::new(cfg, &result.best).to_json())?;
    write_config(cfg, out)?;
    Ok(result)
}

/// Reads an episode file written by [`run_eval`], skipping its comment header.
pub fn read_episode(path: &Path) -> Result<EpisodeRecord<f64>> {
    let file = fs::File::open(path).map_err(|e| HarnessError::io(path, e))?;
    let mut body = String::new();
    for line in BufReader::new(file).lines() {
        let line = line.map_err(|e| HarnessError::io(path, e))?;
        if !line.starts_with('#') {
            body.push_str(&line);
            body.push('\n');
        }
    }
    EpisodeRecord::read_jsonl(Cursor::new(body)).map_err(|e| HarnessError::io(path, e))
}

/// Episode files under `path`, or `path` itself if it is a file. Sorted.
pub fn episode_files(path: &Path) -> Result<Vec<PathBuf>> {
    if !path.is_dir() {
        return Ok(vec![path.to_path_buf()]);
    }
    let dir = if path.join(EPISODES_DIR).is_dir() {
        path.join(EPISODES_DIR)
    } else {
        path.to_path_buf()
    };
    let mut files = fs::read_dir(&dir)
        .map_err(|e| HarnessError::io(&dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "jsonl"))
        .collect::<Vec<_>>();
    files.sort();
    Ok(files)
}

/// Recomputes metrics from recorded episodes.
pub fn replay(paths: &[PathBuf]) -> Result<MetricsReport<f64>> {
    let mut records = Vec::new();
    for p in paths {
        for f in episode_files(p)? {
            records.push(read_episode(&f)?);
        }
    }
    let d_disc = records.first().map_or(0.0, |r| r.d_disc);
    if let Some(r) = records.iter().find(|r| r.d_disc != d_disc) {
        return Err(crowdnav_core::Error::Usage(format!(
            "episode {} was recorded with d_disc {} but others use {d_disc}",
            r.seed, r.d_disc
        ))
        .into());
    }
    Ok(compute_metrics(&records, d_disc)?)
}
