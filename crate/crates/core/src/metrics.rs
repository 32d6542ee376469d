//! Success rate, navigation time, path length and intrusion time ratio.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::simulator::{EpisodeRecord, Outcome};

/// Aggregate metrics over a batch of episodes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct MetricsReport<T> {
    pub episodes: usize,
    pub successes: usize,
    pub collisions: usize,
    pub timeouts: usize,
    /// Mean duration (s) of successful episodes; absent without successes.
    pub nav_time: Option<T>,
    /// Mean robot path length (m) of successful episodes.
    pub path_length: Option<T>,
    /// Intrusion time ratio: per-episode fraction of steps inside the danger
    /// zone, averaged over all episodes.
    pub itr: T,
    /// Intrusion steps over all steps of all episodes.
    pub itr_pooled: T,
    /// Mean undiscounted episode return.
    pub mean_return: T,
}

fn count<T: Scalar>(n: usize) -> T {
    T::lit(n as f64)
}

fn mean<T: Scalar>(values: impl Iterator<Item = T>) -> Option<T> {
    let (sum, n) = values.fold((T::zero(), 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / count(n))
}

/// Steps of `record` whose logged `d_min` is below `d_disc`.
pub fn intrusion_steps<T: Scalar>(record: &EpisodeRecord<T>, d_disc: T) -> usize {
    record
        .steps
        .iter()
        .filter(|s| s.d_min.is_some_and(|d| d < d_disc))
        .count()
}

pub fn compute_metrics<T: Scalar>(records: &[EpisodeRecord<T>], d_disc: T) -> Result<MetricsReport<T>> {
    if records.is_empty() {
        return Err(Error::Usage("metrics need at least one episode".into()));
    }
    let by_outcome = |o: Outcome| records.iter().filter(|r| r.outcome == o).count();
    let successful = || records.iter().filter(|r| r.outcome == Outcome::Success);

    let per_episode_itr = records.iter().map(|r| {
        if r.steps.is_empty() {
            T::zero()
        } else {
            count::<T>(intrusion_steps(r, d_disc)) / count(r.steps.len())
        }
    });
    let total_steps: usize = records.iter().map(|r| r.steps.len()).sum();
    let total_intrusions: usize = records.iter().map(|r| intrusion_steps(r, d_disc)).sum();

    Ok(MetricsReport {
        episodes: records.len(),
        successes: by_outcome(Outcome::Success),
        collisions: by_outcome(Outcome::Collision),
        timeouts: by_outcome(Outcome::Timeout),
        nav_time: mean(successful().map(|r| r.duration())),
        path_length: mean(successful().map(|r| r.path_length())),
        itr: mean(per_episode_itr).unwrap_or_else(T::zero),
        itr_pooled: if total_steps == 0 {
            T::zero()
        } else {
            count::<T>(total_intrusions) / count(total_steps)
        },
        mean_return: mean(records.iter().map(|r| r.cumulative_reward())).unwrap_or_else(T::zero),
    })
}

impl<T: Scalar> MetricsReport<T> {
    pub fn success_rate(&self) -> T {
        count::<T>(self.successes) / count(self.episodes)
    }

    pub fn collision_rate(&self) -> T {
        count::<T>(self.collisions) / count(self.episodes)
    }

    pub fn timeout_rate(&self) -> T {
        count::<T>(self.timeouts) / count(self.episodes)
    }

    /// Human-readable summary.
    pub fn render(&self) -> String {
        let opt = |v: Option<T>| v.map_or_else(|| "n/a".to_string(), |v| format!("{:.2}", v.to_f64_lossy()));
        format!(
            "episodes: {}\nSR: {:.2}% ({} success, {} collision, {} timeout)\nNT: {} s\nPL: {} m\nITR: {:.2}% (pooled {:.2}%)\nmean return: {:.4}\n",
            self.episodes,
            self.success_rate().to_f64_lossy() * 100.0,
            self.successes,
            self.collisions,
            self.timeouts,
            opt(self.nav_time),
            opt(self.path_length),
            self.itr.to_f64_lossy() * 100.0,
            self.itr_pooled.to_f64_lossy() * 100.0,
            self.mean_return.to_f64_lossy(),
        )
    }
}

/// Column header of [`MetricsReport::table_row`]. The first six columns mirror
/// the published results tables; the rest make the row lossless.
pub const TABLE_HEADER: &str =
    "label,episodes,SR(%),NT(s),PL(m),ITR(%),successes,collisions,timeouts,itr,itr_pooled,mean_return";

impl<T: Scalar> MetricsReport<T> {
    /// One comma-separated row under [`TABLE_HEADER`]. Commas in `label` are
    /// replaced by semicolons.
    pub fn table_row(&self, label: &str) -> String {
        let opt = |v: Option<T>| v.map_or_else(String::new, |v| v.to_string());
        let label = label.replace([',', '\n', '\r'], ";");
        format!(
            "{label},{},{},{},{},{},{},{},{},{},{},{}",
            self.episodes,
            self.success_rate() * T::lit(100.0),
            opt(self.nav_time),
            opt(self.path_length),
            self.itr * T::lit(100.0),
            self.successes,
            self.collisions,
            self.timeouts,
            self.itr,
            self.itr_pooled,
            self.mean_return,
        )
    }

    /// Parses a row written by [`table_row`](Self::table_row) back into its
    /// label and report.
    pub fn parse_table_row(line: &str) -> Result<(String, Self)> {
        let fields: Vec<&str> = line.trim_end().split(',').collect();
        let columns = TABLE_HEADER.split(',').count();
        if fields.len() != columns {
            return Err(Error::Usage(format!(
                "table row has {} fields, expected {columns}: {line:?}",
                fields.len()
            )));
        }
        let int = |i: usize| {
            fields[i]
                .parse::<usize>()
                .map_err(|e| Error::Usage(format!("column {i} ({:?}): {e}", fields[i])))
        };
        let real = |i: usize| {
            fields[i]
                .parse::<f64>()
                .map(T::lit)
                .map_err(|e| Error::Usage(format!("column {i} ({:?}): {e}", fields[i])))
        };
        let opt_real = |i: usize| if fields[i].is_empty() { Ok(None) } else { real(i).map(Some) };
        let report = Self {
            episodes: int(1)?,
            nav_time: opt_real(3)?,
            path_length: opt_real(4)?,
            successes: int(6)?,
            collisions: int(7)?,
            timeouts: int(8)?,
            itr: real(9)?,
            itr_pooled: real(10)?,
            mean_return: real(11)?,
        };
        if report.successes + report.collisions + report.timeouts != report.episodes || report.episodes == 0 {
            return Err(Error::Usage(format!("inconsistent outcome counts in {line:?}")));
        }
        Ok((fields[0].to_string(), report))
    }
}

/// Success-rate spread across independent runs of the same cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct RunSummary<T> {
    pub runs: usize,
    pub sr_mean: T,
    /// Sample standard deviation; zero for a single run.
    pub sr_std: T,
}

pub fn aggregate_runs<T: Scalar>(reports: &[MetricsReport<T>]) -> Result<RunSummary<T>> {
    let rates: Vec<T> = reports.iter().map(|r| r.success_rate()).collect();
    let sr_mean = mean(rates.iter().copied()).ok_or_else(|| Error::Usage("no runs to aggregate".into()))?;
    let sr_std = if rates.len() > 1 {
        let ss = rates.iter().fold(T::zero(), |acc, &r| acc + (r - sr_mean) * (r - sr_mean));
        (ss / count(rates.len() - 1)).sqrt()
    } else {
        T::zero()
    };
    Ok(RunSummary {
        runs: rates.len(),
        sr_mean,
        sr_std,
    })
}
