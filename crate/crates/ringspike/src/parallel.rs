//! Thread-pool execution of Monte-Carlo trials.
//!
//! Each trial owns its random stream, so the set of results does not depend
//! on scheduling; the summary fold sorts by trial index.

use rayon::prelude::*;
use ringspike_core::mc::{run_trial, ExperimentConfig, TrialExecutor, TrialResult};

use crate::{Error, Result};

/// Environment variable overriding `--jobs`.
pub const JOBS_ENV: &str = "RING_JOBS";

/// Worker count: `RING_JOBS` if set, else the flag, else all cores.
pub fn resolve_jobs(flag: Option<usize>) -> Result<usize> {
    let from_env = match std::env::var(JOBS_ENV) {
        Ok(v) => Some(
            v.trim()
                .parse::<usize>()
                .map_err(|_| Error::Usage(format!("{JOBS_ENV} must be a non-negative integer, got {v:?}")))?,
        ),
        Err(_) => None,
    };
    let jobs = from_env.or(flag).unwrap_or(0);
    Ok(if jobs == 0 {
        std::thread::available_parallelism().map_or(1, |n| n.get())
    } else {
        jobs
    })
}

pub struct Parallel {
    pool: rayon::ThreadPool,
}

impl Parallel {
    pub fn new(jobs: usize) -> Result<Self> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build()
            .map_err(|e| Error::Io(e.to_string()))?;
        Ok(Self { pool })
    }

    pub fn jobs(&self) -> usize {
        self.pool.current_num_threads()
    }

    /// `f(i)` for `i` in `0..count`, in index order.
    pub fn map<T: Send, F: Fn(u64) -> T + Sync + Send>(&self, count: u64, f: F) -> Vec<T> {
        self.pool.install(|| (0..count).into_par_iter().map(f).collect())
    }
}

impl TrialExecutor for Parallel {
    fn run_all(&self, config: &ExperimentConfig) -> Vec<(u64, ringspike_core::Result<TrialResult>)> {
        self.map(config.trials as u64, |t| (t, run_trial(config, t)))
    }
}
