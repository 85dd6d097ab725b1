//! Strategy × instance benchmark matrix with per-run timeouts, and its CSV
//! and cactus-plot CSV output.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::mpsc;
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::{Duration, Instant};

use crate::analysis::Strategy;
use crate::opb::{read_opb, OpbError, ParseOptions, ParsedInstance, Status};
use crate::solver::{solve, SolverConfig, SolverError, SolverResult};

pub const CSV_HEADER: [&str; 10] = [
    "instance",
    "strategy",
    "status",
    "seconds",
    "conflicts",
    "decisions",
    "propagations",
    "learned",
    "max_coeff_bits",
    "fallbacks",
];

pub const CACTUS_HEADER: [&str; 3] = ["strategy", "solved", "seconds"];

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub instance: String,
    pub strategy: Strategy,
    pub status: Status,
    pub seconds: f64,
    pub conflicts: u64,
    pub decisions: u64,
    pub propagations: u64,
    pub learned: u64,
    pub max_coeff_bits: u64,
    pub fallbacks: u64,
}

impl BenchRecord {
    fn unknown(instance: &str, strategy: Strategy, seconds: f64) -> BenchRecord {
        BenchRecord {
            instance: instance.to_string(),
            strategy,
            status: Status::Unknown,
            seconds,
            conflicts: 0,
            decisions: 0,
            propagations: 0,
            learned: 0,
            max_coeff_bits: 0,
            fallbacks: 0,
        }
    }

    fn from_result(instance: &str, strategy: Strategy, res: &SolverResult, seconds: f64) -> BenchRecord {
        let s = &res.stats;
        BenchRecord {
            instance: instance.to_string(),
            strategy,
            status: res.status,
            seconds,
            conflicts: s.conflicts,
            decisions: s.decisions,
            propagations: s.propagations,
            learned: s.learned,
            max_coeff_bits: s.max_coeff_bits,
            fallbacks: s.fallbacks,
        }
    }

    fn fields(&self) -> [String; 10] {
        [
            self.instance.clone(),
            self.strategy.to_string(),
            self.status.to_string(),
            format!("{:.3}", self.seconds),
            self.conflicts.to_string(),
            self.decisions.to_string(),
            self.propagations.to_string(),
            self.learned.to_string(),
            self.max_coeff_bits.to_string(),
            self.fallbacks.to_string(),
        ]
    }
}

/// Solves with a wall-clock limit enforced both by the solver's own budget
/// checks and by a watchdog that raises its interrupt flag.
pub fn solve_with_timeout(
    instance: &ParsedInstance,
    mut config: SolverConfig,
    timeout: Option<Duration>,
) -> Result<SolverResult, SolverError> {
    let Some(limit) = timeout else {
        return solve(instance, config);
    };
    let flag = config.interrupt.clone().unwrap_or_else(|| Arc::new(AtomicBool::new(false)));
    config.interrupt = Some(flag.clone());
    config.time_budget = Some(limit);
    let (done, wait) = mpsc::channel::<()>();
    let watchdog = thread::spawn(move || {
        if let Err(mpsc::RecvTimeoutError::Timeout) = wait.recv_timeout(limit) {
            flag.store(true, Ordering::Relaxed);
        }
    });
    let res = solve(instance, config);
    let _ = done.send(());
    let _ = watchdog.join();
    res
}

/// A benchmark input: a parsed instance, or the reason it could not be read.
pub struct BenchInstance {
    pub name: String,
    pub instance: Result<ParsedInstance, String>,
}

/// Every `*.opb` file of `dir`, sorted by file name.
pub fn load_dir(dir: &Path) -> std::io::Result<Vec<BenchInstance>> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "opb"))
        .collect();
    paths.sort();
    Ok(paths
        .into_iter()
        .map(|p| {
            let name = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            let instance = std::fs::File::open(&p)
                .map_err(OpbError::from)
                .and_then(|f| read_opb(std::io::BufReader::new(f), ParseOptions::default()))
                .map(|(inst, _)| inst)
                .map_err(|e| e.to_string());
            BenchInstance { name, instance }
        })
        .collect())
}

#[derive(Debug, Clone)]
pub struct BenchOptions {
    pub strategies: Vec<Strategy>,
    pub timeout: Option<Duration>,
    pub jobs: usize,
    pub seed: u64,
}

/// Runs every (instance, strategy) pair on up to `jobs` threads, each run on
/// its own solver. Rows come back in instance-major order whatever the
/// scheduling; failed runs become UNKNOWN rows.
pub fn run_bench(instances: &[BenchInstance], opts: &BenchOptions) -> Vec<BenchRecord> {
    let pairs: Vec<(usize, Strategy)> = (0..instances.len())
        .flat_map(|i| opts.strategies.iter().map(move |s| (i, *s)))
        .collect();
    let results: Mutex<Vec<Option<BenchRecord>>> = Mutex::new(vec![None; pairs.len()]);
    let next = AtomicUsize::new(0);
    let jobs = opts.jobs.clamp(1, pairs.len().max(1));
    thread::scope(|scope| {
        for _ in 0..jobs {
            scope.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(i, strategy)) = pairs.get(k) else { break };
                let record = run_one(&instances[i], strategy, opts);
                results.lock().expect("results lock")[k] = Some(record);
            });
        }
    });
    results
        .into_inner()
        .expect("results lock")
        .into_iter()
        .map(|r| r.expect("every pair ran"))
        .collect()
}

fn run_one(bi: &BenchInstance, strategy: Strategy, opts: &BenchOptions) -> BenchRecord {
    let Ok(instance) = &bi.instance else {
        return BenchRecord::unknown(&bi.name, strategy, 0.0);
    };
    let config = SolverConfig {
        seed: opts.seed,
        ..SolverConfig::new(strategy)
    };
    let start = Instant::now();
    let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| {
        solve_with_timeout(instance, config, opts.timeout)
    }));
    let seconds = start.elapsed().as_secs_f64();
    match outcome {
        Ok(Ok(res)) => BenchRecord::from_result(&bi.name, strategy, &res, seconds),
        _ => BenchRecord::unknown(&bi.name, strategy, seconds),
    }
}

pub fn write_csv(records: &[BenchRecord], out: impl Write) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record(r.fields())?;
    }
    w.flush()?;
    Ok(())
}

/// For each strategy (in `strategies` order), one row per solved instance:
/// the running solved count against the sorted solve times.
pub fn write_cactus(records: &[BenchRecord], strategies: &[Strategy], out: impl Write) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CACTUS_HEADER)?;
    for s in strategies {
        let mut times: Vec<f64> = records
            .iter()
            .filter(|r| r.strategy == *s && r.status != Status::Unknown)
            .map(|r| r.seconds)
            .collect();
        times.sort_by(f64::total_cmp);
        for (k, t) in times.iter().enumerate() {
            w.write_record([s.to_string(), (k + 1).to_string(), format!("{t:.3}")])?;
        }
    }
    w.flush()?;
    Ok(())
}
