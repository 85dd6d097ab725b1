use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use weakpb::bench::{load_dir, run_bench, solve_with_timeout, write_cactus, write_csv, BenchOptions};
use weakpb::generate::{php, random, RandomParams};
use weakpb::opb::{format_solution, read_opb, write_opb, ParseOptions, ParsedInstance, Status};
use weakpb::solver::SolverConfig;
use weakpb::trace::{verify_trace, DerivationTrace};
use weakpb::Strategy;

/// Pseudo-Boolean CDCL solver with selectable conflict-analysis weakening.
#[derive(Parser)]
#[command(name = "weakpb", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one OPB instance.
    Solve(SolveArgs),
    /// Run every strategy on every `.opb` file of a directory.
    Bench(BenchArgs),
    /// Write a generated instance in OPB format.
    Generate {
        #[command(subcommand)]
        family: Family,
    },
    /// Check a derivation trace against its instance.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct SolveArgs {
    file: PathBuf,
    #[arg(long, default_value = "gen-res")]
    strategy: Strategy,
    /// Wall-clock limit in seconds.
    #[arg(long)]
    timeout: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Re-check the model against the parsed instance before printing it.
    #[arg(long)]
    verify_model: bool,
    /// Write the derivation trace to this file.
    #[arg(long, value_name = "PATH")]
    emit_trace: Option<PathBuf>,
    /// Drop an objective function instead of rejecting the file.
    #[arg(long)]
    ignore_objective: bool,
}

#[derive(Args)]
struct BenchArgs {
    dir: PathBuf,
    /// Comma-separated strategy names; all eleven by default.
    #[arg(long, value_delimiter = ',')]
    strategies: Vec<Strategy>,
    #[arg(long, default_value_t = 60.0)]
    timeout: f64,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Cactus CSV path; defaults to the output path with `.cactus.csv`.
    #[arg(long)]
    cactus: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Family {
    /// Pigeonhole formula.
    Php {
        #[arg(long)]
        pigeons: usize,
        #[arg(long)]
        holes: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Random constraints with weights in [1, max-weight].
    Random {
        #[arg(long)]
        vars: usize,
        #[arg(long)]
        constraints: usize,
        #[arg(long, default_value_t = 10)]
        max_weight: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct VerifyArgs {
    file: PathBuf,
    #[arg(long)]
    trace: PathBuf,
    #[arg(long)]
    ignore_objective: bool,
}

const EXIT_SAT: u8 = 10;
const EXIT_UNSAT: u8 = 20;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Generate { family } => cmd_generate(family),
        Command::Verify(args) => cmd_verify(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn seconds(s: f64) -> Result<Duration, String> {
    Duration::try_from_secs_f64(s).map_err(|_| format!("invalid timeout {s}"))
}

fn load(path: &Path, ignore_objective: bool) -> Result<ParsedInstance, String> {
    let file = File::open(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let (inst, warnings) = read_opb(BufReader::new(file), ParseOptions { ignore_objective })
        .map_err(|e| format!("{}: {e}", path.display()))?;
    for w in warnings {
        eprintln!("warning: {}: {w}", path.display());
    }
    Ok(inst)
}

fn cmd_solve(args: SolveArgs) -> Result<u8, String> {
    let inst = load(&args.file, args.ignore_objective)?;
    let config = SolverConfig {
        seed: args.seed,
        record_trace: args.emit_trace.is_some(),
        ..SolverConfig::new(args.strategy)
    };
    let timeout = args.timeout.map(seconds).transpose()?;
    let res = solve_with_timeout(&inst, config, timeout).map_err(|e| e.to_string())?;
    if args.verify_model {
        if let Some(model) = &res.model {
            if !inst.is_model(model) {
                return Err("model does not satisfy the instance".into());
            }
        }
    }
    if let (Some(path), Some(trace)) = (&args.emit_trace, &res.trace) {
        let file = File::create(path).map_err(|e| format!("{}: {e}", path.display()))?;
        let mut out = BufWriter::new(file);
        trace
            .write_to(&mut out)
            .and_then(|_| out.flush())
            .map_err(|e| format!("{}: {e}", path.display()))?;
    }
    let st = &res.stats;
    let mut out = io::stdout().lock();
    let lines = [
        format!("c strategy {}", args.strategy),
        format!("c conflicts {}", st.conflicts),
        format!("c decisions {}", st.decisions),
        format!("c propagations {}", st.propagations),
        format!("c restarts {}", st.restarts),
        format!("c learned {}", st.learned),
        format!("c max_coeff_bits {}", st.max_coeff_bits),
        format!("c fallbacks {}", st.fallbacks),
        format!("c seconds {:.3}", st.seconds),
        format!("c assignments_per_second(propagations+decisions) {:.0}", st.assignments_per_second()),
        format_solution(res.status, res.model.as_deref()),
    ];
    for l in lines {
        writeln!(out, "{l}").map_err(|e| e.to_string())?;
    }
    Ok(match res.status {
        Status::Sat => EXIT_SAT,
        Status::Unsat => EXIT_UNSAT,
        Status::Unknown => 0,
    })
}

fn cactus_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}.cactus.csv"))
}

fn cmd_bench(args: BenchArgs) -> Result<u8, String> {
    let instances = load_dir(&args.dir).map_err(|e| format!("{}: {e}", args.dir.display()))?;
    for bi in &instances {
        if let Err(e) = &bi.instance {
            eprintln!("warning: {}: {e}", bi.name);
        }
    }
    let strategies = if args.strategies.is_empty() {
        Strategy::ALL.to_vec()
    } else {
        args.strategies
    };
    let opts = BenchOptions {
        strategies: strategies.clone(),
        timeout: Some(seconds(args.timeout)?),
        jobs: args.jobs,
        seed: args.seed,
    };
    let records = run_bench(&instances, &opts);
    let write = |path: &Path, f: &dyn Fn(File) -> Result<(), String>| {
        let file = File::create(path).map_err(|e| format!("{}: {e}", path.display()))?;
        f(file)
    };
    write(&args.out, &|f| write_csv(&records, f).map_err(|e| e.to_string()))?;
    let cactus = args.cactus.unwrap_or_else(|| cactus_path(&args.out));
    write(&cactus, &|f| write_cactus(&records, &strategies, f).map_err(|e| e.to_string()))?;
    Ok(0)
}

fn cmd_generate(family: Family) -> Result<u8, String> {
    let (inst, out) = match family {
        Family::Php { pigeons, holes, out } => (php(pigeons, holes).map_err(|e| e.to_string())?, out),
        Family::Random { vars, constraints, max_weight, seed, out } => {
            let params = RandomParams { vars, constraints, max_weight, seed };
            (random(params).map_err(|e| e.to_string())?, out)
        }
    };
    let file = File::create(&out).map_err(|e| format!("{}: {e}", out.display()))?;
    let mut w = BufWriter::new(file);
    write_opb(&inst, &mut w)
        .and_then(|_| w.flush())
        .map_err(|e| format!("{}: {e}", out.display()))?;
    Ok(0)
}

fn cmd_verify(args: VerifyArgs) -> Result<u8, String> {
    let inst = load(&args.file, args.ignore_objective)?;
    let file = File::open(&args.trace).map_err(|e| format!("{}: {e}", args.trace.display()))?;
    let trace = DerivationTrace::read(BufReader::new(file)).map_err(|e| e.to_string())?;
    match verify_trace(&inst, &trace) {
        Ok(s) => {
            println!(
                "c trace ok: {} inputs, {} steps, {} learned{}",
                s.inputs,
                s.steps,
                s.learned,
                if s.refuted { ", refutation" } else { "" }
            );
            Ok(0)
        }
        Err(e) => {
            println!("c trace rejected at entry {}: {}", e.index, e.message);
            Ok(1)
        }
    }
}
