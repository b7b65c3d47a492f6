//! Command-line front end. Every subcommand that consumes randomness prints
//! its effective master seed; record output is line-delimited JSON with a
//! stable field order, byte-identical across reruns of the same invocation.
//!
//! Exit codes: 0 = success / all verdicts consistent, 1 = usage or runtime
//! error, 2 = ran fine but a verdict (or verification) was violated.

use crate::debruijn::{self, DeBruijnSpec};
use crate::entropy::{compressibility_report, Convention};
use crate::error::{Error, Result};
use crate::experiments::{self, ExperimentConfig};
use crate::rng::RngSpec;
use crate::seq::{parse_sequence, ParseMode, Sequence};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::fs;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VIOLATED: i32 = 2;

#[derive(Parser)]
#[command(
    name = "entrodeck",
    about = "Empirical entropy, De Bruijn sequences, and card-trick experiments",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Per-order empirical entropy report for a string
    Entropy(EntropyArgs),
    /// Generate, verify, count, or enumerate De Bruijn sequences
    Debruijn {
        #[command(subcommand)]
        command: DebruijnCommand,
    },
    /// Run a named Monte Carlo experiment
    Experiment(ExperimentArgs),
    /// Card-trick experiments (sugar for `experiment trick-*`)
    Trick {
        #[command(subcommand)]
        command: TrickCommand,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    RawBytes,
    DigitText,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ConventionArg {
    Linear,
    Cyclic,
}

impl From<ConventionArg> for Convention {
    fn from(c: ConventionArg) -> Convention {
        match c {
            ConventionArg::Linear => Convention::Linear,
            ConventionArg::Cyclic => Convention::Cyclic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Table,
    Records,
}

#[derive(Args)]
struct InputArgs {
    /// Input file
    path: Option<String>,
    /// Inline digit-text input
    #[arg(long, conflicts_with = "path")]
    inline: Option<String>,
    /// Input interpretation; defaults to digit-text for --inline, raw-bytes for files
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Alphabet size; defaults to 256 for raw-bytes, inferred for digit-text
    #[arg(long)]
    sigma: Option<u32>,
}

impl InputArgs {
    fn read(&self) -> Result<Sequence> {
        let (bytes, default_mode) = match (&self.inline, &self.path) {
            (Some(s), _) => (s.clone().into_bytes(), ModeArg::DigitText),
            (None, Some(p)) => (fs::read(p)?, ModeArg::RawBytes),
            (None, None) => {
                return Err(Error::Config(
                    "provide an input file or --inline string".into(),
                ))
            }
        };
        let mode = match self.mode.unwrap_or(default_mode) {
            ModeArg::RawBytes => ParseMode::RawBytes,
            ModeArg::DigitText => ParseMode::DigitText,
        };
        parse_sequence(&bytes, mode, self.sigma)
    }
}

#[derive(Args)]
struct EntropyArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Order or order range, e.g. `3` or `0..8` (inclusive)
    #[arg(long, default_value = "0..8")]
    k: String,
    #[arg(long, value_enum, default_value_t = ConventionArg::Linear)]
    convention: ConventionArg,
    /// Epsilon for the threshold flags
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    #[arg(long, value_enum, default_value_t = FormatArg::Table)]
    format: FormatArg,
}

#[derive(Subcommand)]
enum DebruijnCommand {
    /// Generate a sequence with the named strategy
    Gen {
        #[arg(long)]
        sigma: u32,
        #[arg(long)]
        order: u32,
        #[arg(long, default_value = "greedy-least")]
        strategy: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Check a candidate sequence
    Verify {
        #[arg(long)]
        sigma: u32,
        #[arg(long)]
        order: u32,
        /// Input file with the candidate
        path: Option<String>,
        /// Inline digit-text candidate
        #[arg(long, conflicts_with = "path")]
        inline: Option<String>,
        /// Input interpretation; defaults to digit-text for --inline, raw-bytes for files
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
    },
    /// Exact number of sequences
    Count {
        #[arg(long)]
        sigma: u32,
        #[arg(long)]
        order: u32,
    },
    /// log2 of the count and its ratio to sigma^k log2 sigma
    Bits {
        #[arg(long)]
        sigma: u32,
        #[arg(long)]
        order: u32,
    },
    /// Exhaustively enumerate all sequences (tiny scale)
    Enum {
        #[arg(long)]
        sigma: u32,
        #[arg(long)]
        order: u32,
    },
}

#[derive(Args)]
struct ExperimentArgs {
    /// Experiment name (see `--help` output for the registry)
    name: String,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    sigma: Option<u32>,
    #[arg(long)]
    k: Option<usize>,
    /// Symbols read per trial; a comma-separated list sweeps (one record per value)
    #[arg(long)]
    m: Option<String>,
    #[arg(long)]
    draw: Option<usize>,
    #[arg(long)]
    distinguisher: Option<String>,
    #[arg(long)]
    epsilon: Option<f64>,
    /// Reuse one adversarial string across all tails trials
    #[arg(long)]
    fixed_string: bool,
    #[arg(long)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads (default: all cores); never affects results
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, value_enum, default_value_t = FormatArg::Table)]
    format: FormatArg,
}

#[derive(Subcommand)]
enum TrickCommand {
    /// De Bruijn-prearranged deck, six-card draws
    Prearranged(TrickArgs),
    /// Shuffled deck, seven-card draws by default
    Shuffled(TrickArgs),
}

#[derive(Args)]
struct TrickArgs {
    #[arg(long)]
    draw: Option<usize>,
    #[arg(long)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, value_enum, default_value_t = FormatArg::Table)]
    format: FormatArg,
}

fn parse_k_range(spec: &str) -> Result<(usize, usize)> {
    if let Some((a, b)) = spec.split_once("..") {
        let lo = a
            .parse()
            .map_err(|_| Error::Config(format!("bad order range {spec:?}")))?;
        let hi = b
            .parse()
            .map_err(|_| Error::Config(format!("bad order range {spec:?}")))?;
        Ok((lo, hi))
    } else {
        let k = spec
            .parse()
            .map_err(|_| Error::Config(format!("bad order {spec:?}")))?;
        Ok((k, k))
    }
}

fn parse_m_list(spec: &str) -> Result<Vec<usize>> {
    spec.split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| Error::Config(format!("bad m value {s:?}")))
        })
        .collect()
}

fn in_pool<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match workers {
        None => f(),
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .expect("thread pool builds")
            .install(f),
    }
}

fn run_entropy(args: &EntropyArgs) -> Result<i32> {
    let seq = args.input.read()?;
    let (lo, hi) = parse_k_range(&args.k)?;
    let rows = compressibility_report(&seq, lo, hi, args.convention.into(), args.epsilon)?;
    match args.format {
        FormatArg::Records => {
            for row in &rows {
                println!("{}", serde_json::to_string(row).expect("row serializes"));
            }
        }
        FormatArg::Table => {
            println!(
                "n = {}, sigma = {}, convention = {}, epsilon = {}",
                seq.len(),
                seq.sigma(),
                Convention::from(args.convention),
                args.epsilon
            );
            println!(
                "{:>3}  {:>14}  {:>14}  {:>9}  {:>5}  {:>7}  {:>7}",
                "k", "h (bits/sym)", "total bits", "contexts", "k>=lg", "k>=1+e", "k>=2+e"
            );
            for row in &rows {
                println!(
                    "{:>3}  {:>14.8}  {:>14.4}  {:>9}  {:>5}  {:>7}  {:>7}",
                    row.report.k,
                    row.report.h_value,
                    row.report.total_bits,
                    row.report.context_count,
                    row.thresholds.log,
                    row.thresholds.one_plus_eps,
                    row.thresholds.two_plus_eps
                );
            }
        }
    }
    Ok(EXIT_OK)
}

fn run_debruijn(cmd: &DebruijnCommand) -> Result<i32> {
    match cmd {
        DebruijnCommand::Gen {
            sigma,
            order,
            strategy,
            seed,
        } => {
            let spec = DeBruijnSpec::new(*sigma, *order)?;
            let d = debruijn::generate(&spec, strategy, RngSpec::new(*seed, 0))?;
            if strategy == "eulerian-random" {
                eprintln!("master seed: {seed}");
            }
            println!("{}", d.sequence().display());
            Ok(EXIT_OK)
        }
        DebruijnCommand::Verify {
            sigma,
            order,
            path,
            inline,
            mode,
        } => {
            let spec = DeBruijnSpec::new(*sigma, *order)?;
            let input = InputArgs {
                path: path.clone(),
                inline: inline.clone(),
                mode: *mode,
                sigma: Some(*sigma),
            };
            let candidate = input.read()?;
            let v = debruijn::verify(&candidate, &spec);
            match v.violation {
                None => {
                    println!("ok");
                    Ok(EXIT_OK)
                }
                Some(violation) => {
                    println!("invalid: {violation}");
                    Ok(EXIT_VIOLATED)
                }
            }
        }
        DebruijnCommand::Count { sigma, order } => {
            let spec = DeBruijnSpec::new(*sigma, *order)?;
            println!("{}", debruijn::count(&spec)?);
            Ok(EXIT_OK)
        }
        DebruijnCommand::Bits { sigma, order } => {
            let spec = DeBruijnSpec::new(*sigma, *order)?;
            let b = debruijn::count_bits(&spec);
            println!("log2_count = {}", b.log2_count);
            println!("ratio = {}", b.ratio);
            Ok(EXIT_OK)
        }
        DebruijnCommand::Enum { sigma, order } => {
            let spec = DeBruijnSpec::new(*sigma, *order)?;
            let all = debruijn::enumerate(&spec)?;
            for d in &all {
                println!("{}", d.sequence().display());
            }
            println!("count = {}", all.len());
            Ok(EXIT_OK)
        }
    }
}

fn run_configs(
    configs: Vec<ExperimentConfig>,
    workers: Option<usize>,
    format: FormatArg,
) -> Result<i32> {
    if format == FormatArg::Table {
        println!("master seed: {}", configs[0].rng.master_seed);
    }
    let mut worst = EXIT_OK;
    for cfg in configs {
        let started = std::time::Instant::now();
        let result = in_pool(workers, || experiments::run_experiment(&cfg))?;
        match format {
            FormatArg::Records => println!("{}", result.record()),
            FormatArg::Table => {
                print!("{}", result.human_table());
                println!("  {:<14}{:.3}s", "elapsed", started.elapsed().as_secs_f64());
            }
        }
        if result.verdict == experiments::Verdict::Violated {
            worst = EXIT_VIOLATED;
        }
    }
    Ok(worst)
}

fn run_experiment_cmd(args: &ExperimentArgs) -> Result<i32> {
    let m_values: Vec<Option<usize>> = match &args.m {
        None => vec![None],
        Some(spec) => parse_m_list(spec)?.into_iter().map(Some).collect(),
    };
    let configs: Vec<ExperimentConfig> = m_values
        .into_iter()
        .map(|m| {
            let mut cfg =
                ExperimentConfig::new(&args.name, args.trials, RngSpec::new(args.seed, 0));
            cfg.n = args.n;
            cfg.sigma = args.sigma;
            cfg.k = args.k;
            cfg.m = m;
            cfg.draw_size = args.draw;
            cfg.distinguisher = args.distinguisher.clone();
            cfg.epsilon = args.epsilon;
            cfg.fixed_string = args.fixed_string;
            cfg
        })
        .collect();
    run_configs(configs, args.workers, args.format)
}

fn run_trick(cmd: &TrickCommand) -> Result<i32> {
    let (name, args) = match cmd {
        TrickCommand::Prearranged(a) => ("trick-prearranged", a),
        TrickCommand::Shuffled(a) => ("trick-shuffled", a),
    };
    let mut cfg = ExperimentConfig::new(name, args.trials, RngSpec::new(args.seed, 0));
    cfg.draw_size = args.draw;
    run_configs(vec![cfg], args.workers, args.format)
}

/// Parse argv and run; returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // clap prints help/version through the error path too
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let outcome = match &cli.command {
        Command::Entropy(args) => run_entropy(args),
        Command::Debruijn { command } => run_debruijn(command),
        Command::Experiment(args) => run_experiment_cmd(args),
        Command::Trick { command } => run_trick(command),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}
