//! Command-line front end. Observation files hold one number per line.
//!
//! Exit codes: 0 on success, 1 on a numerical failure or a failed check,
//! 2 on a usage error.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};

use hsuq::credible;
use hsuq::experiments::{self, ScenarioConfig, VerifyParams};
use hsuq::hierarchical::{self, ChainOptions, HyperPrior, DEFAULT_BURN_IN, DEFAULT_ITERS};
use hsuq::selection;
use hsuq::tau;
use hsuq::{Error, GlobalScale};

#[derive(Parser)]
#[command(name = "hsuq", version, about = "Horseshoe-prior uncertainty quantification for sparse normal means")]
#[command(arg_required_else_help = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate the global scale tau.
    FitTau {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Estimator::Mmle)]
        method: Estimator,
        #[arg(long, default_value_t = 2.0)]
        c1: f64,
        #[arg(long, default_value_t = 1.0)]
        c2: f64,
    },
    /// Marginal credible intervals, one CSV row per observation.
    Intervals {
        file: PathBuf,
        #[arg(long, default_value = "mmle")]
        tau: TauChoice,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long = "L", default_value_t = 1.0)]
        blowup: f64,
    },
    /// Credible ball, printed as JSON.
    Ball {
        file: PathBuf,
        #[arg(long, default_value = "mmle")]
        tau: TauChoice,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long = "L", default_value_t = 1.0)]
        blowup: f64,
        #[arg(long, default_value_t = 10_000)]
        draws: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Use the moment approximation instead of posterior draws.
        #[arg(long)]
        approx: bool,
    },
    /// Hierarchical Bayes Gibbs run: per-coordinate summaries on stdout.
    Hb {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Prior::Tcauchy)]
        prior: Prior,
        #[arg(long, default_value_t = DEFAULT_ITERS)]
        iters: usize,
        #[arg(long = "burnin", default_value_t = DEFAULT_BURN_IN)]
        burn_in: usize,
        #[arg(long, default_value_t = 1)]
        thin: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        /// Also write every kept draw to this CSV file.
        #[arg(long)]
        draws_out: Option<PathBuf>,
    },
    /// Select signals by interval exclusion of zero or by thresholding.
    Select {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Rule::Interval)]
        rule: Rule,
        #[arg(long, default_value = "mmle")]
        tau: TauChoice,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long = "L", default_value_t = 1.0)]
        blowup: f64,
        #[arg(long, default_value_t = 0.5)]
        cutoff: f64,
    },
    /// Run a simulation scenario from a TOML config; writes <name>.csv and <name>.json.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Run a numerical theory check.
    Verify {
        #[arg(required_unless_present = "list")]
        check: Option<String>,
        #[arg(long, conflicts_with = "check")]
        list: bool,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Estimator {
    Mmle,
    Simple,
}

#[derive(Clone, Copy, ValueEnum)]
enum Prior {
    Cauchy,
    Tcauchy,
    Tuniform,
}

#[derive(Clone, Copy, ValueEnum)]
enum Rule {
    Interval,
    Threshold,
}

/// `--tau`: a number in `(0, 1]`, or an estimator name.
#[derive(Clone, Copy)]
enum TauChoice {
    Mmle,
    Simple,
    Value(f64),
}

impl FromStr for TauChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "mmle" => Ok(TauChoice::Mmle),
            "simple" => Ok(TauChoice::Simple),
            _ => {
                let t: f64 = s.parse().map_err(|_| format!("expected mmle, simple or a number, got `{s}`"))?;
                GlobalScale::new(t).map_err(|e| e.to_string())?;
                Ok(TauChoice::Value(t))
            }
        }
    }
}

impl TauChoice {
    fn resolve(self, ys: &[f64]) -> hsuq::Result<GlobalScale> {
        match self {
            TauChoice::Mmle => Ok(tau::mmle(ys)?.value),
            TauChoice::Simple => Ok(tau::simple_estimator(ys, 2.0, 1.0)?.value),
            TauChoice::Value(t) => GlobalScale::new(t),
        }
    }
}

enum Failure {
    Lib(Error),
    CheckFailed,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Lib(e.into())
    }
}

fn load(path: &Path) -> hsuq::Result<Vec<f64>> {
    experiments::read_observations(path)
}

fn json<T: serde::Serialize>(v: &T) -> hsuq::Result<String> {
    serde_json::to_string_pretty(v).map_err(|e| Error::Parse(e.to_string()))
}

fn run(cmd: Command) -> Result<(), Failure> {
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    match cmd {
        Command::FitTau { file, method, c1, c2 } => {
            let ys = load(&file)?;
            let est = match method {
                Estimator::Mmle => tau::mmle(&ys)?,
                Estimator::Simple => tau::simple_estimator(&ys, c1, c2)?,
            };
            writeln!(out, "{}", est.tau())?;
        }
        Command::Intervals { file, tau, alpha, blowup } => {
            let ys = load(&file)?;
            let t = tau.resolve(&ys)?;
            let ivs = credible::interval_batch(&ys, t, alpha, blowup)?;
            writeln!(out, "index,y,center,lower,upper")?;
            for (i, (y, iv)) in ys.iter().zip(&ivs).enumerate() {
                writeln!(out, "{},{y},{},{},{}", i + 1, iv.center, iv.lower(), iv.upper())?;
            }
        }
        Command::Ball { file, tau, alpha, blowup, draws, seed, approx } => {
            let ys = load(&file)?;
            let t = tau.resolve(&ys)?;
            let ball = if approx {
                credible::credible_ball_approx(&ys, t, alpha, blowup)?
            } else {
                credible::credible_ball(&ys, t, alpha, blowup, draws, seed)?
            };
            writeln!(out, "{}", json(&ball)?)?;
        }
        Command::Hb { file, prior, iters, burn_in, thin, seed, alpha, draws_out } => {
            let ys = load(&file)?;
            let n = ys.len();
            let prior = match prior {
                Prior::Cauchy => HyperPrior::HalfCauchy,
                Prior::Tcauchy => HyperPrior::truncated_cauchy(n),
                Prior::Tuniform => HyperPrior::truncated_uniform(n),
            };
            let chain = hierarchical::run_chain(&ys, prior, ChainOptions { iters, burn_in, thin, seed })?;
            let means = chain.posterior_mean();
            let ivs = hierarchical::hb_marginal_intervals(&chain, alpha)?;
            let taus = chain.tau_draws();
            let tau_mean = taus.iter().sum::<f64>() / taus.len() as f64;
            writeln!(out, "# tau posterior mean {tau_mean}, {} kept draws, {} clamped", chain.len(), chain.clamped)?;
            writeln!(out, "index,y,mean,lower,upper")?;
            for i in 0..n {
                writeln!(out, "{},{},{},{},{}", i + 1, ys[i], means[i], ivs[i].lower(), ivs[i].upper())?;
            }
            if let Some(path) = draws_out {
                chain.write_csv(BufWriter::new(fs::File::create(path)?), None)?;
            }
        }
        Command::Select { file, rule, tau, alpha, blowup, cutoff } => {
            let ys = load(&file)?;
            let t = tau.resolve(&ys)?;
            let sel = match rule {
                Rule::Interval => selection::select_by_interval(&credible::interval_batch(&ys, t, alpha, blowup)?),
                Rule::Threshold => selection::select_by_threshold(&ys, t, cutoff)?,
            };
            writeln!(out, "index,y,selected")?;
            for (i, (y, s)) in ys.iter().zip(&sel.selected).enumerate() {
                writeln!(out, "{},{y},{}", i + 1, u8::from(*s))?;
            }
        }
        Command::Simulate { config, out_dir } => {
            let cfg = ScenarioConfig::from_toml(&fs::read_to_string(&config)?)?;
            let report = experiments::run_scenario(&cfg)?;
            fs::create_dir_all(&out_dir)?;
            let csv_path = out_dir.join(format!("{}.csv", cfg.name));
            let mut csv = BufWriter::new(fs::File::create(&csv_path)?);
            report.write_csv(&mut csv)?;
            csv.flush()?;
            let json_path = out_dir.join(format!("{}.json", cfg.name));
            fs::write(&json_path, report.to_json()? + "\n")?;
            for m in &report.methods {
                writeln!(
                    out,
                    "{}: coverage {:.4}, mean tau {:.4}, interval FDR {:.4}, threshold FDR {:.4}",
                    m.method, m.coverage.all.unwrap_or(f64::NAN), m.mean_tau, m.interval_rule.fdr, m.threshold_rule.fdr
                )?;
            }
            writeln!(out, "wrote {} and {}", csv_path.display(), json_path.display())?;
        }
        Command::Verify { check, list, seed, json: as_json } => {
            if list {
                for c in experiments::registry() {
                    writeln!(out, "{:<20} {}", c.name, c.summary)?;
                }
                return Ok(());
            }
            let name = check.expect("clap requires a check unless --list");
            let mut params = VerifyParams::default();
            if let Some(s) = seed {
                params.seed = s;
            }
            let outcome = experiments::verify_theory(&name, &params)?;
            if as_json {
                writeln!(out, "{}", json(&outcome)?)?;
            } else {
                write!(out, "{outcome}")?;
            }
            out.flush()?;
            if !outcome.passed {
                return Err(Failure::CheckFailed);
            }
        }
    }
    out.flush()?;
    Ok(())
}

fn init_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("HSUQ_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("HSUQ_THREADS must be a positive integer, got `{v}`"))?;
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())?;
    #[cfg(not(feature = "parallel"))]
    let _ = n;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Err(msg) = init_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::CheckFailed) => ExitCode::from(1),
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            if e.is_numerical() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
