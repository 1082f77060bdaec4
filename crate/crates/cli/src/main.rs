use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use k3salem::involution::{check_involution, InvolutionJson, InvolutionRecord};
use k3salem::io::IntLike;
use k3salem::pipeline::{
    entropy_sweep, generate_involution_pool, search_context, search_irreducible_salem, sigma10_construct, verify_worked_example,
    verify_result, Pool, Report, SearchConfig, SearchOutcome, SearchResultJson, Sigma10Config, Sigma10Source, MAX_WORD_LENGTH,
};
use k3salem::poly::PolyJson;
use k3salem::reference::parse_sigma10_vectors;
use k3salem::rs::{build_lambda_with, LatticeJson, RsParams};
use k3salem::salem::{salem_check, CertificateJson, SalemContext, DEFAULT_PRIME_BUDGET, DEFAULT_ROOT_TOL};
use k3salem::{Error, IntPolynomial};
use serde_json::json;

#[derive(Parser)]
#[command(name = "k3salem", version, about = "Double plane involutions and Salem entropy on supersingular K3 surfaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct LatticeArgs {
    #[arg(long)]
    p: i64,
    #[arg(long)]
    sigma: u32,
    /// Override the auxiliary prime (requires --gamma).
    #[arg(long, requires = "gamma")]
    q: Option<i64>,
    #[arg(long, requires = "q")]
    gamma: Option<i64>,
}

impl LatticeArgs {
    fn params(&self) -> k3salem::Result<RsParams> {
        match (self.q, self.gamma) {
            (Some(q), Some(g)) => RsParams::with_q_gamma(self.p, self.sigma, q, g),
            _ => RsParams::new(self.p, self.sigma),
        }
    }

    fn config(&self, seed: u64) -> SearchConfig {
        let mut c = SearchConfig::new(self.p, self.sigma, seed);
        c.q_gamma = self.q.zip(self.gamma);
        c
    }
}

#[derive(Subcommand)]
enum Command {
    /// Write the Gram matrix and basis layout of the lattice.
    BuildLattice {
        #[command(flatten)]
        lattice: LatticeArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a pool of double plane involutions.
    Pool {
        #[command(flatten)]
        lattice: LatticeArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 64)]
        size: usize,
        #[arg(long, default_value_t = 4096)]
        max_draws: usize,
        #[arg(long, default_value_t = 0)]
        threads: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Search for a word of involutions with an irreducible Salem polynomial.
    Search {
        #[command(flatten)]
        lattice: LatticeArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        pool: Option<PathBuf>,
        #[arg(long, default_value_t = 64)]
        pool_size: usize,
        #[arg(long, default_value_t = MAX_WORD_LENGTH)]
        max_word: usize,
        #[arg(long, default_value_t = 100_000)]
        budget_trials: u64,
        #[arg(long)]
        budget_seconds: Option<f64>,
        #[arg(long, default_value_t = 0)]
        threads: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// The σ = 10 construction from explicit or searched vectors.
    Sigma10 {
        #[arg(long)]
        p: i64,
        /// JSON file `{"vectors": [{"a": .., "v": [..4]}, ...]}`.
        #[arg(long)]
        vectors: Option<PathBuf>,
        /// Base vector index (1-6) for the extensions; all are tried otherwise.
        #[arg(long)]
        base_k: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200_000)]
        max_draws: usize,
        #[arg(long, default_value_t = 0)]
        threads: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Re-check a stored search result.
    Verify {
        #[arg(long)]
        result: PathBuf,
    },
    /// Reproduce the p = 7 worked example.
    #[command(name = "paper-example")]
    WorkedExample,
    /// Test whether a polynomial is an irreducible Salem polynomial.
    SalemCheck {
        #[arg(long)]
        poly: PathBuf,
        /// Do not assume the polynomial comes from a K3 automorphism.
        #[arg(long)]
        standalone: bool,
        #[arg(long, default_value_t = DEFAULT_PRIME_BUDGET)]
        prime_budget: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Entropy of the σ = 10 construction over a list of primes.
    EntropySweep {
        #[arg(long, value_delimiter = ',', required = true)]
        primes: Vec<i64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200_000)]
        max_draws: usize,
        #[arg(long, default_value_t = 0)]
        threads: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Failure kinds mapped to exit codes 1 and 2.
enum Failure {
    Rejected(String),
    Invalid(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        if let Some(err) = e.downcast_ref::<Error>() {
            if matches!(err, Error::Exhausted(_) | Error::PropertyFailed(_)) {
                return Failure::Rejected(format!("{e:#}"));
            }
        }
        Failure::Invalid(e)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::from(anyhow::Error::new(e))
    }
}

type Outcome = std::result::Result<(), Failure>;

fn write_json(path: &Path, value: &impl serde::Serialize) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn print_report(report: &Report) {
    for c in &report.checks {
        let mark = if c.passed { "ok  " } else { "FAIL" };
        if c.detail.is_empty() {
            println!("{mark} {}", c.name);
        } else {
            println!("{mark} {}: {}", c.name, c.detail);
        }
    }
}

fn report_outcome(report: &Report, what: &str) -> Outcome {
    print_report(report);
    if report.all_passed() {
        Ok(())
    } else {
        Err(Failure::Rejected(format!("{what} failed")))
    }
}

#[derive(serde::Serialize, serde::Deserialize)]
struct PoolJson {
    p: IntLike,
    sigma: IntLike,
    q: IntLike,
    gamma: IntLike,
    seed: IntLike,
    draws: IntLike,
    involutions: Vec<InvolutionJson>,
}

fn pool_to_json(pool: &Pool, seed: u64) -> PoolJson {
    let params = pool.rs.params;
    PoolJson {
        p: params.p.into(),
        sigma: i64::from(params.sigma).into(),
        q: params.q.into(),
        gamma: params.gamma.into(),
        seed: IntLike(seed.into()),
        draws: (pool.attempts as i64).into(),
        involutions: pool.records.iter().map(InvolutionJson::from).collect(),
    }
}

fn load_pool(path: &Path, config: &SearchConfig) -> anyhow::Result<Pool> {
    let j: PoolJson = read_json(path)?;
    let same = |x: &IntLike, y: i64| x.0 == y.into();
    let params = config.params()?;
    if !same(&j.p, params.p) || !same(&j.sigma, params.sigma.into()) || !same(&j.q, params.q) || !same(&j.gamma, params.gamma) {
        anyhow::bail!(Error::InvalidParams("pool was built for different lattice parameters".into()));
    }
    let (rs, ample) = search_context(config)?;
    let records = j
        .involutions
        .iter()
        .map(|inv| {
            let (h, matrix) = inv.parts()?;
            check_involution(&rs.lattice, &h, &matrix).map_err(|e| Error::InvalidParams(format!("pool entry: {e}")))?;
            Ok(InvolutionRecord { h, components: Vec::new(), matrix, singularities: inv.singularities.clone() })
        })
        .collect::<k3salem::Result<Vec<_>>>()?;
    Ok(Pool { rs, ample, records, attempts: 0 })
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::BuildLattice { lattice, out } => {
            let rs = build_lambda_with(lattice.params()?)?;
            write_json(&out, &LatticeJson::from(&rs))?;
            println!("rank {} lattice written to {}", rs.lattice.rank(), out.display());
            Ok(())
        }
        Command::Pool { lattice, seed, size, max_draws, threads, out } => {
            let mut config = lattice.config(seed);
            config.pool_size = size;
            config.pool_attempts = max_draws;
            config.threads = threads;
            let pool = generate_involution_pool(&config)?;
            write_json(&out, &pool_to_json(&pool, seed))?;
            println!("{} involutions from {} draws", pool.records.len(), pool.attempts);
            Ok(())
        }
        Command::Search { lattice, seed, pool, pool_size, max_word, budget_trials, budget_seconds, threads, out } => {
            let mut config = lattice.config(seed);
            config.pool_size = pool_size;
            config.max_word_length = max_word;
            config.trial_budget = budget_trials;
            config.threads = threads;
            if let Some(s) = budget_seconds {
                if !(s.is_finite() && s >= 0.0) {
                    return Err(Failure::Invalid(anyhow::anyhow!("--budget-seconds must be non-negative")));
                }
                config.time_budget = Some(Duration::from_secs_f64(s));
            }
            config.validate()?;
            let pool = match pool {
                Some(path) => load_pool(&path, &config)?,
                None => match generate_involution_pool(&config) {
                    Err(Error::Exhausted(msg)) => {
                        write_json(&out, &json!({ "status": "exhausted", "reason": msg }))?;
                        return Err(Failure::Rejected(msg));
                    }
                    other => other?,
                },
            };
            match search_irreducible_salem(&config, &pool)? {
                SearchOutcome::Accepted(result, stats) => {
                    write_json(&out, &SearchResultJson::from(&*result))?;
                    println!(
                        "accepted trial {} (word length {}), lambda = {}, entropy = {:.9}, {} trials in {:.2?}",
                        result.trial,
                        result.word.len(),
                        result.certificate.lambda_string(),
                        result.certificate.entropy,
                        stats.trials,
                        stats.elapsed
                    );
                    Ok(())
                }
                SearchOutcome::Exhausted(stats) => {
                    let summary = json!({
                        "status": "exhausted",
                        "trials": stats.trials.to_string(),
                        "seconds": format!("{:.3}", stats.elapsed.as_secs_f64()),
                        "rejections": stats.rejections.iter().map(|(k, v)| (k.clone(), v.to_string())).collect::<std::collections::BTreeMap<_, _>>(),
                    });
                    write_json(&out, &summary)?;
                    Err(Failure::Rejected(format!("budget exhausted after {} trials", stats.trials)))
                }
            }
        }
        Command::Sigma10 { p, vectors, base_k, seed, max_draws, threads, out } => {
            let source = match vectors {
                Some(path) => {
                    let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
                    Sigma10Source::Vectors(parse_sigma10_vectors(&text)?)
                }
                None => Sigma10Source::Search { seed, max_attempts: max_draws },
            };
            let mut config = Sigma10Config::new(p, source);
            config.base_k = base_k;
            config.threads = threads;
            let outcome = sigma10_construct(&config)?;
            write_json(&out, &SearchResultJson::from(&outcome.result))?;
            for (k, why) in &outcome.rejected_k {
                println!("base k = {k} rejected: {why}");
            }
            println!(
                "base k = {}, lambda = {}, entropy = {:.9}",
                outcome.base_k,
                outcome.result.certificate.lambda_string(),
                outcome.result.certificate.entropy
            );
            Ok(())
        }
        Command::Verify { result } => {
            let j: SearchResultJson = read_json(&result)?;
            let report = verify_result(&j)?;
            report_outcome(&report, "verification")
        }
        Command::WorkedExample => {
            let report = verify_worked_example()?;
            report_outcome(&report, "example")
        }
        Command::SalemCheck { poly, standalone, prime_budget, out } => {
            let j: PolyJson = read_json(&poly)?;
            let phi = IntPolynomial::try_from(&j)?;
            let ctx = if standalone { SalemContext::Standalone } else { SalemContext::FromK3Automorphism };
            match salem_check(&phi, ctx, prime_budget, DEFAULT_ROOT_TOL)? {
                Ok(cert) => {
                    let cj = CertificateJson::from(&cert);
                    if let Some(path) = out {
                        write_json(&path, &cj)?;
                    }
                    println!(
                        "salem: lambda = {}, entropy = {:.12}, irreducibility: {}",
                        cert.lambda_string(),
                        cert.entropy,
                        cert.irreducibility
                    );
                    Ok(())
                }
                Err(r) => Err(Failure::Rejected(format!("not an irreducible Salem polynomial: {r}"))),
            }
        }
        Command::EntropySweep { primes, seed, max_draws, threads, out } => {
            for &p in &primes {
                RsParams::new(p, 10)?;
            }
            let sweep = entropy_sweep(&primes, seed, max_draws, threads);
            fs::write(&out, sweep.to_csv()).with_context(|| format!("writing {}", out.display()))?;
            for (p, why) in &sweep.failures {
                println!("p = {p}: {why}");
            }
            if let Some(f) = sweep.fits() {
                println!("ln(lambda) ~ {:.4} ln(p) + {:.4}", f.natural.slope, f.natural.intercept);
                println!("ln(lambda) ~ {:.4} log10(p) + {:.4}", f.entropy_vs_log10_p.slope, f.entropy_vs_log10_p.intercept);
                println!("log10(lambda) ~ {:.4} ln(p) + {:.4}", f.log10_lambda_vs_ln_p.slope, f.log10_lambda_vs_ln_p.intercept);
            }
            if sweep.rows.is_empty() {
                Err(Failure::Rejected("no prime produced a construction".into()))
            } else {
                Ok(())
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Rejected(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Invalid(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
