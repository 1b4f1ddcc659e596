use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use ltower::chebyshev::{coeff_closed, p_recurrence};
use ltower::config::{at_least, build_spec, parse_config, ConfigError, OutputFormat, RunConfig};
use ltower::graph::build_cayley_serre;
use ltower::invariants::{extract_mu_lambda, fast_path};
use ltower::padic::{hensel_sqrt, PadicInt, Prime};
use ltower::seed::SeedSpec;
use ltower::series::series_q;
use ltower::tower::{
    default_levels, run_tower, verify_report, TowerError, TowerReport, Verdict, SCHEMA_VERSION,
};
use ltower::trees::TreeError;

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_CAP: u8 = 3;

/// Iwasawa invariants of ℓ-towers of bouquets, checked against exact
/// spanning-tree counts.
#[derive(Parser, Debug)]
#[command(name = "ltower", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Args, Debug, Default)]
struct Opts {
    /// The prime ℓ (use with --seeds)
    #[arg(long, global = true)]
    prime: Option<i64>,
    /// Comma-separated seeds: 2, -1/3, sqrt(3)@4
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    seeds: Option<Vec<String>>,
    /// Config file with the spec and run parameters
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Deepest tower level n_max
    #[arg(long, global = true)]
    levels: Option<i64>,
    /// Number K of series coefficients
    #[arg(long, global = true)]
    terms: Option<i64>,
    /// ℓ-adic digits N per coefficient
    #[arg(long, global = true)]
    precision: Option<i64>,
    /// Largest vertex count allowed at any level
    #[arg(long, global = true)]
    cap: Option<i64>,
    /// table or machine
    #[arg(long, global = true)]
    format: Option<String>,
    /// Write output here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for level counts
    #[arg(long, global = true)]
    jobs: Option<i64>,
    /// Seed for randomized checks
    #[arg(long, global = true)]
    test_seed: Option<u64>,
    /// Digits shown per series coefficient
    #[arg(long, global = true)]
    digits: Option<i64>,
    /// Replace the extracted λ before verification
    #[arg(long, global = true)]
    force_lambda: Option<i64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the coefficients of Q(T)
    Series,
    /// Print μ, λ, the n₀ bound and the provisional flag
    Invariants,
    /// Run the full tower verification
    Tower,
    /// Export the level-n graph as an edge list
    Graph {
        /// Tower level n
        #[arg(long)]
        level: u32,
    },
    /// Re-derive the verdict of a saved machine-format report
    VerifyReport { report: PathBuf },
    /// Randomized self-test of the arithmetic layer
    Selfcheck {
        /// Cases per check
        #[arg(long, default_value_t = 200)]
        cases: u32,
    },
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Cap(String),
    Failed(String),
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Usage(e.to_string())
    }
}

fn tower_error(e: TowerError) -> CliError {
    match e {
        TowerError::Trees(t @ TreeError::LevelTooLarge { .. }) => CliError::Cap(t.to_string()),
        TowerError::NoLevels => CliError::Usage(e.to_string()),
        other => CliError::Failed(other.to_string()),
    }
}

/// Resolves the spec from exactly one source and layers flags over the
/// config file.
fn resolve(opts: &Opts) -> Result<(SeedSpec, RunConfig), CliError> {
    let inline = opts.prime.is_some() || opts.seeds.is_some();
    let (spec, mut cfg) = match (&opts.config, inline) {
        (Some(_), true) => {
            return Err(CliError::Usage(
                "give either --config or --prime/--seeds, not both".into(),
            ))
        }
        (Some(path), false) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            parse_config(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?
        }
        (None, true) => {
            let (Some(prime), Some(seeds)) = (opts.prime, &opts.seeds) else {
                return Err(CliError::Usage("--prime and --seeds go together".into()));
            };
            let spec = build_spec(prime, seeds)?;
            let cfg = RunConfig::defaults_for(spec.prime());
            (spec, cfg)
        }
        (None, false) => {
            return Err(CliError::Usage(
                "no tower given; use --prime and --seeds, or --config".into(),
            ))
        }
    };
    if let Some(v) = opts.cap {
        cfg.vertex_cap = at_least("cap", v, 1)?;
        cfg.levels = default_levels(spec.prime(), cfg.vertex_cap);
    }
    if let Some(v) = opts.levels {
        cfg.levels = at_least("levels", v, 1)?;
    }
    if let Some(v) = opts.terms {
        cfg.terms = at_least("terms", v, 1)?;
    }
    if let Some(v) = opts.precision {
        cfg.precision = at_least("precision", v, 1)?;
    }
    if let Some(v) = opts.jobs {
        cfg.jobs = at_least("jobs", v, 1)?;
    }
    if let Some(v) = opts.digits {
        cfg.digits = at_least("digits", v, 1)?;
    }
    if let Some(f) = &opts.format {
        cfg.format = f.parse()?;
    }
    if let Some(p) = &opts.out {
        cfg.out = Some(p.clone());
    }
    if let Some(v) = opts.force_lambda {
        cfg.force_lambda = Some(at_least("force-lambda", v, 1)?);
    }
    if let Some(s) = opts.test_seed {
        cfg.test_seed = s;
    }
    Ok((spec, cfg))
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => {
            fs::write(path, text).map_err(|e| CliError::Failed(format!("{}: {e}", path.display())))
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| CliError::Failed(e.to_string()))
        }
    }
}

fn cmd_series(spec: &SeedSpec, cfg: &RunConfig) -> Result<String, CliError> {
    let q =
        series_q(spec, cfg.terms, cfg.precision).map_err(|e| CliError::Failed(e.to_string()))?;
    let rendered = q.render(cfg.digits);
    Ok(match cfg.format {
        OutputFormat::Table => q
            .coefficients()
            .iter()
            .zip(&rendered)
            .enumerate()
            .map(|(i, (c, d))| match small_value(c) {
                Some(v) => format!("c{} = {d}…  (= {v})\n", i + 1),
                None => format!("c{} = {d}…\n", i + 1),
            })
            .collect(),
        OutputFormat::Machine => {
            let coefficients: Vec<_> = q
                .coefficients()
                .iter()
                .zip(&rendered)
                .enumerate()
                .map(|(i, (c, d))| {
                    json!({
                        "index": i + 1,
                        "digits": d,
                        "residue": c.residue().to_string(),
                        "valuation": c.valuation(),
                    })
                })
                .collect();
            let doc = json!({
                "schema_version": SCHEMA_VERSION,
                "prime": spec.prime().get(),
                "seeds": spec.seeds().iter().map(|s| s.to_string()).collect::<Vec<_>>(),
                "terms": cfg.terms,
                "precision": cfg.precision,
                "coefficients": coefficients,
            });
            serde_json::to_string_pretty(&doc).expect("json value serializes") + "\n"
        }
    })
}

/// The signed representative when it is far smaller than the modulus, which
/// at working precision means the coefficient is that integer.
fn small_value(c: &PadicInt) -> Option<BigInt> {
    let r = c.signed_representative();
    let bound = BigInt::from(c.prime().get()).pow(c.precision() / 2);
    (c.precision() >= 8 && r.magnitude() < bound.magnitude()).then_some(r)
}

fn cmd_invariants(spec: &SeedSpec, cfg: &RunConfig) -> Result<String, CliError> {
    let q =
        series_q(spec, cfg.terms, cfg.precision).map_err(|e| CliError::Failed(e.to_string()))?;
    let inv = extract_mu_lambda(&q).map_err(|e| CliError::Failed(e.to_string()))?;
    let fast = fast_path(spec).is_some();
    Ok(match cfg.format {
        OutputFormat::Table => format!(
            "mu = {}\nlambda = {}\nk0 = {}\nn0 bound = {}\nprovisional = {}\nfast path = {}\n",
            inv.mu,
            inv.lambda,
            inv.k0,
            inv.n0_bound,
            if inv.provisional { "yes" } else { "no" },
            if fast { "yes" } else { "no" },
        ),
        OutputFormat::Machine => {
            let doc = json!({
                "schema_version": SCHEMA_VERSION,
                "prime": spec.prime().get(),
                "mu": inv.mu,
                "lambda": inv.lambda,
                "k0": inv.k0,
                "n0_bound": inv.n0_bound,
                "provisional": inv.provisional,
                "fast_path": fast,
                "nu": inv.nu,
            });
            serde_json::to_string_pretty(&doc).expect("json value serializes") + "\n"
        }
    })
}

fn render_report(report: &TowerReport, format: OutputFormat) -> String {
    match format {
        OutputFormat::Table => report.to_table(),
        OutputFormat::Machine => report.to_json(),
    }
}

fn verdict_code(v: Verdict) -> u8 {
    match v {
        Verdict::Fail => EXIT_FAIL,
        Verdict::Pass | Verdict::Inconclusive => 0,
    }
}

fn check(failures: &mut Vec<String>, ok: bool, what: impl FnOnce() -> String) {
    if !ok {
        failures.push(what());
    }
}

const SMALL_PRIMES: [u64; 6] = [2, 3, 5, 7, 11, 13];
const ODD_PRIMES: [u64; 24] = [
    3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
];

fn selfcheck(seed: u64, cases: u32) -> (String, bool) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();

    for _ in 0..cases {
        let l = SMALL_PRIMES[rng.gen_range(0..SMALL_PRIMES.len())];
        let s = rng.gen_range(1..=6u32);
        let t = rng.gen_range(0..s);
        let modulus = l.pow(s);
        let m = rng.gen_range(1..=10_000u64);
        let span = (10_000 - m) / modulus;
        let n = m + rng.gen_range(0..=span) * modulus;
        let diff = coeff_closed(m, u64::from(t) + 1) - coeff_closed(n, u64::from(t) + 1);
        let ok = diff.is_multiple_of(&BigInt::from(l.pow(s - t)));
        check(&mut failures, ok, || {
            format!("congruence ℓ={l} s={s} t={t} m={m} n={n}")
        });
    }

    for _ in 0..cases.min(40) {
        let a = rng.gen_range(1..=40usize);
        let p = p_recurrence(a);
        let ok = p.coefficient(0).is_zero()
            && (1..=a).all(|k| p.coefficient(k) == coeff_closed(a as u64, k as u64))
            && p.degree() == a;
        check(&mut failures, ok, || format!("recurrence a={a}"));
    }

    for _ in 0..cases {
        let l = ODD_PRIMES[rng.gen_range(0..ODD_PRIMES.len())];
        let prime = Prime::new(l).expect("table holds primes");
        let precision = rng.gen_range(1..=64u32);
        let x = loop {
            let x = rng.gen_range(1..1_000_000u64);
            if x % l != 0 {
                break x;
            }
        };
        let radicand = BigInt::from(x) * BigInt::from(x);
        let ok = match hensel_sqrt(&radicand, prime, x % l, precision) {
            Ok(r) => {
                let sq = r.mul(&r).expect("same prime");
                sq == PadicInt::from_integer(&radicand, prime, precision)
                    && r.residue() % BigUint::from(l) == BigUint::from(x % l)
            }
            Err(_) => false,
        };
        check(&mut failures, ok, || {
            format!("hensel ℓ={l} x={x} N={precision}")
        });
    }

    for _ in 0..cases {
        let l = ODD_PRIMES[rng.gen_range(0..ODD_PRIMES.len())];
        let prime = Prime::new(l).expect("table holds primes");
        let precision = rng.gen_range(1..=32u32);
        let u = loop {
            let u = rng.gen_range(-100_000i64..100_000);
            if u.rem_euclid(l as i64) != 0 {
                break u;
            }
        };
        let x = PadicInt::from_i64(u, prime, precision);
        let ok = x
            .invert()
            .map(|inv| inv.mul(&x).map(|p| p.residue().is_one()).unwrap_or(false))
            .unwrap_or(false);
        check(&mut failures, ok || x.residue().is_zero(), || {
            format!("inverse ℓ={l} u={u} N={precision}")
        });
    }

    let mut out = format!("selfcheck seed {seed}, {cases} cases per check\n");
    if failures.is_empty() {
        out.push_str("all checks passed\n");
    } else {
        for f in &failures {
            out.push_str(&format!("FAILED {f}\n"));
        }
    }
    (out, failures.is_empty())
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Series => {
            let (spec, cfg) = resolve(&cli.opts)?;
            emit(&cmd_series(&spec, &cfg)?, cfg.out.as_deref())?;
            Ok(0)
        }
        Command::Invariants => {
            let (spec, cfg) = resolve(&cli.opts)?;
            emit(&cmd_invariants(&spec, &cfg)?, cfg.out.as_deref())?;
            Ok(0)
        }
        Command::Tower => {
            let (spec, cfg) = resolve(&cli.opts)?;
            let report = run_tower(&spec, &cfg.tower_config()).map_err(tower_error)?;
            emit(&render_report(&report, cfg.format), cfg.out.as_deref())?;
            Ok(verdict_code(report.verdict))
        }
        Command::Graph { level } => {
            let (spec, cfg) = resolve(&cli.opts)?;
            let size = ltower::graph::level_size(spec.prime(), level);
            if size.is_none_or(|v| v > cfg.vertex_cap) {
                return Err(CliError::Cap(format!(
                    "level {level} has {}^{level} vertices, above the cap of {}",
                    spec.prime(),
                    cfg.vertex_cap
                )));
            }
            let g =
                build_cayley_serre(&spec, level).map_err(|e| CliError::Failed(e.to_string()))?;
            emit(&g.to_edge_list(), cfg.out.as_deref())?;
            Ok(0)
        }
        Command::VerifyReport { report } => {
            let text = fs::read_to_string(&report)
                .map_err(|e| CliError::Usage(format!("{}: {e}", report.display())))?;
            let parsed = TowerReport::from_json(&text)
                .map_err(|e| CliError::Usage(format!("{}: {e}", report.display())))?;
            let verdict = verify_report(&parsed);
            let mut out = format!("verdict: {verdict}\n");
            if verdict != parsed.verdict {
                out.push_str(&format!("report claims {}\n", parsed.verdict));
            }
            emit(&out, cli.opts.out.as_deref())?;
            Ok(verdict_code(verdict))
        }
        Command::Selfcheck { cases } => {
            let seed = cli
                .opts
                .test_seed
                .unwrap_or(ltower::config::DEFAULT_TEST_SEED);
            let (out, ok) = selfcheck(seed, cases);
            emit(&out, cli.opts.out.as_deref())?;
            Ok(if ok { 0 } else { EXIT_FAIL })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(CliError::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(CliError::Cap(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_CAP)
        }
        Err(CliError::Failed(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_FAIL)
        }
    }
}
