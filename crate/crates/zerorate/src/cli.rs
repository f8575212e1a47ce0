//! Argument parsing and command dispatch.

use std::ffi::OsString;
use std::fs;
use std::num::NonZeroUsize;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use zerorate_core::codebook::{self, Codebook};
use zerorate_core::decoder::{self, TiePolicy, DEFAULT_CLASS_BUDGET};
use zerorate_core::exponent::{self, ExponentOptions, HattedKernel, QMethod};
use zerorate_core::mu::{self, MuFamily};
use zerorate_core::{zero_error, ChannelMetricPair, PairKernel};

use crate::codebook_file::parse_codebook;
use crate::document::parse_pair;
use crate::error::{CliError, Result};
use crate::parallel;
use crate::report::{self, num, CommandResult, Unit};

#[derive(Parser, Debug)]
#[command(name = "zerorate", version, about = "Zero-rate exponents for mismatched decoding")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Serialize)]
pub struct Common {
    /// Write the result document here instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    /// Seed for every random choice (simulation, optimizer restarts).
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true, default_value = "1")]
    #[serde(skip)]
    pub jobs: NonZeroUsize,
    /// Report exponents in bits instead of nats.
    #[arg(long, global = true)]
    pub bits: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct PairArg {
    #[arg(long, value_name = "FILE")]
    #[serde(skip)]
    pub pair: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct PairCodeArgs {
    #[arg(long, value_name = "FILE")]
    #[serde(skip)]
    pub pair: PathBuf,
    #[arg(long, value_name = "FILE")]
    #[serde(skip)]
    pub code: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodArg {
    Grid,
    Pg,
    TwoPoint,
    Auto,
}

impl From<MethodArg> for QMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Grid => QMethod::Grid,
            MethodArg::Pg => QMethod::MultistartPg,
            MethodArg::TwoPoint => QMethod::TwoPoint,
            MethodArg::Auto => QMethod::Auto,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TiesArg {
    Equiprobable,
    Error,
    Genie,
}

impl TiesArg {
    fn policy(self) -> TiePolicy {
        match self {
            TiesArg::Equiprobable => TiePolicy::Equiprobable,
            TiesArg::Error => TiePolicy::AsError,
            TiesArg::Genie => TiePolicy::GenieCorrect,
        }
    }

    fn name(self) -> &'static str {
        match self {
            TiesArg::Equiprobable => "equiprobable",
            TiesArg::Error => "error",
            TiesArg::Genie => "genie",
        }
    }
}

#[derive(Args, Debug, Serialize)]
pub struct ExponentArgs {
    #[command(flatten)]
    pub pair: PairArg,
    #[arg(long, value_enum, default_value = "auto")]
    pub method: MethodArg,
    #[arg(long, default_value_t = 64.0)]
    pub s_max: f64,
    #[arg(long, default_value_t = 200)]
    pub grid_resolution: u32,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Also write `(s, max_Q objective)` to this CSV file.
    #[arg(long, value_name = "FILE")]
    #[serde(skip)]
    pub curve: Option<PathBuf>,
    /// Points of the curve on `[0, s_max]`.
    #[arg(long, default_value_t = 65)]
    pub curve_points: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct MuCurveArgs {
    #[command(flatten)]
    pub pair: PairArg,
    /// CSV destination; without it the rows go into the document.
    #[arg(long, value_name = "FILE")]
    #[serde(skip)]
    pub csv: Option<PathBuf>,
    /// Explicit s values, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub s: Option<Vec<f64>>,
    #[arg(long, default_value_t = 4.0)]
    pub s_max: f64,
    #[arg(long, default_value_t = 41)]
    pub points: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct KomlosArgs {
    #[arg(long, value_name = "FILE")]
    #[serde(skip)]
    pub code: PathBuf,
    #[arg(long, default_value_t = 4)]
    pub t: u64,
    /// Subcode size sought; defaults to the whole code.
    #[arg(long)]
    pub target: Option<usize>,
}

#[derive(Args, Debug, Serialize)]
pub struct CertificateArgs {
    #[command(flatten)]
    pub files: PairCodeArgs,
    #[arg(long, default_value_t = 4)]
    pub t: u64,
    #[arg(long)]
    pub target: Option<usize>,
}

#[derive(Args, Debug, Serialize)]
pub struct ExactPeArgs {
    #[command(flatten)]
    pub files: PairCodeArgs,
    #[arg(long, value_enum, default_value = "equiprobable")]
    pub ties: TiesArg,
    /// Largest number of output classes to enumerate.
    #[arg(long, default_value_t = DEFAULT_CLASS_BUDGET)]
    pub budget: u128,
}

#[derive(Args, Debug, Serialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub files: PairCodeArgs,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    #[arg(long, value_enum, default_value = "equiprobable")]
    pub ties: TiesArg,
}

#[derive(Args, Debug, Serialize)]
pub struct EmpiricalArgs {
    #[command(flatten)]
    pub pair: PairArg,
    /// Two input letters, by label or index.
    #[arg(long, value_delimiter = ',', num_args = 1)]
    pub letters: Vec<String>,
    #[arg(long, value_delimiter = ',', default_value = "2,4,8")]
    pub n: Vec<usize>,
    /// Monte Carlo trials when exact enumeration is too large.
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Check a pair document and report its support sets.
    Validate(PairArg),
    /// Decide whether the zero-error capacities vanish.
    ZeroError(PairArg),
    /// Decide whether the pair is balanced.
    Balanced(PairArg),
    /// Zero-rate exponent (or its upper bound) and the expurgated value.
    Exponent(ExponentArgs),
    /// Bound on the gap between the upper bound and the expurgated value.
    Gap(PairArg),
    /// mu_{a,b}(s) and its derivative on an s grid.
    MuCurve(MuCurveArgs),
    /// Smallest pairwise distance of a code.
    Dmin(PairCodeArgs),
    /// Extract a nearly symmetric subcode.
    Komlos(KomlosArgs),
    /// Evaluate the chain bounding D_min through an extracted subcode.
    Certificate(CertificateArgs),
    /// Exact error probabilities of a two-word code.
    ExactPe(ExactPeArgs),
    /// Monte Carlo error probabilities.
    Simulate(SimulateArgs),
    /// -ln(P_e)/n for repeated letters over several blocklengths.
    Empirical(EmpiricalArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Validate(_) => "validate",
            Command::ZeroError(_) => "zero-error",
            Command::Balanced(_) => "balanced",
            Command::Exponent(_) => "exponent",
            Command::Gap(_) => "gap",
            Command::MuCurve(_) => "mu-curve",
            Command::Dmin(_) => "dmin",
            Command::Komlos(_) => "komlos",
            Command::Certificate(_) => "certificate",
            Command::ExactPe(_) => "exact-pe",
            Command::Simulate(_) => "simulate",
            Command::Empirical(_) => "empirical",
        }
    }
}

pub fn parse<I, T>(argv: I) -> std::result::Result<Cli, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    Cli::try_parse_from(argv)
}

/// Parses `argv` (program name first) and executes the command.
pub fn run<I, T>(argv: I) -> Result<CommandResult>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = parse(argv).map_err(|e| CliError::Usage(e.to_string()))?;
    execute(&cli)
}

/// Hashes the command, its input files and the flags that affect the result.
struct Inputs {
    hasher: Sha256,
}

impl Inputs {
    fn new(cli: &Cli) -> Self {
        let mut hasher = Sha256::new();
        hasher.update(cli.command.name().as_bytes());
        hasher.update([0]);
        hasher.update(serde_json::to_vec(&cli.common).expect("flags serialize"));
        hasher.update(serde_json::to_vec(&cli.command).expect("flags serialize"));
        Inputs { hasher }
    }

    fn read(&mut self, path: &Path) -> Result<String> {
        let text = fs::read_to_string(path).map_err(|source| CliError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        self.hasher.update([0]);
        self.hasher.update((text.len() as u64).to_le_bytes());
        self.hasher.update(text.as_bytes());
        Ok(text)
    }

    fn pair(&mut self, path: &Path) -> Result<ChannelMetricPair> {
        parse_pair(&self.read(path)?)
    }

    fn code(&mut self, path: &Path) -> Result<Codebook> {
        parse_codebook(&self.read(path)?)
    }

    fn digest(self) -> String {
        self.hasher
            .finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

fn options(cli: &Cli) -> ExponentOptions {
    ExponentOptions {
        seed: cli.common.seed,
        ..ExponentOptions::default()
    }
}

fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(source) => CliError::Write {
            path: path.to_path_buf(),
            source,
        },
        other => CliError::Document(format!("{other:?}")),
    })?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush().map_err(|source| CliError::Write {
        path: path.to_path_buf(),
        source,
    })
}

fn cell(v: zerorate_core::ExtendedReal) -> String {
    match v {
        zerorate_core::ExtendedReal::Finite(x) => format!("{x:.17e}"),
        zerorate_core::ExtendedReal::PosInfinity => "inf".into(),
        zerorate_core::ExtendedReal::NegInfinity => "-inf".into(),
    }
}

fn letter(pair: &ChannelMetricPair, text: &str) -> Result<usize> {
    if let Some(i) = pair.input_alphabet().iter().position(|l| l == text) {
        return Ok(i);
    }
    match text.parse::<usize>() {
        Ok(i) if i < pair.num_inputs() => Ok(i),
        _ => Err(CliError::Usage(format!("`{text}` is not an input letter"))),
    }
}

fn zero_error_payload(pair: &ChannelMetricPair) -> Value {
    report::zero_error(&zero_error::zero_error_report(pair), &zero_error::is_balanced(pair))
}

/// Runs the parsed command; side files (`--csv`, `--curve`) are written here.
pub fn execute(cli: &Cli) -> Result<CommandResult> {
    let start = Instant::now();
    let mut inputs = Inputs::new(cli);
    let unit = if cli.common.bits { Unit::Bits } else { Unit::Nats };
    let payload = match &cli.command {
        Command::Validate(a) => report::validate(&inputs.pair(&a.pair)?),
        Command::ZeroError(a) | Command::Balanced(a) => zero_error_payload(&inputs.pair(&a.pair)?),
        Command::Exponent(a) => {
            let pair = inputs.pair(&a.pair.pair)?;
            let opts = ExponentOptions {
                method: a.method.into(),
                s_max: a.s_max,
                grid_resolution: a.grid_resolution,
                tol: a.tol,
                ..options(cli)
            };
            if !(a.s_max > 0.0) || !(a.tol > 0.0) || a.grid_resolution == 0 {
                return Err(CliError::Usage("--s-max, --tol and --grid-resolution must be positive".into()));
            }
            let r = exponent::zero_rate_exponent(&pair, &opts)?;
            let curve = match &a.curve {
                Some(path) => {
                    let points = a.curve_points.max(2);
                    let s: Vec<f64> = (0..points).map(|i| a.s_max * i as f64 / (points - 1) as f64).collect();
                    let rows: Vec<Vec<String>> = exponent::objective_curve(&pair, &s, !r.balanced, &opts)?
                        .into_iter()
                        .map(|(s, v)| vec![format!("{s}"), format!("{:.17e}", unit.scale(v))])
                        .collect();
                    write_csv(path, &["s", "objective"], &rows)?;
                    Some(path.display().to_string())
                }
                None => None,
            };
            report::exponent(&r, unit, curve.as_deref())
        }
        Command::Gap(a) => {
            let pair = inputs.pair(&a.pair)?;
            let balance = zero_error::is_balanced(&pair);
            if !balance.c0bar_zero {
                let (_, w) = zero_error::check_c0bar_zero(&pair);
                let w = w.expect("a failed check carries a witness");
                return Err(zerorate_core::Error::InfiniteExponent { a: w.a, b: w.b }.into());
            }
            json!({
                "unit": unit,
                "gap": num(unit.scale(exponent::gap_bound(&pair)?)),
                "balanced": balance.balanced,
            })
        }
        Command::MuCurve(a) => {
            let pair = inputs.pair(&a.pair.pair)?;
            let s_points = match &a.s {
                Some(s) => s.clone(),
                None => {
                    let n = a.points.max(2);
                    (0..n).map(|i| a.s_max * i as f64 / (n - 1) as f64).collect()
                }
            };
            let kernel = PairKernel::new(&pair);
            let n = pair.num_inputs();
            let mut rows = Vec::new();
            for x in 0..n {
                for y in (0..n).filter(|&y| y != x) {
                    for &s in &s_points {
                        let scaled = |v| match v {
                            zerorate_core::ExtendedReal::Finite(f) => zerorate_core::ExtendedReal::Finite(unit.scale(f)),
                            other => other,
                        };
                        rows.push((x, y, s, scaled(kernel.mu(x, y, s)?), scaled(kernel.mu_prime(x, y, s)?)));
                    }
                }
            }
            let data = match &a.csv {
                Some(path) => {
                    let text: Vec<Vec<String>> = rows
                        .iter()
                        .map(|&(x, y, s, m, d)| vec![x.to_string(), y.to_string(), format!("{s}"), cell(m), cell(d)])
                        .collect();
                    write_csv(path, &["a", "b", "s", "mu", "mu_prime"], &text)?;
                    Value::Null
                }
                None => Value::Array(
                    rows.iter()
                        .map(|&(x, y, s, m, d)| json!({"a": x, "b": y, "s": num(s), "mu": report::ext(m), "mu_prime": report::ext(d)}))
                        .collect(),
                ),
            };
            json!({
                "unit": unit,
                "s_points": s_points.len(),
                "rows": rows.len(),
                "csv": a.csv.as_ref().map(|p| p.display().to_string()),
                "data": data,
            })
        }
        Command::Dmin(a) => {
            let pair = inputs.pair(&a.pair)?;
            let code = check_code(&pair, inputs.code(&a.code)?)?;
            let kernel = PairKernel::new(&pair);
            let (d, (i, j)) = codebook::d_min(&kernel, &code)?;
            json!({
                "unit": unit,
                "d_min": unit.scale_ext(d),
                "argmin": [i, j],
                "exponent_cap": unit.scale_ext(codebook::pe_lower_bound_from_dmin(&kernel, &code)?),
                "m": code.len(),
                "n": code.blocklength(),
            })
        }
        Command::Komlos(a) => {
            let code = inputs.code(&a.code)?;
            let cert = codebook::komlos_extract(&code, a.t, a.target.unwrap_or(code.len()))?;
            report::certificate(&cert)
        }
        Command::Certificate(a) => {
            let pair = inputs.pair(&a.files.pair)?;
            let code = check_code(&pair, inputs.code(&a.files.code)?)?;
            let cert = codebook::komlos_extract(&code, a.t, a.target.unwrap_or(code.len()))?;
            let kernel = PairKernel::new(&pair);
            let balanced = zero_error::is_balanced(&pair).balanced;
            let hat;
            let family: &dyn MuFamily = if balanced {
                &kernel
            } else {
                hat = HattedKernel::new(&pair, &kernel)?;
                &hat
            };
            let chain = codebook::dmin_certificate(family, &code, &cert.indices, a.t, &options(cli))?;
            json!({
                "family": if balanced { "raw" } else { "relaxed" },
                "subcode": report::certificate(&cert),
                "chain": report::chain(&chain, unit),
            })
        }
        Command::ExactPe(a) => {
            let pair = inputs.pair(&a.files.pair)?;
            let code = check_code(&pair, inputs.code(&a.files.code)?)?;
            let o = decoder::exact_error_probabilities(&pair, &code, a.ties.policy(), a.budget)?;
            let mut v = report::outcome(&o, a.ties.name());
            if matches!(a.ties, TiesArg::Equiprobable) {
                let b = decoder::corollary2_bound(&pair, code.word(0), code.word(1))?;
                v["corollary2_bound"] = report::bound(&b, unit);
            }
            v
        }
        Command::Simulate(a) => {
            let pair = inputs.pair(&a.files.pair)?;
            let code = check_code(&pair, inputs.code(&a.files.code)?)?;
            let o = parallel::monte_carlo(&pair, &code, a.trials, cli.common.seed, a.ties.policy(), cli.common.jobs)?;
            report::outcome(&o, a.ties.name())
        }
        Command::Empirical(a) => {
            let pair = inputs.pair(&a.pair.pair)?;
            let [ref x, ref y] = a.letters[..] else {
                return Err(CliError::Usage("--letters takes exactly two letters, e.g. 0,1".into()));
            };
            let (x, y) = (letter(&pair, x)?, letter(&pair, y)?);
            if a.n.iter().any(|&n| n == 0) {
                return Err(CliError::Usage("blocklengths must be positive".into()));
            }
            let points = decoder::empirical_exponent(&pair, x, y, &a.n, a.trials, cli.common.seed)?;
            let kernel = PairKernel::new(&pair);
            let forward = mu::sup_mixture(&kernel, &[(x, y, 1)])?.value;
            let backward = mu::sup_mixture(&kernel, &[(y, x, 1)])?.value;
            let slack: Vec<Value> = a.n.iter().map(|&n| num(unit.scale(decoder::delta_n(&pair, n) / n as f64))).collect();
            json!({
                "unit": unit,
                "a": x,
                "b": y,
                "points": report::empirical(&points, unit),
                "sup_mu": unit.scale_ext(forward),
                "sup_mu_reverse": unit.scale_ext(backward),
                "delta_over_n": slack,
            })
        }
    };
    Ok(CommandResult {
        command: cli.command.name().into(),
        version: env!("CARGO_PKG_VERSION").into(),
        input_digest: inputs.digest(),
        elapsed_ms: start.elapsed().as_millis() as u64,
        payload,
    })
}

/// Re-reads `code` over the pair's input alphabet; the file may declare a
/// smaller alphabet.
fn check_code(pair: &ChannelMetricPair, code: Codebook) -> Result<Codebook> {
    if code.num_inputs() > pair.num_inputs() {
        return Err(CliError::Document(format!(
            "codebook alphabet has {} symbols, the pair has {} inputs",
            code.num_inputs(),
            pair.num_inputs()
        )));
    }
    Ok(Codebook::new(pair.num_inputs(), code.words().to_vec())?)
}

/// The document text written to stdout or `--out`.
pub fn render(result: &CommandResult) -> String {
    let mut s = serde_json::to_string_pretty(result).expect("documents serialize");
    s.push('\n');
    s
}

pub fn emit(cli: &Cli, result: &CommandResult) -> Result<()> {
    let text = render(result);
    match &cli.common.out {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Write {
            path: path.clone(),
            source,
        }),
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|source| CliError::Write {
                    path: PathBuf::from("<stdout>"),
                    source,
                })
        }
    }
}
