//! The `siegel` command-line frontend. One JSON object per invocation on
//! standard output (or `--out`), numbers rounded to 15 significant digits.
//!
//! Exit codes: 0 success, 1 input/output failure, 2 domain error
//! (`{"error_kind", "message"}`), 64 bad usage.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::degeneration::{enumerate_boundary_strata, make_family, neck_limit_probe, DegenerationKind};
use crate::error::Error;
use crate::jacobian::{bergman_density, periods, CurveJson, HyperellipticCurve};
use crate::measure::{
    integrate_stratified, partition_function, stratum_volume, FileConfig, IntegrandChoice, MCResult,
    StratifiedMeasureConfig, StratumTerm, VolumeMethod, WeightMode, DEFAULT_SAMPLES, DEFAULT_SEED,
};
use crate::reduction::{in_fundamental_domain, siegel_reduce};
use crate::siegel::{siegel_distance, SiegelPoint, SiegelPointJson};
use crate::universal::{stabilize, universal_distance};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_DOMAIN: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

const SIGNIFICANT_DIGITS: usize = 15;

#[derive(Parser, Debug)]
#[command(
    name = "siegel",
    version,
    about = "Siegel upper half spaces, period matrices and moduli measures"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalArgs {
    /// `key = value` file; explicit flags take precedence.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Write the result here instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    workers: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Siegel-reduce a point.
    Reduce(PointInput),
    /// Invariant distance between two points (of any genera).
    Distance {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
    /// Pad a point to a larger genus and report its canonical representative.
    Embed {
        #[command(flatten)]
        input: PointInput,
        #[arg(long)]
        to: Option<usize>,
    },
    /// List the boundary strata of the completion in genus `g`.
    Strata {
        #[arg(long)]
        genus: usize,
        #[arg(long)]
        include_interior: bool,
    },
    /// Period matrix of a hyperelliptic curve.
    Period {
        /// Curve JSON `{"branch_points": [...]}`.
        #[arg(long, conflicts_with = "branch_points")]
        curve: Option<String>,
        /// Comma-separated real branch points.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        branch_points: Option<Vec<f64>>,
        /// Also evaluate the Bergman density at this real `x`.
        #[arg(long, allow_hyphen_values = true)]
        density_at: Option<f64>,
    },
    /// Probe a pinching family.
    Degenerate {
        /// Family JSON `{"kind": "sep"|"nonsep", "genera": [..], "epsilons": [..]}`.
        #[arg(long, conflicts_with = "kind")]
        family: Option<String>,
        #[arg(long, value_enum)]
        kind: Option<KindArg>,
        #[arg(long, value_delimiter = ',')]
        genera: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_values_t = [1e-1, 1e-2, 1e-3, 1e-4])]
        eps: Vec<f64>,
    },
    /// Volume of `A_g`.
    Volume {
        #[arg(long)]
        genus: usize,
        #[arg(long)]
        n: Option<usize>,
        /// Nested quadrature instead of Monte Carlo (genus 1).
        #[arg(long)]
        quadrature: bool,
    },
    /// Integral against the stratified measure.
    Integrate(MeasureArgs),
    /// Truncated genus sum with string weights.
    Partition(MeasureArgs),
}

#[derive(Args, Debug)]
struct PointInput {
    /// Point JSON `{"g", "X", "Y"}`.
    #[arg(long, conflicts_with = "input")]
    point: Option<String>,
    /// File holding the point JSON.
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Deserialize)]
struct FamilyJson {
    kind: DegenerationKind,
    #[serde(default)]
    genera: Vec<usize>,
    epsilons: Vec<f64>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum KindArg {
    Sep,
    Nonsep,
}

#[derive(Args, Debug)]
struct MeasureArgs {
    #[arg(long)]
    alpha: Option<f64>,
    /// Explicit weights `g:lambda,...`; overrides `--alpha`.
    #[arg(long)]
    weights: Option<String>,
    #[arg(long, alias = "G")]
    gmax: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    /// Target dimension of the field, recorded in the output.
    #[arg(long = "dim", alias = "N")]
    dimension: Option<usize>,
    #[arg(long, value_enum, default_value_t = IntegrandArg::One)]
    integrand: IntegrandArg,
    #[arg(long)]
    include_genus_zero: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum IntegrandArg {
    One,
    TraceInverseY,
}

enum Failure {
    Usage(String),
    Io(String),
    Domain(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

/// Rounds every float in `v` to [`SIGNIFICANT_DIGITS`].
fn round_numbers(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64 number");
            let r: f64 = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
                .parse()
                .expect("formatted float");
            if let Some(m) = serde_json::Number::from_f64(r) {
                *n = m;
            }
        }
        Value::Array(a) => a.iter_mut().for_each(round_numbers),
        Value::Object(o) => o.values_mut().for_each(round_numbers),
        _ => {}
    }
}

/// Renders a result as one line of JSON with rounded numbers.
pub fn render<T: Serialize>(value: &T) -> String {
    let mut v = serde_json::to_value(value).expect("results serialize");
    round_numbers(&mut v);
    v.to_string()
}

fn parse_json<T, J>(text: &str, what: &str) -> CliResult<T>
where
    J: DeserializeOwned,
    T: TryFrom<J, Error = Error>,
{
    let raw: Value = serde_json::from_str(text).map_err(|e| Failure::Io(format!("{what}: invalid JSON: {e}")))?;
    let shaped: J = serde_json::from_value(raw).map_err(|e| Failure::Io(format!("{what}: {e}")))?;
    Ok(T::try_from(shaped)?)
}

fn read_point(input: &PointInput) -> CliResult<SiegelPoint> {
    let text = match (&input.point, &input.input) {
        (Some(p), _) => p.clone(),
        (None, Some(path)) => {
            std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?
        }
        (None, None) => return Err(Failure::Usage("one of --point or --input is required".into())),
    };
    parse_json::<SiegelPoint, SiegelPointJson>(&text, "point")
}

fn mc_json(r: &MCResult) -> Value {
    json!({"estimate": r.estimate, "stderr": r.stderr, "n": r.n_samples, "seed": r.seed})
}

fn terms_json(terms: &[StratumTerm]) -> Value {
    terms
        .iter()
        .map(|t| json!({"genus": t.genus, "weight": t.weight, "integral": mc_json(&t.integral)}))
        .collect()
}

fn parse_weights(s: &str) -> CliResult<BTreeMap<usize, f64>> {
    s.split(',')
        .map(|part| {
            let (g, w) = part
                .split_once(':')
                .ok_or_else(|| Failure::Usage(format!("weight {part:?} is not g:lambda")))?;
            let g = g
                .trim()
                .parse()
                .map_err(|_| Failure::Usage(format!("bad genus in {part:?}")))?;
            let w = w
                .trim()
                .parse()
                .map_err(|_| Failure::Usage(format!("bad weight in {part:?}")))?;
            Ok((g, w))
        })
        .collect()
}

struct Settings {
    seed: u64,
    workers: usize,
    file: FileConfig,
}

fn measure_config(args: &MeasureArgs, s: &Settings, require_alpha: bool) -> CliResult<StratifiedMeasureConfig> {
    let mode = if let Some(w) = &args.weights {
        if require_alpha {
            return Err(Failure::Usage("partition takes --alpha, not --weights".into()));
        }
        WeightMode::ExplicitWeights(parse_weights(w)?)
    } else if let Some(alpha) = args.alpha.or(s.file.alpha) {
        WeightMode::StringWeights { alpha }
    } else if !s.file.weights.is_empty() && !require_alpha {
        WeightMode::ExplicitWeights(s.file.weights.clone())
    } else {
        return Err(Failure::Usage("--alpha is required".into()));
    };
    let config = StratifiedMeasureConfig {
        mode,
        truncation_genus: args.gmax.or(s.file.gmax).unwrap_or(2),
        seed: s.seed,
        n_samples: args.n.or(s.file.n_samples).unwrap_or(DEFAULT_SAMPLES),
        include_genus_zero: args.include_genus_zero,
    };
    config.validate()?;
    Ok(config)
}

fn integrand(a: IntegrandArg) -> IntegrandChoice {
    match a {
        IntegrandArg::One => IntegrandChoice::One,
        IntegrandArg::TraceInverseY => IntegrandChoice::TraceInverseY,
    }
}

fn integrand_name(a: IntegrandArg) -> &'static str {
    match a {
        IntegrandArg::One => "one",
        IntegrandArg::TraceInverseY => "trace-inverse-y",
    }
}

fn execute(command: &Command, s: &Settings) -> CliResult<Value> {
    Ok(match command {
        Command::Reduce(input) => {
            let z = read_point(input)?;
            let r = siegel_reduce(&z)?;
            json!({
                "reduced": r.reduced,
                "transform": r.transform,
                "word_length": r.word_length,
                "in_fundamental_domain": in_fundamental_domain(&r.reduced)?,
            })
        }
        Command::Distance { a, b } => {
            let za: SiegelPoint = parse_json::<_, SiegelPointJson>(a, "--a")?;
            let zb: SiegelPoint = parse_json::<_, SiegelPointJson>(b, "--b")?;
            let d = if za.genus() == zb.genus() {
                siegel_distance(&za, &zb)?
            } else {
                universal_distance(&stabilize(&za), &stabilize(&zb))?
            };
            json!({"distance": d})
        }
        Command::Embed { input, to } => {
            let z = read_point(input)?;
            let target = to.unwrap_or(z.genus());
            json!({"point": z.padded(target)?, "universal": stabilize(&z)})
        }
        Command::Strata {
            genus,
            include_interior,
        } => {
            let strata = enumerate_boundary_strata(*genus, *include_interior)?;
            let list: Vec<Value> = strata
                .iter()
                .map(|d| json!({"kind": d.kind, "genera": d.genera, "label": d.to_string()}))
                .collect();
            json!({"genus": genus, "count": list.len(), "strata": list})
        }
        Command::Period {
            curve,
            branch_points,
            density_at,
        } => {
            let (c, normalize) = match (curve, branch_points) {
                (Some(text), _) => {
                    let raw: Value =
                        serde_json::from_str(text).map_err(|e| Failure::Io(format!("--curve: invalid JSON: {e}")))?;
                    let normalize = raw.get("normalize").and_then(Value::as_bool).unwrap_or(true);
                    let shaped: CurveJson =
                        serde_json::from_value(raw).map_err(|e| Failure::Io(format!("--curve: {e}")))?;
                    (HyperellipticCurve::try_from(shaped)?, normalize)
                }
                (None, Some(pts)) => (HyperellipticCurve::new(pts.clone())?, true),
                (None, None) => return Err(Failure::Usage("one of --curve or --branch-points is required".into())),
            };
            let p = periods(&c)?;
            let r = siegel_reduce(&p.z)?;
            let mut out = json!({
                "curve": c,
                "genus": c.genus(),
                "period_matrix": p.z,
                "reduced": r.reduced,
                "transform": r.transform,
            });
            if !normalize {
                let pairs = |m: &crate::linalg::CMatrix| -> Vec<Vec<[f64; 2]>> {
                    (0..m.nrows())
                        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
                        .collect()
                };
                out["a_periods"] = json!(pairs(&p.a));
                out["b_periods"] = json!(pairs(&p.b));
            }
            if let Some(x) = density_at {
                let r = bergman_density(&c, *x)?;
                out["bergman_density"] = json!(r.density_value);
                out["z_chart_density"] = json!(r.z_chart_density);
            }
            out
        }
        Command::Degenerate {
            family,
            kind,
            genera,
            eps,
        } => {
            let spec = match family {
                Some(text) => {
                    let f: FamilyJson =
                        serde_json::from_str(text).map_err(|e| Failure::Io(format!("--family: {e}")))?;
                    FamilyJson {
                        genera: if f.genera.is_empty() { genera.clone() } else { f.genera },
                        ..f
                    }
                }
                None => FamilyJson {
                    kind: match kind {
                        Some(KindArg::Sep) => DegenerationKind::Separating,
                        Some(KindArg::Nonsep) => DegenerationKind::NonSeparating,
                        None => return Err(Failure::Usage("one of --family or --kind is required".into())),
                    },
                    genera: genera.clone(),
                    epsilons: eps.clone(),
                },
            };
            if spec.genera.is_empty() {
                return Err(Failure::Usage("the family needs --genera".into()));
            }
            let family = make_family(spec.kind, &spec.genera, &spec.epsilons)?;
            let report = neck_limit_probe(&family)?;
            let mut out = serde_json::to_value(&report).expect("report serializes");
            out["limit_stratum"] = json!(family.limit_stratum().to_string());
            out
        }
        Command::Volume { genus, n, quadrature } => {
            let method = if *quadrature {
                VolumeMethod::Quadrature
            } else {
                VolumeMethod::MonteCarlo {
                    n: n.or(s.file.n_samples).unwrap_or(DEFAULT_SAMPLES),
                    seed: s.seed,
                    workers: s.workers,
                }
            };
            let mut out = mc_json(&stratum_volume(*genus, method)?);
            out["genus"] = json!(genus);
            out
        }
        Command::Integrate(args) => {
            let config = measure_config(args, s, false)?;
            let r = integrate_stratified(&integrand(args.integrand), &config, s.workers)?;
            let mut out = mc_json(&r.total);
            out["integrand"] = json!(integrand_name(args.integrand));
            out["terms"] = terms_json(&r.terms);
            out
        }
        Command::Partition(args) => {
            let config = measure_config(args, s, true)?;
            let r = partition_function(&integrand(args.integrand), &config, s.workers)?;
            let mut out = mc_json(&r.value);
            out["tail_bound"] = json!(r.tail_bound);
            out["integrand"] = json!(integrand_name(args.integrand));
            if let Some(dim) = args.dimension.or(s.file.dimension) {
                out["N"] = json!(dim);
            }
            out["terms"] = terms_json(&r.terms);
            out
        }
    })
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// Outcome of one invocation: exit code, standard output, standard error.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

fn error_json(kind: &str, message: &str) -> String {
    json!({"error_kind": kind, "message": message}).to_string()
}

/// Parses `args` (including the program name) and runs the command
/// without touching the process streams.
pub fn run(args: &[String]) -> Outcome {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            };
        }
    };
    let result = (|| {
        let file = match &cli.global.config {
            Some(path) => {
                let text =
                    std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
                FileConfig::parse(&text)?
            }
            None => FileConfig::default(),
        };
        let settings = Settings {
            seed: cli.global.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            workers: cli.global.workers.or(file.workers).unwrap_or_else(default_workers),
            file,
        };
        if settings.workers == 0 {
            return Err(Failure::Usage("--workers must be positive".into()));
        }
        execute(&cli.command, &settings)
    })();
    match result {
        Ok(v) => {
            let text = render(&v);
            match &cli.global.out {
                Some(path) => match std::fs::write(path, format!("{text}\n")) {
                    Ok(()) => Outcome {
                        code: EXIT_OK,
                        stdout: String::new(),
                        stderr: String::new(),
                    },
                    Err(e) => Outcome {
                        code: EXIT_IO,
                        stdout: String::new(),
                        stderr: error_json("Io", &format!("{}: {e}", path.display())),
                    },
                },
                None => Outcome {
                    code: EXIT_OK,
                    stdout: text,
                    stderr: String::new(),
                },
            }
        }
        Err(Failure::Domain(e)) => Outcome {
            code: EXIT_DOMAIN,
            stdout: error_json(e.kind(), &e.to_string()),
            stderr: String::new(),
        },
        Err(Failure::Io(m)) => Outcome {
            code: EXIT_IO,
            stdout: String::new(),
            stderr: error_json("Io", &m),
        },
        Err(Failure::Usage(m)) => Outcome {
            code: EXIT_USAGE,
            stdout: String::new(),
            stderr: error_json("Usage", &m),
        },
    }
}

/// Entry point of the binary: runs and prints.
pub fn main_with_args(args: &[String]) -> i32 {
    use std::io::Write;
    let o = run(args);
    // A closed pipe downstream is not an error worth reporting.
    if !o.stdout.is_empty() {
        let _ = writeln!(std::io::stdout(), "{}", o.stdout.trim_end());
    }
    if !o.stderr.is_empty() {
        let _ = writeln!(std::io::stderr(), "{}", o.stderr.trim_end());
    }
    o.code
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(a: &[&str]) -> Vec<String> {
        std::iter::once("siegel")
            .chain(a.iter().copied())
            .map(String::from)
            .collect()
    }

    #[test]
    fn rounding_keeps_fifteen_digits() {
        assert_eq!(
            render(&json!({"d": std::f64::consts::LN_2})),
            r#"{"d":0.693147180559945}"#
        );
        assert_eq!(render(&json!([1.0, 3, -0.1])), "[1.0,3,-0.1]");
    }

    #[test]
    fn weights_parse() {
        assert!(matches!(parse_weights("1:1.0,2:0.5"), Ok(m) if m == BTreeMap::from([(1, 1.0), (2, 0.5)])));
        assert!(matches!(parse_weights("1=2"), Err(Failure::Usage(_))));
    }

    #[test]
    fn usage_errors() {
        assert_eq!(run(&args(&["frobnicate"])).code, EXIT_USAGE);
        assert_eq!(run(&args(&["reduce", "--bogus"])).code, EXIT_USAGE);
        assert_eq!(run(&args(&["reduce"])).code, EXIT_USAGE);
        assert_eq!(run(&args(&["--help"])).code, EXIT_OK);
    }
}
