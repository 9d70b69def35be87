//! `llg`: load a framing (a built-in example or a JSON file), evaluate its
//! differential invariants, extract structure constants, and run the
//! two-path verification suite.
//!
//! Exit codes: 0 all checks pass, 1 a verification check failed, 2 usage or
//! domain errors.

use std::fs;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use llg_core::canonical::{self, DomegaMode};
use llg_core::report::{json_17sig, tensor_text};
use llg_core::verify::{run_constants, run_verify, RunConfig};
use llg_core::{catalog, framing_file, Error, Framing, Pairing, Tensor};

#[derive(Parser)]
#[command(name = "llg", version, about = "Differential invariants of framings on a chart")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum PairingArg {
    Interleaved,
    Split,
}

impl From<PairingArg> for Pairing {
    fn from(p: PairingArg) -> Pairing {
        match p {
            PairingArg::Interleaved => Pairing::Interleaved,
            PairingArg::Split => Pairing::Split,
        }
    }
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct CommonOpts {
    /// Sample count for point sweeps.
    #[arg(long, default_value_t = 64)]
    points: usize,
    /// Seed of the deterministic sample stream.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Baseline tolerance; falls back to the LLG_TOL environment variable,
    /// then to 1e-9.
    #[arg(long)]
    tol: Option<f64>,
    /// Apply one pairing to both the complex and symplectic model tensors
    /// (default: interleaved for the complex structure, split for the
    /// symplectic form).
    #[arg(long, value_enum)]
    pairing: Option<PairingArg>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// List the built-in example framings.
    List,
    /// Evaluate one invariant tensor at a point.
    Eval {
        /// `example:<name>` or a framing file path.
        source: String,
        /// One of: gamma, torsion, curvature, j, omega, metric, nijenhuis,
        /// domega, epsilon.
        #[arg(long)]
        tensor: String,
        /// Evaluation point, comma-separated coordinates.
        #[arg(long)]
        at: String,
        /// Target point for epsilon.
        #[arg(long)]
        to: Option<String>,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Certify flatness and extract the structure constants.
    Constants {
        source: String,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Run the full identity suite.
    Verify {
        source: String,
        /// Also cross-check jet derivatives against finite differences.
        #[arg(long)]
        fd_check: bool,
        #[command(flatten)]
        common: CommonOpts,
    },
}

fn validate_points(points: usize) -> Result<usize, Error> {
    if points < 2 {
        return Err(Error::InvalidInput("--points must be at least 2".into()));
    }
    Ok(points)
}

fn resolve_tol(flag: Option<f64>) -> Result<f64, String> {
    if let Some(t) = flag {
        if t <= 0.0 {
            return Err("tolerance must be positive".to_string());
        }
        return Ok(t);
    }
    if let Ok(env) = std::env::var("LLG_TOL") {
        let t: f64 = env.parse().map_err(|_| format!("LLG_TOL is not a number: `{env}`"))?;
        if t <= 0.0 {
            return Err("LLG_TOL must be positive".to_string());
        }
        return Ok(t);
    }
    Ok(1e-9)
}

/// Load a framing and produce the label echoed in reports: the example name,
/// or the file path tagged with a content hash.
fn load_source(source: &str) -> Result<(Framing, String), Error> {
    if let Some(name) = source.strip_prefix("example:") {
        let entry = catalog::get_example(name)?;
        return Ok((entry.spec.compile()?, format!("example:{name}")));
    }
    let text = fs::read_to_string(source)
        .map_err(|e| Error::InvalidFraming(format!("cannot read `{source}`: {e}")))?;
    let spec = framing_file::parse_framing(&text)?;
    let label = format!("{source}#{:016x}", framing_file::fnv1a64(text.as_bytes()));
    Ok((spec.compile()?, label))
}

fn parse_point(text: &str, dim: usize) -> Result<Vec<f64>, Error> {
    let coords: Result<Vec<f64>, _> = text.split(',').map(|c| c.trim().parse::<f64>()).collect();
    let coords = coords.map_err(|_| Error::InvalidInput(format!("bad point `{text}`")))?;
    if coords.len() != dim {
        return Err(Error::InvalidInput(format!(
            "point `{text}` has {} coordinates, chart dimension is {dim}",
            coords.len()
        )));
    }
    Ok(coords)
}

fn cmd_list() -> String {
    let mut out = String::new();
    for name in catalog::names() {
        let e = catalog::get_example(name).expect("listed name exists");
        out.push_str(&format!(
            "{name} dim={} {}\n",
            e.spec.dim,
            if e.expected.flat { "flat" } else { "nonflat" }
        ));
    }
    out
}

fn eval_tensor(
    f: &Framing,
    tensor: &str,
    at: &[f64],
    to: Option<&[f64]>,
    pairing: Option<Pairing>,
) -> Result<Tensor, Error> {
    let pj = pairing.unwrap_or(canonical::DEFAULT_COMPLEX_PAIRING);
    let pw = pairing.unwrap_or(canonical::DEFAULT_SYMPLECTIC_PAIRING);
    match tensor {
        "gamma" => f.gamma(at),
        "torsion" => f.torsion(at),
        "curvature" => f.linear_curvature(at),
        "j" | "J" => canonical::canonical_j(f, at, pj),
        "omega" => canonical::canonical_omega(f, at, pw),
        "metric" => canonical::canonical_metric(f, at),
        "nijenhuis" => canonical::nijenhuis_direct(f, at, pj),
        "domega" => canonical::domega(f, at, pw, DomegaMode::Direct),
        "epsilon" => {
            let to = to.ok_or_else(|| {
                Error::InvalidInput("epsilon needs a target point (--to)".to_string())
            })?;
            f.epsilon(at, to)
        }
        other => Err(Error::UnknownTensor(other.to_string())),
    }
}

fn emit(common: &CommonOpts, body: String) -> Result<(), Error> {
    match &common.out {
        None => {
            print!("{body}");
            Ok(())
        }
        Some(path) => fs::write(path, body)
            .map_err(|e| Error::InvalidInput(format!("cannot write `{path}`: {e}"))),
    }
}

fn run() -> Result<ExitCode, Error> {
    let cli = Cli::parse();
    match cli.command {
        Command::List => {
            print!("{}", cmd_list());
            Ok(ExitCode::SUCCESS)
        }
        Command::Eval { source, tensor, at, to, common } => {
            let (f, _label) = load_source(&source)?;
            let at = parse_point(&at, f.dim())?;
            let to = to.map(|t| parse_point(&t, f.dim())).transpose()?;
            let value = eval_tensor(&f, &tensor, &at, to.as_deref(), common.pairing.map(Into::into))?;
            let body = match common.format {
                Format::Json => {
                    #[derive(serde::Serialize)]
                    struct EvalOut {
                        tensor: String,
                        at: Vec<f64>,
                        up: usize,
                        down: usize,
                        data: llg_core::report::NestedTensor,
                    }
                    let out = EvalOut {
                        tensor: tensor.clone(),
                        at,
                        up: value.up(),
                        down: value.down(),
                        data: llg_core::report::NestedTensor(value),
                    };
                    format!("{}\n", json_17sig(&out))
                }
                Format::Text => format!(
                    "{} ({},{}) at {:?}\n{}\n",
                    tensor,
                    value.up(),
                    value.down(),
                    at,
                    tensor_text(&value)
                ),
            };
            emit(&common, body)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Constants { source, common } => {
            let (f, label) = load_source(&source)?;
            let cfg = RunConfig {
                source_label: label,
                points: validate_points(common.points)?,
                seed: common.seed,
                tol: resolve_tol(common.tol).map_err(Error::InvalidInput)?,
                fd_check: false,
                pairing: common.pairing.map(Into::into),
            };
            let report = run_constants(&f, &cfg)?;
            let body = match common.format {
                Format::Json => format!("{}\n", report.to_json()),
                Format::Text => report.to_text(),
            };
            emit(&common, body)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { source, fd_check, common } => {
            let (f, label) = load_source(&source)?;
            let cfg = RunConfig {
                source_label: label,
                points: validate_points(common.points)?,
                seed: common.seed,
                tol: resolve_tol(common.tol).map_err(Error::InvalidInput)?,
                fd_check,
                pairing: common.pairing.map(Into::into),
            };
            let report = run_verify(&f, &cfg)?;
            let body = match common.format {
                Format::Json => format!("{}\n", report.to_json()),
                Format::Text => report.to_text(),
            };
            let code = if report.passed() { ExitCode::SUCCESS } else { ExitCode::from(1) };
            emit(&common, body)?;
            Ok(code)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
