use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use toric_core::error::Error;
use toric_core::geometry::{self, DerivativeMode};
use toric_core::io::{self, PotentialSpec};
use toric_core::polytope::{LabelledPolytope, DEFAULT_K_MAX};
use toric_core::potential::SymplecticPotential;
use toric_core::projective::{self, EmbeddingData, DEFAULT_BALANCE_MAX_ITER, DEFAULT_BALANCE_TOL};
use toric_core::quadrature::{build_quadrature, DEFAULT_DEPTH, DEFAULT_ORDER};
use toric_core::rational;
use toric_core::spectral::{self, DEFAULT_DEGREE};

const DEFAULT_C_LIST: &str = "0,1,10,100,1000";
const DEFAULT_S_LIST: &str = "2,1.5,1.1,1.01";
const DEFAULT_KE_SAMPLES: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Output {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Vertices, Delzant and integrality tests, lattice count
    Info,
    /// Eigenvalue bounds from lattice-point counts
    Bound,
    /// First invariant eigenvalue by Rayleigh-Ritz
    Lambda1t,
    /// lambda1T along the quadratic perturbation family
    SweepUc,
    /// lambda1T along the dilation family
    SweepDilation,
    /// Kaehler-Einstein residual check
    KeCheck,
    /// Diagonal balancing weights
    Balance,
    /// Balancing followed by the saturation check
    Saturate,
}

#[derive(Debug, Parser)]
#[command(name = "toric", version, about = "Spectral geometry of toric Kaehler metrics from polytope data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Polytope JSON file
    #[arg(global = true)]
    polytope: Option<PathBuf>,
    /// guillemin | uc:i=<axis>,c=<c> | dilation:s=<s> | poly:<file>
    #[arg(long, global = true)]
    potential: Option<String>,
    #[arg(long, global = true)]
    degree: Option<usize>,
    #[arg(long = "quad-order", global = true)]
    quad_order: Option<usize>,
    #[arg(long = "quad-depth", global = true)]
    quad_depth: Option<usize>,
    #[arg(long, global = true)]
    k: Option<u64>,
    #[arg(long = "k-max", global = true)]
    k_max: Option<u64>,
    /// Comma-separated c values for sweep-uc
    #[arg(long, global = true)]
    c: Option<String>,
    /// Comma-separated s values for sweep-dilation
    #[arg(long, global = true)]
    s: Option<String>,
    /// Coordinate axis for sweep-uc
    #[arg(long, global = true)]
    axis: Option<usize>,
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Interior samples for ke-check
    #[arg(long, global = true)]
    samples: Option<usize>,
    #[arg(long = "max-iter", global = true)]
    max_iter: Option<usize>,
    #[arg(long, global = true, value_enum)]
    output: Option<Output>,
}

/// The fully resolved configuration, echoed in every report.
#[derive(Debug, Serialize)]
struct RunConfig {
    command: Command,
    polytope: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    potential: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    degree: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    quad_order: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    quad_depth: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    k: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    k_max: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    c: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    s: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    axis: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_iter: Option<usize>,
    output: Output,
}

enum Failure {
    Usage(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

type Res<T> = Result<T, Failure>;

fn parse_list(s: &str, flag: &str) -> Res<Vec<f64>> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| Failure::Usage(format!("--{flag}: bad number {t:?}"))))
        .collect()
}

/// Which optional flags each command accepts.
fn allowed(cmd: Command) -> &'static [&'static str] {
    const QUAD: [&str; 3] = ["degree", "quad-order", "quad-depth"];
    match cmd {
        Command::Info => &[],
        Command::Bound => &["k", "k-max"],
        Command::Lambda1t => &["potential", QUAD[0], QUAD[1], QUAD[2]],
        Command::SweepUc => &["c", "axis", QUAD[0], QUAD[1], QUAD[2]],
        Command::SweepDilation => &["s", QUAD[0], QUAD[1], QUAD[2]],
        Command::KeCheck => &["potential", "tol", "samples"],
        Command::Balance => &["potential", "tol", "max-iter", "quad-order", "quad-depth", "k-max"],
        Command::Saturate => &["potential", "tol", "max-iter", "quad-order", "quad-depth", "k-max"],
    }
}

fn resolve(cli: &Cli) -> Res<RunConfig> {
    let cmd = cli.command;
    let given: Vec<(&str, bool)> = vec![
        ("potential", cli.potential.is_some()),
        ("degree", cli.degree.is_some()),
        ("quad-order", cli.quad_order.is_some()),
        ("quad-depth", cli.quad_depth.is_some()),
        ("k", cli.k.is_some()),
        ("k-max", cli.k_max.is_some()),
        ("c", cli.c.is_some()),
        ("s", cli.s.is_some()),
        ("axis", cli.axis.is_some()),
        ("tol", cli.tol.is_some()),
        ("samples", cli.samples.is_some()),
        ("max-iter", cli.max_iter.is_some()),
    ];
    let ok = allowed(cmd);
    if let Some((flag, _)) = given.iter().find(|(f, set)| *set && !ok.contains(f)) {
        return Err(Failure::Usage(format!("--{flag} does not apply to this command")));
    }
    let polytope = cli.polytope.as_ref().ok_or_else(|| Failure::Usage("missing polytope file argument".into()))?;
    let sweep = matches!(cmd, Command::SweepUc | Command::SweepDilation);
    let output = cli.output.unwrap_or(if sweep { Output::Csv } else { Output::Text });
    if output == Output::Csv && !(sweep || cmd == Command::Bound) {
        return Err(Failure::Usage("--output csv is only available for sweeps and bound".into()));
    }
    let has = |f: &str| ok.contains(&f);
    let potential = has("potential").then(|| cli.potential.clone().unwrap_or_else(|| "guillemin".into()));
    if let Some(p) = &potential {
        PotentialSpec::parse(p)?;
    }
    let tol_default = match cmd {
        Command::Balance | Command::Saturate => Some(DEFAULT_BALANCE_TOL),
        _ => None,
    };
    Ok(RunConfig {
        command: cmd,
        polytope: polytope.display().to_string(),
        potential,
        degree: has("degree").then(|| cli.degree.unwrap_or(DEFAULT_DEGREE)),
        quad_order: has("quad-order").then(|| cli.quad_order.unwrap_or(DEFAULT_ORDER)),
        quad_depth: has("quad-depth").then(|| cli.quad_depth.unwrap_or(DEFAULT_DEPTH)),
        k: cli.k,
        k_max: has("k-max").then(|| cli.k_max.unwrap_or(DEFAULT_K_MAX)),
        c: if cmd == Command::SweepUc { Some(parse_list(cli.c.as_deref().unwrap_or(DEFAULT_C_LIST), "c")?) } else { None },
        s: if cmd == Command::SweepDilation { Some(parse_list(cli.s.as_deref().unwrap_or(DEFAULT_S_LIST), "s")?) } else { None },
        axis: (cmd == Command::SweepUc).then(|| cli.axis.unwrap_or(0)),
        tol: if has("tol") { cli.tol.or(tol_default) } else { None },
        samples: (cmd == Command::KeCheck).then(|| cli.samples.unwrap_or(DEFAULT_KE_SAMPLES)),
        max_iter: has("max-iter").then(|| cli.max_iter.unwrap_or(DEFAULT_BALANCE_MAX_ITER)),
        output,
    })
}

fn potential(cfg: &RunConfig, p: &LabelledPolytope) -> Res<SymplecticPotential> {
    let spec = PotentialSpec::parse(cfg.potential.as_deref().unwrap_or("guillemin"))?;
    Ok(SymplecticPotential::from_kind(p, spec.to_kind(p.dim())?)?)
}

fn bound_rows_csv(rows: &[projective::BoundRow]) -> String {
    let mut s = String::from("k,n_k,bound,is_integer\n");
    for r in rows {
        s.push_str(&format!("{},{},{},{}\n", r.k, r.n_k, r.bound, r.is_integer));
    }
    s
}

/// Runs the command; returns the JSON result and, for table commands, CSV text.
fn execute(cfg: &RunConfig) -> Res<(Value, Option<String>)> {
    let p = io::read_polytope(std::path::Path::new(&cfg.polytope))?;
    let quad = || build_quadrature(&p, cfg.quad_order.unwrap_or(DEFAULT_ORDER), cfg.quad_depth.unwrap_or(DEFAULT_DEPTH));
    match cfg.command {
        Command::Info => {
            let verts = p.vertices()?;
            let lattice = match p.lattice_points(1) {
                Ok(l) => json!(l.points.len()),
                Err(Error::EmptyLattice { .. }) => json!(0),
                Err(e) => return Err(e.into()),
            };
            let volume = build_quadrature(&p, 1, 0).map(|q| json!(q.volume)).unwrap_or(Value::Null);
            Ok((
                json!({
                    "polytope": io::polytope_to_json(&p),
                    "vertices": verts.iter().map(|v| json!({
                        "coords": v.coords.iter().map(rational::format).collect::<Vec<_>>(),
                        "active": v.active,
                    })).collect::<Vec<_>>(),
                    "is_delzant": p.is_delzant()?,
                    "is_integral": p.is_integral()?,
                    "lattice_points": lattice,
                    "volume": volume,
                }),
                None,
            ))
        }
        Command::Bound => {
            let report = projective::bound_report(&p, cfg.k_max)?;
            let chosen = match cfg.k {
                Some(k) => p.bly_bound(Some(k))?,
                None if report.is_integral => p.bly_bound(Some(1))?,
                None => p.bly_bound(Some(report.k0))?,
            };
            let csv = bound_rows_csv(&report.rows);
            Ok((
                json!({
                    "bound": rational::format(&chosen.bound),
                    "bound_f64": rational::to_f64(&chosen.bound),
                    "k_used": chosen.k_used,
                    "n_k": chosen.n_k,
                    "is_integer_bound": chosen.is_integer_bound,
                    "k0": report.k0,
                    "integral": report.is_integral,
                    "table": report.rows,
                    "recommended": report.recommended,
                }),
                Some(csv),
            ))
        }
        Command::Lambda1t => {
            let u = potential(cfg, &p)?;
            let r = spectral::lambda1_invariant(&u, cfg.degree.unwrap_or(DEFAULT_DEGREE), &quad()?)?;
            Ok((serde_json::to_value(&r).expect("serialisable"), None))
        }
        Command::SweepUc => {
            let t = spectral::sweep_uc(&p, cfg.axis.unwrap_or(0), cfg.c.as_deref().unwrap_or(&[]), cfg.degree.unwrap_or(DEFAULT_DEGREE), &quad()?)?;
            Ok((serde_json::to_value(&t).expect("serialisable"), Some(t.to_csv())))
        }
        Command::SweepDilation => {
            let t = spectral::sweep_dilation(&p, cfg.s.as_deref().unwrap_or(&[]), cfg.degree.unwrap_or(DEFAULT_DEGREE), &quad()?)?;
            Ok((serde_json::to_value(&t).expect("serialisable"), Some(t.to_csv())))
        }
        Command::KeCheck => {
            let u = potential(cfg, &p)?;
            let r = geometry::ke_check_with(&u, cfg.samples.unwrap_or(DEFAULT_KE_SAMPLES), cfg.tol, DerivativeMode::Auto)?;
            Ok((serde_json::to_value(&r).expect("serialisable"), None))
        }
        Command::Balance | Command::Saturate => {
            let u = potential(cfg, &p)?;
            let e = EmbeddingData::new(&p)?;
            let q = quad()?;
            let tol = cfg.tol.unwrap_or(DEFAULT_BALANCE_TOL);
            let b = projective::balance(&e, &u, &q, tol, cfg.max_iter.unwrap_or(DEFAULT_BALANCE_MAX_ITER), None)?;
            let bounds = projective::bound_report(&p, cfg.k_max)?;
            let mut out = json!({
                "bounds": bounds.rows,
                "lattice_points": e.points,
                "balance": {
                    "alpha": b.alpha,
                    "alpha_m0_normalised": b.alpha_m0_normalised,
                    "residual": b.residual,
                    "iterations": b.iterations,
                },
            });
            if cfg.command == Command::Saturate {
                let s = projective::saturation_check(&e, &u, &b.alpha, &q, None)?;
                out["saturation"] = serde_json::to_value(&s).expect("serialisable");
            }
            Ok((out, None))
        }
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut String) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let p = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&p, x, out);
            }
        }
        Value::Array(a) if a.iter().any(|x| x.is_object() || x.is_array()) => {
            for (i, x) in a.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), x, out);
            }
        }
        other => out.push_str(&format!("{prefix}: {other}\n")),
    }
}

fn run(cli: &Cli) -> Res<String> {
    if let Ok(t) = std::env::var("TORIC_THREADS") {
        let n: usize = t.trim().parse().ok().filter(|n| *n > 0).ok_or_else(|| Failure::Usage(format!("TORIC_THREADS must be a positive integer, got {t:?}")))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Failure::Usage(e.to_string()))?;
    }
    let cfg = resolve(cli)?;
    let (result, csv) = execute(&cfg)?;
    let report = json!({ "config": cfg, "result": result });
    Ok(match cfg.output {
        Output::Json => format!("{}\n", serde_json::to_string_pretty(&report).expect("serialisable")),
        Output::Csv => {
            let mut s = String::new();
            flatten("# config", &report["config"], &mut s);
            s.push_str(&csv.expect("csv output validated"));
            s
        }
        Output::Text => {
            let mut s = String::new();
            flatten("", &report, &mut s);
            s
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(s) => {
            print!("{s}");
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 3 } else { 2 })
        }
    }
}
