//! The `causal-metrics` command line.
//!
//! Every subcommand reads one JSON document (a file path, or `-` for stdin)
//! and writes one JSON document to stdout. Exit status is 0 on success
//! (including failed verification verdicts), 1 on usage, parse or schema
//! errors, and 2 on domain errors.

use std::fs;
use std::io::{Read, Write};

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::Error;
use crate::extreal::ExtReal;
use crate::finspace::{self, CostMatrix, Kind, ValidatedSpace};
use crate::json;
use crate::lorentz::{self, LorentzFrame, LorentzVector, ScalarProduct};
use crate::pathval::{self, PolylinePath, StandardMetric};
use crate::spacetime::{self, Event, FieldKind, MetricField, OptimizerConfig, Quadrature};

pub const SEED_ENV: &str = "CAUSAL_METRICS_SEED";

#[derive(Debug, Parser)]
#[command(name = "causal-metrics", version, about = "Real-valued metrics, Lorentz cones and proper time")]
struct Cli {
    /// Print a human-readable summary to stderr.
    #[arg(long, global = true)]
    verbose: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Input {
    /// JSON input file, or `-` for stdin.
    input: String,
}

#[derive(Debug, Args)]
struct EventArgs {
    /// `minkowski` or `power:p`.
    #[arg(long)]
    field: Option<FieldKind>,
    #[arg(long)]
    dim: Option<usize>,
    /// Comma-separated coordinates of the first event.
    #[arg(long, value_parser = parse_coords, allow_hyphen_values = true)]
    x: Option<Coords>,
    #[arg(long, value_parser = parse_coords, allow_hyphen_values = true)]
    y: Option<Coords>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a matrix against the delta, rho or gamma axioms.
    Verify {
        #[arg(long)]
        kind: Kind,
        #[command(flatten)]
        input: Input,
    },
    /// Least rho-metric below a cost matrix.
    Closure(Input),
    /// Negate a rho-space into a gamma-space or back.
    Dualize {
        #[arg(long)]
        kind: Kind,
        #[command(flatten)]
        input: Input,
    },
    /// Reflective and coreflective preorders of a rho-space.
    Preorders(Input),
    /// Check a map of gamma-spaces against a Lipschitz constant.
    Lipschitz(Input),
    /// Timelike / lightlike / spacelike and cone position of vectors.
    Classify {
        #[arg(long)]
        dim: Option<usize>,
        #[command(flatten)]
        input: Input,
    },
    /// Lorentz antinorm of vectors.
    Antinorm {
        #[arg(long)]
        dim: Option<usize>,
        #[command(flatten)]
        input: Input,
    },
    /// Orthonormal basis, signature and index of a scalar product.
    Basis(Input),
    /// Causality of two events (--x/--y) or of a polyline path (input).
    Causal {
        #[command(flatten)]
        events: EventArgs,
        /// Sample points per segment on curved fields.
        #[arg(long, default_value_t = 8)]
        samples: usize,
        input: Option<String>,
    },
    /// Proper time along a polyline path.
    Propertime {
        #[arg(long)]
        field: Option<FieldKind>,
        #[arg(long)]
        quadrature: Option<Quadrature>,
        #[command(flatten)]
        input: Input,
    },
    /// Estimate the geodesic rho-metric between two events.
    Rhog {
        #[command(flatten)]
        events: EventArgs,
        #[arg(long)]
        controls: Option<usize>,
        #[arg(long)]
        iters: Option<usize>,
        #[arg(long)]
        restarts: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        quadrature: Option<Quadrature>,
        /// Optional JSON scenario; flags override its fields.
        input: Option<String>,
    },
    /// Partition valuation of a path under a standard metric.
    Valuate {
        /// delta (delta-line), rho (rho-line) or gamma (Minkowski events).
        #[arg(long)]
        kind: Kind,
        /// Dyadic refinement levels; without it the full sample partition is used.
        #[arg(long)]
        levels: Option<u32>,
        #[arg(long)]
        field: Option<FieldKind>,
        #[command(flatten)]
        input: Input,
    },
}

#[derive(Debug, Clone)]
struct Coords(Vec<f64>);

fn parse_coords(s: &str) -> std::result::Result<Coords, String> {
    s.split(',')
        .map(|c| {
            c.trim()
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| format!("`{c}` is not a finite number"))
        })
        .collect::<std::result::Result<_, _>>()
        .map(Coords)
}

/// Failure of a single invocation, carrying its exit status.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Shape(_)
            | Error::DimensionMismatch { .. }
            | Error::InvalidArgument(_)
            | Error::IndexOutOfRange { .. } => 1,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type Outcome = std::result::Result<(Value, String), Failure>;

struct Context<'a> {
    stdin: &'a mut dyn Read,
}

impl Context<'_> {
    fn read_text(&mut self, path: &str) -> std::result::Result<String, Failure> {
        if path == "-" {
            let mut s = String::new();
            self.stdin
                .read_to_string(&mut s)
                .map_err(|e| Failure::usage(format!("cannot read stdin: {e}")))?;
            Ok(s)
        } else {
            fs::read_to_string(path).map_err(|e| Failure::usage(format!("cannot read {path}: {e}")))
        }
    }

    fn read<T: DeserializeOwned>(&mut self, path: &str) -> std::result::Result<T, Failure> {
        let text = self.read_text(path)?;
        serde_json::from_str(&text).map_err(|e| Failure::usage(format!("{path}: {e}")))
    }
}

/// Runs one invocation; `args[0]` is the program name.
pub fn run(args: &[String], stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{e}");
                    0
                }
                _ => {
                    let rendered = e.to_string();
                    let line = rendered.lines().next().unwrap_or("usage error");
                    let _ = writeln!(stderr, "{line}");
                    1
                }
            };
        }
    };
    let mut ctx = Context { stdin };
    match dispatch(cli.command, &mut ctx) {
        Ok((value, summary)) => {
            let text = match json::to_string(&value) {
                Ok(t) => t,
                Err(e) => {
                    let _ = writeln!(stderr, "cannot serialize result: {e}");
                    return 2;
                }
            };
            if writeln!(stdout, "{text}").is_err() {
                return 1;
            }
            if cli.verbose {
                let _ = writeln!(stderr, "{summary}");
            }
            0
        }
        Err(f) => {
            let _ = writeln!(stderr, "{}", f.message.lines().next().unwrap_or(""));
            f.code
        }
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("results serialize")
}

#[derive(Deserialize)]
struct LipschitzInput {
    source: CostMatrix,
    target: CostMatrix,
    map: Vec<usize>,
    lambda: f64,
}

#[derive(Deserialize)]
struct VectorsInput {
    #[serde(default)]
    frame: Option<LorentzFrame>,
    vectors: Vec<LorentzVector>,
}

#[derive(Deserialize)]
struct BasisInput {
    g: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
struct Scenario {
    #[serde(default)]
    field: Option<FieldKind>,
    #[serde(default)]
    dim: Option<usize>,
    x: Vec<f64>,
    y: Vec<f64>,
    #[serde(default)]
    config: Option<OptimizerConfig>,
}

fn frame_for(frame: Option<LorentzFrame>, dim: Option<usize>) -> std::result::Result<LorentzFrame, Failure> {
    match (frame, dim) {
        (Some(f), None) => Ok(f),
        (Some(f), Some(d)) if f.dim() == d => Ok(f),
        (Some(f), Some(d)) => Err(Error::DimensionMismatch {
            expected: d,
            found: f.dim(),
        }
        .into()),
        (None, Some(d)) => Ok(LorentzFrame::standard(d)?),
        (None, None) => Err(Failure::usage("no frame given: add \"frame\" to the input or pass --dim")),
    }
}

fn events_field(kind: Option<FieldKind>, dim: Option<usize>, x: &[f64]) -> std::result::Result<MetricField, Failure> {
    let dim = dim.unwrap_or(x.len());
    Ok(MetricField::new(kind.unwrap_or(FieldKind::Minkowski), dim)?)
}

fn dispatch(command: Command, ctx: &mut Context<'_>) -> Outcome {
    match command {
        Command::Verify { kind, input } => {
            let m: CostMatrix = ctx.read(&input.input)?;
            let report = finspace::verify(&m, kind);
            let summary = format!(
                "{kind}: {} ({} violations)",
                if report.pass { "pass" } else { "fail" },
                report.violations.len()
            );
            Ok((to_value(&report), summary))
        }
        Command::Closure(input) => {
            let m: CostMatrix = ctx.read(&input.input)?;
            let c = finspace::metric_closure(&m);
            let n = m.n();
            let lowered: Vec<Vec<bool>> = (0..n).map(|i| (0..n).map(|j| c.lowered(i, j)).collect()).collect();
            let count = c.lowered.iter().filter(|&&l| l).count();
            let mut out = to_value(c.space.matrix());
            out["lowered"] = to_value(&lowered);
            Ok((out, format!("closure lowered {count} of {} entries", n * n)))
        }
        Command::Dualize { kind, input } => {
            let m: CostMatrix = ctx.read(&input.input)?;
            let space = ValidatedSpace::new(m, kind)?;
            let dual = finspace::dualize(&space)?;
            Ok((to_value(&dual), format!("{kind} -> {}", dual.kind())))
        }
        Command::Preorders(input) => {
            let m: CostMatrix = ctx.read(&input.input)?;
            let p = finspace::preorders(&ValidatedSpace::new(m, Kind::Rho)?)?;
            Ok((to_value(&p), "reflective and coreflective preorders".into()))
        }
        Command::Lipschitz(input) => {
            let li: LipschitzInput = ctx.read(&input.input)?;
            let source = ValidatedSpace::new(li.source, Kind::Gamma)?;
            let target = ValidatedSpace::new(li.target, Kind::Gamma)?;
            let check = finspace::check_lipschitz(&li.map, &source, &target, li.lambda)?;
            let summary = format!("lipschitz with constant {}: {}", li.lambda, check.lipschitz);
            Ok((to_value(&check), summary))
        }
        Command::Classify { dim, input } => {
            let vi: VectorsInput = ctx.read(&input.input)?;
            let frame = frame_for(vi.frame, dim)?;
            let mut results = Vec::with_capacity(vi.vectors.len());
            for v in &vi.vectors {
                let class = frame.classify(v)?;
                let cone = frame.cone_membership(v)?;
                results.push(json!({"vector": v, "class": class, "cone": cone}));
            }
            let summary = format!("classified {} vectors", results.len());
            Ok((json!({ "results": results }), summary))
        }
        Command::Antinorm { dim, input } => {
            let vi: VectorsInput = ctx.read(&input.input)?;
            let frame = frame_for(vi.frame, dim)?;
            let mut results = Vec::with_capacity(vi.vectors.len());
            for v in &vi.vectors {
                results.push(json!({"vector": v, "antinorm": frame.antinorm(v)?}));
            }
            let summary = format!("antinorm of {} vectors", results.len());
            Ok((json!({ "results": results }), summary))
        }
        Command::Basis(input) => {
            let bi: BasisInput = ctx.read(&input.input)?;
            let g = ScalarProduct::new(bi.g)?;
            let b = lorentz::orthonormal_basis(&g);
            let summary = format!("index {} signature {:?}", b.index, b.signature);
            Ok((
                json!({"basis": b.vectors, "signature": b.signature, "index": b.index}),
                summary,
            ))
        }
        Command::Causal { events, samples, input } => match input {
            Some(path_file) => {
                let path: PolylinePath<Event> = ctx.read(&path_file)?;
                let dim = events.dim.unwrap_or(path.first().dim());
                let field = MetricField::new(events.field.unwrap_or(FieldKind::Minkowski), dim)?;
                let check = spacetime::is_causal_path(&field, &path, samples)?;
                Ok((to_value(&check), format!("causal path: {}", check.causal)))
            }
            None => {
                let (Some(Coords(x)), Some(Coords(y))) = (events.x, events.y) else {
                    return Err(Failure::usage("causal needs --x and --y, or a path input"));
                };
                let field = events_field(events.field, events.dim, &x)?;
                let (x, y) = (Event(x), Event(y));
                let precedes = spacetime::causally_precedes(&field, &x, &y)?;
                let gamma = spacetime::event_antimetric(&field, &x, &y)?;
                Ok((
                    json!({"precedes": precedes, "gamma": gamma, "rho": gamma.negate()}),
                    format!("x <= y: {precedes}"),
                ))
            }
        },
        Command::Propertime { field, quadrature, input } => {
            let path: PolylinePath<Event> = ctx.read(&input.input)?;
            let field = MetricField::new(field.unwrap_or(FieldKind::Minkowski), path.first().dim())?;
            let quadrature = quadrature.unwrap_or(if field.is_minkowski() {
                Quadrature::ExactMinkowski
            } else {
                Quadrature::Simpson(8)
            });
            let tau = spacetime::proper_time(&field, &path, quadrature)?;
            Ok((
                json!({"proper_time": tau, "quadrature": quadrature}),
                format!("proper time {tau} ({quadrature})"),
            ))
        }
        Command::Rhog {
            events,
            controls,
            iters,
            restarts,
            seed,
            quadrature,
            input,
        } => {
            let scenario = match input {
                Some(p) => Some(ctx.read::<Scenario>(&p)?),
                None => None,
            };
            let (mut kind, mut dim, mut x, mut y, mut config) = match scenario {
                Some(s) => (s.field, s.dim, Some(s.x), Some(s.y), s.config),
                None => (None, None, None, None, None),
            };
            kind = events.field.or(kind);
            dim = events.dim.or(dim);
            x = events.x.map(|c| c.0).or(x);
            y = events.y.map(|c| c.0).or(y);
            let (Some(x), Some(y)) = (x, y) else {
                return Err(Failure::usage("rhog needs --x and --y, or a scenario input"));
            };
            let seed_from_scenario = config.is_some_and(|c| c.seed != 0);
            let mut cfg = config.take().unwrap_or_default();
            if let Some(c) = controls {
                cfg.controls = c;
            }
            if let Some(i) = iters {
                cfg.iterations = i;
            }
            if let Some(r) = restarts {
                cfg.restarts = r;
            }
            if quadrature.is_some() {
                cfg.quadrature = quadrature;
            }
            cfg.seed = match seed {
                Some(s) => s,
                None if seed_from_scenario => cfg.seed,
                None => seed_from_env()?,
            };
            let field = events_field(kind, dim, &x)?;
            let est = spacetime::rho_g_estimate(&field, &Event(x), &Event(y), &cfg)?;
            let summary = format!(
                "rho_g estimate {} ({} restarts, {} iterations, seed {})",
                est.rho, cfg.restarts, cfg.iterations, cfg.seed
            );
            Ok((to_value(&est), summary))
        }
        Command::Valuate {
            kind,
            levels,
            field,
            input,
        } => {
            let path: PolylinePath<Vec<f64>> = ctx.read(&input.input)?;
            valuate(kind, levels, field, &path)
        }
    }
}

fn seed_from_env() -> std::result::Result<u64, Failure> {
    match std::env::var(SEED_ENV) {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| Failure::usage(format!("{SEED_ENV} must be an unsigned integer, got `{s}`"))),
        Err(_) => Ok(0),
    }
}

fn valuate(kind: Kind, levels: Option<u32>, field: Option<FieldKind>, path: &PolylinePath<Vec<f64>>) -> Outcome {
    let sum_summary = |s: ExtReal| format!("{kind} valuation {s}");
    match kind {
        Kind::Delta | Kind::Rho => {
            if let Some(p) = path.points().iter().find(|p| p.len() != 1) {
                return Err(Error::DimensionMismatch {
                    expected: 1,
                    found: p.len(),
                }
                .into());
            }
            let line = PolylinePath::new(
                path.params().to_vec(),
                path.points().iter().map(|p| p[0]).collect(),
            )?;
            let metric = pathval::standard_metric(if kind == Kind::Delta {
                StandardMetric::DeltaLine
            } else {
                StandardMetric::RhoLine
            });
            match levels {
                None => {
                    let s = pathval::full_sum(&metric, &line);
                    Ok((json!({"kind": kind, "sum": s}), sum_summary(s)))
                }
                Some(l) => {
                    let r = pathval::refine_valuation(&metric, |t| line.at(t), l)?;
                    let summary = sum_summary(r.estimate);
                    Ok((to_value(&r), summary))
                }
            }
        }
        Kind::Gamma => {
            if field.is_some_and(|f| f != FieldKind::Minkowski) {
                return Err(Error::Unsupported(
                    "gamma valuation has a closed-form metric only on Minkowski space".into(),
                )
                .into());
            }
            let dim = path.first().len();
            let metric = spacetime::minkowski_event_metric(dim)?;
            let events = PolylinePath::new(
                path.params().to_vec(),
                path.points().iter().map(|p| Event(p.clone())).collect(),
            )?;
            if let Some(p) = events.points().iter().find(|p| p.dim() != dim) {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.dim(),
                }
                .into());
            }
            match levels {
                None => {
                    let s = pathval::full_sum(&metric, &events);
                    Ok((json!({"kind": kind, "sum": s}), sum_summary(s)))
                }
                Some(l) => {
                    let r = pathval::refine_valuation(&metric, |t| events.at(t), l)?;
                    let summary = sum_summary(r.estimate);
                    Ok((to_value(&r), summary))
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_with(args: &[&str], stdin: &str) -> (u8, String, String) {
        let mut argv = vec!["causal-metrics".to_string()];
        argv.extend(args.iter().map(|s| s.to_string()));
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(&argv, &mut stdin.as_bytes(), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn verify_valid_rho() {
        let (code, out, _) = run_with(&["verify", "--kind", "rho", "-"], r#"{"entries": [[0, -1], ["inf", 0]]}"#);
        assert_eq!(code, 0);
        assert_eq!(out.trim(), r#"{"pass":true,"violations":[]}"#);
    }

    #[test]
    fn failing_verdict_still_exits_zero() {
        let (code, out, _) = run_with(&["verify", "--kind", "rho", "-"], r#"{"entries": [[0, -2], [-2, 0]]}"#);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["pass"], false);
        assert_eq!(v["violations"][0]["rule"], "triangle");
    }

    #[test]
    fn non_square_matrix_is_a_usage_error() {
        let (code, out, err) = run_with(&["closure", "-"], r#"{"entries": [[0, 1], [0]]}"#);
        assert_eq!(code, 1);
        assert!(out.is_empty());
        assert!(err.contains("matrix not square"), "{err}");
        assert_eq!(err.lines().count(), 1);
    }

    #[test]
    fn unknown_flag_is_a_usage_error() {
        let (code, _, err) = run_with(&["verify", "--bogus", "-"], "");
        assert_eq!(code, 1);
        assert_eq!(err.lines().count(), 1);
    }

    #[test]
    fn domain_errors_exit_two() {
        let (code, _, err) = run_with(&["dualize", "--kind", "delta", "-"], r#"{"entries": [[0]]}"#);
        assert_eq!(code, 2, "{err}");
        let (code, _, _) = run_with(&["basis", "-"], r#"{"g": [[1, 0], [0, 0]]}"#);
        assert_eq!(code, 2);
        let (code, _, _) = run_with(&["rhog", "--field", "power:1", "--x", "0,0", "--y", "1,0"], "");
        assert_eq!(code, 2);
    }

    #[test]
    fn rhog_from_flags() {
        let (code, out, _) = run_with(&["rhog", "--field", "minkowski", "--dim", "2", "--x", "0,0", "--y", "2,1", "--seed", "7"], "");
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        let rho = v["rho"].as_f64().unwrap();
        assert!((rho + 3f64.sqrt()).abs() < 0.01 * 3f64.sqrt());
        assert!(v["path"]["points"].as_array().unwrap().len() == 5);
    }

    #[test]
    fn rhog_accepts_negative_coordinates() {
        let (code, out, err) = run_with(&["rhog", "--x", "-1,-1", "--y", "1,-0.5"], "");
        assert_eq!(code, 0, "{err}");
        let v: Value = serde_json::from_str(&out).unwrap();
        assert!(v["rho"].as_f64().unwrap() < 0.0);
    }

    #[test]
    fn rhog_scenario() {
        let scenario = r#"{"field": {"diagonal_power": 1}, "dim": 2, "x": [1, 0], "y": [2, 0],
                           "config": {"controls": 2, "iterations": 5, "restarts": 2, "seed": 3}}"#;
        let (code, out, err) = run_with(&["rhog", "-"], scenario);
        assert_eq!(code, 0, "{err}");
        let v: Value = serde_json::from_str(&out).unwrap();
        assert!((v["rho"].as_f64().unwrap() + 1.0).abs() < 1e-6);
        assert_eq!(v["trace"].as_array().unwrap().len(), 6);
    }

    #[test]
    fn classify_and_antinorm() {
        let input = r#"{"vectors": [[2, 1], [1, -1], [0, 1], [0, 0]]}"#;
        let (code, out, _) = run_with(&["classify", "--dim", "2", "-"], input);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        let classes: Vec<&str> = v["results"].as_array().unwrap().iter().map(|r| r["class"].as_str().unwrap()).collect();
        assert_eq!(classes, ["timelike", "lightlike", "spacelike", "spacelike"]);

        let (code, out, _) = run_with(&["antinorm", "-"], r#"{"frame": {"standard": 4}, "vectors": [[5, 3, 0, 0], [0, 1, 0, 0]]}"#);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["results"][0]["antinorm"].as_f64(), Some(4.0));
        assert_eq!(v["results"][1]["antinorm"], "-inf");

        let (code, _, _) = run_with(&["classify", "-"], input);
        assert_eq!(code, 1);
    }

    #[test]
    fn causal_events_and_paths() {
        let (_, out, _) = run_with(&["causal", "--x", "0,0", "--y", "1,1"], "");
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["precedes"], true);
        assert_eq!(v["gamma"].as_f64(), Some(0.0));

        let (_, out, _) = run_with(&["causal", "-"], r#"{"params": [0, 1], "points": [[0, 0], [1, 2]]}"#);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["causal"], false);
        assert_eq!(v["violation"]["segment"], 0);
    }

    #[test]
    fn propertime_of_twin_path() {
        let (code, out, _) = run_with(&["propertime", "-"], r#"{"params": [0, 0.5, 1], "points": [[0, 0], [1, 0.8], [2, 0]]}"#);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert!((v["proper_time"].as_f64().unwrap() - 1.2).abs() < 1e-15);
        assert_eq!(v["quadrature"], "exact");
    }

    #[test]
    fn valuate_lines_and_events() {
        let (_, out, _) = run_with(&["valuate", "--kind", "delta", "-"], r#"{"params": [0, 0.5, 1], "points": [[1], [0.5], [0]]}"#);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["sum"], "inf");

        let (code, out, err) = run_with(&["valuate", "--kind", "gamma", "--levels", "3", "-"], r#"{"params": [0, 1], "points": [[0, 0], [2, 1]]}"#);
        assert_eq!(code, 0, "{err}");
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["trace"].as_array().unwrap().len(), 4);
        for l in v["trace"].as_array().unwrap() {
            assert!((l["sum"].as_f64().unwrap() - 3f64.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn lipschitz_and_preorders() {
        let input = r#"{"source": {"entries": [[0, 1, 2], [-1, 0, 1], [-2, -1, 0]]},
                        "target": {"entries": [[0, 1, 2], [-1, 0, 1], [-2, -1, 0]]},
                        "map": [0, 1, 2], "lambda": 2}"#;
        let (code, out, _) = run_with(&["lipschitz", "-"], input);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["lipschitz"], false);
        assert_eq!(v["witness"], json!([0, 1]));

        let (code, out, _) = run_with(&["preorders", "-"], r#"{"entries": [[0, 1], ["inf", 0]]}"#);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["reflective"], json!([[true, true], [false, true]]));
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = run_with(&["--help"], "");
        assert_eq!(code, 0);
        assert!(out.contains("rhog"));
    }
}
