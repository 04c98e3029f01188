mod failure;
mod render;

use std::process::ExitCode;

use abelpn::criteria::{bounds_table, evaluate, MSource};
use abelpn::diagonal::lemma31_check;
use abelpn::rho2::{rho2_rank, Rho2Options};
use abelpn::schema::{parse_curves, parse_subtorus, parse_torus, CurveInput};
use abelpn::svp::{buser_sarnak, relative_buser_sarnak};
use abelpn::theta::DEFAULT_TOL;
use abelpn::torus::{validate, PolarizationType, PolarizedTorus, Subtorus};
use abelpn::tube::{federer_check_with, prop23_check_union_with, QuadratureOptions, TubeSpec};
use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use failure::{invalid, Invalid};
use render::{error_envelope, pretty, render, Format, Report};

#[derive(Debug, Parser)]
#[command(name = "abelpn", version, about = "Lattice invariants and normality criteria for polarized complex tori")]
struct Cli {
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Seed for randomized sampling.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct TorusArg {
    /// Torus JSON, inline or as a file path.
    #[arg(long)]
    input: String,
}

#[derive(Debug, Args)]
struct QuadArgs {
    /// Absolute quadrature tolerance.
    #[arg(long, default_value_t = QuadratureOptions::default().tol_abs)]
    tol_abs: f64,
    /// Maximum bisection depth of the parameter square.
    #[arg(long, default_value_t = QuadratureOptions::default().max_depth)]
    max_depth: u32,
}

impl QuadArgs {
    fn options(&self) -> anyhow::Result<QuadratureOptions> {
        if !(self.tol_abs > 0.0 && self.tol_abs.is_finite()) {
            return Err(invalid("tolerance_positive", format!("--tol-abs must be positive, got {}", self.tol_abs)));
        }
        let d = QuadratureOptions::default();
        if self.max_depth < d.min_depth || self.max_depth > 20 {
            return Err(invalid("depth_range", format!("--max-depth must lie in {}..=20", d.min_depth)));
        }
        Ok(QuadratureOptions { tol_abs: self.tol_abs, max_depth: self.max_depth, ..d })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MSourceArg {
    Bauer,
    Computed,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check every invariant of a torus input.
    Validate(TorusArg),
    /// Shortest lattice vector in the polarization metric.
    Bs(TorusArg),
    /// Shortest lattice vector transverse to a subtorus.
    RelBs {
        #[command(flatten)]
        torus: TorusArg,
        /// Subtorus JSON, inline or as a file path.
        #[arg(long)]
        subtorus: String,
    },
    /// Relative invariant of the diagonal in the self-product against half the invariant.
    Lemma31(TorusArg),
    /// Area of curves inside a tube around a subtorus against the intersection bound.
    Tube {
        #[command(flatten)]
        torus: TorusArg,
        #[arg(long)]
        subtorus: String,
        /// Curve JSON (one object or an array), inline or as a file path.
        #[arg(long)]
        curve: String,
        #[arg(long)]
        radius: f64,
        #[command(flatten)]
        quad: QuadArgs,
    },
    /// Area of a curve through the origin inside a ball against its multiplicity bound.
    Federer {
        /// Curve JSON; the map is the concatenation of `f` and `p`.
        #[arg(long)]
        curve: String,
        #[arg(long)]
        radius: f64,
        #[command(flatten)]
        quad: QuadArgs,
    },
    /// Nef, big and h0 bounds for a polarization type.
    Criteria {
        /// Dimension; must equal the length of the type when both are given.
        #[arg(long)]
        n: Option<u32>,
        /// Polarization type, comma separated.
        #[arg(long = "type", value_delimiter = ',')]
        ptype: Option<Vec<u64>>,
        #[arg(long, value_enum, default_value_t = MSourceArg::Bauer)]
        m_source: MSourceArg,
        /// Torus JSON for the computed invariant.
        #[arg(long, required_if_eq("m_source", "computed"))]
        input: Option<String>,
    },
    /// Exact comparison of the two h0 thresholds for n = 1..=n_max.
    Table {
        #[arg(long, default_value_t = 64)]
        n_max: u32,
    },
    /// Numerical rank of the multiplication map into the level-2 sections.
    Rho2 {
        #[command(flatten)]
        torus: TorusArg,
        /// Sample count; defaults to four times the target dimension.
        #[arg(long)]
        samples: Option<usize>,
        /// Relative tail tolerance of the theta series.
        #[arg(long, default_value_t = DEFAULT_TOL)]
        theta_tol: f64,
        /// Multiplies the theta truncation.
        #[arg(long, default_value_t = 1)]
        truncation_factor: i64,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Validate(_) => "validate",
            Command::Bs(_) => "bs",
            Command::RelBs { .. } => "rel-bs",
            Command::Lemma31(_) => "lemma31",
            Command::Tube { .. } => "tube",
            Command::Federer { .. } => "federer",
            Command::Criteria { .. } => "criteria",
            Command::Table { .. } => "table",
            Command::Rho2 { .. } => "rho2",
        }
    }
}

/// A rendered report, possibly paired with a validation failure it describes.
struct Outcome {
    stdout: String,
    failure: Option<anyhow::Error>,
}

/// Inline JSON if the argument starts with `{` or `[`, otherwise a file path.
fn read_input(arg: &str) -> anyhow::Result<String> {
    let t = arg.trim_start();
    if t.starts_with('{') || t.starts_with('[') {
        return Ok(arg.to_string());
    }
    std::fs::read_to_string(arg).map_err(|e| invalid("input_file", format!("cannot read {arg}: {e}")))
}

fn load_torus(arg: &str) -> anyhow::Result<PolarizedTorus> {
    let text = read_input(arg)?;
    parse_torus(&text).and_then(|t| t.build()).map_err(failure::schema)
}

fn load_subtorus(torus: &PolarizedTorus, arg: &str) -> anyhow::Result<Subtorus> {
    let text = read_input(arg)?;
    parse_subtorus(&text).and_then(|s| s.build(torus)).map_err(failure::schema)
}

fn load_curves(arg: &str) -> anyhow::Result<Vec<CurveInput>> {
    parse_curves(&read_input(arg)?).map_err(failure::schema)
}

fn to_value<T: serde::Serialize>(v: &T) -> anyhow::Result<Value> {
    serde_json::to_value(v).context("serializing report")
}

fn single(report: Report, format: Format) -> Outcome {
    Outcome { stdout: render(&report, format), failure: None }
}

fn run(cli: &Cli) -> anyhow::Result<Outcome> {
    let format = cli.format;
    let name = cli.command.name();
    let report = |module, quantity, result| Report { command: name, module, quantity, result };
    match &cli.command {
        Command::Validate(arg) => {
            let input = parse_torus(&read_input(&arg.input)?).map_err(failure::schema)?;
            let tau = input.tau_matrix().map_err(failure::schema)?;
            let rep = validate(&input.polarization_type, &tau);
            let mut result = to_value(&rep)?;
            result["all_passed"] = json!(rep.all_passed());
            result["first_failure"] = json!(rep.first_failure().map(|c| c.invariant));
            let failure = rep.first_failure().map(|c| invalid(c.invariant, &c.detail));
            let stdout = render(&report("torus_core", "torus_invariants", result), format);
            Ok(Outcome { stdout, failure })
        }
        Command::Bs(arg) => {
            let torus = load_torus(&arg.input)?;
            let res = buser_sarnak(&torus).map_err(failure::svp)?;
            Ok(single(report("lattice_svp", "buser_sarnak_invariant", to_value(&res)?), format))
        }
        Command::RelBs { torus, subtorus } => {
            let t = load_torus(&torus.input)?;
            let sub = load_subtorus(&t, subtorus)?;
            let res = relative_buser_sarnak(&sub).map_err(failure::svp)?;
            Ok(single(report("lattice_svp", "relative_buser_sarnak_invariant", to_value(&res)?), format))
        }
        Command::Lemma31(arg) => {
            let torus = load_torus(&arg.input)?;
            let res = lemma31_check(&torus).map_err(failure::diagonal)?;
            Ok(single(report("diagonal_product", "diagonal_invariant_vs_half_invariant", to_value(&res)?), format))
        }
        Command::Tube { torus, subtorus, curve, radius, quad } => {
            let opts = quad.options()?;
            let t = load_torus(&torus.input)?;
            let sub = load_subtorus(&t, subtorus)?;
            let curves = load_curves(curve)?
                .iter()
                .map(|c| c.build().map_err(failure::schema))
                .collect::<anyhow::Result<Vec<_>>>()?;
            let tube = TubeSpec::new(sub, *radius).map_err(failure::tube)?;
            let rep = prop23_check_union_with(&tube, &curves, &opts).map_err(failure::tube)?;
            let mut result = to_value(&rep)?;
            result["radius"] = json!(tube.radius());
            result["max_radius"] = json!(tube.max_radius());
            result["relative_invariant"] = json!(tube.relative_invariant());
            result["curve_count"] = json!(curves.len());
            Ok(single(report("tube_volume", "tube_area_vs_intersection_bound", result), format))
        }
        Command::Federer { curve, radius, quad } => {
            let opts = quad.options()?;
            let curves = load_curves(curve)?;
            let [c] = curves.as_slice() else {
                return Err(invalid("single_curve", format!("expected one curve, got {}", curves.len())));
            };
            let gamma = c.gamma().map_err(failure::schema)?;
            let rep = federer_check_with(gamma, *radius, c.domain_radius, &opts).map_err(failure::tube)?;
            Ok(single(report("tube_volume", "ball_area_vs_multiplicity_bound", to_value(&rep)?), format))
        }
        Command::Criteria { n, ptype, m_source, input } => {
            let torus = match (m_source, input) {
                (MSourceArg::Computed, Some(arg)) => Some(load_torus(arg)?),
                _ => None,
            };
            let d = match (ptype, &torus) {
                (Some(d), _) => d.clone(),
                (None, Some(t)) => t.polarization_type().divisors().to_vec(),
                (None, None) => return Err(invalid("polarization_type", "--type is required with --m-source bauer")),
            };
            if let Some(n) = n {
                if *n as usize != d.len() {
                    return Err(invalid("dimensions", format!("--n {n} but the type {d:?} has length {}", d.len())));
                }
            }
            let ptype = PolarizationType::new(d).map_err(failure::torus)?;
            let source = match &torus {
                Some(t) => MSource::Computed(t),
                None => MSource::Bauer,
            };
            let rep = evaluate(&ptype, source).map_err(failure::criteria)?;
            Ok(single(report("criteria", "normality_criterion", to_value(&rep)?), format))
        }
        Command::Table { n_max } => {
            let table = bounds_table(*n_max).map_err(failure::criteria)?;
            let stdout = match format {
                Format::Text => table.to_text(),
                Format::Json => {
                    let mut out = String::new();
                    for row in &table.rows {
                        let mut result = to_value(row)?;
                        result["crossover"] = json!(table.crossover == Some(row.n));
                        let env = report("criteria", "h0_bounds_row", result).envelope();
                        out.push_str(&serde_json::to_string(&env)?);
                        out.push('\n');
                    }
                    out
                }
            };
            Ok(Outcome { stdout, failure: None })
        }
        Command::Rho2 { torus, samples, theta_tol, truncation_factor } => {
            if *truncation_factor < 1 {
                return Err(invalid("truncation_factor", "--truncation-factor must be at least 1"));
            }
            let t = load_torus(&torus.input)?;
            let opts = Rho2Options {
                samples: *samples,
                seed: cli.seed,
                tol: *theta_tol,
                truncation_factor: *truncation_factor,
            };
            let rep = rho2_rank(&t, &opts).map_err(failure::rho2)?;
            Ok(single(report("theta_rho2", "multiplication_map_rank", to_value(&rep)?), format))
        }
    }
}

fn report_failure(cli: &Cli, err: &anyhow::Error) -> ExitCode {
    match cli.format {
        Format::Json => print!("{}", pretty(&error_envelope(cli.command.name(), err))),
        Format::Text => eprintln!("error: {err:#}"),
    }
    if err.downcast_ref::<Invalid>().is_some() {
        ExitCode::from(2)
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Outcome { stdout, failure: None }) => {
            print!("{stdout}");
            ExitCode::SUCCESS
        }
        Ok(Outcome { stdout, failure: Some(err) }) => {
            print!("{stdout}");
            if cli.format == Format::Text {
                eprintln!("error: {err:#}");
            }
            ExitCode::from(2)
        }
        Err(err) => report_failure(&cli, &err),
    }
}
