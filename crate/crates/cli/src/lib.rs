//! Command-line front end: the verdict table, single-case checks, the
//! `SL(2,R)` cover calculator, the long-arc solver and cone queries.

mod format;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::Vector3;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use sublorentz::cases::{self, CaseId, CaseParams, HPattern, RootSign, SubLorentzCase, Tabulated};
use sublorentz::conegeom::{Covector, SolidCone};
use sublorentz::existence::{self, Outcome};
use sublorentz::longarc::{self, AntiNorm, ControlCurve, LongArcError, SolveOptions, Structure, TargetSpec};
use sublorentz::sl2cover;

pub use format::{parse_cover_element, parse_tangent};

/// Seed used by `table` and `solve` unless `--seed` is given.
pub const DEFAULT_SEED: u64 = longarc::DEFAULT_SEED;

#[derive(Parser, Debug)]
#[command(name = "sublorentz", version, about = "Longest arcs of left-invariant 3D contact sub-Lorentzian structures")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Json)]
    pub format: Format,
    /// Write output to this file instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum AntiNormArg {
    Lorentzian,
    Polyhedral,
}

impl AntiNormArg {
    fn build(self) -> AntiNorm {
        match self {
            AntiNormArg::Lorentzian => AntiNorm::Lorentzian,
            AntiNormArg::Polyhedral => AntiNorm::Polyhedral,
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Verdicts for every row of the classification on sampled parameters.
    Table {
        #[arg(long, default_value_t = 4)]
        samples: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = AntiNormArg::Lorentzian)]
        anti_norm: AntiNormArg,
    },
    /// Verdict for one row and parameter set.
    Check(CaseArgs),
    /// Universal cover of SL(2,R): elements as "c,re,im" or JSON.
    Sl2 {
        #[command(subcommand)]
        op: Sl2Op,
    },
    /// Search for a long admissible curve to a target.
    Solve {
        #[command(flatten)]
        case: CaseArgs,
        /// JSON target: {"second_kind":[a,b,c]}, {"c":..,"w":[re,im]} or {"probe":{"dt":..,"controls":[..]}}.
        #[arg(long)]
        target: String,
        #[arg(long, default_value_t = 32)]
        steps: usize,
        #[arg(long, default_value_t = 2000)]
        budget: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = AntiNormArg::Lorentzian)]
        anti_norm: AntiNormArg,
    },
    /// Curve of length at least L on SU(2) built from closed timelike loops.
    Witness {
        #[command(flatten)]
        case: CaseArgs,
        #[arg(long, allow_hyphen_values = true)]
        length: f64,
        /// JSON control curve whose endpoint is the target (default: the identity).
        #[arg(long)]
        base: Option<String>,
    },
    /// Cone queries against a subspace.
    Cone {
        #[command(subcommand)]
        op: ConeOp,
    },
}

#[derive(Args, Debug, Clone)]
pub struct CaseArgs {
    /// Row id: 1, 2, 2*, 3, ..., 19.
    #[arg(long = "case")]
    pub id: String,
    #[arg(long, allow_hyphen_values = true)]
    pub kappa: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub tau: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub chi: Option<f64>,
    /// Which canonical h of rows 3-8.
    #[arg(long, value_enum, default_value_t = PatternArg::First)]
    pub pattern: PatternArg,
    /// Sign of the square-rooted structure constant.
    #[arg(long, value_enum, default_value_t = RootArg::Positive)]
    pub root: RootArg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PatternArg {
    First,
    Second,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RootArg {
    Positive,
    Negative,
}

impl CaseArgs {
    fn build(&self) -> Result<SubLorentzCase, CliError> {
        let id: CaseId = self.id.parse().map_err(|e: cases::CaseError| CliError::Usage(e.to_string()))?;
        let params = CaseParams {
            kappa: self.kappa,
            tau: self.tau,
            chi: self.chi,
            pattern: match self.pattern {
                PatternArg::First => HPattern::First,
                PatternArg::Second => HPattern::Second,
            },
            root: match self.root {
                RootArg::Positive => RootSign::Positive,
                RootArg::Negative => RootSign::Negative,
            },
        };
        SubLorentzCase::from_params(id, params).map_err(|e| CliError::Usage(e.to_string()))
    }
}

#[derive(Subcommand, Debug)]
pub enum Sl2Op {
    /// Product of two elements.
    Mul {
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(allow_hyphen_values = true)]
        b: String,
    },
    /// Inverse of an element.
    Inv {
        #[arg(allow_hyphen_values = true)]
        a: String,
    },
    /// SU(1,1) matrix of an element.
    Project {
        #[arg(allow_hyphen_values = true)]
        a: String,
    },
    /// Left shift of a tangent vector "xi,re,im" to a base point.
    Push {
        #[arg(allow_hyphen_values = true)]
        base: String,
        #[arg(allow_hyphen_values = true)]
        v: String,
    },
    /// Time form dc of the left shift of a tangent vector.
    Tau {
        #[arg(allow_hyphen_values = true)]
        base: String,
        #[arg(allow_hyphen_values = true)]
        v: String,
    },
}

#[derive(Subcommand, Debug)]
pub enum ConeOp {
    /// Interior dual covector vanishing on the subspace, if any.
    Dual {
        /// JSON cone, e.g. {"kind":"segment","u1":[1,0,0],"u2":[0,1,0]}.
        #[arg(long)]
        cone: String,
        /// JSON list of basis vectors.
        #[arg(long)]
        subspace: String,
    },
    /// Whether the cone meets the subspace only at the origin.
    Intersect {
        #[arg(long)]
        cone: String,
        #[arg(long)]
        subspace: String,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

/// Process exit status and rendered output of a command.
pub struct Rendered {
    pub code: i32,
    pub text: String,
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_MISMATCH: i32 = 2;
pub const EXIT_NOT_FOUND: i32 = 3;

/// Runs a parsed command and writes its output; returns the exit status.
pub fn run(cli: &Cli) -> Result<i32, CliError> {
    let Rendered { code, text } = execute(cli)?;
    match &cli.out {
        Some(path) => std::fs::write(path, &text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(code)
}

/// Runs a parsed command and renders its output.
pub fn execute(cli: &Cli) -> Result<Rendered, CliError> {
    match &cli.command {
        Command::Table { samples, seed, anti_norm } => table(*samples, *seed, *anti_norm, cli.format),
        Command::Check(args) => check(args, cli.format),
        Command::Sl2 { op } => sl2(op, cli.format),
        Command::Solve { case, target, steps, budget, seed, anti_norm } => {
            solve(case, target, *steps, *budget, *seed, *anti_norm, cli.format)
        }
        Command::Witness { case, length, base } => witness(case, *length, base.as_deref(), cli.format),
        Command::Cone { op } => cone(op, cli.format),
    }
}

fn json_text<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn parse_json<T: serde::de::DeserializeOwned>(what: &str, s: &str) -> Result<T, CliError> {
    serde_json::from_str(s).map_err(|e| CliError::Usage(format!("cannot parse {what}: {e}")))
}

fn outcome_name(o: Outcome) -> &'static str {
    match o {
        Outcome::Exists => "Exists",
        Outcome::InfiniteDistance => "InfiniteDistance",
        Outcome::Inconclusive => "Inconclusive",
    }
}

fn expected_outcome(t: Tabulated) -> Outcome {
    match t {
        Tabulated::Yes => Outcome::Exists,
        Tabulated::No => Outcome::InfiniteDistance,
        Tabulated::Blank => Outcome::Inconclusive,
    }
}

#[derive(Serialize)]
struct TableSample {
    params: CaseParams,
    outcome: Outcome,
    expected: Outcome,
    agrees: bool,
    rationale: existence::Rationale,
    /// `sup ν/p` for the witness `p` under the chosen anti-norm.
    #[serde(skip_serializing_if = "Option::is_none")]
    anti_norm_constant: Option<f64>,
}

#[derive(Serialize)]
struct TableRow {
    case: CaseId,
    algebra: &'static str,
    condition: &'static str,
    table_entry: &'static str,
    samples: Vec<TableSample>,
}

#[derive(Serialize)]
struct TableReport {
    anti_norm: String,
    seed: u64,
    samples_per_row: usize,
    rows: Vec<TableRow>,
    mismatches: usize,
}

fn table(samples: usize, seed: u64, anti_norm: AntiNormArg, format: Format) -> Result<Rendered, CliError> {
    if samples == 0 {
        return Err(CliError::Usage("--samples must be at least 1".into()));
    }
    let nu = anti_norm.build();
    let cone = SolidCone::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    let mut mismatches = 0;
    for id in CaseId::ALL {
        let mut out = Vec::new();
        for k in 0..samples {
            let case = cases::sample_case(id, k, &mut rng);
            let v = existence::check_case(&case, &cone).map_err(|e| CliError::Usage(e.to_string()))?.verdict;
            let expected = expected_outcome(case.tabulated());
            let agrees = v.outcome == expected;
            mismatches += usize::from(!agrees);
            out.push(TableSample {
                params: case.params().clone(),
                outcome: v.outcome,
                expected,
                agrees,
                rationale: v.rationale,
                anti_norm_constant: v.witness.map(|p| nu.sup_ratio(&cone, &p)),
            });
        }
        rows.push(TableRow {
            case: id,
            algebra: id.algebra_label(),
            condition: id.condition(),
            table_entry: cases::table_entry(id),
            samples: out,
        });
    }
    let report = TableReport { anti_norm: nu.name().to_string(), seed, samples_per_row: samples, rows, mismatches };
    let text = match format {
        Format::Json => json_text(&report),
        Format::Text => table_text(&report),
    };
    Ok(Rendered { code: if mismatches == 0 { EXIT_OK } else { EXIT_MISMATCH }, text })
}

fn params_text(p: &CaseParams) -> String {
    let mut s = format!("κ={:.4}", p.kappa);
    if let Some(t) = p.tau {
        s += &format!(" τ={t:.4}");
    }
    if let Some(x) = p.chi {
        s += &format!(" χ={x:.4}");
    }
    if p.pattern == HPattern::Second {
        s += " h#2";
    }
    if p.root == RootSign::Negative {
        s += " -√";
    }
    s
}

fn table_text(r: &TableReport) -> String {
    let mut s = String::new();
    s += &format!("{:<4} {:<44} {:<26} {:<18} {:<30} {:<17} {}\n", "row", "Lie algebra", "condition", "table", "parameters", "verdict", "agrees");
    for row in &r.rows {
        for (k, smp) in row.samples.iter().enumerate() {
            let (id, alg, cond, entry) = if k == 0 {
                (row.case.as_str(), row.algebra, row.condition, row.table_entry)
            } else {
                ("", "", "", "")
            };
            s += &format!(
                "{:<4} {:<44} {:<26} {:<18} {:<30} {:<17} {}\n",
                id,
                alg,
                cond,
                entry,
                params_text(&smp.params),
                outcome_name(smp.outcome),
                if smp.agrees { "yes" } else { "NO" }
            );
        }
    }
    s += &format!("anti-norm {}, seed {}, mismatches {}\n", r.anti_norm, r.seed, r.mismatches);
    s
}

fn check(args: &CaseArgs, format: Format) -> Result<Rendered, CliError> {
    let case = args.build()?;
    let v = existence::check_case(&case, &SolidCone::default()).map_err(|e| CliError::Usage(e.to_string()))?;
    let text = match format {
        Format::Json => json_text(&v),
        Format::Text => {
            let mut s = format!("case {} ({}): {}\n", v.case, params_text(&v.params), outcome_name(v.verdict.outcome));
            s += &format!("rationale: {}\n", serde_json::to_value(v.verdict.rationale).expect("enum").as_str().unwrap_or(""));
            if let Some(p) = v.verdict.witness {
                s += &format!("witness: ({}, {}, {})\n", p.0[0], p.0[1], p.0[2]);
            }
            if let Some(m) = v.verdict.killing_margin {
                s += &format!("max Killing form on cross-section: {m}\n");
            }
            if let Some(l) = v.verdict.closed_loop {
                s += &format!("closed timelike loop exp(t·{:?}), period {}\n", l.generator.as_slice(), l.period);
            }
            s
        }
    };
    Ok(Rendered { code: EXIT_OK, text })
}

fn sl2(op: &Sl2Op, format: Format) -> Result<Rendered, CliError> {
    let value: Value = match op {
        Sl2Op::Mul { a, b } => format::cover_json(&sl2cover::multiply(&parse_cover_element(a)?, &parse_cover_element(b)?)),
        Sl2Op::Inv { a } => format::cover_json(&sl2cover::inverse(&parse_cover_element(a)?)),
        Sl2Op::Project { a } => format::matrix_json(&sl2cover::project(&parse_cover_element(a)?)),
        Sl2Op::Push { base, v } => {
            format::tangent_json(&sl2cover::push_forward(&parse_cover_element(base)?, &parse_tangent(v)?))
        }
        Sl2Op::Tau { base, v } => {
            let base = parse_cover_element(base)?;
            let pushed = sl2cover::push_forward(&base, &parse_tangent(v)?);
            json!({ "tau": sl2cover::time_form(&base, &pushed) })
        }
    };
    let text = match format {
        Format::Json => json_text(&value),
        Format::Text => format::render_text(&value),
    };
    Ok(Rendered { code: EXIT_OK, text })
}

#[allow(clippy::too_many_arguments)]
fn solve(
    case: &CaseArgs,
    target: &str,
    steps: usize,
    budget: usize,
    seed: u64,
    anti_norm: AntiNormArg,
    format: Format,
) -> Result<Rendered, CliError> {
    let c = case.build()?;
    let cone = SolidCone::default();
    let structure = Structure::from_case(&c, cone, anti_norm.build()).map_err(|e| CliError::Usage(e.to_string()))?;
    let spec: TargetSpec = parse_json("target", target)?;
    let tgt = spec.resolve(&structure).map_err(|e| CliError::Usage(e.to_string()))?;
    let opts = SolveOptions { steps, budget, seed, ..Default::default() };
    let report = match longarc::maximize(&structure, &tgt, &opts) {
        Ok(r) => r,
        Err(LongArcError::InfiniteDistance) => {
            return Err(CliError::Usage(format!(
                "case {}: the distance to every attainable point is +∞ (closed timelike loops through every point); \
                 run `sublorentz witness --case {} ...` for curves of any demanded length",
                c.id(),
                c.id()
            )))
        }
        Err(e) => return Err(CliError::Usage(e.to_string())),
    };
    let code = if report.found { EXIT_OK } else { EXIT_NOT_FOUND };
    let out = json!({
        "case": c.id(),
        "params": c.params(),
        "anti_norm": structure.anti_norm.name(),
        "steps": steps,
        "budget": budget,
        "seed": seed,
        "target": tgt,
        "report": report,
    });
    let text = match format {
        Format::Json => json_text(&out),
        Format::Text => {
            let mut s = format!("case {} ({}), target {}\n", c.id(), params_text(c.params()), target);
            s += &format!("found: {}\n", report.found);
            if let Some(l) = report.length {
                s += &format!("best length: {l}\n");
            }
            if let Some(e) = report.endpoint_error {
                s += &format!("endpoint error: {e:e}\n");
            }
            match &report.upper_bound {
                Some(b) => {
                    s += &format!("upper bound: {}\n", b.value);
                    if let Some(g) = report.gap {
                        s += &format!("gap: {g}\n");
                    }
                }
                None => s += "upper bound: none (no time-orientation argument applies)\n",
            }
            s += &format!("iterations: {}, restarts: {}\n", report.iterations, report.restarts);
            s
        }
    };
    Ok(Rendered { code, text })
}

fn witness(case: &CaseArgs, length: f64, base: Option<&str>, format: Format) -> Result<Rendered, CliError> {
    let c = case.build()?;
    let structure =
        Structure::from_case(&c, SolidCone::default(), AntiNorm::Lorentzian).map_err(|e| CliError::Usage(e.to_string()))?;
    let base: ControlCurve = match base {
        Some(s) => parse_json("base curve", s)?,
        None => ControlCurve { dt: 1.0, controls: Vec::new() },
    };
    let curve = longarc::su2_unbounded_witness(&structure, &base, length).map_err(|e| CliError::Usage(e.to_string()))?;
    let map = |e: LongArcError| CliError::Usage(e.to_string());
    let target = longarc::integrate(&structure, &base).map_err(map)?.endpoint().clone();
    let end = longarc::integrate(&structure, &curve).map_err(map)?.endpoint().clone();
    let achieved = longarc::length(&curve, &structure.anti_norm, &structure.cone);
    let err = structure.model.distance(&end, &target);
    let out = json!({
        "case": c.id(),
        "params": c.params(),
        "demanded": length,
        "length": achieved,
        "endpoint_error": err,
        "steps": curve.controls.len(),
        "curve": curve,
    });
    let text = match format {
        Format::Json => json_text(&out),
        Format::Text => format!(
            "case {}: curve with {} steps, length {achieved} ≥ {length}, endpoint error {err:e}\n",
            c.id(),
            curve.controls.len()
        ),
    };
    Ok(Rendered { code: EXIT_OK, text })
}

fn cone(op: &ConeOp, format: Format) -> Result<Rendered, CliError> {
    let (cone_s, sub_s) = match op {
        ConeOp::Dual { cone, subspace } | ConeOp::Intersect { cone, subspace } => (cone, subspace),
    };
    let cone: SolidCone = parse_json("cone", cone_s)?;
    let basis: Vec<Vector3<f64>> = parse_json("subspace", sub_s)?;
    let out = match op {
        ConeOp::Dual { .. } => {
            let w: Option<Covector> =
                cone.find_interior_dual_in_annihilator(&basis).map_err(|e| CliError::Usage(e.to_string()))?;
            json!({ "witness": w })
        }
        ConeOp::Intersect { .. } => {
            let t = cone.cone_subspace_trivial(&basis).map_err(|e| CliError::Usage(e.to_string()))?;
            json!({ "trivial": t })
        }
    };
    let text = match format {
        Format::Json => json_text(&out),
        Format::Text => format::render_text(&out),
    };
    Ok(Rendered { code: EXIT_OK, text })
}
