//! `divrisk` command-line front end.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use divrisk::audit::{check, implication_matrix, AuditConfig, AuditReport, Property};
use divrisk::coupling::{couple, martingale_coupling, CouplingKind};
use divrisk::functionals::{catalog_entry, evaluate, parse_functional, parse_preference, Preference};
use divrisk::iterate::{conditional_symmetrization, dyadic_baseline, run_sequence, CouplingMode, IterationTrace};
use divrisk::scalar::parse_rational;
use divrisk::{concave_order_geq, increasing_convex_order_leq, DiscreteDist, JointDist, NumericMode, Rational, Scalar};

#[derive(Parser, Debug)]
#[command(name = "divrisk", version, about = "Diversification and risk-attitude audits on finite-support laws")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Arith {
    Exact,
    Float,
}

impl Arith {
    fn numeric(self) -> NumericMode {
        match self {
            Arith::Exact => NumericMode::ExactRational,
            Arith::Float => NumericMode::float(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Args, Debug)]
struct Common {
    /// Arithmetic backend.
    #[arg(long, value_enum, default_value = "exact")]
    mode: Arith,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OrderKind {
    /// X >=_cv Y
    Concave,
    /// X <=_icx Y
    Icx,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Kind {
    Comonotonic,
    Antimonotonic,
    Independent,
    Exchangeable,
    Martingale,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum StepMode {
    Antimonotonic,
    Independent,
}

impl From<StepMode> for CouplingMode {
    fn from(m: StepMode) -> Self {
        match m {
            StepMode::Antimonotonic => CouplingMode::Antimonotonic,
            StepMode::Independent => CouplingMode::Independent,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a functional on a distribution.
    Eval {
        /// Functional in the DSL, e.g. "mean - var*abs(2 - var)".
        #[arg(long)]
        spec: String,
        #[arg(long)]
        dist: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Compare two distributions in the concave (or increasing convex) order.
    Order {
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        y: PathBuf,
        #[arg(long, value_enum, default_value = "concave")]
        order: OrderKind,
        #[command(flatten)]
        common: Common,
    },
    /// Build a joint law with the given marginals.
    Couple {
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        y: PathBuf,
        #[arg(long, value_enum)]
        kind: Kind,
        /// Write the joint here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Search for a violation of one property.
    Audit {
        /// Preference in the DSL, e.g. "total(mean - var, higher)".
        #[arg(long, conflicts_with_all = ["catalog", "verify"], required_unless_present_any = ["catalog", "verify"])]
        pref: Option<String>,
        /// Name of a catalog preference.
        #[arg(long, conflicts_with = "verify")]
        catalog: Option<String>,
        /// e.g. weak_RA, strong_RS, div_AM&ID, anti_IN.
        #[arg(long, required_unless_present = "verify")]
        property: Option<String>,
        /// Re-check a saved audit report instead of searching.
        #[arg(long, conflicts_with = "property")]
        verify: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 500)]
        budget: usize,
        /// Comma-separated weights; must contain 0, 1/2 and 1.
        #[arg(long)]
        lambda_grid: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Symmetrization sequence of a law, or conditional symmetrization of a
    /// martingale joint.
    Iterate {
        #[arg(long, conflicts_with = "joint", required_unless_present = "joint")]
        dist: Option<PathBuf>,
        #[arg(long)]
        joint: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "antimonotonic")]
        mode: StepMode,
        #[arg(long, default_value_t = 10)]
        steps: usize,
        /// Exponent of the reported L^p distance.
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        /// Include the law of every step.
        #[arg(long)]
        with_dist: bool,
        /// Arithmetic backend (`--mode` selects the coupling here).
        #[arg(long, value_enum, default_value = "exact")]
        numeric: Arith,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Dyadic i.i.d. averages, each compared with the NQD iterate.
    Lln {
        #[arg(long)]
        dist: PathBuf,
        /// Coupling of the iterate compared against the baseline.
        #[arg(long, value_enum, default_value = "antimonotonic")]
        mode: StepMode,
        #[arg(long, default_value_t = 6)]
        steps: usize,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long)]
        with_dist: bool,
        #[arg(long, value_enum, default_value = "exact")]
        numeric: Arith,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Run every property for every catalog preference.
    Matrix {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 500)]
        budget: usize,
        #[command(flatten)]
        common: Common,
    },
}

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_dist<S: Scalar>(path: &Path) -> Result<DiscreteDist<S>, String> {
    DiscreteDist::from_json_str(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_joint<S: Scalar>(path: &Path) -> Result<JointDist<S>, String> {
    JointDist::from_json_str(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

fn eval_cmd<S: Scalar>(spec: &str, dist: &Path, format: Format) -> Result<String, String> {
    let f = parse_functional(spec).map_err(|e| format!("--spec: {e}"))?;
    let d = load_dist::<S>(dist)?;
    let v = evaluate(&f, &d).map_err(|e| e.to_string())?;
    Ok(match format {
        Format::Table => format!("{v}\n"),
        Format::Json => format!("{}\n", json!({"functional": f.to_string(), "value": v, "exact": v.is_exact()})),
    })
}

fn order_cmd<S: Scalar>(x: &Path, y: &Path, order: OrderKind, format: Format) -> Result<String, String> {
    let dx = load_dist::<S>(x)?;
    let dy = load_dist::<S>(y)?;
    let (relation, witness) = match order {
        OrderKind::Concave => {
            let v = concave_order_geq(&dx, &dy);
            (v.relation.to_string(), v.witness.map(|w| w.to_value().to_string()))
        }
        OrderKind::Icx => {
            let leq = increasing_convex_order_leq(&dx, &dy);
            ((if leq { "leq" } else { "not_leq" }).to_string(), None)
        }
    };
    Ok(match format {
        Format::Table => match witness {
            Some(w) => format!("{relation} (witness {w})\n"),
            None => format!("{relation}\n"),
        },
        Format::Json => format!("{}\n", json!({"relation": relation, "witness": witness})),
    })
}

fn couple_cmd<S: Scalar>(x: &Path, y: &Path, kind: Kind, out: Option<&Path>) -> Result<String, String> {
    let dx = load_dist::<S>(x)?;
    let dy = load_dist::<S>(y)?;
    let joint = match kind {
        Kind::Comonotonic => couple(CouplingKind::Comonotonic, &dx, &dy),
        Kind::Antimonotonic => couple(CouplingKind::Antimonotonic, &dx, &dy),
        Kind::Independent => couple(CouplingKind::Independent, &dx, &dy),
        Kind::Exchangeable => couple(CouplingKind::ExchangeableSymmetrized, &dx, &dy),
        Kind::Martingale => martingale_coupling(&dx, &dy).map_err(|e| format!("no martingale coupling: {e}"))?,
    };
    let text = joint.to_json_string();
    match out {
        Some(path) => {
            fs::write(path, format!("{text}\n")).map_err(|e| format!("{}: {e}", path.display()))?;
            Ok(String::new())
        }
        None => Ok(format!("{text}\n")),
    }
}

fn parse_grid(text: &str) -> Result<Vec<Rational>, String> {
    text.split(',')
        .map(|s| parse_rational(s.trim()).map_err(|e| format!("--lambda-grid: {e}")))
        .collect()
}

fn load_preference(pref: Option<&str>, catalog: Option<&str>) -> Result<Preference, String> {
    match (pref, catalog) {
        (Some(p), _) => parse_preference(p).map_err(|e| format!("--pref: {e}")),
        (None, Some(name)) => catalog_entry(name)
            .map(|e| e.preference)
            .ok_or_else(|| format!("--catalog: no catalog preference named {name:?}")),
        (None, None) => Err("one of --pref or --catalog is required".into()),
    }
}

fn report_out(report: &AuditReport, format: Format) -> String {
    match format {
        Format::Json => format!("{}\n", report.to_json_string()),
        Format::Table => report.render_table(),
    }
}

fn trace_table<S: Scalar>(trace: &IterationTrace<S>) -> String {
    let mut out = format!("{:>4} {:>24} {:>24} {:>14}\n", "n", "R", "sup_distance", "lp_distance");
    for s in &trace.steps {
        out.push_str(&format!(
            "{:>4} {:>24} {:>24} {:>14.6e}\n",
            s.n,
            s.range_width.to_value().to_string(),
            s.sup_distance.to_value().to_string(),
            s.lp_distance
        ));
    }
    out
}

fn iterate_cmd<S: Scalar>(
    dist: Option<&Path>,
    joint: Option<&Path>,
    mode: StepMode,
    steps: usize,
    p: f64,
    with_dist: bool,
    format: Format,
) -> Result<String, String> {
    if let Some(path) = joint {
        let j = load_joint::<S>(path)?;
        let trace = conditional_symmetrization(&j, steps).map_err(|e| format!("{}: {e}", path.display()))?;
        let mut out = String::new();
        if format == Format::Table {
            out.push_str(&format!("{:>4} {:>24} {:>24}\n", "n", "max_cond_range", "sup_distance"));
        }
        for s in &trace {
            match format {
                Format::Table => out.push_str(&format!(
                    "{:>4} {:>24} {:>24}\n",
                    s.n,
                    s.max_conditional_range.to_value().to_string(),
                    s.sup_distance.to_value().to_string()
                )),
                Format::Json => {
                    let mut rec = json!({
                        "n": s.n,
                        "max_conditional_range": s.max_conditional_range.to_literal(),
                        "sup_distance": s.sup_distance.to_literal(),
                    });
                    if with_dist {
                        rec["dist"] = serde_json::to_value(s.y_law.to_json()).expect("dist serializes");
                    }
                    out.push_str(&format!("{rec}\n"));
                }
            }
        }
        return Ok(out);
    }
    let path = dist.ok_or("one of --dist or --joint is required")?;
    let d = load_dist::<S>(path)?;
    let trace = run_sequence(&d, mode.into(), steps, p).map_err(|e| e.to_string())?;
    Ok(match format {
        Format::Json => trace.to_json_lines(with_dist),
        Format::Table => trace_table(&trace),
    })
}

fn lln_cmd<S: Scalar>(
    dist: &Path,
    mode: StepMode,
    steps: usize,
    p: f64,
    with_dist: bool,
    format: Format,
) -> Result<String, String> {
    let d = load_dist::<S>(dist)?;
    let baseline = dyadic_baseline(&d, steps, p).map_err(|e| e.to_string())?;
    let iterate = run_sequence(&d, mode.into(), steps, p).map_err(|e| e.to_string())?;
    let dominates: Vec<bool> = baseline
        .steps
        .iter()
        .zip(&iterate.steps)
        .map(|(b, x)| concave_order_geq(&x.dist, &b.dist).is_geq())
        .collect();
    Ok(match format {
        Format::Table => {
            let mut out = trace_table(&baseline);
            for (n, ok) in dominates.iter().enumerate() {
                out.push_str(&format!("step {n}: iterate >=_cv baseline: {ok}\n"));
            }
            out
        }
        Format::Json => {
            let mut out = String::new();
            for (line, ok) in baseline.to_json_lines(with_dist).lines().zip(&dominates) {
                let mut rec: serde_json::Value = serde_json::from_str(line).expect("trace lines are JSON");
                rec["iterate_geq_cv"] = json!(ok);
                out.push_str(&format!("{rec}\n"));
            }
            out
        }
    })
}

fn run(cli: Cli) -> Result<String, String> {
    match cli.command {
        Command::Eval { spec, dist, common } => match common.mode {
            Arith::Exact => eval_cmd::<Rational>(&spec, &dist, common.format),
            Arith::Float => eval_cmd::<f64>(&spec, &dist, common.format),
        },
        Command::Order { x, y, order, common } => match common.mode {
            Arith::Exact => order_cmd::<Rational>(&x, &y, order, common.format),
            Arith::Float => order_cmd::<f64>(&x, &y, order, common.format),
        },
        Command::Couple { x, y, kind, out, common } => match common.mode {
            Arith::Exact => couple_cmd::<Rational>(&x, &y, kind, out.as_deref()),
            Arith::Float => couple_cmd::<f64>(&x, &y, kind, out.as_deref()),
        },
        Command::Audit { pref, catalog, property, verify, seed, budget, lambda_grid, common } => {
            if let Some(path) = verify {
                let report: AuditReport =
                    serde_json::from_str(&read(&path)?).map_err(|e| format!("{}: {e}", path.display()))?;
                report.verify().map_err(|e| format!("{}: certificate rejected: {e}", path.display()))?;
                return Ok(format!("verified: {} {}\n", report.property, report.verdict));
            }
            let preference = load_preference(pref.as_deref(), catalog.as_deref())?;
            let property: Property = property
                .as_deref()
                .ok_or("--property is required")?
                .parse()
                .map_err(|e| format!("--property: {e}"))?;
            let mut cfg = AuditConfig { seed, pair_budget: budget, mode: common.mode.numeric(), ..Default::default() };
            if let Some(g) = lambda_grid {
                cfg.lambda_grid = parse_grid(&g)?;
            }
            cfg.validate()?;
            Ok(report_out(&check(&preference, property, &cfg), common.format))
        }
        Command::Iterate { dist, joint, mode, steps, p, with_dist, numeric, format } => match numeric {
            Arith::Exact => iterate_cmd::<Rational>(dist.as_deref(), joint.as_deref(), mode, steps, p, with_dist, format),
            Arith::Float => iterate_cmd::<f64>(dist.as_deref(), joint.as_deref(), mode, steps, p, with_dist, format),
        },
        Command::Lln { dist, mode, steps, p, with_dist, numeric, format } => match numeric {
            Arith::Exact => lln_cmd::<Rational>(&dist, mode, steps, p, with_dist, format),
            Arith::Float => lln_cmd::<f64>(&dist, mode, steps, p, with_dist, format),
        },
        Command::Matrix { seed, budget, common } => {
            let cfg = AuditConfig { seed, pair_budget: budget, mode: common.mode.numeric(), ..Default::default() };
            cfg.validate()?;
            let m = implication_matrix(&cfg);
            Ok(match common.format {
                Format::Json => format!("{}\n", m.to_json_string()),
                Format::Table => m.render_table(),
            })
        }
    }
}

fn main() -> ExitCode {
    // clap exits with status 2 on usage errors
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use divrisk::audit::PairClass;
    use divrisk::scalar::format_rational;

    #[test]
    fn parses_documented_invocations() {
        let cli = Cli::try_parse_from(["divrisk", "eval", "--spec", "mean - var*abs(2 - var)", "--dist", "d.json"]).unwrap();
        assert!(matches!(cli.command, Command::Eval { common: Common { mode: Arith::Exact, .. }, .. }));
        let cli = Cli::try_parse_from(["divrisk", "matrix", "--seed", "7", "--budget", "500"]).unwrap();
        assert!(matches!(cli.command, Command::Matrix { seed: 7, budget: 500, .. }));
        let cli = Cli::try_parse_from(["divrisk", "order", "--x", "x.json", "--y", "y.json"]).unwrap();
        assert!(matches!(cli.command, Command::Order { order: OrderKind::Concave, .. }));
    }

    #[test]
    fn rejects_conflicts_and_unknown_flags() {
        let err = Cli::try_parse_from(["divrisk", "audit", "--pref", "total(mean, higher)", "--catalog", "EssSup", "--property", "weak_RA"]).unwrap_err();
        assert!(err.to_string().contains("--catalog"));
        assert!(Cli::try_parse_from(["divrisk", "eval", "--spec", "mean", "--dist", "d.json", "--bogus"]).is_err());
        assert!(Cli::try_parse_from(["divrisk"]).is_err());
    }

    #[test]
    fn grid_parsing() {
        let g = parse_grid("0, 1/2, 1").unwrap();
        assert_eq!(g.iter().map(format_rational).collect::<Vec<_>>(), ["0", "1/2", "1"]);
        assert!(parse_grid("0,x").is_err());
    }

    #[test]
    fn unknown_pair_class_is_reported() {
        assert!("div_XX".parse::<Property>().is_err());
        assert!("AM&ID".parse::<PairClass>().is_ok());
    }
}
