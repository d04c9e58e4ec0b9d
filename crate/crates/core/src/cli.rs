//! Command-line front end. Every command writes JSON by default; `csv` and
//! `dot` are accepted where they make sense.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::ToPrimitive;
use serde::Serialize;
use serde_json::{json, Value};

use crate::algebra::{property_suite, Algebra, AlgebraElement, TriangleEstimate, WeightRegime};
use crate::cohomology::{distributions, limit_rank, ClassTower};
use crate::diagram::validate;
use crate::error::{Error, Result};
use crate::function::CylinderFunction;
use crate::io::{
    element_from_json, function_from_json, function_to_json, function_to_json_f64, load_diagram, rational_json,
};
use crate::martingale::{decompose, weighted_norms, BumpProfile};
use crate::measures::{condition1_report, renorm_data, tail_measure};
use crate::scalar::{format_rational, Scalar};
use crate::solenoid::{build_complex, wrapping};
use crate::solver::{birkhoff, regularity_report, solve};
use crate::space::PathSpace;
use crate::{builtin, DiagramSpec, LazyPath, OrderedDiagram, Rational, Tail};

#[derive(Parser, Debug)]
#[command(name = "bratteli", version, about = "Vershik maps on ordered Bratteli diagrams")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Emit {
    Json,
    Csv,
    Dot,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum TailArg {
    Min,
    Max,
}

/// Weight regime of the algebra; `auto` follows the `△_φ` estimate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum RegimeArg {
    Auto,
    Exponential,
    Polynomial,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Builtin name (odo2, odo3, fib, pisot31) or a diagram JSON file.
    #[arg(long, default_value = "odo2")]
    diagram: String,
    #[arg(long, value_enum, default_value_t = Emit::Json)]
    emit: Emit,
}

#[derive(Args, Debug, Clone)]
struct TowerArgs {
    /// Last level searched for rank stabilization.
    #[arg(long, default_value_t = 5)]
    max_level: usize,
    /// Consecutive equal ranks required for non-stationary diagrams.
    #[arg(long, default_value_t = 3)]
    window: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check diagram invariants, properness and strong minimality.
    Validate {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 12)]
        horizon: usize,
    },
    /// List E_{m,n} (or E_v with --target) in lexicographic order.
    Paths {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 3)]
        level: usize,
        #[arg(long, default_value_t = 0)]
        from: usize,
        #[arg(long)]
        target: Option<usize>,
    },
    /// Iterate the Vershik map from a prefix with a minimal or maximal tail.
    Orbit {
        #[command(flatten)]
        common: Common,
        /// Comma-separated edge indices, level 1 first.
        #[arg(long, default_value = "")]
        prefix: String,
        #[arg(long, value_enum, default_value_t = TailArg::Min)]
        tail: TailArg,
        /// Prefix length shown for each point.
        #[arg(long, default_value_t = 4)]
        level: usize,
        #[arg(short = 'N', long = "steps", default_value_t = 16)]
        n: u64,
    },
    /// Tail-invariant measure vectors and the cone certificate.
    Measure {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 12)]
        horizon: usize,
    },
    /// Perron multiplier, roof vector and vertex growth.
    Lyapunov {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 12)]
        horizon: usize,
    },
    /// The graph Γ^k with its gluing classes and wrapping words.
    Complex {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0)]
        level: usize,
    },
    /// Martingale components of a cylinder function with bump norms.
    Decompose {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        function: PathBuf,
        #[arg(long, default_value_t = 3.0)]
        alpha: f64,
        #[arg(long, default_value_t = 0.25)]
        eps: f64,
        /// Smoothness of the bumpified components (at most 3).
        #[arg(long, default_value_t = 1)]
        smoothness: usize,
    },
    /// Rank tower of the induced maps and the number d of obstructions.
    #[command(alias = "coho")]
    Cohomology {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        tower: TowerArgs,
    },
    /// Invariant distributions D_1..D_d of a cylinder function.
    Distributions {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        function: PathBuf,
        #[command(flatten)]
        tower: TowerArgs,
    },
    /// Solve g∘φ - g = h when every obstruction vanishes.
    Solve {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        function: PathBuf,
        #[arg(long, default_value_t = 3.0)]
        alpha: f64,
        #[arg(long, default_value_t = 0.25)]
        eps: f64,
        #[command(flatten)]
        tower: TowerArgs,
    },
    /// Birkhoff sums along one orbit.
    Birkhoff {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        function: PathBuf,
        #[arg(long, default_value = "")]
        prefix: String,
        #[arg(long, value_enum, default_value_t = TailArg::Min)]
        tail: TailArg,
        #[arg(short = 'N', long = "steps", default_value_t = 100_000)]
        n: u64,
    },
    /// Crossed-product algebra: property suite and Neumann inversion.
    Algebra {
        #[command(subcommand)]
        action: AlgebraCommand,
    },
}

#[derive(Subcommand, Debug)]
enum AlgebraCommand {
    /// Random-element checks of the algebra identities and inequalities.
    Check {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        /// Level of the △_φ estimate.
        #[arg(long, default_value_t = 4)]
        level: usize,
        #[arg(long, value_enum, default_value_t = RegimeArg::Auto)]
        regime: RegimeArg,
        #[command(flatten)]
        tower: TowerArgs,
    },
    /// Neumann-series inverse of an element.
    Invert {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        element: PathBuf,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value_t = 200)]
        max_terms: usize,
        #[arg(long, default_value_t = 4)]
        level: usize,
        #[arg(long, value_enum, default_value_t = RegimeArg::Auto)]
        regime: RegimeArg,
    },
}

/// Parses `args` (program name first), runs, prints, and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(text) => {
            print!("{text}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Runs a command line and returns what would be printed.
pub fn run<I, T>(args: I) -> Result<String>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| Error::Parse(e.to_string()))?;
    execute(cli)
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Invalid(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn unsupported(emit: Emit, command: &str) -> Error {
    Error::Parse(format!("--emit {emit:?} is not available for {command}").to_lowercase())
}

fn parse_prefix(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| Error::Parse(format!("bad edge index '{s}'"))))
        .collect()
}

fn start_path(d: &OrderedDiagram, prefix: &str, tail: TailArg) -> Result<LazyPath> {
    let tail = match tail {
        TailArg::Min => Tail::Min,
        TailArg::Max => Tail::Max,
    };
    let p = LazyPath::new(parse_prefix(prefix)?, tail);
    d.check_path(&p)?;
    Ok(p)
}

fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn declared_level(v: &Value) -> Result<usize> {
    v.get("level")
        .and_then(Value::as_u64)
        .map(|l| l as usize)
        .ok_or_else(|| Error::Parse("function needs an integer \"level\"".into()))
}

/// Tower and a path space deep enough to read the class of a level-`m`
/// function and to compose the solution with `φ`.
fn space_and_tower(d: OrderedDiagram, m: usize, args: &TowerArgs) -> Result<(PathSpace, ClassTower)> {
    let probe = tail_measure(&d, m.max(1))?;
    let renorm = renorm_data(&d, &probe)?;
    let tower = limit_rank(&d, &renorm, args.max_level, args.window)?;
    let need = tower.evaluation_level(m)?.max(m) + 2;
    let space = PathSpace::new(d, need)?;
    Ok((space, tower))
}

fn execute(cli: Cli) -> Result<String> {
    match cli.command {
        Command::Validate { common, horizon } => cmd_validate(&common, horizon),
        Command::Paths { common, level, from, target } => cmd_paths(&common, from, level, target),
        Command::Orbit { common, prefix, tail, level, n } => cmd_orbit(&common, &prefix, tail, level, n),
        Command::Measure { common, horizon } => cmd_measure(&common, horizon),
        Command::Lyapunov { common, horizon } => cmd_lyapunov(&common, horizon),
        Command::Complex { common, level } => cmd_complex(&common, level),
        Command::Decompose { common, function, alpha, eps, smoothness } => {
            cmd_decompose(&common, &function, alpha, eps, smoothness)
        }
        Command::Cohomology { common, tower } => cmd_cohomology(&common, &tower),
        Command::Distributions { common, function, tower } => cmd_distributions(&common, &function, &tower),
        Command::Solve { common, function, alpha, eps, tower } => cmd_solve(&common, &function, alpha, eps, &tower),
        Command::Birkhoff { common, function, prefix, tail, n } => cmd_birkhoff(&common, &function, &prefix, tail, n),
        Command::Algebra { action } => match action {
            AlgebraCommand::Check { common, seed, trials, alpha, level, regime, tower } => {
                cmd_algebra_check(&common, seed, trials, alpha, level, regime, &tower)
            }
            AlgebraCommand::Invert { common, element, tol, max_terms, level, regime } => {
                cmd_algebra_invert(&common, &element, tol, max_terms, level, regime)
            }
        },
    }
}

fn cmd_validate(common: &Common, horizon: usize) -> Result<String> {
    if common.emit != Emit::Json {
        return Err(unsupported(common.emit, "validate"));
    }
    let spec: DiagramSpec = if builtin::NAMES.contains(&common.diagram.as_str()) {
        builtin::by_name(&common.diagram)?.spec()
    } else {
        let text = std::fs::read_to_string(&common.diagram)
            .map_err(|e| Error::Parse(format!("{}: {e}", common.diagram)))?;
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", common.diagram)))?
    };
    let diagnostics = validate(&spec);
    if !diagnostics.is_empty() {
        return Err(Error::InvalidDiagram(diagnostics));
    }
    let d = OrderedDiagram::new(spec)?;
    let extremes = d.extreme_paths(horizon)?;
    to_json(&json!({
        "valid": true,
        "diagnostics": Vec::<String>::new(),
        "stationary": d.is_stationary(),
        "period": d.period(),
        "materialized": d.materialized(),
        "properly_ordered": d.is_properly_ordered(),
        "strongly_minimal": d.is_strongly_minimal(horizon),
        "extreme_paths": extremes,
    }))
}

fn cmd_paths(common: &Common, from: usize, level: usize, target: Option<usize>) -> Result<String> {
    let d = load_diagram(&common.diagram)?;
    let paths = d.enumerate_paths(from, level, target)?;
    match common.emit {
        Emit::Json => to_json(&json!({ "from": from, "level": level, "count": paths.len(), "paths": paths })),
        Emit::Csv => {
            let mut out = String::from("index,start,edges\n");
            for (i, p) in paths.iter().enumerate() {
                let edges: Vec<String> = p.edges.iter().map(ToString::to_string).collect();
                let _ = writeln!(out, "{i},{},{}", p.start, edges.join(" "));
            }
            Ok(out)
        }
        Emit::Dot => Err(unsupported(common.emit, "paths")),
    }
}

fn cmd_orbit(common: &Common, prefix: &str, tail: TailArg, level: usize, n: u64) -> Result<String> {
    let d = load_diagram(&common.diagram)?;
    let mut x = start_path(&d, prefix, tail)?;
    let shown = level.max(x.prefix.len());
    let mut rows = Vec::new();
    for step in 0..=n {
        rows.push((step, d.prefix_of(&x, shown)?));
        if step < n {
            x = d.successor(&x)?;
        }
    }
    match common.emit {
        Emit::Json => {
            let points: Vec<Value> = rows.iter().map(|(s, p)| json!({ "step": s, "prefix": p })).collect();
            to_json(&json!({ "level": shown, "orbit": points }))
        }
        Emit::Csv => {
            let mut out = String::from("step,edges\n");
            for (s, p) in rows {
                let edges: Vec<String> = p.iter().map(ToString::to_string).collect();
                let _ = writeln!(out, "{s},{}", edges.join(" "));
            }
            Ok(out)
        }
        Emit::Dot => Err(unsupported(common.emit, "orbit")),
    }
}

fn cmd_measure(common: &Common, horizon: usize) -> Result<String> {
    let d = load_diagram(&common.diagram)?;
    let m = tail_measure(&d, horizon)?;
    match common.emit {
        Emit::Json => {
            let exact: Vec<Vec<Value>> =
                (0..=m.horizon()).map(|k| m.level(k).map(|v| v.iter().map(rational_json).collect())).collect::<Result<_>>()?;
            let approx: Vec<Vec<f64>> = (0..=m.horizon()).map(|k| m.level_f64(k)).collect::<Result<_>>()?;
            to_json(&json!({
                "horizon": m.horizon(),
                "cone_diameter": m.cone_diameter,
                "certified_at": m.certified_at,
                "xi": exact,
                "xi_f64": approx,
            }))
        }
        Emit::Csv => {
            let mut out = String::from("level,vertex,xi\n");
            for k in 0..=m.horizon() {
                for (v, x) in m.level_f64(k)?.iter().enumerate() {
                    let _ = writeln!(out, "{k},{v},{}", json!(x));
                }
            }
            Ok(out)
        }
        Emit::Dot => Err(unsupported(common.emit, "measure")),
    }
}

fn cmd_lyapunov(common: &Common, horizon: usize) -> Result<String> {
    if common.emit != Emit::Json {
        return Err(unsupported(common.emit, "lyapunov"));
    }
    let d = load_diagram(&common.diagram)?;
    let m = tail_measure(&d, horizon)?;
    let renorm = renorm_data(&d, &m)?;
    let growth = condition1_report(&d, horizon)?;
    to_json(&json!({
        "lambda_mu": renorm.lambda_mu,
        "exponent": renorm.exponent,
        "roof": renorm.roof,
        "roof_residual": renorm.roof_residual,
        "vertex_growth": growth,
    }))
}

fn cmd_complex(common: &Common, level: usize) -> Result<String> {
    let d = load_diagram(&common.diagram)?;
    let m = tail_measure(&d, level.max(1))?;
    let renorm = renorm_data(&d, &m)?;
    let c = build_complex(&d, &renorm, level)?;
    match common.emit {
        Emit::Dot => Ok(c.to_dot()),
        Emit::Json => {
            let wrap = if level >= 1 { Some(wrapping(&d, &renorm, level)?) } else { None };
            to_json(&json!({ "complex": c, "betti1": c.betti1(), "wrapping": wrap }))
        }
        Emit::Csv => {
            let mut out = String::from("edge,minus_class,plus_class,length\n");
            for v in 0..c.num_edges() {
                let (a, b) = c.ends(v);
                let _ = writeln!(out, "{v},{a},{b},{}", json!(c.lengths[v]));
            }
            Ok(out)
        }
    }
}

fn load_function_for(common: &Common, path: &Path, extra: usize) -> Result<(PathSpace, CylinderFunction<Rational>)> {
    let v = read_json(path)?;
    let m = declared_level(&v)?;
    let space = PathSpace::new(load_diagram(&common.diagram)?, m.max(1) + extra)?;
    let h = function_from_json(&space, &v)?;
    Ok((space, h))
}

fn cmd_decompose(common: &Common, path: &Path, alpha: f64, eps: f64, r: usize) -> Result<String> {
    let (space, h) = load_function_for(common, path, 0)?;
    let bump = BumpProfile::for_space(&space);
    let comps = decompose(&space, &h, r, &bump)?;
    let norms = weighted_norms(&comps, alpha, eps, space.lambda());
    let mut total = CylinderFunction::zero(&space);
    let mut exact = Vec::new();
    for k in 0..=h.level() {
        let dk = crate::martingale::delta(&space, &h, k)?;
        total = total.add(&space, &dk)?;
        exact.push(function_to_json(&dk));
    }
    let reconstructs = total.same_function(&space, &h)?;
    match common.emit {
        Emit::Json => to_json(&json!({
            "lambda": space.lambda(),
            "bump": bump,
            "components": comps,
            "weighted_norms": norms,
            "deltas": exact,
            "reconstructs": reconstructs,
        })),
        Emit::Csv => {
            let mut out = String::from("level,amplitude,cr_norm\n");
            for c in &comps {
                let _ = writeln!(out, "{},{},{}", c.level, json!(c.amplitude), json!(c.cr_norm));
            }
            Ok(out)
        }
        Emit::Dot => Err(unsupported(common.emit, "decompose")),
    }
}

fn cmd_cohomology(common: &Common, args: &TowerArgs) -> Result<String> {
    if common.emit != Emit::Json {
        return Err(unsupported(common.emit, "cohomology"));
    }
    let d = load_diagram(&common.diagram)?;
    let m = tail_measure(&d, 1)?;
    let renorm = renorm_data(&d, &m)?;
    let tower = limit_rank(&d, &renorm, args.max_level, args.window)?;
    to_json(&tower.summary())
}

fn cmd_distributions(common: &Common, path: &Path, args: &TowerArgs) -> Result<String> {
    if common.emit != Emit::Json {
        return Err(unsupported(common.emit, "distributions"));
    }
    let v = read_json(path)?;
    let (space, tower) = space_and_tower(load_diagram(&common.diagram)?, declared_level(&v)?, args)?;
    let h = function_from_json(&space, &v)?;
    let dv = distributions(&space, &h, &tower)?;
    let approx: Vec<f64> = dv.values.iter().map(Scalar::to_real).collect();
    to_json(&json!({ "d": tower.d, "level": dv.level, "values": dv, "values_f64": approx, "coboundary": dv.all_zero() }))
}

fn cmd_solve(common: &Common, path: &Path, alpha: f64, eps: f64, args: &TowerArgs) -> Result<String> {
    if common.emit != Emit::Json {
        return Err(unsupported(common.emit, "solve"));
    }
    let v = read_json(path)?;
    let (space, tower) = space_and_tower(load_diagram(&common.diagram)?, declared_level(&v)?, args)?;
    let h = function_from_json(&space, &v)?;
    let sol = solve(&space, &h, &tower)?;
    let rows = regularity_report(&space, &h, &sol.g, alpha, &[eps])?;
    let row = &rows[0];
    to_json(&json!({
        "coboundary": true,
        "level": sol.level,
        "residual": format_rational(&sol.residual),
        "g": function_to_json(&sol.g),
        "g_f64": function_to_json_f64(&sol.g),
        "norms": {
            "h_alpha": row.h_norm,
            "g_alpha_minus_2_minus_eps": row.g_norm,
            "k": row.empirical_k,
        },
        "regularity": rows,
    }))
}

fn cmd_birkhoff(common: &Common, path: &Path, prefix: &str, tail: TailArg, n: u64) -> Result<String> {
    let (space, h) = load_function_for(common, path, 0)?;
    let start = start_path(&space.diagram, prefix, tail)?;
    let report = birkhoff(&space, &h, &start, n)?;
    match common.emit {
        Emit::Json => to_json(&report),
        Emit::Csv => {
            let mut out = String::from("n,S_n\n");
            for (k, s) in &report.checkpoints {
                let _ = writeln!(out, "{k},{}", json!(s));
            }
            Ok(out)
        }
        Emit::Dot => Err(unsupported(common.emit, "birkhoff")),
    }
}

/// Deepest level up to `wanted` with at most 2^16 paths.
fn algebra_depth(d: &OrderedDiagram, wanted: usize) -> usize {
    let total = |k: usize| -> u64 {
        crate::measures::path_counts(d, k)
            .map(|c| c.iter().map(|x| x.to_u64().unwrap_or(u64::MAX)).fold(0, u64::saturating_add))
            .unwrap_or(u64::MAX)
    };
    let mut depth = 1;
    while depth < wanted && total(depth + 1) <= 1 << 16 {
        depth += 1;
    }
    depth
}

fn algebra<'a>(space: &'a PathSpace, alpha: f64, level: usize, regime: RegimeArg) -> Result<(Algebra<'a>, TriangleEstimate)> {
    let (mut alg, triangle) = Algebra::estimated(space, alpha, level.min(space.depth()))?;
    alg.level_cap = space.depth();
    match regime {
        RegimeArg::Auto => {}
        RegimeArg::Exponential => alg.regime = WeightRegime::Exponential(triangle.value.max(1.0)),
        RegimeArg::Polynomial => alg.regime = WeightRegime::Polynomial,
    }
    Ok((alg, triangle))
}

fn cmd_algebra_check(
    common: &Common,
    seed: u64,
    trials: usize,
    alpha: f64,
    level: usize,
    regime: RegimeArg,
    args: &TowerArgs,
) -> Result<String> {
    if common.emit != Emit::Json {
        return Err(unsupported(common.emit, "algebra check"));
    }
    let d = load_diagram(&common.diagram)?;
    let depth = algebra_depth(&d, 16);
    let space = PathSpace::new(d, depth)?;
    let tower = limit_rank(&space.diagram, &space.renorm, args.max_level, args.window)?;
    let (alg, triangle) = algebra(&space, alpha, level, regime)?;
    let report = property_suite(&alg, Some(&tower), seed, trials)?;
    let passed = report.all_passed();
    let text = to_json(&json!({ "triangle": triangle, "depth": depth, "report": report, "all_passed": passed }))?;
    if passed {
        Ok(text)
    } else {
        print!("{text}");
        Err(Error::Invalid("algebra property failures".into()))
    }
}

fn cmd_algebra_invert(common: &Common, path: &Path, tol: f64, max_terms: usize, level: usize, regime: RegimeArg) -> Result<String> {
    if common.emit != Emit::Json {
        return Err(unsupported(common.emit, "algebra invert"));
    }
    let v = read_json(path)?;
    let d = load_diagram(&common.diagram)?;
    let depth = algebra_depth(&d, 16);
    let space = PathSpace::new(d, depth)?;
    let (alpha, coeffs) = element_from_json(&space, &v, path.parent())?;
    let (alg, triangle) = algebra(&space, alpha, level, regime)?;
    let h: AlgebraElement<f64> = AlgebraElement::from_map(
        coeffs.iter().map(|(&k, f)| (k, crate::function::convert::<f64>(f))).collect(),
    );
    let res = alg.neumann_invert(&h, tol, max_terms)?;
    let inverse: serde_json::Map<String, Value> =
        res.inverse.coeffs.iter().map(|(k, f)| (k.to_string(), function_to_json_f64(f))).collect();
    let mu: Vec<f64> = [1.0, 2.0, 4.0].iter().map(|&q| alg.mu_q(&res.inverse, q)).collect();
    to_json(&json!({
        "alpha": alpha,
        "triangle": triangle,
        "f_norm": res.f_norm,
        "terms": res.terms,
        "residual": res.residual + 0.0,
        "tail_bound": res.tail_bound,
        "mu_q": { "1": mu[0], "2": mu[1], "4": mu[2] },
        "inverse": inverse,
    }))
}
