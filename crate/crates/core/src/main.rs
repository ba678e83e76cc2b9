use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use naetree::analysis::{
    dp_m_large, dp_m_small, estimate_psi, f_large, f_small, global_bound_check, n_of_u0,
    small_regime, verify_bound_claims, Grid, ProfileParams,
};
use naetree::error::{AnalysisError, CnfError, GenError, OracleError, SearchError};
use naetree::generators::{GenFamily, GenSpec};
use naetree::oracle::{brute_force, compare, nae_solutions_direct, verify_enumeration};
use naetree::search::{DEFAULT_ORDERING_BUDGET, MATERIALIZE_MAX_VARS};
use naetree::tree::{check_invariants, export_text};
use naetree::{
    count_with, enumerate_all_orderings, enumerate_with, materialize, Assignment, Formula,
    OrderingSource, SearchConfig,
};

const STATS_SCHEMA: &str = "naetree-stats";
const STATS_VERSION: u32 = 1;

const EXIT_INTERNAL: u8 = 1;
const EXIT_PRECONDITION: u8 = 2;
const EXIT_INPUT: u8 = 3;
const EXIT_REFUSED: u8 = 4;
const EXIT_MISMATCH: u8 = 5;

/// Enumerate minimum-weight NAE solutions of 3-CNFs, check them against
/// brute force, and evaluate the analytic bounds.
///
/// Machine-readable output goes to stdout; logs go to stderr.
/// Exit codes: 0 ok, 1 internal error, 2 precondition violated (a smaller
/// satisfying assignment exists), 3 bad input or usage, 4 refused
/// parameters, 5 verification mismatch.
#[derive(Parser, Debug)]
#[command(name = "naetree", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a generated instance as DIMACS.
    Gen(GenArgs),
    /// Enumerate weight-t solutions into a file; stats JSON on stdout.
    Enumerate(RunArgs),
    /// Count weight-t solutions without storing them.
    Count(RunArgs),
    /// Compare a solution file with the brute-force oracle (n ≤ 24).
    Verify(VerifyArgs),
    /// Evaluate bound functions, DP tables and claim sweeps.
    Bound(BoundArgs),
    /// Monte Carlo estimate of ψ(r) over seeded orderings.
    Estimate(EstimateArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FamilyArg {
    Maj,
    RandomClosed,
    RandomMixed,
    Reduction,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    #[arg(long)]
    n: u32,
    #[arg(long, default_value_t = 3)]
    k: u32,
    /// Clause count for the random families.
    #[arg(long, default_value_t = 0)]
    m: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Add the negation of every clause.
    #[arg(long)]
    close: bool,
    /// Output path; stdout when absent.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Enumerate,
    Count,
    Psi,
}

#[derive(Args, Debug, Clone)]
struct InputArgs {
    /// DIMACS CNF file.
    input: PathBuf,
    /// Target weight, or `auto` for the oracle's τ (n ≤ 24).
    #[arg(long)]
    t: String,
    /// Close the input under negation before searching.
    #[arg(long)]
    close: bool,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Seed for random child orderings; ascending order when absent.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    /// Worker threads for level-t0 subtrees.
    #[arg(long, default_value_t = 1)]
    parallel: usize,
    /// Solution file (default `<input>.sol`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write solutions as 0/1 strings instead of index lists.
    #[arg(long)]
    bitstring: bool,
    /// With `--mode psi`: average over every joint child ordering.
    #[arg(long)]
    exhaustive_orderings: bool,
    #[arg(long, default_value_t = DEFAULT_ORDERING_BUDGET)]
    budget: u64,
    /// Write the materialized tree (n ≤ 24) and check its invariants.
    #[arg(long)]
    debug_tree: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Solution file to check; the engine's own output when absent.
    #[arg(long)]
    solutions: Option<PathBuf>,
    /// Also check the closure's solutions against direct NAE evaluation
    /// of the input.
    #[arg(long)]
    nae: bool,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct BoundArgs {
    /// F(w,d) for subtrees where every node is marked.
    #[arg(long, num_args = 2, value_names = ["W", "D"], allow_negative_numbers = true)]
    f_large: Option<Vec<i64>>,
    /// F(w,d,h) for the arbitrary stage.
    #[arg(long, num_args = 3, value_names = ["W", "D", "H"], allow_negative_numbers = true)]
    f_small: Option<Vec<i64>>,
    /// Check every pointwise claim about the DPs on the grid.
    #[arg(long)]
    verify_claims: bool,
    /// Grid size: d ≤ G, w ≤ 2G (large) and d, h ≤ G, w ≤ 2G (small).
    #[arg(long)]
    grid: Option<i64>,
    #[arg(long)]
    n: Option<usize>,
    /// `t0,t1,mR',mB` for a single N(u0) certificate (needs --n).
    #[arg(long, value_delimiter = ',', requires = "n")]
    profile: Option<Vec<usize>>,
    /// Sweep every feasible profile and Δ at --n.
    #[arg(long, requires = "n")]
    sweep: bool,
    /// Write the DP tables on the grid as CSV files with this prefix.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EstimateArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, default_value_t = 10_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if let Some(s) = cause.downcast_ref::<SearchError>() {
            return match s {
                SearchError::PreconditionViolated { .. } => EXIT_PRECONDITION,
                SearchError::WidthError { .. }
                | SearchError::InputNotClosed
                | SearchError::TooManyVariables { .. }
                | SearchError::TargetTooLarge { .. } => EXIT_INPUT,
                SearchError::BudgetExceeded { .. } => EXIT_REFUSED,
                SearchError::ResetLimit { .. } | SearchError::Internal(_) => EXIT_INTERNAL,
            };
        }
        if cause.is::<CnfError>() || cause.is::<std::io::Error>() {
            return EXIT_INPUT;
        }
        if cause.is::<AnalysisError>() || cause.is::<OracleError>() || cause.is::<GenError>() {
            return EXIT_REFUSED;
        }
    }
    EXIT_INTERNAL
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Enumerate(a) => {
            let mode = a.mode.unwrap_or(Mode::Enumerate);
            cmd_run(a, mode)
        }
        Command::Count(a) => cmd_run(a, Mode::Count),
        Command::Verify(a) => cmd_verify(a),
        Command::Bound(a) => cmd_bound(a),
        Command::Estimate(a) => cmd_estimate(a),
    }
}

fn print_json(v: &Value) -> Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, v)?;
    writeln!(out)?;
    Ok(())
}

fn cmd_gen(a: GenArgs) -> Result<u8> {
    let spec = GenSpec {
        family: match a.family {
            FamilyArg::Maj => GenFamily::Maj,
            FamilyArg::RandomClosed => GenFamily::RandomClosed,
            FamilyArg::RandomMixed => GenFamily::RandomMixed,
            FamilyArg::Reduction => GenFamily::Reduction,
        },
        n: a.n,
        k: a.k,
        m: a.m,
        seed: a.seed,
    };
    let mut f = spec.generate()?;
    if a.close {
        f = f.negation_closure();
    }
    let mut comment = spec.comment();
    if a.close {
        comment.push_str(" closed");
    }
    let text = f.to_dimacs(&[&comment]);
    match a.out {
        Some(p) => fs::write(&p, text).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{text}"),
    }
    Ok(0)
}

struct Loaded {
    f: Formula,
    t: usize,
}

fn read_formula(path: &Path) -> Result<Formula> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Formula::parse_dimacs(&text).with_context(|| format!("parsing {}", path.display()))
}

fn load(a: &InputArgs) -> Result<Loaded> {
    let mut f = read_formula(&a.input)?;
    if a.close {
        f = f.negation_closure();
    }
    let t = if a.t == "auto" {
        let r = brute_force(&f, None).context("--t auto needs the oracle")?;
        let tau = r
            .tau
            .ok_or_else(|| anyhow!("formula is unsatisfiable; no target weight exists"))?;
        eprintln!("t = τ = {tau} (oracle)");
        tau
    } else {
        a.t.parse()
            .map_err(|_| CnfError::InvalidToken {
                line: 0,
                token: a.t.clone(),
            })
            .context("--t expects a number or `auto`")?
    };
    Ok(Loaded { f, t })
}

fn ordering(seed: Option<u64>) -> OrderingSource {
    seed.map_or(OrderingSource::Fixed, OrderingSource::Seeded)
}

fn header(
    command: &str,
    a: &InputArgs,
    l: &Loaded,
    ord: OrderingSource,
) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("schema".into(), json!(STATS_SCHEMA));
    m.insert("version".into(), json!(STATS_VERSION));
    m.insert("command".into(), json!(command));
    m.insert("input".into(), json!(a.input.display().to_string()));
    m.insert("n".into(), json!(l.f.num_vars()));
    m.insert("clauses".into(), json!(l.f.len()));
    m.insert("t".into(), json!(l.t));
    m.insert("ordering".into(), json!(ord));
    m
}

fn cmd_run(a: RunArgs, mode: Mode) -> Result<u8> {
    let l = load(&a.input)?;
    let ord = ordering(a.seed);
    let cfg = SearchConfig {
        parallel: a.parallel.max(1),
        ..SearchConfig::new(l.t, ord)
    };
    let name = match mode {
        Mode::Enumerate => "enumerate",
        Mode::Count => "count",
        Mode::Psi => "psi",
    };
    let mut out = header(name, &a.input, &l, ord);
    out.insert("parallel".into(), json!(cfg.parallel));

    if let Some(path) = &a.debug_tree {
        if l.f.num_vars() > MATERIALIZE_MAX_VARS {
            bail!(SearchError::TooManyVariables {
                n: l.f.num_vars(),
                max: MATERIALIZE_MAX_VARS
            });
        }
        let tree = materialize(&l.f, l.t)?;
        fs::write(path, export_text(&tree))
            .with_context(|| format!("writing {}", path.display()))?;
        let violations = check_invariants(&tree);
        out.insert(
            "debug_tree".into(),
            json!({
                "path": path.display().to_string(),
                "nodes": tree.nodes.len(),
                "psi_paths": tree.psi_by_paths().to_string(),
                "invariant_violations": violations,
            }),
        );
    }

    match mode {
        Mode::Enumerate => {
            let sol_path = a
                .out
                .clone()
                .unwrap_or_else(|| PathBuf::from(format!("{}.sol", a.input.input.display())));
            let mut lines = String::new();
            let n = l.f.num_vars();
            let stats = enumerate_with(&l.f, &cfg, &mut |s: &Assignment| {
                lines.push_str(&if a.bitstring {
                    s.to_bitstring(n)
                } else {
                    s.to_line()
                });
                lines.push('\n');
            })?;
            fs::write(&sol_path, lines)
                .with_context(|| format!("writing {}", sol_path.display()))?;
            eprintln!(
                "{} solutions written to {}",
                stats.solutions_emitted,
                sol_path.display()
            );
            out.insert(
                "solutions_file".into(),
                json!(sol_path.display().to_string()),
            );
            out.insert("stats".into(), serde_json::to_value(&stats)?);
        }
        Mode::Count => {
            let (_, stats) = count_with(&l.f, &cfg)?;
            out.insert("stats".into(), serde_json::to_value(&stats)?);
        }
        Mode::Psi => {
            if a.exhaustive_orderings {
                let r = enumerate_all_orderings(&l.f, l.t, a.budget)?;
                out.insert(
                    "psi".into(),
                    json!({
                        "orderings": r.orderings,
                        "mean_leaves": r.mean_leaves.to_string(),
                        "psi_paths": r.psi_paths.to_string(),
                        "equal": r.mean_leaves == r.psi_paths,
                        "leaf_histogram": r.leaf_histogram,
                    }),
                );
            } else {
                let (_, stats) = count_with(&l.f, &cfg)?;
                out.insert("psi".into(), json!({ "leaves": stats.leaves_visited }));
                out.insert("stats".into(), serde_json::to_value(&stats)?);
            }
        }
    }
    print_json(&Value::Object(out))?;
    Ok(0)
}

fn read_solutions(path: &Path, n: u32) -> Result<Vec<Assignment>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    text.lines()
        .filter(|l| !l.trim_start().starts_with('#'))
        .enumerate()
        .map(|(i, l)| {
            Assignment::parse_line(l, n).with_context(|| format!("solution line {}", i + 1))
        })
        .collect()
}

fn cmd_verify(a: VerifyArgs) -> Result<u8> {
    let l = load(&a.input)?;
    let ord = ordering(a.seed);
    let mut out = header("verify", &a.input, &l, ord);
    let emitted = match &a.solutions {
        Some(p) => read_solutions(p, l.f.num_vars())?,
        None => {
            let mut v = Vec::new();
            enumerate_with(&l.f, &SearchConfig::new(l.t, ord), &mut |s: &Assignment| {
                v.push(s.clone())
            })?;
            v
        }
    };
    let report = verify_enumeration(&l.f, l.t, &emitted)?;
    let mut pass = report.pass;
    out.insert("report".into(), serde_json::to_value(&report)?);
    if a.nae {
        // The input as given is the NAE instance; its closure is what the
        // engine searched.
        let raw = read_formula(&a.input.input)?;
        let direct = nae_solutions_direct(&raw, l.t)?;
        let closure = brute_force(&raw.negation_closure(), Some(l.t))?.weight_t_solutions;
        let same = direct == closure;
        let vs_emitted = compare(&direct.iter().cloned().collect(), &emitted);
        pass &= same && vs_emitted.pass;
        out.insert(
            "nae".into(),
            json!({
                "direct_count": direct.len(),
                "closure_matches_direct": same,
                "emitted_vs_direct": vs_emitted,
            }),
        );
    }
    out.insert("pass".into(), json!(pass));
    print_json(&Value::Object(out))?;
    Ok(if pass { 0 } else { EXIT_MISMATCH })
}

fn cmd_bound(a: BoundArgs) -> Result<u8> {
    let mut out = serde_json::Map::new();
    out.insert("schema".into(), json!("naetree-bound"));
    out.insert("version".into(), json!(STATS_VERSION));
    if let Some(v) = &a.f_large {
        let (w, d) = (v[0], v[1]);
        if d < 0 {
            bail!(AnalysisError::Refused(format!("d = {d} is negative")));
        }
        out.insert(
            "f_large".into(),
            json!({ "w": w, "d": d, "value": f_large(w, d).to_string() }),
        );
    }
    if let Some(v) = &a.f_small {
        let (w, d, h) = (v[0], v[1], v[2]);
        if d < 0 || h < 0 {
            bail!(AnalysisError::Refused(format!(
                "d = {d}, h = {h} must be non-negative"
            )));
        }
        let value = f_small(w, d, h);
        out.insert(
            "f_small".into(),
            json!({
                "w": w, "d": d, "h": h,
                "value": value.to_string(),
                "approx": value.to_f64(),
                "regime": small_regime(w, d, h),
            }),
        );
    }
    let (large, small) = match a.grid {
        Some(g) if g < 0 => bail!(AnalysisError::Refused(format!("grid {g} is negative"))),
        Some(g) => (Grid::large(-3, 2 * g, g), Grid::small(-3, 2 * g, g, g)),
        None => (Grid::default_large(), Grid::default_small()),
    };
    let mut failed = false;
    if a.verify_claims {
        let r = verify_bound_claims(large, small);
        failed |= !r.all_pass;
        out.insert("claims".into(), serde_json::to_value(&r)?);
    }
    if let Some(prefix) = &a.csv {
        let p = prefix.display();
        fs::write(format!("{p}_large.csv"), dp_m_large(large).to_csv())?;
        fs::write(format!("{p}_small.csv"), dp_m_small(small).to_csv())?;
        out.insert(
            "csv".into(),
            json!([format!("{p}_large.csv"), format!("{p}_small.csv")]),
        );
    }
    if let Some(v) = &a.profile {
        let n = a.n.expect("clap requires --n");
        if v.len() != 4 {
            bail!(AnalysisError::Refused(format!(
                "--profile takes t0,t1,mR',mB; got {} values",
                v.len()
            )));
        }
        let c = n_of_u0(n, ProfileParams::new(v[0], v[1], v[2], v[3]))?;
        out.insert(
            "certificate".into(),
            json!({
                "N": c.n_u0.to_string(),
                "N_approx": c.n_u0.to_f64(),
                "I": c.i_u0,
                "scaled": c.scaled().to_string(),
                "weight_dominates": c.weight_dominates(),
                "regime_consistent": c.regime_consistent(),
                "detail": c,
            }),
        );
    }
    if a.sweep {
        let n = a.n.expect("clap requires --n");
        let r = global_bound_check(n, None)?;
        failed |= !r.pass;
        out.insert("global".into(), serde_json::to_value(&r)?);
    }
    print_json(&Value::Object(out))?;
    Ok(if failed { EXIT_MISMATCH } else { 0 })
}

fn cmd_estimate(a: EstimateArgs) -> Result<u8> {
    let l = load(&a.input)?;
    let est = estimate_psi(&l.f, l.t, a.samples, a.seed)?;
    let mut out = header("estimate", &a.input, &l, OrderingSource::Seeded(a.seed));
    out.insert("estimate".into(), serde_json::to_value(&est)?);
    print_json(&Value::Object(out))?;
    Ok(0)
}
