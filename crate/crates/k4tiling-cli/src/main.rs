use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use k4tiling::constructions::{self as cons, ConstructionSpec, Family, Rational};
use k4tiling::opt::{self, PhiProp, Rho, VerifyReport};
use k4tiling::packing::{audit_bounds, classify, lex_max_rank_packing, Profile};
use k4tiling::tiling::{self, TilingSolver};
use k4tiling::{Error, Graph};
use serde::Serialize;
use serde_json::{json, Value};

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser, Debug)]
#[command(
    name = "k4tiling",
    version,
    about = "Extremal K4-tiling constructions, exact solvers and bound checks"
)]
struct Cli {
    /// Worker threads; overrides TILING_THREADS.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Include wall time in the report (makes output run-dependent).
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Graph6,
    Text,
}

#[derive(clap::Args, Debug, Serialize)]
struct GraphArg {
    /// Graph in graph6 or edge-list form; read from stdin when absent.
    #[arg(long)]
    graph: Option<String>,
}

#[derive(clap::Args, Debug, Serialize)]
struct ConstructArgs {
    #[arg(long)]
    family: String,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 4)]
    r: usize,
    #[arg(long, default_value_t = 0)]
    j: usize,
    /// Family index i of GEN_A / GEN_B.
    #[arg(long, default_value_t = 0)]
    index: usize,
    #[arg(long, default_value_t = 0)]
    partition_seed: u64,
    /// Sizes of Z1,Z2,Z3 for T3, comma separated.
    #[arg(long, value_delimiter = ',', num_args = 3)]
    z_split: Option<Vec<usize>>,
    /// Only evaluate the closed form; no graph is built.
    #[arg(long)]
    formula_only: bool,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Build one construction and report its edge count and graph6 string.
    Construct(ConstructArgs),
    /// Evaluate Xi(n, k); integer arguments are also evaluated exactly.
    Xi {
        #[arg(long)]
        n: f64,
        #[arg(long)]
        k: f64,
    },
    /// Exact tiling number of a graph.
    Nu {
        #[command(flatten)]
        input: GraphArg,
        #[arg(long, default_value_t = 4)]
        r: usize,
        /// List maximum tilings, up to this many.
        #[arg(long)]
        all: Option<usize>,
    },
    /// Brute-force ex(n, (k+1)K_r) with a witness.
    Ex {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 4)]
        r: usize,
    },
    /// Lexicographically maximal rank-4 packing.
    Packing {
        #[command(flatten)]
        input: GraphArg,
    },
    /// Packing plus the A1..A6 classification and profile.
    Classify {
        #[command(flatten)]
        input: GraphArg,
    },
    /// Audit the edge-count inequalities; exits 1 on any violation.
    Audit {
        #[command(flatten)]
        input: GraphArg,
    },
    /// Verify the quadratic bounds on profiles, or the pointwise identities.
    VerifyOpt {
        /// Proposition id, `all`, `identities` or `convexity`.
        #[arg(long, default_value = "all")]
        prop: String,
        /// k/n; defaults to ten values spread over each stated range.
        #[arg(long)]
        k: Option<f64>,
        /// Accepted for symmetry with verify-appendix; the exact solver needs no grid.
        #[arg(long, default_value_t = 40)]
        res: usize,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Verify the appendix maxima (eta bound and the two-variable quadratic).
    VerifyAppendix {
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        b: f64,
        /// Grid steps per axis.
        #[arg(long, default_value_t = 40)]
        res: usize,
    },
    /// Best construction against Xi for each k at fixed n.
    Sweep {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k_from: Option<usize>,
        #[arg(long)]
        k_to: Option<usize>,
    },
}

enum Failure {
    Verification(Value),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Outcome = Result<Value, Failure>;

fn read_graph(arg: &GraphArg) -> Result<Graph, Error> {
    let text = match &arg.graph {
        Some(s) => s.clone(),
        None => {
            let mut s = String::new();
            std::io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| Error::Input(format!("reading stdin: {e}")))?;
            s
        }
    };
    k4tiling::io::parse_graph(&text)
}

fn verdict(pass: bool, payload: Value) -> Outcome {
    if pass {
        Ok(payload)
    } else {
        Err(Failure::Verification(payload))
    }
}

fn ratio(r: Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn construct(args: &ConstructArgs) -> Outcome {
    let ConstructArgs {
        family,
        n,
        k,
        r,
        j,
        index,
        partition_seed,
        z_split,
        formula_only,
    } = args;
    let (n, k) = (*n, *k);
    let family = Family::parse(family)?;
    let spec = match family {
        Family::T3 => {
            let z = z_split.clone().unwrap_or_else(|| cons::balanced(k, 3));
            ConstructionSpec::t3(n, k, [z[0], z[1], z[2]])
        }
        _ => ConstructionSpec::new(family, n, k)
            .with_r(*r)
            .with_j(*j)
            .with_index(*index)
            .with_seed(*partition_seed),
    };
    let formula = cons::edge_count_formula(&spec)?;
    let layout = spec.layout()?;
    let parts: Vec<Value> = layout
        .names
        .iter()
        .zip(&layout.sizes)
        .map(|(name, size)| json!({"name": name, "size": size}))
        .collect();
    if *formula_only {
        return Ok(json!({"spec": spec, "n": layout.n(), "formula": formula, "parts": parts}));
    }
    let g = layout.build()?;
    Ok(json!({
        "spec": spec,
        "n": g.n(),
        "edges": g.edge_count(),
        "formula": formula,
        "parts": parts,
        "graph6": g.to_graph6(),
    }))
}

fn xi_report(n: f64, k: f64) -> Outcome {
    let v = cons::xi(n, k)?;
    let mut out = json!({"n": n, "k": k, "value": v.value, "density": v.value / (n * n), "regime": v.regime, "breakpoints": v.breakpoints});
    if n.fract() == 0.0 && k.fract() == 0.0 && n.abs() < 1e15 {
        let (exact, _) = cons::xi_exact(
            Rational::from_integer(n as i128),
            Rational::from_integer(k as i128),
        )?;
        out["exact"] = json!(ratio(exact));
    }
    Ok(out)
}

fn nu_report(input: &GraphArg, r: usize, all: Option<usize>) -> Outcome {
    let g = read_graph(input)?;
    if r == 0 {
        return Err(Error::Input("r must be at least 1".into()).into());
    }
    let mut solver = TilingSolver::new(&g, r);
    let best = solver.best_within(g.vertices());
    let mut out = json!({"n": g.n(), "r": r, "nu": best.len(), "tiling": best.members});
    if let Some(limit) = all {
        let list = tiling::max_tilings(&g, r, limit)?;
        out["tilings"] = json!(list.tilings.iter().map(|t| &t.members).collect::<Vec<_>>());
        out["truncated"] = json!(list.truncated);
    }
    Ok(out)
}

fn packing_report(input: &GraphArg, with_classes: bool, audit: bool) -> Outcome {
    let g = read_graph(input)?;
    let p = lex_max_rank_packing(&g)?;
    let (a, b, c, d) = p.sizes();
    let mut out = json!({"n": g.n(), "sizes": {"a": a, "b": b, "c": c, "d": d}, "packing": p});
    if !with_classes {
        return Ok(out);
    }
    let cl = classify(&g, &p)?;
    let prof = Profile::new(&g, &p, &cl);
    out["classification"] = json!(cl);
    out["profile"] = json!(prof);
    if !audit {
        return Ok(out);
    }
    let rep = audit_bounds(&g, &p, &cl)?;
    let pass = rep.all_pass();
    out["edges"] = json!(g.edge_count());
    out["failures"] = json!(rep.failures().iter().map(|c| &c.name).collect::<Vec<_>>());
    out["checks"] = json!(rep.checks);
    out["pass"] = json!(pass);
    verdict(pass, out)
}

fn reports(list: Vec<VerifyReport>) -> Outcome {
    let pass = list.iter().all(|r| r.pass);
    let max_violation = list
        .iter()
        .map(|r| r.max_violation)
        .fold(f64::NEG_INFINITY, f64::max);
    verdict(
        pass,
        json!({"pass": pass, "max_violation": max_violation, "reports": list}),
    )
}

fn verify_opt(prop: &str, k: Option<f64>, samples: u64, seed: u64) -> Outcome {
    match prop {
        "identities" => reports(opt::identity_checks(samples, seed)),
        "convexity" => {
            let mut list = Vec::new();
            for (b, c) in [(1.0, 0.5), (0.3, 2.0), (2.0, 2.0)] {
                for which in [Rho::Rho1, Rho::Rho2] {
                    list.push(opt::convexity_check(
                        which,
                        b,
                        c,
                        [-7.0, 0.0, 0.0],
                        samples,
                        seed,
                    )?);
                }
            }
            reports(list)
        }
        "all" => {
            let mut list = Vec::new();
            for p in PhiProp::ALL {
                match k {
                    Some(k) if p.contains_k(k) => {
                        list.push(opt::verify_phi_proposition(p, k, samples, seed)?)
                    }
                    Some(_) => {}
                    None => {
                        for k in p.k_values(10) {
                            list.push(opt::verify_phi_proposition(p, k, samples, seed)?);
                        }
                    }
                }
            }
            if list.is_empty() {
                return Err(Error::Domain(format!(
                    "no proposition is stated at k/n = {}",
                    k.unwrap_or(f64::NAN)
                ))
                .into());
            }
            reports(list)
        }
        id => {
            let p = PhiProp::parse(id)?;
            let ks = k.map_or_else(|| p.k_values(10), |k| vec![k]);
            let list = ks
                .into_iter()
                .map(|k| opt::verify_phi_proposition(p, k, samples, seed))
                .collect::<Result<Vec<_>, _>>()?;
            reports(list)
        }
    }
}

fn verify_appendix(gamma: f64, b: f64, res: usize) -> Outcome {
    if !(gamma >= 0.0 && b >= 0.0 && gamma.is_finite() && b.is_finite()) {
        return Err(Error::Domain(format!(
            "gamma and b must be finite and nonnegative (got {gamma}, {b})"
        ))
        .into());
    }
    if res == 0 {
        return Err(Error::Input("res must be at least 1".into()).into());
    }
    reports(vec![
        opt::verify_eta_bound(gamma, b, res)?,
        opt::verify_prop_a2(gamma, b, res)?,
    ])
}

fn sweep_report(n: usize, k_from: Option<usize>, k_to: Option<usize>) -> Outcome {
    if n < 3 {
        return Err(Error::Domain(format!("sweep needs n >= 3 (got {n})")).into());
    }
    let hi = k_to.unwrap_or((n - 3) / 4);
    let rows = cons::sweep(n, k_from.unwrap_or(0)..=hi);
    let max_gap = rows.iter().map(|r| r.gap.abs()).fold(0.0, f64::max);
    Ok(json!({"n": n, "rows": rows, "max_abs_gap": max_gap}))
}

fn run(cmd: &Command) -> Outcome {
    match cmd {
        Command::Construct(args) => construct(args),
        Command::Xi { n, k } => xi_report(*n, *k),
        Command::Nu { input, r, all } => nu_report(input, *r, *all),
        Command::Ex { n, k, r } => Ok(json!(tiling::bruteforce_ex(*n, *k, *r)?)),
        Command::Packing { input } => packing_report(input, false, false),
        Command::Classify { input } => packing_report(input, true, false),
        Command::Audit { input } => packing_report(input, true, true),
        Command::VerifyOpt {
            prop,
            k,
            samples,
            seed,
            ..
        } => verify_opt(prop, *k, *samples, *seed),
        Command::VerifyAppendix { gamma, b, res } => verify_appendix(*gamma, *b, *res),
        Command::Sweep { n, k_from, k_to } => sweep_report(*n, *k_from, *k_to),
    }
}

fn command_name(cmd: &Command) -> String {
    match serde_json::to_value(cmd) {
        Ok(Value::Object(m)) => m.keys().next().cloned().unwrap_or_default(),
        Ok(Value::String(s)) => s,
        _ => String::new(),
    }
}

fn render_text(v: &Value, prefix: &str, out: &mut String) {
    match v {
        Value::Object(m) => {
            for (key, val) in m {
                let p = if prefix.is_empty() {
                    key.clone()
                } else {
                    format!("{prefix}.{key}")
                };
                render_text(val, &p, out);
            }
        }
        other => out.push_str(&format!("{prefix}: {other}\n")),
    }
}

fn render(cli: &Cli, report: &Value, result: &Value) -> Result<String, Error> {
    match cli.format {
        Format::Json => {
            Ok(serde_json::to_string_pretty(report).expect("reports are valid JSON") + "\n")
        }
        Format::Text => {
            let mut s = String::new();
            render_text(report, "", &mut s);
            Ok(s)
        }
        Format::Graph6 => {
            let g6 = result
                .get("graph6")
                .or_else(|| result.get("witness_graph6"));
            match g6.and_then(Value::as_str) {
                Some(s) => Ok(format!("{s}\n")),
                None => Err(Error::Input(
                    "graph6 output is only available for construct and ex".into(),
                )),
            }
        }
    }
}

fn threads(cli: &Cli) -> Result<Option<usize>, Error> {
    if let Some(t) = cli.threads {
        return Ok(Some(t));
    }
    match std::env::var("TILING_THREADS") {
        Ok(s) => s.trim().parse().map(Some).map_err(|_| {
            Error::Input(format!(
                "TILING_THREADS must be a positive integer (got `{s}`)"
            ))
        }),
        Err(_) => Ok(None),
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Input(_) | Error::Domain(_) => 2,
        Error::Resource(_) => 3,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let fail = |e: Error| {
        eprintln!("error: {e}");
        ExitCode::from(exit_code(&e))
    };
    match threads(&cli) {
        Ok(Some(0)) => return fail(Error::Input("thread count must be at least 1".into())),
        Ok(Some(t)) => {
            if let Err(e) = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build_global()
            {
                return fail(Error::Resource(format!("thread pool: {e}")));
            }
        }
        Ok(None) => {}
        Err(e) => return fail(e),
    }

    let start = Instant::now();
    let (result, verified) = match run(&cli.command) {
        Ok(v) => (v, true),
        Err(Failure::Verification(v)) => (v, false),
        Err(Failure::Lib(e)) => return fail(e),
    };
    let mut report = json!({
        "schema_version": SCHEMA_VERSION,
        "version": env!("CARGO_PKG_VERSION"),
        "command": command_name(&cli.command),
        "config": cli.command,
        "result": result,
    });
    if cli.timing {
        report["wall_time_ms"] = json!(start.elapsed().as_secs_f64() * 1e3);
    }
    let text = match render(&cli, &report, &report["result"]) {
        Ok(t) => t,
        Err(e) => return fail(e),
    };
    let written = match &cli.output {
        Some(path) => std::fs::write(path, &text)
            .map_err(|e| Error::Resource(format!("writing {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    };
    if let Err(e) = written {
        return fail(e);
    }
    if verified {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
