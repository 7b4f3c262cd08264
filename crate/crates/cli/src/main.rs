//! `branchwork` command-line front end.
//!
//! Every JSON object printed carries `"format": 1`. Exit codes: 0 success,
//! 1 a check was falsified, 2 usage or input error, 3 budget exceeded.

use std::fs;
use std::process::ExitCode;

use branchwork::order::{ball_enumerate, min_length, order, period_growth, OrderResult, PeriodOptions};
use branchwork::verify::{chi_complexity, run_check, AbstractWord, CheckReport, SuiteOptions, CHECK_NAMES};
use branchwork::{Budgets, Engine, Error, GenKind, GroupSpec, VertexPath, Word};
use num_bigint::BigUint;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

const FORMAT: u32 = 1;

#[derive(Parser)]
#[command(name = "branchwork", version, about = "Exact computation in spinal groups acting on rooted trees")]
struct Cli {
    #[command(flatten)]
    run: RunConfig,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args, Clone)]
struct RunConfig {
    /// Group: JSON such as '{"family":"Kr","r":5}', or `K5`, `G127`, `G3+1` (f0 and base).
    #[arg(long, global = true, env = "BRANCHWORK_SPEC", default_value = "K3")]
    spec: String,
    /// Level of the words and vertices.
    #[arg(long, global = true, env = "BRANCHWORK_LEVEL", default_value_t = 0)]
    level: u64,
    /// Generating set for lengths, balls and period growth.
    #[arg(long, global = true, env = "BRANCHWORK_GENS", default_value = "S")]
    gens: GenKind,
    #[arg(long, global = true, env = "BRANCHWORK_FINGERPRINT_DEPTH", default_value_t = 4)]
    fingerprint_depth: u32,
    #[arg(long, global = true, env = "BRANCHWORK_SEED", default_value_t = 0)]
    seed: u64,
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true, env = "BRANCHWORK_THREADS")]
    threads: Option<usize>,
    #[arg(long, global = true, env = "BRANCHWORK_FORMAT", value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long, global = true, env = "BRANCHWORK_BUDGET_SUPPORT")]
    budget_support: Option<usize>,
    #[arg(long, global = true, env = "BRANCHWORK_BUDGET_RECURSION")]
    budget_recursion: Option<usize>,
    #[arg(long, global = true, env = "BRANCHWORK_BUDGET_BALL")]
    budget_ball: Option<usize>,
    #[arg(long, global = true, env = "BRANCHWORK_BUDGET_VERTICES")]
    budget_vertices: Option<u64>,
    #[arg(long, global = true, env = "BRANCHWORK_BUDGET_BITS")]
    budget_bits: Option<u64>,
    /// Letter limit for intermediate words, which bounds order computations.
    #[arg(long, global = true, env = "BRANCHWORK_BUDGET_ORDER")]
    budget_order: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Section of a word at a vertex.
    Section {
        #[arg(long)]
        word: String,
        #[arg(long)]
        vertex: String,
    },
    /// Image of a vertex under a word.
    Act {
        #[arg(long)]
        word: String,
        #[arg(long)]
        vertex: String,
    },
    /// Order of a word.
    Order {
        #[arg(long)]
        word: String,
    },
    /// Cayley ball with exact lengths.
    Ball {
        #[arg(long)]
        radius: u32,
    },
    /// Period growth table.
    PeriodGrowth {
        #[arg(long, alias = "radius")]
        n: u32,
        /// Radii computed by explicit balls.
        #[arg(long, default_value_t = 2)]
        ball_radius: u32,
        /// Radii computed by the syllable covering.
        #[arg(long, default_value_t = 5)]
        covering_radius: u32,
        /// Random words per radius past the exact range.
        #[arg(long, default_value_t = 0)]
        samples: u64,
    },
    /// Exact word length.
    MinLength {
        #[arg(long)]
        word: String,
        #[arg(long, alias = "radius", default_value_t = 6)]
        radius_limit: u32,
    },
    /// Lawlessness complexity of a word in variables, e.g. `xyXY`.
    Chi {
        #[arg(long)]
        law: String,
        #[arg(long, default_value_t = 2)]
        radius: u32,
    },
    /// Runs a named check, or `all`.
    Verify {
        name: String,
        /// Rank for the rank-parametrized checks.
        #[arg(long)]
        r: Option<u64>,
        /// Radius for the section-length checks.
        #[arg(long)]
        radius: Option<u32>,
        /// Report real elapsed times; otherwise they are zeroed so output is reproducible.
        #[arg(long)]
        timings: bool,
    },
}

enum Failure {
    Usage(String),
    Budget(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_budget() {
            Failure::Budget(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

/// `@path` reads the argument from a file.
fn read_arg(s: &str) -> Result<String, Failure> {
    match s.strip_prefix('@') {
        Some(path) => fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{path}: {e}"))),
        None => Ok(s.to_string()),
    }
}

fn parse_word(cfg: &RunConfig, spec: GroupSpec, s: &str) -> Result<Word, Failure> {
    let s = read_arg(s)?;
    if s.trim_start().starts_with('{') {
        Ok(Word::parse_json(Some(spec), &s)?)
    } else {
        Ok(Word::parse_text(spec, cfg.level, &s)?)
    }
}

fn parse_vertex(cfg: &RunConfig, spec: GroupSpec, s: &str) -> Result<VertexPath, Failure> {
    let s = read_arg(s)?;
    if s.trim_start().starts_with('{') {
        Ok(VertexPath::parse_json(Some(spec), &s)?)
    } else {
        Ok(VertexPath::parse_text(spec, cfg.level, &s)?)
    }
}

fn budgets(cfg: &RunConfig) -> Result<Budgets, Failure> {
    let mut b = Budgets::default();
    let positive = |name: &str, v: u64| {
        if v == 0 {
            Err(Failure::Usage(format!("--budget-{name} must be positive")))
        } else {
            Ok(())
        }
    };
    if let Some(v) = cfg.budget_support {
        positive("support", v as u64)?;
        b.support = v;
    }
    if let Some(v) = cfg.budget_recursion {
        positive("recursion", v as u64)?;
        b.recursion = v;
    }
    if let Some(v) = cfg.budget_ball {
        positive("ball", v as u64)?;
        b.ball = v;
    }
    if let Some(v) = cfg.budget_vertices {
        positive("vertices", v)?;
        b.vertices = v;
    }
    if let Some(v) = cfg.budget_bits {
        positive("bits", v)?;
        b.bits = v;
    }
    if let Some(v) = cfg.budget_order {
        positive("order", v as u64)?;
        b.word_letters = v;
    }
    Ok(b)
}

fn with_format(mut v: Value) -> Value {
    if let Value::Object(m) = &mut v {
        m.insert("format".into(), json!(FORMAT));
    }
    v
}

fn print_json(v: Value) {
    println!("{}", serde_json::to_string(&with_format(v)).expect("json output"));
}

fn big_json(v: &BigUint) -> Value {
    match u64::try_from(v) {
        Ok(x) => json!(x),
        Err(_) => json!(v.to_string()),
    }
}

fn csv_field(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\"\""))
}

/// Runs the command; `Ok(false)` means a check was falsified.
fn run(cli: Cli) -> Result<bool, Failure> {
    let cfg = &cli.run;
    let spec: GroupSpec = cfg.spec.parse()?;
    let engine = Engine::new(budgets(cfg)?);
    match &cli.cmd {
        Command::Section { word, vertex } => {
            let w = parse_word(cfg, spec, word)?;
            let v = parse_vertex(cfg, spec, vertex)?;
            let s = engine.section(&w, &v)?;
            print_json(json!({"section": s, "text": s.to_string()}));
        }
        Command::Act { word, vertex } => {
            let w = parse_word(cfg, spec, word)?;
            let v = parse_vertex(cfg, spec, vertex)?;
            let img = engine.act(&w, &v)?;
            print_json(json!({"image": img, "text": img.to_string()}));
        }
        Command::Order { word } => {
            let w = parse_word(cfg, spec, word)?;
            match order(&engine, &w) {
                OrderResult::Finite { exponent } => {
                    let ord = order(&engine, &w).order().expect("finite");
                    print_json(json!({"order": big_json(&ord), "exponent": exponent}));
                }
                OrderResult::ExceededBudget {
                    lower_exponent,
                    infinite,
                    reason,
                } => {
                    print_json(json!({
                        "order": Value::Null,
                        "exceeded_budget": {"lower_exponent": lower_exponent, "infinite": infinite, "reason": reason},
                    }));
                    return Err(Failure::Budget(reason));
                }
            }
        }
        Command::Ball { radius } => {
            let ball = ball_enumerate(&engine, spec, cfg.level, cfg.gens, *radius, cfg.fingerprint_depth)?;
            let entries = ball.canonical();
            match cfg.format {
                Format::Csv => {
                    println!("length,word_json");
                    for e in &entries {
                        println!("{},{}", e.length, csv_field(&e.word.to_json_string()));
                    }
                }
                Format::Json => print_json(json!({
                    "spec": spec,
                    "level": cfg.level,
                    "gens": cfg.gens,
                    "radius": radius,
                    "size": entries.len(),
                    "sphere_sizes": ball.sphere_sizes(),
                    "elements": entries.iter().map(|e| json!({"length": e.length, "word": e.word.to_json()})).collect::<Vec<_>>(),
                })),
            }
        }
        Command::PeriodGrowth {
            n,
            ball_radius,
            covering_radius,
            samples,
        } => {
            let opts = PeriodOptions {
                ball_radius: *ball_radius,
                covering_radius: *covering_radius,
                samples: *samples,
                seed: cfg.seed,
                fingerprint_depth: cfg.fingerprint_depth,
            };
            let table = period_growth(&engine, spec, cfg.level, cfg.gens, *n, &opts)?;
            match cfg.format {
                Format::Csv => print!("{}", table.to_csv()),
                Format::Json => print_json(json!({
                    "spec": spec,
                    "level": cfg.level,
                    "gens": cfg.gens,
                    "rows": table.rows.iter().map(|r| json!({
                        "n": r.n,
                        "ball_size": r.ball_size,
                        "pi": big_json(&r.pi()),
                        "witness": r.witness.to_json(),
                        "mode": r.mode,
                    })).collect::<Vec<_>>(),
                })),
            }
        }
        Command::MinLength { word, radius_limit } => {
            let w = parse_word(cfg, spec, word)?;
            let l = min_length(&engine, &w, cfg.gens, *radius_limit, cfg.fingerprint_depth)?;
            print_json(json!({"length": l, "radius_limit": radius_limit}));
        }
        Command::Chi { law, radius } => {
            let w: AbstractWord = law.parse()?;
            let res = chi_complexity(&engine, spec, cfg.level, cfg.gens, &w, *radius)?;
            print_json(json!({"law": w.to_string(), "chi": res}));
        }
        Command::Verify {
            name,
            r,
            radius,
            timings,
        } => {
            let mut opts = SuiteOptions {
                seed: cfg.seed,
                ..SuiteOptions::default()
            };
            if let Some(r) = r {
                opts.two_layer_r = *r;
                opts.commutator_r = *r;
            }
            if let Some(radius) = radius {
                opts.two_layer_radius = *radius;
                opts.growing_radius = *radius;
            }
            let names: Vec<&str> = if name == "all" {
                CHECK_NAMES.to_vec()
            } else if CHECK_NAMES.contains(&name.as_str()) {
                vec![name.as_str()]
            } else {
                return Err(Failure::Usage(format!(
                    "unknown check {name:?}; expected one of {} or all",
                    CHECK_NAMES.join(", ")
                )));
            };
            let reports: Vec<CheckReport> = names
                .iter()
                .map(|n| run_check(&engine, n, &opts))
                .collect::<Result<_, _>>()?;
            let reports: Vec<CheckReport> = reports
                .into_iter()
                .map(|r| if *timings { r } else { r.deterministic() })
                .collect();
            let passed = reports.iter().all(|r| r.passed);
            for r in &reports {
                print_json(serde_json::to_value(r).expect("report json"));
            }
            return Ok(passed);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.run.threads {
        if t == 0 || rayon::ThreadPoolBuilder::new().num_threads(t).build_global().is_err() {
            eprintln!("{}", json!({"format": FORMAT, "error": "usage", "message": "bad --threads"}));
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(m)) => {
            eprintln!("{}", json!({"format": FORMAT, "error": "usage", "message": m}));
            ExitCode::from(2)
        }
        Err(Failure::Budget(m)) => {
            eprintln!("{}", json!({"format": FORMAT, "error": "budget", "message": m}));
            ExitCode::from(3)
        }
    }
}
