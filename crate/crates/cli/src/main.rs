use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use mixq::checks::{run_check, Check, Outcome, Settings, Subject};
use mixq::corpus::{run_corpus, sample_corpus_files};
use mixq::io::QuiverFile;
use mixq::monoid::{self, Decision, MonoidElement};
use mixq::series::{LinearRep, RepFile, TruncatedSeries};
use mixq::structure::ChainReindex;
use mixq::{Ctx, Error, LpaElement, MpaElement, SpecialEdgeChoice};

const REPORT_VERSION: u32 = 1;

#[derive(Parser)]
#[command(name = "mixq", version, about = "Mixed path, Leavitt path and rational-series algebras over finite quivers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a quiver file and report its chain and levels.
    Validate { quiver: PathBuf },
    /// List the hereditary saturated subsets.
    Lattice { quiver: PathBuf },
    /// The quotient quiver E/H with its induced levels.
    Quotient {
        quiver: PathBuf,
        /// Comma-separated vertex ids of a hereditary saturated set.
        #[arg(long)]
        set: String,
    },
    /// The restriction E_H to a hereditary set.
    Restrict {
        quiver: PathBuf,
        #[arg(long)]
        set: String,
    },
    /// Graph monoid computations.
    Monoid {
        #[command(subcommand)]
        command: MonoidCommand,
    },
    /// Normal form of a Leavitt path algebra element.
    LpaReduce {
        quiver: PathBuf,
        #[command(flatten)]
        element: ElementArg,
        #[command(flatten)]
        choice: ChoiceArg,
    },
    /// Truncated expansion λ(Σ B^k)ρ of a linear representation.
    SeriesExpand {
        quiver: PathBuf,
        rep: PathBuf,
        #[arg(long, default_value_t = 6)]
        order: usize,
    },
    /// Run property checks on one quiver.
    CheckIdentities {
        quiver: PathBuf,
        /// Linear representation files for the series checks.
        #[arg(long = "rep")]
        reps: Vec<PathBuf>,
        /// Checks to run (default: all).
        #[arg(long = "check", value_parser = parse_check)]
        checks: Vec<Check>,
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        choice: ChoiceArg,
    },
    /// Cut the chain at H_{i-1}: E/H_{i-1} over K_0..K_{r-i}.
    Cut {
        quiver: PathBuf,
        #[command(flatten)]
        element: ElementArg,
        #[arg(long)]
        at: usize,
        #[arg(long, value_enum, default_value_t = Algebra::Mpa)]
        algebra: Algebra,
        #[arg(long, default_value_t = 6)]
        order: usize,
    },
    /// Compress to the corner p_{H_i}: E_{H_i} over K_{r-i}..K_r.
    Corner {
        quiver: PathBuf,
        #[command(flatten)]
        element: ElementArg,
        #[arg(long)]
        at: usize,
        #[arg(long, value_enum, default_value_t = Algebra::Mpa)]
        algebra: Algebra,
        #[arg(long, default_value_t = 6)]
        order: usize,
    },
    /// Run a corpus file, or write the bundled sample corpus.
    Corpus {
        /// Corpus file to run.
        #[arg(required_unless_present = "init")]
        corpus: Option<PathBuf>,
        /// Write the sample corpus into this directory instead.
        #[arg(long, conflicts_with = "corpus")]
        init: Option<PathBuf>,
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Subcommand)]
enum MonoidCommand {
    /// Normal form on an acyclic quiver.
    Nf { quiver: PathBuf, element: String },
    /// Bounded congruence test.
    Eq {
        quiver: PathBuf,
        x: String,
        y: String,
        #[arg(long)]
        bound: Option<u64>,
    },
    /// Order ideals against hereditary saturated subsets.
    Ideals {
        quiver: PathBuf,
        #[arg(long)]
        bound: Option<u64>,
    },
}

#[derive(Args)]
struct ElementArg {
    /// File holding one element in text form.
    #[arg(required_unless_present = "expr", conflicts_with = "expr")]
    element: Option<PathBuf>,
    /// The element text itself.
    #[arg(long)]
    expr: Option<String>,
}

impl ElementArg {
    fn text(&self) -> Result<String, Error> {
        match (&self.expr, &self.element) {
            (Some(e), _) => Ok(e.clone()),
            (None, Some(path)) => read(path).map(|s| s.trim().to_string()),
            (None, None) => unreachable!("clap requires one"),
        }
    }
}

#[derive(Args)]
struct ChoiceArg {
    /// `least`, or a JSON file mapping vertex ids to special edge ids.
    #[arg(long, default_value = "least")]
    choice: String,
}

impl ChoiceArg {
    fn resolve(&self, ctx: &Ctx) -> Result<SpecialEdgeChoice, Error> {
        if self.choice == "least" {
            return Ok(SpecialEdgeChoice::least(ctx));
        }
        let map: BTreeMap<String, String> = serde_json::from_str(&read(Path::new(&self.choice))?)?;
        let pairs: Vec<(String, String)> = map.into_iter().collect();
        SpecialEdgeChoice::from_pairs(ctx, &pairs)
    }
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, default_value_t = 6)]
    order: usize,
    #[arg(long)]
    bound: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Random trials per check (default: per-check).
    #[arg(long)]
    trials: Option<usize>,
}

impl RunArgs {
    fn settings(&self) -> Settings {
        Settings { order: self.order, bound: self.bound, seed: self.seed, trials: self.trials, ..Settings::default() }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Algebra {
    Mpa,
    Lpa,
    Series,
}

fn parse_check(s: &str) -> Result<Check, String> {
    Check::from_name(s).ok_or_else(|| {
        let names: Vec<_> = Check::ALL.iter().map(|c| c.name()).collect();
        format!("unknown check {s:?}; expected one of {}", names.join(", "))
    })
}

/// Bad input: exit 2. Failed checks: exit 1.
enum Failure {
    Input(Error),
    Checks(Value),
}

impl<E: Into<Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Input(e.into())
    }
}

fn read(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn load_ctx(path: &Path) -> Result<Ctx, Error> {
    QuiverFile::read(path)?.context()
}

fn report(command: &str, body: Value) -> Value {
    let mut out = json!({ "report_version": REPORT_VERSION, "command": command });
    if let (Value::Object(out), Value::Object(body)) = (&mut out, body) {
        out.extend(body);
    }
    out
}

fn levels_json(ctx: &Ctx) -> Value {
    let q = ctx.quiver();
    let map: serde_json::Map<String, Value> = (0..q.vertex_count()).map(|v| (q.vertex_id(v).to_string(), json!(ctx.lev(v)))).collect();
    Value::Object(map)
}

fn context_json(ctx: &Ctx) -> Value {
    json!({ "quiver": QuiverFile::from_context(ctx), "levels": levels_json(ctx) })
}

fn checks_report(command: &str, reports: Vec<Value>, all_ok: bool) -> Result<Value, Failure> {
    let out = report(command, json!({ "passed": all_ok, "results": reports }));
    if all_ok {
        Ok(out)
    } else {
        Err(Failure::Checks(out))
    }
}

fn reindex(ctx: &Ctx, r: &ChainReindex, algebra: Algebra, text: &str, order: usize) -> Result<Value, Error> {
    let (input, output) = match algebra {
        Algebra::Mpa => {
            let a = MpaElement::parse(ctx, text)?;
            (a.to_string(), r.apply_mpa(&a)?.to_string())
        }
        Algebra::Lpa => {
            let a = LpaElement::parse(ctx, text)?;
            (a.to_string(), r.apply_lpa(&a)?.to_string())
        }
        Algebra::Series => {
            let a = TruncatedSeries::from_mpa(&MpaElement::parse(ctx, text)?, order);
            (a.to_string(), r.apply_series(&a)?.to_string())
        }
    };
    Ok(json!({ "input": input, "output": output, "target": context_json(&r.target) }))
}

fn run(cli: Cli) -> Result<Value, Failure> {
    match cli.command {
        Command::Validate { quiver } => {
            let ctx = load_ctx(&quiver)?;
            let q = ctx.quiver();
            Ok(report(
                "validate",
                json!({
                    "vertices": q.vertex_count(),
                    "edges": q.edge_count(),
                    "chain_length": ctx.tower().top(),
                    "tower": ctx.tower().spec(),
                    "levels": levels_json(&ctx),
                }),
            ))
        }
        Command::Lattice { quiver } => {
            let q = QuiverFile::read(&quiver)?.quiver()?;
            let sets: Vec<Vec<String>> = q.enumerate_lattice().sets.iter().map(|&h| q.set_ids(h)).collect();
            Ok(report("lattice", json!({ "count": sets.len(), "sets": sets })))
        }
        Command::Quotient { quiver, set } => {
            let ctx = load_ctx(&quiver)?;
            let (target, _) = ctx.quotient(ctx.quiver().parse_vertex_set(&set)?)?;
            Ok(report("quotient", context_json(&target)))
        }
        Command::Restrict { quiver, set } => {
            let ctx = load_ctx(&quiver)?;
            let (target, _) = ctx.restriction(ctx.quiver().parse_vertex_set(&set)?)?;
            Ok(report("restrict", context_json(&target)))
        }
        Command::Monoid { command } => match command {
            MonoidCommand::Nf { quiver, element } => {
                let q = QuiverFile::read(&quiver)?.quiver()?;
                let x = MonoidElement::parse(&q, &element)?;
                let (nf, trace) = monoid::normal_form_with_trace(&q, &x)?;
                let trace: Vec<&str> = trace.iter().map(|&v| q.vertex_id(v)).collect();
                Ok(report("monoid nf", json!({ "input": x.format(&q), "normal_form": nf.format(&q), "rewrites": trace })))
            }
            MonoidCommand::Eq { quiver, x, y, bound } => {
                let q = QuiverFile::read(&quiver)?.quiver()?;
                let (x, y) = (MonoidElement::parse(&q, &x)?, MonoidElement::parse(&q, &y)?);
                let bound = bound.unwrap_or_else(|| monoid::default_bound(&q));
                let decision: Decision = monoid::equals_bounded(&q, &x, &y, bound);
                Ok(report("monoid eq", json!({ "x": x.format(&q), "y": y.format(&q), "bound": bound, "equal": decision })))
            }
            MonoidCommand::Ideals { quiver, bound } => {
                let q = QuiverFile::read(&quiver)?.quiver()?;
                let bound = bound.unwrap_or_else(|| monoid::default_bound(&q));
                let lattice = monoid::order_ideal_lattice(&q, bound)?;
                let passed = lattice.passed();
                let out = report("monoid ideals", json!({ "bound": bound, "passed": passed, "lattice": lattice }));
                if passed {
                    Ok(out)
                } else {
                    Err(Failure::Checks(out))
                }
            }
        },
        Command::LpaReduce { quiver, element, choice } => {
            let ctx = load_ctx(&quiver)?;
            let choice = choice.resolve(&ctx)?;
            let a = LpaElement::parse(&ctx, &element.text()?)?;
            let nf = a.reduce(&choice);
            let special: BTreeMap<String, String> = choice.pairs(ctx.quiver()).into_iter().collect();
            Ok(report("lpa-reduce", json!({ "input": a.to_string(), "normal_form": nf.to_string(), "special_edges": special })))
        }
        Command::SeriesExpand { quiver, rep, order } => {
            let ctx = load_ctx(&quiver)?;
            let file: RepFile = serde_json::from_str(&read(&rep)?)?;
            let rep = LinearRep::from_file(&ctx, &file)?;
            let s = rep.expand(order)?;
            Ok(report("series-expand", json!({ "order": order, "series": s.to_string(), "mixed_valid": s.is_mixed_valid() })))
        }
        Command::CheckIdentities { quiver, reps, checks, run, choice } => {
            let ctx = load_ctx(&quiver)?;
            let choice = choice.resolve(&ctx)?;
            let reps = reps
                .iter()
                .map(|p| LinearRep::from_file(&ctx, &serde_json::from_str(&read(p)?)?))
                .collect::<Result<Vec<_>, Error>>()?;
            let subject = Subject { ctx, choice, reps };
            let checks = if checks.is_empty() { Check::ALL.to_vec() } else { checks };
            let settings = run.settings();
            let results: Vec<_> = checks.iter().map(|&c| run_check(&subject, c, &settings)).collect();
            let ok = results.iter().all(|r| r.outcome != Outcome::Fail);
            let results = results.iter().map(|r| serde_json::to_value(r).expect("plain data")).collect();
            checks_report("check-identities", results, ok)
        }
        Command::Cut { quiver, element, at, algebra, order } => {
            let ctx = load_ctx(&quiver)?;
            let r = ChainReindex::cut(&ctx, at)?;
            Ok(report("cut", reindex(&ctx, &r, algebra, &element.text()?, order)?))
        }
        Command::Corner { quiver, element, at, algebra, order } => {
            let ctx = load_ctx(&quiver)?;
            let r = ChainReindex::corner(&ctx, at)?;
            Ok(report("corner", reindex(&ctx, &r, algebra, &element.text()?, order)?))
        }
        Command::Corpus { corpus, init, run } => {
            if let Some(dir) = init {
                let mut written = Vec::new();
                for (rel, contents) in sample_corpus_files() {
                    let path = dir.join(&rel);
                    if let Some(parent) = path.parent() {
                        std::fs::create_dir_all(parent)?;
                    }
                    std::fs::write(&path, contents)?;
                    written.push(rel);
                }
                return Ok(report("corpus", json!({ "written": written })));
            }
            let corpus = corpus.expect("clap requires a corpus without --init");
            let entries = run_corpus(&corpus, &run.settings())?;
            let ok = entries.iter().all(|e| e.all_met());
            let entries = entries.iter().map(|e| serde_json::to_value(e).expect("plain data")).collect();
            checks_report("corpus", entries, ok)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let print = |v: &Value| println!("{}", serde_json::to_string_pretty(v).expect("plain data"));
    match run(cli) {
        Ok(v) => {
            print(&v);
            ExitCode::SUCCESS
        }
        Err(Failure::Checks(v)) => {
            print(&v);
            ExitCode::from(1)
        }
        Err(Failure::Input(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
