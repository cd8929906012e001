//! `genkripke`: decide, unravel, complete and synthesize from the command line.
//!
//! Exit codes: 0 valid or holds, 1 refuted or fails, 2 usage or parse error,
//! 3 invalid model or signature.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use genkripke::construct::{
    check_main_lemma_instance, complete_to_constant_domain_with, unravel_strict, unravel_stuttered,
    Completion, LemmaStatus, TreeModel, DEFAULT_CHOICE_BUDGET,
};
use genkripke::search::{
    check_cd_to_classical, check_kripke_to_cd, classify_connectives, decide, generate_corpus,
    report_relations, CorpusConfig, Mode, SearchBounds, Shape, Verdict, DEFAULT_BUDGET,
};
use genkripke::semantics::{Assignment, KripkeModel};
use genkripke::synthesize::synthesize;
use genkripke::syntax::{parse_formula_inferring, parse_sequent_inferring};
use genkripke::{Connective, Signature, TruthFunction, Var};
use thiserror::Error;

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Invalid(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Invalid(_) => 3,
        }
    }
}

fn usage(e: impl ToString) -> CliError {
    CliError::Usage(e.to_string())
}

fn invalid(e: impl ToString) -> CliError {
    CliError::Invalid(e.to_string())
}

type Outcome = Result<u8, CliError>;

#[derive(Parser, Debug)]
#[command(name = "genkripke", version, about = "Kripke semantics for arbitrary truth-functional connectives")]
struct Cli {
    /// Worker threads for parallel searches (default: one per core).
    #[arg(long, global = true, env = "GENKRIPKE_WORKERS")]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Supermultiplicativity, monotonicity and witness pair of one connective.
    AnalyzeConnective(ConnectiveArg),
    /// Bounded countermodel search for a sequent.
    Decide(DecideArgs),
    /// Separating sequent and K* refutation for a non-supermultiplicative connective.
    Synthesize(SynthesizeArgs),
    /// Unravel a model into a tree rooted at one world.
    Unravel(UnravelArgs),
    /// Constant-domain completion of a tree model.
    Complete(CompleteArgs),
    /// Compare completion and tree values of a formula at one node, as JSON.
    CheckMainLemma(LemmaArgs),
    /// Count functions of one arity by supermultiplicativity and monotonicity.
    Census {
        #[arg(long, default_value_t = 2)]
        arity: usize,
    },
    /// Which of the Kripke, constant-domain and classical logics coincide.
    ReportRelations(RelationArgs),
}

#[derive(Args, Debug)]
struct ConnectiveArg {
    /// A builtin: not, and, or, imp, xor, iff.
    #[arg(long, conflicts_with_all = ["table", "connective"])]
    builtin: Option<String>,
    /// A truth table such as `0110`, first entry for all-zero inputs.
    #[arg(long, conflicts_with = "connective")]
    table: Option<String>,
    /// A signature file path or a builtin name.
    #[arg(long)]
    connective: Option<String>,
    /// Which connective to take from a signature file with several.
    #[arg(long)]
    name: Option<String>,
}

#[derive(Args, Debug, Clone, Copy)]
struct BoundArgs {
    #[arg(long, default_value_t = 3)]
    max_worlds: usize,
    #[arg(long, default_value_t = 2)]
    max_domain: usize,
    /// any-preorder, poset, tree or chain.
    #[arg(long, default_value = "any-preorder", value_parser = parse_shape)]
    shape: Shape,
    /// Cap on max-worlds times max-domain.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: usize,
}

impl BoundArgs {
    fn bounds(self) -> SearchBounds {
        SearchBounds::new(self.max_worlds, self.max_domain, self.shape).with_budget(self.budget)
    }
}

#[derive(Args, Debug)]
struct DecideArgs {
    /// kripke, cd or classical.
    #[arg(long, default_value = "kripke", value_parser = parse_mode)]
    mode: Mode,
    #[command(flatten)]
    bounds: BoundArgs,
    /// File holding one sequent, e.g. `forall x. or(p(x), r) => or(forall x. p(x), r)`.
    #[arg(long)]
    seq: PathBuf,
    /// Signature file declaring extra connectives.
    #[arg(long)]
    signature: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SynthesizeArgs {
    #[command(flatten)]
    connective: ConnectiveArg,
    /// Also search constant-domain models with at most W worlds (trees) and D elements.
    #[arg(long, num_args = 2, value_names = ["W", "D"])]
    cd_bounds: Option<Vec<usize>>,
    /// Write the certificate here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[command(group = clap::ArgGroup::new("kind").required(true).args(["strict", "stutter"]))]
struct UnravelArgs {
    /// Chains of covering steps; the order must be antisymmetric.
    #[arg(long)]
    strict: bool,
    /// Chains of at most L steps along the preorder.
    #[arg(long, value_name = "L")]
    stutter: Option<usize>,
    /// Root world (default: the first declared).
    #[arg(long)]
    from: Option<String>,
    model: PathBuf,
}

#[derive(Args, Debug)]
struct CompleteArgs {
    model: PathBuf,
    /// Signature whose predicates are interpreted even without facts.
    #[arg(long)]
    signature: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct LemmaArgs {
    model: PathBuf,
    formula: String,
    /// Node of the tree (default: the root).
    #[arg(long)]
    node: Option<String>,
    /// Free variable values as `x=F1`, naming completion elements.
    #[arg(long = "assign", value_name = "VAR=ELEM")]
    assign: Vec<String>,
    #[arg(long)]
    signature: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RelationArgs {
    /// Signature file; defaults to the builtins given by --builtins.
    #[arg(long, conflicts_with = "builtins")]
    signature: Option<PathBuf>,
    /// Comma-separated builtin connectives.
    #[arg(long, value_delimiter = ',')]
    builtins: Vec<String>,
    /// Also check a seeded corpus of this many sequents.
    #[arg(long, default_value_t = 0)]
    corpus: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    bounds: BoundArgs,
}

fn parse_shape(s: &str) -> Result<Shape, String> {
    s.parse()
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse()
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load_model(path: &Path) -> Result<KripkeModel, CliError> {
    KripkeModel::from_toml(&read(path)?).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

fn load_signature(path: Option<&Path>) -> Result<Signature, CliError> {
    let mut sig = Signature::with_builtins();
    if let Some(path) = path {
        let extra = Signature::from_toml(&read(path)?).map_err(invalid)?;
        for (p, a) in extra.predicates() {
            sig.add_predicate(p, a).map_err(invalid)?;
        }
        for c in extra.connectives() {
            if sig.connective(&c.name).as_ref() != Some(&c) {
                sig.add_connective(&c.name, c.func.clone()).map_err(invalid)?;
            }
        }
    }
    Ok(sig)
}

fn table_function(table: &str) -> Result<TruthFunction, CliError> {
    let len = table.len();
    if !len.is_power_of_two() {
        return Err(usage(format!("table `{table}` has length {len}, not a power of two")));
    }
    TruthFunction::from_table_str(len.trailing_zeros() as usize, table).map_err(usage)
}

fn resolve_connective(arg: &ConnectiveArg) -> Result<Connective, CliError> {
    if let Some(b) = &arg.builtin {
        return Connective::builtin(b).map_err(usage);
    }
    if let Some(t) = &arg.table {
        return Ok(Connective::new(arg.name.as_deref().unwrap_or("c"), table_function(t)?));
    }
    let Some(spec) = &arg.connective else {
        return Err(usage("give one of --builtin, --table or --connective"));
    };
    if !Path::new(spec).exists() {
        return Connective::builtin(spec).map_err(usage);
    }
    let sig = Signature::from_toml(&read(Path::new(spec))?).map_err(invalid)?;
    let conns: Vec<Connective> = sig.connectives().collect();
    match (&arg.name, conns.as_slice()) {
        (Some(n), _) => sig
            .connective(n)
            .ok_or_else(|| usage(format!("{spec} declares no connective `{n}`"))),
        (None, [c]) => Ok(c.clone()),
        (None, []) => Err(invalid(format!("{spec} declares no connectives"))),
        (None, _) => Err(usage(format!("{spec} declares several connectives; pick one with --name"))),
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn analyze_connective(arg: &ConnectiveArg) -> Outcome {
    let c = resolve_connective(arg)?;
    let f = &c.func;
    println!("connective: {} (arity {}, table {})", c.name, f.arity(), f.table_string());
    println!("supermultiplicative: {}", yes_no(f.is_supermultiplicative()));
    println!("monotone: {}", yes_no(f.is_monotonic()));
    match f.supermultiplicativity_witness() {
        Some((a, b)) => {
            let m = a.meet(&b).map_err(invalid)?;
            println!("witness: a = {a}, b = {b}, a meet b = {m}");
            println!("values: f(a) = 1, f(b) = 1, f(a meet b) = 0");
        }
        None => println!("witness: none"),
    }
    Ok(0)
}

fn print_verdict(v: &Verdict, mode: Mode) -> u8 {
    match v {
        Verdict::ValidUpToBounds(b) => {
            println!("ValidUpToBounds (mode {}): no countermodel with {b}", mode.name());
            0
        }
        Verdict::Refuted { model, world, assignment } => {
            println!(
                "Refuted (mode {}) at world {} under {}",
                mode.name(),
                model.world_name(*world),
                assignment.display(model)
            );
            println!();
            print!("{}", model.to_toml());
            1
        }
    }
}

fn run_decide(args: &DecideArgs) -> Outcome {
    let mut sig = load_signature(args.signature.as_deref())?;
    let text = read(&args.seq)?;
    let seq = parse_sequent_inferring(text.trim(), &mut sig).map_err(usage)?;
    let v = decide(&seq, args.mode, args.bounds.bounds()).map_err(usage)?;
    Ok(print_verdict(&v, args.mode))
}

fn run_synthesize(args: &SynthesizeArgs) -> Outcome {
    let c = resolve_connective(&args.connective)?;
    let bounds = args
        .cd_bounds
        .as_ref()
        .map(|wd| SearchBounds::new(wd[0], wd[1], Shape::Tree));
    let cert = synthesize(&c, bounds).map_err(usage)?;
    let text = format!("{cert}\n[K*]\n{}", cert.kstar.to_toml());
    match &args.output {
        Some(path) => {
            fs::write(path, &text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
            println!("wrote certificate for {} (case {}) to {}", c.name, cert.case, path.display());
        }
        None => print!("{text}"),
    }
    Ok(if matches!(cert.cd_verdict, Some(Verdict::Refuted { .. })) {
        1
    } else {
        0
    })
}

fn run_unravel(args: &UnravelArgs) -> Outcome {
    let k = load_model(&args.model)?;
    let start = match &args.from {
        Some(name) => k
            .world_by_name(name)
            .ok_or_else(|| usage(format!("no world `{name}`")))?,
        None => k.worlds().next().ok_or_else(|| invalid("model has no worlds"))?,
    };
    let t = match args.stutter {
        Some(l) => unravel_stuttered(&k, start, l),
        None => unravel_strict(&k, start),
    }
    .map_err(invalid)?;
    if t.is_truncated() {
        println!("# truncated: chains longer than the stutter bound are cut off");
    }
    print!("{}", t.model().to_toml());
    Ok(0)
}

fn load_tree(path: &Path) -> Result<TreeModel, CliError> {
    TreeModel::from_model(load_model(path)?).map_err(invalid)
}

fn completion_of(
    t: &TreeModel,
    preds: &BTreeMap<String, usize>,
) -> Result<Completion, CliError> {
    complete_to_constant_domain_with(t, preds, DEFAULT_CHOICE_BUDGET).map_err(usage)
}

fn run_complete(args: &CompleteArgs) -> Outcome {
    let t = load_tree(&args.model)?;
    let sig = load_signature(args.signature.as_deref())?;
    let preds = sig.predicates().map(|(p, a)| (p.to_string(), a)).collect();
    let c = completion_of(&t, &preds)?;
    for (i, f) in c.functions.iter().enumerate() {
        println!("# {} = {}", c.model.element_name(genkripke::semantics::ElementId(i)), f.display(&t));
    }
    print!("{}", c.model.to_toml());
    Ok(0)
}

fn run_check_main_lemma(args: &LemmaArgs) -> Outcome {
    let t = load_tree(&args.model)?;
    let mut sig = load_signature(args.signature.as_deref())?;
    let phi = parse_formula_inferring(&args.formula, &mut sig).map_err(usage)?;
    let c = completion_of(&t, &phi.predicates())?;
    let node = match &args.node {
        Some(n) => t
            .model()
            .world_by_name(n)
            .ok_or_else(|| usage(format!("no node `{n}`")))?,
        None => t.root(),
    };
    let mut rho = Assignment::empty();
    for a in &args.assign {
        let (x, e) = a
            .split_once('=')
            .ok_or_else(|| usage(format!("assignment `{a}` is not of the form x=F1")))?;
        let e = c
            .model
            .element_by_name(e.trim())
            .ok_or_else(|| usage(format!("the completion has no element `{}`", e.trim())))?;
        rho.set(Var::new(x.trim()), e);
    }
    let report = check_main_lemma_instance(&t, &c, &phi, node, &rho).map_err(usage)?;
    let json = serde_json::to_string_pretty(&report).map_err(invalid)?;
    println!("{json}");
    Ok(if report.status == LemmaStatus::Holds { 0 } else { 1 })
}

fn run_census(arity: usize) -> Outcome {
    let census = classify_connectives(arity).map_err(usage)?;
    print!("{census}");
    Ok(0)
}

fn run_relations(args: &RelationArgs) -> Outcome {
    let sig = match &args.signature {
        Some(path) => Signature::from_toml(&read(path)?).map_err(invalid)?,
        None => {
            let mut sig = Signature::new();
            for b in &args.builtins {
                let f = genkripke::truthfun::builtin(b).map_err(usage)?;
                sig.add_connective(b, f).map_err(usage)?;
            }
            sig
        }
    };
    let conns: Vec<Connective> = sig.connectives().collect();
    if conns.is_empty() {
        return Err(usage("no connectives: give --signature or --builtins"));
    }
    let report = report_relations(&sig);
    print!("{report}");
    if args.corpus == 0 {
        return Ok(0);
    }
    let cfg = CorpusConfig {
        seed: args.seed,
        size: args.corpus,
        ..CorpusConfig::default()
    };
    let corpus = generate_corpus(&conns, &cfg);
    let bounds = args.bounds.bounds();
    let mut violations = 0;
    if report.ils_eq_cds {
        let cd = SearchBounds {
            max_worlds: bounds.max_worlds.saturating_sub(1).max(1),
            ..bounds
        };
        let r = check_kripke_to_cd(&corpus, bounds, cd).map_err(usage)?;
        println!("kripke vs constant domain (seed {}): {r}", args.seed);
        violations += r.count(genkripke::search::TransferOutcome::Violation);
    }
    if report.cds_eq_cls {
        let r = check_cd_to_classical(&corpus, bounds, bounds.max_domain + 2).map_err(usage)?;
        println!("constant domain vs classical (seed {}): {r}", args.seed);
        violations += r.count(genkripke::search::TransferOutcome::Violation);
    }
    Ok(u8::from(violations > 0))
}

fn run(cli: &Cli) -> Outcome {
    if let Some(n) = cli.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(usage)?;
    }
    match &cli.command {
        Command::AnalyzeConnective(arg) => analyze_connective(arg),
        Command::Decide(args) => run_decide(args),
        Command::Synthesize(args) => run_synthesize(args),
        Command::Unravel(args) => run_unravel(args),
        Command::Complete(args) => run_complete(args),
        Command::CheckMainLemma(args) => run_check_main_lemma(args),
        Command::Census { arity } => run_census(*arity),
        Command::ReportRelations(args) => run_relations(args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
