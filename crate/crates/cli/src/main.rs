use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use mgtc_core::check::{
    check_equivalence, io_models_with_limit, stable_models_for_input, verify_main_lemma, verify_theorem1,
    verify_theorem2, Domain, Report, SoMode, StandardInterp,
};
use mgtc_core::fol::{complete_io, tau_star_io, CompletableSet, FoFormula};
use mgtc_core::graphs::{atom_graph, atom_graph_verdict, is_tight, pred_graph};
use mgtc_core::ground::{default_universe, tau_program, Universe};
use mgtc_core::parser::{parse_formulas, parse_ground_atom, parse_input, parse_io_program, parse_term};
use mgtc_core::random;
use mgtc_core::stable::DEFAULT_LIMIT;
use mgtc_core::syntax::{ApplyValuation, AtomSet, Input, IoProgram, PrecomputedTerm, Predicate, Valuation};
use mgtc_core::values::eval_term;

macro_rules! say {
    ($($arg:tt)*) => { write_stdout(&format!("{}\n", format_args!($($arg)*))) };
}

macro_rules! emit {
    ($($arg:tt)*) => { write_stdout(&format!($($arg)*)) };
}

/// Writes to stdout, exiting quietly when the reader has gone away.
fn write_stdout(text: &str) {
    let mut out = io::stdout().lock();
    if let Err(e) = out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        if e.kind() == io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("error: {e}");
        std::process::exit(3);
    }
}

/// Checks and translations for mini-gringo io-programs.
#[derive(Parser, Debug)]
#[command(name = "mgtc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Add wall-clock timings to reports
    #[arg(long, global = true)]
    timings: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Dot,
}

#[derive(Args, Debug, Clone, Default)]
struct UniverseArgs {
    /// Smallest integer of the universe
    #[arg(long, allow_hyphen_values = true)]
    int_min: Option<i64>,
    /// Largest integer of the universe
    #[arg(long, allow_hyphen_values = true)]
    int_max: Option<i64>,
    /// Widen the derived integer range by this much on both sides
    #[arg(long, default_value_t = 0)]
    margin: u32,
    /// Extra symbolic constants, comma separated
    #[arg(long = "const", value_delimiter = ',')]
    constants: Vec<String>,
    /// Cap on undetermined atoms for stable-model search
    #[arg(long, default_value_t = DEFAULT_LIMIT)]
    limit: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the value set of a ground term
    Eval {
        #[arg(allow_hyphen_values = true)]
        term: String,
    },
    /// Print the syntax tree of a program as JSON
    Parse { file: PathBuf },
    /// List the propositional translation of the program and input
    Ground {
        file: PathBuf,
        #[arg(long)]
        input: Option<PathBuf>,
        #[command(flatten)]
        universe: UniverseArgs,
    },
    /// Stable models of the program together with the input facts
    Stable {
        file: PathBuf,
        #[arg(long)]
        input: Option<PathBuf>,
        #[command(flatten)]
        universe: UniverseArgs,
    },
    /// Public parts of the stable models for an input
    Iomodels {
        file: PathBuf,
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        universe: UniverseArgs,
    },
    /// First-order translation of the rules
    Translate { file: PathBuf },
    /// Second-order completion of the io-program
    Complete { file: PathBuf },
    /// Whether the predicate dependency graph is acyclic
    Tight { file: PathBuf },
    /// Whether the atom dependency graph for an input is acyclic
    LocallyTight {
        file: PathBuf,
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        universe: UniverseArgs,
    },
    /// Check a correspondence on a bounded universe and print a JSON report
    #[command(subcommand)]
    Verify(Verify),
    /// Print a random program or theory from the generators used by the test suites
    Sample {
        #[arg(value_enum)]
        kind: SampleKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SampleKind {
    Program,
    Rule,
    Completable,
    Tight,
}

#[derive(Subcommand, Debug)]
enum Verify {
    /// Stable models of the grounding against those of the first-order translation
    Thm1 {
        file: PathBuf,
        #[command(flatten)]
        universe: UniverseArgs,
    },
    /// Conditions (a), (b) and (c) for a set of public atoms
    Thm2 {
        file: PathBuf,
        #[arg(long)]
        input: PathBuf,
        /// File with the public atoms P
        #[arg(long)]
        public: PathBuf,
        /// File with an extension of the private symbols to check instead of searching
        #[arg(long, conflicts_with = "enumerate")]
        witness: Option<PathBuf>,
        /// Enumerate extensions of the private symbols instead of searching
        #[arg(long)]
        enumerate: bool,
        #[command(flatten)]
        universe: UniverseArgs,
    },
    /// Stability against the completion for one interpretation
    MainLemma {
        /// Completable sentences
        file: PathBuf,
        /// Intensional symbols, e.g. p/1
        #[arg(long, value_delimiter = ',', required = true)]
        intensional: Vec<String>,
        /// Atoms of the interpretation, period separated
        #[arg(long, default_value = "")]
        interp: String,
        /// Placeholder values, e.g. a=0
        #[arg(long = "let")]
        lets: Vec<String>,
        #[command(flatten)]
        universe: UniverseArgs,
    },
    /// Compare io-models of two programs on a finite input domain
    Equiv {
        first: PathBuf,
        second: PathBuf,
        /// Assumption sentences over input symbols
        #[arg(long)]
        assume: Option<PathBuf>,
        /// JSON domain: {"placeholders": {"h": ["0", "1"]}, "atoms": ["p(a)"]}
        #[arg(long)]
        domain: PathBuf,
        #[arg(long, default_value_t = 0)]
        margin: u32,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_program(path: &Path) -> Result<IoProgram> {
    let text = read(path)?;
    parse_io_program(&text).map_err(|e| anyhow!("{}: {}", path.display(), e))
}

fn load_input(path: Option<&Path>, io: &IoProgram) -> Result<Input> {
    match path {
        None => Ok(Input::default()),
        Some(p) => parse_input(&read(p)?, io).map_err(|e| anyhow!("{}: {}", p.display(), e)),
    }
}

fn parse_atoms(text: &str) -> Result<AtomSet> {
    let mut out = AtomSet::new();
    for part in text.split('.') {
        let part = part.lines().filter(|l| !l.trim_start().starts_with('%')).collect::<Vec<_>>().join(" ");
        let part = part.trim();
        if !part.is_empty() {
            out.insert(parse_ground_atom(part).map_err(|e| anyhow!("`{part}`: {e}"))?);
        }
    }
    Ok(out)
}

fn parse_precomputed(text: &str) -> Result<PrecomputedTerm> {
    let t = parse_term(text).map_err(|e| anyhow!("`{text}`: {e}"))?;
    t.as_precomputed()
        .cloned()
        .ok_or_else(|| anyhow!("`{text}` is not a numeral or symbolic constant"))
}

fn parse_predicate(text: &str) -> Result<Predicate> {
    let (name, arity) = text
        .trim()
        .rsplit_once('/')
        .ok_or_else(|| anyhow!("expected name/arity, found `{text}`"))?;
    Ok(Predicate::new(name, arity.parse().with_context(|| format!("bad arity in `{text}`"))?))
}

fn apply_overrides(u: Universe, args: &UniverseArgs) -> Result<Universe> {
    if args.int_min.is_none() && args.int_max.is_none() && args.constants.is_empty() {
        return Ok(u);
    }
    let lo = args.int_min.map(Into::into).unwrap_or_else(|| u.int_min().clone());
    let hi = args.int_max.map(Into::into).unwrap_or_else(|| u.int_max().clone());
    if lo > hi {
        bail!("empty integer range {lo}..{hi}");
    }
    let mut symbols = u.symbols().clone();
    for c in &args.constants {
        match parse_precomputed(c)? {
            s @ PrecomputedTerm::Symbolic(_) => {
                symbols.insert(s);
            }
            PrecomputedTerm::Numeral(_) => bail!("--const takes symbolic constants, found `{c}`"),
        }
    }
    Ok(Universe::from_parts(symbols, lo, hi).with_placeholders(u.placeholders()))
}

fn program_universe(io: &IoProgram, input: &Input, args: &UniverseArgs) -> Result<Universe> {
    let u = apply_overrides(default_universe(io, input, args.margin), args)?;
    for w in u.interval_warnings(io.program()) {
        eprintln!("warning: {w}");
    }
    Ok(u)
}

fn formula_universe(
    sentences: &[FoFormula],
    interp: &AtomSet,
    valuation: &Valuation,
    args: &UniverseArgs,
) -> Result<Universe> {
    let mut constants: BTreeSet<PrecomputedTerm> = sentences.iter().flat_map(|s| s.constants()).collect();
    constants.extend(interp.iter().flat_map(|a| a.args.iter().cloned()));
    constants.extend(valuation.values().cloned());
    let placeholders: BTreeSet<String> = valuation.keys().cloned().collect();
    let ints: Vec<_> = constants.iter().filter_map(|c| c.as_numeral().cloned()).collect();
    let (lo, hi) = match (ints.iter().min(), ints.iter().max()) {
        (Some(lo), Some(hi)) => (lo - args.margin, hi + args.margin),
        _ => (0.into(), 1.into()),
    };
    let symbols = constants.into_iter().filter(|c| !c.is_numeral()).collect();
    let u = Universe::from_parts(symbols, lo, hi).with_placeholders(&placeholders);
    apply_overrides(u, args)
}

fn parse_lets(lets: &[String]) -> Result<Valuation> {
    let mut v = Valuation::new();
    for l in lets {
        let (name, value) = l.split_once('=').ok_or_else(|| anyhow!("expected name=value, found `{l}`"))?;
        if v.insert(name.trim().to_string(), parse_precomputed(value.trim())?).is_some() {
            bail!("placeholder `{}` is given two values", name.trim());
        }
    }
    Ok(v)
}

fn load_domain(path: &Path, io: &IoProgram) -> Result<Domain> {
    let value: Value = serde_json::from_str(&read(path)?).with_context(|| format!("{} is not JSON", path.display()))?;
    let mut valuations = vec![Valuation::new()];
    if let Some(map) = value.get("placeholders") {
        let map = map.as_object().ok_or_else(|| anyhow!("`placeholders` must be an object"))?;
        for (name, choices) in map {
            if !io.placeholders().contains(name) {
                bail!("`{name}` is not a placeholder of the programs");
            }
            let choices = choices.as_array().ok_or_else(|| anyhow!("values of `{name}` must be a list"))?;
            let mut next = Vec::new();
            for v in &valuations {
                for c in choices {
                    let text = c.as_str().map(str::to_string).unwrap_or_else(|| c.to_string());
                    let mut w = v.clone();
                    w.insert(name.clone(), parse_precomputed(&text)?);
                    next.push(w);
                }
            }
            valuations = next;
        }
    }
    let mut base = AtomSet::new();
    if let Some(list) = value.get("atoms") {
        let list = list.as_array().ok_or_else(|| anyhow!("`atoms` must be a list"))?;
        for a in list {
            let text = a.as_str().ok_or_else(|| anyhow!("atoms must be strings"))?;
            base.insert(parse_ground_atom(text).map_err(|e| anyhow!("`{text}`: {e}"))?);
        }
    }
    Ok(Domain { valuations, base })
}

fn print_json(value: &impl serde::Serialize) -> Result<()> {
    say!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn print_sets(sets: &[AtomSet], format: Format) -> Result<()> {
    match format {
        Format::Json => print_json(&sets),
        _ => {
            for (i, s) in sets.iter().enumerate() {
                say!("Model {}: {s}", i + 1);
            }
            if sets.is_empty() {
                say!("no models");
            }
            Ok(())
        }
    }
}

fn finish_report(mut report: Report, start: Instant, timings: bool) -> Result<ExitCode> {
    if timings {
        report.timings = Some(BTreeMap::from([("total_seconds".to_string(), start.elapsed().as_secs_f64())]));
    }
    print_json(&report)?;
    Ok(ExitCode::from(report.verdict.exit_code() as u8))
}

fn verify(v: &Verify, timings: bool) -> Result<ExitCode> {
    let start = Instant::now();
    let report = match v {
        Verify::Thm1 { file, universe } => {
            let io = load_program(file)?;
            let u = program_universe(&io, &Input::default(), universe)?;
            verify_theorem1(io.program(), &u)?
        }
        Verify::Thm2 { file, input, public, witness, enumerate, universe } => {
            let io = load_program(file)?;
            let input = load_input(Some(input), &io)?;
            let p = parse_atoms(&read(public)?)?;
            let u = program_universe(&io, &input, universe)?;
            let mode = match (witness, enumerate) {
                (Some(w), _) => SoMode::Witness(parse_atoms(&read(w)?)?),
                (None, true) => SoMode::Enumerate { limit: universe.limit.min(24) },
                (None, false) => SoMode::Search,
            };
            verify_theorem2(&io, &input, &p, &u, &mode)?
        }
        Verify::MainLemma { file, intensional, interp, lets, universe } => {
            let sentences = parse_formulas(&read(file)?).map_err(|e| anyhow!("{}: {}", file.display(), e))?;
            let intensional = intensional.iter().map(|p| parse_predicate(p)).collect::<Result<BTreeSet<_>>>()?;
            let gamma = CompletableSet::from_sentences(&sentences, intensional)?;
            let atoms = parse_atoms(interp)?;
            let valuation = parse_lets(lets)?;
            let u = formula_universe(&sentences, &atoms, &valuation, universe)?;
            verify_main_lemma(&gamma, &StandardInterp::with_valuation(atoms, valuation), &u)?
        }
        Verify::Equiv { first, second, assume, domain, margin } => {
            let io1 = load_program(first)?;
            let io2 = load_program(second)?;
            let assumption = match assume {
                Some(p) => Some(FoFormula::conjoin(
                    parse_formulas(&read(p)?).map_err(|e| anyhow!("{}: {}", p.display(), e))?,
                )),
                None => None,
            };
            let domain = load_domain(domain, &io1)?;
            check_equivalence(&io1, &io2, assumption.as_ref(), &domain, *margin)?
        }
    };
    finish_report(report, start, timings)
}

fn run(cli: Cli) -> Result<ExitCode> {
    let format = cli.format;
    match &cli.command {
        Command::Eval { term } => {
            let t = parse_term(term).map_err(|e| anyhow!("{e}"))?;
            let values = eval_term(&t);
            match format {
                Format::Json => print_json(&values.iter().map(|v| v.to_string()).collect::<Vec<_>>())?,
                _ => {
                    let items: Vec<String> = values.iter().map(|v| v.to_string()).collect();
                    say!("{{{}}}", items.join(","));
                }
            }
        }
        Command::Parse { file } => print_json(&load_program(file)?)?,
        Command::Ground { file, input, universe } => {
            let io = load_program(file)?;
            let input = load_input(input.as_deref(), &io)?;
            let u = program_universe(&io, &input, universe)?;
            let program = io.program().apply_valuation(&input.valuation).union(&input.facts());
            let fs = tau_program(&program, &u);
            match format {
                Format::Json => print_json(&json!({ "universe": u, "formulas": fs }))?,
                _ => fs.iter().for_each(|f| say!("{f}")),
            }
        }
        Command::Stable { file, input, universe } => {
            let io = load_program(file)?;
            let input = load_input(input.as_deref(), &io)?;
            let u = program_universe(&io, &input, universe)?;
            print_sets(&stable_models_for_input(&io, &input, &u, universe.limit)?, format)?;
        }
        Command::Iomodels { file, input, universe } => {
            let io = load_program(file)?;
            let input = load_input(Some(input), &io)?;
            let u = program_universe(&io, &input, universe)?;
            print_sets(&io_models_with_limit(&io, &input, &u, universe.limit)?, format)?;
        }
        Command::Translate { file } => {
            let gamma = tau_star_io(&load_program(file)?);
            match format {
                Format::Json => print_json(&json!({
                    "pretty": gamma.sentences().iter().map(|s| s.to_string()).collect::<Vec<_>>(),
                    "sentences": gamma.sentences(),
                }))?,
                _ => gamma.sentences().iter().for_each(|s| say!("{s}")),
            }
        }
        Command::Complete { file } => {
            let s = complete_io(&load_program(file)?);
            match format {
                Format::Json => print_json(&json!({ "pretty": s.to_string(), "sentence": s }))?,
                _ => say!("{s}"),
            }
        }
        Command::Tight { file } => {
            let io = load_program(file)?;
            let g = pred_graph(io.program());
            match format {
                Format::Dot => emit!("{}", g.to_dot("predicate_dependencies")),
                Format::Json => print_json(&json!({
                    "tight": is_tight(io.program()),
                    "cycle": g.find_cycle().map(|c| c.iter().map(|p| p.to_string()).collect::<Vec<_>>()),
                    "edges": g.edges().map(|(a, b)| [a.to_string(), b.to_string()]).collect::<Vec<_>>(),
                }))?,
                Format::Text => match g.find_cycle() {
                    None => say!("TIGHT"),
                    Some(cycle) => {
                        let mut path: Vec<String> = cycle.iter().map(|p| p.to_string()).collect();
                        path.push(cycle[0].to_string());
                        say!("NOT TIGHT: cycle {}", path.join(" -> "));
                    }
                },
            }
        }
        Command::LocallyTight { file, input, universe } => {
            let io = load_program(file)?;
            let input = load_input(Some(input), &io)?;
            let u = program_universe(&io, &input, universe)?;
            let g = atom_graph(&io, &input, &u);
            let verdict = atom_graph_verdict(&g);
            match format {
                Format::Dot => emit!("{}", g.graph.to_dot("atom_dependencies")),
                Format::Json => print_json(&json!({ "universe": u, "result": verdict }))?,
                Format::Text => say!("{verdict}"),
            }
        }
        Command::Verify(v) => return verify(v, cli.timings),
        Command::Sample { kind, seed } => {
            let mut rng = random::generator(*seed);
            match kind {
                SampleKind::Program => emit!("{}", random::random_program(&mut rng)),
                SampleKind::Rule => say!("{}", random::random_rule(&mut rng)),
                SampleKind::Completable => emit!("{}", random::random_completable_set(&mut rng)),
                SampleKind::Tight => emit!("{}", random::random_tight_program(&mut rng)),
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}

