//! The command-line interface: argument parsing, dispatch and the exit-code
//! taxonomy.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::analysis::{self, AnalysisError, Budget, SearchOptions, SearchOutcome, Semantics, Strategy, Verdict};
use crate::automata::{self, AutomataError, Symbol, Variant};
use crate::model::{DataGraph, Document, ModelError, ParseError, ShapeName};
use crate::mu::{eval, MuFormula, Valuation};
use crate::supported::{enumerate_supported_models, SupportedError};
use crate::translate::{theta, translate, TranslateError};
use crate::wf::{validate_document, well_founded_model, WfError};

/// Exit code: the verdict is true (valid, satisfiable, a model exists).
pub const EXIT_TRUE: i32 = 0;
/// Exit code: the verdict is false (invalid, counterexample found).
pub const EXIT_FALSE: i32 = 1;
/// Exit code: a bounded search found nothing up to its bound.
pub const EXIT_INCONCLUSIVE: i32 = 2;
/// Exit code: an input file did not parse.
pub const EXIT_PARSE: i32 = 3;
/// Exit code: malformed or incompatible input, or a usage error.
pub const EXIT_INPUT: i32 = 4;
/// Exit code: a budget stopped the computation before a verdict.
pub const EXIT_BUDGET: i32 = 5;

/// Static analysis for recursive SHACL under the well-founded semantics.
#[derive(Debug, Parser)]
#[command(name = "wfshacl", version)]
pub struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Omit timing information so output is reproducible.
    #[arg(long, global = true)]
    pub deterministic: bool,
    /// The command.
    #[command(subcommand)]
    pub command: Command,
}

/// Validation semantics.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SemanticsArg {
    /// Well-founded semantics.
    Wf,
    /// Supported-model semantics (brave).
    Supported,
}

/// Search strategy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    /// One SAT query per domain size.
    Symbolic,
    /// Explicit graph enumeration.
    Enumerate,
}

/// Automaton variant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    /// Nominal claims re-checked at the nominal.
    Anchored,
    /// Nominal claims read off the guess.
    Table,
}

/// Options shared by the bounded searches.
#[derive(Debug, clap::Args)]
pub struct SearchArgs {
    /// Largest number of nodes explored.
    #[arg(long, default_value_t = 4)]
    pub max_nodes: usize,
    /// Wall-clock budget in milliseconds.
    #[arg(long)]
    pub budget_ms: Option<u64>,
    /// Exploration strategy.
    #[arg(long, value_enum, default_value_t = StrategyArg::Symbolic)]
    pub strategy: StrategyArg,
    /// Validation semantics.
    #[arg(long, value_enum, default_value_t = SemanticsArg::Wf)]
    pub semantics: SemanticsArg,
    /// Acknowledge that a search under supported semantics is only a bounded search.
    #[arg(long)]
    pub bounded_only: bool,
}

/// Subcommands.
#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check whether a graph validates a document.
    Validate {
        /// Data graph file.
        graph: PathBuf,
        /// Document file.
        document: PathBuf,
        /// Validation semantics.
        #[arg(long, value_enum, default_value_t = SemanticsArg::Wf)]
        semantics: SemanticsArg,
        /// Print the well-founded iteration.
        #[arg(long)]
        trace: bool,
    },
    /// List the supported models (or the well-founded model).
    Models {
        /// Data graph file.
        graph: PathBuf,
        /// Document file (targets are ignored).
        document: PathBuf,
        /// Which models to list.
        #[arg(long, value_enum, default_value_t = SemanticsArg::Supported)]
        semantics: SemanticsArg,
    },
    /// Translate a shape (or, without a shape, the document's targets) into a formula.
    Translate {
        /// Document file.
        document: PathBuf,
        /// Shape name.
        shape: Option<String>,
        /// Remove vacuous binders and trivial operands.
        #[arg(long)]
        clean: bool,
    },
    /// Evaluate a closed formula on a graph.
    Eval {
        /// Data graph file.
        graph: PathBuf,
        /// Formula file.
        formula: Option<PathBuf>,
        /// Formula text instead of a file.
        #[arg(long, short = 'e', conflicts_with = "formula")]
        expr: Option<String>,
    },
    /// Search for a graph where some node validates a shape.
    Sat {
        /// Document file.
        document: PathBuf,
        /// Shape name.
        shape: String,
        /// Search options.
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Search for a graph validating a document.
    Docsat {
        /// Document file.
        document: PathBuf,
        /// Search options.
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Search for a graph validating the first document but not the second.
    Implies {
        /// Premise document.
        premise: PathBuf,
        /// Conclusion document.
        conclusion: PathBuf,
        /// Search options.
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Dump or run the tree automaton of a shape (or of the document's targets).
    Automaton {
        /// Document file.
        document: PathBuf,
        /// Shape name; the document automaton when omitted.
        shape: Option<String>,
        /// Print states, priorities and transitions instead of searching.
        #[arg(long)]
        dump: bool,
        /// Symbols for the transition dump (`root`, `bot`, `{A, <a>, ^r, ->r <a>}`).
        #[arg(long = "symbol")]
        symbols: Vec<String>,
        /// Index of the guess to dump.
        #[arg(long, default_value_t = 0)]
        guess: usize,
        /// Automaton variant.
        #[arg(long, value_enum, default_value_t = VariantArg::Anchored)]
        variant: VariantArg,
        /// Largest number of nodes explored.
        #[arg(long, default_value_t = 3)]
        max_nodes: usize,
    },
}

/// The result of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    /// Process exit code.
    pub code: i32,
    /// Text for standard output.
    pub stdout: String,
}

/// Structured output, printed with `--json`.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Report {
    /// `true`, `false`, `inconclusive`, `budget-exhausted` or `error`.
    pub verdict: String,
    /// Witness graph, one assertion per line.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    /// Candidates examined by a search.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub graphs_examined: Option<u64>,
    /// Requested search bound.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<usize>,
    /// Search time.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
    /// Well-founded iteration lines.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<String>>,
    /// Models, each as a list of literals.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub models: Option<Vec<Vec<String>>>,
    /// A formula.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub formula: Option<String>,
    /// A node set.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nodes: Option<Vec<String>>,
    /// An automaton dump.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dump: Option<String>,
    /// An error message.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

enum Failure {
    Parse(String),
    Input(String),
    Budget(String),
}

impl From<ModelError> for Failure {
    fn from(e: ModelError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<WfError> for Failure {
    fn from(e: WfError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<TranslateError> for Failure {
    fn from(e: TranslateError) -> Self {
        match e {
            TranslateError::TranslationBudget(_) => Failure::Budget(e.to_string()),
            other => Failure::Input(other.to_string()),
        }
    }
}

impl From<SupportedError> for Failure {
    fn from(e: SupportedError) -> Self {
        Failure::Budget(e.to_string())
    }
}

impl From<AnalysisError> for Failure {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::Supported(_) | AnalysisError::SearchSpace { .. } => Failure::Budget(e.to_string()),
            AnalysisError::Translate(t) => t.into(),
            other => Failure::Input(other.to_string()),
        }
    }
}

impl From<AutomataError> for Failure {
    fn from(e: AutomataError) -> Self {
        match e {
            AutomataError::TooManyGuesses | AutomataError::SearchSpace { .. } => Failure::Budget(e.to_string()),
            other => Failure::Input(other.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn parse_err(path: &Path, e: ParseError) -> Failure {
    Failure::Parse(format!("{}: {e}", path.display()))
}

fn load_graph(path: &Path) -> Result<DataGraph, Failure> {
    DataGraph::parse(&read(path)?).map_err(|e| parse_err(path, e))
}

fn load_document(path: &Path) -> Result<Document, Failure> {
    Document::parse(&read(path)?).map_err(|e| parse_err(path, e))
}

struct Done {
    code: i32,
    text: String,
    report: Report,
}

fn verdict(b: bool) -> (i32, &'static str) {
    if b {
        (EXIT_TRUE, "true")
    } else {
        (EXIT_FALSE, "false")
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_TRUE };
            return Outcome { code, stdout: e.render().to_string() };
        }
    };
    run_cli(&cli)
}

/// Runs an already parsed command line.
pub fn run_cli(cli: &Cli) -> Outcome {
    let done = match dispatch(cli) {
        Ok(d) => d,
        Err(f) => {
            let (code, msg) = match f {
                Failure::Parse(m) => (EXIT_PARSE, m),
                Failure::Input(m) => (EXIT_INPUT, m),
                Failure::Budget(m) => (EXIT_BUDGET, m),
            };
            let verdict = if code == EXIT_BUDGET { "budget-exhausted" } else { "error" };
            Done {
                code,
                text: format!("error: {msg}\n"),
                report: Report { verdict: verdict.into(), error: Some(msg), ..Report::default() },
            }
        }
    };
    let mut report = done.report;
    if cli.deterministic {
        report.elapsed_ms = None;
    }
    let stdout = if cli.json { serde_json::to_string_pretty(&report).expect("reports serialise") + "\n" } else { done.text };
    Outcome { code: done.code, stdout }
}

fn dispatch(cli: &Cli) -> Result<Done, Failure> {
    match &cli.command {
        Command::Validate { graph, document, semantics, trace } => {
            let g = load_graph(graph)?;
            let d = load_document(document)?;
            let mut text = String::new();
            let mut report = Report::default();
            let ok = match semantics {
                SemanticsArg::Wf => {
                    if *trace {
                        let m = well_founded_model(&g, &d.constraints)?;
                        let lines = m.trace.lines();
                        for l in &lines {
                            writeln!(text, "{l}").expect("string write");
                        }
                        report.trace = Some(lines);
                    }
                    validate_document(&g, &d)?
                }
                SemanticsArg::Supported => analysis::validates_supported(&g, &d)?,
            };
            let (code, v) = verdict(ok);
            writeln!(text, "{v}").expect("string write");
            report.verdict = v.into();
            Ok(Done { code, text, report })
        }
        Command::Models { graph, document, semantics } => {
            let g = load_graph(graph)?;
            let d = load_document(document)?;
            let models = match semantics {
                SemanticsArg::Supported => enumerate_supported_models(&g, &d.constraints)?,
                SemanticsArg::Wf => vec![well_founded_model(&g, &d.constraints)?.model],
            };
            let mut text = String::new();
            for (i, m) in models.iter().enumerate() {
                let lits = m.literals();
                let body = if lits.is_empty() { "∅".to_string() } else { lits.join(" ") };
                writeln!(text, "S{}: {body}", i + 1).expect("string write");
            }
            let (code, v) = verdict(!models.is_empty());
            if models.is_empty() {
                text.push_str("no models\n");
            }
            let report = Report { verdict: v.into(), models: Some(models.iter().map(|m| m.literals()).collect()), ..Report::default() };
            Ok(Done { code, text, report })
        }
        Command::Translate { document, shape, clean } => {
            let d = load_document(document)?;
            let f = match shape {
                Some(s) => translate(&d.constraints, &ShapeName::new(s.as_str()))?,
                None => theta(&d)?,
            };
            let f = if *clean { f.clean() } else { f };
            let text = format!("{f}\n");
            Ok(Done { code: EXIT_TRUE, text, report: Report { verdict: "true".into(), formula: Some(f.to_string()), ..Report::default() } })
        }
        Command::Eval { graph, formula, expr } => {
            let g = load_graph(graph)?;
            let f = match (formula, expr) {
                (_, Some(t)) => MuFormula::parse(t).map_err(|e| Failure::Parse(format!("formula: {e}")))?,
                (Some(p), None) => MuFormula::parse(&read(p)?).map_err(|e| parse_err(p, e))?,
                (None, None) => return Err(Failure::Input("a formula file or --expr is required".into())),
            };
            let nodes = eval(&f, &g, &Valuation::new()).map_err(|e| Failure::Input(e.to_string()))?;
            let names: Vec<String> = nodes.iter().map(ToString::to_string).collect();
            let (code, v) = verdict(!names.is_empty());
            let text = format!("{{{}}}\n", names.join(", "));
            Ok(Done { code, text, report: Report { verdict: v.into(), nodes: Some(names), ..Report::default() } })
        }
        Command::Sat { document, shape, search } => {
            let d = load_document(document)?;
            let opts = options(search)?;
            let out = analysis::shape_sat_with(&d.constraints, &ShapeName::new(shape.as_str()), &opts)?;
            Ok(search_done(&out, "satisfiable", "no model"))
        }
        Command::Docsat { document, search } => {
            let d = load_document(document)?;
            let opts = options(search)?;
            let out = analysis::doc_sat_with(&d, &opts)?;
            Ok(search_done(&out, "satisfiable", "no model"))
        }
        Command::Implies { premise, conclusion, search } => {
            let d1 = load_document(premise)?;
            let d2 = load_document(conclusion)?;
            let opts = options(search)?;
            let out = analysis::implies_with(&d1, &d2, &opts)?;
            let mut done = search_done(&out, "counterexample", "no counterexample");
            if out.found() {
                done.code = EXIT_FALSE;
                done.report.verdict = "false".into();
            }
            Ok(done)
        }
        Command::Automaton { document, shape, dump, symbols, guess, variant, max_nodes } => {
            let d = load_document(document)?;
            let variant = match variant {
                VariantArg::Anchored => Variant::Anchored,
                VariantArg::Table => Variant::Table,
            };
            if *dump {
                let guesses = match shape {
                    Some(_) => automata::enumerate_guesses(&d.constraints)?,
                    None => automata::enumerate_document_guesses(&d)?,
                };
                let g = guesses.into_iter().nth(*guess).ok_or_else(|| Failure::Input(format!("there is no guess {guess}")))?;
                let aut = match shape {
                    Some(s) => automata::build_2ata_with(&d.constraints, &ShapeName::new(s.as_str()), &g, variant)?,
                    None => automata::build_doc_2ata_with(&d, &g, variant)?,
                };
                let syms: Vec<Symbol> = if symbols.is_empty() {
                    vec![Symbol::Root, Symbol::Label(Default::default()), Symbol::Bot]
                } else {
                    symbols.iter().map(|s| Symbol::parse(s)).collect::<Result<_, _>>()?
                };
                let text = aut.dump(&syms);
                return Ok(Done {
                    code: EXIT_TRUE,
                    text: text.clone(),
                    report: Report { verdict: "true".into(), dump: Some(text), ..Report::default() },
                });
            }
            let out = match shape {
                Some(s) => automata::shape_sat_via_automata(&d.constraints, &ShapeName::new(s.as_str()), *max_nodes, variant)?,
                None => automata::doc_sat_via_automata(&d, *max_nodes, variant)?,
            };
            Ok(search_done(&out, "accepted", "no accepted encoding"))
        }
    }
}

fn options(search: &SearchArgs) -> Result<SearchOptions, Failure> {
    let semantics = match search.semantics {
        SemanticsArg::Wf => Semantics::Wf,
        SemanticsArg::Supported => {
            if !search.bounded_only {
                return Err(Failure::Input(
                    "static analysis under supported semantics is undecidable; pass --bounded-only to run a bounded search".into(),
                ));
            }
            Semantics::Supported
        }
    };
    let strategy = match search.strategy {
        StrategyArg::Symbolic => Strategy::Symbolic,
        StrategyArg::Enumerate => Strategy::Enumerate,
    };
    Ok(SearchOptions::new(search.max_nodes)
        .with_strategy(strategy)
        .with_semantics(semantics)
        .with_budget(Budget { max_millis: search.budget_ms, max_graphs: None }))
}

fn search_done(out: &SearchOutcome, found: &str, missing: &str) -> Done {
    let mut report = Report {
        graphs_examined: Some(out.graphs_examined),
        bound: Some(out.bound),
        elapsed_ms: Some(out.elapsed_ms),
        ..Report::default()
    };
    let mut text = String::new();
    let code = match &out.verdict {
        Verdict::Witness(g) => {
            report.verdict = "true".into();
            report.witness = Some(g.to_string());
            writeln!(text, "{found}; witness:").expect("string write");
            text.push_str(&g.to_string());
            if g.is_empty() {
                text.push_str("(empty graph)\n");
            }
            EXIT_TRUE
        }
        Verdict::NoWitnessUpTo(n) if out.budget_exhausted => {
            report.verdict = "budget-exhausted".into();
            writeln!(text, "budget exhausted; {missing} up to {n} nodes").expect("string write");
            EXIT_BUDGET
        }
        Verdict::NoWitnessUpTo(n) => {
            report.verdict = "inconclusive".into();
            writeln!(text, "inconclusive: {missing} up to {n} nodes").expect("string write");
            EXIT_INCONCLUSIVE
        }
    };
    writeln!(text, "graphs examined: {}, bound: {}", out.graphs_examined, out.bound).expect("string write");
    Done { code, text, report }
}
