//! `monowick`: normalize, evaluate and transform monotone operator expressions.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand};
use num_traits::Signed;
use serde_json::{json, Value};

use monowick::expr::{
    eval_ast, eval_ast_traced, format_element, index_span, parse, ExprAst, NormalizeReport,
    OutputFormat, ParseError,
};
use monowick::fock::{apply_element, FockBasisVector, FockVector};
use monowick::scalar::format_scalar;
use monowick::states::{evaluate, StateSpec};
use monowick::suites;
use monowick::symmetry::{act, spread_witness, t_sigma, Generator, IndexMap, MonoidElement, Permutation, ShiftKind};
use monowick::wick::RewriteTrace;
use monowick::{Element, Index};

const SPREAD_WARNING: i128 = 1_000_000;

/// Exact computations in the monotone *-algebra.
///
/// Expressions use c(i) for creators, a(i) for annihilators, I for the
/// identity and a postfix ' for the adjoint. Juxtaposition multiplies
/// (left-associative, same precedence as '*'); the adjoint binds tighter.
/// Rational coefficients are written p or p/q, e.g. `2/3*c(1) a(0) - I`.
#[derive(Parser, Debug)]
#[command(name = "monowick", version, about)]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Include the rewrite steps used to normalize the input.
    #[arg(long, global = true)]
    trace: bool,
    /// Write the output to this file instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the basis expansion of an expression.
    Normalize { expr: String },
    /// Evaluate a state: vacuum, infinity or mixed:x with x in [0,1].
    Eval {
        /// vacuum, infinity or mixed:x.
        #[arg(long)]
        state: String,
        expr: String,
    },
    /// Apply an expression to a Fock basis vector such as "(0,2)" or "()".
    Apply {
        /// Increasing indices, e.g. "(0,2)".
        #[arg(long, allow_hyphen_values = true)]
        vector: String,
        expr: String,
    },
    /// Relabel indices with a partial shift, the shift or a permutation.
    #[command(group(ArgGroup::new("map").required(true).args(["theta", "psi", "tau", "perm", "word"])))]
    Act {
        /// Partial shift skipping h: k -> k+1 for k >= h.
        #[arg(long, value_name = "H", allow_hyphen_values = true)]
        theta: Option<Index>,
        /// Partial shift skipping h: k -> k-1 for k <= h.
        #[arg(long, value_name = "H", allow_hyphen_values = true)]
        psi: Option<Index>,
        /// Shift every index by k.
        #[arg(long, value_name = "K", allow_hyphen_values = true)]
        tau: Option<Index>,
        /// Cycle notation, e.g. "(0 1)(3 5 4)".
        #[arg(long)]
        perm: Option<String>,
        /// A generator word such as "theta:2^3 psi:0 tau:-1", rightmost first.
        #[arg(long = "map", allow_hyphen_values = true)]
        word: Option<String>,
        expr: String,
    },
    /// Find a partial-shift word agreeing with the given increasing targets on [m, n].
    Witness {
        #[arg(long, required = true, num_args = 2, value_names = ["M", "N"], allow_hyphen_values = true)]
        interval: Vec<Index>,
        /// Comma-separated l(m),...,l(n).
        #[arg(long, allow_hyphen_values = true)]
        targets: String,
    },
    /// Run a verification suite by name or number, or "all".
    Check { suite: String },
}

enum Failure {
    Parse(String),
    Precondition(String),
    Suite(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Parse(_) => 1,
            Failure::Precondition(_) | Failure::Io(_) => 2,
            Failure::Suite(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Parse(m) | Failure::Precondition(m) | Failure::Suite(m) | Failure::Io(m) => m,
        }
    }
}

fn parse_expr(src: &str) -> Result<ExprAst, Failure> {
    let ast = parse(src).map_err(|e: ParseError| {
        let caret = format!("{}^", " ".repeat(src[..e.offset().min(src.len())].chars().count()));
        Failure::Parse(format!("{e}\n  {src}\n  {caret}"))
    })?;
    if let Some((lo, hi)) = index_span(&ast) {
        if hi as i128 - lo as i128 > SPREAD_WARNING {
            eprintln!(
                "warning: indices span [{lo}, {hi}]; expansions may produce more than {SPREAD_WARNING} terms"
            );
        }
    }
    Ok(ast)
}

fn evaluate_input(ast: &ExprAst, with_trace: bool) -> (Element, Option<RewriteTrace>) {
    if with_trace {
        let (x, t) = eval_ast_traced(ast);
        (x, Some(t))
    } else {
        (eval_ast(ast), None)
    }
}

fn trace_text(trace: &RewriteTrace) -> String {
    let mut out = String::new();
    for step in &trace.steps {
        let mut after = String::new();
        for (n, (w, c)) in step.after.iter().enumerate() {
            let sign = if c.is_negative() { "−" } else { "+" };
            if n > 0 {
                after.push_str(&format!(" {sign} "));
            } else if c.is_negative() {
                after.push('−');
            }
            after.push_str(&format!("{}·{}", format_scalar(&c.abs()), w));
        }
        if after.is_empty() {
            after.push('0');
        }
        let rule = serde_json::to_value(step.rule).expect("rule name");
        let _ = writeln!(
            out,
            "{:<18} @{:<2} {} -> {}",
            rule.as_str().unwrap_or_default(),
            step.position,
            step.before,
            after
        );
    }
    out
}

struct Output {
    text: String,
    json: Value,
}

fn with_trace(mut json: Value, trace: &Option<RewriteTrace>) -> Value {
    if let (Some(t), Value::Object(map)) = (trace, &mut json) {
        map.insert("trace".into(), serde_json::to_value(t).expect("trace"));
    }
    json
}

fn text_with_trace(text: String, trace: &Option<RewriteTrace>) -> String {
    match trace {
        Some(t) => format!("{}{}", trace_text(t), text),
        None => text,
    }
}

fn element_json(x: &Element) -> Value {
    serde_json::to_value(x).expect("element")
}

fn build_map(
    theta: Option<Index>,
    psi: Option<Index>,
    tau: Option<Index>,
    word: Option<String>,
) -> Result<MonoidElement, Failure> {
    Ok(match (theta, psi, tau, word) {
        (Some(h), ..) => MonoidElement::new(vec![Generator::theta(h, 1)]),
        (_, Some(h), ..) => MonoidElement::new(vec![Generator::psi(h, 1)]),
        (_, _, Some(k), _) => MonoidElement::new(vec![Generator::Tau(k)]),
        (_, _, _, Some(w)) => w.parse().map_err(|e| Failure::Parse(format!("{e}")))?,
        _ => unreachable!("clap requires one map"),
    })
}

fn generator_json(g: &Generator) -> Value {
    match *g {
        Generator::Partial { shift, power } => json!({
            "kind": match shift.kind { ShiftKind::Theta => "theta", ShiftKind::Psi => "psi" },
            "base": shift.base,
            "power": power,
        }),
        Generator::Tau(k) => json!({ "kind": "tau", "power": k }),
    }
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    match &cli.command {
        Command::Normalize { expr } => {
            let ast = parse_expr(expr)?;
            let (result, trace) = evaluate_input(&ast, cli.trace);
            let text = text_with_trace(format_element(&result, OutputFormat::Text), &trace);
            let report = NormalizeReport {
                input: expr.clone(),
                result,
                trace,
            };
            Ok(Output {
                text,
                json: serde_json::to_value(&report).expect("report"),
            })
        }
        Command::Eval { state, expr } => {
            let spec: StateSpec = state.parse().map_err(|e| Failure::Precondition(format!("{e}")))?;
            let ast = parse_expr(expr)?;
            let (x, trace) = evaluate_input(&ast, cli.trace);
            let value = format_scalar(&evaluate(&spec, &x));
            Ok(Output {
                text: text_with_trace(value.clone(), &trace),
                json: with_trace(
                    json!({ "input": expr, "state": spec.to_string(), "value": value }),
                    &trace,
                ),
            })
        }
        Command::Apply { vector, expr } => {
            let e = FockBasisVector::parse(vector).map_err(|e| match e {
                monowick::fock::FockError::NotIncreasing(_) => Failure::Precondition(format!("{e}")),
                _ => Failure::Parse(format!("{e}")),
            })?;
            let ast = parse_expr(expr)?;
            let (x, trace) = evaluate_input(&ast, cli.trace);
            let result = apply_element(&x, &FockVector::basis(e.clone()));
            Ok(Output {
                text: text_with_trace(result.to_string(), &trace),
                json: with_trace(
                    json!({
                        "input": expr,
                        "vector": e.indices(),
                        "result": serde_json::to_value(&result).expect("vector"),
                    }),
                    &trace,
                ),
            })
        }
        Command::Act {
            theta,
            psi,
            tau,
            perm,
            word,
            expr,
        } => {
            let ast = parse_expr(expr)?;
            let (x, trace) = evaluate_input(&ast, cli.trace);
            let (label, result) = match perm {
                Some(p) => {
                    let sigma: Permutation = p.parse().map_err(|e| Failure::Parse(format!("{e}")))?;
                    (sigma.to_string(), t_sigma(&sigma, &x))
                }
                None => {
                    let g = build_map(*theta, *psi, *tau, word.clone())?;
                    let y = act(&g, &x).map_err(|e| Failure::Precondition(format!("{e}")))?;
                    (g.to_string(), y)
                }
            };
            Ok(Output {
                text: text_with_trace(format_element(&result, OutputFormat::Text), &trace),
                json: with_trace(
                    json!({ "input": expr, "map": label, "result": element_json(&result) }),
                    &trace,
                ),
            })
        }
        Command::Witness { interval, targets } => {
            let (m, n) = (interval[0], interval[1]);
            let targets: Vec<Index> = targets
                .split(',')
                .map(|t| t.trim().parse::<Index>())
                .collect::<Result<_, _>>()
                .map_err(|e| Failure::Parse(format!("bad target list: {e}")))?;
            let r = spread_witness(m, n, &targets).map_err(|e| Failure::Precondition(format!("{e}")))?;
            let values: Vec<Index> = (m..=n).map(|j| r.eval(j)).collect();
            Ok(Output {
                text: r.to_string(),
                json: json!({
                    "interval": [m, n],
                    "targets": targets,
                    "witness": r.to_string(),
                    "factors": r.factors().iter().map(generator_json).collect::<Vec<_>>(),
                    "values": values,
                }),
            })
        }
        Command::Check { suite } => {
            let selected: Vec<&suites::Suite> = if suite == "all" {
                suites::all().iter().collect()
            } else {
                vec![suites::find(suite).ok_or_else(|| {
                    let names: Vec<&str> = suites::all().iter().map(|s| s.name).collect();
                    Failure::Parse(format!("unknown suite `{suite}`; available: all, {}", names.join(", ")))
                })?]
            };
            let reports: Vec<suites::SuiteReport> = selected.iter().map(|s| s.run()).collect();
            let text = reports.iter().map(|r| r.to_string()).collect::<Vec<_>>().join("\n");
            let json = serde_json::to_value(&reports).expect("reports");
            let failed: Vec<&str> = reports.iter().filter(|r| !r.passed).map(|r| r.name).collect();
            let output = Output { text, json };
            if failed.is_empty() {
                Ok(output)
            } else {
                emit(cli, &output)?;
                Err(Failure::Suite(format!("failed: {}", failed.join(", "))))
            }
        }
    }
}

fn emit(cli: &Cli, output: &Output) -> Result<(), Failure> {
    let rendered = if cli.json {
        serde_json::to_string(&output.json).expect("json")
    } else {
        output.text.clone()
    };
    match &cli.out {
        Some(path) => std::fs::write(path, rendered + "\n")
            .map_err(|e| Failure::Io(format!("{}: {e}", path.display()))),
        None => {
            println!("{rendered}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(&cli).and_then(|out| emit(&cli, &out)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
