//! Command-line front end.
//!
//! Verbs: `gen`, `color`, `verify`, `simulate`, `bound` and `report`. Exit
//! status is 0 on success, 1 when the arguments or input files are rejected
//! and 2 when a coloring fails verification or simulation. Every non-zero
//! exit writes one JSON object `{"status":..,"reason":..,"message":..}` to
//! the error stream.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::capacity_bounds::{construct_for, gain_report, upper_bound, BoundResult};
use crate::channel_sim::{run_trials, symbolic_verify, SymbolicReport, MAX_Q};
use crate::coloring::{
    achievable_alpha, check_coloring, parse_coloring, search_end_to_end, search_mcl, search_mil, tdma, write_coloring,
    ColorAssignment, SearchError, ValidityReport, DEFAULT_BUDGET, MAX_COLORS,
};
use crate::network_model::{parse_descriptor, write_descriptor, ChannelMode, LayeredNetwork};
use crate::route_expansion::{expand, RouteExpandedGraph};
use crate::topology_gen::{
    gen_folded_single, gen_folded_two_layer, gen_k22k, gen_nested, gen_random, two_relay_chain, two_relay_crossed,
    K22kPattern,
};

#[derive(Parser, Debug)]
#[command(name = "clsched", version, about = "Coded Layer scheduling toolkit")]
struct Cli {
    /// Output format for reports.
    #[arg(long, value_enum, global = true, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a network descriptor.
    Gen(GenArgs),
    /// Compute a coloring and write it in coloring-file form.
    Color(ColorArgs),
    /// Check a coloring and verify its cancellation symbolically.
    Verify { net: PathBuf, coloring: PathBuf },
    /// Run seeded random-gain simulations of a coloring.
    Simulate(SimulateArgs),
    /// Print the capacity upper bound of a network.
    Bound { net: PathBuf },
    /// Compare every scheme against the upper bound.
    Report {
        net: PathBuf,
        /// Configuration budget of the Coded Layer search.
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum GenFamily {
    FoldedSingle,
    FoldedTwoLayer,
    Nested,
    K22k,
    Random,
    /// Three pairs over two relays where relay A reaches D1 and D2.
    TwoRelayChain,
    /// Three pairs over two relays where relay A reaches D1 and D3.
    TwoRelayCrossed,
}

#[derive(Args, Debug)]
struct GenArgs {
    family: GenFamily,
    /// Number of pairs (folded chains).
    #[arg(long)]
    k: Option<u32>,
    /// Fold width (folded chains).
    #[arg(long)]
    m: Option<u32>,
    /// Nesting depth (nested chains).
    #[arg(long)]
    levels: Option<u32>,
    /// Connectivity pattern (k22k), for example `11,10,01|10,11,01`.
    #[arg(long)]
    pattern: Option<String>,
    /// Comma-separated layer sizes (random).
    #[arg(long, value_delimiter = ',')]
    layers: Vec<usize>,
    /// Edge probability (random).
    #[arg(long)]
    p: Option<f64>,
    /// Seed (random).
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; standard output when absent.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Strategy {
    Mcl,
    Mil,
    E2e,
    Tdma,
    Constructive,
}

#[derive(Args, Debug)]
struct ColorArgs {
    net: PathBuf,
    #[arg(long, value_enum)]
    strategy: Strategy,
    /// Largest number of colors the search may use.
    #[arg(long)]
    max_colors: Option<usize>,
    /// Configuration budget of the Coded Layer search.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// Output file; standard output when absent.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    net: PathBuf,
    coloring: PathBuf,
    /// Signal width in bits.
    #[arg(long, default_value_t = 5)]
    q: u32,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// Why a command stopped.
#[derive(Debug)]
enum Failure {
    /// Rejected arguments or input: exit 1.
    Invalid { reason: &'static str, message: String },
    /// A coloring failed a check: exit 2.
    Unverified { reason: &'static str, message: String },
}

impl Failure {
    fn invalid(reason: &'static str, message: impl ToString) -> Self {
        Failure::Invalid { reason, message: message.to_string() }
    }

    fn unverified(reason: &'static str, message: impl ToString) -> Self {
        Failure::Unverified { reason, message: message.to_string() }
    }

    fn code(&self) -> i32 {
        match self {
            Failure::Invalid { .. } => 1,
            Failure::Unverified { .. } => 2,
        }
    }
}

#[derive(Serialize)]
struct ErrorLine<'a> {
    status: i32,
    reason: &'a str,
    message: &'a str,
}

/// Runs the command line `args` (program name first) and returns the exit
/// status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = write!(out, "{e}");
            return 0;
        }
        Err(e) => {
            let _ = write!(err, "{e}");
            return report_failure(err, &Failure::invalid("usage", e.kind()));
        }
    };
    match execute(&cli, out) {
        Ok(()) => 0,
        Err(failure) => report_failure(err, &failure),
    }
}

fn report_failure(err: &mut dyn Write, failure: &Failure) -> i32 {
    let (Failure::Invalid { reason, message } | Failure::Unverified { reason, message }) = failure;
    let line = ErrorLine { status: failure.code(), reason, message };
    let _ = writeln!(err, "{}", serde_json::to_string(&line).expect("plain struct serializes"));
    failure.code()
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<(), Failure> {
    let text = match &cli.command {
        Command::Gen(args) => {
            let net = generate(args)?;
            return emit(out, args.output.as_deref(), &write_descriptor(&net));
        }
        Command::Color(args) => {
            let net = read_network(&args.net)?;
            let g = expand(&net);
            let a = color(&g, &net, args)?;
            return emit(out, args.output.as_deref(), &write_coloring(&g, &a));
        }
        Command::Verify { net, coloring } => {
            let (text, failure) = verify(cli.format, net, coloring)?;
            emit(out, None, &text)?;
            return failure.map_or(Ok(()), Err);
        }
        Command::Simulate(args) => {
            let (text, failure) = simulate(cli.format, args)?;
            emit(out, None, &text)?;
            return failure.map_or(Ok(()), Err);
        }
        Command::Bound { net } => {
            let net = read_network(net)?;
            let b = upper_bound(&net);
            match cli.format {
                Format::Json => json(&b),
                Format::Text => bound_text(&net, &b),
            }
        }
        Command::Report { net, budget } => {
            let net = read_network(net)?;
            let report = gain_report(&net, *budget);
            match cli.format {
                Format::Json => json(&report),
                Format::Text => report.to_text(),
            }
        }
    };
    emit(out, None, &text)
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

fn emit(out: &mut dyn Write, path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(path) => fs::write(path, text).map_err(|e| Failure::invalid("io", format!("{}: {e}", path.display()))),
        None => out.write_all(text.as_bytes()).map_err(|e| Failure::invalid("io", e)),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::invalid("io", format!("{}: {e}", path.display())))
}

fn read_network(path: &Path) -> Result<LayeredNetwork, Failure> {
    parse_descriptor(&read(path)?).map_err(|e| Failure::invalid("network", format!("{}: {e}", path.display())))
}

fn read_coloring(g: &RouteExpandedGraph, path: &Path) -> Result<ColorAssignment, Failure> {
    parse_coloring(g, &read(path)?).map_err(|e| Failure::invalid("coloring", format!("{}: {e}", path.display())))
}

fn need<T: Copy>(value: Option<T>, flag: &str, family: GenFamily) -> Result<T, Failure> {
    value.ok_or_else(|| Failure::invalid("usage", format!("{} needs --{flag}", family_name(family))))
}

fn family_name(family: GenFamily) -> String {
    family.to_possible_value().map_or_else(String::new, |v| v.get_name().to_string())
}

fn generate(args: &GenArgs) -> Result<LayeredNetwork, Failure> {
    let f = args.family;
    let result = match f {
        GenFamily::FoldedSingle => gen_folded_single(need(args.k, "k", f)?, need(args.m, "m", f)?),
        GenFamily::FoldedTwoLayer => gen_folded_two_layer(need(args.k, "k", f)?, need(args.m, "m", f)?),
        GenFamily::Nested => gen_nested(need(args.levels, "levels", f)?),
        GenFamily::K22k => {
            let text = args.pattern.as_deref().ok_or_else(|| Failure::invalid("usage", "k22k needs --pattern"))?;
            let pattern: K22kPattern = text.parse().map_err(|e| Failure::invalid("parameters", e))?;
            gen_k22k(&pattern)
        }
        GenFamily::Random => {
            if args.layers.is_empty() {
                return Err(Failure::invalid("usage", "random needs --layers"));
            }
            gen_random(&args.layers, need(args.p, "p", f)?, need(args.seed, "seed", f)?)
        }
        GenFamily::TwoRelayChain => Ok(two_relay_chain()),
        GenFamily::TwoRelayCrossed => Ok(two_relay_crossed()),
    };
    result.map_err(|e| Failure::invalid("parameters", e))
}

fn color(g: &RouteExpandedGraph, net: &LayeredNetwork, args: &ColorArgs) -> Result<ColorAssignment, Failure> {
    let t_max = args.max_colors.unwrap_or_else(|| net.num_pairs().min(MAX_COLORS));
    if t_max == 0 || t_max > MAX_COLORS {
        return Err(Failure::invalid("usage", format!("--max-colors must be in 1..={MAX_COLORS}")));
    }
    let search = |e: SearchError| match e {
        SearchError::Unroutable(_) => Failure::invalid("network", e),
        _ => Failure::unverified("search", e),
    };
    let a = match args.strategy {
        Strategy::Mcl => match search_mcl(g, t_max, args.budget) {
            Ok(outcome) => outcome.assignment,
            Err(SearchError::BudgetExhausted { fallback, .. }) if fallback.num_colors <= t_max => *fallback,
            Err(e) => return Err(search(e)),
        },
        Strategy::Mil => search_mil(g).map_err(search)?,
        Strategy::E2e => search_end_to_end(g).map_err(search)?,
        Strategy::Tdma => tdma(g).map_err(search)?,
        Strategy::Constructive => match construct_for(net) {
            Some(c) => c.map_err(|e| Failure::unverified("construction", e))?.assignment,
            None => return Err(Failure::invalid("usage", "no constructive coloring for this network")),
        },
    };
    if a.num_colors > t_max {
        return Err(Failure::unverified(
            "search",
            format!("{:?} needs {} colors, more than {t_max}", args.strategy, a.num_colors),
        ));
    }
    Ok(a)
}

#[derive(Serialize)]
struct VerifyOutput {
    colors: usize,
    checker: ValidityReport,
    symbolic: Vec<SymbolicReport>,
    passed: bool,
}

/// Report text and, when some check failed, the failure to exit with.
type Checked = (String, Option<Failure>);

fn verify(format: Format, net: &Path, coloring: &Path) -> Result<Checked, Failure> {
    let net = read_network(net)?;
    let g = expand(&net);
    let a = read_coloring(&g, coloring)?;
    let checker = check_coloring(&g, &a).map_err(|e| Failure::invalid("coloring", e))?;
    let symbolic = [ChannelMode::Deterministic, ChannelMode::Gaussian]
        .into_iter()
        .map(|mode| symbolic_verify(&g, &a, mode))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| Failure::invalid("coloring", e))?;
    let passed = checker.valid && symbolic.iter().all(SymbolicReport::passed);
    let output = VerifyOutput { colors: a.num_colors, checker, symbolic, passed };

    let text = match format {
        Format::Json => json(&output),
        Format::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "T={}", output.colors);
            let verdict = if output.checker.valid { "valid" } else { "invalid" };
            let _ = writeln!(s, "checker: {verdict}");
            for v in &output.checker.violations {
                let _ = writeln!(s, "  {} at {}: {}", v.condition, v.label, v.detail);
            }
            for report in &output.symbolic {
                let verdict = if report.passed() { "pass" } else { "FAIL" };
                let _ = writeln!(s, "symbolic {:?}: {verdict} ({} receivers)", report.mode, report.receivers);
                for issue in &report.issues {
                    let _ = writeln!(s, "  {issue}");
                }
            }
            if let Ok(alpha) = achievable_alpha(&g, &a) {
                let _ = writeln!(s, "alpha={alpha}");
            }
            let _ = writeln!(s, "{}", if passed { "pass" } else { "FAIL" });
            s
        }
    };
    let failure = (!passed).then(|| {
        let failed = output.symbolic.iter().filter(|r| !r.passed()).map(|r| format!("{:?}", r.mode));
        let mut parts: Vec<String> = failed.map(|m| format!("symbolic {m}")).collect();
        if !output.checker.valid {
            parts.insert(0, format!("checker ({} violations)", output.checker.violations.len()));
        }
        Failure::unverified("verification", format!("failed: {}", parts.join(", ")))
    });
    Ok((text, failure))
}

fn simulate(format: Format, args: &SimulateArgs) -> Result<Checked, Failure> {
    if !(1..=MAX_Q).contains(&args.q) {
        return Err(Failure::invalid("usage", format!("--q must be in 1..={MAX_Q}")));
    }
    let net = read_network(&args.net)?;
    let g = expand(&net);
    let a = read_coloring(&g, &args.coloring)?;
    let summary = run_trials(&g, &a, args.q, args.trials, args.seed).map_err(|e| Failure::invalid("simulation", e))?;
    let text = match format {
        Format::Json => json(&summary),
        Format::Text => {
            let mut s = format!("# seed={} q={} trials={}\n", summary.seed, summary.q, summary.trials);
            let _ = writeln!(s, "passed {}/{}", summary.passed, summary.trials);
            if let Some(trace) = &summary.first_failure {
                s.push_str("first failure\n");
                s.push_str(&trace.dump(&net));
            }
            s
        }
    };
    let failure = (summary.passed != summary.trials).then(|| {
        Failure::unverified(
            "simulation",
            format!("{} of {} trials differ from the isolated runs", summary.trials - summary.passed, summary.trials),
        )
    });
    Ok((text, failure))
}

fn bound_text(net: &LayeredNetwork, b: &BoundResult) -> String {
    let mut s = format!("alpha_upper={}\nrule={}\n", b.alpha_upper, b.rule);
    if let Some(w) = &b.witness {
        let names =
            |path: &[crate::network_model::NodeId]| path.iter().map(|&v| net.name(v)).collect::<Vec<_>>().join(" -> ");
        let _ = writeln!(s, "witness pairs=({}, {})", w.i, w.j);
        let _ = writeln!(s, "  cross path: {}", names(&w.cross_path));
        let _ = writeln!(s, "  v*: {}", net.name(w.v_star));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(std::iter::once("clsched").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = run_args(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("simulate"));
    }

    #[test]
    fn bad_arguments_exit_one_with_reason() {
        let (code, _, err) = run_args(&["color"]);
        assert_eq!(code, 1);
        let (code, _, err2) = run_args(&["gen", "folded-single", "--k", "3"]);
        assert_eq!(code, 1);
        let line: serde_json::Value = serde_json::from_str(err2.trim()).unwrap();
        assert_eq!(line["reason"], "usage");
        assert!(err.contains("\"status\":1"));
    }

    #[test]
    fn gen_writes_descriptor_to_stdout() {
        let (code, out, _) = run_args(&["gen", "two-relay-chain"]);
        assert_eq!(code, 0);
        assert_eq!(write_descriptor(&parse_descriptor(&out).unwrap()), out);
    }

    #[test]
    fn missing_file_exits_one() {
        let (code, _, err) = run_args(&["bound", "/nonexistent/net.toml"]);
        assert_eq!(code, 1);
        assert!(err.contains("\"reason\":\"io\""));
    }
}
