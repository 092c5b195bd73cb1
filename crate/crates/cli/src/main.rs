mod report;

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use weaver_core::formula::{parse_formula, Formula};
use weaver_core::oracle::{Oracle, OracleConfig, OracleMode};
use weaver_core::program::{parse_program, Program};
use weaver_core::proof_afa::{prove_staged, ProofAfa, Stage};
use weaver_core::verifier::{verify_observed, IterationRecord, Observer, VerifyConfig};

const EX_USAGE: u8 = 64;
const EX_DATAERR: u8 = 65;
const EX_NOINPUT: u8 = 66;
const EX_CANTCREAT: u8 = 73;

#[derive(Parser)]
#[command(name = "weaver", version, about = "Safety verifier for finite-state shared-memory concurrent programs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Verify every assertion of a program (exit 0 safe, 1 unsafe, 2 unknown).
    Verify {
        /// Program source (.cprog).
        file: PathBuf,
        #[command(flatten)]
        run: RunArgs,
        /// Write each iteration's proof automata as DOT files here.
        #[arg(long)]
        dot_dir: Option<PathBuf>,
        /// Write the verdict and run statistics as JSON here.
        #[arg(long)]
        stats_json: Option<PathBuf>,
        /// Print one line per iteration to stderr.
        #[arg(long, short)]
        verbose: bool,
    },
    /// Show the proof automaton of one trace after each pipeline stage.
    Inspect {
        /// Program source (.cprog).
        file: PathBuf,
        /// Operation labels, separated by spaces or commas (single-letter labels may be run together).
        #[arg(long)]
        trace: String,
        /// A process name (its assertion is used) or an assertion formula.
        #[arg(long = "assert")]
        assertion: String,
        #[command(flatten)]
        run: RunArgs,
        /// Write `<stage>.dot` and `<stage>.json` here instead of printing.
        #[arg(long)]
        dot_dir: Option<PathBuf>,
        /// Output format when printing.
        #[arg(long, value_enum, default_value_t = Format::Dot)]
        format: Format,
    },
    /// Verify every program of a corpus directory and print a comparison table.
    Bench {
        #[arg(long, default_value = "corpus")]
        corpus: PathBuf,
        #[command(flatten)]
        run: RunArgs,
        /// Write all verdicts as a JSON array here.
        #[arg(long)]
        stats_json: Option<PathBuf>,
    },
    /// Differential check of the verifier against explicit-state search on random programs.
    Selftest {
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Dot,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleKind {
    Finite,
    Smt,
}

#[derive(Args, Clone)]
struct RunArgs {
    /// Decision procedure for formula queries.
    #[arg(long, value_enum, default_value_t = OracleKind::Finite)]
    oracle: OracleKind,
    /// Solver command for `--oracle smt`, reading SMT-LIB2 on stdin.
    #[arg(long, env = "WEAVER_SMT_CMD", default_value = "z3 -in")]
    smt_cmd: String,
    /// Per-query solver timeout in milliseconds.
    #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
    timeout_ms: u64,
    /// Refinement rounds before giving up with UNKNOWN.
    #[arg(long, default_value_t = 10_000, value_parser = positive)]
    max_iters: usize,
    /// Largest interleaving product.
    #[arg(long, default_value_t = 100_000, value_parser = positive)]
    product_cap: usize,
    /// Largest subset construction when searching for unproven traces.
    #[arg(long, default_value_t = 200_000, value_parser = positive)]
    subset_cap: usize,
    /// Unsat cores kept per split state.
    #[arg(long, default_value_t = 32, value_parser = positive)]
    max_cores: usize,
    /// Largest explicit state space for brute-force checks.
    #[arg(long, default_value_t = 5_000_000, value_parser = positive)]
    explicit_cap: usize,
    /// Alphabet order used for tie-breaking, as comma- or space-separated labels.
    #[arg(long)]
    label_order: Option<String>,
    /// Do not prefix traces with the initializing operation.
    #[arg(long)]
    no_anchor: bool,
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be positive".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

impl RunArgs {
    fn oracle_config(&self) -> OracleConfig {
        OracleConfig {
            mode: match self.oracle {
                OracleKind::Finite => OracleMode::FiniteDomain,
                OracleKind::Smt => OracleMode::ExternalSmt,
            },
            smt_cmd: self.smt_cmd.clone(),
            timeout: Duration::from_millis(self.timeout_ms),
            max_cores: self.max_cores,
            ..OracleConfig::default()
        }
    }

    fn verify_config(&self) -> VerifyConfig {
        VerifyConfig {
            oracle: self.oracle_config(),
            product_cap: self.product_cap,
            subset_cap: self.subset_cap,
            max_iterations: self.max_iters,
            explicit_cap: self.explicit_cap,
            anchor_initial: !self.no_anchor,
        }
    }
}

/// A failure that ends the run with a specific exit code.
struct Failure {
    code: u8,
    message: String,
}

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure {
        code,
        message: message.into(),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EX_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("weaver: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Verify {
            file,
            run,
            dot_dir,
            stats_json,
            verbose,
        } => cmd_verify(&file, &run, dot_dir.as_deref(), stats_json.as_deref(), verbose),
        Command::Inspect {
            file,
            trace,
            assertion,
            run,
            dot_dir,
            format,
        } => cmd_inspect(&file, &trace, &assertion, &run, dot_dir.as_deref(), format),
        Command::Bench {
            corpus,
            run,
            stats_json,
        } => cmd_bench(&corpus, &run, stats_json.as_deref()),
        Command::Selftest { count, seed, run } => Ok(report::selftest(count, seed, &run.verify_config())),
    }
}

fn load(path: &Path, run: &RunArgs) -> Result<Program, Failure> {
    let src = fs::read_to_string(path).map_err(|e| fail(EX_NOINPUT, format!("{}: {e}", path.display())))?;
    let p = parse_program(&src).map_err(|e| fail(EX_DATAERR, format!("{}: {e}", path.display())))?;
    match &run.label_order {
        None => Ok(p),
        Some(order) => {
            let labels: Vec<String> = order
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .map(str::to_string)
                .collect();
            p.with_label_order(&labels)
                .map_err(|e| fail(EX_USAGE, format!("--label-order: {e}")))
        }
    }
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes()).and_then(|_| out.flush());
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| fail(EX_CANTCREAT, format!("{}: {e}", path.display())))
}

fn make_dir(dir: &Path) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| fail(EX_CANTCREAT, format!("{}: {e}", dir.display())))
}

fn stage_name(s: Stage) -> &'static str {
    match s {
        Stage::Built => "built",
        Stage::Annotated => "annotated",
        Stage::Split => "split",
        Stage::Edged => "edged",
    }
}

struct DotWriter<'a> {
    dir: Option<&'a Path>,
    verbose: bool,
    error: Option<Failure>,
}

impl Observer for DotWriter<'_> {
    fn stage(&mut self, iteration: usize, stage: Stage, proof: &ProofAfa) {
        let Some(dir) = self.dir else { return };
        if self.error.is_some() || stage != Stage::Edged {
            return;
        }
        let path = dir.join(format!("iter{iteration:04}.dot"));
        if let Err(e) = write_file(&path, &proof.to_dot(&format!("iteration {iteration}"))) {
            self.error = Some(e);
        }
    }

    fn iteration(&mut self, r: &IterationRecord) {
        if self.verbose {
            eprintln!(
                "[{:>4}] group {} trace `{}` proof {} states{}",
                r.iteration,
                r.group,
                r.trace.join(" "),
                r.proof_states,
                if r.refuted { ", refuted" } else { "" }
            );
        }
    }
}

fn cmd_verify(
    file: &Path,
    run: &RunArgs,
    dot_dir: Option<&Path>,
    stats_json: Option<&Path>,
    verbose: bool,
) -> Result<u8, Failure> {
    let p = load(file, run)?;
    if let Some(d) = dot_dir {
        make_dir(d)?;
    }
    let mut obs = DotWriter {
        dir: dot_dir,
        verbose,
        error: None,
    };
    let verdict = verify_observed(&p, &run.verify_config(), &mut obs);
    if let Some(e) = obs.error {
        return Err(e);
    }
    emit(&report::verdict_text(&p, &verdict));
    if let Some(path) = stats_json {
        let json = serde_json::to_string_pretty(&verdict).expect("verdict serializes");
        write_file(path, &json)?;
    }
    Ok(verdict.exit_code() as u8)
}

/// The assertion named by `name`: a process name or a formula.
fn resolve_assertion(p: &Program, name: &str) -> Result<Formula, Failure> {
    if let Some(i) = p.process_index(name) {
        let mut distinct: Vec<&Formula> = p.processes[i].assertions.values().collect();
        distinct.dedup();
        return match distinct[..] {
            [f] => Ok(f.clone()),
            [] => Err(fail(EX_USAGE, format!("process `{name}` has no assertion"))),
            _ => Err(fail(
                EX_USAGE,
                format!("process `{name}` has several assertions; pass the formula instead"),
            )),
        };
    }
    parse_formula(name).map_err(|e| fail(EX_USAGE, format!("--assert: not a process name and not a formula ({e})")))
}

fn cmd_inspect(
    file: &Path,
    trace: &str,
    assertion: &str,
    run: &RunArgs,
    dot_dir: Option<&Path>,
    format: Format,
) -> Result<u8, Failure> {
    let p = load(file, run)?;
    let t = p
        .parse_trace(trace)
        .map_err(|e| fail(EX_USAGE, format!("--trace: {e}")))?;
    let psi = resolve_assertion(&p, assertion)?;
    let oracle = Oracle::new(p.domains(), run.oracle_config());
    let ops: Vec<_> = p.ops.iter().map(|o| o.instr.clone()).collect();
    let mut stages: Vec<(Stage, ProofAfa)> = Vec::new();
    prove_staged(p.alphabet(), &ops, &t, &psi.negate(), &oracle, |s, a| {
        stages.push((s, a.clone()))
    })
    .map_err(|e| fail(2, e.to_string()))?;

    if let Some(dir) = dot_dir {
        make_dir(dir)?;
        for (s, a) in &stages {
            let name = stage_name(*s);
            write_file(&dir.join(format!("{name}.dot")), &a.to_dot(name))?;
            let json = serde_json::to_string_pretty(&a.to_json()).expect("json");
            write_file(&dir.join(format!("{name}.json")), &json)?;
        }
        let last = &stages.last().expect("four stages").1;
        println!(
            "wrote {} stages for trace `{}` ({} states, hmap(s0) = {})",
            stages.len(),
            p.trace_labels(&t).join(" "),
            last.len(),
            last.hmap(0).map(|h| h.to_string()).unwrap_or_default()
        );
        return Ok(0);
    }
    match format {
        Format::Dot => {
            let mut out = String::new();
            for (s, a) in &stages {
                let name = stage_name(*s);
                out.push_str(&format!("// stage: {name}\n"));
                out.push_str(&a.to_dot(name));
            }
            emit(&out);
        }
        Format::Json => {
            let doc: serde_json::Map<String, serde_json::Value> = stages
                .iter()
                .map(|(s, a)| (stage_name(*s).to_string(), a.to_json()))
                .collect();
            emit(&(serde_json::to_string_pretty(&doc).expect("json") + "\n"));
        }
    }
    Ok(0)
}

fn cmd_bench(dir: &Path, run: &RunArgs, stats_json: Option<&Path>) -> Result<u8, Failure> {
    let entries = fs::read_dir(dir).map_err(|e| fail(EX_NOINPUT, format!("{}: {e}", dir.display())))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "cprog"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(fail(EX_NOINPUT, format!("{}: no .cprog files", dir.display())));
    }
    let mut programs = Vec::new();
    for f in &files {
        programs.push((f.clone(), load(f, run)?));
    }
    let rows = report::bench(&programs, &run.verify_config());
    emit(&report::bench_table(&rows));
    if let Some(path) = stats_json {
        let doc: Vec<serde_json::Value> = rows
            .iter()
            .map(|r| serde_json::json!({ "program": r.name, "result": r.verdict }))
            .collect();
        write_file(path, &serde_json::to_string_pretty(&doc).expect("json"))?;
    }
    Ok(if rows.iter().all(|r| r.agrees()) { 0 } else { 1 })
}
