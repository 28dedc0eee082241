//! `lorenzen`: check formulas, replay dialogues, run scans, export strategies.
//!
//! Exit codes: 0 success, 1 invalid/unknown verdict (or an illegal replay,
//! or a scan with violations or inconclusive entries), 2 usage error,
//! 3 internal error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use lorenzen::experiments::{
    agreement_scan, implication_shape_scan, mp_closure_scan, no_explosion_scan, uniform_substitution_scan,
    ScanReport,
};
use lorenzen::{
    export_strategy, parse, parse_ruleset, search_report, CheckDocument, Constraint, Dialogue,
    DialogueDocument, ExportFormat, Oracle, Player, Ruleset, SearchBudget, SearchResult, StrategyDocument,
    Verdict,
};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "lorenzen", version, about = "Lorenzen dialogue games: validity by winning strategy")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Search for a P winning strategy and print valid, invalid or unknown(depth=N).
    Check {
        /// Preset name (D, E, CL, N, E*, E') or rule list such as D10,D13,E.
        #[arg(long)]
        ruleset: String,
        /// Depth escalation, e.g. 30,40,50 (default: $LORENZEN_BUDGET or 30,40,50).
        #[arg(long)]
        budget: Option<String>,
        /// Restrict P to a normal form: attack-first or afdmr.
        #[arg(long)]
        constrain: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        formula: String,
    },
    /// Replay a dialogue document and report its outcome.
    Replay {
        fixture: PathBuf,
        /// Replay under another ruleset instead of the document's.
        #[arg(long)]
        ruleset: Option<String>,
    },
    /// Run an experiment scan over all formulas up to a size.
    Scan {
        #[arg(value_enum)]
        kind: ScanArg,
        /// Ruleset for agree, mp and subst (shape runs under N, noexplosion under CL).
        #[arg(long, default_value = "E")]
        ruleset: String,
        /// Comma-separated atoms.
        #[arg(long, default_value = "p,q", value_delimiter = ',')]
        atoms: Vec<String>,
        #[arg(long, default_value_t = 4)]
        max_size: usize,
        /// Oracle for agree: classical, intuitionistic or stable (default by ruleset).
        #[arg(long)]
        oracle: Option<String>,
        /// Size of substituted formulas for subst.
        #[arg(long, default_value_t = 2)]
        subst_depth: usize,
        #[arg(long)]
        budget: Option<String>,
        /// CSV of every search: formula, verdict, depth, nodes.
        #[arg(long)]
        out: Option<PathBuf>,
        /// JSON lines, one per finding, each with a replayable document.
        #[arg(long)]
        findings: Option<PathBuf>,
    },
    /// Export a winning strategy as JSON or Graphviz.
    Export {
        #[arg(long, value_enum)]
        format: ExportArg,
        #[arg(long)]
        ruleset: String,
        #[arg(long)]
        budget: Option<String>,
        /// Write to a file instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
        formula: String,
    },
    /// Start the HTTP server.
    Serve {
        #[arg(long, env = lorenzen_server::PORT_ENV, default_value_t = lorenzen_server::DEFAULT_PORT)]
        port: u16,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScanArg {
    Mp,
    Subst,
    Agree,
    Shape,
    Noexplosion,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExportArg {
    Dot,
    Json,
}

enum Failure {
    Usage(String),
    Internal(String),
}

type Outcome = Result<ExitCode, Failure>;

fn usage(e: impl ToString) -> Failure {
    Failure::Usage(e.to_string())
}

fn internal(e: impl ToString) -> Failure {
    Failure::Internal(e.to_string())
}

/// Writes to standard output; a closed pipe (e.g. `| head`) is not an error.
fn emit(bytes: &[u8]) -> Result<(), Failure> {
    match std::io::stdout().lock().write_all(bytes) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(internal(e)),
        _ => Ok(()),
    }
}

fn emit_line(text: &str) -> Result<(), Failure> {
    emit(format!("{text}\n").as_bytes())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Check {
            ruleset,
            budget,
            constrain,
            format,
            formula,
        } => check(&formula, &ruleset, budget.as_deref(), constrain.as_deref(), format),
        Command::Replay { fixture, ruleset } => replay(&fixture, ruleset.as_deref()),
        Command::Scan {
            kind,
            ruleset,
            atoms,
            max_size,
            oracle,
            subst_depth,
            budget,
            out,
            findings,
        } => scan(ScanArgs {
            kind,
            ruleset,
            atoms,
            max_size,
            oracle,
            subst_depth,
            budget,
            out,
            findings,
        }),
        Command::Export {
            format,
            ruleset,
            budget,
            out,
            formula,
        } => export(&formula, &ruleset, budget.as_deref(), format, out.as_deref()),
        Command::Serve { port } => lorenzen_server::serve_blocking(port, Default::default())
            .map(|_| ExitCode::SUCCESS)
            .map_err(internal),
    };
    match result {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            eprintln!("usage: lorenzen <check|replay|scan|export|serve> ... (see --help)");
            ExitCode::from(2)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn budget(text: Option<&str>) -> Result<SearchBudget, Failure> {
    match text {
        Some(t) => SearchBudget::parse(t).map_err(usage),
        None => SearchBudget::from_env().map_err(usage),
    }
}

fn ruleset(text: &str) -> Result<Ruleset, Failure> {
    parse_ruleset(text).map_err(usage)
}

fn verdict_code(v: Verdict) -> ExitCode {
    match v {
        Verdict::Valid => ExitCode::SUCCESS,
        Verdict::Invalid | Verdict::Unknown => ExitCode::from(1),
    }
}

fn check(formula: &str, rs: &str, b: Option<&str>, c: Option<&str>, format: Format) -> Outcome {
    let f = parse(formula).map_err(usage)?;
    let rs = ruleset(rs)?;
    let b = budget(b)?;
    let c = match c {
        Some(text) => text.parse::<Constraint>().map_err(usage)?,
        None => Constraint::None,
    };
    let report = search_report(&f, &rs, &b, c, matches!(format, Format::Json));
    let doc = CheckDocument::from_report(&f, &rs, c, &report);
    match format {
        Format::Text => emit_line(&doc.text)?,
        Format::Json => emit_line(&serde_json::to_string_pretty(&doc).map_err(internal)?)?,
    }
    Ok(verdict_code(doc.verdict))
}

fn outcome_line(d: &Dialogue) -> String {
    if !d.legal_moves().is_empty() {
        return format!("in progress: {} to move", d.to_move());
    }
    match d.to_move() {
        Player::O => "P wins: O has no legal move".to_string(),
        Player::P => "P is stuck: no legal move".to_string(),
    }
}

fn replay(path: &Path, rs: Option<&str>) -> Outcome {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let doc = DialogueDocument::from_json(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let rs = match rs {
        Some(t) => ruleset(t)?,
        None => doc.ruleset().map_err(usage)?,
    };
    for (i, m) in doc.moves.iter().enumerate() {
        let r = m.reference.map_or(String::new(), |r| r.to_string());
        emit_line(&format!("{i:>3}  {}  {}  {:<24} {r}", m.player, m.stance.letter(), m.statement))?;
    }
    match doc.replay_under(&rs) {
        Ok(d) => {
            emit_line(&format!("legal under {}; {}", rs.spec_text(), outcome_line(&d)))?;
            Ok(ExitCode::SUCCESS)
        }
        Err(e) => {
            emit_line(&format!("illegal under {}: {e}", rs.spec_text()))?;
            Ok(ExitCode::from(1))
        }
    }
}

struct ScanArgs {
    kind: ScanArg,
    ruleset: String,
    atoms: Vec<String>,
    max_size: usize,
    oracle: Option<String>,
    subst_depth: usize,
    budget: Option<String>,
    out: Option<PathBuf>,
    findings: Option<PathBuf>,
}

#[derive(Serialize)]
struct CsvRow {
    formula: String,
    verdict: Verdict,
    depth: usize,
    nodes: u64,
}

/// A finding with a document that can be re-checked: the strategy when the
/// formula is valid under the scan's ruleset, else the opening move.
#[derive(Serialize)]
struct FindingRecord<'a> {
    #[serde(flatten)]
    finding: &'a lorenzen::experiments::Finding,
    #[serde(skip_serializing_if = "Option::is_none")]
    strategy: Option<StrategyDocument>,
    #[serde(skip_serializing_if = "Option::is_none")]
    dialogue: Option<DialogueDocument>,
}

fn scan(a: ScanArgs) -> Outcome {
    let b = budget(a.budget.as_deref())?;
    let rs = ruleset(&a.ruleset)?;
    let atoms: Vec<&str> = a.atoms.iter().map(|s| s.trim()).filter(|s| !s.is_empty()).collect();
    if atoms.is_empty() {
        return Err(usage("--atoms needs at least one atom"));
    }
    let report = match a.kind {
        ScanArg::Agree => {
            let oracle = match a.oracle.as_deref() {
                Some(o) => o.parse::<Oracle>().map_err(usage)?,
                None => match rs.name() {
                    "CL" => Oracle::Classical,
                    "E'" => Oracle::Stable,
                    _ => Oracle::Intuitionistic,
                },
            };
            agreement_scan(&rs, oracle, &atoms, a.max_size, &b)
        }
        ScanArg::Mp => mp_closure_scan(&rs, &atoms, a.max_size, &b),
        ScanArg::Subst => uniform_substitution_scan(&rs, &atoms, a.max_size, a.subst_depth, &b),
        ScanArg::Shape => implication_shape_scan(&atoms, a.max_size, &b),
        ScanArg::Noexplosion => no_explosion_scan(&atoms, a.max_size, &b),
    };
    if let Some(path) = &a.out {
        write_csv(path, &report)?;
    }
    let scan_rs = ruleset(&report.ruleset)?;
    let mut file = match &a.findings {
        Some(p) => Some(fs::File::create(p).map_err(|e| internal(format!("{}: {e}", p.display())))?),
        None => None,
    };
    for f in &report.findings {
        let record = finding_record(f, &scan_rs, &b);
        let line = serde_json::to_string(&record).map_err(internal)?;
        emit_line(&line)?;
        if let Some(file) = file.as_mut() {
            writeln!(file, "{line}").map_err(internal)?;
        }
    }
    emit_line(&serde_json::to_string(&report).map_err(internal)?)?;
    eprintln!("{}", report.summary());
    if report.violations > 0 || report.counts.exhausted > 0 {
        Ok(ExitCode::from(1))
    } else {
        Ok(ExitCode::SUCCESS)
    }
}

fn finding_record<'a>(f: &'a lorenzen::experiments::Finding, rs: &Ruleset, b: &SearchBudget) -> FindingRecord<'a> {
    let mut record = FindingRecord {
        finding: f,
        strategy: None,
        dialogue: None,
    };
    if f.verdict == Verdict::Valid {
        if let SearchResult::ProponentWins(t) = search_report(&f.formula, rs, b, Constraint::None, true).result {
            record.strategy = Some(StrategyDocument::from_tree(&t));
            return record;
        }
    }
    if let Ok(d) = Dialogue::new(f.formula.clone(), rs.clone()) {
        record.dialogue = Some(DialogueDocument::from_dialogue(&d));
    }
    record
}

fn write_csv(path: &Path, report: &ScanReport) -> Result<(), Failure> {
    let mut w = csv::Writer::from_path(path).map_err(|e| internal(format!("{}: {e}", path.display())))?;
    for e in &report.entries {
        w.serialize(CsvRow {
            formula: e.formula.render(),
            verdict: e.verdict,
            depth: e.depth,
            nodes: e.nodes,
        })
        .map_err(internal)?;
    }
    w.flush().map_err(internal)
}

fn export(formula: &str, rs: &str, b: Option<&str>, format: ExportArg, out: Option<&Path>) -> Outcome {
    let f = parse(formula).map_err(usage)?;
    let rs = ruleset(rs)?;
    let b = budget(b)?;
    let report = search_report(&f, &rs, &b, Constraint::None, true);
    let SearchResult::ProponentWins(t) = &report.result else {
        let doc = CheckDocument::from_report(&f, &rs, Constraint::None, &report);
        eprintln!("no strategy to export: {}", doc.text);
        return Ok(ExitCode::from(1));
    };
    let format = match format {
        ExportArg::Dot => ExportFormat::Dot,
        ExportArg::Json => ExportFormat::Json,
    };
    let bytes = export_strategy(t, format);
    match out {
        Some(p) => fs::write(p, &bytes).map_err(|e| internal(format!("{}: {e}", p.display())))?,
        None => {
            emit(&bytes)?;
            if !bytes.ends_with(b"\n") {
                emit(b"\n")?;
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}
