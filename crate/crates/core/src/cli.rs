//! Command-line surface. Every command renders its whole report into a
//! string before anything is written, so output is byte-identical across
//! runs and thread counts.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::analysis::{self, AnalysisError};
use crate::gates::{parse_gate_list, standard_library, Gate, GateError, GateLibrary};
use crate::groups::{decide_universal, GroupError, StabilizerChain};
use crate::perm::{factorial, PermError, Permutation};
use crate::synth::{self, CensusReport, SynthError, Synthesizer};

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "REVSYNTH_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "revsynth",
    version,
    about = "Reversible circuit synthesis and gate-library analysis"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Circuit width (number of wires).
    #[arg(long, global = true, default_value_t = 3)]
    pub n: usize,
    /// Named library (N, C, T, F, P, NF, NT, NP, NCT, NCF, NCP, NCTF, NCPT,
    /// NCPF, G, GT); census and sublibs accept a comma-separated list.
    #[arg(long, global = true)]
    pub lib: Option<String>,
    /// Explicit gate list, e.g. "F[1,2,3],F[2,1,3]".
    #[arg(long, global = true)]
    pub gates: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long = "max-depth", global = true, default_value_t = synth::DEFAULT_MAX_DEPTH)]
    pub max_depth: usize,
    /// Write the report to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Boolean map, cycles and order of one gate.
    Gate {
        #[arg(long)]
        show: String,
    },
    /// Exact order of the generated group and universality verdict.
    Order,
    /// Minimum circuit length distribution.
    Census,
    /// Universal sub-library counts.
    Sublibs,
    /// Smallest universal sub-libraries.
    Minimal,
    /// Minimum-length circuit for a specification.
    Synth {
        /// Cycle notation "(7,8)" or image list "1,2,3,4,5,6,8,7".
        #[arg(long)]
        spec: String,
    },
    /// Universality of random pairs of G gates.
    Randpairs {
        #[arg(long, default_value_t = 20)]
        trials: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LibrarySource {
    Named(Vec<String>),
    Gates(String),
}

/// Validated command configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub source: Option<LibrarySource>,
    pub n: usize,
    pub format: Format,
    pub seed: u64,
    pub max_depth: usize,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: &'static str,
    pub message: String,
    pub exit_code: i32,
}

impl CliError {
    fn usage(code: &'static str, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
            exit_code: 1,
        }
    }

    fn domain(code: &'static str, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
            exit_code: 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "error[{}]: {}", self.code, self.message)
    }
}

impl From<GateError> for CliError {
    fn from(e: GateError) -> Self {
        let code = match &e {
            GateError::Parse { .. } => "gate-parse",
            GateError::InvalidGate(_) => "invalid-gate",
            GateError::MalformedLabel(_) => "malformed-label",
            GateError::UnsupportedWidth { .. } => "unsupported-width",
            GateError::UnknownLibrary(_) => "unknown-library",
            GateError::InvalidLibrary(_) => "invalid-library",
            GateError::Perm(_) => "permutation",
        };
        Self::usage(code, e.to_string())
    }
}

impl From<PermError> for CliError {
    fn from(e: PermError) -> Self {
        Self::usage("spec-parse", e.to_string())
    }
}

impl From<GroupError> for CliError {
    fn from(e: GroupError) -> Self {
        match e {
            GroupError::CapExceeded { .. } => Self::domain("cap-exceeded", e.to_string()),
            GroupError::Gate(g) => g.into(),
            GroupError::Perm(p) => p.into(),
            GroupError::DegreeMismatch { .. } => Self::usage("degree-mismatch", e.to_string()),
        }
    }
}

impl From<SynthError> for CliError {
    fn from(e: SynthError) -> Self {
        match e {
            SynthError::NotInGeneratedGroup { .. } => Self::domain("not-in-group", e.to_string()),
            SynthError::DepthExceeded { .. } => Self::domain("depth-exceeded", e.to_string()),
            SynthError::CapExceeded { .. } => Self::domain("cap-exceeded", e.to_string()),
            SynthError::DegreeMismatch { .. } => Self::usage("degree-mismatch", e.to_string()),
            SynthError::Gate(g) => g.into(),
            SynthError::Group(g) => g.into(),
            SynthError::Perm(p) => p.into(),
        }
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::LibraryTooLarge { .. } => {
                Self::domain("library-too-large", e.to_string())
            }
            AnalysisError::UnsupportedWidth(_) => Self::usage("unsupported-width", e.to_string()),
            AnalysisError::NoTrials => Self::usage("usage", e.to_string()),
            AnalysisError::Gate(g) => g.into(),
            AnalysisError::Group(g) => g.into(),
        }
    }
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<Self, CliError> {
        let source = match (cli.lib, cli.gates) {
            (Some(_), Some(_)) => {
                return Err(CliError::usage(
                    "usage",
                    "--lib and --gates are mutually exclusive",
                ))
            }
            (Some(l), None) => Some(LibrarySource::Named(
                l.split(',')
                    .map(|s| s.trim().to_string())
                    .filter(|s| !s.is_empty())
                    .collect(),
            )),
            (None, Some(g)) => Some(LibrarySource::Gates(g)),
            (None, None) => None,
        };
        let needs_library = !matches!(
            cli.command,
            Command::Gate { .. } | Command::Randpairs { .. }
        );
        if needs_library && source.is_none() {
            return Err(CliError::usage(
                "usage",
                "one of --lib or --gates is required",
            ));
        }
        let multi = matches!(cli.command, Command::Census | Command::Sublibs);
        if let Some(LibrarySource::Named(names)) = &source {
            if names.is_empty() {
                return Err(CliError::usage("usage", "--lib is empty"));
            }
            if names.len() > 1 && !multi {
                return Err(CliError::usage(
                    "usage",
                    "this command takes a single library",
                ));
            }
        }
        Ok(Self {
            command: cli.command,
            source,
            n: cli.n,
            format: cli.format,
            seed: cli.seed,
            max_depth: cli.max_depth,
            out: cli.out,
        })
    }

    fn libraries(&self) -> Result<Vec<GateLibrary>, CliError> {
        match &self.source {
            Some(LibrarySource::Named(names)) => names
                .iter()
                .map(|name| standard_library(name, self.n).map_err(CliError::from))
                .collect(),
            Some(LibrarySource::Gates(text)) => {
                let gates = parse_gate_list(text, self.n)?;
                Ok(vec![GateLibrary::new("custom", gates)?])
            }
            None => Err(CliError::usage(
                "usage",
                "one of --lib or --gates is required",
            )),
        }
    }

    fn library(&self) -> Result<GateLibrary, CliError> {
        Ok(self.libraries()?.remove(0))
    }
}

/// Runs a command and returns its rendered output.
pub fn run(cfg: &RunConfig) -> Result<String, CliError> {
    match &cfg.command {
        Command::Gate { show } => cmd_gate(show, cfg),
        Command::Order => cmd_order(cfg),
        Command::Census => cmd_census(cfg),
        Command::Sublibs => cmd_sublibs(cfg),
        Command::Minimal => cmd_minimal(cfg),
        Command::Synth { spec } => cmd_synth(spec, cfg),
        Command::Randpairs { trials } => cmd_randpairs(*trials, cfg),
    }
}

/// Parses arguments (without the program name) and runs the command.
pub fn run_args<I, S>(args: I) -> Result<String, CliError>
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let argv = std::iter::once(std::ffi::OsString::from("revsynth"))
        .chain(args.into_iter().map(Into::into));
    let cli = Cli::try_parse_from(argv).map_err(|e| CliError::usage("usage", e.to_string()))?;
    run(&RunConfig::from_cli(cli)?)
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn to_csv(header: &[&str], rows: Vec<Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
}

fn cmd_gate(show: &str, cfg: &RunConfig) -> Result<String, CliError> {
    let gate = Gate::parse(show, cfg.n)?;
    let perm = gate.elaborate::<u16>()?;
    let (map, cycles, order) = (
        gate.boolean_map(),
        perm.format_cycles(),
        perm.order().to_string(),
    );
    Ok(match cfg.format {
        Format::Text => format!("gate: {gate}\nmap: {map}\ncycles: {cycles}\norder: {order}\n"),
        Format::Csv => to_csv(
            &["gate", "map", "cycles", "order"],
            vec![vec![gate.to_string(), map, cycles, order]],
        ),
        Format::Json => to_json(&json!({
            "gate": gate.to_string(),
            "n": cfg.n,
            "map": map,
            "cycles": cycles,
            "order": order,
        })),
    })
}

fn cmd_order(cfg: &RunConfig) -> Result<String, CliError> {
    let lib = cfg.library()?;
    let gens = lib.permutations::<u16>()?;
    let (universal, _) = decide_universal(lib.degree(), &gens)?;
    // the full symmetric group needs no chain; above 64 points building one is slow
    let order = if universal {
        factorial(lib.degree())
    } else {
        StabilizerChain::new(lib.degree(), &gens)?.order()
    };
    let verdict = if universal {
        "UNIVERSAL"
    } else {
        "NOT UNIVERSAL"
    };
    Ok(match cfg.format {
        Format::Text => format!(
            "library: {}\ngates: {}\norder: {order}\n{verdict}\n",
            lib.name(),
            lib.len()
        ),
        Format::Csv => to_csv(
            &["library", "gates", "order", "universal"],
            vec![vec![
                lib.name().to_string(),
                lib.len().to_string(),
                order.to_string(),
                universal.to_string(),
            ]],
        ),
        Format::Json => to_json(&json!({
            "library": lib.name(),
            "n": cfg.n,
            "gates": lib.len(),
            "order": order.to_string(),
            "universal": universal,
        })),
    })
}

/// Table layout: one row per length, one column per library, then average
/// and library-size footer rows.
pub fn census_table(reports: &[CensusReport]) -> (Vec<String>, Vec<Vec<String>>) {
    let mut header = vec!["Min Len".to_string()];
    header.extend(reports.iter().map(|r| r.library.clone()));
    let rows_len = reports.iter().map(|r| r.counts.len()).max().unwrap_or(0);
    let mut rows = Vec::new();
    for l in 0..rows_len {
        let mut row = vec![l.to_string()];
        row.extend(
            reports
                .iter()
                .map(|r| r.counts.get(l).copied().unwrap_or(0).to_string()),
        );
        rows.push(row);
    }
    let mut avg = vec!["Avg".to_string()];
    avg.extend(reports.iter().map(|r| r.average_string()));
    rows.push(avg);
    let mut size = vec!["LibSize".to_string()];
    size.extend(reports.iter().map(|r| r.library_size.to_string()));
    rows.push(size);
    (header, rows)
}

fn aligned(header: &[String], rows: &[Vec<String>]) -> String {
    let cols = header.len();
    let widths: Vec<usize> = (0..cols)
        .map(|c| {
            std::iter::once(&header[c])
                .chain(rows.iter().map(|r| &r[c]))
                .map(|s| s.len())
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    for row in std::iter::once(header).chain(rows.iter().map(|r| r.as_slice())) {
        let cells: Vec<String> = row
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(i, (cell, &w))| {
                if i == 0 {
                    format!("{cell:<w$}")
                } else {
                    format!("{cell:>w$}")
                }
            })
            .collect();
        out.push_str(cells.join("  ").trim_end());
        out.push('\n');
    }
    out
}

fn cmd_census(cfg: &RunConfig) -> Result<String, CliError> {
    let reports = cfg
        .libraries()?
        .iter()
        .map(synth::bfs_census)
        .collect::<Result<Vec<_>, _>>()?;
    let (header, rows) = census_table(&reports);
    Ok(match cfg.format {
        Format::Text => aligned(&header, &rows),
        Format::Csv => to_csv(&header.iter().map(String::as_str).collect::<Vec<_>>(), rows),
        Format::Json => to_json(&reports),
    })
}

const SUBLIB_HEADER: [&str; 9] = [
    "Lib",
    "Lib Size",
    "Num of Sub Libs",
    "Num of Uni Sub Libs",
    "Utilization (%)",
    "Size of min Uni Sub Lib",
    "Num of Sub Libs with min size",
    "Num of Uni Sub Libs with min size",
    "Min Size Utilization (%)",
];

fn cmd_sublibs(cfg: &RunConfig) -> Result<String, CliError> {
    let reports = cfg
        .libraries()?
        .iter()
        .map(analysis::sublibrary_census)
        .collect::<Result<Vec<_>, _>>()?;
    let min_size =
        |r: &analysis::SubLibraryReport| r.minimal_size.map_or("-".to_string(), |m| m.to_string());
    Ok(match cfg.format {
        Format::Text => {
            let mut out = String::new();
            for r in &reports {
                let _ = writeln!(
                    out,
                    "library: {} ({} gates, {} subsets)",
                    r.library, r.library_size, r.total_subsets
                );
                let _ = writeln!(
                    out,
                    "universal subsets: {}; minimal size: {}; at minimal size: {}",
                    r.universal_subsets,
                    min_size(r),
                    r.universal_at_minimal_size
                );
                let _ = writeln!(
                    out,
                    "utilization: {}%; subsets at minimal size: {}; minimal-size utilization: {}%",
                    r.utilization(),
                    r.subsets_at_minimal_size,
                    r.minimal_utilization()
                );
            }
            out
        }
        Format::Csv => to_csv(
            &SUBLIB_HEADER,
            reports
                .iter()
                .map(|r| {
                    vec![
                        r.library.clone(),
                        r.library_size.to_string(),
                        r.total_subsets.to_string(),
                        r.universal_subsets.to_string(),
                        r.utilization(),
                        min_size(r),
                        r.subsets_at_minimal_size.to_string(),
                        r.universal_at_minimal_size.to_string(),
                        r.minimal_utilization(),
                    ]
                })
                .collect(),
        ),
        Format::Json => {
            let records: Vec<_> = reports
                .iter()
                .map(|r| {
                    let mut v = serde_json::to_value(r).expect("serializable");
                    v["utilization"] = json!(r.utilization());
                    v["minimal_utilization"] = json!(r.minimal_utilization());
                    v
                })
                .collect();
            to_json(&records)
        }
    })
}

fn cmd_minimal(cfg: &RunConfig) -> Result<String, CliError> {
    let lib = cfg.library()?;
    let subsets = analysis::minimal_universal_sublibraries(&lib)?;
    let names: Vec<Vec<String>> = subsets
        .iter()
        .map(|s| s.iter().map(|&i| lib.gates()[i].to_string()).collect())
        .collect();
    let size = subsets.first().map_or(0, |s| s.len());
    Ok(match cfg.format {
        Format::Text => {
            let mut out = format!(
                "library: {}\nminimal size: {}\ncount: {}\n",
                lib.name(),
                if subsets.is_empty() {
                    "-".to_string()
                } else {
                    size.to_string()
                },
                subsets.len()
            );
            for s in &names {
                let _ = writeln!(out, "{{{}}}", s.join(", "));
            }
            out
        }
        Format::Csv => to_csv(
            &["index", "gates"],
            names
                .iter()
                .enumerate()
                .map(|(i, s)| vec![(i + 1).to_string(), s.join("; ")])
                .collect(),
        ),
        Format::Json => to_json(&json!({
            "library": lib.name(),
            "minimal_size": if subsets.is_empty() { None } else { Some(size) },
            "subsets": names,
        })),
    })
}

/// Cycle notation when the text starts with `(`, otherwise an image list.
pub fn parse_spec(text: &str, n: usize) -> Result<Permutation<u16>, CliError> {
    let degree = 1usize << n;
    let spec = if text.trim_start().starts_with('(') {
        Permutation::parse_cycles(text, degree)?
    } else {
        Permutation::parse_images(text)?
    };
    if spec.degree() != degree {
        return Err(CliError::usage(
            "degree-mismatch",
            format!(
                "specification has degree {}, expected {degree}",
                spec.degree()
            ),
        ));
    }
    Ok(spec)
}

fn cmd_synth(spec_text: &str, cfg: &RunConfig) -> Result<String, CliError> {
    let lib = cfg.library()?;
    let spec = parse_spec(spec_text, cfg.n)?;
    let circuit = Synthesizer::<u16>::new(&lib, cfg.max_depth)?.synthesize(&spec)?;
    let text = circuit.to_string();
    Ok(match cfg.format {
        Format::Text => format!(
            "circuit: {}\nlength: {}\n",
            if circuit.is_empty() { "(empty)" } else { &text },
            circuit.len()
        ),
        Format::Csv => to_csv(
            &["circuit", "length"],
            vec![vec![text, circuit.len().to_string()]],
        ),
        Format::Json => to_json(&json!({
            "library": lib.name(),
            "spec": spec.format_cycles(),
            "circuit": text,
            "length": circuit.len(),
        })),
    })
}

fn cmd_randpairs(trials: usize, cfg: &RunConfig) -> Result<String, CliError> {
    let results = analysis::random_pair_check(cfg.n, trials, cfg.seed)?;
    let universal = results.iter().filter(|r| r.universal).count();
    Ok(match cfg.format {
        Format::Text => {
            let mut out = format!("n: {}; trials: {}; seed: {}\n", cfg.n, trials, cfg.seed);
            for (i, r) in results.iter().enumerate() {
                let verdict = if r.universal {
                    "UNIVERSAL"
                } else {
                    "NOT UNIVERSAL"
                };
                let _ = writeln!(out, "{}: {{{}, {}}} {verdict}", i + 1, r.first, r.second);
            }
            let _ = writeln!(out, "universal pairs: {universal}/{trials}");
            out
        }
        Format::Csv => to_csv(
            &["trial", "first", "second", "universal"],
            results
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    vec![
                        (i + 1).to_string(),
                        r.first.to_string(),
                        r.second.to_string(),
                        r.universal.to_string(),
                    ]
                })
                .collect(),
        ),
        Format::Json => to_json(&json!({
            "n": cfg.n,
            "trials": trials,
            "seed": cfg.seed,
            "prng": "ChaCha8",
            "results": results,
        })),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_ok(args: &[&str]) -> String {
        run_args(args.iter().copied()).unwrap()
    }

    #[test]
    fn gate_command() {
        let out = run_ok(&["gate", "--show", "G[1,2,3]", "--n", "3"]);
        assert!(out.contains("cycles: (1,5,3,7,2,6,4,8)\n"), "{out}");
        assert!(out.contains("order: 8\n"));
        assert!(run_ok(&["gate", "--show", "N[1]", "--n", "1"]).contains("cycles: (1,2)\n"));
        assert!(run_ok(&["gate", "--show", "C[1,2]", "--n", "2"]).contains("cycles: (3,4)\n"));
    }

    #[test]
    fn gate_parse_error_reports_position() {
        let err = run_args(["gate", "--show", "T[1,x,3]"]).unwrap_err();
        assert_eq!(err.code, "gate-parse");
        assert_eq!(err.exit_code, 1);
        assert!(err.message.contains("position 4"), "{}", err.message);
    }

    #[test]
    fn order_command() {
        let out = run_ok(&["order", "--lib", "G", "--n", "3"]);
        assert!(out.contains("order: 40320\nUNIVERSAL\n"), "{out}");
        let out = run_ok(&["order", "--gates", "F[1,2,3],F[2,1,3],F[3,2,1]", "--n", "3"]);
        assert!(out.contains("order: 6\nNOT UNIVERSAL\n"), "{out}");
    }

    #[test]
    fn synth_command() {
        let out = run_ok(&["synth", "--spec", "(7,8)", "--lib", "NCT", "--n", "3"]);
        assert_eq!(out, "circuit: T[1,2,3]\nlength: 1\n");
        let out = run_ok(&[
            "synth",
            "--spec",
            "1,2,3,4,5,6,8,7",
            "--lib",
            "NCT",
            "--format",
            "csv",
        ]);
        assert_eq!(out, "circuit,length\n\"T[1,2,3]\",1\n");
        let err = run_args(["synth", "--spec", "(1,5)(2,6)(3,7)(4,8)", "--lib", "C"]).unwrap_err();
        assert_eq!((err.code, err.exit_code), ("not-in-group", 2));
        let err = run_args(["synth", "--spec", "1,2,3,4", "--lib", "NCT"]).unwrap_err();
        assert_eq!(err.exit_code, 1);
    }

    #[test]
    fn usage_errors() {
        let err = run_args(["order"]).unwrap_err();
        assert_eq!(err.exit_code, 1);
        let err = run_args(["order", "--lib", "NCT", "--gates", "N[1]"]).unwrap_err();
        assert_eq!(err.exit_code, 1);
        let err = run_args(["order", "--lib", "NCT,NT"]).unwrap_err();
        assert_eq!(err.exit_code, 1);
        let err = run_args(["order", "--lib", "NOPE"]).unwrap_err();
        assert_eq!(err.code, "unknown-library");
        let err = run_args(["frobnicate"]).unwrap_err();
        assert_eq!(err.exit_code, 1);
    }

    #[test]
    fn sublibs_summary_line() {
        let out = run_ok(&["sublibs", "--lib", "NT", "--n", "3"]);
        assert!(
            out.contains("universal subsets: 4; minimal size: 5; at minimal size: 3\n"),
            "{out}"
        );
    }

    #[test]
    fn census_csv_layout() {
        let out = run_ok(&["census", "--lib", "N", "--format", "csv"]);
        assert_eq!(out, "Min Len,N\n0,1\n1,3\n2,3\n3,1\nAvg,1.500\nLibSize,3\n");
    }
}
