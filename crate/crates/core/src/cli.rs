//! Command-line front end.
//!
//! Exit codes: 0 success, 1 I/O or numerical failure, 2 usage or parse error,
//! 3 non-convergence. `HYBRIDFOCK_THREADS` caps the worker pool.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use thiserror::Error;

use crate::circuits::{compile, enumerate_pool, trotter_ucc, Backend, CircuitError, ExcitationSpec, PoolKind};
use crate::encoding::{build_hybrid_hamiltonian, build_hybrid_parts, EncodingError, OrbitalPartition};
use crate::integrals::{parse_fcidump, IntegralSet};
use crate::pauli::{sorted_insertion, CommutationMode, QubitOperator};
use crate::sim::{hybrid_fci_scan, reference_state, SimError};
use crate::vqe::{adapt_select_encoding, minimize, AdaptThresholds, VqeError};

pub const TERMS_HEADER: &str = "n_bosonic,total_terms,interaction_terms";
pub const GROUPS_HEADER: &str = "n_bosonic,fc_groups,qwc_groups,fc_groups_hi,qwc_groups_hi";
pub const FCI_HEADER: &str = "n_fermionic,energy_hartree,error_hartree";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } | CliError::Failure(_) => 1,
            CliError::Usage(_) => 2,
        }
    }
}

impl From<EncodingError> for CliError {
    fn from(e: EncodingError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<CircuitError> for CliError {
    fn from(e: CircuitError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Encoding(e) => e.into(),
            e => CliError::Failure(e.to_string()),
        }
    }
}

impl From<VqeError> for CliError {
    fn from(e: VqeError) -> Self {
        match e {
            VqeError::Circuit(e) => e.into(),
            VqeError::Encoding(e) => e.into(),
            VqeError::Sim(e) => e.into(),
            e => CliError::Failure(e.to_string()),
        }
    }
}

/// Comma-separated orbital indices; `a..b` is an inclusive range; empty means none.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OrbitalList(pub Vec<usize>);

impl FromStr for OrbitalList {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut out = Vec::new();
        for tok in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let num = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("bad orbital index `{t}`"));
            match tok.split_once("..") {
                Some((a, b)) => {
                    let (a, b) = (num(a)?, num(b)?);
                    if a > b {
                        return Err(format!("empty range `{tok}`"));
                    }
                    out.extend(a..=b);
                }
                None => out.push(num(tok)?),
            }
        }
        Ok(OrbitalList(out))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BackendArg {
    Direct,
    Optimized,
}

impl From<BackendArg> for Backend {
    fn from(b: BackendArg) -> Self {
        match b {
            BackendArg::Direct => Backend::Direct,
            BackendArg::Optimized => Backend::Optimized,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "hybridfock", version, about = "Hybrid fermionic / hard-core-boson qubit Hamiltonians")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the hybrid qubit Hamiltonian as JSON.
    Encode(EncodeArgs),
    /// Pauli-term counts as orbitals become bosonic one by one.
    TermsScan(ScanArgs),
    /// Sorted-insertion group counts as orbitals become bosonic one by one.
    Groups(ScanArgs),
    /// Compile one excitation and report gate counts.
    Gates(GatesArgs),
    /// Hybrid-FCI energies as orbitals become fermionic one by one.
    HybridFci(FciArgs),
    /// Minimize a pool ansatz.
    Vqe(VqeArgs),
    /// Run the ADAPT loop and report the selected partition.
    Adapt(AdaptArgs),
}

#[derive(Debug, Clone, Args)]
pub struct Source {
    /// FCIDUMP file with the integrals.
    #[arg(long, conflicts_with = "random")]
    pub fcidump: Option<PathBuf>,
    /// Use seeded random integrals on this many orbitals instead.
    #[arg(long)]
    pub random: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Electron count for random integrals (default: one per orbital).
    #[arg(long)]
    pub n_elec: Option<usize>,
}

#[derive(Debug, Args)]
pub struct EncodeArgs {
    #[command(flatten)]
    pub source: Source,
    #[arg(long, default_value = "")]
    pub bosonic: OrbitalList,
    /// Only the interaction block.
    #[arg(long)]
    pub interaction_only: bool,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[command(flatten)]
    pub source: Source,
    /// Orbitals in the order they become bosonic (default: highest index first).
    #[arg(long)]
    pub order: Option<OrbitalList>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GatesArgs {
    /// e.g. `0d,2u->4d,4u`, `p:0->3` or `0u->2u`.
    #[arg(long)]
    pub excitation: String,
    #[arg(long, default_value = "")]
    pub bosonic: OrbitalList,
    /// Orbital count (default: smallest that holds the excitation and `--bosonic`).
    #[arg(long)]
    pub n_orb: Option<usize>,
    #[arg(long, value_enum, default_value_t = BackendArg::Optimized)]
    pub backend: BackendArg,
    /// Also compile in the all-fermionic encoding and report the CNOT ratio.
    #[arg(long)]
    pub compare: bool,
    /// Write the compiled circuit JSON here.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FciArgs {
    #[command(flatten)]
    pub source: Source,
    /// Orbitals in the order they become fermionic (default: ascending).
    #[arg(long)]
    pub order: Option<OrbitalList>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VqeArgs {
    #[command(flatten)]
    pub source: Source,
    #[arg(long, default_value = "")]
    pub bosonic: OrbitalList,
    /// upccgsd, upccd, spa, correlators-simple or correlators-upccd.
    #[arg(long, default_value = "upccd")]
    pub pool: String,
    /// Pair subsets for SPA, e.g. `0,2;1,3`.
    #[arg(long)]
    pub pairs: Option<String>,
    /// Explicit `;`-separated excitations instead of a pool.
    #[arg(long)]
    pub ansatz: Option<String>,
    #[arg(long, value_enum, default_value_t = BackendArg::Optimized)]
    pub backend: BackendArg,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AdaptArgs {
    #[command(flatten)]
    pub source: Source,
    #[arg(long, default_value = "upccgsd")]
    pub pool: String,
    #[arg(long, default_value_t = AdaptThresholds::default().grad_min)]
    pub grad_min: f64,
    #[arg(long, default_value_t = AdaptThresholds::default().e_min)]
    pub e_min: f64,
    #[arg(long, default_value_t = 30)]
    pub max_cycles: usize,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

/// Whether the command reached its convergence criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Done,
    NotConverged,
}

fn load(src: &Source) -> Result<IntegralSet, CliError> {
    match (&src.fcidump, src.random) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.clone(), source })?;
            parse_fcidump(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
        }
        (None, Some(n)) => Ok(IntegralSet::random(n, src.n_elec, src.seed)),
        (None, None) => Err(CliError::Usage("one of --fcidump or --random is required".into())),
    }
}

fn emit(path: &Option<PathBuf>, text: &str, out: &mut dyn Write) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|source| CliError::Io { path: p.clone(), source }),
        None => out.write_all(text.as_bytes()).map_err(|source| CliError::Io { path: "<stdout>".into(), source }),
    }
}

fn check_orbitals(list: &[usize], n: usize) -> Result<(), CliError> {
    match list.iter().find(|&&o| o >= n) {
        Some(o) => Err(CliError::Usage(format!("orbital {o} out of range for {n} orbitals"))),
        None => Ok(()),
    }
}

fn check_order(order: &[usize], n: usize) -> Result<(), CliError> {
    let mut sorted = order.to_vec();
    sorted.sort_unstable();
    if sorted != (0..n).collect::<Vec<_>>() {
        return Err(CliError::Usage(format!("--order must be a permutation of 0..{n}")));
    }
    Ok(())
}

fn pretty(value: &serde_json::Value) -> String {
    serde_json::to_string_pretty(value).expect("json values serialize") + "\n"
}

fn table(header: &str, rows: &[Vec<String>], format: Format) -> String {
    let keys: Vec<&str> = header.split(',').collect();
    match format {
        Format::Csv => {
            let mut s = format!("{header}\n");
            for r in rows {
                let _ = writeln!(s, "{}", r.join(","));
            }
            s
        }
        Format::Json => {
            let rows: Vec<serde_json::Value> = rows
                .iter()
                .map(|r| {
                    let obj = keys.iter().zip(r).map(|(k, v)| {
                        let v = v.parse::<f64>().ok().and_then(serde_json::Number::from_f64).map_or(json!(v), serde_json::Value::Number);
                        (k.to_string(), v)
                    });
                    serde_json::Value::Object(obj.collect())
                })
                .collect();
            pretty(&json!(rows))
        }
    }
}

pub fn cmd_encode(args: &EncodeArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<Outcome, CliError> {
    let ints = load(&args.source)?;
    check_orbitals(&args.bosonic.0, ints.n_orb())?;
    let partition = OrbitalPartition::from_bosonic(ints.n_orb(), &args.bosonic.0)?;
    let op = if args.interaction_only {
        build_hybrid_parts(&ints, &partition)?.interaction
    } else {
        build_hybrid_hamiltonian(&ints, &partition)?
    };
    emit(&args.output, &op.to_json().to_string(), out)?;
    let summary = format!("n_qubits={} n_terms={}\n", op.n_qubits(), op.len());
    let sink: &mut dyn Write = if args.output.is_some() { out } else { err };
    sink.write_all(summary.as_bytes()).map_err(|source| CliError::Io { path: "<stdout>".into(), source })?;
    Ok(Outcome::Done)
}

fn bosonic_order(order: &Option<OrbitalList>, n: usize) -> Result<Vec<usize>, CliError> {
    let order = order.as_ref().map_or_else(|| (0..n).rev().collect(), |o| o.0.clone());
    check_order(&order, n)?;
    Ok(order)
}

/// Row `k` of a scan: the first `k` entries of `order` bosonic.
fn scan_partition(n: usize, order: &[usize], k: usize) -> Result<OrbitalPartition, CliError> {
    Ok(OrbitalPartition::from_bosonic(n, &order[..k])?)
}

pub fn cmd_terms_scan(args: &ScanArgs, out: &mut dyn Write) -> Result<Outcome, CliError> {
    let ints = load(&args.source)?;
    let n = ints.n_orb();
    let order = bosonic_order(&args.order, n)?;
    let mut rows = Vec::new();
    for k in 0..=n {
        let parts = build_hybrid_parts(&ints, &scan_partition(n, &order, k)?)?;
        rows.push(vec![k.to_string(), parts.total().len().to_string(), parts.interaction.simplified().len().to_string()]);
    }
    emit(&args.output, &table(TERMS_HEADER, &rows, args.format), out)?;
    Ok(Outcome::Done)
}

/// FC and QWC group counts of an operator, identity excluded.
pub fn group_counts(op: &QubitOperator) -> (usize, usize) {
    let op = op.without_identity();
    let (fc, qwc) = rayon::join(
        || sorted_insertion(&op, CommutationMode::FC).len(),
        || sorted_insertion(&op, CommutationMode::QWC).len(),
    );
    (fc, qwc)
}

pub fn cmd_groups(args: &ScanArgs, out: &mut dyn Write) -> Result<Outcome, CliError> {
    let ints = load(&args.source)?;
    let n = ints.n_orb();
    let order = bosonic_order(&args.order, n)?;
    let mut rows = Vec::new();
    for k in 0..=n {
        let parts = build_hybrid_parts(&ints, &scan_partition(n, &order, k)?)?;
        let total = parts.total();
        let ((fc, qwc), (fc_hi, qwc_hi)) = rayon::join(|| group_counts(&total), || group_counts(&parts.interaction));
        rows.push([k, fc, qwc, fc_hi, qwc_hi].iter().map(usize::to_string).collect());
    }
    emit(&args.output, &table(GROUPS_HEADER, &rows, args.format), out)?;
    Ok(Outcome::Done)
}

pub fn cmd_gates(args: &GatesArgs, out: &mut dyn Write) -> Result<Outcome, CliError> {
    let spec: ExcitationSpec = args.excitation.parse().map_err(|e: CircuitError| CliError::Usage(e.to_string()))?;
    let needed = spec.orbitals().into_iter().chain(args.bosonic.0.iter().copied()).max().map_or(0, |m| m + 1);
    let n = args.n_orb.unwrap_or(needed);
    if n < needed {
        return Err(CliError::Usage(format!("--n-orb {n} is smaller than the {needed} orbitals referenced")));
    }
    let partition = OrbitalPartition::from_bosonic(n, &args.bosonic.0)?;
    let backend = Backend::from(args.backend);
    let circ = compile(&spec, &partition, backend)?;
    let counts = circ.counts();
    let report = if args.compare {
        let jw = compile(&spec, &OrbitalPartition::all_fermionic(n), backend)?.counts();
        let ratio = if counts.cnot == 0 { f64::INFINITY } else { jw.cnot as f64 / counts.cnot as f64 };
        json!({"n_qubits": circ.n_qubits(), "hybrid": counts, "jw": jw, "ratio": ratio})
    } else {
        let mut v = serde_json::to_value(counts).expect("counts serialize");
        v["n_qubits"] = json!(circ.n_qubits());
        v
    };
    if let Some(p) = &args.output {
        emit(&Some(p.clone()), &pretty(&circ.to_json()), out)?;
    }
    emit(&None, &pretty(&report), out)?;
    Ok(Outcome::Done)
}

pub fn cmd_hybrid_fci(args: &FciArgs, out: &mut dyn Write) -> Result<Outcome, CliError> {
    let ints = load(&args.source)?;
    let n = ints.n_orb();
    let order = args.order.as_ref().map_or_else(|| (0..n).collect(), |o| o.0.clone());
    check_order(&order, n)?;
    let mut scan = hybrid_fci_scan(&ints, &order)?;
    scan.sort_by_key(|&(k, _)| k);
    let e_fci = scan.last().map_or(0.0, |&(_, e)| e);
    let rows: Vec<Vec<String>> = scan
        .iter()
        .map(|&(k, e)| {
            let err = if (e - e_fci).abs() < 1e-12 { 0.0 } else { e - e_fci };
            vec![k.to_string(), e.to_string(), err.to_string()]
        })
        .collect();
    emit(&args.output, &table(FCI_HEADER, &rows, args.format), out)?;
    Ok(Outcome::Done)
}

fn parse_pairs(s: &str) -> Result<Vec<Vec<usize>>, CliError> {
    s.split(';').map(|chunk| chunk.parse::<OrbitalList>().map(|l| l.0).map_err(CliError::Usage)).collect()
}

pub fn cmd_vqe(args: &VqeArgs, out: &mut dyn Write) -> Result<Outcome, CliError> {
    let ints = load(&args.source)?;
    let n = ints.n_orb();
    check_orbitals(&args.bosonic.0, n)?;
    let partition = OrbitalPartition::from_bosonic(n, &args.bosonic.0)?;
    let specs: Vec<ExcitationSpec> = match &args.ansatz {
        Some(list) => list
            .split(';')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| s.parse().map_err(|e: CircuitError| CliError::Usage(e.to_string())))
            .collect::<Result<_, _>>()?,
        None => {
            let kind: PoolKind = args.pool.parse()?;
            let pairs = args.pairs.as_deref().map(parse_pairs).transpose()?;
            enumerate_pool(kind, &partition, ints.n_elec(), pairs.as_deref())?
        }
    };
    let h = build_hybrid_hamiltonian(&ints, &partition)?;
    let circ = trotter_ucc(&specs, &partition, args.backend.into())?;
    let reference = reference_state(&partition, ints.n_elec(), ints.ms2())?;
    let result = minimize(&h, &circ, &reference, &vec![0.0; circ.params().len()])?;
    let mut report = result.to_json();
    report["n_qubits"] = json!(partition.n_qubits());
    report["partition"] = partition.to_json();
    emit(&args.output, &pretty(&report), out)?;
    Ok(if result.converged { Outcome::Done } else { Outcome::NotConverged })
}

pub fn cmd_adapt(args: &AdaptArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<Outcome, CliError> {
    let ints = load(&args.source)?;
    let kind: PoolKind = args.pool.parse()?;
    let thresholds = AdaptThresholds { grad_min: args.grad_min, e_min: args.e_min };
    let trace = adapt_select_encoding(&ints, kind, thresholds, args.max_cycles)?;
    emit(&args.output, &trace.to_json_lines(), out)?;
    let summary = json!({"partition": trace.partition.to_json(), "energy": trace.final_energy(), "converged": trace.converged});
    let _ = writeln!(err, "{summary}");
    Ok(if trace.converged { Outcome::Done } else { Outcome::NotConverged })
}

fn configure_threads() {
    if let Some(n) = std::env::var("HYBRIDFOCK_THREADS").ok().and_then(|v| v.trim().parse::<usize>().ok()).filter(|&n| n > 0) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

/// Parse `args` (program name first), run the command and return the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{}", e.render().ansi());
            return e.exit_code();
        }
    };
    configure_threads();
    let result = match &cli.command {
        Command::Encode(a) => cmd_encode(a, out, err),
        Command::TermsScan(a) => cmd_terms_scan(a, out),
        Command::Groups(a) => cmd_groups(a, out),
        Command::Gates(a) => cmd_gates(a, out),
        Command::HybridFci(a) => cmd_hybrid_fci(a, out),
        Command::Vqe(a) => cmd_vqe(a, out),
        Command::Adapt(a) => cmd_adapt(a, out, err),
    };
    match result {
        Ok(Outcome::Done) => 0,
        Ok(Outcome::NotConverged) => {
            let _ = writeln!(err, "warning: not converged");
            3
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

/// Read a count column of a CSV table produced by this module.
pub fn csv_column(text: &str, column: &str) -> Option<Vec<f64>> {
    let mut lines = text.lines();
    let idx = lines.next()?.split(',').position(|c| c == column)?;
    lines.map(|l| l.split(',').nth(idx).and_then(|v| v.parse().ok())).collect()
}
