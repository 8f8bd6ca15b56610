//! The `utm` command-line tool.
//!
//! Exit codes: 0 success, 2 unreadable or unparsable input, 3 runtime
//! failure, 4 broken chain.

mod demo;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::economics::{congestion_surcharge, dynamic_fee, reputation, FeeParams};
use crate::error::Error;
use crate::ledger::{AccountId, Event, Ledger};
use crate::persistence::{self, ChainLog, NonceKey, WorldSnapshot};
use crate::sim::{run_with, RunMetrics, RunOptions, TraceRow, World};
use crate::units::{Amount, Fixed};

pub const EXIT_OK: u8 = 0;
pub const EXIT_PARSE: u8 = 2;
pub const EXIT_RUNTIME: u8 = 3;
pub const EXIT_BROKEN_CHAIN: u8 = 4;

/// Environment variable holding a hex nonce key for state snapshots.
pub const NONCE_KEY_VAR: &str = "UTM_NONCE_KEY";

#[derive(Debug, Parser)]
#[command(name = "utm", version, about = "Blockchain-backed UAV traffic management simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a scenario and write metrics, chain log, trace and state.
    Run {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Overrides the scenario seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        quiet: bool,
        /// Let reporters decide in parallel (results are identical).
        #[arg(long)]
        parallel: bool,
    },
    /// Check every hash and link of a chain log.
    Verify { chain: PathBuf },
    /// Query a state snapshot: summary, accounts, drones, plans,
    /// reputations, subscriptions, account:<id> or drone:<id>.
    Inspect { state: PathBuf, query: String },
    /// Walk through one contract call: register, subscribe, quote, plan,
    /// report, complete or full.
    Demo { name: String },
    /// Reputation over an r x p grid as CSV (r,p,R).
    Surface {
        #[arg(long, default_value_t = 50)]
        max: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Quoted fee against concurrent active missions as CSV.
    FeeCurve {
        #[arg(long, default_value_t = 100)]
        max_active: u64,
        /// Cost-scaling factors to tabulate.
        #[arg(long, value_delimiter = ',', default_value = "1,0.5,0.05")]
        k: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// A failure with the exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    fn new(code: u8, message: impl Into<String>) -> CliError {
        CliError { code, message: message.into() }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> CliError {
        let code = match e {
            Error::Parse(_) | Error::SchemaMismatch(_) | Error::CorruptPayload(_) | Error::Json(_) => EXIT_PARSE,
            Error::ChainBroken { .. } => EXIT_BROKEN_CHAIN,
            _ => EXIT_RUNTIME,
        };
        CliError::new(code, e.to_string())
    }
}

type CliResult<T = ()> = Result<T, CliError>;

fn read(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|e| CliError::new(EXIT_PARSE, format!("{}: {e}", path.display())))
}

fn write(path: &Path, bytes: &[u8]) -> CliResult {
    fs::write(path, bytes).map_err(|e| CliError::new(EXIT_RUNTIME, format!("{}: {e}", path.display())))
}

fn nonce_key(seed: u64) -> CliResult<NonceKey> {
    match std::env::var(NONCE_KEY_VAR) {
        Ok(hex) => {
            NonceKey::from_hex(hex.trim()).map_err(|e| CliError::new(EXIT_PARSE, format!("{NONCE_KEY_VAR}: {e}")))
        }
        Err(_) => Ok(NonceKey::from_seed(seed)),
    }
}

/// Entry point shared by the binary and tests.
pub fn main_with<I, T>(args: I, out: &mut dyn std::io::Write, err: &mut dyn std::io::Write) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{e}");
            return ExitCode::from(if e.use_stderr() { EXIT_PARSE } else { EXIT_OK });
        }
    };
    match execute(cli.command, out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

pub fn execute(cmd: Command, out: &mut dyn std::io::Write) -> CliResult {
    let text = match cmd {
        Command::Run { scenario, out: dir, seed, quiet, parallel } => {
            run_cmd(&scenario, &dir, seed, parallel).map(|s| if quiet { String::new() } else { s })?
        }
        Command::Verify { chain } => verify_cmd(&chain)?,
        Command::Inspect { state, query } => inspect_cmd(&state, &query)?,
        Command::Demo { name } => demo::run(&name)?,
        Command::Surface { max, out: path } => emit(surface_csv(max), path)?,
        Command::FeeCurve { max_active, k, out: path } => {
            let ks = k
                .iter()
                .map(|s| parse_decimal(s).ok_or_else(|| CliError::new(EXIT_PARSE, format!("--k {s}: not a decimal"))))
                .collect::<CliResult<Vec<_>>>()?;
            emit(fee_curve_csv(&FeeParams::default(), &ks, max_active), path)?
        }
    };
    out.write_all(text.as_bytes()).map_err(|e| CliError::new(EXIT_RUNTIME, e.to_string()))
}

/// Parses a non-negative decimal with at most six fraction digits.
fn parse_decimal(s: &str) -> Option<Fixed> {
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    if int.is_empty() || frac.len() > 6 || !(int.bytes().chain(frac.bytes())).all(|c| c.is_ascii_digit()) {
        return None;
    }
    format!("{}.{frac:0<6}", int.parse::<u64>().ok()?).parse().ok()
}

fn emit(csv: String, path: Option<PathBuf>) -> CliResult<String> {
    match path {
        Some(p) => write(&p, csv.as_bytes()).map(|_| String::new()),
        None => Ok(csv),
    }
}

/// Output file stem: the scenario file name without its extensions.
fn stem(path: &Path) -> String {
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("run");
    let stem = name.strip_suffix(".json").unwrap_or(name);
    let stem = stem.strip_suffix(".scenario").unwrap_or(stem);
    if stem.is_empty() {
        "run".to_owned()
    } else {
        stem.to_owned()
    }
}

fn run_cmd(path: &Path, dir: &Path, seed: Option<u64>, parallel: bool) -> CliResult<String> {
    let mut scenario = persistence::scenario_from_json(&read(path)?)?;
    if let Some(s) = seed {
        scenario.seed = s;
    }
    let key = nonce_key(scenario.seed)?;
    let output = run_with(scenario, RunOptions { parallel })?;
    fs::create_dir_all(dir).map_err(|e| CliError::new(EXIT_RUNTIME, format!("{}: {e}", dir.display())))?;
    let stem = stem(path);
    let file = |ext: &str| dir.join(format!("{stem}.{ext}"));
    let world = &output.world;
    write(&file("metrics.json"), &persistence::metrics_to_json(&output.metrics))?;
    write(&file("chain.jsonl"), &ChainLog::of(world.ledger()).to_jsonl())?;
    write(&file("trace.csv"), &trace_csv(world.trace()))?;
    write(&file("events.jsonl"), &events_jsonl(world.ledger()))?;
    write(&file("state.json"), &persistence::snapshot(world, Some(&key)))?;
    if !world.supply_conserved() {
        return Err(CliError::new(EXIT_RUNTIME, "total supply changed during the run"));
    }
    Ok(summary(world, &output.metrics))
}

pub fn trace_csv(rows: &[TraceRow]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["tick", "time", "drone", "cell", "broadcast"]).unwrap();
    for r in rows {
        w.write_record([
            r.tick.to_string(),
            r.time.to_string(),
            r.drone.to_string(),
            r.cell.to_string(),
            r.broadcast.clone(),
        ])
        .unwrap();
    }
    w.into_inner().expect("in-memory writer")
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct EventRecord<'a> {
    block_index: u64,
    tx_id: u64,
    #[serde(flatten)]
    event: &'a Event,
}

/// The events stream: one JSON object per emitted event.
pub fn events_jsonl(ledger: &Ledger) -> Vec<u8> {
    let mut out = Vec::new();
    for b in ledger.blocks() {
        for tx in &b.transactions {
            if let crate::ledger::TxOutcome::Success { events, .. } = &tx.result {
                for event in events {
                    let rec = EventRecord { block_index: b.index, tx_id: tx.tx_id, event };
                    out.extend(crate::digest::canonical_json(&rec));
                    out.push(b'\n');
                }
            }
        }
    }
    out
}

fn short(id: &AccountId) -> String {
    let s = id.to_string();
    format!("{}..{}", &s[..6], &s[s.len() - 4..])
}

fn summary(world: &World, m: &RunMetrics) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "chain head {} ({} blocks, {} transactions)", m.chain_head, m.blocks, m.transactions);
    let _ = writeln!(
        s,
        "\n{:>7} {:>5} {:<14} {:>8} {:>8} {:>3} {:>3}",
        "mission", "drone", "operator", "fee", "payout", "r", "p"
    );
    for mi in &m.missions {
        let op = mi.operator.as_ref().map(short).unwrap_or_default();
        let payout = if mi.settled { mi.payout.to_string() } else { "open".into() };
        let _ = writeln!(
            s,
            "{:>7} {:>5} {:<14} {:>8} {:>8} {:>3} {:>3}",
            mi.mission_id, mi.drone_id, op, mi.fee_paid, payout, mi.rewards, mi.penalties
        );
    }
    let _ = writeln!(s, "\n{:<14} {:>8} {:>10} {:>10}", "operator", "missions", "R", "k");
    for (id, o) in &m.operators {
        let _ = writeln!(s, "{:<14} {:>8} {:>10} {:>10}", short(id), o.settled_missions, o.reputation, o.k);
    }
    if !m.reverts.is_empty() {
        let _ = writeln!(s, "\nreverts");
        for (reason, n) in &m.reverts {
            let _ = writeln!(s, "  {n:>5}  {reason}");
        }
    }
    let _ = writeln!(s, "\nsupply conserved: {}", world.supply_conserved());
    s
}

fn verify_cmd(path: &Path) -> CliResult<String> {
    let log = ChainLog::from_jsonl(&read(path)?)?;
    log.verify()?;
    let head = log.blocks.last().map(|b| b.hash.to_hex()).unwrap_or_else(|| log.anchor.prev_hash.to_hex());
    Ok(format!("ok: {} blocks from index {}, head {head}\n", log.blocks.len(), log.anchor.index))
}

fn inspect_cmd(path: &Path, query: &str) -> CliResult<String> {
    let snap = WorldSnapshot::from_json(&read(path)?)?;
    let state = snap.state();
    let json = |v: serde_json::Value| serde_json::to_string_pretty(&v).unwrap() + "\n";
    let unknown = |what: &str| CliError::new(EXIT_RUNTIME, format!("no such {what}"));
    let value = match query.split_once(':') {
        None => match query {
            "summary" => serde_json::json!({
                "tick": snap.tick(),
                "accounts": state.accounts.len(),
                "drones": state.authority.len(),
                "activePlans": state.uss.active_missions(),
                "subscriptions": state.uss.subscriptions.len(),
                "totalSupply": state.total_supply(),
                "noncesSealed": snap.has_nonces(),
            }),
            "accounts" => serde_json::to_value(state.accounts.values().collect::<Vec<_>>()).unwrap(),
            "drones" => serde_json::to_value(state.authority.export_registry()).unwrap(),
            "plans" => serde_json::to_value(state.uss.export_plans()).unwrap(),
            "reputations" => serde_json::to_value(&state.uss.reputations).unwrap(),
            "subscriptions" => serde_json::to_value(&state.uss.subscriptions).unwrap(),
            _ => return Err(CliError::new(EXIT_PARSE, format!("unknown query {query:?}"))),
        },
        Some(("account", id)) => {
            let id: AccountId = id.parse().map_err(|e: Error| CliError::new(EXIT_PARSE, e.to_string()))?;
            serde_json::to_value(state.accounts.get(&id).ok_or_else(|| unknown("account"))?).unwrap()
        }
        Some(("drone", id)) => {
            let id: u64 = id.parse().map_err(|_| CliError::new(EXIT_PARSE, format!("bad drone id {id:?}")))?;
            let entry = state
                .authority
                .export_registry()
                .into_iter()
                .find(|d| d.drone_id == id)
                .ok_or_else(|| unknown("drone"))?;
            serde_json::to_value(entry).unwrap()
        }
        _ => return Err(CliError::new(EXIT_PARSE, format!("unknown query {query:?}"))),
    };
    Ok(json(value))
}

/// `r,p,R` rows for every `0 <= r, p <= max`.
pub fn surface_csv(max: u64) -> String {
    let mut s = String::from("r,p,R\n");
    for r in 0..=max {
        for p in 0..=max {
            let _ = writeln!(s, "{r},{p},{}", reputation(r, p));
        }
    }
    s
}

/// `active_missions,k,surcharge,fee` rows.
pub fn fee_curve_csv(params: &FeeParams, ks: &[Fixed], max_active: u64) -> String {
    let mut s = String::from("active_missions,k,surcharge,fee\n");
    for &k in ks {
        for n in 0..=max_active {
            let a = congestion_surcharge(n, params.surcharge_per_mission);
            let fee: Amount = dynamic_fee(k, params.base_cost, params.rcd, a);
            let _ = writeln!(s, "{n},{k},{a},{fee}");
        }
    }
    s
}
