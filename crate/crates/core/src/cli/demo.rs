//! Canned walkthroughs of the six contract calls, printed as transaction
//! receipts.

use std::fmt::Write as _;

use serde_json::Value;

use crate::cli::{CliError, CliResult, EXIT_PARSE, EXIT_RUNTIME};
use crate::geo::{DmsPoint, Xy};
use crate::ledger::{AccountId, Call, Ledger, LedgerConfig, Output, Role, Transaction};
use crate::rid::{encode_rid_hex, RidFaa, RidMessage};
use crate::units::Amount;

pub const NAMES: [&str; 7] = ["register", "subscribe", "quote", "plan", "report", "complete", "full"];

const SOURCE: &str = "+24°26′30″,+054°22′05″";
const DESTINATION: &str = "+24°26′30″,+054°22′40″";
const DATE: &str = "01012025";
const TIME: &str = "0010";

struct Walkthrough {
    ledger: Ledger,
    operator: AccountId,
    reporter: AccountId,
    receipts: Vec<(String, String)>,
}

impl Walkthrough {
    fn new() -> Walkthrough {
        let mut ledger = Ledger::new(LedgerConfig::default()).expect("default config is valid");
        let operator = ledger.create_funded_account(Role::Operator, Amount(10_000));
        let reporter = ledger.create_account(Role::Reporter);
        Walkthrough { ledger, operator, reporter, receipts: Vec::new() }
    }

    fn call(&mut self, step: &str, caller: AccountId, call: Call, value: Amount) -> CliResult<Transaction> {
        let tx =
            self.ledger.submit(caller, call, value).map_err(|e| CliError::new(EXIT_RUNTIME, e.to_string()))?.clone();
        if let Some(reason) = tx.result.revert_reason() {
            return Err(CliError::new(EXIT_RUNTIME, format!("{step} reverted: {reason}")));
        }
        self.receipts.push((step.to_owned(), receipt(&self.ledger, &tx)));
        Ok(tx)
    }
}

fn label(ledger: &Ledger, id: Option<AccountId>) -> String {
    let c = ledger.contracts();
    match id {
        Some(id) if id == c.authority => format!("Authority {id}"),
        Some(id) if id == c.uss_treasury => format!("USS {id}"),
        Some(id) => id.to_string(),
        None => "(none)".into(),
    }
}

fn receipt(ledger: &Ledger, tx: &Transaction) -> String {
    let call = serde_json::to_value(&tx.call).unwrap();
    let (events, output) = match &tx.result {
        crate::ledger::TxOutcome::Success { output, events } => {
            let mut output = serde_json::to_value(output).unwrap();
            if let Output::Plan(p) = tx.result.output().unwrap() {
                let r = &p.route;
                output["route"] =
                    Value::String(format!("{} cells, {} s to {} s", r.waypoints.len(), r.depart, r.arrive));
            }
            (serde_json::to_value(events).unwrap(), output)
        }
        crate::ledger::TxOutcome::Revert { reason } => (Value::Array(vec![]), Value::String(reason.clone())),
    };
    let pretty = |v: &Value| serde_json::to_string_pretty(v).unwrap().replace('\n', "\n                   ");
    let mut s = String::new();
    let rows = [
        ("status", if tx.result.is_success() { "success".to_owned() } else { "revert".to_owned() }),
        ("transaction hash", format!("0x{}", tx.hash())),
        ("transaction id", tx.tx_id.to_string()),
        ("from", tx.caller.to_string()),
        ("to", format!("{}.{}", label(ledger, tx.to), tx.call.name())),
        ("decoded input", pretty(&call["args"])),
        ("decoded output", pretty(&output)),
        ("logs", pretty(&events)),
        ("value", format!("{} units", tx.value)),
        ("state writes", tx.writes.to_string()),
    ];
    for (k, v) in rows {
        let _ = writeln!(s, "{k:<18} {v}");
    }
    s
}

/// Runs the protocol up to and including `name` and prints that step's
/// receipt (every receipt for `full`).
pub fn run(name: &str) -> CliResult<String> {
    let last = match name {
        "full" => NAMES.len() - 2,
        _ => NAMES[..6].iter().position(|n| *n == name).ok_or_else(|| {
            CliError::new(EXIT_PARSE, format!("unknown-demo: {name:?} (expected one of {})", NAMES.join(", ")))
        })?,
    };
    let mut w = Walkthrough::new();
    let op = w.operator;

    let tx = w.call(
        "register",
        op,
        Call::RegisterDrone {
            serial: "DJI-M300-0001".into(),
            owner_national_id: "784-1990-1234567-1".into(),
            sign_tac: true,
        },
        Amount::ZERO,
    )?;
    let Some(Output::DroneId { drone_id }) = tx.result.output().cloned() else {
        unreachable!("registration returns the drone id");
    };
    if last >= 1 {
        let fee = w.ledger.config().uss.subscription_fee;
        w.call("subscribe", op, Call::SubscribeToUss { drone_id }, fee)?;
    }
    let mut fee = Amount::ZERO;
    if last >= 2 {
        let tx = w.call("quote", op, Call::RequestMissionQuote { drone_id }, Amount::ZERO)?;
        if let Some(Output::Quote(q)) = tx.result.output() {
            fee = q.fee;
        }
    }
    let mut plan = None;
    if last >= 3 {
        let tx = w.call(
            "plan",
            op,
            Call::RequestMissionPlan {
                drone_id,
                source: SOURCE.into(),
                destination: DESTINATION.into(),
                departure_date: DATE.into(),
                departure_time: TIME.into(),
            },
            fee,
        )?;
        if let Some(Output::Plan(p)) = tx.result.output() {
            plan = Some(*p.clone());
        }
    }
    let plan = plan.filter(|_| last >= 4);
    if let Some(p) = &plan {
        let depart = p.route.depart;
        w.ledger.set_time(depart);
        let source: DmsPoint = SOURCE.parse().expect("demo coordinates parse");
        let rid = RidMessage {
            faa: RidFaa {
                timestamp: depart,
                drone_location: source,
                control_station: source,
                altitude_cm: p.altitude_m as i64 * 100,
                velocity_cms: w.ledger.config().uss.cruise_speed_mps as i64 * 100,
            },
            rid_vc: p.rid_vc,
        };
        w.call(
            "report",
            w.reporter,
            Call::ReportDrone {
                drone_id,
                rid: encode_rid_hex(&rid).expect("demo RID fields in range"),
                sighting_location: SOURCE.into(),
                sighting_time: depart,
            },
            Amount::ZERO,
        )?;
        if last >= 5 {
            let length = Xy::of(p.source).distance(Xy::of(p.destination));
            let speed = w.ledger.config().uss.cruise_speed_mps as f64;
            w.ledger.set_time(depart + (length / speed).ceil() as u64);
            w.call(
                "complete",
                op,
                Call::ReportMissionCompletion { drone_id, rid_vc: p.rid_vc.to_hex() },
                Amount::ZERO,
            )?;
        }
    }
    w.ledger.seal_block();

    let mut s = String::new();
    for (step, text) in &w.receipts {
        if name == "full" || step == name {
            let _ = writeln!(s, "== {step}\n{text}");
        }
    }
    Ok(s)
}
