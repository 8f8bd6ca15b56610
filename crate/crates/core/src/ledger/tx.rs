use std::fmt;

use serde::{Deserialize, Serialize};

use crate::digest::{canonical_json, Digest32};
use crate::economics::FeeParams;
use crate::geo::{DmsPoint, Route};
use crate::ledger::AccountId;
use crate::units::{Amount, Fixed};

/// Revert reasons. The contract messages match the protocol's wording
/// exactly; ledger-level reasons are kebab-case.
pub mod reasons {
    pub const DRONE_ALREADY_REGISTERED: &str = "Drone already registered";
    pub const ACCEPT_TERMS: &str = "Please accept terms and conditions";

    pub const NOT_OWNER_REGISTERED: &str = "Not the owner of the registered drone";
    pub const ALREADY_SUBSCRIBED: &str = "Drone is already subscribed";
    pub const PAY_SUBSCRIPTION_FEE: &str = "Please make sure to pay the subscription fee";

    pub const NOT_OWNER_OF_A_REGISTERED: &str = "Not the owner of a registered drone";
    pub const NOT_SUBSCRIBED: &str = "Drone is not subscribed";

    pub const NOT_SUBSCRIBED_TO_USS: &str = "Not subscribed to a USS";
    pub const ALREADY_ACTIVE_PLAN: &str = "There is already an active plan for this drone";
    pub const PAY_PLAN_FEE: &str = "Please make sure to pay the mission plan fee";

    pub const OWNER_CANNOT_REPORT: &str = "Owner of drone cannot report it!";
    pub const DUPLICATE_REPORT: &str = "not allowed to report same drone more than once";
    pub const INVALID_REPORT: &str = "Invalid report";

    pub const NOT_OWNER_OF_DRONE: &str = "Not owner of drone";
    pub const NO_ACTIVE_PLAN: &str = "No active plan";

    pub const UNKNOWN_OPERATION: &str = "unknown-operation";
    pub const INSUFFICIENT_BALANCE: &str = "insufficient-balance";
    pub const NOT_PAYABLE: &str = "not-payable";
    pub const UNKNOWN_DRONE: &str = "unknown-drone";
    pub const UNKNOWN_ACCOUNT: &str = "unknown-account";
    pub const ACCESS_DENIED: &str = "access-denied";
    pub const INVALID_DMS: &str = "invalid-dms";
    pub const INVALID_DEPARTURE: &str = "invalid-departure";
    pub const SCHEDULE_CONFLICT: &str = "schedule-conflict";
    pub const RID_VC_MISMATCH: &str = "rid-vc-mismatch";
    pub const TREASURY_INSUFFICIENT: &str = "treasury-insufficient";
}

/// A contract-level failure. Reverted transactions change nothing but the log.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Revert(pub String);

impl Revert {
    pub fn new(reason: &str) -> Revert {
        Revert(reason.to_owned())
    }
}

impl fmt::Display for Revert {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// An operation name plus its arguments.
///
/// Arguments that need validation (coordinates, dates, hex payloads) travel
/// as strings so malformed input is recorded as a revert rather than
/// rejected before it reaches the log.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", content = "args", rename_all = "camelCase", rename_all_fields = "camelCase", deny_unknown_fields)]
pub enum Call {
    RegisterDrone {
        serial: String,
        owner_national_id: String,
        sign_tac: bool,
    },
    #[serde(rename = "subscribeToUSS")]
    SubscribeToUss {
        drone_id: u64,
    },
    RequestMissionQuote {
        drone_id: u64,
    },
    RequestMissionPlan {
        drone_id: u64,
        source: String,
        destination: String,
        departure_date: String,
        departure_time: String,
    },
    ReportDrone {
        drone_id: u64,
        rid: String,
        sighting_location: String,
        sighting_time: u64,
    },
    ReportMissionCompletion {
        drone_id: u64,
        rid_vc: String,
    },
    Transfer {
        to: AccountId,
    },
    /// An operation name the ledger does not know; always reverts.
    Unknown {
        name: String,
    },
}

impl Call {
    pub fn name(&self) -> &str {
        match self {
            Call::RegisterDrone { .. } => "registerDrone",
            Call::SubscribeToUss { .. } => "subscribeToUSS",
            Call::RequestMissionQuote { .. } => "requestMissionQuote",
            Call::RequestMissionPlan { .. } => "requestMissionPlan",
            Call::ReportDrone { .. } => "reportDrone",
            Call::ReportMissionCompletion { .. } => "reportMissionCompletion",
            Call::Transfer { .. } => "transfer",
            Call::Unknown { name } => name,
        }
    }

    pub fn is_payable(&self) -> bool {
        matches!(self, Call::SubscribeToUss { .. } | Call::RequestMissionPlan { .. } | Call::Transfer { .. })
    }

    /// Builds a call from an operation name and a JSON argument object.
    /// Unrecognised names become [`Call::Unknown`]; recognised names with
    /// malformed arguments are an error.
    pub fn from_parts(op: &str, args: serde_json::Value) -> crate::error::Result<Call> {
        const KNOWN: [&str; 7] = [
            "registerDrone",
            "subscribeToUSS",
            "requestMissionQuote",
            "requestMissionPlan",
            "reportDrone",
            "reportMissionCompletion",
            "transfer",
        ];
        if !KNOWN.contains(&op) {
            return Ok(Call::Unknown { name: op.to_owned() });
        }
        let v = serde_json::json!({ "op": op, "args": args });
        Ok(serde_json::from_value(v)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Reward,
    Penalty,
    Invalid,
}

/// Fee quote with its inputs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Quote {
    pub fee: Amount,
    pub k: Fixed,
    pub base_cost: Amount,
    pub rcd: Amount,
    pub surcharge: Amount,
    pub active_missions: u64,
}

impl Quote {
    pub fn compute(k: Fixed, params: &FeeParams, active_missions: u64) -> Quote {
        let surcharge = crate::economics::congestion_surcharge(active_missions, params.surcharge_per_mission);
        Quote {
            fee: crate::economics::dynamic_fee(k, params.base_cost, params.rcd, surcharge),
            k,
            base_cost: params.base_cost,
            rcd: params.rcd,
            surcharge,
            active_missions,
        }
    }
}

/// What the operator receives from a plan request. The nonce is never part
/// of it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct PlanView {
    pub mission_id: u64,
    pub drone_id: u64,
    pub source: DmsPoint,
    pub destination: DmsPoint,
    pub departure_date: String,
    pub departure_time: String,
    pub altitude_m: u32,
    pub route: Route,
    pub rid_vc: Digest32,
    pub fee_paid: Amount,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Settlement {
    pub mission_id: u64,
    pub payout: Amount,
    pub rewards: u64,
    pub penalties: u64,
    pub reputation: Fixed,
    pub k: Fixed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase", rename_all_fields = "camelCase", deny_unknown_fields)]
pub enum Output {
    Unit,
    DroneId { drone_id: u64 },
    Quote(Quote),
    Plan(Box<PlanView>),
    Sighting { mission_id: u64, verdict: Verdict, reporter_reward: Amount },
    Settlement(Settlement),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all_fields = "camelCase", deny_unknown_fields)]
pub enum Event {
    DroneSighted {
        drone_id: u64,
        sighting_location: DmsPoint,
    },
    #[serde(rename = "missionComplete")]
    MissionComplete {
        drone_id: u64,
        rid_vc: Digest32,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "camelCase", deny_unknown_fields)]
pub enum TxOutcome {
    Success { output: Output, events: Vec<Event> },
    Revert { reason: String },
}

impl TxOutcome {
    pub fn is_success(&self) -> bool {
        matches!(self, TxOutcome::Success { .. })
    }

    pub fn revert_reason(&self) -> Option<&str> {
        match self {
            TxOutcome::Revert { reason } => Some(reason),
            TxOutcome::Success { .. } => None,
        }
    }

    pub fn output(&self) -> Option<&Output> {
        match self {
            TxOutcome::Success { output, .. } => Some(output),
            TxOutcome::Revert { .. } => None,
        }
    }
}

/// A caller-attributed, executed state transition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Transaction {
    pub tx_id: u64,
    pub caller: AccountId,
    /// Contract or recipient account the call targets.
    pub to: Option<AccountId>,
    pub call: Call,
    pub value: Amount,
    pub timestamp: u64,
    /// Reserved for a caller signature; callers are attributed by the
    /// ledger's authenticated channel and this is always `None` today.
    pub signature: Option<String>,
    pub result: TxOutcome,
    /// Storage slots written by the call (0 for reverts and views).
    pub writes: u64,
}

impl Transaction {
    pub fn hash(&self) -> Digest32 {
        Digest32::of(&canonical_json(self))
    }
}
