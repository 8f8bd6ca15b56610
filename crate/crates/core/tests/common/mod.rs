#![allow(dead_code)]

pub mod branches;
pub mod oracle;

use utm_core::digest::canonical_json;
use utm_core::geo::DmsPoint;
use utm_core::ledger::{AccountId, Call, Ledger, LedgerConfig, Output, PlanView, Role, Transaction, TxOutcome};
use utm_core::rid::{encode_rid_hex, RidFaa, RidMessage};
use utm_core::units::Amount;

pub const SOURCE: &str = "+24°26′30″,+054°22′05″";
pub const DESTINATION: &str = "+24°26′30″,+054°22′40″";
pub const DATE: &str = "01012025";
pub const TIME: &str = "0010";
pub const DEPART: u64 = 600;

/// A ledger with two funded operators and three reporters.
pub struct Fixture {
    pub ledger: Ledger,
    pub op: AccountId,
    pub other: AccountId,
    pub reporters: [AccountId; 3],
}

impl Fixture {
    pub fn new() -> Fixture {
        Fixture::with_config(LedgerConfig::default())
    }

    pub fn with_config(config: LedgerConfig) -> Fixture {
        let mut ledger = Ledger::new(config).unwrap();
        let op = ledger.create_funded_account(Role::Operator, Amount(10_000));
        let other = ledger.create_funded_account(Role::Operator, Amount(10_000));
        let reporters = [
            ledger.create_account(Role::Reporter),
            ledger.create_account(Role::Reporter),
            ledger.create_account(Role::Reporter),
        ];
        Fixture { ledger, op, other, reporters }
    }

    pub fn submit(&mut self, caller: AccountId, call: Call, value: u64) -> Transaction {
        self.ledger.submit(caller, call, Amount(value)).unwrap().clone()
    }

    pub fn register(&mut self, caller: AccountId, serial: &str) -> u64 {
        let tx = self.submit(
            caller,
            Call::RegisterDrone {
                serial: serial.into(),
                owner_national_id: "784-1990-1234567-1".into(),
                sign_tac: true,
            },
            0,
        );
        match tx.result.output() {
            Some(Output::DroneId { drone_id }) => *drone_id,
            other => panic!("registration failed: {other:?} {:?}", tx.result),
        }
    }

    pub fn subscribe(&mut self, caller: AccountId, drone_id: u64) {
        let fee = self.ledger.config().uss.subscription_fee.0;
        let tx = self.submit(caller, Call::SubscribeToUss { drone_id }, fee);
        assert!(tx.result.is_success(), "{:?}", tx.result);
    }

    pub fn fee(&self, caller: AccountId, drone_id: u64) -> u64 {
        self.ledger.quote(&caller, drone_id).unwrap().fee.0
    }

    pub fn plan_call(drone_id: u64, time: &str) -> Call {
        Call::RequestMissionPlan {
            drone_id,
            source: SOURCE.into(),
            destination: DESTINATION.into(),
            departure_date: DATE.into(),
            departure_time: time.into(),
        }
    }

    pub fn plan(&mut self, caller: AccountId, drone_id: u64) -> PlanView {
        self.plan_at(caller, drone_id, TIME)
    }

    pub fn plan_at(&mut self, caller: AccountId, drone_id: u64, time: &str) -> PlanView {
        let fee = self.fee(caller, drone_id);
        let tx = self.submit(caller, Fixture::plan_call(drone_id, time), fee);
        match tx.result.output() {
            Some(Output::Plan(p)) => (**p).clone(),
            other => panic!("plan failed: {other:?} {:?}", tx.result),
        }
    }

    /// Registered, subscribed drone of `op` with an active plan.
    pub fn planned() -> (Fixture, u64, PlanView) {
        let mut f = Fixture::new();
        let d = f.register(f.op, "SN-1");
        f.subscribe(f.op, d);
        let p = f.plan(f.op, d);
        (f, d, p)
    }

    pub fn report_call(drone_id: u64, rid: String, at: &str, time: u64) -> Call {
        Call::ReportDrone { drone_id, rid, sighting_location: at.into(), sighting_time: time }
    }

    pub fn complete_call(drone_id: u64, plan: &PlanView) -> Call {
        Call::ReportMissionCompletion { drone_id, rid_vc: plan.rid_vc.to_hex() }
    }

    /// Fingerprint of all contract state and balances.
    pub fn snapshot(&self) -> Vec<u8> {
        canonical_json(self.ledger.state())
    }
}

/// The broadcast a drone flying `plan` emits at `time` from `at`.
pub fn rid_hex(plan: &PlanView, at: &str, time: u64) -> String {
    let at: DmsPoint = at.parse().unwrap();
    encode_rid_hex(&RidMessage {
        faa: RidFaa {
            timestamp: time,
            drone_location: at,
            control_station: plan.source,
            altitude_cm: plan.altitude_m as i64 * 100,
            velocity_cms: 1000,
        },
        rid_vc: plan.rid_vc,
    })
    .unwrap()
}

pub fn reason(tx: &Transaction) -> &str {
    match &tx.result {
        TxOutcome::Revert { reason } => reason,
        TxOutcome::Success { .. } => "success",
    }
}
