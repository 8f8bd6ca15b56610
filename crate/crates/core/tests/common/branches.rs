//! Every branch of the six contract operations as a table of
//! (operation, branch, expected outcome) rows.

use utm_core::digest::Digest32;
use utm_core::ledger::{reasons, Call, LedgerConfig, Output, Role, Transaction, Verdict};
use utm_core::units::Amount;

use super::{reason, rid_hex, Fixture, DEPART, SOURCE};

pub const OFF_ROUTE: &str = "+24°26′40″,+054°22′05″";

pub struct Outcome {
    pub tx: Transaction,
    /// State and supply unchanged by a revert.
    pub atomic: bool,
    /// Row-specific postconditions.
    pub checks: bool,
}

pub struct Case {
    pub op: &'static str,
    pub branch: &'static str,
    pub expect: &'static str,
    pub run: fn() -> Outcome,
}

impl Case {
    pub fn check(&self) -> Result<(), String> {
        let out = (self.run)();
        let got = reason(&out.tx);
        if out.tx.call.name() != self.op {
            return Err(format!("submitted {} instead of {}", out.tx.call.name(), self.op));
        }
        if got != self.expect {
            return Err(format!("expected {:?}, got {got:?}", self.expect));
        }
        if !out.atomic {
            return Err("revert changed state".into());
        }
        if !out.checks {
            return Err("postcondition failed".into());
        }
        Ok(())
    }
}

fn exec(f: &mut Fixture, caller: utm_core::ledger::AccountId, call: Call, value: u64) -> Outcome {
    exec_with(f, caller, call, value, |_, _| true)
}

fn exec_with(
    f: &mut Fixture,
    caller: utm_core::ledger::AccountId,
    call: Call,
    value: u64,
    checks: impl FnOnce(&Fixture, &Transaction) -> bool,
) -> Outcome {
    let before = f.snapshot();
    let supply = f.ledger.state().total_supply();
    let tx = f.submit(caller, call, value);
    let atomic = tx.result.is_success() || (f.snapshot() == before && tx.writes == 0);
    let conserved = f.ledger.state().total_supply() == supply;
    let checks = conserved && checks(f, &tx);
    Outcome { tx, atomic, checks }
}

fn register(serial: &str, sign_tac: bool) -> Call {
    Call::RegisterDrone { serial: serial.into(), owner_national_id: "784-1990-1234567-1".into(), sign_tac }
}

fn subscribed() -> (Fixture, u64) {
    let mut f = Fixture::new();
    let d = f.register(f.op, "SN-1");
    f.subscribe(f.op, d);
    (f, d)
}

fn treasury(f: &Fixture) -> Amount {
    f.ledger.balance(&f.ledger.contracts().uss_treasury).unwrap()
}

fn escrow(f: &Fixture) -> Amount {
    f.ledger.balance(&f.ledger.contracts().uss_escrow).unwrap()
}

fn short_subscriptions() -> Fixture {
    let mut config = LedgerConfig::default();
    config.uss.subscription_period_secs = 100;
    Fixture::with_config(config)
}

fn plan_with(drone_id: u64, source: &str, destination: &str, date: &str, time: &str) -> Call {
    Call::RequestMissionPlan {
        drone_id,
        source: source.into(),
        destination: destination.into(),
        departure_date: date.into(),
        departure_time: time.into(),
    }
}

pub fn table() -> Vec<Case> {
    vec![
        // registerDrone
        Case {
            op: "registerDrone",
            branch: "first registration",
            expect: "success",
            run: || {
                let mut f = Fixture::new();
                let op = f.op;
                exec_with(&mut f, op, register("SN-1", true), 0, |f, tx| {
                    let rec = f.ledger.get_drone(&f.ledger.contracts().uss_treasury, 0).unwrap();
                    tx.result.output() == Some(&Output::DroneId { drone_id: 0 })
                        && tx.writes == 2
                        && rec.owner == f.op
                        && rec.rewards == 0
                        && rec.penalties == 0
                        && !rec.has_active_plan
                })
            },
        },
        Case {
            op: "registerDrone",
            branch: "serial already registered",
            expect: reasons::DRONE_ALREADY_REGISTERED,
            run: || {
                let mut f = Fixture::new();
                f.register(f.op, "SN-1");
                let other = f.other;
                exec(&mut f, other, register("SN-1", true), 0)
            },
        },
        Case {
            op: "registerDrone",
            branch: "terms not accepted",
            expect: reasons::ACCEPT_TERMS,
            run: || {
                let mut f = Fixture::new();
                let op = f.op;
                exec(&mut f, op, register("SN-1", false), 0)
            },
        },
        Case {
            op: "registerDrone",
            branch: "duplicate checked before terms",
            expect: reasons::DRONE_ALREADY_REGISTERED,
            run: || {
                let mut f = Fixture::new();
                f.register(f.op, "SN-1");
                let op = f.op;
                exec(&mut f, op, register("SN-1", false), 0)
            },
        },
        Case {
            op: "registerDrone",
            branch: "value attached",
            expect: reasons::NOT_PAYABLE,
            run: || {
                let mut f = Fixture::new();
                let op = f.op;
                exec(&mut f, op, register("SN-1", true), 5)
            },
        },
        // subscribeToUSS
        Case {
            op: "subscribeToUSS",
            branch: "owner pays exact fee",
            expect: "success",
            run: || {
                let mut f = Fixture::new();
                let d = f.register(f.op, "SN-1");
                let before = treasury(&f);
                let op = f.op;
                exec_with(&mut f, op, Call::SubscribeToUss { drone_id: d }, 100, |f, tx| {
                    treasury(f) == before + Amount(100) && tx.writes == 3
                })
            },
        },
        Case {
            op: "subscribeToUSS",
            branch: "unknown drone",
            expect: reasons::UNKNOWN_DRONE,
            run: || {
                let mut f = Fixture::new();
                let op = f.op;
                exec(&mut f, op, Call::SubscribeToUss { drone_id: 9 }, 100)
            },
        },
        Case {
            op: "subscribeToUSS",
            branch: "caller is not the owner",
            expect: reasons::NOT_OWNER_REGISTERED,
            run: || {
                let mut f = Fixture::new();
                let d = f.register(f.op, "SN-1");
                let other = f.other;
                exec(&mut f, other, Call::SubscribeToUss { drone_id: d }, 100)
            },
        },
        Case {
            op: "subscribeToUSS",
            branch: "already subscribed",
            expect: reasons::ALREADY_SUBSCRIBED,
            run: || {
                let (mut f, d) = subscribed();
                let op = f.op;
                exec(&mut f, op, Call::SubscribeToUss { drone_id: d }, 100)
            },
        },
        Case {
            op: "subscribeToUSS",
            branch: "fee minus one",
            expect: reasons::PAY_SUBSCRIPTION_FEE,
            run: || {
                let mut f = Fixture::new();
                let d = f.register(f.op, "SN-1");
                let op = f.op;
                exec(&mut f, op, Call::SubscribeToUss { drone_id: d }, 99)
            },
        },
        Case {
            op: "subscribeToUSS",
            branch: "fee plus one",
            expect: reasons::PAY_SUBSCRIPTION_FEE,
            run: || {
                let mut f = Fixture::new();
                let d = f.register(f.op, "SN-1");
                let op = f.op;
                exec(&mut f, op, Call::SubscribeToUss { drone_id: d }, 101)
            },
        },
        Case {
            op: "subscribeToUSS",
            branch: "balance below value",
            expect: reasons::INSUFFICIENT_BALANCE,
            run: || {
                let mut f = Fixture::new();
                let poor = f.ledger.create_funded_account(Role::Operator, Amount(50));
                let d = f.register(poor, "SN-1");
                exec(&mut f, poor, Call::SubscribeToUss { drone_id: d }, 100)
            },
        },
        Case {
            op: "subscribeToUSS",
            branch: "renewal after expiry",
            expect: "success",
            run: || {
                let mut f = short_subscriptions();
                let d = f.register(f.op, "SN-1");
                f.subscribe(f.op, d);
                f.ledger.set_time(100);
                let op = f.op;
                exec(&mut f, op, Call::SubscribeToUss { drone_id: d }, 100)
            },
        },
        // requestMissionQuote
        Case {
            op: "requestMissionQuote",
            branch: "owner of subscribed drone",
            expect: "success",
            run: || {
                let (mut f, d) = subscribed();
                let op = f.op;
                exec_with(&mut f, op, Call::RequestMissionQuote { drone_id: d }, 0, |_, tx| {
                    matches!(tx.result.output(), Some(Output::Quote(q)) if q.fee == Amount(1500)) && tx.writes == 0
                })
            },
        },
        Case {
            op: "requestMissionQuote",
            branch: "quote reflects congestion",
            expect: "success",
            run: || {
                let (mut f, _) = {
                    let (mut f, d, _) = Fixture::planned();
                    let d2 = f.register(f.other, "SN-2");
                    f.subscribe(f.other, d2);
                    (f, d)
                };
                let other = f.other;
                exec_with(
                    &mut f,
                    other,
                    Call::RequestMissionQuote { drone_id: 1 },
                    0,
                    |_, tx| matches!(tx.result.output(), Some(Output::Quote(q)) if q.fee == Amount(1510) && q.active_missions == 1),
                )
            },
        },
        Case {
            op: "requestMissionQuote",
            branch: "caller is not the owner",
            expect: reasons::NOT_OWNER_OF_A_REGISTERED,
            run: || {
                let (mut f, d) = subscribed();
                let other = f.other;
                exec(&mut f, other, Call::RequestMissionQuote { drone_id: d }, 0)
            },
        },
        Case {
            op: "requestMissionQuote",
            branch: "drone not subscribed",
            expect: reasons::NOT_SUBSCRIBED,
            run: || {
                let mut f = Fixture::new();
                let d = f.register(f.op, "SN-1");
                let op = f.op;
                exec(&mut f, op, Call::RequestMissionQuote { drone_id: d }, 0)
            },
        },
        Case {
            op: "requestMissionQuote",
            branch: "subscription expired",
            expect: reasons::NOT_SUBSCRIBED,
            run: || {
                let mut f = short_subscriptions();
                let d = f.register(f.op, "SN-1");
                f.subscribe(f.op, d);
                f.ledger.set_time(100);
                let op = f.op;
                exec(&mut f, op, Call::RequestMissionQuote { drone_id: d }, 0)
            },
        },
        Case {
            op: "requestMissionQuote",
            branch: "unknown drone",
            expect: reasons::UNKNOWN_DRONE,
            run: || {
                let mut f = Fixture::new();
                let op = f.op;
                exec(&mut f, op, Call::RequestMissionQuote { drone_id: 0 }, 0)
            },
        },
        Case {
            op: "requestMissionQuote",
            branch: "value attached",
            expect: reasons::NOT_PAYABLE,
            run: || {
                let (mut f, d) = subscribed();
                let op = f.op;
                exec(&mut f, op, Call::RequestMissionQuote { drone_id: d }, 1)
            },
        },
        // requestMissionPlan
        Case {
            op: "requestMissionPlan",
            branch: "value equals fee",
            expect: "success",
            run: || {
                let (mut f, d) = subscribed();
                let (t0, e0) = (treasury(&f), escrow(&f));
                let op = f.op;
                exec_with(&mut f, op, Fixture::plan_call(d, super::TIME), 1500, |f, tx| {
                    let Some(Output::Plan(p)) = tx.result.output() else { return false };
                    p.rid_vc != Digest32::ZERO
                        && p.route.depart == DEPART
                        && tx.writes == 7
                        && escrow(f) == e0 + Amount(1000)
                        && treasury(f) == t0 + Amount(500)
                        && f.ledger.get_drone(&f.ledger.contracts().uss_treasury, d).unwrap().has_active_plan
                })
            },
        },
        Case {
            op: "requestMissionPlan",
            branch: "overpayment kept by the USS",
            expect: "success",
            run: || {
                let (mut f, d) = subscribed();
                let t0 = treasury(&f);
                let op = f.op;
                exec_with(&mut f, op, Fixture::plan_call(d, super::TIME), 1600, |f, _| treasury(f) == t0 + Amount(600))
            },
        },
        Case {
            op: "requestMissionPlan",
            branch: "same route shifted beyond the buffer",
            expect: "success",
            run: || {
                let (mut f, _, _) = Fixture::planned();
                let d2 = f.register(f.other, "SN-2");
                f.subscribe(f.other, d2);
                let fee = f.fee(f.other, d2);
                let other = f.other;
                exec(&mut f, other, Fixture::plan_call(d2, "0020"), fee)
            },
        },
        Case {
            op: "requestMissionPlan",
            branch: "not subscribed",
            expect: reasons::NOT_SUBSCRIBED_TO_USS,
            run: || {
                let mut f = Fixture::new();
                let d = f.register(f.op, "SN-1");
                let op = f.op;
                exec(&mut f, op, Fixture::plan_call(d, super::TIME), 1500)
            },
        },
        Case {
            op: "requestMissionPlan",
            branch: "caller is not the subscriber",
            expect: reasons::NOT_SUBSCRIBED_TO_USS,
            run: || {
                let (mut f, d) = subscribed();
                let other = f.other;
                exec(&mut f, other, Fixture::plan_call(d, super::TIME), 1500)
            },
        },
        Case {
            op: "requestMissionPlan",
            branch: "plan already active",
            expect: reasons::ALREADY_ACTIVE_PLAN,
            run: || {
                let (mut f, d, _) = Fixture::planned();
                let op = f.op;
                exec(&mut f, op, Fixture::plan_call(d, "0030"), 2000)
            },
        },
        Case {
            op: "requestMissionPlan",
            branch: "fee minus one",
            expect: reasons::PAY_PLAN_FEE,
            run: || {
                let (mut f, d) = subscribed();
                let op = f.op;
                exec(&mut f, op, Fixture::plan_call(d, super::TIME), 1499)
            },
        },
        Case {
            op: "requestMissionPlan",
            branch: "balance below value",
            expect: reasons::INSUFFICIENT_BALANCE,
            run: || {
                let mut f = Fixture::new();
                let poor = f.ledger.create_funded_account(Role::Operator, Amount(1000));
                let d = f.register(poor, "SN-1");
                f.subscribe(poor, d);
                exec(&mut f, poor, Fixture::plan_call(d, super::TIME), 1500)
            },
        },
        Case {
            op: "requestMissionPlan",
            branch: "malformed source",
            expect: reasons::INVALID_DMS,
            run: || {
                let (mut f, d) = subscribed();
                let op = f.op;
                exec(&mut f, op, plan_with(d, "24N 54E", super::DESTINATION, super::DATE, super::TIME), 1500)
            },
        },
        Case {
            op: "requestMissionPlan",
            branch: "destination out of range",
            expect: reasons::INVALID_DMS,
            run: || {
                let (mut f, d) = subscribed();
                let op = f.op;
                exec(&mut f, op, plan_with(d, SOURCE, "+91°00′00″,+054°22′40″", super::DATE, super::TIME), 1500)
            },
        },
        Case {
            op: "requestMissionPlan",
            branch: "malformed date",
            expect: reasons::INVALID_DEPARTURE,
            run: || {
                let (mut f, d) = subscribed();
                let op = f.op;
                exec(&mut f, op, plan_with(d, SOURCE, super::DESTINATION, "32012025", super::TIME), 1500)
            },
        },
        Case {
            op: "requestMissionPlan",
            branch: "malformed time",
            expect: reasons::INVALID_DEPARTURE,
            run: || {
                let (mut f, d) = subscribed();
                let op = f.op;
                exec(&mut f, op, plan_with(d, SOURCE, super::DESTINATION, super::DATE, "2460"), 1500)
            },
        },
        Case {
            op: "requestMissionPlan",
            branch: "departure in the past",
            expect: reasons::INVALID_DEPARTURE,
            run: || {
                let (mut f, d) = subscribed();
                f.ledger.set_time(DEPART + 1);
                let op = f.op;
                exec(&mut f, op, Fixture::plan_call(d, super::TIME), 1500)
            },
        },
        Case {
            op: "requestMissionPlan",
            branch: "route overlaps an active plan",
            expect: reasons::SCHEDULE_CONFLICT,
            run: || {
                let (mut f, _, _) = Fixture::planned();
                let d2 = f.register(f.other, "SN-2");
                f.subscribe(f.other, d2);
                let fee = f.fee(f.other, d2);
                let other = f.other;
                exec(&mut f, other, Fixture::plan_call(d2, super::TIME), fee)
            },
        },
        Case {
            op: "requestMissionPlan",
            branch: "unknown drone",
            expect: reasons::UNKNOWN_DRONE,
            run: || {
                let mut f = Fixture::new();
                let op = f.op;
                exec(&mut f, op, Fixture::plan_call(4, super::TIME), 1500)
            },
        },
        // reportDrone
        Case {
            op: "reportDrone",
            branch: "sighting on plan",
            expect: "success",
            run: || {
                let (mut f, d, p) = Fixture::planned();
                let (t0, e0) = (treasury(&f), escrow(&f));
                let r = f.reporters[0];
                exec_with(
                    &mut f,
                    r,
                    Fixture::report_call(d, rid_hex(&p, SOURCE, DEPART), SOURCE, DEPART),
                    0,
                    |f, tx| {
                        let rec = f.ledger.get_drone(&f.ledger.contracts().uss_treasury, d).unwrap();
                        matches!(tx.result.output(), Some(Output::Sighting { verdict: Verdict::Reward, .. }))
                            && f.ledger.balance(&f.reporters[0]) == Some(Amount(20))
                            && treasury(f) == t0 - Amount(120)
                            && escrow(f) == e0 + Amount(100)
                            && rec.rewards == 1
                            && rec.penalties == 0
                            && tx.writes == 7
                    },
                )
            },
        },
        Case {
            op: "reportDrone",
            branch: "sighting three cells off route",
            expect: "success",
            run: || {
                let (mut f, d, p) = Fixture::planned();
                let e0 = escrow(&f);
                let r = f.reporters[0];
                exec_with(
                    &mut f,
                    r,
                    Fixture::report_call(d, rid_hex(&p, OFF_ROUTE, DEPART), OFF_ROUTE, DEPART),
                    0,
                    |f, tx| {
                        let rec = f.ledger.get_drone(&f.ledger.contracts().uss_treasury, d).unwrap();
                        matches!(tx.result.output(), Some(Output::Sighting { verdict: Verdict::Penalty, .. }))
                            && f.ledger.balance(&f.reporters[0]) == Some(Amount(20))
                            && escrow(f) == e0 - Amount(100)
                            && rec.rewards == 0
                            && rec.penalties == 1
                    },
                )
            },
        },
        Case {
            op: "reportDrone",
            branch: "sighting outside the time window",
            expect: "success",
            run: || {
                let (mut f, d, p) = Fixture::planned();
                let r = f.reporters[0];
                let late = DEPART + 3600;
                exec_with(&mut f, r, Fixture::report_call(d, rid_hex(&p, SOURCE, late), SOURCE, late), 0, |_, tx| {
                    matches!(tx.result.output(), Some(Output::Sighting { verdict: Verdict::Penalty, .. }))
                })
            },
        },
        Case {
            op: "reportDrone",
            branch: "owner reports own drone",
            expect: reasons::OWNER_CANNOT_REPORT,
            run: || {
                let (mut f, d, p) = Fixture::planned();
                let op = f.op;
                exec(&mut f, op, Fixture::report_call(d, rid_hex(&p, SOURCE, DEPART), SOURCE, DEPART), 0)
            },
        },
        Case {
            op: "reportDrone",
            branch: "second report by the same reporter",
            expect: reasons::DUPLICATE_REPORT,
            run: || {
                let (mut f, d, p) = Fixture::planned();
                let r = f.reporters[0];
                let call = Fixture::report_call(d, rid_hex(&p, SOURCE, DEPART), SOURCE, DEPART);
                f.submit(r, call.clone(), 0);
                exec(&mut f, r, call, 0)
            },
        },
        Case {
            op: "reportDrone",
            branch: "no active plan",
            expect: reasons::INVALID_REPORT,
            run: || {
                let (mut f, d, p) = Fixture::planned();
                let op = f.op;
                f.submit(op, Fixture::complete_call(d, &p), 0);
                let r = f.reporters[0];
                exec(&mut f, r, Fixture::report_call(d, rid_hex(&p, SOURCE, DEPART), SOURCE, DEPART), 0)
            },
        },
        Case {
            op: "reportDrone",
            branch: "random RID-VC",
            expect: reasons::INVALID_REPORT,
            run: || {
                let (mut f, d, mut p) = Fixture::planned();
                p.rid_vc = Digest32::of(b"forged");
                let r = f.reporters[0];
                exec(&mut f, r, Fixture::report_call(d, rid_hex(&p, SOURCE, DEPART), SOURCE, DEPART), 0)
            },
        },
        Case {
            op: "reportDrone",
            branch: "RID-VC of another mission",
            expect: reasons::INVALID_REPORT,
            run: || {
                let (mut f, d, _) = Fixture::planned();
                let d2 = f.register(f.other, "SN-2");
                f.subscribe(f.other, d2);
                let p2 = f.plan_at(f.other, d2, "0020");
                let r = f.reporters[0];
                exec(&mut f, r, Fixture::report_call(d, rid_hex(&p2, SOURCE, DEPART), SOURCE, DEPART), 0)
            },
        },
        Case {
            op: "reportDrone",
            branch: "malformed RID",
            expect: reasons::INVALID_REPORT,
            run: || {
                let (mut f, d, p) = Fixture::planned();
                let mut rid = rid_hex(&p, SOURCE, DEPART);
                rid.truncate(100);
                let r = f.reporters[0];
                exec(&mut f, r, Fixture::report_call(d, rid, SOURCE, DEPART), 0)
            },
        },
        Case {
            op: "reportDrone",
            branch: "malformed sighting location",
            expect: reasons::INVALID_DMS,
            run: || {
                let (mut f, d, p) = Fixture::planned();
                let r = f.reporters[0];
                exec(&mut f, r, Fixture::report_call(d, rid_hex(&p, SOURCE, DEPART), "here", DEPART), 0)
            },
        },
        Case {
            op: "reportDrone",
            branch: "unknown drone",
            expect: reasons::UNKNOWN_DRONE,
            run: || {
                let (mut f, _, p) = Fixture::planned();
                let r = f.reporters[0];
                exec(&mut f, r, Fixture::report_call(7, rid_hex(&p, SOURCE, DEPART), SOURCE, DEPART), 0)
            },
        },
        Case {
            op: "reportDrone",
            branch: "treasury cannot pay the reward",
            expect: reasons::TREASURY_INSUFFICIENT,
            run: || {
                let mut config = LedgerConfig::default();
                config.uss.reporter_reward = Some(Amount(10_000_000));
                let mut f = Fixture::with_config(config);
                let d = f.register(f.op, "SN-1");
                f.subscribe(f.op, d);
                let p = f.plan(f.op, d);
                let r = f.reporters[0];
                exec(&mut f, r, Fixture::report_call(d, rid_hex(&p, SOURCE, DEPART), SOURCE, DEPART), 0)
            },
        },
        Case {
            op: "reportDrone",
            branch: "value attached",
            expect: reasons::NOT_PAYABLE,
            run: || {
                let (mut f, d, p) = Fixture::planned();
                let op = f.other;
                exec(&mut f, op, Fixture::report_call(d, rid_hex(&p, SOURCE, DEPART), SOURCE, DEPART), 1)
            },
        },
        // reportMissionCompletion
        Case {
            op: "reportMissionCompletion",
            branch: "owner with matching RID-VC",
            expect: "success",
            run: || {
                let (mut f, d, p) = Fixture::planned();
                let b0 = f.ledger.balance(&f.op).unwrap();
                let op = f.op;
                exec_with(&mut f, op, Fixture::complete_call(d, &p), 0, |f, tx| {
                    let rec = f.ledger.get_drone(&f.ledger.contracts().uss_treasury, d).unwrap();
                    matches!(tx.result.output(), Some(Output::Settlement(s)) if s.payout == Amount(1000))
                        && f.ledger.balance(&f.op) == Some(b0 + Amount(1000))
                        && escrow(f) == Amount::ZERO
                        && !rec.has_active_plan
                        && f.ledger.state().uss.plan(d).is_none()
                        && tx.writes == 7
                })
            },
        },
        Case {
            op: "reportMissionCompletion",
            branch: "settles rewards and penalties",
            expect: "success",
            run: || {
                let (mut f, d, p) = Fixture::planned();
                for (i, at) in [SOURCE, SOURCE, OFF_ROUTE].into_iter().enumerate() {
                    let r = f.reporters[i];
                    f.submit(r, Fixture::report_call(d, rid_hex(&p, at, DEPART), at, DEPART), 0);
                }
                let op = f.op;
                exec_with(&mut f, op, Fixture::complete_call(d, &p), 0, |f, tx| {
                    // 1000 - 100 + 2*100; R = (2-1)/(2+1+2)
                    matches!(tx.result.output(), Some(Output::Settlement(s))
                        if s.payout == Amount(1100)
                            && s.rewards == 2
                            && s.penalties == 1
                            && s.reputation == utm_core::units::Fixed::from_micros(200_000))
                        && escrow(f) == Amount::ZERO
                })
            },
        },
        Case {
            op: "reportMissionCompletion",
            branch: "caller is not the owner",
            expect: reasons::NOT_OWNER_OF_DRONE,
            run: || {
                let (mut f, d, p) = Fixture::planned();
                let other = f.other;
                exec(&mut f, other, Fixture::complete_call(d, &p), 0)
            },
        },
        Case {
            op: "reportMissionCompletion",
            branch: "no plan was requested",
            expect: reasons::NO_ACTIVE_PLAN,
            run: || {
                let (mut f, d) = subscribed();
                let op = f.op;
                exec(&mut f, op, Call::ReportMissionCompletion { drone_id: d, rid_vc: Digest32::ZERO.to_hex() }, 0)
            },
        },
        Case {
            op: "reportMissionCompletion",
            branch: "second completion",
            expect: reasons::NO_ACTIVE_PLAN,
            run: || {
                let (mut f, d, p) = Fixture::planned();
                let op = f.op;
                f.submit(op, Fixture::complete_call(d, &p), 0);
                exec(&mut f, op, Fixture::complete_call(d, &p), 0)
            },
        },
        Case {
            op: "reportMissionCompletion",
            branch: "wrong RID-VC",
            expect: reasons::RID_VC_MISMATCH,
            run: || {
                let (mut f, d, _) = Fixture::planned();
                let op = f.op;
                exec(&mut f, op, Call::ReportMissionCompletion { drone_id: d, rid_vc: Digest32::of(b"x").to_hex() }, 0)
            },
        },
        Case {
            op: "reportMissionCompletion",
            branch: "malformed RID-VC",
            expect: reasons::RID_VC_MISMATCH,
            run: || {
                let (mut f, d, _) = Fixture::planned();
                let op = f.op;
                exec(&mut f, op, Call::ReportMissionCompletion { drone_id: d, rid_vc: "not-hex".into() }, 0)
            },
        },
        Case {
            op: "reportMissionCompletion",
            branch: "unknown drone",
            expect: reasons::UNKNOWN_DRONE,
            run: || {
                let (mut f, _, p) = Fixture::planned();
                let op = f.op;
                exec(&mut f, op, Fixture::complete_call(3, &p), 0)
            },
        },
        Case {
            op: "reportMissionCompletion",
            branch: "value attached",
            expect: reasons::NOT_PAYABLE,
            run: || {
                let (mut f, d, p) = Fixture::planned();
                let op = f.op;
                exec(&mut f, op, Fixture::complete_call(d, &p), 10)
            },
        },
    ]
}

/// Every verbatim protocol message the table must hit.
pub const PROTOCOL_MESSAGES: [&str; 15] = [
    reasons::DRONE_ALREADY_REGISTERED,
    reasons::ACCEPT_TERMS,
    reasons::NOT_OWNER_REGISTERED,
    reasons::ALREADY_SUBSCRIBED,
    reasons::PAY_SUBSCRIPTION_FEE,
    reasons::NOT_OWNER_OF_A_REGISTERED,
    reasons::NOT_SUBSCRIBED,
    reasons::NOT_SUBSCRIBED_TO_USS,
    reasons::ALREADY_ACTIVE_PLAN,
    reasons::PAY_PLAN_FEE,
    reasons::OWNER_CANNOT_REPORT,
    reasons::DUPLICATE_REPORT,
    reasons::INVALID_REPORT,
    reasons::NOT_OWNER_OF_DRONE,
    reasons::NO_ACTIVE_PLAN,
];
