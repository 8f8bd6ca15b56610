//! The USS contract: subscriptions, quotes, mission plans, crowd sighting
//! reports and settlement.
//!
//! Money flows:
//! * subscription fee: operator -> treasury;
//! * plan fee: the deposit (RCD) goes operator -> escrow, the rest -> treasury;
//! * valid report: reporter reward treasury -> reporter; a reward point also
//!   moves one bonus unit treasury -> escrow, a penalty point moves up to one
//!   fine unit of the remaining deposit escrow -> treasury;
//! * completion: the plan's escrow (remaining deposit plus bonuses) -> operator.
//!
//! So the escrow balance always equals the sum over active plans of
//! `rcd_remaining + bonus_accrued`.

mod schedule;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use schedule::schedule_route;

use crate::authority::get_drone;
use crate::clock::{to_scenario_seconds, MissionDate, MissionTime, Seconds};
use crate::digest::Digest32;
use crate::economics::{FeeParams, ReputationState};
use crate::error::{Error, Result};
use crate::geo::{DmsPoint, GeoCell, Grid, Route};
use crate::ledger::{reasons, AccountId, Ctx, Event, Output, PlanView, Quote, Revert, Settlement, State, Verdict};
use crate::rid::{compute_rid_vc, decode_rid_hex, verify_rid_vc, Nonce, PlanCommitment, RidMessage, NONCE_LEN};
use crate::units::Amount;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default, deny_unknown_fields)]
pub struct UssConfig {
    pub fee_params: FeeParams,
    pub subscription_fee: Amount,
    pub subscription_period_secs: u64,
    /// Defaults to RCD/50.
    pub reporter_reward: Option<Amount>,
    /// Defaults to RCD/10.
    pub fine_unit: Option<Amount>,
    /// Defaults to RCD/10.
    pub bonus_unit: Option<Amount>,
    pub cell_size_m: u32,
    pub cruise_speed_mps: u32,
    pub altitude_m: u32,
    /// A sighting matches if the plan is in the sighting cell within this
    /// many seconds of the sighting time.
    pub match_window_secs: u64,
    pub buffer_cells: u64,
    pub buffer_secs: u64,
    /// Midnight of this date is scenario time 0.
    pub epoch: MissionDate,
}

impl Default for UssConfig {
    fn default() -> Self {
        UssConfig {
            fee_params: FeeParams::default(),
            subscription_fee: Amount(100),
            subscription_period_secs: 365 * 86_400,
            reporter_reward: None,
            fine_unit: None,
            bonus_unit: None,
            cell_size_m: 100,
            cruise_speed_mps: 10,
            altitude_m: 120,
            match_window_secs: 120,
            buffer_cells: 1,
            buffer_secs: 60,
            epoch: MissionDate::new(1, 1, 2025).unwrap(),
        }
    }
}

impl UssConfig {
    pub fn reporter_reward(&self) -> Amount {
        self.reporter_reward.unwrap_or_else(|| self.fee_params.rcd.scale_ratio(1, 50))
    }

    pub fn fine_unit(&self) -> Amount {
        self.fine_unit.unwrap_or_else(|| self.fee_params.rcd.scale_ratio(1, 10))
    }

    pub fn bonus_unit(&self) -> Amount {
        self.bonus_unit.unwrap_or_else(|| self.fee_params.rcd.scale_ratio(1, 10))
    }

    pub fn grid(&self) -> Grid {
        Grid::new(self.cell_size_m)
    }

    pub fn validate(&self) -> Result<()> {
        self.fee_params.validate()?;
        if self.cell_size_m == 0 || self.cruise_speed_mps == 0 {
            return Err(Error::ScenarioInvalid("cell size and cruise speed must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Subscription {
    pub drone_id: u64,
    pub subscriber: AccountId,
    pub paid_fee: Amount,
    pub expiry: Seconds,
}

impl Subscription {
    fn valid_for(&self, caller: &AccountId, now: Seconds) -> bool {
        self.subscriber == *caller && now < self.expiry
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct SightingRecord {
    pub reporter: AccountId,
    pub drone_id: u64,
    pub received_rid: RidMessage,
    pub sighting_location: DmsPoint,
    pub sighting_cell: GeoCell,
    pub sighting_time: Seconds,
    pub verdict: Verdict,
}

/// An active mission plan. The nonce is held USS-side only and is not
/// serialized with the plan.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct MissionPlan {
    pub mission_id: u64,
    pub drone_id: u64,
    pub commitment: PlanCommitment,
    pub route: Route,
    pub altitude_m: u32,
    pub rid_vc: Digest32,
    #[serde(skip)]
    pub(crate) nonce: Nonce,
    pub active: bool,
    pub fee_paid: Amount,
    pub rcd: Amount,
    pub rcd_remaining: Amount,
    pub bonus_accrued: Amount,
    pub sightings: BTreeMap<AccountId, SightingRecord>,
}

impl MissionPlan {
    pub fn view(&self) -> PlanView {
        PlanView {
            mission_id: self.mission_id,
            drone_id: self.drone_id,
            source: self.commitment.source,
            destination: self.commitment.destination,
            departure_date: self.commitment.date.to_string(),
            departure_time: self.commitment.time.to_string(),
            altitude_m: self.altitude_m,
            route: self.route.clone(),
            rid_vc: self.rid_vc,
            fee_paid: self.fee_paid,
        }
    }

    pub fn nonce(&self) -> &Nonce {
        &self.nonce
    }

    pub(crate) fn set_nonce(&mut self, nonce: Nonce) {
        self.nonce = nonce;
    }

    /// Amount the escrow holds for this plan.
    pub fn escrowed(&self) -> Amount {
        self.rcd_remaining + self.bonus_accrued
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct UssState {
    pub config: UssConfig,
    pub subscriptions: BTreeMap<u64, Subscription>,
    /// Active plans keyed by drone id.
    pub plans: BTreeMap<u64, MissionPlan>,
    pub reputations: BTreeMap<AccountId, ReputationState>,
    pub next_mission_id: u64,
}

impl UssState {
    pub fn new(config: UssConfig) -> UssState {
        UssState {
            config,
            subscriptions: BTreeMap::new(),
            plans: BTreeMap::new(),
            reputations: BTreeMap::new(),
            next_mission_id: 0,
        }
    }

    pub fn reputation_of(&self, operator: &AccountId) -> ReputationState {
        self.reputations.get(operator).cloned().unwrap_or_else(|| ReputationState::new(&self.config.fee_params))
    }

    pub fn active_missions(&self) -> u64 {
        self.plans.len() as u64
    }

    pub fn plan(&self, drone_id: u64) -> Option<&MissionPlan> {
        self.plans.get(&drone_id)
    }

    pub(crate) fn plans_mut(&mut self) -> impl Iterator<Item = &mut MissionPlan> {
        self.plans.values_mut()
    }

    /// Active-plan table without nonces.
    pub fn export_plans(&self) -> Vec<PlanView> {
        self.plans.values().map(MissionPlan::view).collect()
    }
}

fn parse_point(s: &str) -> Result<DmsPoint, Revert> {
    s.parse().map_err(|_| Revert::new(reasons::INVALID_DMS))
}

pub(crate) fn subscribe(state: &mut State, ctx: &Ctx, drone_id: u64) -> Result<(Output, Vec<Event>), Revert> {
    let treasury = state.contracts.uss_treasury;
    let drone = get_drone(state, &treasury, drone_id)?;
    if drone.owner != ctx.caller {
        return Err(Revert::new(reasons::NOT_OWNER_REGISTERED));
    }
    let fee = state.uss.config.subscription_fee;
    if state.uss.subscriptions.get(&drone_id).is_some_and(|s| ctx.now < s.expiry) {
        return Err(Revert::new(reasons::ALREADY_SUBSCRIBED));
    }
    if ctx.value != fee {
        return Err(Revert::new(reasons::PAY_SUBSCRIPTION_FEE));
    }
    state.transfer(&ctx.caller, &treasury, fee)?;
    let expiry = ctx.now.saturating_add(state.uss.config.subscription_period_secs);
    state.uss.subscriptions.insert(drone_id, Subscription { drone_id, subscriber: ctx.caller, paid_fee: fee, expiry });
    state.touch(1);
    Ok((Output::Unit, Vec::new()))
}

/// Current fee for `caller` to fly `drone_id`. Reads state only.
pub fn quote(state: &State, caller: &AccountId, now: Seconds, drone_id: u64) -> Result<Quote, Revert> {
    let drone = get_drone(state, &state.contracts.uss_treasury, drone_id)?;
    if drone.owner != *caller {
        return Err(Revert::new(reasons::NOT_OWNER_OF_A_REGISTERED));
    }
    let subscribed = state.uss.subscriptions.get(&drone_id).is_some_and(|s| s.valid_for(caller, now));
    if !subscribed {
        return Err(Revert::new(reasons::NOT_SUBSCRIBED));
    }
    Ok(current_quote(state, caller))
}

fn current_quote(state: &State, operator: &AccountId) -> Quote {
    let k = state.uss.reputation_of(operator).k;
    Quote::compute(k, &state.uss.config.fee_params, state.uss.active_missions())
}

pub(crate) struct PlanRequest<'a> {
    pub drone_id: u64,
    pub source: &'a str,
    pub destination: &'a str,
    pub date: &'a str,
    pub time: &'a str,
}

pub(crate) fn request_plan(state: &mut State, ctx: &Ctx, req: PlanRequest<'_>) -> Result<(Output, Vec<Event>), Revert> {
    let source = parse_point(req.source)?;
    let destination = parse_point(req.destination)?;
    let date: MissionDate = req.date.parse().map_err(|_| Revert::new(reasons::INVALID_DEPARTURE))?;
    let time: MissionTime = req.time.parse().map_err(|_| Revert::new(reasons::INVALID_DEPARTURE))?;

    let treasury = state.contracts.uss_treasury;
    let escrow = state.contracts.uss_escrow;
    let drone = get_drone(state, &treasury, req.drone_id)?;
    let subscribed = state.uss.subscriptions.get(&req.drone_id).is_some_and(|s| s.valid_for(&ctx.caller, ctx.now));
    if !subscribed {
        return Err(Revert::new(reasons::NOT_SUBSCRIBED_TO_USS));
    }
    if drone.has_active_plan {
        return Err(Revert::new(reasons::ALREADY_ACTIVE_PLAN));
    }
    let quote = current_quote(state, &ctx.caller);
    if ctx.value < quote.fee {
        return Err(Revert::new(reasons::PAY_PLAN_FEE));
    }
    let config = &state.uss.config;
    let depart = to_scenario_seconds(config.epoch, date, time)
        .filter(|&t| t >= ctx.now)
        .ok_or_else(|| Revert::new(reasons::INVALID_DEPARTURE))?;
    let route = schedule_route(config, state.uss.plans.values().map(|p| &p.route), source, destination, depart)?;
    state.can_pay(&ctx.caller, ctx.value)?;

    // effects
    let rcd = quote.rcd;
    let mut nonce = [0u8; NONCE_LEN];
    state.nonce_rng.fill(&mut nonce);
    let commitment = PlanCommitment { owner: ctx.caller, source, destination, date, time };
    let rid_vc = compute_rid_vc(&nonce, &commitment);
    state.transfer_checked(&ctx.caller, &escrow, rcd);
    state.transfer_checked(&ctx.caller, &treasury, ctx.value - rcd);

    let mission_id = state.uss.next_mission_id;
    state.uss.next_mission_id += 1;
    let plan = MissionPlan {
        mission_id,
        drone_id: req.drone_id,
        commitment,
        route,
        altitude_m: state.uss.config.altitude_m,
        rid_vc,
        nonce,
        active: true,
        fee_paid: ctx.value,
        rcd,
        rcd_remaining: rcd,
        bonus_accrued: Amount::ZERO,
        sightings: BTreeMap::new(),
    };
    let view = plan.view();
    state.uss.plans.insert(req.drone_id, plan);
    state.authority.drone_mut(req.drone_id).has_active_plan = true;
    // mission counter, plan, drone flag
    state.touch(3);
    Ok((Output::Plan(Box::new(view)), Vec::new()))
}

pub(crate) struct Report<'a> {
    pub drone_id: u64,
    pub rid: &'a str,
    pub sighting_location: &'a str,
    pub sighting_time: Seconds,
}

pub(crate) fn report_drone(state: &mut State, ctx: &Ctx, report: Report<'_>) -> Result<(Output, Vec<Event>), Revert> {
    let sighting_location = parse_point(report.sighting_location)?;
    let treasury = state.contracts.uss_treasury;
    let escrow = state.contracts.uss_escrow;
    let drone = get_drone(state, &treasury, report.drone_id)?;
    if drone.owner == ctx.caller {
        return Err(Revert::new(reasons::OWNER_CANNOT_REPORT));
    }
    let config = &state.uss.config;
    let plan = state.uss.plans.get(&report.drone_id);
    if plan.is_some_and(|p| p.sightings.contains_key(&ctx.caller)) {
        return Err(Revert::new(reasons::DUPLICATE_REPORT));
    }
    let invalid = || Revert::new(reasons::INVALID_REPORT);
    let plan = plan.ok_or_else(invalid)?;
    let rid = decode_rid_hex(report.rid).map_err(|_| invalid())?;
    if !verify_rid_vc(rid.rid_vc.as_bytes(), &plan.nonce, &plan.commitment) {
        return Err(invalid());
    }

    let sighting_cell = config.grid().cell_of(sighting_location);
    let on_plan = plan.route.occupies(sighting_cell, report.sighting_time, config.match_window_secs);
    let verdict = if on_plan { Verdict::Reward } else { Verdict::Penalty };
    let reward = config.reporter_reward();
    let bonus = if on_plan { config.bonus_unit() } else { Amount::ZERO };
    let fine = if on_plan { Amount::ZERO } else { config.fine_unit().min(plan.rcd_remaining) };
    if state.balance(&treasury).unwrap_or_default() < reward + bonus {
        return Err(Revert::new(reasons::TREASURY_INSUFFICIENT));
    }
    let mission_id = plan.mission_id;

    // effects
    state.transfer_checked(&treasury, &ctx.caller, reward);
    state.transfer_checked(&treasury, &escrow, bonus);
    state.transfer_checked(&escrow, &treasury, fine);
    let plan = state.uss.plans.get_mut(&report.drone_id).unwrap();
    plan.bonus_accrued += bonus;
    plan.rcd_remaining = plan.rcd_remaining - fine;
    plan.sightings.insert(
        ctx.caller,
        SightingRecord {
            reporter: ctx.caller,
            drone_id: report.drone_id,
            received_rid: rid,
            sighting_location,
            sighting_cell,
            sighting_time: report.sighting_time,
            verdict,
        },
    );
    let drone = state.authority.drone_mut(report.drone_id);
    match verdict {
        Verdict::Reward => drone.rewards += 1,
        _ => drone.penalties += 1,
    }
    // sighting record, escrow bookkeeping, drone counter
    state.touch(3);
    Ok((
        Output::Sighting { mission_id, verdict, reporter_reward: reward },
        vec![Event::DroneSighted { drone_id: report.drone_id, sighting_location }],
    ))
}

pub(crate) fn report_completion(
    state: &mut State,
    ctx: &Ctx,
    drone_id: u64,
    rid_vc: &str,
) -> Result<(Output, Vec<Event>), Revert> {
    let treasury = state.contracts.uss_treasury;
    let escrow = state.contracts.uss_escrow;
    let drone = get_drone(state, &treasury, drone_id)?;
    if drone.owner != ctx.caller {
        return Err(Revert::new(reasons::NOT_OWNER_OF_DRONE));
    }
    if !drone.has_active_plan {
        return Err(Revert::new(reasons::NO_ACTIVE_PLAN));
    }
    let (rewards, penalties) = (drone.rewards, drone.penalties);
    let plan = state.uss.plans.get(&drone_id).expect("active-plan flag implies a stored plan");
    let candidate: Digest32 = rid_vc.parse().map_err(|_| Revert::new(reasons::RID_VC_MISMATCH))?;
    if candidate != plan.rid_vc {
        return Err(Revert::new(reasons::RID_VC_MISMATCH));
    }
    let config = &state.uss.config;
    let payout = plan.rcd.saturating_sub(config.fine_unit().times(penalties)) + config.bonus_unit().times(rewards);
    debug_assert_eq!(payout, plan.escrowed());
    let payout = plan.escrowed();
    let mission_id = plan.mission_id;
    let plan_vc = plan.rid_vc;

    // effects
    state.transfer_checked(&escrow, &ctx.caller, payout);
    let params = state.uss.config.fee_params.clone();
    let rep = state.uss.reputations.entry(ctx.caller).or_insert_with(|| ReputationState::new(&params));
    rep.settle_mission(rewards, penalties, &params);
    let (reputation, k) = (rep.reputation, rep.k);
    let drone = state.authority.drone_mut(drone_id);
    drone.rewards = 0;
    drone.penalties = 0;
    drone.has_active_plan = false;
    state.uss.plans.remove(&drone_id);
    // reputation, drone counters and flag, plan deletion
    state.touch(5);
    Ok((
        Output::Settlement(Settlement { mission_id, payout, rewards, penalties, reputation, k }),
        vec![Event::MissionComplete { drone_id, rid_vc: plan_vc }],
    ))
}
