//! Agents, the per-tick step, and the scenario runner.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clock::{from_scenario_seconds, Seconds};
use crate::digest::Digest32;
use crate::error::{Error, Result};
use crate::geo::{DmsPoint, GeoCell, Grid, Xy};
use crate::ledger::{AccountId, Call, Ledger, Output, Role, TxOutcome};
use crate::rid::{encode_rid_hex, RidFaa, RidMessage};
use crate::rng::SeededRng;
use crate::sim::metrics::RunMetrics;
use crate::sim::scenario::{DroneBehavior, Honesty, Mobility, Scenario};
use crate::units::Amount;

/// Where a drone agent is in the mission lifecycle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "phase", rename_all = "camelCase", rename_all_fields = "camelCase", deny_unknown_fields)]
pub enum DronePhase {
    Unregistered,
    /// Planned and waiting for (or in) flight.
    Planned {
        drone_id: u64,
        rid_vc: Digest32,
        depart: Seconds,
        arrive: Seconds,
    },
    Completed {
        drone_id: u64,
    },
    /// A setup call reverted; the drone stays grounded.
    Grounded {
        reason: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct DroneAgent {
    pub index: usize,
    pub operator: AccountId,
    pub phase: DronePhase,
    /// RID-VC a forger broadcasts instead of the genuine one.
    pub forged_vc: Digest32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct PendingReplay {
    pub due_tick: u64,
    pub drone_id: u64,
    pub rid: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ReporterAgent {
    pub index: usize,
    pub account: AccountId,
    pub cell: GeoCell,
    pub rng: SeededRng,
    /// `(drone id, RID-VC)` pairs already reported or queued; one per
    /// drone per mission.
    pub handled: BTreeSet<(u64, Digest32)>,
    pub replays: Vec<PendingReplay>,
}

/// One RID broadcast in the air during a tick.
#[derive(Debug, Clone)]
pub struct Broadcast {
    pub drone_index: usize,
    pub drone_id: u64,
    pub position: Xy,
    pub rid: RidMessage,
    pub hex: String,
}

/// A row of the per-tick trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TraceRow {
    pub tick: u64,
    pub time: Seconds,
    pub drone: usize,
    pub cell: GeoCell,
    pub broadcast: String,
}

struct Submission {
    reporter: usize,
    drone_id: u64,
    call: Call,
}

/// Options that change how a run executes but never its results.
#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    pub parallel: bool,
}

#[derive(Debug, Clone)]
pub struct World {
    pub(crate) scenario: Scenario,
    pub(crate) ledger: Ledger,
    pub(crate) tick: u64,
    pub(crate) drones: Vec<DroneAgent>,
    pub(crate) reporters: Vec<ReporterAgent>,
    pub(crate) options: RunOptions,
    pub(crate) trace: Vec<TraceRow>,
}

/// Converts scenario-local cells to absolute grid cells and coordinates.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Frame {
    grid: Grid,
    origin: GeoCell,
}

impl Frame {
    pub(crate) fn of(s: &Scenario) -> Frame {
        let grid = Grid::new(s.cell_size);
        Frame { grid, origin: grid.cell_of(s.origin) }
    }

    fn absolute(self, local: GeoCell) -> GeoCell {
        self.origin.offset(local.lat, local.lon)
    }

    pub(crate) fn local(self, abs: GeoCell) -> GeoCell {
        GeoCell { lat: abs.lat - self.origin.lat, lon: abs.lon - self.origin.lon }
    }

    /// Centre of a local cell, snapped to whole arcseconds.
    pub(crate) fn point(self, local: GeoCell) -> DmsPoint {
        self.grid.center(self.absolute(local)).to_dms().expect("scenario grid lies within coordinate range")
    }
}

impl World {
    pub fn new(scenario: Scenario, options: RunOptions) -> Result<World> {
        scenario.validate()?;
        let mut ledger = Ledger::new(scenario.ledger_config())?;
        let operators: Vec<AccountId> = (0..scenario.operator_count())
            .map(|_| ledger.create_funded_account(Role::Operator, scenario.operator_funding))
            .collect();
        let mut forge_rng = SeededRng::derive(scenario.seed, "forger");
        let drones = scenario
            .drones
            .iter()
            .enumerate()
            .map(|(i, d)| {
                let mut vc = [0u8; 32];
                forge_rng.fill(&mut vc);
                DroneAgent {
                    index: i,
                    operator: operators[d.operator.unwrap_or(i)],
                    phase: DronePhase::Unregistered,
                    forged_vc: Digest32(vc),
                }
            })
            .collect();
        let reporters = scenario
            .reporters
            .iter()
            .enumerate()
            .map(|(i, r)| ReporterAgent {
                index: i,
                account: ledger.create_funded_account(Role::Reporter, scenario.reporter_funding),
                cell: r.position,
                rng: SeededRng::derive(scenario.seed, &format!("reporter/{i}")),
                handled: BTreeSet::new(),
                replays: Vec::new(),
            })
            .collect();
        Ok(World { scenario, ledger, tick: 0, drones, reporters, options, trace: Vec::new() })
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn ledger(&self) -> &Ledger {
        &self.ledger
    }

    pub fn tick(&self) -> u64 {
        self.tick
    }

    pub fn drones(&self) -> &[DroneAgent] {
        &self.drones
    }

    pub fn reporters(&self) -> &[ReporterAgent] {
        &self.reporters
    }

    pub fn trace(&self) -> &[TraceRow] {
        &self.trace
    }

    pub fn set_options(&mut self, options: RunOptions) {
        self.options = options;
    }

    pub fn is_finished(&self) -> bool {
        self.tick >= self.scenario.duration_ticks
    }

    fn now(&self) -> Seconds {
        self.tick * self.scenario.tick_seconds
    }

    fn frame(&self) -> Frame {
        Frame::of(&self.scenario)
    }

    fn submit(&mut self, caller: AccountId, call: Call, value: Amount) -> TxOutcome {
        self.ledger.submit(caller, call, value).expect("simulation accounts exist").result.clone()
    }

    /// register -> subscribe -> quote -> plan for one drone.
    fn set_up(&mut self, i: usize) -> DronePhase {
        let spec = self.scenario.drones[i].clone();
        let owner = self.drones[i].operator;
        let frame = self.frame();
        let reg = self.submit(
            owner,
            Call::RegisterDrone {
                serial: format!("UTM-{:016x}-{i:04}", self.scenario.seed),
                owner_national_id: format!("NID-{}", owner),
                sign_tac: true,
            },
            Amount::ZERO,
        );
        let drone_id = match reg.output() {
            Some(Output::DroneId { drone_id }) => *drone_id,
            _ => return grounded(&reg),
        };
        let fee = self.scenario.subscription_fee;
        let sub = self.submit(owner, Call::SubscribeToUss { drone_id }, fee);
        if !sub.is_success() {
            return grounded(&sub);
        }
        let quote = self.submit(owner, Call::RequestMissionQuote { drone_id }, Amount::ZERO);
        let fee = match quote.output() {
            Some(Output::Quote(q)) => q.fee,
            _ => return grounded(&quote),
        };
        let (date, time) = from_scenario_seconds(self.scenario.epoch, spec.mission.departure_minute * 60);
        let plan = self.submit(
            owner,
            Call::RequestMissionPlan {
                drone_id,
                source: frame.point(spec.mission.source).to_string(),
                destination: frame.point(spec.mission.destination).to_string(),
                departure_date: date.to_string(),
                departure_time: time.to_string(),
            },
            fee,
        );
        let Some(Output::Plan(view)) = plan.output() else {
            return grounded(&plan);
        };
        let speed = self.speed(i);
        let depart = view.route.depart;
        let length = Xy::of(view.source).distance(Xy::of(view.destination));
        DronePhase::Planned { drone_id, rid_vc: view.rid_vc, depart, arrive: depart + (length / speed).ceil() as u64 }
    }

    fn speed(&self, i: usize) -> f64 {
        self.scenario.drones[i].speed_mps.unwrap_or(self.scenario.cruise_speed_mps) as f64
    }

    /// Actual position of a drone at `now`, if airborne.
    fn position(&self, i: usize, now: Seconds) -> Option<Xy> {
        let DronePhase::Planned { depart, arrive, .. } = self.drones[i].phase else {
            return None;
        };
        if now < depart || now > arrive {
            return None;
        }
        let spec = &self.scenario.drones[i];
        let frame = self.frame();
        let from = Xy::of(frame.point(spec.mission.source));
        let to = Xy::of(frame.point(spec.mission.destination));
        let length = from.distance(to);
        let frac = if length == 0.0 { 1.0 } else { ((now - depart) as f64 * self.speed(i) / length).min(1.0) };
        let mut pos = from.lerp(to, frac);
        if let DroneBehavior::Deviating { offset_cells, start_tick } = spec.behavior {
            if self.tick >= start_tick {
                let shift = (offset_cells * self.scenario.cell_size as i64) as f64;
                let (nx, ny) =
                    if length == 0.0 { (0.0, 1.0) } else { (-(to.y - from.y) / length, (to.x - from.x) / length) };
                pos = Xy { x: pos.x + nx * shift, y: pos.y + ny * shift };
            }
        }
        Some(pos)
    }

    fn broadcasts(&self, now: Seconds) -> Vec<Broadcast> {
        let frame = self.frame();
        let mut out = Vec::new();
        for (i, d) in self.drones.iter().enumerate() {
            let DronePhase::Planned { drone_id, rid_vc, .. } = d.phase else {
                continue;
            };
            let spec = &self.scenario.drones[i];
            let Some(position) = self.position(i, now) else {
                continue;
            };
            let vc = match spec.behavior {
                DroneBehavior::Silent => continue,
                DroneBehavior::Forger => d.forged_vc,
                _ => rid_vc,
            };
            let Ok(location) = position.to_dms() else {
                continue;
            };
            let rid = RidMessage {
                faa: RidFaa {
                    timestamp: now,
                    drone_location: location,
                    control_station: frame.point(spec.mission.source),
                    altitude_cm: self.scenario.altitude_m as i64 * 100,
                    velocity_cms: (self.speed(i) * 100.0) as i64,
                },
                rid_vc: vc,
            };
            let hex = encode_rid_hex(&rid).expect("simulated RID fields are in range");
            out.push(Broadcast { drone_index: i, drone_id, position, rid, hex });
        }
        out
    }

    /// Advances the world by one tick.
    pub fn step(&mut self) {
        assert!(!self.is_finished(), "scenario already finished");
        let now = self.now();
        self.ledger.set_time(now);
        if self.tick == 0 {
            for i in 0..self.drones.len() {
                let phase = self.set_up(i);
                self.drones[i].phase = phase;
            }
        }

        let frame = self.frame();
        let grid = frame.grid;
        let air = self.broadcasts(now);
        for b in &air {
            self.trace.push(TraceRow {
                tick: self.tick,
                time: now,
                drone: b.drone_index,
                cell: frame.local(grid.cell_of_xy(b.position)),
                broadcast: b.hex.clone(),
            });
        }

        let ctx = SenseCtx {
            tick: self.tick,
            now,
            frame,
            loss: self.scenario.loss_probability,
            extent: self.scenario.grid_extent,
        };
        let specs = &self.scenario.reporters;
        let decide = |r: &mut ReporterAgent| r.decide(&specs[r.index], &ctx, &air);
        let mut subs: Vec<Submission> = if self.options.parallel {
            self.reporters.par_iter_mut().flat_map_iter(decide).collect()
        } else {
            self.reporters.iter_mut().flat_map(decide).collect()
        };
        subs.sort_by_key(|s| (s.reporter, s.drone_id));
        for s in subs {
            let caller = self.reporters[s.reporter].account;
            self.submit(caller, s.call, Amount::ZERO);
        }

        for i in 0..self.drones.len() {
            let DronePhase::Planned { drone_id, rid_vc, arrive, .. } = self.drones[i].phase else {
                continue;
            };
            if now < arrive {
                continue;
            }
            let owner = self.drones[i].operator;
            self.submit(owner, Call::ReportMissionCompletion { drone_id, rid_vc: rid_vc.to_hex() }, Amount::ZERO);
            self.drones[i].phase = DronePhase::Completed { drone_id };
        }

        self.tick += 1;
        if self.tick.is_multiple_of(self.scenario.block_ticks) || self.is_finished() {
            self.ledger.seal_block();
        }
    }

    pub fn run_to_end(&mut self) {
        while !self.is_finished() {
            self.step();
        }
    }

    /// Metrics of the blocks this world has sealed.
    pub fn metrics(&self) -> RunMetrics {
        RunMetrics::from_log(self.ledger.blocks())
    }

    /// Σ balances now equals Σ balances at genesis.
    pub fn supply_conserved(&self) -> bool {
        let genesis: u64 = self.ledger.genesis().accounts.iter().map(|a| a.balance.0).sum();
        self.ledger.state().total_supply().0 == genesis
    }
}

fn grounded(outcome: &TxOutcome) -> DronePhase {
    DronePhase::Grounded { reason: outcome.revert_reason().unwrap_or("unexpected output").to_owned() }
}

struct SenseCtx {
    tick: u64,
    now: Seconds,
    frame: Frame,
    loss: f64,
    extent: crate::sim::scenario::Extent,
}

impl ReporterAgent {
    /// Senses this tick's broadcasts and decides what to submit. Touches
    /// only this agent, so reporters can decide in parallel.
    fn decide(
        &mut self,
        spec: &crate::sim::scenario::ReporterAgentSpec,
        ctx: &SenseCtx,
        air: &[Broadcast],
    ) -> Vec<Submission> {
        let mut out = Vec::new();
        let here = ctx.frame.point(self.cell);
        let here_xy = Xy::of(here);
        let report = |drone_id: u64, rid: String, at: DmsPoint| Call::ReportDrone {
            drone_id,
            rid,
            sighting_location: at.to_string(),
            sighting_time: ctx.now,
        };

        let (due, later): (Vec<_>, Vec<_>) =
            std::mem::take(&mut self.replays).into_iter().partition(|r| r.due_tick <= ctx.tick);
        self.replays = later;
        for r in due {
            let Honesty::Replayer { offset_cells, .. } = spec.honesty else {
                unreachable!("only replayers queue replays");
            };
            let fake = ctx.frame.point(self.cell.offset(offset_cells, 0));
            out.push(Submission { reporter: self.index, drone_id: r.drone_id, call: report(r.drone_id, r.rid, fake) });
        }

        for b in air {
            if b.position.distance(here_xy) > spec.sensing_range_m as f64 {
                continue;
            }
            if ctx.loss > 0.0 && self.rng.next_f64() < ctx.loss {
                continue;
            }
            if !self.handled.insert((b.drone_id, b.rid.rid_vc)) {
                continue;
            }
            match spec.honesty {
                Honesty::Honest => out.push(Submission {
                    reporter: self.index,
                    drone_id: b.drone_id,
                    call: report(b.drone_id, b.hex.clone(), here),
                }),
                Honesty::Replayer { delay_ticks, .. } => self.replays.push(PendingReplay {
                    due_tick: ctx.tick + delay_ticks.max(1),
                    drone_id: b.drone_id,
                    rid: b.hex.clone(),
                }),
            }
        }

        if spec.mobility == Mobility::RandomWalk {
            let dlat = self.rng.below(3) as i64 - 1;
            let dlon = self.rng.below(3) as i64 - 1;
            self.cell = ctx.extent.clamp(self.cell.offset(dlat, dlon));
        }
        out
    }
}

/// Everything a finished run produces.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub world: World,
    pub metrics: RunMetrics,
}

/// Runs a scenario from genesis to its last tick.
pub fn run(scenario: Scenario) -> Result<RunOutput> {
    run_with(scenario, RunOptions::default())
}

pub fn run_with(scenario: Scenario, options: RunOptions) -> Result<RunOutput> {
    let mut world = World::new(scenario, options)?;
    world.run_to_end();
    if !world.ledger.verify_chain() {
        return Err(Error::ChainBroken { index: 0, reason: "sealed chain failed verification".into() });
    }
    let metrics = world.metrics();
    Ok(RunOutput { world, metrics })
}
