//! Scenario files: everything a run depends on.

use serde::{Deserialize, Serialize};

use crate::clock::MissionDate;
use crate::economics::FeeParams;
use crate::error::{Error, Result};
use crate::geo::{DmsPoint, GeoCell};
use crate::ledger::LedgerConfig;
use crate::units::Amount;
use crate::uss::UssConfig;

/// Grid size in cells; valid cells are `0..lat` by `0..lon`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Extent {
    pub lat: i64,
    pub lon: i64,
}

impl Extent {
    pub fn contains(self, c: GeoCell) -> bool {
        (0..self.lat).contains(&c.lat) && (0..self.lon).contains(&c.lon)
    }

    pub fn clamp(self, c: GeoCell) -> GeoCell {
        GeoCell { lat: c.lat.clamp(0, self.lat - 1), lon: c.lon.clamp(0, self.lon - 1) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase", rename_all_fields = "camelCase", deny_unknown_fields)]
pub enum DroneBehavior {
    /// Flies the plan and broadcasts the genuine RID-VC.
    Compliant,
    /// Flies the plan but, from `start_tick` on, `offset_cells` to the left
    /// of the planned track.
    Deviating { offset_cells: i64, start_tick: u64 },
    /// Flies the plan without broadcasting.
    Silent,
    /// Flies the plan broadcasting a RID-VC that belongs to no plan.
    Forger,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct MissionSpec {
    pub source: GeoCell,
    pub destination: GeoCell,
    /// Departure in whole minutes after the scenario epoch.
    pub departure_minute: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct DroneAgentSpec {
    pub behavior: DroneBehavior,
    pub mission: MissionSpec,
    /// Actual flight speed; defaults to the USS cruise speed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub speed_mps: Option<u32>,
    /// Drones with the same operator index share an operator account.
    /// Defaults to one operator per drone.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub operator: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub enum Mobility {
    Static,
    /// One step to a random neighbouring cell (or staying put) per tick.
    RandomWalk,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase", rename_all_fields = "camelCase", deny_unknown_fields)]
pub enum Honesty {
    /// Reports each drone once, at first reception, from where it stands.
    Honest,
    /// Records the first broadcast of each drone and reports it
    /// `delay_ticks` later from a location `offset_cells` north of itself.
    Replayer { delay_ticks: u64, offset_cells: i64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ReporterAgentSpec {
    pub position: GeoCell,
    #[serde(default = "default_mobility")]
    pub mobility: Mobility,
    #[serde(default = "default_sensing_range")]
    pub sensing_range_m: u32,
    #[serde(default = "default_honesty")]
    pub honesty: Honesty,
}

fn default_mobility() -> Mobility {
    Mobility::Static
}

fn default_sensing_range() -> u32 {
    50
}

fn default_honesty() -> Honesty {
    Honesty::Honest
}

impl ReporterAgentSpec {
    pub fn honest_at(position: GeoCell) -> ReporterAgentSpec {
        ReporterAgentSpec {
            position,
            mobility: Mobility::Static,
            sensing_range_m: default_sensing_range(),
            honesty: Honesty::Honest,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default, deny_unknown_fields)]
pub struct Scenario {
    pub seed: u64,
    pub epoch: MissionDate,
    /// Location of the south-west corner of cell `(0, 0)`.
    pub origin: DmsPoint,
    pub grid_extent: Extent,
    pub cell_size: u32,
    pub tick_seconds: u64,
    pub duration_ticks: u64,
    /// Seal a block every this many ticks.
    pub block_ticks: u64,
    pub fee_params: FeeParams,
    pub subscription_fee: Amount,
    pub reporter_reward: Option<Amount>,
    pub fine_unit: Option<Amount>,
    pub bonus_unit: Option<Amount>,
    pub cruise_speed_mps: u32,
    pub altitude_m: u32,
    pub treasury_funding: Amount,
    pub operator_funding: Amount,
    pub reporter_funding: Amount,
    /// Probability that a reporter in range misses a broadcast.
    pub loss_probability: f64,
    pub drones: Vec<DroneAgentSpec>,
    pub reporters: Vec<ReporterAgentSpec>,
}

impl Default for Scenario {
    fn default() -> Self {
        let uss = UssConfig::default();
        Scenario {
            seed: 0,
            epoch: uss.epoch,
            origin: DmsPoint::from_arcsec(24 * 3600 + 26 * 60, 54 * 3600 + 22 * 60).unwrap(),
            grid_extent: Extent { lat: 32, lon: 32 },
            cell_size: uss.cell_size_m,
            tick_seconds: 10,
            duration_ticks: 360,
            block_ticks: 1,
            fee_params: uss.fee_params,
            subscription_fee: uss.subscription_fee,
            reporter_reward: None,
            fine_unit: None,
            bonus_unit: None,
            cruise_speed_mps: uss.cruise_speed_mps,
            altitude_m: uss.altitude_m,
            treasury_funding: Amount(1_000_000),
            operator_funding: Amount(10_000),
            reporter_funding: Amount::ZERO,
            loss_probability: 0.0,
            drones: Vec::new(),
            reporters: Vec::new(),
        }
    }
}

impl Scenario {
    pub fn uss_config(&self) -> UssConfig {
        UssConfig {
            fee_params: self.fee_params.clone(),
            subscription_fee: self.subscription_fee,
            reporter_reward: self.reporter_reward,
            fine_unit: self.fine_unit,
            bonus_unit: self.bonus_unit,
            cell_size_m: self.cell_size,
            cruise_speed_mps: self.cruise_speed_mps,
            altitude_m: self.altitude_m,
            epoch: self.epoch,
            ..UssConfig::default()
        }
    }

    pub fn ledger_config(&self) -> LedgerConfig {
        LedgerConfig {
            seed: self.seed,
            default_balance: Amount::ZERO,
            treasury_funding: self.treasury_funding,
            allow_empty_blocks: false,
            uss: self.uss_config(),
        }
    }

    pub fn operator_count(&self) -> usize {
        self.drones.iter().enumerate().map(|(i, d)| d.operator.unwrap_or(i) + 1).max().unwrap_or(0)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::ScenarioInvalid(m));
        self.uss_config().validate()?;
        if self.grid_extent.lat <= 0 || self.grid_extent.lon <= 0 {
            return bad("gridExtent must be positive".into());
        }
        if self.tick_seconds == 0 || self.block_ticks == 0 {
            return bad("tickSeconds and blockTicks must be positive".into());
        }
        if !(0.0..=1.0).contains(&self.loss_probability) {
            return bad("lossProbability must lie in [0, 1]".into());
        }
        for (i, d) in self.drones.iter().enumerate() {
            let m = &d.mission;
            if !self.grid_extent.contains(m.source) || !self.grid_extent.contains(m.destination) {
                return bad(format!("drone {i}: mission leaves the grid"));
            }
            if d.speed_mps == Some(0) {
                return bad(format!("drone {i}: speed must be positive"));
            }
            if let Some(op) = d.operator {
                if op >= self.drones.len() {
                    return bad(format!("drone {i}: operator index {op} out of range"));
                }
            }
        }
        for (i, r) in self.reporters.iter().enumerate() {
            if !self.grid_extent.contains(r.position) {
                return bad(format!("reporter {i}: position outside the grid"));
            }
        }
        Ok(())
    }
}

/// Built-in scenarios, also shipped as files under `scenarios/`.
pub mod presets {
    use super::*;

    pub const NAMES: [&str; 5] = ["compliant", "deviating", "no-reporter", "pressure", "demo"];

    pub fn by_name(name: &str) -> Option<Scenario> {
        Some(match name {
            "compliant" => compliant(),
            "deviating" => deviating(),
            "no-reporter" => no_reporter(),
            "pressure" => pressure(),
            "demo" => demo(),
            _ => return None,
        })
    }

    fn east(row: i64, from: i64, to: i64, minute: u64) -> MissionSpec {
        MissionSpec {
            source: GeoCell { lat: row, lon: from },
            destination: GeoCell { lat: row, lon: to },
            departure_minute: minute,
        }
    }

    fn base(seed: u64) -> Scenario {
        Scenario { seed, duration_ticks: 60, ..Scenario::default() }
    }

    /// One drone flying east along row 5, five honest reporters on its track.
    pub fn compliant() -> Scenario {
        Scenario {
            drones: vec![DroneAgentSpec {
                behavior: DroneBehavior::Compliant,
                mission: east(5, 0, 10, 1),
                speed_mps: None,
                operator: None,
            }],
            reporters: (3..8).map(|lon| ReporterAgentSpec::honest_at(GeoCell { lat: 5, lon })).collect(),
            ..base(7)
        }
    }

    /// Same mission, but the drone slips three cells north after its second
    /// tick of flight, past five honest reporters that are not on the plan.
    pub fn deviating() -> Scenario {
        Scenario {
            drones: vec![DroneAgentSpec {
                behavior: DroneBehavior::Deviating { offset_cells: 3, start_tick: 8 },
                mission: east(5, 0, 10, 1),
                speed_mps: None,
                operator: None,
            }],
            reporters: (3..8).map(|lon| ReporterAgentSpec::honest_at(GeoCell { lat: 8, lon })).collect(),
            ..base(7)
        }
    }

    pub fn no_reporter() -> Scenario {
        Scenario { reporters: Vec::new(), ..compliant() }
    }

    /// 100 drones planned back to back, with 200 reporters scattered over
    /// the grid, half of them wandering.
    pub fn pressure() -> Scenario {
        let rows = 25;
        let drones = (0..100)
            .map(|i| DroneAgentSpec {
                behavior: DroneBehavior::Compliant,
                mission: east(3 * (i % rows) + 1, 2, 30, 1 + 10 * (i / rows) as u64),
                speed_mps: None,
                operator: None,
            })
            .collect();
        let reporters = (0..200)
            .map(|j: i64| ReporterAgentSpec {
                position: GeoCell { lat: (j * 7) % 76, lon: (j * 13) % 32 },
                mobility: if j % 2 == 0 { Mobility::Static } else { Mobility::RandomWalk },
                sensing_range_m: 50,
                honesty: Honesty::Honest,
            })
            .collect();
        Scenario {
            seed: 2024,
            grid_extent: Extent { lat: 76, lon: 32 },
            duration_ticks: 300,
            treasury_funding: Amount(10_000_000),
            drones,
            reporters,
            ..Scenario::default()
        }
    }

    /// A mixed airspace: compliant, deviating, silent and forging drones,
    /// honest static and wandering reporters, and one replayer.
    pub fn demo() -> Scenario {
        let drone = |behavior, mission| DroneAgentSpec { behavior, mission, speed_mps: None, operator: None };
        let mut reporters: Vec<_> = (3..8).map(|lon| ReporterAgentSpec::honest_at(GeoCell { lat: 2, lon })).collect();
        reporters.extend((3..6).map(|lon| ReporterAgentSpec::honest_at(GeoCell { lat: 9, lon })));
        reporters.extend((3..6).map(|lon| ReporterAgentSpec::honest_at(GeoCell { lat: 14, lon })));
        reporters.extend((3..6).map(|lon| ReporterAgentSpec::honest_at(GeoCell { lat: 20, lon })));
        reporters.push(ReporterAgentSpec {
            position: GeoCell { lat: 2, lon: 9 },
            mobility: Mobility::Static,
            sensing_range_m: 50,
            honesty: Honesty::Replayer { delay_ticks: 3, offset_cells: 4 },
        });
        reporters.push(ReporterAgentSpec {
            position: GeoCell { lat: 25, lon: 12 },
            mobility: Mobility::RandomWalk,
            sensing_range_m: 150,
            honesty: Honesty::Honest,
        });
        Scenario {
            seed: 42,
            duration_ticks: 120,
            drones: vec![
                drone(DroneBehavior::Compliant, east(2, 0, 12, 1)),
                drone(DroneBehavior::Deviating { offset_cells: 3, start_tick: 10 }, east(6, 0, 12, 1)),
                drone(DroneBehavior::Silent, east(14, 0, 12, 1)),
                drone(DroneBehavior::Forger, east(20, 0, 12, 1)),
                DroneAgentSpec { operator: Some(0), ..drone(DroneBehavior::Compliant, east(2, 0, 12, 8)) },
            ],
            reporters,
            ..Scenario::default()
        }
    }
}
