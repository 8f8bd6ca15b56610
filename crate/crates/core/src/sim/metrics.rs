//! Run metrics, derived from the block log alone.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::digest::Digest32;
use crate::ledger::{AccountId, Block, Call, Output, Verdict};
use crate::units::{Amount, Fixed};

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct MissionMetrics {
    pub mission_id: u64,
    pub drone_id: u64,
    pub operator: Option<AccountId>,
    pub fee_paid: Amount,
    pub settled: bool,
    pub payout: Amount,
    pub rewards: u64,
    pub penalties: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct OperatorMetrics {
    pub settled_missions: u64,
    pub total_payout: Amount,
    pub reputation: Fixed,
    pub k: Fixed,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ReporterMetrics {
    pub valid_reports: u64,
    pub earnings: Amount,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct OperationCount {
    pub invocations: u64,
    pub successes: u64,
    pub reverts: u64,
    pub writes: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct QuoteSample {
    pub tx_id: u64,
    pub drone_id: u64,
    pub active_missions: u64,
    pub fee: Amount,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct RunMetrics {
    pub chain_head: Digest32,
    pub blocks: u64,
    pub transactions: u64,
    pub missions: Vec<MissionMetrics>,
    pub operators: BTreeMap<AccountId, OperatorMetrics>,
    pub reporters: BTreeMap<AccountId, ReporterMetrics>,
    pub sightings: BTreeMap<Verdict, u64>,
    pub reverts: BTreeMap<String, u64>,
    pub operations: BTreeMap<String, OperationCount>,
    pub quotes: Vec<QuoteSample>,
}

impl RunMetrics {
    pub fn from_log(blocks: &[Block]) -> RunMetrics {
        let mut m = RunMetrics {
            chain_head: blocks.last().map(|b| b.hash).unwrap_or(Digest32::ZERO),
            blocks: blocks.len() as u64,
            ..RunMetrics::default()
        };
        let mut missions: BTreeMap<u64, MissionMetrics> = BTreeMap::new();
        for tx in blocks.iter().flat_map(|b| &b.transactions) {
            m.transactions += 1;
            let op = m.operations.entry(tx.call.name().to_owned()).or_default();
            op.invocations += 1;
            op.writes += tx.writes;
            let Some(output) = tx.result.output() else {
                op.reverts += 1;
                let reason = tx.result.revert_reason().unwrap_or_default();
                *m.reverts.entry(reason.to_owned()).or_default() += 1;
                continue;
            };
            op.successes += 1;
            match output {
                Output::Quote(q) => {
                    if let Call::RequestMissionQuote { drone_id } = tx.call {
                        m.quotes.push(QuoteSample {
                            tx_id: tx.tx_id,
                            drone_id,
                            active_missions: q.active_missions,
                            fee: q.fee,
                        });
                    }
                }
                Output::Plan(p) => {
                    missions.insert(
                        p.mission_id,
                        MissionMetrics {
                            mission_id: p.mission_id,
                            drone_id: p.drone_id,
                            operator: Some(tx.caller),
                            fee_paid: p.fee_paid,
                            ..MissionMetrics::default()
                        },
                    );
                }
                Output::Sighting { verdict, reporter_reward, .. } => {
                    *m.sightings.entry(*verdict).or_default() += 1;
                    let r = m.reporters.entry(tx.caller).or_default();
                    r.valid_reports += 1;
                    r.earnings += *reporter_reward;
                }
                Output::Settlement(s) => {
                    let mission = missions.entry(s.mission_id).or_insert_with(|| MissionMetrics {
                        mission_id: s.mission_id,
                        operator: Some(tx.caller),
                        ..MissionMetrics::default()
                    });
                    if let Call::ReportMissionCompletion { drone_id, .. } = tx.call {
                        mission.drone_id = drone_id;
                    }
                    mission.settled = true;
                    mission.payout = s.payout;
                    mission.rewards = s.rewards;
                    mission.penalties = s.penalties;
                    let o = m.operators.entry(tx.caller).or_insert(OperatorMetrics {
                        settled_missions: 0,
                        total_payout: Amount::ZERO,
                        reputation: s.reputation,
                        k: s.k,
                    });
                    o.settled_missions += 1;
                    o.total_payout += s.payout;
                    o.reputation = s.reputation;
                    o.k = s.k;
                }
                Output::Unit | Output::DroneId { .. } => {}
            }
        }
        m.missions = missions.into_values().collect();
        m
    }
}
