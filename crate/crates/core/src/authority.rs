//! The Authority contract: drone registration and the registry USSs read.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::digest::Digest32;
use crate::ledger::{reasons, AccountId, Ctx, Event, Output, Revert, Role, State};

/// One registered drone.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct DroneRecord {
    pub drone_id: u64,
    pub serial: String,
    /// SHA-256 of the owner's national id; the plaintext is never stored.
    pub owner_national_id_hash: Digest32,
    pub owner: AccountId,
    /// Reward points `r` of the current mission.
    pub rewards: u64,
    /// Penalty points `p` of the current mission.
    pub penalties: u64,
    pub has_active_plan: bool,
    pub sign_tac: bool,
}

/// Registry row as exported: the serial is replaced by its hash.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct RegistryEntry {
    pub drone_id: u64,
    pub serial_hash: Digest32,
    pub owner_national_id_hash: Digest32,
    pub owner: AccountId,
    pub rewards: u64,
    pub penalties: u64,
    pub has_active_plan: bool,
}

impl From<&DroneRecord> for RegistryEntry {
    fn from(d: &DroneRecord) -> Self {
        RegistryEntry {
            drone_id: d.drone_id,
            serial_hash: Digest32::of(d.serial.as_bytes()),
            owner_national_id_hash: d.owner_national_id_hash,
            owner: d.owner,
            rewards: d.rewards,
            penalties: d.penalties,
            has_active_plan: d.has_active_plan,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "Vec<DroneRecord>", into = "Vec<DroneRecord>")]
pub struct AuthorityState {
    drones: Vec<DroneRecord>,
    serials: HashMap<String, u64>,
}

impl From<Vec<DroneRecord>> for AuthorityState {
    fn from(drones: Vec<DroneRecord>) -> Self {
        let serials = drones.iter().map(|d| (d.serial.clone(), d.drone_id)).collect();
        AuthorityState { drones, serials }
    }
}

impl From<AuthorityState> for Vec<DroneRecord> {
    fn from(s: AuthorityState) -> Self {
        s.drones
    }
}

impl AuthorityState {
    pub fn len(&self) -> usize {
        self.drones.len()
    }

    pub fn is_empty(&self) -> bool {
        self.drones.is_empty()
    }

    pub fn drones(&self) -> &[DroneRecord] {
        &self.drones
    }

    pub fn export_registry(&self) -> Vec<RegistryEntry> {
        self.drones.iter().map(RegistryEntry::from).collect()
    }

    pub(crate) fn drone_mut(&mut self, id: u64) -> &mut DroneRecord {
        &mut self.drones[id as usize]
    }
}

pub(crate) fn register_drone(
    state: &mut State,
    ctx: &Ctx,
    serial: &str,
    owner_national_id: &str,
    sign_tac: bool,
) -> Result<(Output, Vec<Event>), Revert> {
    if state.authority.serials.contains_key(serial) {
        return Err(Revert::new(reasons::DRONE_ALREADY_REGISTERED));
    }
    if !sign_tac {
        return Err(Revert::new(reasons::ACCEPT_TERMS));
    }
    let drone_id = state.authority.drones.len() as u64;
    state.authority.drones.push(DroneRecord {
        drone_id,
        serial: serial.to_owned(),
        owner_national_id_hash: Digest32::of(owner_national_id.as_bytes()),
        owner: ctx.caller,
        rewards: 0,
        penalties: 0,
        has_active_plan: false,
        sign_tac,
    });
    state.authority.serials.insert(serial.to_owned(), drone_id);
    // record + serial index
    state.touch(2);
    Ok((Output::DroneId { drone_id }, Vec::new()))
}

/// Registry read, restricted to USS and authority accounts.
pub fn get_drone<'s>(state: &'s State, requester: &AccountId, drone_id: u64) -> Result<&'s DroneRecord, Revert> {
    let role = state.account(requester)?.role;
    if !matches!(role, Role::Uss | Role::Authority) {
        return Err(Revert::new(reasons::ACCESS_DENIED));
    }
    state
        .authority
        .drones
        .get(usize::try_from(drone_id).unwrap_or(usize::MAX))
        .ok_or_else(|| Revert::new(reasons::UNKNOWN_DRONE))
}
