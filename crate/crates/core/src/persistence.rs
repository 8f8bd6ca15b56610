//! Versioned, canonical file formats.
//!
//! | extension        | content                                             |
//! |------------------|-----------------------------------------------------|
//! | `.scenario.json` | a [`Scenario`]                                      |
//! | `.chain.jsonl`   | header line (anchor, genesis), then one block/line  |
//! | `.state.json`    | a resumable [`World`] snapshot                      |
//! | `.metrics.json`  | [`RunMetrics`]                                      |
//!
//! Every file carries `"schema": "MAJOR.MINOR"`; loaders reject other
//! majors. Currency is a decimal string, digests are lowercase hex, and
//! object keys are sorted, so equal values always give equal bytes.
//!
//! Plan nonces are the secret behind every RID-VC. State snapshots carry
//! them sealed under a 32-byte [`NonceKey`], or not at all for shareable
//! exports.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest as _, Sha256};

use crate::digest::{canonical_json, decode_hex_exact, Digest32};
use crate::error::{Error, Result};
use crate::ledger::{Block, ChainAnchor, Genesis, Ledger, LedgerParts};
use crate::rid::{verify_rid_vc, Nonce, NONCE_LEN};
use crate::sim::{DroneAgent, ReporterAgent, RunMetrics, RunOptions, Scenario, World};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SchemaVersion {
    pub major: u32,
    pub minor: u32,
}

impl SchemaVersion {
    pub const CURRENT: SchemaVersion = SchemaVersion { major: 1, minor: 0 };

    pub fn check(self) -> Result<()> {
        if self.major != Self::CURRENT.major {
            return Err(Error::SchemaMismatch(format!(
                "file schema {self}, this build reads {}.x",
                Self::CURRENT.major
            )));
        }
        Ok(())
    }
}

impl fmt::Display for SchemaVersion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.major, self.minor)
    }
}

impl FromStr for SchemaVersion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::SchemaMismatch(format!("bad schema version {s:?}"));
        let (a, b) = s.split_once('.').ok_or_else(bad)?;
        let num = |x: &str| -> Result<u32> {
            if x.is_empty() || !x.bytes().all(|c| c.is_ascii_digit()) {
                return Err(bad());
            }
            x.parse().map_err(|_| bad())
        };
        Ok(SchemaVersion { major: num(a)?, minor: num(b)? })
    }
}

const SCHEMA_KEY: &str = "schema";

/// Serializes `value` with a schema field added to its top-level object.
fn versioned<T: Serialize>(value: &T) -> Vec<u8> {
    let mut v = serde_json::to_value(value).expect("value is JSON-serializable");
    let Value::Object(map) = &mut v else {
        panic!("versioned payloads are JSON objects");
    };
    map.insert(SCHEMA_KEY.into(), Value::String(SchemaVersion::CURRENT.to_string()));
    canonical_json(&v)
}

/// Splits the schema field off a parsed object and checks it.
fn take_schema(v: &mut Value) -> Result<()> {
    let Value::Object(map) = v else {
        return Err(Error::CorruptPayload("expected a JSON object".into()));
    };
    match map.remove(SCHEMA_KEY) {
        Some(Value::String(s)) => s.parse::<SchemaVersion>()?.check(),
        Some(_) => Err(Error::SchemaMismatch("schema must be a string".into())),
        None => Err(Error::SchemaMismatch("missing schema field".into())),
    }
}

fn parse_error(e: serde_json::Error) -> Error {
    Error::Parse(e.to_string())
}

fn corrupt(e: serde_json::Error) -> Error {
    Error::CorruptPayload(e.to_string())
}

/// Parses a versioned document. Syntax errors map through `on_syntax`;
/// shape errors after the version check are corrupt payloads.
fn unversion<T: DeserializeOwned>(bytes: &[u8], on_syntax: fn(serde_json::Error) -> Error) -> Result<T> {
    let mut v: Value = serde_json::from_slice(bytes).map_err(on_syntax)?;
    take_schema(&mut v)?;
    serde_json::from_value(v).map_err(on_syntax)
}

pub fn scenario_to_json(s: &Scenario) -> Vec<u8> {
    versioned(s)
}

/// Reads a scenario; syntax errors report line and column.
pub fn scenario_from_json(bytes: &[u8]) -> Result<Scenario> {
    unversion(bytes, parse_error)
}

pub fn metrics_to_json(m: &RunMetrics) -> Vec<u8> {
    versioned(m)
}

pub fn metrics_from_json(bytes: &[u8]) -> Result<RunMetrics> {
    unversion(bytes, corrupt)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct ChainHeader {
    anchor: ChainAnchor,
    genesis: Genesis,
    genesis_hash: Digest32,
}

/// A parsed `.chain.jsonl` file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainLog {
    pub anchor: ChainAnchor,
    pub genesis: Genesis,
    pub genesis_hash: Digest32,
    pub blocks: Vec<Block>,
}

impl ChainLog {
    pub fn of(ledger: &Ledger) -> ChainLog {
        let genesis = ledger.genesis();
        ChainLog {
            anchor: ledger.anchor(),
            genesis_hash: Digest32::of(&canonical_json(&genesis)),
            genesis,
            blocks: ledger.blocks().to_vec(),
        }
    }

    pub fn to_jsonl(&self) -> Vec<u8> {
        let header =
            ChainHeader { anchor: self.anchor, genesis: self.genesis.clone(), genesis_hash: self.genesis_hash };
        let mut out = versioned(&header);
        out.push(b'\n');
        for b in &self.blocks {
            out.extend(canonical_json(b));
            out.push(b'\n');
        }
        out
    }

    pub fn from_jsonl(bytes: &[u8]) -> Result<ChainLog> {
        let text = std::str::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))?;
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, first) = lines.next().ok_or_else(|| Error::Parse("empty chain log".into()))?;
        let header: ChainHeader = unversion(first.as_bytes(), |e| Error::Parse(format!("header line: {e}")))?;
        let schema = serde_json::from_str::<Value>(first).ok().and_then(|v| v.get(SCHEMA_KEY).cloned());
        let mut reemitted = serde_json::to_value(&header)?;
        if let (Value::Object(map), Some(schema)) = (&mut reemitted, schema) {
            map.insert(SCHEMA_KEY.into(), schema);
        }
        if canonical_json(&reemitted) != first.as_bytes() {
            return Err(Error::Parse("line 1: header is not in canonical form".into()));
        }
        let blocks = lines
            .map(|(n, l)| {
                let block: Block = serde_json::from_str(l).map_err(|e| Error::Parse(format!("line {}: {e}", n + 1)))?;
                if canonical_json(&block) != l.as_bytes() {
                    return Err(Error::Parse(format!("line {}: block is not in canonical form", n + 1)));
                }
                Ok(block)
            })
            .collect::<Result<Vec<Block>>>()?;
        Ok(ChainLog { anchor: header.anchor, genesis: header.genesis, genesis_hash: header.genesis_hash, blocks })
    }

    /// Checks the genesis digest and every block link and hash.
    pub fn verify(&self) -> Result<()> {
        if Digest32::of(&canonical_json(&self.genesis)) != self.genesis_hash {
            return Err(Error::ChainBroken {
                index: self.anchor.index,
                reason: "genesis does not match its recorded hash".into(),
            });
        }
        crate::ledger::verify_blocks(self.anchor, &self.blocks)
    }
}

/// Key sealing nonces inside state snapshots.
#[derive(Clone, PartialEq, Eq)]
pub struct NonceKey(pub [u8; 32]);

impl fmt::Debug for NonceKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("NonceKey(..)")
    }
}

impl NonceKey {
    /// A key derived from the scenario seed: reproducible, so only as
    /// secret as the scenario file.
    pub fn from_seed(seed: u64) -> NonceKey {
        NonceKey(Sha256::new().chain_update(b"utm/nonce-key/").chain_update(seed.to_le_bytes()).finalize().into())
    }

    pub fn from_hex(s: &str) -> Result<NonceKey> {
        decode_hex_exact::<32>(s).map(NonceKey)
    }

    fn check_value(&self) -> Digest32 {
        Digest32(Sha256::new().chain_update(b"utm/nonce-check/").chain_update(self.0).finalize().into())
    }

    fn pad(&self, label: &[u8], drone_id: u64, mission_id: u64) -> [u8; 32] {
        Sha256::new()
            .chain_update(label)
            .chain_update(self.0)
            .chain_update(drone_id.to_be_bytes())
            .chain_update(mission_id.to_be_bytes())
            .finalize()
            .into()
    }

    fn seal(&self, drone_id: u64, mission_id: u64, nonce: &Nonce) -> String {
        let pad = self.pad(b"utm/nonce-pad/", drone_id, mission_id);
        let mut out = [0u8; 2 * NONCE_LEN];
        for i in 0..NONCE_LEN {
            out[i] = nonce[i] ^ pad[i];
        }
        let tag = self.tag(drone_id, mission_id, &out[..NONCE_LEN]);
        out[NONCE_LEN..].copy_from_slice(&tag);
        hex::encode(out)
    }

    fn tag(&self, drone_id: u64, mission_id: u64, ct: &[u8]) -> [u8; NONCE_LEN] {
        let full: [u8; 32] = Sha256::new()
            .chain_update(self.pad(b"utm/nonce-tag/", drone_id, mission_id))
            .chain_update(ct)
            .finalize()
            .into();
        full[..NONCE_LEN].try_into().unwrap()
    }

    fn open(&self, drone_id: u64, mission_id: u64, sealed: &str) -> Result<Nonce> {
        let bytes = decode_hex_exact::<{ 2 * NONCE_LEN }>(sealed)?;
        let (ct, tag) = bytes.split_at(NONCE_LEN);
        if self.tag(drone_id, mission_id, ct)[..] != *tag {
            return Err(Error::CorruptPayload(format!("sealed nonce of drone {drone_id} fails authentication")));
        }
        let pad = self.pad(b"utm/nonce-pad/", drone_id, mission_id);
        let mut nonce = [0u8; NONCE_LEN];
        for i in 0..NONCE_LEN {
            nonce[i] = ct[i] ^ pad[i];
        }
        Ok(nonce)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct SealedNonces {
    key_check: Digest32,
    /// Drone id to sealed nonce of its active plan.
    entries: BTreeMap<u64, String>,
}

/// A resumable simulation checkpoint, as stored in `.state.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct WorldSnapshot {
    scenario: Scenario,
    tick: u64,
    ledger: LedgerParts,
    drones: Vec<DroneAgent>,
    reporters: Vec<ReporterAgent>,
    nonces: Option<SealedNonces>,
}

impl WorldSnapshot {
    /// Captures `world`. With `key`, nonces are sealed into the snapshot;
    /// without, they are left out and the snapshot cannot be resumed.
    pub fn capture(world: &World, key: Option<&NonceKey>) -> WorldSnapshot {
        let ledger = world.ledger.parts();
        let nonces = key.map(|k| SealedNonces {
            key_check: k.check_value(),
            entries: ledger
                .state
                .uss
                .plans
                .values()
                .map(|p| (p.drone_id, k.seal(p.drone_id, p.mission_id, p.nonce())))
                .collect(),
        });
        WorldSnapshot {
            scenario: world.scenario.clone(),
            tick: world.tick,
            ledger,
            drones: world.drones.clone(),
            reporters: world.reporters.clone(),
            nonces,
        }
    }

    pub fn to_json(&self) -> Vec<u8> {
        versioned(self)
    }

    /// Parses a snapshot without unsealing anything.
    pub fn from_json(bytes: &[u8]) -> Result<WorldSnapshot> {
        unversion(bytes, corrupt)
    }

    pub fn tick(&self) -> u64 {
        self.tick
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn state(&self) -> &crate::ledger::State {
        &self.ledger.state
    }

    pub fn has_nonces(&self) -> bool {
        self.nonces.is_some()
    }

    /// Rebuilds the world, unsealing and re-checking every plan nonce.
    pub fn restore(self, key: &NonceKey, options: RunOptions) -> Result<World> {
        let mut ledger = self.ledger;
        let sealed = self.nonces.ok_or_else(|| Error::CorruptPayload("snapshot was exported without nonces".into()))?;
        if sealed.key_check != key.check_value() {
            return Err(Error::CorruptPayload("nonce key does not match the snapshot".into()));
        }
        if sealed.entries.len() != ledger.state.uss.plans.len() {
            return Err(Error::CorruptPayload("sealed nonces do not match the plan table".into()));
        }
        for plan in ledger.state.uss.plans_mut() {
            let entry = sealed
                .entries
                .get(&plan.drone_id)
                .ok_or_else(|| Error::CorruptPayload(format!("no sealed nonce for drone {}", plan.drone_id)))?;
            let nonce = key.open(plan.drone_id, plan.mission_id, entry)?;
            if !verify_rid_vc(plan.rid_vc.as_bytes(), &nonce, &plan.commitment) {
                return Err(Error::CorruptPayload(format!(
                    "nonce of drone {} does not reproduce its RID-VC",
                    plan.drone_id
                )));
            }
            plan.set_nonce(nonce);
        }
        self.scenario.validate()?;
        if self.drones.len() != self.scenario.drones.len() || self.reporters.len() != self.scenario.reporters.len() {
            return Err(Error::CorruptPayload("agent lists do not match the scenario".into()));
        }
        Ok(World {
            ledger: Ledger::from_parts(ledger),
            scenario: self.scenario,
            tick: self.tick,
            drones: self.drones,
            reporters: self.reporters,
            options,
            trace: Vec::new(),
        })
    }
}

/// Canonical snapshot bytes of `world`.
pub fn snapshot(world: &World, key: Option<&NonceKey>) -> Vec<u8> {
    WorldSnapshot::capture(world, key).to_json()
}

/// Inverse of [`snapshot`] for snapshots taken with `key`.
pub fn restore(bytes: &[u8], key: &NonceKey) -> Result<World> {
    WorldSnapshot::from_json(bytes)?.restore(key, RunOptions::default())
}
