//! Remote ID broadcasts and the RID verification code (RID-VC).
//!
//! A broadcast is the regulator-mandated part (timestamp, drone location,
//! control-station location, altitude, velocity) followed by the RID-VC, a
//! SHA-256 commitment to the mission plan and a USS-held nonce.
//!
//! Wire layout, 64 bytes, all integers big-endian:
//!
//! | offset | size | field                                   |
//! |--------|------|-----------------------------------------|
//! | 0      | 8    | timestamp, u64 seconds                  |
//! | 8      | 4+4  | drone lat, lon (i32 arcseconds)         |
//! | 16     | 4+4  | control-station lat, lon (i32 arcsec)   |
//! | 24     | 4    | altitude, u32 centimeters               |
//! | 28     | 4    | velocity, u32 cm/s                      |
//! | 32     | 32   | RID-VC                                  |

use serde::{Deserialize, Serialize};

use crate::clock::{MissionDate, MissionTime};
use crate::digest::Digest32;
use crate::error::{Error, Result};
use crate::geo::DmsPoint;
use crate::ledger::AccountId;

pub const RID_WIRE_LEN: usize = 64;
pub const NONCE_LEN: usize = 16;

const FIELD_SEPARATOR: u8 = 0x1F;

/// USS-held secret mixed into each RID-VC.
pub type Nonce = [u8; NONCE_LEN];

/// The regulator-mandated broadcast fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct RidFaa {
    pub timestamp: u64,
    pub drone_location: DmsPoint,
    pub control_station: DmsPoint,
    pub altitude_cm: i64,
    pub velocity_cms: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct RidMessage {
    pub faa: RidFaa,
    pub rid_vc: Digest32,
}

/// Plan fields bound by the RID-VC, besides the nonce.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct PlanCommitment {
    pub owner: AccountId,
    pub source: DmsPoint,
    pub destination: DmsPoint,
    pub date: MissionDate,
    pub time: MissionTime,
}

impl PlanCommitment {
    /// Pre-hash bytes: the raw nonce, then each field as UTF-8, every
    /// element separated by 0x1F.
    pub fn preimage(&self, nonce: &Nonce) -> Vec<u8> {
        let fields = [
            self.owner.to_string(),
            self.source.to_string(),
            self.destination.to_string(),
            self.date.to_string(),
            self.time.to_string(),
        ];
        let mut out = Vec::with_capacity(NONCE_LEN + 128);
        out.extend_from_slice(nonce);
        for f in &fields {
            out.push(FIELD_SEPARATOR);
            out.extend_from_slice(f.as_bytes());
        }
        out
    }
}

pub fn compute_rid_vc(nonce: &Nonce, plan: &PlanCommitment) -> Digest32 {
    Digest32::of(&plan.preimage(nonce))
}

/// Checks a candidate RID-VC (any length) against the stored nonce and plan.
pub fn verify_rid_vc(candidate: &[u8], nonce: &Nonce, plan: &PlanCommitment) -> bool {
    if candidate.len() != 32 {
        return false;
    }
    let expected = compute_rid_vc(nonce, plan);
    candidate.iter().zip(expected.as_bytes()).fold(0u8, |acc, (a, b)| acc | (a ^ b)) == 0
}

fn to_u32(v: i64, what: &str) -> Result<u32> {
    u32::try_from(v).map_err(|_| Error::MalformedRid(format!("{what} {v} out of range")))
}

pub fn encode_rid(msg: &RidMessage) -> Result<[u8; RID_WIRE_LEN]> {
    let f = &msg.faa;
    let altitude = to_u32(f.altitude_cm, "altitude")?;
    let velocity = to_u32(f.velocity_cms, "velocity")?;
    let mut out = [0u8; RID_WIRE_LEN];
    out[0..8].copy_from_slice(&f.timestamp.to_be_bytes());
    out[8..12].copy_from_slice(&f.drone_location.lat.arcsec().to_be_bytes());
    out[12..16].copy_from_slice(&f.drone_location.lon.arcsec().to_be_bytes());
    out[16..20].copy_from_slice(&f.control_station.lat.arcsec().to_be_bytes());
    out[20..24].copy_from_slice(&f.control_station.lon.arcsec().to_be_bytes());
    out[24..28].copy_from_slice(&altitude.to_be_bytes());
    out[28..32].copy_from_slice(&velocity.to_be_bytes());
    out[32..64].copy_from_slice(msg.rid_vc.as_bytes());
    Ok(out)
}

pub fn decode_rid(bytes: &[u8]) -> Result<RidMessage> {
    if bytes.len() != RID_WIRE_LEN {
        return Err(Error::MalformedRid(format!("expected {RID_WIRE_LEN} bytes, got {}", bytes.len())));
    }
    let u32_at = |o: usize| u32::from_be_bytes(bytes[o..o + 4].try_into().unwrap());
    let i32_at = |o: usize| i32::from_be_bytes(bytes[o..o + 4].try_into().unwrap());
    let point =
        |o: usize| DmsPoint::from_arcsec(i32_at(o), i32_at(o + 4)).map_err(|e| Error::MalformedRid(e.to_string()));
    let faa = RidFaa {
        timestamp: u64::from_be_bytes(bytes[0..8].try_into().unwrap()),
        drone_location: point(8)?,
        control_station: point(16)?,
        altitude_cm: u32_at(24) as i64,
        velocity_cms: u32_at(28) as i64,
    };
    Ok(RidMessage { faa, rid_vc: Digest32(bytes[32..64].try_into().unwrap()) })
}

pub fn encode_rid_hex(msg: &RidMessage) -> Result<String> {
    encode_rid(msg).map(hex::encode)
}

pub fn decode_rid_hex(s: &str) -> Result<RidMessage> {
    let bytes = crate::digest::decode_hex(s).map_err(|e| Error::MalformedRid(e.to_string()))?;
    decode_rid(&bytes)
}
