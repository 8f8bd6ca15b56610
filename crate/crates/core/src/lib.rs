//! Blockchain-backed UTM: drone registration, USS mission planning with
//! reputation-priced fees, crowd-sourced Remote ID reporting, and a
//! discrete-time simulator to drive them.

pub mod authority;
pub mod cli;
pub mod clock;
pub mod digest;
pub mod economics;
pub mod error;
pub mod geo;
pub mod ledger;
pub mod persistence;
pub mod rid;
pub mod rng;
pub mod sim;
pub mod units;
pub mod uss;

pub use error::{Error, Result};
