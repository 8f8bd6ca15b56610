//! Pricing and reputation.
//!
//! * mission fee: `F = k*d + c + a`, where `d` is the uncongested mission cost,
//!   `c` the refundable compliance deposit (RCD) and `a` the congestion surcharge;
//! * Beta reputation: `R = (r - p) / (r + p + 2)` over reward and penalty points;
//! * cost scaling: `k = (1 - (R + 1)/2) * alpha + k_prev * (1 - alpha)`, floored
//!   at `k_min`.
//!
//! The congestion term `a` (currency) and the smoothing weight `alpha`
//! (dimensionless) are distinct parameters.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{div_round_half_up, Amount, Fixed, SCALE};

/// Fee and reputation parameters of a USS.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default, deny_unknown_fields)]
pub struct FeeParams {
    /// Base mission cost `d`.
    pub base_cost: Amount,
    /// Refundable compliance deposit `c`.
    pub rcd: Amount,
    /// Surcharge per concurrently active mission (`a = a0 * count`).
    pub surcharge_per_mission: Amount,
    /// Smoothing weight of the `k` update, in (0, 1).
    pub alpha: Fixed,
    /// Floor for `k`, in (0, 1].
    pub k_min: Fixed,
    /// `k` assigned to an operator with no history.
    pub initial_k: Fixed,
}

impl Default for FeeParams {
    fn default() -> Self {
        FeeParams {
            base_cost: Amount(500),
            rcd: Amount(1000),
            surcharge_per_mission: Amount(10),
            alpha: Fixed::from_micros(300_000),
            k_min: Fixed::from_micros(50_000),
            initial_k: Fixed::ONE,
        }
    }
}

impl FeeParams {
    pub fn validate(&self) -> Result<()> {
        if !(Fixed::ZERO < self.alpha && self.alpha < Fixed::ONE) {
            return Err(Error::ScenarioInvalid(format!("alpha {} not in (0,1)", self.alpha)));
        }
        if !(Fixed::ZERO < self.k_min && self.k_min <= Fixed::ONE) {
            return Err(Error::ScenarioInvalid(format!("kMin {} not in (0,1]", self.k_min)));
        }
        if self.initial_k < self.k_min {
            return Err(Error::ScenarioInvalid(format!("initialK {} below kMin {}", self.initial_k, self.k_min)));
        }
        Ok(())
    }
}

/// `k*d + c + a`, with `k*d` rounded half-up to whole currency units.
pub fn dynamic_fee(k: Fixed, d: Amount, c: Amount, a: Amount) -> Amount {
    assert!(k >= Fixed::ZERO, "negative cost-scaling factor");
    let scaled = div_round_half_up(k.micros() as i128 * d.0 as i128, SCALE as i128);
    Amount(u64::try_from(scaled).expect("fee overflow")) + c + a
}

pub fn congestion_surcharge(active_missions: u64, per_mission: Amount) -> Amount {
    per_mission.times(active_missions)
}

/// Beta reputation `(r - p) / (r + p + 2)`.
pub fn reputation(rewards: u64, penalties: u64) -> Fixed {
    let num = rewards as i128 - penalties as i128;
    let den = rewards as i128 + penalties as i128 + 2;
    Fixed::from_micros(div_round_half_up(num * SCALE as i128, den) as i64)
}

/// Next cost-scaling factor given the new reputation.
pub fn update_k(reputation: Fixed, k_prev: Fixed, alpha: Fixed, k_min: Fixed) -> Fixed {
    let s = SCALE as i128;
    let (r, kp, al) = (reputation.micros() as i128, k_prev.micros() as i128, alpha.micros() as i128);
    // ((1 - R)/2 * alpha + k_prev * (1 - alpha)) with one rounding step
    let num = (s - r) * al + 2 * kp * (s - al);
    let k = Fixed::from_micros(div_round_half_up(num, 2 * s) as i64);
    k.max(k_min)
}

/// Per-operator reputation. `rewards` and `penalties` accumulate over every
/// settled mission of every drone the operator owns.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ReputationState {
    pub rewards: u64,
    pub penalties: u64,
    pub reputation: Fixed,
    pub k: Fixed,
    pub settled_missions: u64,
}

impl ReputationState {
    pub fn new(params: &FeeParams) -> Self {
        ReputationState { rewards: 0, penalties: 0, reputation: Fixed::ZERO, k: params.initial_k, settled_missions: 0 }
    }

    /// Folds one settled mission into the state.
    pub fn settle_mission(&mut self, rewards: u64, penalties: u64, params: &FeeParams) {
        self.rewards += rewards;
        self.penalties += penalties;
        self.settled_missions += 1;
        self.reputation = reputation(self.rewards, self.penalties);
        self.k = update_k(self.reputation, self.k, params.alpha, params.k_min);
    }
}
