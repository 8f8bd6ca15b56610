use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::authority::AuthorityState;
use crate::ledger::{reasons, Account, AccountId, Revert};
use crate::rng::SeededRng;
use crate::units::Amount;
use crate::uss::UssState;

/// Accounts owned by the two contracts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ContractAccounts {
    pub authority: AccountId,
    /// Collects subscription fees, plan fees net of the deposit, and fines;
    /// pays reporter rewards and bonuses.
    pub uss_treasury: AccountId,
    /// Holds refundable compliance deposits and accrued bonuses of active plans.
    pub uss_escrow: AccountId,
}

/// Everything a transaction can read or write.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct State {
    pub accounts: BTreeMap<AccountId, Account>,
    pub contracts: ContractAccounts,
    pub authority: AuthorityState,
    pub uss: UssState,
    pub nonce_rng: SeededRng,
    #[serde(skip)]
    pub(crate) writes: u64,
}

impl State {
    pub fn balance(&self, id: &AccountId) -> Option<Amount> {
        self.accounts.get(id).map(|a| a.balance)
    }

    pub fn total_supply(&self) -> Amount {
        self.accounts.values().fold(Amount::ZERO, |acc, a| acc + a.balance)
    }

    pub fn account(&self, id: &AccountId) -> Result<&Account, Revert> {
        self.accounts.get(id).ok_or_else(|| Revert::new(reasons::UNKNOWN_ACCOUNT))
    }

    /// Checks that `from` can pay `amount` without moving anything.
    pub(crate) fn can_pay(&self, from: &AccountId, amount: Amount) -> Result<(), Revert> {
        if self.account(from)?.balance < amount {
            return Err(Revert::new(reasons::INSUFFICIENT_BALANCE));
        }
        Ok(())
    }

    pub(crate) fn transfer(&mut self, from: &AccountId, to: &AccountId, amount: Amount) -> Result<(), Revert> {
        self.account(to)?;
        self.can_pay(from, amount)?;
        if amount == Amount::ZERO || from == to {
            return Ok(());
        }
        let src = self.accounts.get_mut(from).unwrap();
        src.balance = src.balance - amount;
        let dst = self.accounts.get_mut(to).unwrap();
        dst.balance += amount;
        self.writes += 2;
        Ok(())
    }

    /// Transfer whose preconditions the caller has already checked.
    pub(crate) fn transfer_checked(&mut self, from: &AccountId, to: &AccountId, amount: Amount) {
        self.transfer(from, to, amount).expect("transfer preconditions verified before effects");
    }

    pub(crate) fn touch(&mut self, slots: u64) {
        self.writes += slots;
    }
}
