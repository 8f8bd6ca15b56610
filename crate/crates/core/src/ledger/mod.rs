//! Single-writer permissioned ledger.
//!
//! Every state change is a [`Transaction`] submitted by an attributed caller.
//! Transactions execute one at a time; a revert leaves balances and contract
//! state untouched and is still logged with its reason. Pending transactions
//! are batched into hash-linked [`Block`]s by [`Ledger::seal_block`].

mod account;
mod block;
mod state;
mod tx;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest as _, Sha256};

pub use account::{Account, AccountId, Role};
pub use block::{verify_blocks, Block, ChainAnchor};
pub use state::{ContractAccounts, State};
pub use tx::{reasons, Call, Event, Output, PlanView, Quote, Revert, Settlement, Transaction, TxOutcome, Verdict};

use crate::authority::{self, DroneRecord};
use crate::clock::Seconds;
use crate::digest::Digest32;
use crate::error::{Error, Result};
use crate::rng::SeededRng;
use crate::units::Amount;
use crate::uss::{self, PlanRequest, Report, UssConfig, UssState};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default, deny_unknown_fields)]
pub struct LedgerConfig {
    pub seed: u64,
    /// Balance given by [`Ledger::create_account`].
    pub default_balance: Amount,
    /// Genesis balance of the USS treasury, which pays reporter rewards.
    pub treasury_funding: Amount,
    pub allow_empty_blocks: bool,
    pub uss: UssConfig,
}

impl Default for LedgerConfig {
    fn default() -> Self {
        LedgerConfig {
            seed: 0,
            default_balance: Amount::ZERO,
            treasury_funding: Amount(1_000_000),
            allow_empty_blocks: false,
            uss: UssConfig::default(),
        }
    }
}

/// Enough to rebuild the pre-transaction state of a ledger.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Genesis {
    pub config: LedgerConfig,
    /// Accounts in creation order with their opening balances.
    pub accounts: Vec<Account>,
}

/// Execution context of one call.
#[derive(Debug, Clone, Copy)]
pub struct Ctx {
    pub caller: AccountId,
    pub value: Amount,
    pub now: Seconds,
}

#[derive(Debug, Clone)]
pub struct Ledger {
    config: LedgerConfig,
    state: State,
    genesis: Vec<Account>,
    clock: Seconds,
    next_tx_id: u64,
    pending: Vec<Transaction>,
    anchor: ChainAnchor,
    blocks: Vec<Block>,
}

fn derive_account_id(seed: u64, n: u64) -> AccountId {
    let mut h = Sha256::new();
    h.update(b"utm/account/");
    h.update(seed.to_le_bytes());
    h.update(n.to_le_bytes());
    let d = h.finalize();
    AccountId(d[..20].try_into().unwrap())
}

impl Ledger {
    pub fn new(config: LedgerConfig) -> Result<Ledger> {
        config.uss.validate()?;
        let contracts = ContractAccounts {
            authority: derive_account_id(config.seed, 0),
            uss_treasury: derive_account_id(config.seed, 1),
            uss_escrow: derive_account_id(config.seed, 2),
        };
        let state = State {
            accounts: BTreeMap::new(),
            contracts,
            authority: Default::default(),
            uss: UssState::new(config.uss.clone()),
            nonce_rng: SeededRng::derive(config.seed, "nonce"),
            writes: 0,
        };
        let mut ledger = Ledger {
            state,
            genesis: Vec::new(),
            clock: 0,
            next_tx_id: 0,
            pending: Vec::new(),
            anchor: ChainAnchor::GENESIS,
            blocks: Vec::new(),
            config,
        };
        ledger.insert_account(contracts.authority, Role::Authority, Amount::ZERO);
        ledger.insert_account(contracts.uss_treasury, Role::Uss, ledger.config.treasury_funding);
        ledger.insert_account(contracts.uss_escrow, Role::Uss, Amount::ZERO);
        Ok(ledger)
    }

    /// Rebuilds a ledger at its genesis state.
    pub fn from_genesis(genesis: &Genesis) -> Result<Ledger> {
        let mut ledger = Ledger::new(genesis.config.clone())?;
        if genesis.accounts.len() < 3 || ledger.genesis[..] != genesis.accounts[..3] {
            return Err(Error::CorruptPayload("genesis contract accounts do not match config".into()));
        }
        for acct in &genesis.accounts[3..] {
            let id = ledger.create_funded_account(acct.role, acct.balance);
            if id != acct.id {
                return Err(Error::CorruptPayload(format!("genesis account {} does not derive from seed", acct.id)));
            }
        }
        Ok(ledger)
    }

    fn insert_account(&mut self, id: AccountId, role: Role, balance: Amount) {
        let account = Account { id, role, balance };
        self.genesis.push(account.clone());
        self.state.accounts.insert(id, account);
    }

    pub fn create_account(&mut self, role: Role) -> AccountId {
        let balance = self.config.default_balance;
        self.create_funded_account(role, balance)
    }

    /// Creates an account holding `balance` minted at creation.
    pub fn create_funded_account(&mut self, role: Role, balance: Amount) -> AccountId {
        let id = derive_account_id(self.config.seed, self.genesis.len() as u64);
        self.insert_account(id, role, balance);
        id
    }

    pub fn config(&self) -> &LedgerConfig {
        &self.config
    }

    pub fn state(&self) -> &State {
        &self.state
    }

    pub fn contracts(&self) -> ContractAccounts {
        self.state.contracts
    }

    pub fn genesis(&self) -> Genesis {
        Genesis { config: self.config.clone(), accounts: self.genesis.clone() }
    }

    pub fn balance(&self, id: &AccountId) -> Option<Amount> {
        self.state.balance(id)
    }

    pub fn now(&self) -> Seconds {
        self.clock
    }

    /// Advances the ledger clock. Time never runs backwards.
    pub fn set_time(&mut self, now: Seconds) {
        assert!(now >= self.clock, "ledger clock cannot run backwards");
        self.clock = now;
    }

    /// Executes `call` as `caller`, attaching `value`, and appends the
    /// result to the pending log. Returns the logged transaction.
    pub fn submit(&mut self, caller: AccountId, call: Call, value: Amount) -> Result<&Transaction> {
        if !self.state.accounts.contains_key(&caller) {
            return Err(Error::UnknownAccount(caller.to_string()));
        }
        let ctx = Ctx { caller, value, now: self.clock };
        let to = match &call {
            Call::RegisterDrone { .. } => Some(self.state.contracts.authority),
            Call::Transfer { to } => Some(*to),
            Call::Unknown { .. } => None,
            _ => Some(self.state.contracts.uss_treasury),
        };
        self.state.writes = 0;
        let outcome = match self.execute(&ctx, &call) {
            Ok((output, events)) => TxOutcome::Success { output, events },
            Err(revert) => {
                debug_assert_eq!(self.state.writes, 0, "revert after effects in {}", call.name());
                TxOutcome::Revert { reason: revert.0 }
            }
        };
        let tx = Transaction {
            tx_id: self.next_tx_id,
            caller,
            to,
            call,
            value,
            timestamp: self.clock,
            signature: None,
            writes: if outcome.is_success() { self.state.writes } else { 0 },
            result: outcome,
        };
        self.next_tx_id += 1;
        self.pending.push(tx);
        Ok(self.pending.last().unwrap())
    }

    fn execute(&mut self, ctx: &Ctx, call: &Call) -> Result<(Output, Vec<Event>), Revert> {
        if ctx.value > Amount::ZERO {
            if !call.is_payable() {
                return Err(Revert::new(reasons::NOT_PAYABLE));
            }
            self.state.can_pay(&ctx.caller, ctx.value)?;
        }
        let state = &mut self.state;
        match call {
            Call::RegisterDrone { serial, owner_national_id, sign_tac } => {
                authority::register_drone(state, ctx, serial, owner_national_id, *sign_tac)
            }
            Call::SubscribeToUss { drone_id } => uss::subscribe(state, ctx, *drone_id),
            Call::RequestMissionQuote { drone_id } => {
                uss::quote(state, &ctx.caller, ctx.now, *drone_id).map(|q| (Output::Quote(q), Vec::new()))
            }
            Call::RequestMissionPlan { drone_id, source, destination, departure_date, departure_time } => {
                uss::request_plan(
                    state,
                    ctx,
                    PlanRequest {
                        drone_id: *drone_id,
                        source,
                        destination,
                        date: departure_date,
                        time: departure_time,
                    },
                )
            }
            Call::ReportDrone { drone_id, rid, sighting_location, sighting_time } => uss::report_drone(
                state,
                ctx,
                Report { drone_id: *drone_id, rid, sighting_location, sighting_time: *sighting_time },
            ),
            Call::ReportMissionCompletion { drone_id, rid_vc } => uss::report_completion(state, ctx, *drone_id, rid_vc),
            Call::Transfer { to } => {
                state.transfer(&ctx.caller, to, ctx.value)?;
                Ok((Output::Unit, Vec::new()))
            }
            Call::Unknown { .. } => Err(Revert::new(reasons::UNKNOWN_OPERATION)),
        }
    }

    /// Moves `amount` from `from` to `to` as a logged transfer transaction.
    pub fn transfer(&mut self, from: AccountId, to: AccountId, amount: Amount) -> Result<TxOutcome> {
        Ok(self.submit(from, Call::Transfer { to }, amount)?.result.clone())
    }

    /// Fee quote without logging a transaction.
    pub fn quote(&self, caller: &AccountId, drone_id: u64) -> Result<Quote, Revert> {
        uss::quote(&self.state, caller, self.clock, drone_id)
    }

    pub fn get_drone(&self, requester: &AccountId, drone_id: u64) -> Result<&DroneRecord, Revert> {
        authority::get_drone(&self.state, requester, drone_id)
    }

    pub fn pending(&self) -> &[Transaction] {
        &self.pending
    }

    /// Batches pending transactions into a new block. Returns `None` when
    /// nothing is pending and empty blocks are disabled.
    pub fn seal_block(&mut self) -> Option<&Block> {
        if self.pending.is_empty() && !self.config.allow_empty_blocks {
            return None;
        }
        let head = self.head();
        let txs = std::mem::take(&mut self.pending);
        self.blocks.push(Block::seal(head.index, head.prev_hash, txs));
        self.blocks.last()
    }

    /// Index and predecessor hash the next block will carry.
    pub fn head(&self) -> ChainAnchor {
        match self.blocks.last() {
            Some(b) => ChainAnchor { index: b.index + 1, prev_hash: b.hash },
            None => self.anchor,
        }
    }

    /// Hash of the latest sealed block (zero if none).
    pub fn head_hash(&self) -> Digest32 {
        self.head().prev_hash
    }

    pub fn anchor(&self) -> ChainAnchor {
        self.anchor
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    #[doc(hidden)]
    pub fn blocks_mut(&mut self) -> &mut Vec<Block> {
        &mut self.blocks
    }

    pub fn verify_chain(&self) -> bool {
        verify_blocks(self.anchor, &self.blocks).is_ok()
    }

    pub fn verify_chain_detailed(&self) -> Result<()> {
        verify_blocks(self.anchor, &self.blocks)
    }

    pub fn next_tx_id(&self) -> u64 {
        self.next_tx_id
    }

    /// Re-executes a block log from genesis, checking every recorded result
    /// and digest along the way.
    pub fn replay(genesis: &Genesis, blocks: &[Block]) -> Result<Ledger> {
        verify_blocks(ChainAnchor::GENESIS, blocks)?;
        let mut ledger = Ledger::from_genesis(genesis)?;
        for block in blocks {
            for tx in &block.transactions {
                ledger.set_time(tx.timestamp);
                let got = ledger.submit(tx.caller, tx.call.clone(), tx.value)?;
                if got != tx {
                    return Err(Error::ChainBroken {
                        index: block.index,
                        reason: format!("transaction {} replays to a different result", tx.tx_id),
                    });
                }
            }
            let sealed = ledger.seal_block();
            if sealed.map(|b| b.hash) != Some(block.hash) {
                return Err(Error::ChainBroken { index: block.index, reason: "replayed block hash differs".into() });
            }
        }
        Ok(ledger)
    }

    pub(crate) fn parts(&self) -> LedgerParts {
        LedgerParts {
            config: self.config.clone(),
            state: self.state.clone(),
            genesis: self.genesis.clone(),
            clock: self.clock,
            next_tx_id: self.next_tx_id,
            pending: self.pending.clone(),
            head: self.head(),
        }
    }

    pub(crate) fn from_parts(p: LedgerParts) -> Ledger {
        Ledger {
            config: p.config,
            state: p.state,
            genesis: p.genesis,
            clock: p.clock,
            next_tx_id: p.next_tx_id,
            pending: p.pending,
            anchor: p.head,
            blocks: Vec::new(),
        }
    }
}

/// Ledger contents minus sealed blocks; the chain resumes at `head`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub(crate) struct LedgerParts {
    pub config: LedgerConfig,
    pub state: State,
    pub genesis: Vec<Account>,
    pub clock: Seconds,
    pub next_tx_id: u64,
    pub pending: Vec<Transaction>,
    pub head: ChainAnchor,
}
