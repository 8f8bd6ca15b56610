use serde::{Deserialize, Serialize};
use sha2::{Digest as _, Sha256};

use crate::digest::{canonical_json, Digest32};
use crate::error::Error;
use crate::ledger::Transaction;

/// A sealed batch of transactions linked to its predecessor by hash.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Block {
    pub index: u64,
    pub prev_hash: Digest32,
    pub transactions: Vec<Transaction>,
    pub hash: Digest32,
}

impl Block {
    pub fn seal(index: u64, prev_hash: Digest32, transactions: Vec<Transaction>) -> Block {
        let hash = Block::compute_hash(index, &prev_hash, &transactions);
        Block { index, prev_hash, transactions, hash }
    }

    /// SHA-256 over `index (u64 BE) || prev_hash || canonical JSON of the
    /// transaction list`.
    pub fn compute_hash(index: u64, prev_hash: &Digest32, transactions: &[Transaction]) -> Digest32 {
        let mut h = Sha256::new();
        h.update(index.to_be_bytes());
        h.update(prev_hash.as_bytes());
        h.update(canonical_json(&transactions));
        Digest32(h.finalize().into())
    }
}

/// Where a chain segment attaches: the index of its first block and the
/// hash that block must point back to. A chain from genesis starts at
/// `(0, ZERO)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ChainAnchor {
    pub index: u64,
    pub prev_hash: Digest32,
}

impl ChainAnchor {
    pub const GENESIS: ChainAnchor = ChainAnchor { index: 0, prev_hash: Digest32::ZERO };
}

impl Default for ChainAnchor {
    fn default() -> Self {
        ChainAnchor::GENESIS
    }
}

/// Checks every link and digest of `blocks`, reporting the first broken block.
pub fn verify_blocks(anchor: ChainAnchor, blocks: &[Block]) -> Result<(), Error> {
    let mut expected_prev = anchor.prev_hash;
    let mut last_tx: Option<u64> = None;
    for (expected_index, b) in (anchor.index..).zip(blocks) {
        let broken = |reason: &str| Error::ChainBroken { index: b.index, reason: reason.to_owned() };
        if b.index != expected_index {
            return Err(Error::ChainBroken {
                index: expected_index,
                reason: format!("found block {} out of sequence", b.index),
            });
        }
        if b.prev_hash != expected_prev {
            return Err(broken("prevHash does not link to the previous block"));
        }
        if Block::compute_hash(b.index, &b.prev_hash, &b.transactions) != b.hash {
            return Err(broken("hash does not match contents"));
        }
        for tx in &b.transactions {
            if last_tx.is_some_and(|prev| tx.tx_id <= prev) {
                return Err(broken("transaction ids not strictly increasing"));
            }
            last_tx = Some(tx.tx_id);
        }
        expected_prev = b.hash;
    }
    Ok(())
}
