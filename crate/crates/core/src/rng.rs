//! A ChaCha20 stream that can be checkpointed as `(seed, word position)`.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest as _, Sha256};

use crate::digest::decode_hex_exact;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeededRng(ChaCha20Rng);

impl SeededRng {
    /// Derives an independent stream from a scenario seed and a label.
    pub fn derive(seed: u64, label: &str) -> SeededRng {
        let mut h = Sha256::new();
        h.update(b"utm/rng/");
        h.update(label.as_bytes());
        h.update(seed.to_le_bytes());
        SeededRng(ChaCha20Rng::from_seed(h.finalize().into()))
    }

    pub fn fill(&mut self, out: &mut [u8]) {
        self.0.fill_bytes(out);
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform in [0, 1).
    pub fn next_f64(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Uniform in [0, n).
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0);
        // rejection keeps the draw unbiased
        let zone = u64::MAX - (u64::MAX % n);
        loop {
            let v = self.0.next_u64();
            if v < zone {
                return v % n;
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct RngCheckpoint {
    seed: String,
    word_pos: String,
}

impl Serialize for SeededRng {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        RngCheckpoint { seed: hex::encode(self.0.get_seed()), word_pos: self.0.get_word_pos().to_string() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for SeededRng {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let c = RngCheckpoint::deserialize(d)?;
        let seed = decode_hex_exact::<32>(&c.seed).map_err(serde::de::Error::custom)?;
        let pos: u128 = c.word_pos.parse().map_err(serde::de::Error::custom)?;
        let mut rng = ChaCha20Rng::from_seed(seed);
        rng.set_word_pos(pos);
        Ok(SeededRng(rng))
    }
}
