//! Deterministic random-stream derivation.
//!
//! Every trial of every sweep point owns a family of independent streams
//! derived purely from `(master_seed, point_index, trial_index, tag,
//! attempt)`. No stream depends on how many values another stream consumed,
//! which keeps results bit-identical across worker counts and lets two
//! scenarios sharing a master seed observe identical channel draws on the
//! links they have in common.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer; the standard avalanche mixer.
fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes a word into a seed, avalanching the result.
pub fn mix(seed: u64, word: u64) -> u64 {
    splitmix(splitmix(seed) ^ word)
}

/// Roles a random stream can play inside one trial.
///
/// Link tags are keyed by role, not by draw order, so a direct link sees the
/// same noise realization whether or not relays exist in the scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamTag {
    /// Payload bit generation.
    Payload,
    /// Source to destination link.
    LinkSd,
    /// Source to relay link (relay index 0 or 1).
    LinkSr(u8),
    /// Relay to destination link (relay index 0 or 1).
    LinkRd(u8),
    /// Reverse channel carrying ACK/NACK frames.
    Ack,
    /// Scripted fault injection.
    Fault,
}

impl StreamTag {
    fn code(self) -> u64 {
        match self {
            StreamTag::Payload => 1,
            StreamTag::LinkSd => 2,
            StreamTag::LinkSr(i) => 3 + u64::from(i),
            StreamTag::LinkRd(i) => 5 + u64::from(i),
            StreamTag::Ack => 7,
            StreamTag::Fault => 8,
        }
    }
}

/// Stream factory for one `(master_seed, point, trial)` triple.
#[derive(Debug, Clone, Copy)]
pub struct TrialStreams {
    base: u64,
}

impl TrialStreams {
    pub fn new(master_seed: u64, point_index: u64, trial_index: u64) -> Self {
        let base = mix(mix(master_seed, point_index), trial_index);
        TrialStreams { base }
    }

    /// Independent stream for `(tag, attempt)`.
    pub fn stream(&self, tag: StreamTag, attempt: u32) -> ChaCha8Rng {
        let word = (tag.code() << 32) | u64::from(attempt);
        ChaCha8Rng::seed_from_u64(mix(self.base, word))
    }
}
