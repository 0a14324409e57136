//! Per-replica random streams.
//!
//! Replica `i` of an experiment with master seed `s` draws from
//! `ChaCha8Rng::seed_from_u64(s)` with its stream id set to `i`. ChaCha's
//! 64-bit stream id selects one of 2^64 disjoint keystreams under the same
//! key, so replicas never overlap, and a replica's draws do not depend on how
//! many other replicas exist or the order in which they run.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

pub fn replica_stream(master_seed: u64, replica: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(replica);
    rng
}
