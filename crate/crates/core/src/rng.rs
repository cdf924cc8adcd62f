//! Per-trial random streams.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator for trial `index` under `seed`. Each trial gets its own ChaCha
/// stream, so results do not depend on evaluation order.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}
