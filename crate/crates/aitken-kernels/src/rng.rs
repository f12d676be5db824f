//! Seeded, splittable randomness.
//!
//! Everything random in this crate flows from one user-facing seed through
//! ChaCha substreams (a counter-based generator), so checker reports and
//! Gram files are reproducible bit for bit. Substream ids are fixed
//! constants at each call site; two call sites never share one.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Root generator for a seed.
pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent substream `stream` of the generator for `seed`.
pub fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
