//! Seeded random streams.
//!
//! Every run draws from a ChaCha8 generator keyed by the user seed; distinct
//! runs of a sweep (grid points, replicate seeds) use distinct stream ids of
//! the same key, so their draws are independent and do not depend on the
//! order in which the runs execute.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

pub fn stream_rng(seed: u64, stream: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
