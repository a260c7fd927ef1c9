//! Independent seeds derived from one master seed.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Stream for sampling users.
pub const USERS: u64 = 0;
/// Stream for the optimizer.
pub const OPTIMIZER: u64 = 1;
/// Stream for randomly placed FAPs.
pub const FAPS: u64 = 2;

/// First word of stream `stream` of the ChaCha generator seeded by `master`.
pub fn derive_seed(master: u64, stream: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(stream);
    rng.next_u64()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_differ_and_repeat() {
        assert_eq!(derive_seed(7, USERS), derive_seed(7, USERS));
        assert_ne!(derive_seed(7, USERS), derive_seed(7, OPTIMIZER));
        assert_ne!(derive_seed(7, USERS), derive_seed(8, USERS));
    }
}
