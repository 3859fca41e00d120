//! Seed discipline.
//!
//! Every randomized stage derives its generator from the task seed plus a
//! globally unique ChaCha stream id, so stages never share a random stream
//! even when they receive the same seed, and every stage replays exactly
//! given (seed, inputs). ChaCha is used throughout because its output is
//! specified independently of platform and word size.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream ids, one per randomized stage. Keep these unique.
pub(crate) mod streams {
    pub const WILSON: u64 = 1;
    pub const EDGE_PICK: u64 = 2;
    pub const NON_EDGE_TRAIN: u64 = 3;
    pub const NON_EDGE_TEST: u64 = 4;
    pub const NON_EDGE_ENUM_TRAIN: u64 = 5;
    pub const NON_EDGE_ENUM_TEST: u64 = 6;
    pub const GF: u64 = 10;
    pub const WALKS: u64 = 11;
    pub const SGNS: u64 = 12;
    pub const LINE: u64 = 13;
    pub const LE: u64 = 14;
    pub const LINE_SECOND: u64 = 15;
    pub const CV_FOLDS: u64 = 20;
}

/// Salt applied to the task seed for inner (validation) splits so they do
/// not replay the outer split's choices on the smaller graph.
pub(crate) const VALIDATION_SALT: u64 = 0x76616c_69646174;

/// Generator for one stage: task seed selects the key, stage the stream.
pub(crate) fn stage_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
