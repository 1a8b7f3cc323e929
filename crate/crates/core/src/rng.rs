//! Deterministic random streams.
//!
//! Every trial owns a handful of independent ChaCha streams derived from the
//! experiment seed, the trial index and a purpose tag. Streams never depend on
//! execution order, so trials can run in any order or in parallel and still
//! reproduce bit-for-bit.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// What a stream is used for. Demand draws get their own stream so that every
/// policy sees the same demand sequence for a given trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamPurpose {
    Demand = 0,
    Policy = 1,
    Environment = 2,
    Auxiliary = 3,
}

/// Random stream type used throughout the crate.
pub type SimRng = ChaCha8Rng;

/// Stream for `(seed, trial, purpose)`.
pub fn trial_stream(seed: u64, trial: u64, purpose: StreamPurpose) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial.wrapping_mul(4).wrapping_add(purpose as u64));
    rng
}

/// Draw a uniform in the open interval (0, 1).
pub fn open_unit<R: rand::Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u;
        }
    }
}
