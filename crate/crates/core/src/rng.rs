//! Counter-style stream derivation.
//!
//! Every random draw in the crate comes from a ChaCha8 stream whose key is the
//! tuple (experiment seed, replication, role, sub-stream). Replications can then
//! run in any order, or in parallel, and still reproduce bit for bit.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Purpose of a stream. Distinct roles never share randomness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    /// Experiment-level quantities fixed across replications (signal vector, feature maps).
    Design,
    TrainX,
    TrainNoise,
    Test,
    PureNoise,
    Forest,
}

impl Role {
    fn code(self) -> u64 {
        match self {
            Role::Design => 0,
            Role::TrainX => 1,
            Role::TrainNoise => 2,
            Role::Test => 3,
            Role::PureNoise => 4,
            Role::Forest => 5,
        }
    }
}

pub fn stream(seed: u64, rep: u64, role: Role, sub: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[0..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&rep.to_le_bytes());
    key[16..24].copy_from_slice(&role.code().to_le_bytes());
    key[24..32].copy_from_slice(&sub.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

pub(crate) fn normal<R: rand::Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

pub(crate) fn fill_normal<R: rand::Rng + ?Sized>(rng: &mut R, out: &mut [f64]) {
    for v in out.iter_mut() {
        *v = StandardNormal.sample(rng);
    }
}

pub(crate) fn rademacher<R: rand::Rng + ?Sized>(rng: &mut R) -> f64 {
    if rng.random::<bool>() {
        1.0
    } else {
        -1.0
    }
}
