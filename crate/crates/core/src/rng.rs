//! Per-sample random streams.
//!
//! Each sample owns one ChaCha8 key derived from its seed; the independent
//! consumers below read disjoint ChaCha streams of that key, so draws in one
//! never shift the sequence seen by another.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Substream {
    Noise = 1,
    Measurement = 2,
    Fusion = 3,
    Verifier = 4,
}

pub fn substream(seed: u64, which: Substream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(which as u64);
    rng
}

/// The four streams used by one simulation sample.
#[derive(Clone, Debug)]
pub struct SampleRngs {
    pub noise: ChaCha8Rng,
    pub measurement: ChaCha8Rng,
    pub fusion: ChaCha8Rng,
    pub verifier: ChaCha8Rng,
}

impl SampleRngs {
    pub fn new(seed: u64) -> Self {
        Self {
            noise: substream(seed, Substream::Noise),
            measurement: substream(seed, Substream::Measurement),
            fusion: substream(seed, Substream::Fusion),
            verifier: substream(seed, Substream::Verifier),
        }
    }
}
