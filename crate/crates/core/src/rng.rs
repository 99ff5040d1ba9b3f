//! Named, reproducible random sub-streams derived from one experiment seed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// Sub-stream purposes. Each gets an independent ChaCha stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Init,
    Engagement,
    Action,
    Shuffle,
    Evaluation,
    Scripted,
}

impl Stream {
    fn tag(self) -> u64 {
        match self {
            Stream::Init => 1,
            Stream::Engagement => 2,
            Stream::Action => 3,
            Stream::Shuffle => 4,
            Stream::Evaluation => 5,
            Stream::Scripted => 6,
        }
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Generator for `stream` at position `path` (e.g. iteration, cycle, episode).
pub fn substream(seed: u64, stream: Stream, path: &[u64]) -> Rng {
    let mut h = splitmix(seed ^ splitmix(stream.tag()));
    for &p in path {
        h = splitmix(h ^ p.wrapping_mul(0xff51_afd7_ed55_8ccd));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(h);
    rng.set_stream(stream.tag());
    rng
}
