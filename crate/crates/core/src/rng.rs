//! Counter-addressed random streams.
//!
//! Every draw the simulator makes is addressed by `(seed, trial, master, node)`.
//! The trial index selects a ChaCha stream and the link position selects a
//! fixed word offset inside it, so a trial's samples do not depend on which
//! thread runs it or on which other links carry load.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Words reserved per link inside a trial stream (two `f64` draws).
const WORDS_PER_LINK: u128 = 4;

/// Random source for one Monte Carlo trial.
#[derive(Debug, Clone)]
pub struct TrialRng {
    inner: ChaCha8Rng,
    links_per_master: usize,
}

impl TrialRng {
    pub fn new(seed: u64, trial: u64, links_per_master: usize) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(trial);
        Self {
            inner,
            links_per_master,
        }
    }

    /// Positions the stream at the block reserved for link `(master, node)`
    /// and returns a handle drawing from it.
    pub fn link(&mut self, master: usize, node: usize) -> LinkStream<'_> {
        debug_assert!(node < self.links_per_master);
        let index = (master * self.links_per_master + node) as u128;
        self.inner.set_word_pos(index * WORDS_PER_LINK);
        LinkStream {
            rng: &mut self.inner,
        }
    }
}

/// Uniform source positioned on one link's block.
pub struct LinkStream<'a> {
    rng: &'a mut ChaCha8Rng,
}

impl UniformSource for LinkStream<'_> {
    fn uniform(&mut self) -> f64 {
        self.rng.gen::<f64>()
    }
}

/// Anything that yields uniform draws on `[0, 1)`.
pub trait UniformSource {
    fn uniform(&mut self) -> f64;
}

impl UniformSource for ChaCha8Rng {
    fn uniform(&mut self) -> f64 {
        self.gen::<f64>()
    }
}

/// Exponential draw with the given rate by inverse transform.
pub fn exponential<S: UniformSource + ?Sized>(src: &mut S, rate: f64) -> f64 {
    -(-src.uniform()).ln_1p() / rate
}
