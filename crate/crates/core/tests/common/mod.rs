#![allow(dead_code)]

use nomf_core::BinaryFrame;
use proptest::prelude::*;
use rand::Rng;

/// Bernoulli(`p`) pixels.
pub fn random_frame<R: Rng>(rng: &mut R, w: usize, h: usize, p: f64) -> BinaryFrame {
    BinaryFrame::from_fn(w, h, |_, _| rng.random_bool(p))
}

/// Frames up to `max_w`×`max_h` with a random density per frame.
pub fn arb_frame(max_w: usize, max_h: usize) -> impl Strategy<Value = BinaryFrame> {
    (1..=max_w, 1..=max_h, 0.0..=1.0f64, any::<u64>()).prop_map(|(w, h, p, seed)| {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        random_frame(&mut rng, w, h, p)
    })
}
