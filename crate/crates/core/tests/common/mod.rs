#![allow(dead_code)]

pub mod reference;
pub mod scenes;

use evfilt_core::{Event, Polarity, SensorGeometry};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Sorted random events with gaps that straddle the refractory and
/// background-activity support times.
pub fn random_events(g: SensorGeometry, n: usize, seed: u64) -> Vec<Event> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ts = 1u64;
    (0..n)
        .map(|_| {
            ts += match rng.random_range(0..4) {
                0 => 0,
                1 => rng.random_range(0..=20),
                2 => rng.random_range(0..=400),
                _ => rng.random_range(0..=4_000),
            };
            let pol = if rng.random::<bool>() {
                Polarity::On
            } else {
                Polarity::Off
            };
            Event::new(
                rng.random_range(0..g.width),
                rng.random_range(0..g.height),
                ts,
                pol,
            )
        })
        .collect()
}
