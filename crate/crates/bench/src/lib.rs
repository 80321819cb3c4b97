//! Shared fixtures for the criterion benches.

use evfilt_core::synth::{render_scene, to_stream};
use evfilt_core::{EventStream, SceneScript};

const BLOB_SCENE: &str = include_str!("../../../data/blob_scene.toml");

/// The one-second moving-blob scene with its standard noise mix.
pub fn blob_stream() -> EventStream {
    let script = SceneScript::from_toml(BLOB_SCENE).expect("bundled scene parses");
    let labeled = render_scene(&script).expect("bundled scene renders");
    to_stream(&script, &labeled)
}

/// `blob_stream` repeated back to back until it holds at least `n` events.
pub fn long_stream(n: usize) -> EventStream {
    let base = blob_stream();
    let period = base.duration_us();
    let mut events = Vec::with_capacity(n + base.len());
    let mut offset = 0;
    while events.len() < n {
        events.extend(base.events.iter().map(|e| {
            let mut e = *e;
            e.ts += offset;
            e
        }));
        offset += period;
    }
    let mut stream = EventStream::new(base.geometry, "bench", events);
    stream.duration_us = Some(offset);
    stream
}
