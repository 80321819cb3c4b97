//! Scripted scenes shared by the integration and acceptance suites.

use evfilt_core::synth::{
    ContrastModel, HotPixel, Keyframe, NoiseSpec, ObjectSpec, SceneScript, Shape,
};

fn blob(keyframes: Vec<Keyframe>) -> ObjectSpec {
    ObjectSpec {
        shape: Shape::Disk { radius: 18.0 },
        edge_width: 1.5,
        intensity: 4.0,
        keyframes,
    }
}

fn kf(t_us: u64, x: f64, y: f64) -> Keyframe {
    Keyframe { t_us, x, y }
}

fn base(duration_us: u64, objects: Vec<ObjectSpec>, noise: NoiseSpec) -> SceneScript {
    SceneScript {
        width: 240,
        height: 180,
        duration_us,
        step_us: 250,
        background: 1.0,
        contrast: ContrastModel {
            theta_on: 0.15,
            theta_off: 0.15,
            refractory_us: 100,
        },
        objects,
        noise,
    }
}

/// Background activity at 0.1 Hz/pixel, three 1 kHz hot pixels away from the
/// blob's path and a 500-event start-up burst.
pub fn standard_noise(seed: u64) -> NoiseSpec {
    NoiseSpec {
        ba_rate_hz_per_pixel: 0.1,
        hot_pixels: vec![
            HotPixel {
                x: 10,
                y: 10,
                rate_hz: 1_000.0,
            },
            HotPixel {
                x: 230,
                y: 170,
                rate_hz: 1_000.0,
            },
            HotPixel {
                x: 120,
                y: 5,
                rate_hz: 1_000.0,
            },
        ],
        initial_burst_count: 500,
        initial_burst_us: 2_000,
        shadow: None,
        rng_seed: seed,
    }
}

/// A blob tracing a rectangle at about 400 px/s for one second.
pub fn moving_blob(seed: u64) -> SceneScript {
    base(
        1_000_000,
        vec![blob(vec![
            kf(0, 40.0, 60.0),
            kf(400_000, 200.0, 60.0),
            kf(600_000, 200.0, 130.0),
            kf(1_000_000, 40.0, 130.0),
        ])],
        standard_noise(seed),
    )
}

/// Idle for `idle_us`, then the blob sweeps right for 400 ms.
pub fn idle_then_motion(idle_us: u64, seed: u64) -> SceneScript {
    base(
        idle_us + 400_000,
        vec![blob(vec![
            kf(idle_us, 40.0, 90.0),
            kf(idle_us + 400_000, 200.0, 90.0),
        ])],
        standard_noise(seed),
    )
}

/// Seven 300 ms sweeps back and forth separated by six 150 ms pauses, over
/// sparse background activity.
pub const PAUSE_US: u64 = 150_000;
pub const SWEEP_US: u64 = 300_000;

pub fn six_pauses(seed: u64) -> SceneScript {
    let mut keys = vec![kf(0, 60.0, 90.0)];
    let mut t = 0;
    for i in 0..7 {
        t += SWEEP_US;
        let x = if i % 2 == 0 { 180.0 } else { 60.0 };
        keys.push(kf(t, x, 90.0));
        if i < 6 {
            t += PAUSE_US;
            keys.push(kf(t, x, 90.0));
        }
    }
    base(
        t,
        vec![blob(keys)],
        NoiseSpec {
            ba_rate_hz_per_pixel: 0.01,
            rng_seed: seed,
            ..NoiseSpec::none()
        },
    )
}

/// A blob moving right at constant speed, never near the border.
pub fn interior_sweep(seed: u64) -> SceneScript {
    base(
        600_000,
        vec![blob(vec![kf(0, 60.0, 90.0), kf(600_000, 180.0, 90.0)])],
        NoiseSpec {
            ba_rate_hz_per_pixel: 0.05,
            rng_seed: seed,
            ..NoiseSpec::none()
        },
    )
}
