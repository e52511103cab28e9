#![allow(dead_code)]

use indoor_pdr::{Point, RouteMap, WalkScenario};

/// 45 m × 17.5 m corridor loop, 125 m around, walked counterclockwise.
pub fn corridor_loop() -> RouteMap {
    RouteMap::rectangle(Point::default(), 45.0, 17.5).unwrap()
}

/// 40 m × 22.5 m loop, also 125 m around.
pub fn rectangle_125() -> RouteMap {
    RouteMap::rectangle(Point::default(), 40.0, 22.5).unwrap()
}

/// The biased walk used for the end-to-end checks: +18° initial heading error,
/// −0.1°/s gyro bias, light sensor noise.
pub fn drifting_walk(seed: u64) -> WalkScenario {
    let mut sc = WalkScenario::new(corridor_loop());
    sc.initial_heading_bias = 18f64.to_radians();
    sc.gyro_bias = (-0.1f64).to_radians();
    sc.gyro_noise_std = 0.01;
    sc.accel_noise_std = 0.3;
    sc.seed = seed;
    sc
}

pub fn assert_close(a: f64, b: f64, tol: f64, what: &str) {
    assert!((a - b).abs() <= tol, "{what}: {a} vs {b} (tol {tol})");
}
