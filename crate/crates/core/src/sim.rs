//! Synthetic walks along a route with matching IMU streams.
//!
//! The walker takes steps of fixed length along the route polyline, so every
//! truth point lies on the route. The yaw rate is piecewise constant: between
//! two step samples it ramps the heading from one step's chord direction to
//! the next, and it is zero on the step samples themselves. Rate changes fall
//! half-way between samples, which makes trapezoidal integration of the
//! noise-free gyro exact at every sample.
//!
//! The accelerometer z channel carries gravity plus a cosine whose phase
//! advances by 2π per step, so each step sample is a strict peak of the
//! magnitude.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imu::{ImuSample, SampleStream};
use crate::route::{Point, RouteMap};
use crate::trajectory::{Pose, TrackPoint};

pub const GRAVITY: f64 = 9.81;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkScenario {
    pub route: RouteMap,
    /// Steps per second.
    #[serde(default = "defaults::cadence_hz")]
    pub cadence_hz: f64,
    /// Meters.
    #[serde(default = "defaults::step_len_m")]
    pub step_len_m: f64,
    /// IMU sampling rate, Hz.
    #[serde(default = "defaults::rate_hz")]
    pub rate_hz: f64,
    /// Gait amplitude on top of gravity, m/s².
    #[serde(default = "defaults::accel_peak")]
    pub accel_peak: f64,
    /// Constant yaw-rate bias, rad/s.
    #[serde(default)]
    pub gyro_bias: f64,
    #[serde(default)]
    pub gyro_noise_std: f64,
    #[serde(default)]
    pub accel_noise_std: f64,
    /// Error of the initial heading handed to dead reckoning, radians.
    #[serde(default)]
    pub initial_heading_bias: f64,
    #[serde(default)]
    pub seed: u64,
}

mod defaults {
    pub fn cadence_hz() -> f64 {
        2.0
    }
    pub fn step_len_m() -> f64 {
        0.7
    }
    pub fn rate_hz() -> f64 {
        100.0
    }
    pub fn accel_peak() -> f64 {
        3.0
    }
}

impl WalkScenario {
    /// Noise-free scenario with default gait on `route`.
    pub fn new(route: RouteMap) -> Self {
        Self {
            route,
            cadence_hz: defaults::cadence_hz(),
            step_len_m: defaults::step_len_m(),
            rate_hz: defaults::rate_hz(),
            accel_peak: defaults::accel_peak(),
            gyro_bias: 0.0,
            gyro_noise_std: 0.0,
            accel_noise_std: 0.0,
            initial_heading_bias: 0.0,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("cadence_hz", self.cadence_hz),
            ("step_len_m", self.step_len_m),
            ("rate_hz", self.rate_hz),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Scenario(format!("`{name}` must be positive, got {v}")));
            }
        }
        let non_negative = [
            ("accel_peak", self.accel_peak),
            ("gyro_noise_std", self.gyro_noise_std),
            ("accel_noise_std", self.accel_noise_std),
        ];
        for (name, v) in non_negative {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Scenario(format!("`{name}` must be non-negative, got {v}")));
            }
        }
        for (name, v) in [("gyro_bias", self.gyro_bias), ("initial_heading_bias", self.initial_heading_bias)] {
            if !v.is_finite() {
                return Err(Error::Scenario(format!("`{name}` must be finite")));
            }
        }
        if self.accel_peak >= GRAVITY {
            return Err(Error::Scenario(format!(
                "`accel_peak` must stay below gravity ({GRAVITY} m/s²)"
            )));
        }
        if self.rate_hz / self.cadence_hz < 3.0 {
            return Err(Error::Scenario(format!(
                "need at least 3 samples per step, got {:.3}",
                self.rate_hz / self.cadence_hz
            )));
        }
        Ok(())
    }

    /// Upper bound on the step count: whole step lengths in the route length.
    /// Cutting corners can leave room for fewer.
    pub fn step_count(&self) -> usize {
        (self.route.length() / self.step_len_m + 1e-9).floor() as usize
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimOutput {
    pub stream: SampleStream,
    /// Ground-truth poses, origin first; `phi` is the chord heading of the step.
    pub truth: Vec<TrackPoint>,
    /// Truth step number nearest each interior corner the walker passes.
    pub turn_schedule: Vec<usize>,
    /// Sample index of each step, `step_samples[k − 1]` for step `k`.
    pub step_samples: Vec<usize>,
    /// Pose at the start of the walk.
    pub true_origin: Pose,
    /// Initial pose handed to dead reckoning (heading carries the bias).
    pub initial_pose_estimate: Pose,
}

impl SimOutput {
    pub fn duration(&self) -> f64 {
        self.stream.end_time() - self.stream.start_time()
    }
}

pub fn simulate(scenario: &WalkScenario) -> Result<SimOutput> {
    scenario.validate()?;
    let path = scenario.route.polyline();
    let n_steps = scenario.step_count();
    if n_steps == 0 {
        return Err(Error::Scenario(format!(
            "route length {} m is shorter than one step ({} m)",
            scenario.route.length(),
            scenario.step_len_m
        )));
    }
    let l = scenario.step_len_m;
    let walk = walk_route(path.vertices(), l, n_steps);
    let positions = walk.positions;
    let n_steps = positions.len() - 1;
    if n_steps == 0 {
        return Err(Error::Scenario("no full step fits along the route".into()));
    }
    // unwrapped chord headings, headings[k] for step k; headings[0] copies step 1
    let mut headings = vec![0.0; n_steps + 1];
    for k in 1..=n_steps {
        let raw = (positions[k] - positions[k - 1]).angle();
        headings[k] = if k == 1 {
            raw
        } else {
            let prev = headings[k - 1];
            prev + wrap_pi(raw - prev)
        };
    }
    headings[0] = headings[1];

    let truth: Vec<TrackPoint> = positions
        .iter()
        .zip(&headings)
        .enumerate()
        .map(|(k, (p, &phi))| TrackPoint { k, x: p.x, y: p.y, phi })
        .collect();
    let turn_schedule = walk.corner_steps;

    let samples_per_step = scenario.rate_hz / scenario.cadence_hz;
    let mut knots = vec![0usize];
    knots.extend((1..=n_steps).map(|k| (k as f64 * samples_per_step).round() as usize));
    let tail = (0.5 * samples_per_step).round().max(1.0) as usize;
    let n_samples = knots[n_steps] + tail + 1;

    let mut rng = ChaCha8Rng::seed_from_u64(scenario.seed);
    let mut noise = move || -> f64 { StandardNormal.sample(&mut rng) };
    let mut samples = Vec::with_capacity(n_samples);
    let mut k = 1;
    for i in 0..n_samples {
        while k <= n_steps && i > knots[k] {
            k += 1;
        }
        let (phase, rate) = if k <= n_steps {
            let (a, b) = (knots[k - 1], knots[k]);
            let phase = 2.0 * std::f64::consts::PI * ((k - 1) as f64 + (i - a) as f64 / (b - a) as f64);
            let rate = if i == a || i == b {
                0.0
            } else {
                (headings[k] - headings[k - 1]) * scenario.rate_hz / (b - a - 1) as f64
            };
            (phase, rate)
        } else {
            let into_tail = (i - knots[n_steps]) as f64 / tail as f64;
            (std::f64::consts::PI * (2.0 * n_steps as f64 + into_tail), 0.0)
        };
        let t = i as f64 / scenario.rate_hz;
        let an = scenario.accel_noise_std;
        let gn = scenario.gyro_noise_std;
        let accel = [
            an * noise(),
            an * noise(),
            GRAVITY + scenario.accel_peak * phase.cos() + an * noise(),
        ];
        let gyro = [gn * noise(), gn * noise(), rate + scenario.gyro_bias + gn * noise()];
        samples.push(ImuSample { t, accel, gyro });
    }

    let true_origin = Pose::new(positions[0].x, positions[0].y, headings[0]);
    Ok(SimOutput {
        stream: SampleStream::new(samples, Some(scenario.rate_hz))?,
        truth,
        turn_schedule,
        step_samples: knots[1..].to_vec(),
        true_origin,
        initial_pose_estimate: Pose {
            phi: true_origin.phi + scenario.initial_heading_bias,
            ..true_origin
        },
    })
}

struct Walk {
    positions: Vec<Point>,
    corner_steps: Vec<usize>,
}

/// Walk the polyline in straight chords of length `l`: each step ends at the
/// first point further along the path that is exactly `l` away, so a step
/// across a corner cuts it. Stops after `max_steps` or when no full step fits.
///
/// `corner_steps` holds, for each interior vertex passed, the step whose end
/// point is nearest that vertex (the earlier one on a tie).
fn walk_route(vertices: &[Point], l: f64, max_steps: usize) -> Walk {
    let mut positions = vec![vertices[0]];
    let mut corner_steps = Vec::new();
    let mut current = vertices[0];
    // index of the vertex that ends the segment `current` lies on
    let mut next = 1;
    while positions.len() <= max_steps {
        let Some(far) = (next..vertices.len()).find(|&j| vertices[j].distance(current) >= l - 1e-9) else {
            break;
        };
        let (a, b) = (vertices[far - 1], vertices[far]);
        let end = if far == next {
            let d = b - a;
            current + d * (l / d.norm())
        } else {
            circle_exit(current, l, a, b)
        };
        let k = positions.len();
        for corner in &vertices[next..far] {
            let nearer_before = corner.distance(current) <= corner.distance(end);
            corner_steps.push(if nearer_before { k - 1 } else { k });
        }
        positions.push(end);
        current = end;
        next = far;
    }
    Walk { positions, corner_steps }
}

/// Point on segment `a`–`b` at distance `r` from `c`, given `|a − c| ≤ r ≤ |b − c|`.
fn circle_exit(c: Point, r: f64, a: Point, b: Point) -> Point {
    let d = b - a;
    let f = a - c;
    let qa = d.dot(d);
    let qb = 2.0 * f.dot(d);
    let qc = f.dot(f) - r * r;
    let disc = (qb * qb - 4.0 * qa * qc).max(0.0);
    let t = ((-qb + disc.sqrt()) / (2.0 * qa)).clamp(0.0, 1.0);
    a + d * t
}

fn wrap_pi(a: f64) -> f64 {
    use std::f64::consts::PI;
    let r = a.rem_euclid(2.0 * PI);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}
