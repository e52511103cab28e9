//! Pedestrian dead reckoning: peak-based step detection, gyro heading
//! integration, step length, and step-and-heading position propagation.

mod heading;
mod step_length;
mod steps;

use serde::{Deserialize, Serialize};

pub use heading::{estimate_heading, integrate_rate, Axis, HeadingSampling, HeadingTrack, YawIntegrator};
pub use step_length::{step_length, weinberg, StepLengthModel};
pub use steps::{detect_steps, StepDetectionParams, StepEvent};

use crate::error::{Error, Result};
use crate::imu::{accel_magnitude, default_smoothing_window, detrend, smooth, SampleStream};
use crate::trajectory::{Pose, TrackPoint, Trajectory};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default)]
pub struct PdrConfig {
    /// Known initial pose.
    pub origin: Pose,
    pub detection: StepDetectionParams,
    pub step_model: StepLengthModel,
    /// Gyro axis integrated for heading; also the vertical axis for Weinberg.
    pub yaw_axis: Axis,
    pub heading_sampling: HeadingSampling,
}

/// One step of length `l` along heading `phi` from `prev`.
pub fn propagate(prev: &TrackPoint, l: f64, phi: f64) -> TrackPoint {
    TrackPoint {
        k: prev.k + 1,
        x: prev.x + l * phi.cos(),
        y: prev.y + l * phi.sin(),
        phi,
    }
}

/// Signal fed to the peak detector: acceleration magnitude, optionally
/// detrended, then smoothed.
pub fn step_signal(stream: &SampleStream, params: &StepDetectionParams) -> Result<Vec<f64>> {
    let mut signal = accel_magnitude(stream);
    if let Some(w) = params.detrend_window {
        signal = detrend(&signal, w)?;
    }
    let window = params
        .smoothing_window
        .unwrap_or_else(|| default_smoothing_window(stream.rate_hz()));
    smooth(&signal, window)
}

/// Full dead-reckoning pass over a sample stream.
pub fn run_pdr(stream: &SampleStream, config: &PdrConfig) -> Result<Trajectory> {
    config.step_model.validate()?;
    let signal = step_signal(stream, &config.detection)?;
    let steps = detect_steps(&signal, &stream.times(), &config.detection)?;
    if steps.is_empty() {
        return Err(Error::EmptyTrajectory);
    }
    let headings = estimate_heading(
        stream,
        &steps,
        config.origin.phi,
        config.yaw_axis,
        config.heading_sampling,
    )?;

    let origin = TrackPoint::origin(config.origin);
    let mut points = Vec::with_capacity(steps.len());
    let mut step_lengths = Vec::with_capacity(steps.len());
    let mut prev = origin;
    for (i, (step, &phi)) in steps.iter().zip(&headings.phi).enumerate() {
        let previous = i.checked_sub(1).map(|j| &steps[j]);
        let l = step_length(&config.step_model, step, previous, stream, config.yaw_axis)?;
        prev = propagate(&prev, l, phi);
        points.push(prev);
        step_lengths.push(l);
    }
    Ok(Trajectory {
        origin,
        points,
        step_lengths,
        step_length_model: config.step_model.to_string(),
    })
}
