use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imu::SampleStream;
use crate::pdr::StepEvent;

/// Device axis selector for a 3-axis channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    #[default]
    Z,
}

impl Axis {
    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }
}

/// How the per-step heading is read off the integrated yaw angle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HeadingSampling {
    /// Integrated angle at the step timestamp.
    #[default]
    AtStep,
    /// Mean integrated angle over the samples since the previous step.
    WindowMean,
}

/// One unwrapped heading per detected step.
#[derive(Debug, Clone, PartialEq)]
pub struct HeadingTrack {
    pub phi0: f64,
    pub phi: Vec<f64>,
}

/// Cumulative trapezoidal integral of one gyro channel from the first sample.
#[derive(Debug, Clone)]
pub struct YawIntegrator<'a> {
    stream: &'a SampleStream,
    axis: usize,
    cumulative: Vec<f64>,
}

impl<'a> YawIntegrator<'a> {
    pub fn new(stream: &'a SampleStream, axis: Axis) -> Self {
        let axis = axis.index();
        let s = stream.samples();
        let mut cumulative = Vec::with_capacity(s.len());
        let mut acc = 0.0;
        cumulative.push(acc);
        for w in s.windows(2) {
            acc += 0.5 * (w[1].t - w[0].t) * (w[0].gyro[axis] + w[1].gyro[axis]);
            cumulative.push(acc);
        }
        Self { stream, axis, cumulative }
    }

    /// Angle accumulated at sample `i`.
    pub fn at_sample(&self, i: usize) -> f64 {
        self.cumulative[i]
    }

    /// Angle accumulated at time `t`, with the rate linearly interpolated
    /// between samples.
    pub fn at_time(&self, t: f64) -> Result<f64> {
        let (start, end) = (self.stream.start_time(), self.stream.end_time());
        if !(t >= start && t <= end) {
            return Err(Error::Range { t, start, end });
        }
        let s = self.stream.samples();
        // last sample with s.t <= t
        let i = s.partition_point(|x| x.t <= t) - 1;
        if s[i].t == t || i + 1 == s.len() {
            return Ok(self.cumulative[i]);
        }
        let (a, b) = (&s[i], &s[i + 1]);
        let dt = t - a.t;
        let rate_t = a.gyro[self.axis] + (b.gyro[self.axis] - a.gyro[self.axis]) * dt / (b.t - a.t);
        Ok(self.cumulative[i] + 0.5 * dt * (a.gyro[self.axis] + rate_t))
    }
}

/// Trapezoidal integral of the selected angular-rate channel over `[t_from, t_to]`.
pub fn integrate_rate(stream: &SampleStream, axis: Axis, t_from: f64, t_to: f64) -> Result<f64> {
    let yaw = YawIntegrator::new(stream, axis);
    Ok(yaw.at_time(t_to)? - yaw.at_time(t_from)?)
}

/// Heading at each step: `phi0` plus the integrated yaw rate since the start of
/// the stream. Positive rate turns counterclockwise.
pub fn estimate_heading(
    stream: &SampleStream,
    steps: &[StepEvent],
    phi0: f64,
    axis: Axis,
    sampling: HeadingSampling,
) -> Result<HeadingTrack> {
    if steps.is_empty() {
        return Err(Error::EmptyTrajectory);
    }
    let yaw = YawIntegrator::new(stream, axis);
    let mut phi = Vec::with_capacity(steps.len());
    let mut window_start = 0;
    for step in steps {
        let heading = match sampling {
            HeadingSampling::AtStep => phi0 + yaw.at_time(step.t)?,
            HeadingSampling::WindowMean => {
                yaw.at_time(step.t)?;
                let end = step.sample_index.min(stream.len() - 1);
                let lo = window_start.min(end);
                let sum: f64 = (lo..=end).map(|i| yaw.at_sample(i)).sum();
                window_start = end + 1;
                phi0 + sum / (end - lo + 1) as f64
            }
        };
        phi.push(heading);
    }
    Ok(HeadingTrack { phi0, phi })
}
