use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imu::SampleStream;
use crate::pdr::{Axis, StepEvent};

/// Step-length model, written as `fixed:<m>` or `weinberg:<K>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum StepLengthModel {
    Fixed { length: f64 },
    /// `K · (a_max − a_min)^(1/4)` over the vertical acceleration between steps.
    Weinberg { gain: f64 },
}

impl Default for StepLengthModel {
    fn default() -> Self {
        StepLengthModel::Fixed { length: 0.7 }
    }
}

impl StepLengthModel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            StepLengthModel::Fixed { length } if !(length > 0.0 && length.is_finite()) => Err(
                Error::Parameter(format!("fixed step length must be positive, got {length}")),
            ),
            StepLengthModel::Weinberg { gain } if !(gain > 0.0 && gain.is_finite()) => Err(
                Error::Parameter(format!("Weinberg gain must be positive, got {gain}")),
            ),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for StepLengthModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StepLengthModel::Fixed { length } => write!(f, "fixed:{length}"),
            StepLengthModel::Weinberg { gain } => write!(f, "weinberg:{gain}"),
        }
    }
}

impl FromStr for StepLengthModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (id, value) = s
            .split_once(':')
            .ok_or_else(|| Error::Config(format!("step model `{s}` is not `<id>:<value>`")))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("step model parameter `{value}` is not a number")))?;
        let model = match id.trim() {
            "fixed" => StepLengthModel::Fixed { length: value },
            "weinberg" => StepLengthModel::Weinberg { gain: value },
            other => return Err(Error::Config(format!("unknown step model `{other}`"))),
        };
        model.validate()?;
        Ok(model)
    }
}

impl TryFrom<String> for StepLengthModel {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<StepLengthModel> for String {
    fn from(m: StepLengthModel) -> String {
        m.to_string()
    }
}

/// Length of `step`. The Weinberg window runs from the previous step's sample
/// (or the stream start) to this step's sample, on the `vertical` accel axis.
pub fn step_length(
    model: &StepLengthModel,
    step: &StepEvent,
    previous: Option<&StepEvent>,
    stream: &SampleStream,
    vertical: Axis,
) -> Result<f64> {
    model.validate()?;
    match *model {
        StepLengthModel::Fixed { length } => Ok(length),
        StepLengthModel::Weinberg { gain } => {
            let end = step.sample_index;
            if end >= stream.len() {
                return Err(Error::Range {
                    t: step.t,
                    start: stream.start_time(),
                    end: stream.end_time(),
                });
            }
            let start = previous.map_or(0, |p| p.sample_index).min(end);
            let axis = vertical.index();
            let (lo, hi) = stream.samples()[start..=end]
                .iter()
                .map(|s| s.accel[axis])
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), a| (lo.min(a), hi.max(a)));
            Ok(weinberg(gain, hi, lo))
        }
    }
}

pub fn weinberg(gain: f64, a_max: f64, a_min: f64) -> f64 {
    gain * (a_max - a_min).max(0.0).powf(0.25)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imu::ImuSample;

    #[test]
    fn parse_and_display() {
        let m: StepLengthModel = "fixed:0.7".parse().unwrap();
        assert_eq!(m, StepLengthModel::Fixed { length: 0.7 });
        assert_eq!(m.to_string(), "fixed:0.7");
        let w: StepLengthModel = "weinberg:0.5".parse().unwrap();
        assert_eq!(w, StepLengthModel::Weinberg { gain: 0.5 });
    }

    #[test]
    fn parse_errors() {
        assert!(matches!("stride:0.7".parse::<StepLengthModel>(), Err(Error::Config(_))));
        assert!(matches!("fixed".parse::<StepLengthModel>(), Err(Error::Config(_))));
        assert!(matches!("fixed:-1".parse::<StepLengthModel>(), Err(Error::Parameter(_))));
        assert!(matches!("fixed:0".parse::<StepLengthModel>(), Err(Error::Parameter(_))));
    }

    #[test]
    fn weinberg_formula() {
        // 0.5 · 4^(1/4) = 0.5 · √2
        let l = weinberg(0.5, 12.0, 8.0);
        assert!((l - 0.5 * 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn weinberg_uses_inter_step_window() {
        let samples = (0..10)
            .map(|i| {
                let az = match i {
                    2 => 20.0, // before the window
                    5 => 12.0,
                    7 => 8.0,
                    _ => 10.0,
                };
                ImuSample { t: i as f64 * 0.1, accel: [0.0, 0.0, az], gyro: [0.0; 3] }
            })
            .collect();
        let s = SampleStream::new(samples, None).unwrap();
        let prev = StepEvent { sample_index: 4, t: 0.4, peak_value: 0.0 };
        let step = StepEvent { sample_index: 8, t: 0.8, peak_value: 0.0 };
        let model = StepLengthModel::Weinberg { gain: 0.5 };
        let l = step_length(&model, &step, Some(&prev), &s, Axis::Z).unwrap();
        assert!((l - weinberg(0.5, 12.0, 8.0)).abs() < 1e-15);
        let fixed = StepLengthModel::Fixed { length: 0.7 };
        assert_eq!(step_length(&fixed, &step, Some(&prev), &s, Axis::Z).unwrap(), 0.7);
    }
}
