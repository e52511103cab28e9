use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A detected step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepEvent {
    pub sample_index: usize,
    pub t: f64,
    /// Signal value at the peak, m/s².
    pub peak_value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StepDetectionParams {
    /// Minimum peak height, m/s².
    pub min_peak: f64,
    /// Minimum time between accepted steps, seconds.
    pub refractory_s: f64,
    /// Moving-average window in samples; `None` uses a quarter second.
    pub smoothing_window: Option<usize>,
    /// When set, a running mean of this many samples is subtracted before
    /// detection and `min_peak` is relative to it.
    pub detrend_window: Option<usize>,
}

impl Default for StepDetectionParams {
    fn default() -> Self {
        Self {
            min_peak: 10.8,
            refractory_s: 0.3,
            smoothing_window: None,
            detrend_window: None,
        }
    }
}

/// Peak picking with a refractory period.
///
/// A sample is a peak when it is strictly above its left neighbour, at least
/// its right neighbour, and no lower than `min_peak`. Peaks are accepted in
/// time order, skipping any that fall within `refractory_s` of the last
/// accepted one.
pub fn detect_steps(signal: &[f64], t: &[f64], params: &StepDetectionParams) -> Result<Vec<StepEvent>> {
    if signal.len() != t.len() {
        return Err(Error::Parameter(format!(
            "signal has {} samples but {} timestamps",
            signal.len(),
            t.len()
        )));
    }
    if !(params.refractory_s > 0.0) {
        return Err(Error::Parameter(format!(
            "refractory time must be positive, got {}",
            params.refractory_s
        )));
    }
    let mut steps: Vec<StepEvent> = Vec::new();
    for i in 1..signal.len().saturating_sub(1) {
        let v = signal[i];
        if v < params.min_peak || v <= signal[i - 1] || v < signal[i + 1] {
            continue;
        }
        if let Some(last) = steps.last() {
            if t[i] - last.t < params.refractory_s {
                continue;
            }
        }
        steps.push(StepEvent { sample_index: i, t: t[i], peak_value: v });
    }
    Ok(steps)
}
