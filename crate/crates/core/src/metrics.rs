//! Trajectory scoring against the ground-truth route.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imu::csv_io;
use crate::route::{point_to_path_distance, RouteMap};
use crate::trajectory::TrackPoint;

pub const CDF_HEADER: [&str; 2] = ["error_m", "cum_fraction"];

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorStats {
    /// Distance of each point to the route, meters.
    pub per_point: Vec<f64>,
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
    pub max: f64,
    /// `(error, fraction of points with error ≤ it)` at each distinct error.
    pub cdf: Vec<(f64, f64)>,
    /// First-to-last point distance; only for closed routes.
    pub loop_gap: Option<f64>,
}

/// Score `points` (origin first) by their distance to the route polyline.
pub fn evaluate(points: &[TrackPoint], route: &RouteMap) -> Result<ErrorStats> {
    if points.is_empty() {
        return Err(Error::EmptyInput);
    }
    let path = route.polyline();
    let per_point: Vec<f64> = points
        .iter()
        .map(|p| point_to_path_distance(p.position(), &path))
        .collect();
    let n = per_point.len() as f64;
    let mean = per_point.iter().sum::<f64>() / n;
    let std = (per_point.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / n).sqrt();
    let max = per_point.iter().copied().fold(0.0, f64::max);
    let loop_gap = route.is_closed().then(|| {
        let (first, last) = (points[0], points[points.len() - 1]);
        first.position().distance(last.position())
    });
    Ok(ErrorStats {
        cdf: empirical_cdf(&per_point),
        per_point,
        mean,
        std,
        max,
        loop_gap,
    })
}

fn empirical_cdf(errors: &[f64]) -> Vec<(f64, f64)> {
    let mut sorted = errors.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let mut cdf: Vec<(f64, f64)> = Vec::new();
    for (i, &e) in sorted.iter().enumerate() {
        let fraction = (i + 1) as f64 / n as f64;
        match cdf.last_mut() {
            Some(last) if last.0 == e => last.1 = fraction,
            _ => cdf.push((e, fraction)),
        }
    }
    cdf
}

/// `1 − matched.mean / baseline.mean`.
pub fn reduction_ratio(baseline: &ErrorStats, matched: &ErrorStats) -> Result<f64> {
    reduction_from_means(baseline.mean, matched.mean)
}

pub fn reduction_from_means(baseline_mean: f64, matched_mean: f64) -> Result<f64> {
    if baseline_mean == 0.0 {
        return Err(Error::UndefinedRatio);
    }
    Ok(1.0 - matched_mean / baseline_mean)
}

pub fn export_cdf<W: Write>(stats: &ErrorStats, sink: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(sink);
    writer.write_record(CDF_HEADER).map_err(csv_io)?;
    for (e, f) in &stats.cdf {
        writer
            .write_record([e.to_string(), f.to_string()])
            .map_err(csv_io)?;
    }
    writer.flush()?;
    Ok(())
}

/// The `stats.json` record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsSummary {
    pub mean_m: f64,
    pub std_m: f64,
    pub max_m: f64,
    pub loop_gap_m: Option<f64>,
    /// Reduction ratio against the baseline trajectory, when one was given.
    pub reduction_vs: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub baseline: Option<Box<StatsSummary>>,
}

impl StatsSummary {
    pub fn new(stats: &ErrorStats) -> Self {
        Self {
            mean_m: stats.mean,
            std_m: stats.std,
            max_m: stats.max,
            loop_gap_m: stats.loop_gap,
            reduction_vs: None,
            baseline: None,
        }
    }

    pub fn with_baseline(stats: &ErrorStats, baseline: &ErrorStats) -> Result<Self> {
        Ok(Self {
            reduction_vs: Some(reduction_ratio(baseline, stats)?),
            baseline: Some(Box::new(Self::new(baseline))),
            ..Self::new(stats)
        })
    }
}
