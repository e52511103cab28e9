//! Per-step poses and the trajectory CSV format (`k,x,y,phi`).

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imu::csv_io;
use crate::route::Point;

pub const TRAJECTORY_HEADER: [&str; 4] = ["k", "x", "y", "phi"];

/// Planar pose: position in meters, heading in radians counterclockwise from +x.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    pub phi: f64,
}

impl Pose {
    pub fn new(x: f64, y: f64, phi: f64) -> Self {
        Self { x, y, phi }
    }
}

/// Pose after step `k`; `k = 0` is the known initial pose.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackPoint {
    pub k: usize,
    pub x: f64,
    pub y: f64,
    pub phi: f64,
}

impl TrackPoint {
    pub fn origin(pose: Pose) -> Self {
        Self { k: 0, x: pose.x, y: pose.y, phi: pose.phi }
    }

    pub fn position(&self) -> Point {
        Point::new(self.x, self.y)
    }

    pub fn with_position(self, p: Point) -> Self {
        Self { x: p.x, y: p.y, ..self }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.phi.is_finite()
    }
}

/// A dead-reckoned walk: the origin pose plus one point per detected step.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub origin: TrackPoint,
    pub points: Vec<TrackPoint>,
    /// Step length used for each point, meters.
    pub step_lengths: Vec<f64>,
    /// Description of the step-length model, e.g. `fixed:0.7`.
    pub step_length_model: String,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Origin followed by every step point.
    pub fn all_points(&self) -> Vec<TrackPoint> {
        std::iter::once(self.origin).chain(self.points.iter().copied()).collect()
    }

    /// Headings indexed by step number, `[phi_0, phi_1, ..., phi_N]`.
    pub fn headings(&self) -> Vec<f64> {
        std::iter::once(self.origin.phi)
            .chain(self.points.iter().map(|p| p.phi))
            .collect()
    }

    /// Rebuild from CSV rows; the first row must be the `k = 0` origin.
    pub fn from_points(points: Vec<TrackPoint>) -> Result<Self> {
        let mut iter = points.into_iter();
        let origin = iter.next().ok_or(Error::EmptyInput)?;
        if origin.k != 0 {
            return Err(Error::Parse {
                line: 2,
                message: format!("first row must be the origin (k = 0), found k = {}", origin.k),
            });
        }
        let points: Vec<TrackPoint> = iter.collect();
        let step_lengths = std::iter::once(&origin)
            .chain(&points)
            .zip(&points)
            .map(|(a, b)| a.position().distance(b.position()))
            .collect();
        Ok(Self { origin, points, step_lengths, step_length_model: "unknown".into() })
    }
}

pub fn write_trajectory_csv<W: Write>(points: &[TrackPoint], sink: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(sink);
    writer.write_record(TRAJECTORY_HEADER).map_err(csv_io)?;
    for p in points {
        writer
            .write_record([p.k.to_string(), p.x.to_string(), p.y.to_string(), p.phi.to_string()])
            .map_err(csv_io)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn read_trajectory_csv<R: Read>(source: R) -> Result<Vec<TrackPoint>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(source);
    let header = reader.headers().map_err(|e| Error::Parse {
        line: 1,
        message: e.to_string(),
    })?;
    if !header.iter().eq(TRAJECTORY_HEADER) {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header `{}`", TRAJECTORY_HEADER.join(",")),
        });
    }
    let mut points = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let bad = |what: &str| Error::Parse { line, message: format!("field `{what}` is invalid") };
        let k = record[0].parse::<usize>().map_err(|_| bad("k"))?;
        let mut v = [0.0; 3];
        for (slot, (i, name)) in v.iter_mut().zip([(1, "x"), (2, "y"), (3, "phi")]) {
            *slot = record[i].parse::<f64>().map_err(|_| bad(name))?;
            if !slot.is_finite() {
                return Err(bad(name));
            }
        }
        points.push(TrackPoint { k, x: v[0], y: v[1], phi: v[2] });
    }
    if points.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(points)
}
