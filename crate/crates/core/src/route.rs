//! Known indoor route geometry: ordered corner points plus the polyline
//! helpers used by matching and scoring.

use std::io::{Read, Write};
use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Minimum separation between consecutive corners, meters.
pub const MIN_CORNER_SEPARATION: f64 = 1e-9;

/// A point in the local level frame, meters.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Point) -> f64 {
        (self - other).norm()
    }

    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// Direction angle of the vector, radians counterclockwise from +x.
    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl From<[f64; 2]> for Point {
    fn from([x, y]: [f64; 2]) -> Self {
        Self { x, y }
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, rhs: Point) -> Point {
        Point::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, rhs: Point) -> Point {
        Point::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}

/// Ordered vertex list with at least two finite vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    vertices: Vec<Point>,
}

impl Polyline {
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::Validation(format!(
                "polyline needs at least 2 vertices, got {}",
                vertices.len()
            )));
        }
        if let Some(i) = vertices.iter().position(|v| !v.is_finite()) {
            return Err(Error::Validation(format!("vertex {i} is not finite")));
        }
        Ok(Self { vertices })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn segments(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        self.vertices.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn length(&self) -> f64 {
        path_length(self)
    }

    /// Point at arc length `s` from the first vertex, clamped to the ends.
    pub fn point_at(&self, s: f64) -> Point {
        let mut remaining = s.max(0.0);
        for (a, b) in self.segments() {
            let len = a.distance(b);
            if remaining <= len {
                return a + (b - a) * (remaining / len);
            }
            remaining -= len;
        }
        *self.vertices.last().unwrap()
    }
}

/// Sum of consecutive-vertex distances.
pub fn path_length(p: &Polyline) -> f64 {
    p.segments().map(|(a, b)| a.distance(b)).sum()
}

/// Distance from `q` to the closed segment `a`–`b`.
pub fn point_to_segment_distance(q: Point, a: Point, b: Point) -> f64 {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return q.distance(a);
    }
    let aq = q - a;
    let along = aq.dot(ab);
    if along <= 0.0 {
        return aq.norm();
    }
    if along >= len2 {
        return q.distance(b);
    }
    // perpendicular drop; exactly zero for points on the segment's line
    (ab.x * aq.y - ab.y * aq.x).abs() / len2.sqrt()
}

/// Minimum distance from `q` to any point of the polyline.
pub fn point_to_path_distance(q: Point, p: &Polyline) -> f64 {
    p.segments()
        .map(|(a, b)| point_to_segment_distance(q, a, b))
        .fold(f64::INFINITY, f64::min)
}

/// The walked route: corners in walk order, start point first.
///
/// On a closed route the walk returns to the start, which then also acts as
/// the finish anchor; the start is not repeated in `corners`.
#[derive(Debug, Clone, PartialEq)]
pub struct RouteMap {
    corners: Vec<Point>,
    closed: bool,
}

#[derive(Serialize, Deserialize)]
struct RouteFile {
    corners: Vec<Point>,
    #[serde(default)]
    closed: bool,
}

impl RouteMap {
    pub fn new(mut corners: Vec<Point>, closed: bool) -> Result<Self> {
        // a closed route may list its start again at the end
        if closed && corners.len() > 2 && corners.first() == corners.last() {
            corners.pop();
        }
        if corners.len() < 2 {
            return Err(Error::Validation(format!(
                "route needs at least 2 corners, got {}",
                corners.len()
            )));
        }
        if let Some(i) = corners.iter().position(|c| !c.is_finite()) {
            return Err(Error::Validation(format!("corner {i} is not finite")));
        }
        for (i, w) in corners.windows(2).enumerate() {
            if w[0].distance(w[1]) <= MIN_CORNER_SEPARATION {
                return Err(Error::Validation(format!(
                    "corners {i} and {} coincide",
                    i + 1
                )));
            }
        }
        Ok(Self { corners, closed })
    }

    /// Axis-aligned rectangle walked counterclockwise from `origin`.
    pub fn rectangle(origin: Point, width: f64, height: f64) -> Result<Self> {
        let Point { x, y } = origin;
        Self::new(
            vec![
                origin,
                Point::new(x + width, y),
                Point::new(x + width, y + height),
                Point::new(x, y + height),
            ],
            true,
        )
    }

    pub fn corners(&self) -> &[Point] {
        &self.corners
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn start(&self) -> Point {
        self.corners[0]
    }

    pub fn finish(&self) -> Point {
        if self.closed {
            self.corners[0]
        } else {
            *self.corners.last().unwrap()
        }
    }

    /// Corners strictly between the start and finish anchors.
    pub fn interior_corners(&self) -> &[Point] {
        if self.closed {
            &self.corners[1..]
        } else {
            &self.corners[1..self.corners.len() - 1]
        }
    }

    /// Traversal polyline; closed routes return to the start.
    pub fn polyline(&self) -> Polyline {
        let mut vertices = self.corners.clone();
        if self.closed {
            vertices.push(self.corners[0]);
        }
        Polyline { vertices }
    }

    pub fn length(&self) -> f64 {
        self.polyline().length()
    }
}

/// Read a route file `{ "corners": [[x, y], ...], "closed": bool }`.
pub fn load_route<R: Read>(source: R) -> Result<RouteMap> {
    let file: RouteFile = serde_json::from_reader(source)?;
    RouteMap::new(file.corners, file.closed)
}

pub fn save_route<W: Write>(route: &RouteMap, mut sink: W) -> Result<()> {
    let file = RouteFile {
        corners: route.corners.clone(),
        closed: route.closed,
    };
    serde_json::to_writer_pretty(&mut sink, &file)?;
    writeln!(sink)?;
    Ok(())
}

impl Serialize for RouteMap {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RouteFile {
            corners: self.corners.clone(),
            closed: self.closed,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for RouteMap {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let file = RouteFile::deserialize(d)?;
        RouteMap::new(file.corners, file.closed).map_err(serde::de::Error::custom)
    }
}
