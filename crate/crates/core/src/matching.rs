//! Corner-based map matching: turn detection on the dead-reckoned headings,
//! ordered turn↔corner association, and the per-segment shift-and-rotate
//! correction.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::route::{Point, RouteMap, MIN_CORNER_SEPARATION};
use crate::trajectory::{TrackPoint, Trajectory};

/// A detected turn. `step` is the trajectory step number (`TrackPoint::k`)
/// of the point nearest the corner: the last point before the heading
/// crossed halfway through the turn. `0` is the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TurnPoint {
    pub step: usize,
    /// Signed heading change over the detection window, radians.
    pub delta_phi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TurnParams {
    /// Minimum heading change across `window` steps, radians.
    pub threshold: f64,
    /// Detection window, steps.
    pub window: usize,
}

impl Default for TurnParams {
    fn default() -> Self {
        Self { threshold: PI / 4.0, window: 3 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct MatchParams {
    pub turns: TurnParams,
    /// Scale each segment radially about its pivot so its end lands on the
    /// target corner. Off means rotation and shift only.
    pub scale: bool,
}

/// Ordered turn → corner pairs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CornerAssignment {
    /// `(turn step, index into RouteMap::corners)`, increasing in both.
    pub pairs: Vec<(usize, usize)>,
    /// The trajectory origin is bound to this route start.
    pub start: Point,
    /// Target for the segment after the last turn.
    pub finish: Point,
    /// Whether the finish anchor is the start point (closed route).
    pub loop_closure: bool,
}

/// Transform applied to one segment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SegmentTransform {
    /// First and last step numbers in the segment, inclusive.
    pub first_step: usize,
    pub last_step: usize,
    /// Translation applied before rotating.
    pub shift: Point,
    pub pivot: Point,
    pub theta: f64,
    pub scale: f64,
    /// Where the segment end was placed.
    pub target: Point,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchedTrajectory {
    pub origin: TrackPoint,
    pub points: Vec<TrackPoint>,
    pub segments: Vec<SegmentTransform>,
    /// Segment index for each entry of `points`.
    pub segment_of: Vec<usize>,
    pub turns: Vec<TurnPoint>,
    pub assignment: CornerAssignment,
    pub scale: bool,
}

impl MatchedTrajectory {
    pub fn all_points(&self) -> Vec<TrackPoint> {
        std::iter::once(self.origin).chain(self.points.iter().copied()).collect()
    }
}

fn wrap_pi(a: f64) -> f64 {
    let r = a.rem_euclid(2.0 * PI);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

/// Turn detection over the heading sequence `[phi_0, ..., phi_N]`.
///
/// Step `k` is flagged when `|phi_k − phi_{k−window}| ≥ threshold`. Flagged
/// steps closer than `window` to each other form one turn, taken at the step
/// with the largest change. The reported step is then moved back to the last
/// point whose heading had not yet covered half of that change.
pub fn detect_turns(traj: &Trajectory, params: &TurnParams) -> Result<Vec<TurnPoint>> {
    detect_turns_in_headings(&traj.headings(), params)
}

pub fn detect_turns_in_headings(headings: &[f64], params: &TurnParams) -> Result<Vec<TurnPoint>> {
    if params.window == 0 || !(params.threshold > 0.0) {
        return Err(Error::Parameter(format!(
            "turn window must be ≥ 1 and threshold > 0 (got {}, {})",
            params.window, params.threshold
        )));
    }
    let w = params.window;
    if headings.len() <= w {
        return Ok(Vec::new());
    }
    let delta = |k: usize| headings[k] - headings[k - w];
    let flagged: Vec<usize> = (w..headings.len())
        .filter(|&k| delta(k).abs() >= params.threshold)
        .collect();

    let mut turns = Vec::new();
    let mut i = 0;
    while i < flagged.len() {
        let mut j = i;
        while j + 1 < flagged.len() && flagged[j + 1] - flagged[j] <= w {
            j += 1;
        }
        let peak = flagged[i..=j]
            .iter()
            .copied()
            .reduce(|best, k| if delta(k).abs() > delta(best).abs() { k } else { best })
            .unwrap();
        let d = delta(peak);
        let before = headings[peak - w];
        let step = (peak - w..=peak)
            .rev()
            .find(|&k| (headings[k] - before).abs() < d.abs() / 2.0)
            .unwrap_or(peak - w);
        turns.push(TurnPoint { step, delta_phi: d });
        i = j + 1;
    }
    Ok(turns)
}

/// The i-th turn goes to the i-th interior corner.
pub fn associate_corners(turns: &[TurnPoint], route: &RouteMap) -> Result<CornerAssignment> {
    let interior = route.interior_corners().len();
    if turns.len() != interior {
        return Err(Error::TurnMismatch { turns: turns.len(), corners: interior });
    }
    Ok(CornerAssignment {
        pairs: turns.iter().enumerate().map(|(i, t)| (t.step, i + 1)).collect(),
        start: route.start(),
        finish: route.finish(),
        loop_closure: route.is_closed(),
    })
}

/// Angle θ ∈ (−π, π] from the line `prev → corner_end` to the line
/// `prev → pdr_end`; [`transform_segment`] with this θ turns the direction of
/// `pdr_end` onto that of `corner_end`.
pub fn segment_theta(prev_anchor: Point, pdr_end: Point, corner_end: Point) -> Result<f64> {
    let to_pdr = pdr_end - prev_anchor;
    let to_corner = corner_end - prev_anchor;
    if to_pdr.norm() <= MIN_CORNER_SEPARATION || to_corner.norm() <= MIN_CORNER_SEPARATION {
        return Err(Error::DegenerateGeometry(format!(
            "segment from ({}, {}) has coincident endpoints",
            prev_anchor.x, prev_anchor.y
        )));
    }
    Ok(wrap_pi(to_pdr.angle() - to_corner.angle()))
}

/// Rotate points clockwise by θ about `pivot`; headings become `phi − θ`.
pub fn transform_segment(points: &[TrackPoint], pivot: Point, theta: f64) -> Vec<TrackPoint> {
    let (s, c) = theta.sin_cos();
    points
        .iter()
        .map(|p| {
            let dx = p.x - pivot.x;
            let dy = p.y - pivot.y;
            TrackPoint {
                k: p.k,
                x: dx * c + dy * s + pivot.x,
                y: dy * c - dx * s + pivot.y,
                phi: p.phi - theta,
            }
        })
        .collect()
}

fn scale_about(points: &mut [TrackPoint], pivot: Point, factor: f64) {
    for p in points {
        let q = pivot + (p.position() - pivot) * factor;
        p.x = q.x;
        p.y = q.y;
    }
}

/// Split the trajectory at the matched turns and move each piece onto the
/// route.
///
/// Each segment is shifted so its first point sits on the previous anchor,
/// rotated about that anchor so its end points at the next corner, and
/// optionally scaled so the end lands on it. The end point is then placed on
/// the corner exactly. The piece after the last turn is aimed at the finish
/// anchor.
pub fn match_trajectory(traj: &Trajectory, route: &RouteMap, params: &MatchParams) -> Result<MatchedTrajectory> {
    if traj.is_empty() {
        return Err(Error::EmptyTrajectory);
    }
    let turns = detect_turns(traj, &params.turns)?;
    let assignment = associate_corners(&turns, route)?;
    let all = traj.all_points();
    let n = traj.len();

    // (end step, target, snap end onto target)
    let mut ends: Vec<(usize, Point, bool)> = assignment
        .pairs
        .iter()
        .map(|&(step, corner)| (step, route.corners()[corner], true))
        .collect();
    let last_turn = ends.last().map_or(0, |e| e.0);
    if last_turn < n {
        ends.push((n, assignment.finish, params.scale));
    }

    let mut out = all.clone();
    let mut segments = Vec::with_capacity(ends.len());
    let mut segment_of = vec![0; n];
    let mut start_step = 0;
    let mut pivot = assignment.start;
    for (id, &(end_step, target, snap)) in ends.iter().enumerate() {
        if end_step <= start_step {
            return Err(Error::DegenerateGeometry(format!(
                "segment {id} has no steps (turns at steps {start_step} and {end_step})"
            )));
        }
        let shift = pivot - all[start_step].position();
        let shifted: Vec<TrackPoint> = all[start_step + 1..=end_step]
            .iter()
            .map(|p| p.with_position(p.position() + shift))
            .collect();
        let pdr_end = shifted.last().unwrap().position();
        let theta = segment_theta(pivot, pdr_end, target)?;
        let mut moved = transform_segment(&shifted, pivot, theta);
        let scale = if params.scale {
            target.distance(pivot) / pdr_end.distance(pivot)
        } else {
            1.0
        };
        if params.scale {
            scale_about(&mut moved, pivot, scale);
        }
        if snap {
            *moved.last_mut().unwrap() = moved.last().unwrap().with_position(target);
        }
        if id == 0 {
            out[0] = TrackPoint { phi: all[0].phi - theta, ..all[0] }.with_position(pivot);
        }
        for (k, p) in (start_step + 1..=end_step).zip(moved) {
            out[k] = p;
            segment_of[k - 1] = id;
        }
        segments.push(SegmentTransform {
            first_step: start_step + 1,
            last_step: end_step,
            shift,
            pivot,
            theta,
            scale,
            target,
        });
        pivot = out[end_step].position();
        start_step = end_step;
    }

    let origin = out[0];
    out.remove(0);
    Ok(MatchedTrajectory {
        origin,
        points: out,
        segments,
        segment_of,
        turns,
        assignment,
        scale: params.scale,
    })
}
