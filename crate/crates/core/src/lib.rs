//! Indoor pedestrian navigation from smartphone IMU logs.
//!
//! The pipeline dead-reckons a walk from accelerometer peaks and integrated
//! gyro yaw, then corrects it by snapping detected turns onto the known
//! corners of the walked route and rotating the steps in between.
//!
//! - [`imu`]: CSV log ingest and the step-detection signal
//! - [`pdr`]: step detection, heading, step length, position propagation
//! - [`route`]: route corners and polyline geometry
//! - [`matching`]: turn detection, corner association, segment correction
//! - [`metrics`]: position error statistics and CDF export
//! - [`sim`]: synthetic walks with ground truth
//! - [`cli`]: the `indoor-pdr` command-line front end

pub mod cli;
pub mod error;
pub mod imu;
pub mod matching;
pub mod metrics;
pub mod pdr;
pub mod route;
pub mod sim;
pub mod trajectory;

pub use error::{Error, Result};
pub use imu::{ImuSample, LogFormat, SampleStream};
pub use matching::{MatchParams, MatchedTrajectory, TurnParams, TurnPoint};
pub use metrics::{evaluate, reduction_ratio, ErrorStats};
pub use pdr::{run_pdr, PdrConfig, StepLengthModel};
pub use route::{Point, Polyline, RouteMap};
pub use sim::{simulate, SimOutput, WalkScenario};
pub use trajectory::{Pose, TrackPoint, Trajectory};
