//! Generate a synthetic IMU log from a scenario file.
//!
//!     cargo run --example simulate_walk [scenario.json] [out_dir]
//!
//! Writes `imu.csv` and `truth.csv` when an output directory is given.

use std::fs::{self, File};
use std::path::PathBuf;

use indoor_pdr::imu::write_imu_log;
use indoor_pdr::trajectory::write_trajectory_csv;
use indoor_pdr::{simulate, WalkScenario};

fn main() -> indoor_pdr::Result<()> {
    let mut args = std::env::args().skip(1);
    let scenario_path = args
        .next()
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/biased_walk.json").into());
    let scenario: WalkScenario = serde_json::from_reader(File::open(&scenario_path)?)?;
    scenario.validate()?;

    let sim = simulate(&scenario)?;
    println!("route length   {:.1} m", scenario.route.length());
    println!("steps          {}", sim.truth.len() - 1);
    println!("samples        {} at {} Hz", sim.stream.len(), scenario.rate_hz);
    println!("duration       {:.1} s", sim.duration());
    println!("turns at steps {:?}", sim.turn_schedule);
    println!(
        "initial heading handed to PDR: {:.1}° (true {:.1}°)",
        sim.initial_pose_estimate.phi.to_degrees(),
        sim.true_origin.phi.to_degrees()
    );

    if let Some(dir) = args.next().map(PathBuf::from) {
        fs::create_dir_all(&dir)?;
        write_imu_log(&sim.stream, File::create(dir.join("imu.csv"))?)?;
        write_trajectory_csv(&sim.truth, File::create(dir.join("truth.csv"))?)?;
        println!("wrote {}", dir.display());
    }
    Ok(())
}
