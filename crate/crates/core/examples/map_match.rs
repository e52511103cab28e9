//! Snap a drifting loop walk onto the known corridor corners, with and
//! without per-segment scaling.

use std::fs::File;

use indoor_pdr::matching::match_trajectory;
use indoor_pdr::route::load_route;
use indoor_pdr::{evaluate, run_pdr, simulate, MatchParams, PdrConfig, WalkScenario};

const DATA: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data");

fn main() -> indoor_pdr::Result<()> {
    let route = load_route(File::open(format!("{DATA}/loop_125m.json"))?)?;
    let scenario: WalkScenario = serde_json::from_reader(File::open(format!("{DATA}/biased_walk.json"))?)?;
    let sim = simulate(&scenario)?;
    let traj = run_pdr(&sim.stream, &PdrConfig { origin: sim.initial_pose_estimate, ..Default::default() })?;

    let pdr = evaluate(&traj.all_points(), &route)?;
    println!("PDR only: mean {:.2} m, max {:.2} m", pdr.mean, pdr.max);

    for scale in [false, true] {
        let params = MatchParams { scale, ..Default::default() };
        let m = match_trajectory(&traj, &route, &params)?;
        let stats = evaluate(&m.all_points(), &route)?;
        println!("\nscale {}:", if scale { "on" } else { "off" });
        for (turn, &(step, corner)) in m.turns.iter().zip(&m.assignment.pairs) {
            let c = route.corners()[corner];
            println!(
                "  turn at step {step:3} ({:+.0}°) -> corner {corner} ({}, {})",
                turn.delta_phi.to_degrees(),
                c.x,
                c.y
            );
        }
        for s in &m.segments {
            println!(
                "  steps {:3}..={:3}  θ = {:+6.2}°  scale {:.3}",
                s.first_step,
                s.last_step,
                s.theta.to_degrees(),
                s.scale
            );
        }
        println!("  mean {:.2} m, max {:.2} m", stats.mean, stats.max);
    }
    Ok(())
}
