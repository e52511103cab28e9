//! Dead-reckon a straight corridor walk with a biased gyro and watch the
//! heading and cross-track error grow.

use indoor_pdr::{run_pdr, simulate, PdrConfig, Point, RouteMap, WalkScenario};

fn main() -> indoor_pdr::Result<()> {
    let route = RouteMap::new(vec![Point::new(0.0, 0.0), Point::new(126.0, 0.0)], false)?;
    let mut scenario = WalkScenario::new(route);
    scenario.gyro_bias = 0.5f64.to_radians();

    let sim = simulate(&scenario)?;
    let config = PdrConfig { origin: sim.initial_pose_estimate, ..Default::default() };
    let traj = run_pdr(&sim.stream, &config)?;

    println!("{:>5} {:>8} {:>12} {:>10}", "step", "t (s)", "heading err", "y (m)");
    for (p, &i) in traj.points.iter().zip(&sim.step_samples) {
        if p.k % 20 == 0 || p.k == traj.len() {
            let t = sim.stream.samples()[i].t;
            let err = (p.phi - sim.truth[p.k].phi).to_degrees();
            println!("{:>5} {:>8.1} {:>11.2}° {:>10.2}", p.k, t, err, p.y);
        }
    }
    Ok(())
}
