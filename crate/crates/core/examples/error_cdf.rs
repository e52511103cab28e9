//! Position error CDF of dead reckoning versus map-matched output, written
//! as CSV to stdout.

use std::io::{self, Write};

use indoor_pdr::matching::match_trajectory;
use indoor_pdr::metrics::StatsSummary;
use indoor_pdr::{evaluate, run_pdr, simulate, MatchParams, PdrConfig, Point, RouteMap, WalkScenario};

fn quantile(cdf: &[(f64, f64)], q: f64) -> f64 {
    cdf.iter().find(|&&(_, f)| f >= q).map_or(f64::NAN, |&(e, _)| e)
}

fn main() -> indoor_pdr::Result<()> {
    let route = RouteMap::rectangle(Point::default(), 45.0, 17.5)?;
    let mut scenario = WalkScenario::new(route.clone());
    scenario.initial_heading_bias = 18f64.to_radians();
    scenario.gyro_bias = -0.1f64.to_radians();
    scenario.accel_noise_std = 0.3;
    scenario.gyro_noise_std = 0.01;

    let sim = simulate(&scenario)?;
    let traj = run_pdr(&sim.stream, &PdrConfig { origin: sim.initial_pose_estimate, ..Default::default() })?;
    let matched = match_trajectory(&traj, &route, &MatchParams { scale: true, ..Default::default() })?;

    let pdr = evaluate(&traj.all_points(), &route)?;
    let mm = evaluate(&matched.all_points(), &route)?;
    let summary = StatsSummary::with_baseline(&mm, &pdr)?;
    eprintln!("{}", serde_json::to_string_pretty(&summary)?);
    for q in [0.5, 0.9, 1.0] {
        eprintln!("p{:<3} PDR {:6.2} m   matched {:5.2} m", (q * 100.0) as u32, quantile(&pdr.cdf, q), quantile(&mm.cdf, q));
    }

    let mut out = io::stdout().lock();
    writeln!(out, "method,error_m,cum_fraction")?;
    for (name, stats) in [("pdr", &pdr), ("matched", &mm)] {
        for (e, f) in &stats.cdf {
            writeln!(out, "{name},{e},{f}")?;
        }
    }
    Ok(())
}
