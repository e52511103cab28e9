//! End-to-end acceptance checks. Each test prints one `[PASS]` / `[FAIL]`
//! line; run with `--nocapture` to see them.

mod common;

use std::f64::consts::PI;
use std::fs;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde_json::json;
use tempfile::TempDir;

use common::{corridor_loop, drifting_walk};
use indoor_pdr::imu::{accel_magnitude, smooth};
use indoor_pdr::matching::{match_trajectory, transform_segment};
use indoor_pdr::metrics::evaluate;
use indoor_pdr::pdr::{detect_steps, propagate, step_signal, StepDetectionParams};
use indoor_pdr::{
    reduction_ratio, run_pdr, simulate, Error, ImuSample, MatchParams, PdrConfig, Point, RouteMap,
    SampleStream, TrackPoint, WalkScenario,
};

type Check = Result<String, String>;

fn report(n: u32, name: &str, budget: Option<Duration>, f: impl FnOnce() -> Check) {
    let start = Instant::now();
    let mut result = f();
    let took = start.elapsed();
    if let (Ok(msg), Some(b)) = (&result, budget) {
        if took > b {
            result = Err(format!("{msg}; took {took:?}, budget {b:?}"));
        }
    }
    match result {
        Ok(msg) => println!("[PASS] criterion {n} ({name}): {msg} [{took:.2?}]"),
        Err(msg) => {
            println!("[FAIL] criterion {n} ({name}): {msg} [{took:.2?}]");
            panic!("criterion {n} failed: {msg}");
        }
    }
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

#[test]
fn criterion_1_step_update() {
    report(1, "position update", Some(Duration::from_secs(1)), || {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (mut worst, mut worst_len) = (0.0f64, 0.0f64);
        for _ in 0..10_000 {
            let (x, y) = (rng.gen_range(-500.0..500.0), rng.gen_range(-500.0..500.0));
            let l: f64 = rng.gen_range(0.05..2.0);
            let phi: f64 = rng.gen_range(-4.0 * PI..4.0 * PI);
            let prev = TrackPoint { k: 7, x, y, phi: 0.0 };
            let next = propagate(&prev, l, phi);
            // unit direction from the half angle: (c + is)² = c² − s² + 2ics
            let (s, c) = (phi / 2.0).sin_cos();
            let (ux, uy) = (c * c - s * s, 2.0 * c * s);
            let (ox, oy) = (x + l * ux, y + l * uy);
            worst = worst.max((next.x - ox).abs()).max((next.y - oy).abs());
            worst_len = worst_len.max(((next.x - x).hypot(next.y - y) - l).abs());
            ensure(next.k == 8 && next.phi == phi, || format!("bad step index or heading at {x},{y}"))?;
        }
        ensure(worst <= 1e-12, || format!("max deviation {worst:e} m"))?;
        ensure(worst_len <= 1e-9, || format!("max |Δp| − l {worst_len:e} m"))?;
        Ok(format!("10^4 cases, max deviation {worst:.1e} m, max length error {worst_len:.1e} m"))
    });
}

#[test]
fn criterion_2_segment_rotation() {
    report(2, "segment rotation", Some(Duration::from_secs(1)), || {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut worst = 0.0f64;
        let mut worst_roundtrip = 0.0f64;
        for _ in 0..10_000 {
            let q = Point::new(rng.gen_range(-200.0..200.0), rng.gen_range(-200.0..200.0));
            let pivot = Point::new(rng.gen_range(-200.0..200.0), rng.gen_range(-200.0..200.0));
            let theta: f64 = rng.gen_range(-2.0 * PI..2.0 * PI);
            let pt = TrackPoint { k: 3, x: q.x, y: q.y, phi: 0.4 };
            let got = transform_segment(&[pt], pivot, theta)[0];
            // polar form: same radius, angle reduced by θ
            let d = q - pivot;
            let (r, a) = (d.norm(), d.angle() - theta);
            let want = Point::new(pivot.x + r * a.cos(), pivot.y + r * a.sin());
            worst = worst.max(got.position().distance(want));
            let fixed = transform_segment(&[TrackPoint { k: 0, x: pivot.x, y: pivot.y, phi: 0.0 }], pivot, theta)[0];
            ensure(fixed.position() == pivot, || format!("pivot moved for θ = {theta}"))?;
            let id = transform_segment(&[pt], pivot, 0.0)[0];
            ensure(id.position().distance(q) <= 1e-9 && id.phi == pt.phi, || "θ = 0 is not the identity".into())?;
            let back = transform_segment(&[got], pivot, -theta)[0];
            worst_roundtrip = worst_roundtrip.max(back.position().distance(q));
        }
        ensure(worst <= 1e-9, || format!("max deviation from oracle {worst:e} m"))?;
        ensure(worst_roundtrip <= 1e-9, || format!("θ then −θ off by {worst_roundtrip:e} m"))?;
        Ok(format!("10^4 cases, oracle deviation {worst:.1e} m, round trip {worst_roundtrip:.1e} m"))
    });
}

/// 9.81 + 3 sin(2π·2·t) on the z axis, 5 s at 100 Hz, plus optional noise.
fn gait_stream(noise: Option<(u64, f64)>) -> SampleStream {
    let mut rng = noise.map(|(seed, _)| ChaCha8Rng::seed_from_u64(seed));
    let sigma = noise.map_or(0.0, |n| n.1);
    let samples = (0..500)
        .map(|i| {
            let t = i as f64 / 100.0;
            let mut az = 9.81 + 3.0 * (4.0 * PI * t).sin();
            if let Some(rng) = rng.as_mut() {
                let n: f64 = rng.sample(StandardNormal);
                az += sigma * n;
            }
            ImuSample { t, accel: [0.0, 0.0, az], gyro: [0.0; 3] }
        })
        .collect();
    SampleStream::new(samples, None).unwrap()
}

#[test]
fn criterion_3_step_detection() {
    report(3, "step detection", None, || {
        let params = StepDetectionParams::default();
        let clean = gait_stream(None);
        let raw = accel_magnitude(&clean);
        let n_raw = detect_steps(&raw, &clean.times(), &params).map_err(|e| e.to_string())?.len();
        let n_smooth = detect_steps(&step_signal(&clean, &params).unwrap(), &clean.times(), &params)
            .map_err(|e| e.to_string())?
            .len();
        ensure(n_raw == 10 && n_smooth == 10, || format!("noise-free: {n_raw} raw, {n_smooth} smoothed"))?;
        let mut counts = Vec::new();
        for seed in 0..100 {
            let s = gait_stream(Some((seed, 0.3)));
            let sig = step_signal(&s, &params).unwrap();
            counts.push(detect_steps(&sig, &s.times(), &params).unwrap().len());
        }
        let bad: Vec<_> = counts.iter().enumerate().filter(|(_, &c)| c != 10).collect();
        ensure(bad.is_empty(), || format!("σ = 0.3: seeds with wrong count {bad:?}"))?;
        // sanity: smoothing really is on
        let w = indoor_pdr::imu::default_smoothing_window(100.0);
        ensure(smooth(&raw, w).unwrap() == step_signal(&clean, &params).unwrap(), || "default smoothing not applied".into())?;
        Ok("10 steps noise-free; 10 ± 0 over 100 noisy seeds".into())
    });
}

#[test]
fn criterion_4_gyro_drift() {
    report(4, "heading drift", None, || {
        let route = RouteMap::new(vec![Point::new(0.0, 0.0), Point::new(126.0, 0.0)], false).unwrap();
        let mut sc = WalkScenario::new(route);
        sc.gyro_bias = 0.5f64.to_radians();
        let sim = simulate(&sc).map_err(|e| e.to_string())?;
        let config = PdrConfig { origin: sim.initial_pose_estimate, ..PdrConfig::default() };
        let traj = run_pdr(&sim.stream, &config).map_err(|e| e.to_string())?;
        let last = traj.points.last().unwrap();
        let truth = sim.truth.last().unwrap();
        let t_last = sim.step_samples.last().map(|&i| sim.stream.samples()[i].t).unwrap();
        let err = (last.phi - truth.phi).to_degrees();
        ensure(traj.len() == 180, || format!("{} steps, expected 180", traj.len()))?;
        ensure((t_last - 90.0).abs() < 1e-9, || format!("final step at {t_last} s"))?;
        ensure((err - 45.0).abs() <= 0.1, || format!("heading error {err}°"))?;
        Ok(format!("final-step heading error {err:.6}° after {t_last} s"))
    });
}

#[test]
fn criterion_5_end_to_end() {
    report(5, "end-to-end loop", Some(Duration::from_secs(5)), || {
        let sc = drifting_walk(0);
        let route = corridor_loop();
        ensure((route.length() - 125.0).abs() <= 0.01, || format!("route length {}", route.length()))?;
        let sim = simulate(&sc).map_err(|e| e.to_string())?;
        let config = PdrConfig { origin: sim.initial_pose_estimate, ..PdrConfig::default() };
        let traj = run_pdr(&sim.stream, &config).map_err(|e| e.to_string())?;
        let params = MatchParams { scale: true, ..MatchParams::default() };
        let matched = match_trajectory(&traj, &route, &params).map_err(|e| e.to_string())?;
        let pdr = evaluate(&traj.all_points(), &route).map_err(|e| e.to_string())?;
        let mm = evaluate(&matched.all_points(), &route).map_err(|e| e.to_string())?;
        let ratio = reduction_ratio(&pdr, &mm).map_err(|e| e.to_string())?;
        let gap = pdr.loop_gap.unwrap();
        let summary = format!(
            "PDR mean {:.2} m, gap {gap:.2} m; matched mean {:.2} m, max {:.2} m; reduction {:.1}%",
            pdr.mean,
            mm.mean,
            mm.max,
            100.0 * ratio
        );
        ensure((3.0..=8.0).contains(&gap), || format!("loop gap out of 3–8 m: {summary}"))?;
        ensure(pdr.mean > 5.0, || format!("(a) PDR mean ≤ 5 m: {summary}"))?;
        ensure(mm.mean <= 1.5 && mm.max <= 3.0, || format!("(b) matched error too large: {summary}"))?;
        ensure(ratio >= 0.90, || format!("(c) reduction below 90%: {summary}"))?;
        Ok(summary)
    });
}

fn two_pass(errors: &[f64]) -> (f64, f64) {
    let n = errors.len() as f64;
    let mean = errors.iter().sum::<f64>() / n;
    let var = errors.iter().map(|e| (e - mean) * (e - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

#[test]
fn criterion_6_metrics() {
    report(6, "metrics integrity", None, || {
        let route = corridor_loop();
        let mut cases: Vec<Vec<TrackPoint>> = Vec::new();
        for seed in 0..5 {
            let sim = simulate(&drifting_walk(seed)).unwrap();
            let config = PdrConfig { origin: sim.initial_pose_estimate, ..PdrConfig::default() };
            let traj = run_pdr(&sim.stream, &config).unwrap();
            let params = MatchParams { scale: true, ..MatchParams::default() };
            cases.push(match_trajectory(&traj, &route, &params).unwrap().all_points());
            cases.push(traj.all_points());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..20 {
            let n = rng.gen_range(1..200);
            cases.push(
                (0..n)
                    .map(|k| TrackPoint { k, x: rng.gen_range(-30.0..80.0), y: rng.gen_range(-30.0..50.0), phi: 0.0 })
                    .collect(),
            );
        }
        for (i, pts) in cases.iter().enumerate() {
            let s = evaluate(pts, &route).map_err(|e| e.to_string())?;
            ensure(s.cdf.windows(2).all(|w| w[0].1 <= w[1].1), || format!("case {i}: CDF not monotone"))?;
            ensure(s.cdf.last().unwrap().1 == 1.0, || format!("case {i}: CDF ends at {}", s.cdf.last().unwrap().1))?;
            let (mean, std) = two_pass(&s.per_point);
            ensure((s.mean - mean).abs() <= 1e-12 * mean.abs(), || format!("case {i}: mean {} vs {mean}", s.mean))?;
            ensure((s.std - std).abs() <= 1e-12 * std.abs(), || format!("case {i}: std {} vs {std}", s.std))?;
        }
        // a walk along the route, points every 0.5 m
        let path = route.polyline();
        let on_route: Vec<TrackPoint> = (0..=250)
            .map(|k| {
                let p = path.point_at(0.5 * k as f64);
                TrackPoint { k, x: p.x, y: p.y, phi: 0.0 }
            })
            .collect();
        let s = evaluate(&on_route, &route).unwrap();
        ensure(s.mean == 0.0 && s.std == 0.0 && s.max == 0.0 && s.loop_gap == Some(0.0), || {
            format!("on-route stats not zero: {} {} {} {:?}", s.mean, s.std, s.max, s.loop_gap)
        })?;
        ensure(s.cdf == vec![(0.0, 1.0)], || format!("on-route CDF {:?}", s.cdf))?;
        Ok(format!("{} trajectories checked; on-route walk scores zero", cases.len()))
    });
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_indoor-pdr"))
}

#[test]
fn criterion_7_turn_mismatch() {
    report(7, "turn association", None, || {
        // U-shaped walk: two turns
        let u = RouteMap::new(
            vec![Point::new(0.0, 0.0), Point::new(40.0, 0.0), Point::new(40.0, 22.5), Point::new(0.0, 22.5)],
            false,
        )
        .unwrap();
        let rectangle = corridor_loop();
        let sim = simulate(&WalkScenario::new(u.clone())).unwrap();
        ensure(sim.turn_schedule.len() == 2, || format!("walk has {} turns", sim.turn_schedule.len()))?;
        let traj = run_pdr(&sim.stream, &PdrConfig { origin: sim.initial_pose_estimate, ..PdrConfig::default() }).unwrap();
        match match_trajectory(&traj, &rectangle, &MatchParams::default()) {
            Err(Error::TurnMismatch { turns: 2, corners: 3 }) => {}
            other => return Err(format!("expected mismatch (2, 3), got {other:?}")),
        }

        let dir = TempDir::new().unwrap();
        let path = |n: &str| dir.path().join(n).to_str().unwrap().to_string();
        fs::write(path("u.json"), serde_json::to_string(&json!({ "route": u })).unwrap()).unwrap();
        fs::write(path("rect.json"), serde_json::to_string(&rectangle).unwrap()).unwrap();
        let sim_out = bin().args(["simulate", "--config", &path("u.json"), "--out", &path("sim")]).output().unwrap();
        ensure(sim_out.status.success(), || "simulate failed".into())?;
        let out = bin()
            .args(["match", "--imu", &path("sim/imu.csv"), "--route", &path("rect.json"), "--out", &path("m")])
            .output()
            .unwrap();
        let code = out.status.code();
        let stderr = String::from_utf8_lossy(&out.stderr).to_string();
        ensure(code == Some(4), || format!("exit code {code:?}: {stderr}"))?;
        ensure(stderr.contains("2 turns vs 3 corners"), || format!("message: {stderr}"))?;
        Ok(format!("mismatch (2, 3); CLI exit 4: {}", stderr.trim()))
    });
}

#[test]
fn criterion_8_determinism() {
    report(8, "determinism", None, || {
        let dir = TempDir::new().unwrap();
        let path = |n: &str| dir.path().join(n);
        let scenario = drifting_walk(42);
        fs::write(path("scenario.json"), serde_json::to_string_pretty(&scenario).unwrap()).unwrap();
        fs::write(
            path("run.json"),
            serde_json::to_string_pretty(&json!({"scenario": "scenario.json", "scale": true, "seed": 42})).unwrap(),
        )
        .unwrap();
        for out in ["a", "b"] {
            let st = bin()
                .args(["run-all", "--config", path("run.json").to_str().unwrap(), "--out", path(out).to_str().unwrap()])
                .output()
                .unwrap();
            ensure(st.status.success(), || format!("run-all failed: {}", String::from_utf8_lossy(&st.stderr)))?;
        }
        let mut names: Vec<_> = fs::read_dir(path("a"))
            .unwrap()
            .map(|e| e.unwrap().file_name())
            .collect();
        names.sort();
        ensure(names.len() == 9, || format!("{} output files", names.len()))?;
        for name in &names {
            let a = fs::read(path("a").join(name)).unwrap();
            let b = fs::read(path("b").join(name)).map_err(|e| format!("{name:?}: {e}"))?;
            ensure(a == b, || format!("{name:?} differs"))?;
        }
        Ok(format!("{} files byte-identical across two runs", names.len()))
    });
}
