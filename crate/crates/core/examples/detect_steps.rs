//! Count steps in a synthetic 2 Hz gait signal with sensor noise.

use std::f64::consts::PI;

use indoor_pdr::imu::{default_smoothing_window, smooth};
use indoor_pdr::pdr::{detect_steps, StepDetectionParams};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn main() -> indoor_pdr::Result<()> {
    let rate = 100.0;
    let noise = Normal::new(0.0, 0.3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);

    let t: Vec<f64> = (0..1000).map(|i| i as f64 / rate).collect();
    let raw: Vec<f64> = t
        .iter()
        .map(|&t| 9.81 + 3.0 * (2.0 * PI * 2.0 * t).sin() + noise.sample(&mut rng))
        .collect();

    let params = StepDetectionParams::default();
    let unsmoothed = detect_steps(&raw, &t, &params)?;
    let signal = smooth(&raw, default_smoothing_window(rate))?;
    let steps = detect_steps(&signal, &t, &params)?;

    println!("raw signal:      {} peaks", unsmoothed.len());
    println!("smoothed signal: {} peaks", steps.len());
    for s in &steps {
        println!("  t = {:5.2} s  peak {:.2} m/s²", s.t, s.peak_value);
    }
    Ok(())
}
