//! Read a phone export with its own column order and millisecond timestamps,
//! then write it back out in the standard `t,ax,ay,az,gx,gy,gz` layout.
//!
//!     cargo run --example parse_log [path/to/log.csv]

use std::collections::BTreeMap;
use std::io;

use indoor_pdr::imu::{accel_magnitude, parse_imu_log, write_imu_log, ColumnMap};
use indoor_pdr::LogFormat;

fn main() -> indoor_pdr::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/phone_log.csv").into());

    let columns: BTreeMap<String, usize> = ["t", "ax", "ay", "az", "gx", "gy", "gz"]
        .iter()
        .enumerate()
        .map(|(i, name)| (name.to_string(), i))
        .collect();
    let format = LogFormat::Mapped(ColumnMap {
        columns,
        header: true,
        time_scale: 1e-3,
        rebase_time: true,
    });

    let stream = parse_imu_log(std::fs::File::open(&path)?, &format)?;
    eprintln!(
        "{} samples over {:.3} s ({:.1} Hz)",
        stream.len(),
        stream.end_time() - stream.start_time(),
        stream.rate_hz()
    );
    let mag = accel_magnitude(&stream);
    let peak = mag.iter().copied().fold(f64::MIN, f64::max);
    eprintln!("peak |a| = {peak:.2} m/s²");

    write_imu_log(&stream, io::stdout().lock())
}
