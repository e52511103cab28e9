//! IMU log ingest and the scalar signal used for step detection.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Header of the standard IMU log layout.
pub const IMU_HEADER: [&str; 7] = ["t", "ax", "ay", "az", "gx", "gy", "gz"];

/// One timestamped accelerometer (m/s²) + gyroscope (rad/s) reading, device frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImuSample {
    pub t: f64,
    pub accel: [f64; 3],
    pub gyro: [f64; 3],
}

impl ImuSample {
    pub fn is_valid(&self) -> bool {
        self.t.is_finite()
            && self.t >= 0.0
            && self.accel.iter().chain(&self.gyro).all(|v| v.is_finite())
    }
}

/// Time-ordered samples with strictly increasing timestamps.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleStream {
    samples: Vec<ImuSample>,
    rate_hz: f64,
}

impl SampleStream {
    /// Validates ordering and finiteness. `rate_hz` is estimated from the
    /// timestamps when not supplied.
    pub fn new(samples: Vec<ImuSample>, rate_hz: Option<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptyInput);
        }
        for (i, s) in samples.iter().enumerate() {
            if !s.is_valid() {
                return Err(Error::Parse {
                    line: i as u64 + 1,
                    message: "sample has a negative or non-finite value".into(),
                });
            }
            if i > 0 && s.t <= samples[i - 1].t {
                return Err(Error::Ordering {
                    line: i as u64 + 1,
                    t: s.t,
                    prev: samples[i - 1].t,
                });
            }
        }
        let rate_hz = match rate_hz {
            Some(r) if r > 0.0 && r.is_finite() => r,
            Some(r) => return Err(Error::Parameter(format!("sampling rate {r} Hz"))),
            None => estimate_rate(&samples),
        };
        Ok(Self { samples, rate_hz })
    }

    pub fn samples(&self) -> &[ImuSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn rate_hz(&self) -> f64 {
        self.rate_hz
    }

    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    pub fn start_time(&self) -> f64 {
        self.samples[0].t
    }

    pub fn end_time(&self) -> f64 {
        self.samples[self.samples.len() - 1].t
    }
}

/// (N−1)/(t_last − t_first); zero for a single sample.
fn estimate_rate(samples: &[ImuSample]) -> f64 {
    let n = samples.len();
    if n < 2 {
        return 0.0;
    }
    (n - 1) as f64 / (samples[n - 1].t - samples[0].t)
}

/// Column positions for a foreign CSV layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnMap {
    /// Channel name (`t`, `ax`, … `gz`) → zero-based column index.
    pub columns: BTreeMap<String, usize>,
    /// Whether the first line is a header to skip.
    #[serde(default = "default_true")]
    pub header: bool,
    /// Multiplier converting the time column to seconds (e.g. 1e-3 for ms).
    #[serde(default = "default_one")]
    pub time_scale: f64,
    /// Time of the first row becomes t = 0.
    #[serde(default)]
    pub rebase_time: bool,
}

fn default_true() -> bool {
    true
}

fn default_one() -> f64 {
    1.0
}

/// Supported CSV layouts.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum LogFormat {
    /// Header `t,ax,ay,az,gx,gy,gz`, SI units.
    #[default]
    Standard,
    Mapped(ColumnMap),
}

impl LogFormat {
    fn indices(&self) -> Result<[usize; 7]> {
        match self {
            LogFormat::Standard => Ok([0, 1, 2, 3, 4, 5, 6]),
            LogFormat::Mapped(map) => {
                let mut idx = [0; 7];
                for (slot, name) in idx.iter_mut().zip(IMU_HEADER) {
                    *slot = *map.columns.get(name).ok_or_else(|| {
                        Error::Config(format!("column map is missing channel `{name}`"))
                    })?;
                }
                Ok(idx)
            }
        }
    }
}

/// Parse a CSV IMU log.
pub fn parse_imu_log<R: Read>(source: R, format: &LogFormat) -> Result<SampleStream> {
    let indices = format.indices()?;
    let (has_header, time_scale, rebase) = match format {
        LogFormat::Standard => (true, 1.0, false),
        LogFormat::Mapped(m) => (m.header, m.time_scale, m.rebase_time),
    };
    let width = match format {
        LogFormat::Standard => IMU_HEADER.len(),
        LogFormat::Mapped(_) => indices.iter().max().unwrap() + 1,
    };

    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(source);

    let mut samples: Vec<ImuSample> = Vec::new();
    let mut record = csv::StringRecord::new();
    let mut first = true;
    let mut t_base = None;
    loop {
        let more = reader.read_record(&mut record).map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        if !more {
            break;
        }
        let line = record.position().map_or(0, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        if std::mem::take(&mut first) && has_header {
            if matches!(format, LogFormat::Standard) && !record.iter().eq(IMU_HEADER) {
                return Err(Error::Parse {
                    line,
                    message: format!("expected header `{}`", IMU_HEADER.join(",")),
                });
            }
            continue;
        }
        let strict = matches!(format, LogFormat::Standard);
        if (strict && record.len() != width) || record.len() < width {
            return Err(Error::Parse {
                line,
                message: format!("expected {width} columns, found {}", record.len()),
            });
        }
        let mut values = [0.0; 7];
        for (v, (&col, name)) in values.iter_mut().zip(indices.iter().zip(IMU_HEADER)) {
            let field = &record[col];
            *v = field.parse::<f64>().map_err(|_| Error::Parse {
                line,
                message: format!("field `{name}` is not a number: {field:?}"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    line,
                    message: format!("field `{name}` is not finite"),
                });
            }
        }
        // rebase in raw units so integer clocks stay exact
        let mut t = values[0];
        if rebase {
            t -= *t_base.get_or_insert(t);
        }
        t *= time_scale;
        if t < 0.0 {
            return Err(Error::Parse {
                line,
                message: format!("negative timestamp {t}"),
            });
        }
        if let Some(prev) = samples.last() {
            if t <= prev.t {
                return Err(Error::Ordering { line, t, prev: prev.t });
            }
        }
        samples.push(ImuSample {
            t,
            accel: [values[1], values[2], values[3]],
            gyro: [values[4], values[5], values[6]],
        });
    }
    SampleStream::new(samples, None)
}

/// Write a stream in the standard layout. Values use the shortest
/// representation that parses back to the same `f64`.
pub fn write_imu_log<W: Write>(stream: &SampleStream, sink: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(sink);
    writer.write_record(IMU_HEADER).map_err(csv_io)?;
    for s in stream.samples() {
        let row = [
            s.t, s.accel[0], s.accel[1], s.accel[2], s.gyro[0], s.gyro[1], s.gyro[2],
        ];
        writer
            .write_record(row.iter().map(|v| v.to_string()))
            .map_err(csv_io)?;
    }
    writer.flush()?;
    Ok(())
}

pub(crate) fn csv_io(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Io(std::io::Error::other(format!("{other:?}"))),
    }
}

/// Per-sample Euclidean norm of the acceleration vector.
pub fn accel_magnitude(stream: &SampleStream) -> Vec<f64> {
    stream
        .samples()
        .iter()
        .map(|s| {
            let [x, y, z] = s.accel;
            (x * x + y * y + z * z).sqrt()
        })
        .collect()
}

/// Centered moving average with truncated windows at the edges.
pub fn smooth(signal: &[f64], window: usize) -> Result<Vec<f64>> {
    if window == 0 || window % 2 == 0 {
        return Err(Error::Parameter(format!(
            "smoothing window must be odd and positive, got {window}"
        )));
    }
    let half = window / 2;
    let n = signal.len();
    Ok((0..n)
        .map(|i| {
            let w = &signal[i.saturating_sub(half)..(i + half + 1).min(n)];
            let (lo, hi) = w
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                    (lo.min(v), hi.max(v))
                });
            // rounding can push the mean an ulp outside the window range
            (w.iter().sum::<f64>() / w.len() as f64).clamp(lo, hi)
        })
        .collect())
}

/// Default smoothing window: a quarter second of samples, forced odd.
pub fn default_smoothing_window(rate_hz: f64) -> usize {
    let w = (0.25 * rate_hz).round().max(1.0) as usize;
    if w % 2 == 0 {
        w + 1
    } else {
        w
    }
}

/// Subtract a centered running mean of `window` samples.
pub fn detrend(signal: &[f64], window: usize) -> Result<Vec<f64>> {
    let mean = smooth(signal, window)?;
    Ok(signal.iter().zip(mean).map(|(v, m)| v - m).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    const LOG: &str = "t,ax,ay,az,gx,gy,gz\n\
        0.00,0.1,0.2,9.8,0.0,0.0,0.01\n\
        0.01,0.1,0.2,9.9,0.0,0.0,0.02\n\
        0.02,0.0,0.3,10.1,0.0,0.0,0.03\n";

    #[test]
    fn parses_three_rows() {
        let s = parse_imu_log(LOG.as_bytes(), &LogFormat::Standard).unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.samples()[2].accel, [0.0, 0.3, 10.1]);
        assert!((s.rate_hz() - 100.0).abs() < 1e-9);
    }

    #[test]
    fn short_row_names_line() {
        let log = "t,ax,ay,az,gx,gy,gz\n0,1,2,3,4,5,6\n0.1,1,2,3,4\n";
        match parse_imu_log(log.as_bytes(), &LogFormat::Standard) {
            Err(Error::Parse { line, message }) => {
                assert_eq!(line, 3);
                assert!(message.contains("expected 7 columns, found 5"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn non_numeric_field() {
        let log = "t,ax,ay,az,gx,gy,gz\n0,1,2,x,4,5,6\n";
        let err = parse_imu_log(log.as_bytes(), &LogFormat::Standard).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
    }

    #[test]
    fn duplicate_timestamp_rejected() {
        let log = "t,ax,ay,az,gx,gy,gz\n0,1,2,3,4,5,6\n0,1,2,3,4,5,6\n";
        let err = parse_imu_log(log.as_bytes(), &LogFormat::Standard).unwrap_err();
        assert!(matches!(err, Error::Ordering { line: 3, .. }), "{err}");
    }

    #[test]
    fn backwards_timestamp_rejected() {
        let log = "t,ax,ay,az,gx,gy,gz\n1,1,2,3,4,5,6\n0.5,1,2,3,4,5,6\n";
        let err = parse_imu_log(log.as_bytes(), &LogFormat::Standard).unwrap_err();
        assert!(matches!(err, Error::Ordering { .. }), "{err}");
    }

    #[test]
    fn empty_inputs() {
        for log in ["", "t,ax,ay,az,gx,gy,gz\n"] {
            let err = parse_imu_log(log.as_bytes(), &LogFormat::Standard).unwrap_err();
            assert!(matches!(err, Error::EmptyInput), "{err}");
        }
    }

    #[test]
    fn wrong_header() {
        let err = parse_imu_log("time,a,b\n".as_bytes(), &LogFormat::Standard).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }), "{err}");
    }

    #[test]
    fn mapped_layout() {
        let log = "ms,gz,gy,gx,az,ay,ax,extra\n1000,0.5,0,0,9.8,0,0,x\n1010,0.5,0,0,9.9,0,0,y\n";
        let columns = IMU_HEADER
            .iter()
            .zip([0, 6, 5, 4, 3, 2, 1])
            .map(|(n, i)| (n.to_string(), i))
            .collect();
        let format = LogFormat::Mapped(ColumnMap {
            columns,
            header: true,
            time_scale: 1e-3,
            rebase_time: true,
        });
        let s = parse_imu_log(log.as_bytes(), &format).unwrap();
        assert_eq!(s.samples()[0].t, 0.0);
        assert!((s.samples()[1].t - 0.01).abs() < 1e-12);
        assert_eq!(s.samples()[1].accel[2], 9.9);
        assert_eq!(s.samples()[1].gyro[2], 0.5);
    }

    #[test]
    fn mapped_layout_missing_channel() {
        let format = LogFormat::Mapped(ColumnMap {
            columns: BTreeMap::from([("t".to_string(), 0)]),
            header: false,
            time_scale: 1.0,
            rebase_time: false,
        });
        let err = parse_imu_log("0,1\n".as_bytes(), &format).unwrap_err();
        assert!(matches!(err, Error::Config(_)), "{err}");
    }

    #[test]
    fn write_then_parse_is_exact() {
        let s = parse_imu_log(LOG.as_bytes(), &LogFormat::Standard).unwrap();
        let mut buf = Vec::new();
        write_imu_log(&s, &mut buf).unwrap();
        let back = parse_imu_log(buf.as_slice(), &LogFormat::Standard).unwrap();
        assert_eq!(back.samples(), s.samples());
    }

    #[test]
    fn magnitude_examples() {
        let samples = vec![
            ImuSample { t: 0.0, accel: [0.0, 0.0, 9.81], gyro: [0.0; 3] },
            ImuSample { t: 0.1, accel: [3.0, 4.0, 0.0], gyro: [0.0; 3] },
        ];
        let m = accel_magnitude(&SampleStream::new(samples, None).unwrap());
        assert_eq!(m, vec![9.81, 5.0]);
    }

    #[test]
    fn smooth_examples() {
        let x = [0.0, 0.0, 1.0, 0.0, 0.0];
        assert_eq!(smooth(&x, 1).unwrap(), x.to_vec());
        let y = smooth(&x, 3).unwrap();
        let third = 1.0 / 3.0;
        let expected = [0.0, third, third, third, 0.0];
        for (a, b) in y.iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(smooth(&[2.5; 9], 5).unwrap(), vec![2.5; 9]);
    }

    #[test]
    fn smooth_rejects_bad_window() {
        assert!(matches!(smooth(&[1.0], 0), Err(Error::Parameter(_))));
        assert!(matches!(smooth(&[1.0], 4), Err(Error::Parameter(_))));
    }

    #[test]
    fn default_window_is_odd_quarter_second() {
        assert_eq!(default_smoothing_window(100.0), 25);
        assert_eq!(default_smoothing_window(50.0), 13);
        assert_eq!(default_smoothing_window(200.0), 51);
        assert_eq!(default_smoothing_window(0.0), 1);
    }
}
