//! Trajectory CSV files.
//!
//! Numbers are written as `{:.16e}` (17 significant digits), which parses
//! back to the same `f64`, so reading a file and writing it again
//! reproduces it byte for byte.

use std::io::{Read, Write};

use crate::trajectory::{Trajectory, TrajectoryError};

pub const IMPULSIVE_HEADER: [&str; 4] = ["t", "x_left", "x_right", "is_impulse"];
pub const COMPANION_HEADER: [&str; 2] = ["t", "y"];

#[derive(Debug, thiserror::Error)]
pub enum CsvError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("unexpected header {found:?}")]
    Header { found: Vec<String> },
    #[error("line {line}: {msg}")]
    Field { line: u64, msg: String },
    #[error(transparent)]
    Trajectory(#[from] TrajectoryError),
}

pub fn fmt_num(v: f64) -> String {
    format!("{v:.16e}")
}

/// One row per grid point; `is_impulse` is 1 at impulse times and other
/// jumps.
pub fn write_impulsive<W: Write>(x: &Trajectory, out: W) -> Result<(), CsvError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(IMPULSIVE_HEADER)?;
    let (g, l, r) = (x.grid(), x.values_left(), x.values_right());
    for j in 0..g.len() {
        let flag = if x.is_marked(j) { "1" } else { "0" };
        w.write_record([fmt_num(g[j]).as_str(), &fmt_num(l[j]), &fmt_num(r[j]), flag])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// One row per grid point with the stored (right) value.
pub fn write_companion<W: Write>(y: &Trajectory, out: W) -> Result<(), CsvError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(COMPANION_HEADER)?;
    for (t, v) in y.grid().iter().zip(y.values_right()) {
        w.write_record([fmt_num(*t), fmt_num(*v)])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Line number, leading numeric fields, raw fields.
type Row = (u64, Vec<f64>, Vec<String>);

fn records<R: Read>(input: R, header: &[&str]) -> Result<Vec<Row>, CsvError> {
    let mut rdr = csv::Reader::from_reader(input);
    let found: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    if found != header {
        return Err(CsvError::Header { found });
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let fields: Vec<String> = rec.iter().map(str::to_owned).collect();
        let nums = fields
            .iter()
            .take(3.min(fields.len()))
            .map(|f| f.parse::<f64>().map_err(|e| CsvError::Field { line, msg: format!("{f:?}: {e}") }))
            .collect::<Result<Vec<_>, _>>()?;
        rows.push((line, nums, fields));
    }
    Ok(rows)
}

/// Reads a file written by [`write_impulsive`]. The origin of the result is
/// its first grid time.
pub fn read_impulsive<R: Read>(input: R) -> Result<Trajectory, CsvError> {
    let rows = records(input, &IMPULSIVE_HEADER)?;
    let mut g = Vec::with_capacity(rows.len());
    let mut l = Vec::with_capacity(rows.len());
    let mut r = Vec::with_capacity(rows.len());
    let mut marks = Vec::new();
    for (j, (line, nums, fields)) in rows.into_iter().enumerate() {
        match fields[3].as_str() {
            "1" => marks.push(j),
            "0" => {}
            other => return Err(CsvError::Field { line, msg: format!("is_impulse must be 0 or 1, got {other:?}") }),
        }
        g.push(nums[0]);
        l.push(nums[1]);
        r.push(nums[2]);
    }
    let origin = g.first().copied().unwrap_or(0.0);
    Ok(Trajectory::new(origin, g, r, l, marks)?)
}

/// Reads a file written by [`write_companion`].
pub fn read_companion<R: Read>(input: R) -> Result<Trajectory, CsvError> {
    let rows = records(input, &COMPANION_HEADER)?;
    let (g, v): (Vec<f64>, Vec<f64>) = rows.into_iter().map(|(_, nums, _)| (nums[0], nums[1])).unzip();
    let origin = g.first().copied().unwrap_or(0.0);
    Ok(Trajectory::continuous(origin, g, v)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn impulsive_round_trip_is_byte_exact() {
        let x = Trajectory::new(
            0.0,
            vec![-1.0, 0.0, 0.1, 1.0 / 3.0],
            vec![1.0, -0.5, 1e-300, -0.0],
            vec![1.0, 1.0, 1e-300, -0.0],
            vec![1],
        )
        .unwrap();
        let mut first = Vec::new();
        write_impulsive(&x, &mut first).unwrap();
        let back = read_impulsive(first.as_slice()).unwrap();
        let mut second = Vec::new();
        write_impulsive(&back, &mut second).unwrap();
        assert_eq!(first, second);
        let text = String::from_utf8(first).unwrap();
        assert!(text.starts_with("t,x_left,x_right,is_impulse\n"));
        assert!(text.contains("0.0000000000000000e0,1.0000000000000000e0,-5.0000000000000000e-1,1\n"));
    }

    #[test]
    fn companion_round_trip_is_byte_exact() {
        let y = Trajectory::continuous(0.0, vec![0.0, 0.7, 1.4], vec![1.0, 0.123456789, -2.5e10]).unwrap();
        let mut first = Vec::new();
        write_companion(&y, &mut first).unwrap();
        let mut second = Vec::new();
        write_companion(&read_companion(first.as_slice()).unwrap(), &mut second).unwrap();
        assert_eq!(first, second);
    }

    #[test]
    fn wrong_header_is_rejected() {
        assert!(matches!(read_companion("t,x\n0,1\n".as_bytes()), Err(CsvError::Header { .. })));
    }
}
