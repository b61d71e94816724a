//! CSV paths and JSON metadata.
//!
//! Floats are written in scientific notation with 17 significant digits so
//! that reading a file back reproduces every value bit for bit. Non-finite
//! values are written as the literal `nan`.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::armax::{ProcessConfig, SamplePath};
use crate::error::{Error, Result};

/// `{:.16e}` for finite values, `nan` otherwise.
pub fn fmt_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "nan".to_string()
    }
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "nan".to_string(), fmt_float)
}

/// Header `t,x1,..,xd`, one row per time step starting at `t = 1`.
pub fn write_path_csv<W: Write>(path: &SamplePath, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["t".to_string()];
    header.extend((1..=path.d).map(|j| format!("x{j}")));
    w.write_record(&header)?;
    for i in 0..path.n {
        let mut rec = vec![(i + 1).to_string()];
        rec.extend(path.row(i).iter().map(|&x| fmt_float(x)));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a path CSV. A leading `t` column is dropped; every other column is
/// one component. `nan` entries are read as NaN.
pub fn read_path_csv<R: Read>(input: R) -> Result<SamplePath> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let header = r.headers()?.clone();
    let skip = usize::from(header.get(0).is_some_and(|h| h.eq_ignore_ascii_case("t")));
    let d = header.len() - skip;
    if d == 0 {
        return Err(Error::config("path CSV has no data columns"));
    }
    let mut rows = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        let row = rec
            .iter()
            .skip(skip)
            .map(|s| s.parse::<f64>().map_err(|_| Error::config(format!("row {}: cannot parse {s:?}", line + 1))))
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::config("path CSV has no rows"));
    }
    SamplePath::from_rows(rows, 0, String::new())
}

/// Sidecar describing a simulated path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathMetadata {
    pub n: usize,
    pub d: usize,
    pub seed: u64,
    pub config_digest: String,
    pub process: ProcessConfig,
}

impl PathMetadata {
    pub fn new(path: &SamplePath, process: &ProcessConfig) -> Self {
        PathMetadata { n: path.n, d: path.d, seed: path.seed, config_digest: path.config_digest.clone(), process: process.clone() }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::armax::simulate_path;
    use crate::copulas::CopulaSpec;
    use crate::margins::MarginSpec;

    #[test]
    fn float_format() {
        assert_eq!(fmt_float(0.5), "5.0000000000000000e-1");
        assert_eq!(fmt_float(f64::NAN), "nan");
        assert_eq!(fmt_float(f64::INFINITY), "nan");
        assert_eq!(fmt_opt(None), "nan");
        let x = 0.1 + 0.2;
        assert_eq!(fmt_float(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn path_round_trip() {
        let cfg = ProcessConfig::new(vec![0.3, 0.7], vec![MarginSpec::unit_frechet(); 2], CopulaSpec::Gumbel { gamma: 1.5 }).unwrap();
        let p = simulate_path(&cfg, 200, 4).unwrap();
        let mut buf = Vec::new();
        write_path_csv(&p, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("t,x1,x2\n1,"));
        let q = read_path_csv(buf.as_slice()).unwrap();
        assert_eq!((q.n, q.d), (200, 2));
        assert_eq!(q.data, p.data);
    }

    #[test]
    fn reads_headerless_t_and_nan() {
        let q = read_path_csv("a,b\n1.0,nan\n-2,3\n".as_bytes()).unwrap();
        assert_eq!((q.n, q.d), (2, 2));
        assert!(q.get(0, 1).is_nan());
        assert_eq!(q.get(1, 0), -2.0);
        assert!(read_path_csv("x\nfoo\n".as_bytes()).is_err());
        assert!(read_path_csv("x\n".as_bytes()).is_err());
    }

    #[test]
    fn metadata_json() {
        let cfg = ProcessConfig::new(vec![0.5], vec![MarginSpec::unit_frechet()], CopulaSpec::Independence).unwrap();
        let p = simulate_path(&cfg, 10, 1).unwrap();
        let m = PathMetadata::new(&p, &cfg);
        let back: PathMetadata = serde_json::from_str(&m.to_json().unwrap()).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.config_digest, cfg.digest());
    }
}
