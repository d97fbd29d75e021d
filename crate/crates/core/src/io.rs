//! Run configuration and sample dumps.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::complex::CPoint;
use crate::error::{Error, Result};
use crate::lifting::PathSample;
use crate::validate::format_f64;

/// Settings of a validation run; command-line flags override file values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub chain: String,
    pub tmax: f64,
    pub seed: u64,
    pub radii: Vec<f64>,
    pub per_sphere: usize,
    /// Number of intervals of the time grid.
    pub time_steps: usize,
    /// Run the (slower) evolution-family checks too.
    pub evolution: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            chain: "annulus".into(),
            tmax: 3.0,
            seed: 7,
            radii: vec![0.3, 0.6, 0.9],
            per_sphere: 8,
            time_steps: 12,
            evolution: true,
        }
    }
}

impl RunConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        let c: RunConfig = serde_json::from_str(s).map_err(|e| Error::Invalid(format!("config: {e}")))?;
        c.check()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))?;
        Self::from_json(&s)
    }

    pub fn check(&self) -> Result<()> {
        if !(self.tmax.is_finite() && self.tmax >= 0.0) {
            return Err(Error::Invalid(format!("tmax must be finite and >= 0, got {}", self.tmax)));
        }
        if self.radii.iter().any(|r| !(0.0 < *r && *r < 1.0)) {
            return Err(Error::Invalid("radii must lie in (0, 1)".into()));
        }
        if self.per_sphere == 0 || self.time_steps == 0 {
            return Err(Error::Invalid("per_sphere and time_steps must be positive".into()));
        }
        Ok(())
    }

    pub fn sampling(&self) -> crate::sampling::SamplingGrid {
        crate::sampling::SamplingGrid {
            times: (0..=self.time_steps)
                .map(|k| self.tmax * k as f64 / self.time_steps as f64)
                .collect(),
            radii: self.radii.clone(),
            per_sphere: self.per_sphere,
            seed: self.seed,
        }
    }
}

fn point_header(prefix: &str, dim: usize) -> Vec<String> {
    (1..=dim)
        .flat_map(|j| [format!("{prefix}{j}_re"), format!("{prefix}{j}_im")])
        .collect()
}

fn point_fields(p: &CPoint) -> impl Iterator<Item = String> + '_ {
    p.coords().iter().flat_map(|z| [format_f64(z.re), format_f64(z.im)])
}

/// Points `z` and values `f_t(z)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleDump {
    pub chain: String,
    pub t: f64,
    pub points: Vec<CPoint>,
    pub values: Vec<CPoint>,
}

impl SampleDump {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let dim = self.points.first().map_or(0, CPoint::dim);
        let mut w = csv::Writer::from_writer(out);
        let mut header = point_header("z", dim);
        header.extend(point_header("f", dim));
        w.write_record(&header).map_err(csv_err)?;
        for (z, f) in self.points.iter().zip(&self.values) {
            let row: Vec<String> = point_fields(z).chain(point_fields(f)).collect();
            w.write_record(&row).map_err(csv_err)?;
        }
        w.flush().map_err(|e| Error::Invalid(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("dump serializes") + "\n"
    }
}

/// A lifted path next to the path it covers: columns `u`, `w*`, `c*`.
pub fn write_lift_csv<W: Write>(out: W, lifted: &PathSample, base: &PathSample) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["u".to_string()];
    header.extend(point_header("w", lifted.dim()));
    header.extend(point_header("c", base.dim()));
    w.write_record(&header).map_err(csv_err)?;
    for ((u, wp), (_, cp)) in lifted.nodes().iter().zip(base.nodes()) {
        let mut row = vec![format_f64(*u)];
        row.extend(point_fields(wp));
        row.extend(point_fields(cp));
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Invalid(e.to_string()))
}

fn csv_err(e: csv::Error) -> Error {
    Error::Invalid(format!("csv: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn config_defaults_and_overrides() {
        let c = RunConfig::from_json(r#"{"chain": "gen-annulus:n=2", "seed": 3}"#).unwrap();
        assert_eq!(c.chain, "gen-annulus:n=2");
        assert_eq!(c.seed, 3);
        assert_eq!(c.tmax, 3.0);
        assert!(RunConfig::from_json(r#"{"tmax": -1}"#).is_err());
        assert!(RunConfig::from_json(r#"{"bogus": 1}"#).is_err());
    }

    #[test]
    fn dump_csv_has_one_row_per_point() {
        let d = SampleDump {
            chain: "annulus".into(),
            t: 0.0,
            points: vec![CPoint::scalar(Complex64::new(0.5, 0.0)); 3],
            values: vec![CPoint::scalar(Complex64::new(1.0, -1.0)); 3],
        };
        let mut buf = Vec::new();
        d.write_csv(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], "z1_re,z1_im,f1_re,f1_im");
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("5.0000000000000000e-1,"));
    }
}
