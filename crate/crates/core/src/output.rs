//! Bit-stable serialization: every float is written with 17 significant
//! digits (`{:.16e}`), which round-trips any `f64`, and with no locale.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

use crate::asymptotics::{Profile, ResidualReport};
use crate::error::{Error, Result};
use crate::fields::SpinorField;

/// Float formatted with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// JSON number with 17 significant digits; non-finite values become `null`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Num(pub f64);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return s.serialize_none();
        }
        let raw = RawValue::from_string(fmt_f64(self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    }
}

impl From<f64> for Num {
    fn from(x: f64) -> Self {
        Num(x)
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    csv::Writer::from_path(path).map_err(|e| csv_error(path, e))
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

fn write_rows<I>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv_writer(path)?;
    w.write_record(header).map_err(|e| csv_error(path, e))?;
    for row in rows {
        w.write_record(&row).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// `t,x,re_u,im_u,re_v,im_v`, one row per node per snapshot.
pub fn write_snapshots(path: &Path, snapshots: &[SpinorField], x: impl Fn(usize) -> f64) -> Result<()> {
    let rows = snapshots.iter().flat_map(|s| {
        let x = &x;
        (0..s.len()).map(move |j| {
            vec![
                fmt_f64(s.t),
                fmt_f64(x(j)),
                fmt_f64(s.u[j].re),
                fmt_f64(s.u[j].im),
                fmt_f64(s.v[j].re),
                fmt_f64(s.v[j].im),
            ]
        })
    });
    write_rows(path, &["t", "x", "re_u", "im_u", "re_v", "im_v"], rows)
}

/// `side,y,re,im` with side `G1` (right-movers) or `G2` (left-movers).
pub fn write_profiles(path: &Path, profiles: &[&Profile]) -> Result<()> {
    let rows = profiles.iter().flat_map(|p| {
        p.y.iter().zip(&p.values).map(move |(y, z)| {
            vec![p.side.label().to_string(), fmt_f64(*y), fmt_f64(z.re), fmt_f64(z.im)]
        })
    });
    write_rows(path, &["side", "y", "re", "im"], rows)
}

/// `t,l2_u,sup_u,l2_v,sup_v,bound_u,bound_v`; the bounds are the L² tail
/// envelopes at `t`.
pub fn write_residuals(path: &Path, reports: &[ResidualReport]) -> Result<()> {
    let rows = reports.iter().map(|r| {
        [r.t, r.l2_u, r.sup_u, r.l2_v, r.sup_v, r.analytic_bound_u, r.analytic_bound_v]
            .into_iter()
            .map(fmt_f64)
            .collect()
    });
    write_rows(path, &["t", "l2_u", "sup_u", "l2_v", "sup_v", "bound_u", "bound_v"], rows)
}

/// Plain text table for terminals.
pub fn print_table(out: &mut dyn Write, header: &[&str], rows: &[Vec<String>]) -> std::io::Result<()> {
    let widths: Vec<usize> = (0..header.len())
        .map(|c| {
            rows.iter()
                .map(|r| r.get(c).map_or(0, String::len))
                .chain([header[c].len()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let line = |cells: Vec<&str>| -> String {
        cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:>w$}"))
            .collect::<Vec<_>>()
            .join("  ")
    };
    writeln!(out, "{}", line(header.to_vec()))?;
    for r in rows {
        writeln!(out, "{}", line(r.iter().map(String::as_str).collect()))?;
    }
    Ok(())
}
