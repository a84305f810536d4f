//! Decimal rendering and the shared row schema.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;
use tachyon_core::sweep::SweepRow;
use tachyon_core::{ForceResult, Model, Real};

use crate::error::CliError;

pub const HEADER: [&str; 9] = ["beta", "model", "n_roots", "F_radial", "F_azimuthal", "Z", "epsilon", "achieved_digits", "status"];

pub fn sink(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Rounds `x` to `digits` significant digits; "0" when nothing survives.
pub fn decimal(x: &Real, digits: i64) -> String {
    if digits <= 0 || x.is_zero() {
        "0".to_string()
    } else {
        x.to_sig_string(digits as u32)
    }
}

/// Digits of `value` that are meaningful when `reference` carries `achieved`
/// relative digits: a component 10^g smaller than the reference keeps
/// `achieved − g`.
pub fn digits_relative_to(value: &Real, reference: &Real, achieved: u32) -> i64 {
    match (value.exponent(), reference.exponent()) {
        (Some(v), Some(r)) => {
            let gap = (f64::from(r - v) * std::f64::consts::LOG10_2).ceil().max(0.0) as i64;
            i64::from(achieved) - gap
        }
        _ => 0,
    }
}

#[derive(Debug, Serialize)]
pub struct Record {
    pub beta: String,
    pub model: Option<&'static str>,
    pub n_roots: Option<usize>,
    #[serde(rename = "F_radial")]
    pub f_radial: Option<String>,
    #[serde(rename = "F_azimuthal")]
    pub f_azimuthal: Option<String>,
    #[serde(rename = "Z")]
    pub z: Option<String>,
    pub epsilon: Option<String>,
    pub achieved_digits: Option<u32>,
    pub status: &'static str,
}

impl Record {
    pub fn bare(beta: String, achieved_digits: Option<u32>, n_roots: Option<usize>) -> Record {
        Record {
            beta,
            model: None,
            n_roots,
            f_radial: None,
            f_azimuthal: None,
            z: None,
            epsilon: None,
            achieved_digits,
            status: "ok",
        }
    }

    fn forces(
        beta: String,
        model: Model,
        radial: &Real,
        azimuthal: &Real,
        epsilon: Option<&Real>,
        achieved: u32,
        n_roots: usize,
    ) -> Record {
        let reference = radial.abs().max(azimuthal.abs());
        let d_rad = digits_relative_to(radial, &reference, achieved);
        let d_az = digits_relative_to(azimuthal, &reference, achieved);
        Record {
            beta,
            model: Some(model.label()),
            n_roots: Some(n_roots),
            f_radial: Some(decimal(radial, d_rad)),
            f_azimuthal: Some(decimal(azimuthal, d_az)),
            z: Some(decimal(&-radial, d_rad)),
            epsilon: epsilon.map(|e| decimal(e, d_rad.min(d_az))),
            achieved_digits: Some(achieved),
            status: "ok",
        }
    }

    pub fn from_force(r: &ForceResult, beta_digits: u32) -> Record {
        Record::forces(
            r.beta.to_sig_string(beta_digits),
            r.model,
            &r.radial,
            &r.azimuthal,
            r.epsilon.as_ref(),
            r.achieved_digits,
            r.n_roots,
        )
    }

    pub fn from_row(row: &SweepRow, beta_digits: u32) -> Record {
        let beta = row.beta.to_sig_string(beta_digits);
        match (&row.radial, &row.azimuthal, row.achieved_digits, row.n_roots) {
            (Some(rad), Some(az), Some(d), Some(n)) => {
                Record::forces(beta, row.model, rad, az, row.epsilon.as_ref(), d, n)
            }
            _ => Record {
                model: Some(row.model.label()),
                status: row.status.label(),
                ..Record::bare(beta, None, None)
            },
        }
    }
}

pub fn csv_writer(out: Box<dyn Write>) -> csv::Writer<Box<dyn Write>> {
    csv::WriterBuilder::new().has_headers(true).from_writer(out)
}
