use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::ModelError;

/// A sampled radial series `r_j -> value_j` with strictly increasing radii.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileSeries {
    pub name: String,
    radii: Vec<f64>,
    values: Vec<f64>,
}

impl ProfileSeries {
    pub fn new(name: impl Into<String>, radii: Vec<f64>, values: Vec<f64>) -> Result<Self, ModelError> {
        if radii.len() != values.len() {
            return Err(ModelError::InvalidSpec(format!(
                "profile has {} radii and {} values",
                radii.len(),
                values.len()
            )));
        }
        if radii.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(ModelError::InvalidSpec("profile radii must be strictly increasing".into()));
        }
        Ok(Self { name: name.into(), radii, values })
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    /// Centered first derivative at an interior index.
    pub fn derivative(&self, j: usize) -> Option<f64> {
        if j == 0 || j + 1 >= self.len() {
            return None;
        }
        let (r, v) = (&self.radii, &self.values);
        let (hl, hr) = (r[j] - r[j - 1], r[j + 1] - r[j]);
        // three-point formula, exact for quadratics on nonuniform grids
        Some(
            -hr / (hl * (hl + hr)) * v[j - 1]
                + (hr - hl) / (hl * hr) * v[j]
                + hl / (hr * (hl + hr)) * v[j + 1],
        )
    }

    /// Centered second derivative at an interior index.
    pub fn second_derivative(&self, j: usize) -> Option<f64> {
        if j == 0 || j + 1 >= self.len() {
            return None;
        }
        let (r, v) = (&self.radii, &self.values);
        let (hl, hr) = (r[j] - r[j - 1], r[j + 1] - r[j]);
        Some(2.0 * (hl * v[j + 1] - (hl + hr) * v[j] + hr * v[j - 1]) / (hl * hr * (hl + hr)))
    }

    /// Piecewise-linear interpolation, clamped to the end values.
    pub fn interpolate(&self, r: f64) -> f64 {
        let n = self.len();
        if r <= self.radii[0] {
            return self.values[0];
        }
        if r >= self.radii[n - 1] {
            return self.values[n - 1];
        }
        let k = self.radii.partition_point(|&x| x <= r);
        let (r0, r1) = (self.radii[k - 1], self.radii[k]);
        let t = (r - r0) / (r1 - r0);
        self.values[k - 1] * (1.0 - t) + self.values[k] * t
    }

    pub fn is_nondecreasing(&self, tol: f64) -> bool {
        self.values.windows(2).all(|w| w[1] >= w[0] - tol)
    }

    /// Restriction to radii in `[lo, hi]`.
    pub fn window(&self, lo: f64, hi: f64) -> Self {
        let (radii, values) = self
            .radii
            .iter()
            .zip(&self.values)
            .filter(|(r, _)| **r >= lo && **r <= hi)
            .map(|(r, v)| (*r, *v))
            .unzip();
        Self { name: self.name.clone(), radii, values }
    }

    /// Two-column CSV `radius,value` with a one-line header.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["radius", "value"])?;
        for (r, v) in self.radii.iter().zip(&self.values) {
            w.write_record([format_float(*r), format_float(*v)])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }
}

/// Shortest representation that round-trips, so CSV output is stable.
pub(crate) fn format_float(x: f64) -> String {
    format!("{x:?}")
}
