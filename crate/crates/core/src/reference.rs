//! Reference solution for the viscous Burgers problem
//! `u_t + u u_x = nu u_xx`, `u(x, 0) = -sin(pi x)`, `u(+-1, t) = 0`.
//!
//! The Cole-Hopf transform turns the problem into the heat equation; since
//! the initial data are 2-periodic and odd about `x = +-1`, the whole-line
//! solution restricted to `[-1, 1]` satisfies the Dirichlet data exactly:
//!
//! ```text
//! u(x, t) = -∫ sin(pi (x - s)) F(x - s) G(s) ds / ∫ F(x - s) G(s) ds
//! F(y) = exp(-cos(pi y) / (2 pi nu)),   G(s) = exp(-s^2 / (4 nu t))
//! ```
//!
//! Both integrals are evaluated by the trapezoid rule in `z = s / sqrt(4 nu t)`
//! with the common exponent factored out.

use std::f64::consts::PI;
use std::io::{BufRead, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Trapezoid nodes in `z`; the integrand is analytic and decays like
/// `exp(-z^2)`, so the rule converges geometrically.
const QUAD_NODES: usize = 24_001;
const Z_MAX: f64 = 12.0;

/// Viscosity used by the registry problem, `0.01 / pi`.
pub fn default_viscosity() -> f64 {
    0.01 / PI
}

pub fn cole_hopf(x: f64, t: f64, nu: f64) -> f64 {
    if t <= 0.0 {
        return -(PI * x).sin();
    }
    let scale = (4.0 * nu * t).sqrt();
    let k = 1.0 / (2.0 * PI * nu);
    let h = 2.0 * Z_MAX / (QUAD_NODES - 1) as f64;
    // log of F(x - s) G(s), maximised first so the sums cannot overflow
    let exponent = |z: f64| -k * (PI * (x - scale * z)).cos() - z * z;
    let peak = (0..QUAD_NODES)
        .map(|i| exponent(-Z_MAX + i as f64 * h))
        .fold(f64::NEG_INFINITY, f64::max);
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..QUAD_NODES {
        let z = -Z_MAX + i as f64 * h;
        let w = if i == 0 || i == QUAD_NODES - 1 { 0.5 } else { 1.0 };
        let e = w * (exponent(z) - peak).exp();
        num += (PI * (x - scale * z)).sin() * e;
        den += e;
    }
    -num / den
}

/// Tabulated `u_ref(t, x)` on a fixed spatial grid per time.
#[derive(Clone, Debug, PartialEq)]
pub struct ReferenceTable {
    pub times: Vec<f64>,
    pub x: Vec<f64>,
    /// `values[i][j]` is `u_ref(times[i], x[j])`.
    pub values: Vec<Vec<f64>>,
}

impl ReferenceTable {
    pub fn generate(times: &[f64], x: &[f64], nu: f64) -> Self {
        let values = times
            .iter()
            .map(|&t| x.iter().map(|&xi| cole_hopf(xi, t, nu)).collect())
            .collect();
        Self {
            times: times.to_vec(),
            x: x.to_vec(),
            values,
        }
    }

    /// Values at `t`, matched to within `1e-9`.
    pub fn at(&self, t: f64) -> Option<&[f64]> {
        self.times
            .iter()
            .position(|&s| (s - t).abs() < 1e-9)
            .map(|i| self.values[i].as_slice())
    }

    /// CSV with header `t,x,u_ref`, one row per (time, point), full precision.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "t,x,u_ref")?;
        for (t, row) in self.times.iter().zip(&self.values) {
            for (x, u) in self.x.iter().zip(row) {
                writeln!(out, "{t:.16e},{x:.16e},{u:.16e}")?;
            }
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(input: R) -> Result<Self> {
        let mut times: Vec<f64> = Vec::new();
        let mut x: Vec<f64> = Vec::new();
        let mut values: Vec<Vec<f64>> = Vec::new();
        for (n, line) in input.lines().enumerate() {
            let line = line?;
            if n == 0 {
                if line.trim() != "t,x,u_ref" {
                    return Err(Error::InvalidInput(format!("unexpected reference header `{line}`")));
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<f64> = line
                .split(',')
                .map(|f| f.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::InvalidInput(format!("reference line {}: {e}", n + 1)))?;
            let [t, xi, u] = fields[..] else {
                return Err(Error::InvalidInput(format!(
                    "reference line {} has {} fields, expected 3",
                    n + 1,
                    fields.len()
                )));
            };
            if times.last() != Some(&t) {
                times.push(t);
                values.push(Vec::new());
            }
            let row = values.last_mut().expect("pushed above");
            if times.len() == 1 {
                x.push(xi);
            } else if x.get(row.len()) != Some(&xi) {
                return Err(Error::InvalidInput(format!(
                    "reference line {}: grid differs between times",
                    n + 1
                )));
            }
            row.push(u);
        }
        if values.iter().any(|r| r.len() != x.len()) || times.is_empty() {
            return Err(Error::InvalidInput("reference table is empty or ragged".into()));
        }
        Ok(Self { times, x, values })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let f = std::fs::File::open(path)?;
        Self::read_csv(std::io::BufReader::new(f))
    }

    /// The table shipped with the crate.
    pub fn bundled() -> Result<Self> {
        Self::read_csv(BUNDLED_CSV.as_bytes())
    }
}

const BUNDLED_CSV: &str = include_str!("../data/burgers_reference.csv");

/// Times and grid of the bundled table.
pub const REFERENCE_TIMES: [f64; 4] = [0.25, 0.5, 0.75, 1.0];
pub const REFERENCE_POINTS: usize = 1000;

pub fn reference_grid() -> Vec<f64> {
    (0..REFERENCE_POINTS)
        .map(|i| -1.0 + 2.0 * i as f64 / (REFERENCE_POINTS - 1) as f64)
        .collect()
}
