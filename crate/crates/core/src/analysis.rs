//! Error metrics and amplitude spectra.

use std::io::Write;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::par::Execution;
use crate::solution::Solution;

/// Default relative tolerance of [`spectrum_agreement_band`].
pub const DEFAULT_BAND_TOL: f64 = 0.2;
/// Bins whose exact amplitude is below this fraction of the peak are
/// ignored by the band criterion.
pub const BAND_FLOOR: f64 = 0.01;

/// `||numeric - exact||_2 / ||exact||_2`.
pub fn relative_l2(numeric: &[f64], exact: &[f64]) -> Result<f64> {
    if numeric.len() != exact.len() {
        return Err(Error::DimensionMismatch {
            expected: exact.len(),
            found: numeric.len(),
        });
    }
    if exact.is_empty() {
        return Err(Error::InvalidArgument("relative error of empty vectors".into()));
    }
    let den = exact.iter().map(|v| v * v).sum::<f64>().sqrt();
    if den == 0.0 {
        return Err(Error::DegenerateReference);
    }
    let num = numeric
        .iter()
        .zip(exact)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    Ok(num / den)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ErrorReport {
    pub relative_l2: f64,
    pub max_abs: f64,
    #[serde(skip)]
    pub grid: Vec<Point>,
    /// `|numeric - exact|` at each grid point.
    #[serde(skip)]
    pub pointwise: Vec<f64>,
}

impl ErrorReport {
    pub fn from_values(grid: Vec<Point>, numeric: &[f64], exact: &[f64]) -> Result<Self> {
        if grid.len() != exact.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                found: exact.len(),
            });
        }
        let relative_l2 = relative_l2(numeric, exact)?;
        let pointwise: Vec<f64> = numeric.iter().zip(exact).map(|(a, b)| (a - b).abs()).collect();
        let max_abs = pointwise.iter().copied().fold(0.0, f64::max);
        Ok(Self {
            relative_l2,
            max_abs,
            grid,
            pointwise,
        })
    }

    /// One column per axis, then `error`.
    pub fn write_csv<W: Write>(&self, mut out: W, axes: &[&str]) -> Result<()> {
        let dim = self.grid.first().map_or(axes.len(), Vec::len);
        if axes.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: axes.len(),
            });
        }
        writeln!(out, "{},error", axes.join(","))?;
        for (p, e) in self.grid.iter().zip(&self.pointwise) {
            for c in p {
                write!(out, "{c:.16e},")?;
            }
            writeln!(out, "{e:.16e}")?;
        }
        Ok(())
    }
}

/// Evaluates `solution` and `exact` on `grid` and compares them.
pub fn error_report<F>(solution: &Solution, exact: F, grid: Vec<Point>, exec: Execution) -> Result<ErrorReport>
where
    F: Fn(&[f64]) -> f64,
{
    let numeric = solution.eval_many_with(&grid, exec)?;
    let reference: Vec<f64> = grid.iter().map(|p| exact(p)).collect();
    ErrorReport::from_values(grid, &numeric, &reference)
}

/// One-sided DFT magnitudes, wavenumbers `0..=M/2`.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    pub wavenumbers: Vec<usize>,
    pub amplitudes: Vec<f64>,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn peak(&self) -> f64 {
        self.amplitudes.iter().copied().fold(0.0, f64::max)
    }

    /// Largest wavenumber whose amplitude exceeds `floor * peak`.
    pub fn dominant_support(&self, floor: f64) -> usize {
        let cut = floor * self.peak();
        self.wavenumbers
            .iter()
            .zip(&self.amplitudes)
            .filter(|&(_, &a)| a > cut)
            .map(|(&k, _)| k)
            .max()
            .unwrap_or(0)
    }
}

/// `|X_k|` for the full DFT `X_k = sum_j x_j exp(-2 pi i jk / M)`.
pub fn dft_magnitudes(samples: &[f64]) -> Vec<f64> {
    let mut buf: Vec<Complex<f64>> = samples.iter().map(|&x| Complex::new(x, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(buf.len()).process(&mut buf);
    buf.iter().map(|c| c.norm()).collect()
}

pub fn amplitude_spectrum(samples: &[f64]) -> Result<Spectrum> {
    if samples.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "a spectrum needs at least 2 samples, got {}",
            samples.len()
        )));
    }
    let half = samples.len() / 2;
    let mut amplitudes = dft_magnitudes(samples);
    amplitudes.truncate(half + 1);
    Ok(Spectrum {
        wavenumbers: (0..=half).collect(),
        amplitudes,
    })
}

/// `M` points `lo + i (hi - lo) / M`, the right end excluded.
pub fn periodic_grid(lo: f64, hi: f64, m: usize) -> Vec<f64> {
    (0..m).map(|i| lo + (hi - lo) * i as f64 / m as f64).collect()
}

/// Largest `k` such that every bin up to `k` whose exact amplitude is above
/// [`BAND_FLOOR`] of the peak satisfies `|numeric - exact| <= rel_tol exact`;
/// `None` when bin 0 already fails.
pub fn spectrum_agreement_band(exact: &Spectrum, numeric: &Spectrum, rel_tol: f64) -> Result<Option<usize>> {
    if exact.len() != numeric.len() {
        return Err(Error::DimensionMismatch {
            expected: exact.len(),
            found: numeric.len(),
        });
    }
    let cut = BAND_FLOOR * exact.peak();
    let first_bad = exact
        .amplitudes
        .iter()
        .zip(&numeric.amplitudes)
        .position(|(&e, &n)| e > cut && (n - e).abs() > rel_tol * e);
    Ok(match first_bad {
        None => exact.wavenumbers.last().copied(),
        Some(0) => None,
        Some(i) => Some(exact.wavenumbers[i - 1]),
    })
}

/// CSV `k,exact,numeric`.
pub fn write_spectra_csv<W: Write>(mut out: W, exact: &Spectrum, numeric: &Spectrum) -> Result<()> {
    if exact.len() != numeric.len() {
        return Err(Error::DimensionMismatch {
            expected: exact.len(),
            found: numeric.len(),
        });
    }
    writeln!(out, "k,exact,numeric")?;
    for ((k, e), n) in exact.wavenumbers.iter().zip(&exact.amplitudes).zip(&numeric.amplitudes) {
        writeln!(out, "{k},{e:.16e},{n:.16e}")?;
    }
    Ok(())
}
