//! Shannon multiresolution basis on an interval and its tensor products.
//!
//! A one-dimensional ladder holds the scaling functions of the coarsest
//! level `j0` followed by the wavelets of every level `j0..=jmax`. Each
//! function lives on `[lo, hi]` through the affine map `s = 2^j (x - lo) / L - k`
//! with `L = hi - lo`:
//!
//! ```text
//! phi_{j,k}(x) = 2^{j/2} sinc(s)
//! psi_{j,k}(x) = 2^{j/2} sinc(s / 2) cos(3 pi s / 2)
//! ```
//!
//! Derivatives up to second order are available in closed form.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Highest derivative order supported by every evaluation routine.
pub const MAX_ORDER: usize = 2;

/// Below this `|u|` the sinc derivatives switch to their Maclaurin series.
///
/// The closed forms of the first and second derivative lose roughly
/// `eps / u^2` relative accuracy to cancellation, so the switch sits where
/// both branches are good to ~1e-14.
pub const SINC_SERIES_THRESHOLD: f64 = 0.1;

const SERIES_TERMS: usize = 8;

/// Order-th derivative of the normalized sinc, `sin(pi u) / (pi u)`.
pub fn sinc_deriv(u: f64, order: usize) -> Result<f64> {
    check_order(order)?;
    Ok(sinc_deriv_unchecked(u, order))
}

#[inline]
pub(crate) fn sinc_deriv_unchecked(u: f64, order: usize) -> f64 {
    if u.abs() < SINC_SERIES_THRESHOLD {
        sinc_series(u, order)
    } else {
        sinc_closed(u, order)
    }
}

/// Maclaurin series of sinc and its derivatives.
///
/// `sinc(u) = sum_n (-1)^n (pi u)^{2n} / (2n+1)!`, differentiated term by term.
pub(crate) fn sinc_series(u: f64, order: usize) -> f64 {
    let mut sum = 0.0;
    // a_n = (-1)^n pi^{2n} / (2n+1)!
    let mut a = 1.0;
    for n in 0..SERIES_TERMS {
        let p = (2 * n) as i32;
        sum += match order {
            0 => a * u.powi(p),
            1 if n > 0 => a * p as f64 * u.powi(p - 1),
            2 if n > 0 => a * (p * (p - 1)) as f64 * u.powi(p - 2),
            _ => 0.0,
        };
        a *= -PI * PI / ((p + 2) * (p + 3)) as f64;
    }
    sum
}

pub(crate) fn sinc_closed(u: f64, order: usize) -> f64 {
    let a = PI * u;
    let (s, c) = a.sin_cos();
    match order {
        0 => s / a,
        1 => (a * c - s) / (PI * u * u),
        _ => (-a * a * s - 2.0 * a * c + 2.0 * s) / (PI * u * u * u),
    }
}

fn check_order(order: usize) -> Result<()> {
    if order > MAX_ORDER {
        Err(Error::UnsupportedOrder(order))
    } else {
        Ok(())
    }
}

fn check_interval(lo: f64, hi: f64) -> Result<()> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidArgument(format!(
            "interval [{lo}, {hi}] must satisfy lo < hi"
        )));
    }
    Ok(())
}

#[inline]
fn level_scale(j: i32) -> f64 {
    2f64.powi(j)
}

/// Number of shifts available at level `j`: `ceil(2^j) + 1`.
pub fn node_count(j: i32) -> usize {
    level_scale(j).ceil() as usize + 1
}

/// Order-th derivative of the scaling function `phi_{j,k}` on `[lo, hi]`.
pub fn scaling_eval(j: i32, k: i64, x: f64, lo: f64, hi: f64, order: usize) -> Result<f64> {
    check_order(order)?;
    check_interval(lo, hi)?;
    Ok(scaling_unchecked(j, k as f64, x, lo, hi - lo, order))
}

/// Order-th derivative of the wavelet `psi_{j,k}` on `[lo, hi]`.
pub fn wavelet_eval(j: i32, k: i64, x: f64, lo: f64, hi: f64, order: usize) -> Result<f64> {
    check_order(order)?;
    check_interval(lo, hi)?;
    Ok(wavelet_unchecked(j, k as f64, x, lo, hi - lo, order))
}

#[inline]
fn scaling_unchecked(j: i32, k: f64, x: f64, lo: f64, len: f64, order: usize) -> f64 {
    let scale = level_scale(j);
    let chain = scale / len;
    let s = chain * (x - lo) - k;
    scale.sqrt() * sinc_deriv_unchecked(s, order) * chain.powi(order as i32)
}

#[inline]
fn wavelet_unchecked(j: i32, k: f64, x: f64, lo: f64, len: f64, order: usize) -> f64 {
    let scale = level_scale(j);
    let chain = scale / len;
    let s = chain * (x - lo) - k;
    scale.sqrt() * wavelet_profile(s, order) * chain.powi(order as i32)
}

/// Derivatives of `g(s) = sinc(s/2) cos(3 pi s / 2)` with respect to `s`.
#[inline]
fn wavelet_profile(s: f64, order: usize) -> f64 {
    let h = 0.5 * s;
    let w = 1.5 * PI;
    let (sn, cs) = (w * s).sin_cos();
    match order {
        0 => sinc_deriv_unchecked(h, 0) * cs,
        1 => 0.5 * sinc_deriv_unchecked(h, 1) * cs - w * sinc_deriv_unchecked(h, 0) * sn,
        _ => {
            0.25 * sinc_deriv_unchecked(h, 2) * cs
                - w * sinc_deriv_unchecked(h, 1) * sn
                - w * w * sinc_deriv_unchecked(h, 0) * cs
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BasisKind {
    Scaling,
    Wavelet,
}

/// One member of a ladder: kind, resolution level and shift.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BasisIndex {
    pub kind: BasisKind,
    pub level: i32,
    pub shift: usize,
}

/// Scaling functions at `j0` plus wavelets at `j0..=jmax` on one interval.
#[derive(Clone, Debug, PartialEq)]
pub struct Basis1D {
    lo: f64,
    hi: f64,
    j0: i32,
    jmax: i32,
    indices: Vec<BasisIndex>,
}

/// Enumerate the ladder from `j0` to `jmax` on `[lo, hi]`.
pub fn build_ladder(j0: i32, jmax: i32, lo: f64, hi: f64) -> Result<Basis1D> {
    Basis1D::new(j0, jmax, lo, hi)
}

impl Basis1D {
    pub fn new(j0: i32, jmax: i32, lo: f64, hi: f64) -> Result<Self> {
        if j0 > jmax {
            return Err(Error::InvalidLadder { j0, jmax });
        }
        check_interval(lo, hi)?;
        // keeps 2^j and 2^-j exact in usize and f64
        if jmax > 24 || j0 < -60 {
            return Err(Error::InvalidArgument(format!(
                "ladder levels {j0}..={jmax} are out of range"
            )));
        }
        let mut indices = Vec::new();
        indices.extend((0..node_count(j0)).map(|shift| BasisIndex {
            kind: BasisKind::Scaling,
            level: j0,
            shift,
        }));
        for level in j0..=jmax {
            indices.extend((0..node_count(level)).map(|shift| BasisIndex {
                kind: BasisKind::Wavelet,
                level,
                shift,
            }));
        }
        Ok(Self {
            lo,
            hi,
            j0,
            jmax,
            indices,
        })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn j0(&self) -> i32 {
        self.j0
    }

    pub fn jmax(&self) -> i32 {
        self.jmax
    }

    pub fn indices(&self) -> &[BasisIndex] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Order-th derivative of a single ladder member at `x`.
    pub fn eval_index(&self, index: &BasisIndex, x: f64, order: usize) -> Result<f64> {
        check_order(order)?;
        Ok(self.eval_index_unchecked(index, x, order))
    }

    #[inline]
    fn eval_index_unchecked(&self, index: &BasisIndex, x: f64, order: usize) -> f64 {
        let len = self.hi - self.lo;
        let k = index.shift as f64;
        match index.kind {
            BasisKind::Scaling => scaling_unchecked(index.level, k, x, self.lo, len, order),
            BasisKind::Wavelet => wavelet_unchecked(index.level, k, x, self.lo, len, order),
        }
    }

    /// `Theta(x)` (or its derivative) in ladder order.
    pub fn eval_row(&self, x: f64, order: usize) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.len()];
        self.eval_row_into(x, order, &mut out)?;
        Ok(out)
    }

    pub fn eval_row_into(&self, x: f64, order: usize, out: &mut [f64]) -> Result<()> {
        check_order(order)?;
        if out.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: out.len(),
            });
        }
        for (slot, index) in out.iter_mut().zip(&self.indices) {
            *slot = self.eval_index_unchecked(index, x, order);
        }
        Ok(())
    }
}

/// Tensor product of per-axis ladders, ordered row-major over index tuples.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorBasis {
    axes: Vec<Basis1D>,
}

impl TensorBasis {
    pub fn new(axes: Vec<Basis1D>) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::InvalidArgument(
                "a tensor basis needs at least one axis".into(),
            ));
        }
        Ok(Self { axes })
    }

    pub fn axes(&self) -> &[Basis1D] {
        &self.axes
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(Basis1D::len).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Per-axis sizes, in axis order.
    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(Basis1D::len).collect()
    }

    pub fn tensor_row(&self, point: &[f64], orders: &[usize]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.len()];
        self.tensor_row_into(point, orders, &mut out)?;
        Ok(out)
    }

    pub fn tensor_row_into(&self, point: &[f64], orders: &[usize], out: &mut [f64]) -> Result<()> {
        self.check_point(point, orders)?;
        if out.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: out.len(),
            });
        }
        let rows = self
            .axes
            .iter()
            .zip(point.iter().zip(orders))
            .map(|(axis, (&x, &order))| axis.eval_row(x, order))
            .collect::<Result<Vec<_>>>()?;
        kron_into(&rows, out);
        Ok(())
    }

    pub(crate) fn check_point(&self, point: &[f64], orders: &[usize]) -> Result<()> {
        if point.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: point.len(),
            });
        }
        if orders.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: orders.len(),
            });
        }
        if let Some(&bad) = orders.iter().find(|&&o| o > MAX_ORDER) {
            return Err(Error::UnsupportedOrder(bad));
        }
        Ok(())
    }
}

/// Row-major Kronecker product of the given vectors, written into `out`.
pub(crate) fn kron_into(rows: &[Vec<f64>], out: &mut [f64]) {
    debug_assert_eq!(out.len(), rows.iter().map(Vec::len).product::<usize>());
    let mut filled = 1;
    out[0] = 1.0;
    for row in rows {
        let n = row.len();
        // expand in place from the back so earlier entries are still intact
        for i in (0..filled).rev() {
            let base = out[i];
            for (k, &r) in row.iter().enumerate().rev() {
                out[i * n + k] = base * r;
            }
        }
        filled *= n;
    }
}

/// Contract row-major weights against one row per axis: `sum w[i1..id] r1[i1]..rd[id]`.
pub(crate) fn contract(weights: &[f64], rows: &[Vec<f64>]) -> f64 {
    let mut current: Vec<f64>;
    let mut view: &[f64] = weights;
    let mut owned = None;
    for row in rows.iter().rev() {
        let n = row.len();
        current = view
            .chunks_exact(n)
            .map(|chunk| chunk.iter().zip(row).map(|(a, b)| a * b).sum())
            .collect();
        owned = Some(current);
        view = owned.as_deref().unwrap();
    }
    match owned {
        Some(v) => v[0],
        None => weights[0],
    }
}
