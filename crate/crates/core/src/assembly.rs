//! Collocation sets and assembly of the stacked least-squares system
//! `[A; B; C] U = [F; G; H]`.

use std::ops::Range;

use faer::MatRef;

use crate::basis::{kron_into, TensorBasis};
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::operator::LinearOperator;
use crate::par::{self, Execution};

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    found: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn as_faer(&self) -> MatRef<'_, f64> {
        MatRef::from_row_major_slice(&self.data, self.rows, self.cols)
    }

    /// `M x`.
    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: x.len(),
            });
        }
        Ok(self
            .data
            .chunks_exact(self.cols.max(1))
            .take(self.rows)
            .map(|r| r.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// `M^T y`.
    pub fn tr_mul_vec(&self, y: &[f64]) -> Result<Vec<f64>> {
        if y.len() != self.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                found: y.len(),
            });
        }
        let mut out = vec![0.0; self.cols];
        for (i, &yi) in y.iter().enumerate() {
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += a * yi;
            }
        }
        Ok(out)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
pub enum BlockTag {
    Pde,
    Boundary,
    Initial,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Block {
    pub tag: BlockTag,
    pub rows: Range<usize>,
}

/// Collocation points with their target values.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CollocationSet {
    pub interior: Vec<Point>,
    pub source: Vec<f64>,
    pub boundary: Vec<Point>,
    pub dirichlet: Vec<f64>,
    pub initial: Vec<Point>,
    pub initial_values: Vec<f64>,
}

impl CollocationSet {
    pub fn validate(&self) -> Result<()> {
        for (pts, vals) in [
            (&self.interior, &self.source),
            (&self.boundary, &self.dirichlet),
            (&self.initial, &self.initial_values),
        ] {
            if pts.len() != vals.len() {
                return Err(Error::DimensionMismatch {
                    expected: pts.len(),
                    found: vals.len(),
                });
            }
        }
        Ok(())
    }

    pub fn total(&self) -> usize {
        self.interior.len() + self.boundary.len() + self.initial.len()
    }
}

/// Per-block row scaling; every block defaults to weight 1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlockWeights {
    pub pde: f64,
    pub boundary: f64,
    pub initial: f64,
}

impl Default for BlockWeights {
    fn default() -> Self {
        Self {
            pde: 1.0,
            boundary: 1.0,
            initial: 1.0,
        }
    }
}

/// Left scaling applied to a system before it is solved.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize)]
pub enum RowScaling {
    /// Solve the rows as assembled.
    None,
    /// Divide each row and its right-hand side by the row's Euclidean norm.
    #[default]
    UnitNorm,
}

impl std::str::FromStr for RowScaling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Self::None),
            "unit_norm" | "unit" => Ok(Self::UnitNorm),
            other => Err(Error::Parameter(format!("unknown row scaling `{other}`"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct LinearSystem {
    pub matrix: DenseMatrix,
    pub rhs: Vec<f64>,
    pub blocks: Vec<Block>,
}

impl LinearSystem {
    pub fn rows(&self) -> usize {
        self.matrix.rows()
    }

    pub fn cols(&self) -> usize {
        self.matrix.cols()
    }

    pub fn block(&self, tag: BlockTag) -> Option<&Block> {
        self.blocks.iter().find(|b| b.tag == tag)
    }

    /// Applies `scaling` in place and returns the factor each row was
    /// multiplied by. All-zero rows are left alone.
    pub fn rescale_rows(&mut self, scaling: RowScaling) -> Vec<f64> {
        let n = self.cols();
        let mut factors = vec![1.0; self.rows()];
        if scaling == RowScaling::None || n == 0 {
            return factors;
        }
        for ((row, b), f) in self
            .matrix
            .as_mut_slice()
            .chunks_exact_mut(n)
            .zip(self.rhs.iter_mut())
            .zip(factors.iter_mut())
        {
            let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > 0.0 && norm.is_finite() {
                *f = norm.recip();
                row.iter_mut().for_each(|v| *v /= norm);
                *b /= norm;
            }
        }
        factors
    }
}

/// Rows `sum_t coeff_t(x_i) * d^{orders_t} Theta(x_i)` for every point.
pub fn assemble_block(basis: &TensorBasis, op: &LinearOperator, points: &[Point]) -> Result<DenseMatrix> {
    assemble_block_with(basis, op, points, Execution::default())
}

pub fn assemble_block_with(
    basis: &TensorBasis,
    op: &LinearOperator,
    points: &[Point],
    exec: Execution,
) -> Result<DenseMatrix> {
    let mut m = DenseMatrix::zeros(points.len(), basis.len());
    fill_operator_rows(basis, op, points, 1.0, exec, m.as_mut_slice())?;
    Ok(m)
}

fn check_operator(basis: &TensorBasis, op: &LinearOperator, points: &[Point]) -> Result<()> {
    op.check_orders()?;
    if op.dim() != basis.dim() {
        return Err(Error::DimensionMismatch {
            expected: basis.dim(),
            found: op.dim(),
        });
    }
    if let Some(p) = points.iter().find(|p| p.len() != basis.dim()) {
        return Err(Error::DimensionMismatch {
            expected: basis.dim(),
            found: p.len(),
        });
    }
    Ok(())
}

fn fill_operator_rows(
    basis: &TensorBasis,
    op: &LinearOperator,
    points: &[Point],
    weight: f64,
    exec: Execution,
    out: &mut [f64],
) -> Result<()> {
    check_operator(basis, op, points)?;
    let n = basis.len();
    let dim = basis.dim();
    par::for_each_row(exec, out, n, |i, row| {
        let p = &points[i];
        // per-axis rows for each derivative order any term asks for
        let mut cache: Vec<[Option<Vec<f64>>; 3]> = vec![[None, None, None]; dim];
        for term in op.terms() {
            for (a, &o) in term.orders.iter().enumerate() {
                if cache[a][o].is_none() {
                    let axis = &basis.axes()[a];
                    let mut r = vec![0.0; axis.len()];
                    axis.eval_row_into(p[a], o, &mut r).expect("orders checked above");
                    cache[a][o] = Some(r);
                }
            }
        }
        let mut scratch = vec![0.0; n];
        row.fill(0.0);
        for term in op.terms() {
            let c = weight * term.coefficient.at(p);
            let factors: Vec<Vec<f64>> = term
                .orders
                .iter()
                .enumerate()
                .map(|(a, &o)| cache[a][o].clone().expect("filled above"))
                .collect();
            kron_into(&factors, &mut scratch);
            for (r, s) in row.iter_mut().zip(&scratch) {
                *r += c * s;
            }
        }
    });
    Ok(())
}

/// Stacks PDE rows, Dirichlet rows and (if any) initial rows with their
/// right-hand sides.
pub fn assemble_system(basis: &TensorBasis, op: &LinearOperator, colloc: &CollocationSet) -> Result<LinearSystem> {
    assemble_system_with(basis, op, colloc, BlockWeights::default(), Execution::default())
}

pub fn assemble_system_with(
    basis: &TensorBasis,
    op: &LinearOperator,
    colloc: &CollocationSet,
    weights: BlockWeights,
    exec: Execution,
) -> Result<LinearSystem> {
    colloc.validate()?;
    if colloc.interior.is_empty() {
        return Err(Error::InvalidArgument(
            "a system needs at least one interior collocation point".into(),
        ));
    }
    let n = basis.len();
    let rows = colloc.total();
    let mut matrix = DenseMatrix::zeros(rows, n);
    let mut rhs = Vec::with_capacity(rows);
    let mut blocks = Vec::new();
    let identity = LinearOperator::identity(basis.dim());

    let mut start = 0;
    let parts = [
        (BlockTag::Pde, op, &colloc.interior, &colloc.source, weights.pde),
        (BlockTag::Boundary, &identity, &colloc.boundary, &colloc.dirichlet, weights.boundary),
        (BlockTag::Initial, &identity, &colloc.initial, &colloc.initial_values, weights.initial),
    ];
    for (tag, block_op, points, values, w) in parts {
        if points.is_empty() {
            continue;
        }
        let end = start + points.len();
        let slice = &mut matrix.as_mut_slice()[start * n..end * n];
        fill_operator_rows(basis, block_op, points, w, exec, slice)?;
        rhs.extend(values.iter().map(|v| w * v));
        blocks.push(Block { tag, rows: start..end });
        start = end;
    }
    Ok(LinearSystem { matrix, rhs, blocks })
}
