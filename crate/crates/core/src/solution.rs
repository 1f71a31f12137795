//! A basis together with trained weights, evaluable anywhere.

use crate::basis::{contract, TensorBasis};
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::lstsq::WeightVector;
use crate::par::{self, Execution};

#[derive(Clone, Debug)]
pub struct Solution {
    basis: TensorBasis,
    weights: WeightVector,
}

impl Solution {
    pub fn new(basis: TensorBasis, weights: WeightVector) -> Result<Self> {
        if weights.len() != basis.len() {
            return Err(Error::DimensionMismatch {
                expected: basis.len(),
                found: weights.len(),
            });
        }
        Ok(Self { basis, weights })
    }

    pub fn basis(&self) -> &TensorBasis {
        &self.basis
    }

    pub fn weights(&self) -> &WeightVector {
        &self.weights
    }

    /// `d^{orders} u(point)`.
    pub fn eval_deriv(&self, point: &[f64], orders: &[usize]) -> Result<f64> {
        self.basis.check_point(point, orders)?;
        let rows = self
            .basis
            .axes()
            .iter()
            .zip(point.iter().zip(orders))
            .map(|(axis, (&x, &o))| axis.eval_row(x, o))
            .collect::<Result<Vec<_>>>()?;
        Ok(contract(&self.weights.values, &rows))
    }

    pub fn eval(&self, point: &[f64]) -> Result<f64> {
        self.eval_deriv(point, &vec![0; self.basis.dim()])
    }

    pub fn eval_many(&self, points: &[Point]) -> Result<Vec<f64>> {
        self.eval_many_with(points, Execution::default())
    }

    pub fn eval_many_with(&self, points: &[Point], exec: Execution) -> Result<Vec<f64>> {
        par::map(exec, points, |p| self.eval(p)).into_iter().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::build_ladder;
    use approx::assert_relative_eq;

    #[test]
    fn evaluation_matches_tensor_row_dot_weights() {
        let basis = TensorBasis::new(vec![
            build_ladder(0, 1, 0.0, 1.0).unwrap(),
            build_ladder(-1, 1, -1.0, 1.0).unwrap(),
        ])
        .unwrap();
        let w: Vec<f64> = (0..basis.len()).map(|i| ((i * 37) % 11) as f64 - 5.0).collect();
        let sol = Solution::new(basis.clone(), WeightVector::new(w.clone())).unwrap();
        for orders in [[0, 0], [1, 0], [0, 2], [2, 1]] {
            let p = [0.3, -0.4];
            let row = basis.tensor_row(&p, &orders).unwrap();
            let direct: f64 = row.iter().zip(&w).map(|(a, b)| a * b).sum();
            assert_relative_eq!(sol.eval_deriv(&p, &orders).unwrap(), direct, max_relative = 1e-12);
        }
        assert!(Solution::new(basis, WeightVector::zeros(3)).is_err());
    }
}
