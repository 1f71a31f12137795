//! Linear differential operators as sums of coefficient-weighted partial
//! derivatives.

use std::fmt;
use std::sync::Arc;

use crate::basis::MAX_ORDER;
use crate::error::{Error, Result};

/// Scalar field over points of the domain.
pub type PointFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

pub fn point_fn<F>(f: F) -> PointFn
where
    F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
{
    Arc::new(f)
}

#[derive(Clone)]
pub enum Coefficient {
    Constant(f64),
    /// Point-dependent coefficient; may capture frozen state such as a
    /// previous iterate.
    Field(PointFn),
}

impl Coefficient {
    #[inline]
    pub fn at(&self, p: &[f64]) -> f64 {
        match self {
            Coefficient::Constant(c) => *c,
            Coefficient::Field(f) => f(p),
        }
    }

    fn scaled(&self, alpha: f64) -> Coefficient {
        match self {
            Coefficient::Constant(c) => Coefficient::Constant(alpha * c),
            Coefficient::Field(f) => {
                let f = Arc::clone(f);
                Coefficient::Field(Arc::new(move |p| alpha * f(p)))
            }
        }
    }
}

impl fmt::Debug for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficient::Constant(c) => write!(f, "Constant({c})"),
            Coefficient::Field(_) => f.write_str("Field(..)"),
        }
    }
}

impl From<PointFn> for Coefficient {
    fn from(f: PointFn) -> Self {
        Coefficient::Field(f)
    }
}

impl From<f64> for Coefficient {
    fn from(c: f64) -> Self {
        Coefficient::Constant(c)
    }
}

/// `coefficient(x) * d^{orders} / dx^{orders}`.
#[derive(Clone, Debug)]
pub struct Term {
    pub coefficient: Coefficient,
    pub orders: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct LinearOperator {
    dim: usize,
    terms: Vec<Term>,
}

impl LinearOperator {
    pub fn new(dim: usize, terms: Vec<Term>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidArgument("an operator needs at least one term".into()));
        }
        for t in &terms {
            if t.orders.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: t.orders.len(),
                });
            }
        }
        Ok(Self { dim, terms })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            terms: vec![Term {
                coefficient: Coefficient::Constant(1.0),
                orders: vec![0; dim],
            }],
        }
    }

    /// Single-term operator `coefficient * d^{orders}`.
    pub fn derivative(orders: Vec<usize>, coefficient: impl Into<Coefficient>) -> Self {
        Self {
            dim: orders.len(),
            terms: vec![Term {
                coefficient: coefficient.into(),
                orders,
            }],
        }
    }

    /// Appends `coefficient * d^{orders}`.
    pub fn with_term(mut self, orders: Vec<usize>, coefficient: impl Into<Coefficient>) -> Result<Self> {
        if orders.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: orders.len(),
            });
        }
        self.terms.push(Term {
            coefficient: coefficient.into(),
            orders,
        });
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn max_order(&self) -> usize {
        self.terms
            .iter()
            .flat_map(|t| t.orders.iter().copied())
            .max()
            .unwrap_or(0)
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        Self {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    coefficient: t.coefficient.scaled(alpha),
                    orders: t.orders.clone(),
                })
                .collect(),
        }
    }

    /// Sum of two operators on the same dimension.
    pub fn plus(&self, other: &LinearOperator) -> Result<Self> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Ok(Self {
            dim: self.dim,
            terms,
        })
    }

    pub(crate) fn check_orders(&self) -> Result<()> {
        match self.terms.iter().flat_map(|t| t.orders.iter()).find(|&&o| o > MAX_ORDER) {
            Some(&o) => Err(Error::UnsupportedOrder(o)),
            None => Ok(()),
        }
    }

    /// Applies the operator to a function given through its partial
    /// derivatives, `derivs(p, orders)`.
    pub fn apply<F>(&self, p: &[f64], derivs: F) -> f64
    where
        F: Fn(&[f64], &[usize]) -> f64,
    {
        self.terms
            .iter()
            .map(|t| t.coefficient.at(p) * derivs(p, &t.orders))
            .sum()
    }
}
