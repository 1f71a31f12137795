//! Physics-informed multiresolution wavelet collocation.
//!
//! The unknown field is expanded in a Shannon scaling/wavelet ladder (a
//! single hidden layer whose activations are fixed), the expansion is
//! substituted into the PDE and its boundary/initial conditions at
//! collocation points, and the outer weights come from one dense
//! least-squares solve. Nonlinear problems (Burgers) march in time with
//! backward Euler and Picard linearization.

pub mod analysis;
pub mod assembly;
pub mod basis;
pub mod cli;
pub mod config;
pub mod error;
pub mod geometry;
pub mod lstsq;
pub mod operator;
pub mod par;
pub mod pipeline;
pub mod problems;
pub mod reference;
pub mod solution;
pub mod timestepper;

pub use assembly::{assemble_block, assemble_system, BlockTag, CollocationSet, DenseMatrix, LinearSystem, RowScaling};
pub use basis::{build_ladder, Basis1D, BasisIndex, BasisKind, TensorBasis};
pub use error::{Error, Result};
pub use geometry::{Geometry, Point, SamplingStrategy};
pub use lstsq::{solve, SolveReport, WeightVector};
pub use operator::{Coefficient, LinearOperator, PointFn};
pub use par::Execution;
pub use problems::{make_problem, ProblemSpec, REGISTRY};
pub use solution::Solution;
