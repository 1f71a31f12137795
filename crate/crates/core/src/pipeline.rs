//! End-to-end solve of a linear registry problem: sample, assemble,
//! rescale, solve.

use std::time::Instant;

use crate::assembly::{assemble_system_with, BlockWeights, RowScaling};
use crate::error::Result;
use crate::geometry::SamplingStrategy;
use crate::lstsq::{solve_with, SolveOptions, SolveReport};
use crate::problems::ProblemSpec;
use crate::solution::Solution;

pub const DEFAULT_SEED: u64 = 42;

#[derive(Clone, Debug, PartialEq)]
pub struct LinearRunOptions {
    pub ladders: Vec<(i32, i32)>,
    pub n_interior: usize,
    pub n_boundary: usize,
    pub n_initial: usize,
    pub strategy: SamplingStrategy,
    pub seed: u64,
    pub weights: BlockWeights,
    pub row_scaling: RowScaling,
    pub solve: SolveOptions,
}

impl LinearRunOptions {
    /// The problem's registered defaults.
    pub fn for_problem(p: &ProblemSpec) -> Self {
        Self {
            ladders: p.ladders.clone(),
            n_interior: p.n_interior,
            n_boundary: p.n_boundary,
            n_initial: p.n_initial,
            strategy: p.strategy,
            seed: DEFAULT_SEED,
            weights: BlockWeights::default(),
            row_scaling: RowScaling::default(),
            solve: SolveOptions::default(),
        }
    }

    pub fn with_ladders(mut self, ladders: Vec<(i32, i32)>) -> Self {
        self.ladders = ladders;
        self
    }
}

#[derive(Clone, Debug)]
pub struct LinearRun {
    pub solution: Solution,
    pub report: SolveReport,
    pub rows: usize,
    pub cols: usize,
    pub assembly_seconds: f64,
    pub total_seconds: f64,
}

pub fn solve_linear(p: &ProblemSpec, opts: &LinearRunOptions) -> Result<LinearRun> {
    let start = Instant::now();
    let op = p.operator()?;
    let basis = p.basis(&opts.ladders)?;
    let colloc = p.collocation(
        opts.n_interior,
        opts.n_boundary,
        opts.n_initial,
        opts.strategy,
        opts.seed,
    )?;
    let mut system = assemble_system_with(&basis, op, &colloc, opts.weights, opts.solve.execution)?;
    system.rescale_rows(opts.row_scaling);
    let assembly_seconds = start.elapsed().as_secs_f64();
    let (weights, report) = solve_with(&system, opts.solve)?;
    Ok(LinearRun {
        solution: Solution::new(basis, weights)?,
        report,
        rows: system.rows(),
        cols: system.cols(),
        assembly_seconds,
        total_seconds: start.elapsed().as_secs_f64(),
    })
}
