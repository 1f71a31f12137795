//! Backward Euler with Picard linearization for `u_t + u u_x = eps u_xx`.
//!
//! Each Picard pass freezes the convection coefficient at the previous
//! iterate `U^k` and solves the linear collocation problem
//!
//! ```text
//! (1/dt) U^{k+1} + U^k U^{k+1}_x - eps U^{k+1}_xx = u^{n-1} / dt + f(t^n)
//! ```
//!
//! together with Dirichlet rows, in the least-squares sense. The spatial
//! points, and with them the `Theta`, `Theta'`, `Theta''` tables, are fixed
//! for the whole march; only the convection column weights and the
//! right-hand side change between passes.

use std::io::Write;
use std::time::Instant;

use crate::assembly::{Block, BlockTag, DenseMatrix, LinearSystem, RowScaling};
use crate::basis::TensorBasis;
use crate::error::{Error, Result};
use crate::geometry::{self, Geometry, Point, SamplingStrategy};
use crate::lstsq::{solve_dense, SolveMethod, SolveOptions, WeightVector};
use crate::par::{self, Execution};
use crate::pipeline::DEFAULT_SEED;
use crate::problems::{PdeKind, ProblemSpec};
use crate::solution::Solution;

#[derive(Clone, Debug, PartialEq)]
pub struct MarchConfig {
    pub dt: f64,
    pub t_end: f64,
    /// Maximum Picard passes per step, `K`.
    pub picard_iters: usize,
    pub epsilon: f64,
    pub ladder: (i32, i32),
    pub n_interior: usize,
    pub n_boundary: usize,
    /// Early exit once the sup-norm change between iterates (at the
    /// collocation points) drops below this.
    pub picard_tol: f64,
    /// Also exit once a pass fails to shrink the change: a contracting
    /// iteration only does that at its round-off floor.
    pub stop_on_stall: bool,
    pub strategy: SamplingStrategy,
    pub seed: u64,
    pub row_scaling: RowScaling,
    pub solve: SolveOptions,
}

impl MarchConfig {
    /// `dt = 0.001`, `K = 10`, the problem's ladder, counts and viscosity.
    pub fn for_problem(p: &ProblemSpec) -> Result<Self> {
        let PdeKind::Burgers { epsilon } = p.pde else {
            return Err(Error::Unsupported(format!("`{}` is linear; it needs no time march", p.name)));
        };
        let ladder = *p
            .ladders
            .first()
            .ok_or_else(|| Error::InvalidInput(format!("`{}` has no spatial ladder", p.name)))?;
        Ok(Self {
            dt: 1e-3,
            t_end: p.t_end().unwrap_or(1.0),
            picard_iters: 10,
            epsilon,
            ladder,
            n_interior: p.n_interior,
            n_boundary: p.n_boundary,
            picard_tol: 1e-10,
            stop_on_stall: true,
            strategy: p.strategy,
            seed: DEFAULT_SEED,
            row_scaling: RowScaling::default(),
            solve: SolveOptions {
                method: SolveMethod::HouseholderQr,
                ..Default::default()
            },
        })
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: String| Err(Error::Parameter(what));
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.t_end >= self.dt && self.t_end.is_finite()) {
            return bad(format!("t_end = {} must be at least dt = {}", self.t_end, self.dt));
        }
        if self.picard_iters == 0 {
            return bad("picard_iters must be at least 1".into());
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return bad(format!("epsilon must be non-negative, got {}", self.epsilon));
        }
        if !(self.picard_tol >= 0.0) {
            return bad(format!("picard_tol must be non-negative, got {}", self.picard_tol));
        }
        if self.ladder.0 > self.ladder.1 {
            return Err(Error::InvalidLadder {
                j0: self.ladder.0,
                jmax: self.ladder.1,
            });
        }
        Ok(())
    }

    /// Number of steps, `round(t_end / dt)`.
    pub fn steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }
}

/// Result of one implicit step.
#[derive(Clone, Debug, PartialEq)]
pub struct PicardOutcome {
    pub weights: WeightVector,
    /// `max_i |U^{k+1}(x_i) - U^k(x_i)|` for every pass taken.
    pub history: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub basis: TensorBasis,
    /// `n * dt`, starting at 0.
    pub times: Vec<f64>,
    pub weights_per_time: Vec<WeightVector>,
    /// Picard passes taken at each step (none for the `t = 0` entry).
    pub picard_passes: Vec<usize>,
    pub elapsed_seconds: f64,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Index of the entry at `t`, matched to within half a step.
    pub fn index_of(&self, t: f64) -> Option<usize> {
        let half = match self.times.get(1) {
            Some(dt) => 0.5 * dt,
            None => 1e-12,
        };
        self.times.iter().position(|&s| (s - t).abs() < half)
    }

    pub fn solution(&self, index: usize) -> Result<Solution> {
        let w = self.weights_per_time.get(index).ok_or_else(|| {
            Error::InvalidArgument(format!("trajectory has {} entries, asked for {index}", self.len()))
        })?;
        Solution::new(self.basis.clone(), w.clone())
    }

    pub fn values_at(&self, index: usize, grid: &[f64]) -> Result<Vec<f64>> {
        let s = self.solution(index)?;
        grid.iter().map(|&x| s.eval(&[x])).collect()
    }

    /// CSV with header `t,x,u`; every entry, or every `stride`-th one.
    pub fn write_csv<W: Write>(&self, mut out: W, grid: &[f64], stride: usize) -> Result<()> {
        writeln!(out, "t,x,u")?;
        let stride = stride.max(1);
        for i in (0..self.len()).step_by(stride) {
            let t = self.times[i];
            for (x, u) in grid.iter().zip(self.values_at(i, grid)?) {
                writeln!(out, "{t:.16e},{x:.16e},{u:.16e}")?;
            }
        }
        Ok(())
    }
}

/// Fixed spatial collocation and basis tables.
struct Tables {
    interior: Vec<Point>,
    boundary: Vec<Point>,
    theta: DenseMatrix,
    dtheta: DenseMatrix,
    ddtheta: DenseMatrix,
    theta_boundary: DenseMatrix,
}

impl Tables {
    fn new(basis: &TensorBasis, cfg: &MarchConfig, lo: f64, hi: f64) -> Result<Self> {
        let line = Geometry::interval(lo, hi)?;
        let interior = geometry::sample_interior(&line, cfg.n_interior, cfg.strategy, cfg.seed)?;
        let boundary = geometry::sample_boundary(&line, cfg.n_boundary.max(2), cfg.strategy, cfg.seed)?;
        let exec = cfg.solve.execution;
        Ok(Self {
            theta: table(basis, &interior, 0, exec)?,
            dtheta: table(basis, &interior, 1, exec)?,
            ddtheta: table(basis, &interior, 2, exec)?,
            theta_boundary: table(basis, &boundary, 0, exec)?,
            interior,
            boundary,
        })
    }

    fn cols(&self) -> usize {
        self.theta.cols()
    }
}

fn table(basis: &TensorBasis, points: &[Point], order: usize, exec: Execution) -> Result<DenseMatrix> {
    let n = basis.len();
    let mut m = DenseMatrix::zeros(points.len(), n);
    let failure = std::sync::Mutex::new(None);
    par::for_each_row(exec, m.as_mut_slice(), n, |i, row| {
        if let Err(e) = basis.tensor_row_into(&points[i], &[order], row) {
            failure.lock().expect("poisoned").get_or_insert(e);
        }
    });
    match failure.into_inner().expect("poisoned") {
        Some(e) => Err(e),
        None => Ok(m),
    }
}

/// Boundary and source data of one step, in point order.
struct StepData<'a> {
    prev_interior: &'a [f64],
    source: &'a [f64],
    dirichlet: &'a [f64],
}

/// Picard passes for one step starting from the iterate `guess`
/// (values at the interior points).
fn picard_passes(
    tables: &Tables,
    cfg: &MarchConfig,
    data: &StepData<'_>,
    guess: Vec<f64>,
    step: usize,
) -> Result<PicardOutcome> {
    let (m, n, nb) = (tables.interior.len(), tables.cols(), tables.boundary.len());
    let inv_dt = cfg.dt.recip();
    let rhs_pde: Vec<f64> = data
        .prev_interior
        .iter()
        .zip(data.source)
        .map(|(u, f)| u * inv_dt + f)
        .collect();
    let mut current = guess;
    let mut history = Vec::with_capacity(cfg.picard_iters);
    let mut weights = WeightVector::zeros(n);
    for k in 0..cfg.picard_iters {
        let mut matrix = DenseMatrix::zeros(m + nb, n);
        {
            let (th, dth, ddth) = (tables.theta.as_slice(), tables.dtheta.as_slice(), tables.ddtheta.as_slice());
            let conv = &current;
            par::for_each_row(cfg.solve.execution, &mut matrix.as_mut_slice()[..m * n], n, |i, row| {
                let span = i * n..(i + 1) * n;
                for (((r, a), b), c) in row.iter_mut().zip(&th[span.clone()]).zip(&dth[span.clone()]).zip(&ddth[span]) {
                    *r = a * inv_dt + conv[i] * b - cfg.epsilon * c;
                }
            });
        }
        matrix.as_mut_slice()[m * n..].copy_from_slice(tables.theta_boundary.as_slice());
        let mut rhs = rhs_pde.clone();
        rhs.extend_from_slice(data.dirichlet);
        let mut system = LinearSystem {
            matrix,
            rhs,
            blocks: vec![
                Block {
                    tag: BlockTag::Pde,
                    rows: 0..m,
                },
                Block {
                    tag: BlockTag::Boundary,
                    rows: m..m + nb,
                },
            ],
        };
        system.rescale_rows(cfg.row_scaling);
        let (w, _) = solve_dense(&system.matrix, &system.rhs, cfg.solve).map_err(|e| match e {
            Error::Solver(_) | Error::InvalidInput(_) => Error::Divergence { step, iteration: k },
            other => other,
        })?;
        let next = tables.theta.mul_vec(&w.values)?;
        if next.iter().any(|v| !v.is_finite()) {
            return Err(Error::Divergence { step, iteration: k });
        }
        let change = next
            .iter()
            .zip(&current)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let stalled = cfg.stop_on_stall && history.last().is_some_and(|&prev| change >= prev);
        history.push(change);
        current = next;
        weights = w;
        if change < cfg.picard_tol || stalled {
            break;
        }
    }
    Ok(PicardOutcome { weights, history })
}

fn spatial_bounds(p: &ProblemSpec) -> Result<(f64, f64)> {
    match &p.geometry {
        Geometry::BoxTime { space, .. } if space.len() == 1 => Ok(space[0]),
        g => Err(Error::Unsupported(format!(
            "time marching needs one spatial axis plus time, `{}` has geometry {g:?}",
            p.name
        ))),
    }
}

fn step_data(
    p: &ProblemSpec,
    tables: &Tables,
    t: f64,
) -> (Vec<f64>, Vec<f64>) {
    let source = tables.interior.iter().map(|x| (p.source)(&[x[0], t])).collect();
    let dirichlet = tables.boundary.iter().map(|x| (p.dirichlet)(&[x[0], t])).collect();
    (source, dirichlet)
}

/// One backward Euler step from `prev` to `t`, with `U^0 = u^{n-1}`.
pub fn picard_step(prev: &Solution, p: &ProblemSpec, cfg: &MarchConfig, t: f64) -> Result<PicardOutcome> {
    picard_step_from(prev, None, p, cfg, t)
}

/// As [`picard_step`], with the first convection coefficient taken from
/// `guess` instead of `prev`.
pub fn picard_step_from(
    prev: &Solution,
    guess: Option<&Solution>,
    p: &ProblemSpec,
    cfg: &MarchConfig,
    t: f64,
) -> Result<PicardOutcome> {
    cfg.validate()?;
    let (lo, hi) = spatial_bounds(p)?;
    let basis = p.spatial_basis(&[cfg.ladder])?;
    let tables = Tables::new(&basis, cfg, lo, hi)?;
    let prev_interior = prev.eval_many_with(&tables.interior, cfg.solve.execution)?;
    let start = match guess {
        Some(g) => g.eval_many_with(&tables.interior, cfg.solve.execution)?,
        None => prev_interior.clone(),
    };
    let (source, dirichlet) = step_data(p, &tables, t);
    let data = StepData {
        prev_interior: &prev_interior,
        source: &source,
        dirichlet: &dirichlet,
    };
    picard_passes(&tables, cfg, &data, start, 1)
}

/// Least-squares fit of `h0` at the interior and boundary points.
fn project_initial(p: &ProblemSpec, tables: &Tables, cfg: &MarchConfig) -> Result<WeightVector> {
    let h0 = p
        .initial
        .as_ref()
        .ok_or_else(|| Error::InvalidInput(format!("`{}` has no initial condition", p.name)))?;
    let (m, nb, n) = (tables.interior.len(), tables.boundary.len(), tables.cols());
    let mut data = Vec::with_capacity((m + nb) * n);
    data.extend_from_slice(tables.theta.as_slice());
    data.extend_from_slice(tables.theta_boundary.as_slice());
    let matrix = DenseMatrix::from_row_major(m + nb, n, data)?;
    let rhs: Vec<f64> = tables
        .interior
        .iter()
        .chain(&tables.boundary)
        .map(|x| h0(&[x[0], 0.0]))
        .collect();
    let mut system = LinearSystem {
        matrix,
        rhs,
        blocks: Vec::new(),
    };
    system.rescale_rows(cfg.row_scaling);
    Ok(solve_dense(&system.matrix, &system.rhs, cfg.solve)?.0)
}

/// Marches `p` from its projected initial condition to `cfg.t_end`.
pub fn march(p: &ProblemSpec, cfg: &MarchConfig) -> Result<Trajectory> {
    march_observed(p, cfg, |_, _, _| {})
}

/// As [`march`], calling `observe(step, t, passes)` after every step.
pub fn march_observed<F>(p: &ProblemSpec, cfg: &MarchConfig, mut observe: F) -> Result<Trajectory>
where
    F: FnMut(usize, f64, usize),
{
    if !p.is_nonlinear() {
        return Err(Error::Unsupported(format!(
            "`{}` is linear; solve it with the space-time collocation instead",
            p.name
        )));
    }
    cfg.validate()?;
    let clock = Instant::now();
    let (lo, hi) = spatial_bounds(p)?;
    let basis = p.spatial_basis(&[cfg.ladder])?;
    let tables = Tables::new(&basis, cfg, lo, hi)?;
    let steps = cfg.steps();

    let w0 = project_initial(p, &tables, cfg)?;
    let mut prev = tables.theta.mul_vec(&w0.values)?;
    let mut times = Vec::with_capacity(steps + 1);
    let mut weights_per_time = Vec::with_capacity(steps + 1);
    let mut picard_passes_taken = Vec::with_capacity(steps + 1);
    times.push(0.0);
    weights_per_time.push(w0);
    picard_passes_taken.push(0);

    for step in 1..=steps {
        let t = step as f64 * cfg.dt;
        let (source, dirichlet) = step_data(p, &tables, t);
        let data = StepData {
            prev_interior: &prev,
            source: &source,
            dirichlet: &dirichlet,
        };
        let out = picard_passes(&tables, cfg, &data, prev.clone(), step)?;
        prev = tables.theta.mul_vec(&out.weights.values)?;
        observe(step, t, out.history.len());
        times.push(t);
        picard_passes_taken.push(out.history.len());
        weights_per_time.push(out.weights);
    }
    Ok(Trajectory {
        basis,
        times,
        weights_per_time,
        picard_passes: picard_passes_taken,
        elapsed_seconds: clock.elapsed().as_secs_f64(),
    })
}
