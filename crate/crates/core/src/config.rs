//! Run configuration: a flat `key = value` file with dotted sections.
//!
//! ```text
//! # diffusion at the coarse ladder
//! problem.name = diff1d
//! problem.v = 0.25            # any other problem.* key is a parameter override
//! ladder.x = 0, 3             # one line per axis: x, y, t
//! sampling.interior = 100
//! sampling.boundary = 2
//! sampling.initial = 0
//! sampling.strategy = cell    # grid | cell | random
//! sampling.seed = 42
//! solver.method = svd         # svd | qr
//! solver.rcond = 1e-14
//! solver.row_scaling = unit_norm
//! solver.execution = parallel
//! weights.pde = 1
//! march.dt = 0.001
//! march.t_end = 1
//! march.picard_iters = 10
//! march.picard_tol = 1e-10
//! march.stop_on_stall = true
//! output.dir = diff1d_coarse
//! output.grid = 1000          # evaluation points per axis
//! output.spectrum_points = 4096
//! output.trajectory_stride = 50
//! ```
//!
//! Unset keys fall back to the problem's registered defaults.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::assembly::{BlockWeights, RowScaling};
use crate::error::{Error, Result};
use crate::geometry::{Geometry, SamplingStrategy};
use crate::lstsq::{SolveMethod, SolveOptions};
use crate::par::Execution;
use crate::pipeline::{LinearRunOptions, DEFAULT_SEED};
use crate::problems::{make_problem, Overrides, ProblemSpec};
use crate::timestepper::MarchConfig;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct MarchOverrides {
    pub dt: Option<f64>,
    pub t_end: Option<f64>,
    pub picard_iters: Option<usize>,
    pub picard_tol: Option<f64>,
    pub stop_on_stall: Option<bool>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub problem: String,
    pub overrides: Overrides,
    /// Per-axis ladder overrides, keyed by axis name.
    pub ladders: BTreeMap<String, (i32, i32)>,
    pub n_interior: Option<usize>,
    pub n_boundary: Option<usize>,
    pub n_initial: Option<usize>,
    pub strategy: Option<SamplingStrategy>,
    pub seed: u64,
    pub method: Option<SolveMethod>,
    pub rcond: Option<f64>,
    pub row_scaling: RowScaling,
    pub execution: Execution,
    pub weights: BlockWeights,
    pub march: MarchOverrides,
    pub output_dir: Option<PathBuf>,
    pub grid_points: Option<usize>,
    pub spectrum_points: usize,
    pub trajectory_stride: usize,
}

impl RunConfig {
    pub fn new(problem: &str) -> Self {
        Self {
            problem: problem.to_string(),
            overrides: Overrides::new(),
            ladders: BTreeMap::new(),
            n_interior: None,
            n_boundary: None,
            n_initial: None,
            strategy: None,
            seed: DEFAULT_SEED,
            method: None,
            rcond: None,
            row_scaling: RowScaling::default(),
            execution: Execution::default(),
            weights: BlockWeights::default(),
            march: MarchOverrides::default(),
            output_dir: None,
            grid_points: None,
            spectrum_points: 4096,
            trajectory_stride: 50,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut entries: BTreeMap<String, (usize, String)> = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`, got `{line}`", n + 1)))?;
            let (key, value) = (key.trim().to_string(), value.trim().to_string());
            if key.is_empty() || value.is_empty() {
                return Err(Error::Config(format!("line {}: empty key or value", n + 1)));
            }
            if let Some((first, _)) = entries.insert(key.clone(), (n + 1, value)) {
                return Err(Error::Config(format!("line {}: `{key}` already set on line {first}", n + 1)));
            }
        }
        let name = entries
            .remove("problem.name")
            .ok_or_else(|| Error::Config("missing `problem.name`".into()))?
            .1;
        let mut cfg = Self::new(&name);
        for (key, (line, value)) in entries {
            cfg.set(&key, &value)
                .map_err(|e| Error::Config(format!("line {line}: {e}")))?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let (section, field) = key
            .split_once('.')
            .ok_or_else(|| Error::Config(format!("`{key}` has no section")))?;
        match (section, field) {
            ("problem", p) => {
                self.overrides.insert(p.to_string(), num(key, value)?);
            }
            ("ladder", axis) => {
                self.ladders.insert(axis.to_string(), ladder(key, value)?);
            }
            ("sampling", "interior") => self.n_interior = Some(num(key, value)?),
            ("sampling", "boundary") => self.n_boundary = Some(num(key, value)?),
            ("sampling", "initial") => self.n_initial = Some(num(key, value)?),
            ("sampling", "strategy") => self.strategy = Some(value.parse()?),
            ("sampling", "seed") => self.seed = num(key, value)?,
            ("solver", "method") => {
                self.method = Some(match value {
                    "svd" => SolveMethod::Svd,
                    "qr" => SolveMethod::HouseholderQr,
                    other => return Err(Error::Config(format!("unknown solver method `{other}`"))),
                })
            }
            ("solver", "rcond") => self.rcond = Some(num(key, value)?),
            ("solver", "row_scaling") => self.row_scaling = value.parse()?,
            ("solver", "execution") => {
                self.execution = match value {
                    "parallel" => Execution::Parallel,
                    "sequential" => Execution::Sequential,
                    other => return Err(Error::Config(format!("unknown execution mode `{other}`"))),
                }
            }
            ("weights", "pde") => self.weights.pde = num(key, value)?,
            ("weights", "boundary") => self.weights.boundary = num(key, value)?,
            ("weights", "initial") => self.weights.initial = num(key, value)?,
            ("march", "dt") => self.march.dt = Some(num(key, value)?),
            ("march", "t_end") => self.march.t_end = Some(num(key, value)?),
            ("march", "picard_iters") => self.march.picard_iters = Some(num(key, value)?),
            ("march", "picard_tol") => self.march.picard_tol = Some(num(key, value)?),
            ("march", "stop_on_stall") => self.march.stop_on_stall = Some(num(key, value)?),
            ("output", "dir") => self.output_dir = Some(PathBuf::from(value)),
            ("output", "grid") => self.grid_points = Some(num(key, value)?),
            ("output", "spectrum_points") => self.spectrum_points = num(key, value)?,
            ("output", "trajectory_stride") => self.trajectory_stride = num(key, value)?,
            _ => return Err(Error::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    /// Builds the problem, checking the name, overrides and ladder axes.
    pub fn problem_spec(&self) -> Result<ProblemSpec> {
        let p = make_problem(&self.problem, &self.overrides)?;
        let names = axis_names(&p);
        if let Some(bad) = self.ladders.keys().find(|k| !names.contains(&k.as_str())) {
            return Err(Error::Config(format!(
                "`{}` has axes {names:?}, the config sets `ladder.{bad}`",
                p.name
            )));
        }
        if p.is_nonlinear() && self.ladders.contains_key("t") {
            return Err(Error::Config(format!(
                "`{}` marches in time; only the spatial ladder can be set",
                p.name
            )));
        }
        Ok(p)
    }

    fn solve_options(&self, default_method: SolveMethod) -> SolveOptions {
        SolveOptions {
            rcond: self.rcond,
            method: self.method.unwrap_or(default_method),
            execution: self.execution,
        }
    }

    fn ladders_for(&self, p: &ProblemSpec) -> Vec<(i32, i32)> {
        axis_names(p)
            .iter()
            .zip(&p.ladders)
            .map(|(a, d)| self.ladders.get(*a).copied().unwrap_or(*d))
            .collect()
    }

    pub fn linear_options(&self, p: &ProblemSpec) -> LinearRunOptions {
        let mut o = LinearRunOptions::for_problem(p).with_ladders(self.ladders_for(p));
        o.n_interior = self.n_interior.unwrap_or(o.n_interior);
        o.n_boundary = self.n_boundary.unwrap_or(o.n_boundary);
        o.n_initial = self.n_initial.unwrap_or(o.n_initial);
        o.strategy = self.strategy.unwrap_or(o.strategy);
        o.seed = self.seed;
        o.weights = self.weights;
        o.row_scaling = self.row_scaling;
        o.solve = self.solve_options(o.solve.method);
        o
    }

    pub fn march_config(&self, p: &ProblemSpec) -> Result<MarchConfig> {
        let mut c = MarchConfig::for_problem(p)?;
        c.ladder = self.ladders_for(p)[0];
        c.n_interior = self.n_interior.unwrap_or(c.n_interior);
        c.n_boundary = self.n_boundary.unwrap_or(c.n_boundary);
        c.strategy = self.strategy.unwrap_or(c.strategy);
        c.seed = self.seed;
        c.row_scaling = self.row_scaling;
        c.solve = self.solve_options(c.solve.method);
        c.dt = self.march.dt.unwrap_or(c.dt);
        c.t_end = self.march.t_end.unwrap_or(c.t_end);
        c.picard_iters = self.march.picard_iters.unwrap_or(c.picard_iters);
        c.picard_tol = self.march.picard_tol.unwrap_or(c.picard_tol);
        c.stop_on_stall = self.march.stop_on_stall.unwrap_or(c.stop_on_stall);
        c.validate()?;
        Ok(c)
    }
}

/// `x`, `y` for spatial axes, `t` last for space-time problems.
pub fn axis_names(p: &ProblemSpec) -> Vec<&'static str> {
    let spatial = match &p.geometry {
        Geometry::BoxTime { space, .. } => space.len(),
        g => g.dim(),
    };
    let mut names: Vec<&'static str> = ["x", "y", "z"].into_iter().take(spatial).collect();
    if p.geometry.is_time_dependent() {
        names.push("t");
    }
    names
}

fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value
        .parse()
        .map_err(|e| Error::Config(format!("`{key}` = `{value}`: {e}")))
}

fn ladder(key: &str, value: &str) -> Result<(i32, i32)> {
    let parts: Vec<&str> = value.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).collect();
    match parts[..] {
        [a, b] => Ok((num(key, a)?, num(key, b)?)),
        _ => Err(Error::Config(format!("`{key}` needs two levels `j0, jmax`, got `{value}`"))),
    }
}
