//! Registry of benchmark problems: geometry, operator, data and exact
//! solutions, constructible by name.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use crate::assembly::CollocationSet;
use crate::basis::{build_ladder, TensorBasis};
use crate::error::{Error, Result};
use crate::geometry::{self, Geometry, SamplingStrategy, StarRadius};
use crate::operator::{point_fn, LinearOperator, PointFn};

pub type Overrides = BTreeMap<String, f64>;

/// Every registered problem name, in listing order.
pub const REGISTRY: [&str; 13] = [
    "repr_f1",
    "repr_f2",
    "adv1d",
    "diff1d",
    "advdiff1d",
    "helmholtz1d",
    "adv2d",
    "diff2d",
    "flower_diff",
    "adv_space_time_packet",
    "adv_space_time_gauss",
    "growing_diffusion",
    "burgers",
];

#[derive(Clone, Debug)]
pub enum PdeKind {
    Linear(LinearOperator),
    /// `u_t + u u_x - epsilon u_xx = f`, solved by time marching.
    Burgers { epsilon: f64 },
}

#[derive(Clone)]
pub struct ProblemSpec {
    pub name: String,
    pub summary: String,
    pub provenance: &'static str,
    pub geometry: Geometry,
    pub pde: PdeKind,
    pub source: PointFn,
    pub dirichlet: PointFn,
    pub initial: Option<PointFn>,
    pub exact: Option<PointFn>,
    /// Default `(j0, jmax)` per axis; spatial axes only for time-marched
    /// problems.
    pub ladders: Vec<(i32, i32)>,
    pub n_interior: usize,
    pub n_boundary: usize,
    pub n_initial: usize,
    pub strategy: SamplingStrategy,
    pub params: BTreeMap<String, f64>,
    /// False when the Dirichlet data deliberately differ from the exact trace.
    pub boundary_matches_exact: bool,
}

impl fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("name", &self.name)
            .field("geometry", &self.geometry)
            .field("pde", &self.pde)
            .field("ladders", &self.ladders)
            .field("params", &self.params)
            .finish_non_exhaustive()
    }
}

impl ProblemSpec {
    pub fn dim(&self) -> usize {
        self.geometry.dim()
    }

    pub fn is_nonlinear(&self) -> bool {
        matches!(self.pde, PdeKind::Burgers { .. })
    }

    pub fn operator(&self) -> Result<&LinearOperator> {
        match &self.pde {
            PdeKind::Linear(op) => Ok(op),
            PdeKind::Burgers { .. } => Err(Error::Unsupported(format!(
                "`{}` is nonlinear and has no single linear operator; march it in time",
                self.name
            ))),
        }
    }

    pub fn exact_eval(&self, point: &[f64]) -> Result<f64> {
        match &self.exact {
            Some(u) => Ok(u(point)),
            None => Err(Error::Unsupported(format!(
                "`{}` has no closed-form solution; compare against the tabulated reference solution",
                self.name
            ))),
        }
    }

    pub fn has_exact(&self) -> bool {
        self.exact.is_some()
    }

    /// Tensor basis on the geometry's bounding box with the given ladders.
    pub fn basis(&self, ladders: &[(i32, i32)]) -> Result<TensorBasis> {
        tensor_on(&self.geometry.bounds(), ladders)
    }

    pub fn default_basis(&self) -> Result<TensorBasis> {
        if self.is_nonlinear() {
            return self.spatial_basis(&self.ladders);
        }
        self.basis(&self.ladders)
    }

    /// Basis over the spatial axes only.
    pub fn spatial_basis(&self, ladders: &[(i32, i32)]) -> Result<TensorBasis> {
        let bounds = match &self.geometry {
            Geometry::BoxTime { space, .. } => space.clone(),
            g => g.bounds(),
        };
        tensor_on(&bounds, ladders)
    }

    /// Samples interior, boundary and (for space-time problems) initial
    /// points and evaluates the data there.
    pub fn collocation(
        &self,
        n_interior: usize,
        n_boundary: usize,
        n_initial: usize,
        strategy: SamplingStrategy,
        seed: u64,
    ) -> Result<CollocationSet> {
        let interior = geometry::sample_interior(&self.geometry, n_interior, strategy, seed)?;
        let boundary = if n_boundary == 0 {
            Vec::new()
        } else {
            geometry::sample_boundary(&self.geometry, n_boundary, strategy, seed)?
        };
        let initial = match (&self.initial, self.geometry.is_time_dependent()) {
            (Some(_), true) if n_initial > 0 => {
                geometry::sample_initial(&self.geometry, n_initial, strategy, seed)?
            }
            _ => Vec::new(),
        };
        let source = interior.iter().map(|p| (self.source)(p)).collect();
        let dirichlet = boundary.iter().map(|p| (self.dirichlet)(p)).collect();
        let initial_values = match &self.initial {
            Some(h) => initial.iter().map(|p| h(p)).collect(),
            None => Vec::new(),
        };
        Ok(CollocationSet {
            interior,
            source,
            boundary,
            dirichlet,
            initial,
            initial_values,
        })
    }

    pub fn default_collocation(&self, seed: u64) -> Result<CollocationSet> {
        self.collocation(self.n_interior, self.n_boundary, self.n_initial, self.strategy, seed)
    }

    /// For space-time problems, the final time.
    pub fn t_end(&self) -> Option<f64> {
        match &self.geometry {
            Geometry::BoxTime { t_end, .. } => Some(*t_end),
            _ => None,
        }
    }
}

fn tensor_on(bounds: &[(f64, f64)], ladders: &[(i32, i32)]) -> Result<TensorBasis> {
    if ladders.len() != bounds.len() {
        return Err(Error::DimensionMismatch {
            expected: bounds.len(),
            found: ladders.len(),
        });
    }
    let axes = ladders
        .iter()
        .zip(bounds)
        .map(|(&(j0, jmax), &(lo, hi))| build_ladder(j0, jmax, lo, hi))
        .collect::<Result<Vec<_>>>()?;
    TensorBasis::new(axes)
}

/// Pulls known keys out of the override map, rejecting anything unexpected.
struct Params<'a> {
    name: &'a str,
    overrides: &'a Overrides,
    used: BTreeMap<String, f64>,
}

impl<'a> Params<'a> {
    fn new(name: &'a str, overrides: &'a Overrides) -> Self {
        Self {
            name,
            overrides,
            used: BTreeMap::new(),
        }
    }

    fn get(&mut self, key: &str, default: f64, valid: impl Fn(f64) -> bool) -> Result<f64> {
        let v = self.overrides.get(key).copied().unwrap_or(default);
        if !v.is_finite() || !valid(v) {
            return Err(Error::Parameter(format!(
                "`{key}` = {v} is not valid for `{}`",
                self.name
            )));
        }
        self.used.insert(key.to_string(), v);
        Ok(v)
    }

    fn finish(self) -> Result<BTreeMap<String, f64>> {
        if let Some(k) = self.overrides.keys().find(|k| !self.used.contains_key(*k)) {
            return Err(Error::Parameter(format!(
                "`{}` does not accept the parameter `{k}`",
                self.name
            )));
        }
        Ok(self.used)
    }
}

fn sgn(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Piecewise profile with a box pulse, a narrow Gaussian and a hat.
pub fn f1(x: f64) -> f64 {
    if x <= -0.5 {
        0.5 * (sgn(x + 0.8) - sgn(x + 0.5))
    } else if x <= 0.5 {
        (-100.0 * x * x).exp()
    } else if x <= 0.65 {
        20.0 / 3.0 * x - 10.0 / 3.0
    } else if x <= 0.8 {
        -20.0 / 3.0 * x + 16.0 / 3.0
    } else {
        0.0
    }
}

fn zero() -> PointFn {
    point_fn(|_| 0.0)
}

struct Builder {
    name: &'static str,
    summary: String,
    provenance: &'static str,
    geometry: Geometry,
    pde: PdeKind,
    source: PointFn,
    exact: Option<PointFn>,
    dirichlet: Option<PointFn>,
    initial: Option<PointFn>,
    ladders: Vec<(i32, i32)>,
    counts: (usize, usize, usize),
    strategy: SamplingStrategy,
    boundary_matches_exact: bool,
}

impl Builder {
    fn build(self, params: BTreeMap<String, f64>) -> ProblemSpec {
        let dirichlet = match (self.dirichlet, &self.exact) {
            (Some(g), _) => g,
            (None, Some(u)) => u.clone(),
            (None, None) => zero(),
        };
        ProblemSpec {
            name: self.name.to_string(),
            summary: self.summary,
            provenance: self.provenance,
            geometry: self.geometry,
            pde: self.pde,
            source: self.source,
            dirichlet,
            initial: self.initial,
            exact: self.exact,
            ladders: self.ladders,
            n_interior: self.counts.0,
            n_boundary: self.counts.1,
            n_initial: self.counts.2,
            strategy: self.strategy,
            params,
            boundary_matches_exact: self.boundary_matches_exact,
        }
    }
}

/// Builds a registered problem, applying numeric parameter overrides.
pub fn make_problem(name: &str, overrides: &Overrides) -> Result<ProblemSpec> {
    let mut params = Params::new(name, overrides);
    let builder = match name {
        "repr_f1" => repr_f1()?,
        "repr_f2" => repr_f2(params.get("c", 20.0, |c| c > 0.0)?)?,
        "adv1d" => adv1d()?,
        "diff1d" => diff1d()?,
        "advdiff1d" => advdiff1d(params.get("v", 0.25, |v| v > 0.0)?)?,
        "helmholtz1d" => helmholtz1d(params.get("lambda", 10.0, |_| true)?)?,
        "adv2d" => adv2d(params.get("a", 1.0, |_| true)?, params.get("b", 1.0, |_| true)?)?,
        "diff2d" => diff2d()?,
        "flower_diff" => flower_diff()?,
        "adv_space_time_packet" => {
            let homogeneous = params.get("homogeneous_boundary", 0.0, is_flag)? != 0.0;
            advection_space_time("adv_space_time_packet", Pulse::Packet, homogeneous)?
        }
        "adv_space_time_gauss" => {
            let homogeneous = params.get("homogeneous_boundary", 0.0, is_flag)? != 0.0;
            advection_space_time("adv_space_time_gauss", Pulse::Gauss, homogeneous)?
        }
        "growing_diffusion" => growing_diffusion(
            params.get("k1", 2.0 * PI, |_| true)?,
            params.get("k2", 2.0 * PI, |_| true)?,
        )?,
        "burgers" => burgers(params.get("epsilon", 0.01 / PI, |e| e > 0.0)?)?,
        other => return Err(Error::UnknownProblem(other.to_string())),
    };
    let used = params.finish()?;
    Ok(builder.build(used))
}

fn is_flag(v: f64) -> bool {
    v == 0.0 || v == 1.0
}

fn repr_f1() -> Result<Builder> {
    let u = point_fn(|p| f1(p[0]));
    Ok(Builder {
        name: "repr_f1",
        summary: "fit of a piecewise profile with jumps, a Gaussian and a hat on [-1, 1]".into(),
        provenance: "function representation f1",
        geometry: Geometry::interval(-1.0, 1.0)?,
        pde: PdeKind::Linear(LinearOperator::identity(1)),
        source: u.clone(),
        exact: Some(u),
        dirichlet: None,
        initial: None,
        ladders: vec![(0, 9)],
        counts: (5000, 2, 0),
        strategy: SamplingStrategy::GridEquispaced,
        boundary_matches_exact: true,
    })
}

fn repr_f2(c: f64) -> Result<Builder> {
    let u = point_fn(move |p| (-c * (p[0] * p[0] + p[1] * p[1])).exp());
    Ok(Builder {
        name: "repr_f2",
        summary: format!("fit of exp(-c(x^2+y^2)) on [-1, 1]^2, c = {c}"),
        provenance: "function representation f2",
        geometry: Geometry::box_nd(vec![(-1.0, 1.0), (-1.0, 1.0)])?,
        pde: PdeKind::Linear(LinearOperator::identity(2)),
        source: u.clone(),
        exact: Some(u),
        dirichlet: None,
        initial: None,
        ladders: vec![(0, 3), (0, 3)],
        counts: (2000, 400, 0),
        strategy: SamplingStrategy::GridEquispaced,
        boundary_matches_exact: true,
    })
}

fn adv1d() -> Result<Builder> {
    let tau = 2.0 * PI;
    let u = point_fn(move |p| (tau * p[0]).sin() * (2.0 * tau * p[0]).cos() + 1.0);
    // u' = 2pi cos(2pi x) cos(4pi x) - 4pi sin(2pi x) sin(4pi x)
    let f = point_fn(move |p| {
        let x = p[0];
        tau * (tau * x).cos() * (2.0 * tau * x).cos() - 2.0 * tau * (tau * x).sin() * (2.0 * tau * x).sin()
    });
    Ok(Builder {
        name: "adv1d",
        summary: "u_x = f on (0, 1), u = sin(2 pi x) cos(4 pi x) + 1".into(),
        provenance: "stationary advection",
        geometry: Geometry::interval(0.0, 1.0)?,
        pde: PdeKind::Linear(LinearOperator::derivative(vec![1], 1.0)),
        source: f,
        exact: Some(u),
        dirichlet: None,
        initial: None,
        ladders: vec![(0, 3)],
        counts: (100, 2, 0),
        strategy: SamplingStrategy::GridCellCentered,
        boundary_matches_exact: true,
    })
}

fn diff1d() -> Result<Builder> {
    let u = point_fn(|p| (0.5 * PI * p[0]).sin() * (2.0 * PI * p[0]).cos() + 1.0);
    // u'' = -(17 pi^2 / 4) sin(pi x / 2) cos(2 pi x) - 2 pi^2 cos(pi x / 2) sin(2 pi x)
    let f = point_fn(|p| {
        let x = p[0];
        let (a, b) = (0.5 * PI * x, 2.0 * PI * x);
        -(17.0 / 4.0) * PI * PI * a.sin() * b.cos() - 2.0 * PI * PI * a.cos() * b.sin()
    });
    Ok(Builder {
        name: "diff1d",
        summary: "u_xx = f on (0, 1), u = sin(pi x / 2) cos(2 pi x) + 1".into(),
        provenance: "stationary diffusion",
        geometry: Geometry::interval(0.0, 1.0)?,
        pde: PdeKind::Linear(LinearOperator::derivative(vec![2], 1.0)),
        source: f,
        exact: Some(u),
        dirichlet: None,
        initial: None,
        ladders: vec![(0, 3)],
        counts: (100, 2, 0),
        strategy: SamplingStrategy::GridCellCentered,
        boundary_matches_exact: true,
    })
}

fn advdiff1d(v: f64) -> Result<Builder> {
    // (e^{x/v} - 1) / (e^{1/v} - 1), written to avoid overflow for small v
    let u = point_fn(move |p| {
        let x = p[0];
        ((x - 1.0) / v).exp() * (-(-x / v).exp_m1()) / (-(-1.0 / v).exp_m1())
    });
    Ok(Builder {
        name: "advdiff1d",
        summary: format!("u_x - v u_xx = 0 on (0, 1) with a boundary layer at x = 1, v = {v}"),
        provenance: "stationary advection-diffusion",
        geometry: Geometry::interval(0.0, 1.0)?,
        pde: PdeKind::Linear(
            LinearOperator::derivative(vec![1], 1.0).with_term(vec![2], -v)?,
        ),
        source: zero(),
        exact: Some(u),
        dirichlet: None,
        initial: None,
        ladders: vec![(0, 5)],
        counts: (100, 2, 0),
        strategy: SamplingStrategy::GridCellCentered,
        boundary_matches_exact: true,
    })
}

fn helmholtz1d(lambda: f64) -> Result<Builder> {
    let u = point_fn(|p| {
        let x = p[0];
        0.5 * (x * x + 1.0) * (40.0 * x.powi(3) - 24.0).cos().exp()
    });
    let f = point_fn(move |p| {
        let x = p[0];
        let phase = 40.0 * x.powi(3) - 24.0;
        let (s, c) = phase.sin_cos();
        let e = c.exp();
        // g = cos(phase), g' = -120 x^2 sin, g'' = -(120 x^2)^2 cos - 240 x sin
        let g1 = -120.0 * x * x * s;
        let g2 = -(120.0 * x * x).powi(2) * c - 240.0 * x * s;
        let q = 0.5 * (x * x + 1.0);
        let u = q * e;
        let u2 = e * (1.0 + 2.0 * x * g1 + q * (g2 + g1 * g1));
        -u2 + lambda * u
    });
    Ok(Builder {
        name: "helmholtz1d",
        summary: format!(
            "-u_xx + lambda u = f on (0, 1), u = (x^2 + 1) exp(cos(40 x^3 - 24)) / 2, lambda = {lambda}"
        ),
        provenance: "1D Helmholtz with high-frequency content",
        geometry: Geometry::interval(0.0, 1.0)?,
        pde: PdeKind::Linear(
            LinearOperator::derivative(vec![2], -1.0).with_term(vec![0], lambda)?,
        ),
        source: f,
        exact: Some(u),
        dirichlet: None,
        initial: None,
        ladders: vec![(0, 7)],
        counts: (20000, 2, 0),
        strategy: SamplingStrategy::GridCellCentered,
        boundary_matches_exact: true,
    })
}

fn adv2d(a: f64, b: f64) -> Result<Builder> {
    let u = point_fn(|p| 0.5 * (PI * p[0]).cos() * (PI * p[1]).sin());
    let f = point_fn(move |p| {
        let (x, y) = (PI * p[0], PI * p[1]);
        -a * 0.5 * PI * x.sin() * y.sin() + b * 0.5 * PI * x.cos() * y.cos()
    });
    Ok(Builder {
        name: "adv2d",
        summary: format!("a u_x + b u_y = f on [-1, 1]^2, u = cos(pi x) sin(pi y) / 2, a = {a}, b = {b}"),
        provenance: "2D stationary advection",
        geometry: Geometry::box_nd(vec![(-1.0, 1.0), (-1.0, 1.0)])?,
        pde: PdeKind::Linear(
            LinearOperator::derivative(vec![1, 0], a).with_term(vec![0, 1], b)?,
        ),
        source: f,
        exact: Some(u),
        dirichlet: None,
        initial: None,
        ladders: vec![(0, 4), (0, 4)],
        counts: (5000, 400, 0),
        strategy: SamplingStrategy::GridEquispaced,
        boundary_matches_exact: true,
    })
}

fn diff2d() -> Result<Builder> {
    let u = point_fn(|p| 0.5 + (-(2.0 * p[0] * p[0] + 4.0 * p[1] * p[1])).exp());
    // u_xx = E (16 x^2 - 4), u_yy = E (64 y^2 - 8)
    let f = point_fn(|p| {
        let (x, y) = (p[0], p[1]);
        let e = (-(2.0 * x * x + 4.0 * y * y)).exp();
        e * (16.0 * x * x - 4.0 + 64.0 * y * y - 8.0)
    });
    Ok(Builder {
        name: "diff2d",
        summary: "u_xx + u_yy = f on [-1, 1]^2, u = 1/2 + exp(-(2 x^2 + 4 y^2))".into(),
        provenance: "2D stationary diffusion",
        geometry: Geometry::box_nd(vec![(-1.0, 1.0), (-1.0, 1.0)])?,
        pde: PdeKind::Linear(
            LinearOperator::derivative(vec![2, 0], 1.0).with_term(vec![0, 2], 1.0)?,
        ),
        source: f,
        exact: Some(u),
        dirichlet: None,
        initial: None,
        ladders: vec![(0, 3), (0, 3)],
        counts: (1000, 100, 0),
        strategy: SamplingStrategy::GridEquispaced,
        boundary_matches_exact: true,
    })
}

fn flower_diff() -> Result<Builder> {
    let u = point_fn(|p| {
        let (x, y) = (p[0], p[1]);
        let q = 0.0625 - (x - 0.5).powi(2) - (y - 0.5).powi(2);
        16.0 * x * (1.0 - x) * y * (1.0 - y) * (0.5 + (20.0 * q).atan() / PI)
    });
    // u = P A with P = 16 x(1-x) y(1-y), A = 1/2 + atan(20 q) / pi
    let f = point_fn(|p| {
        let (x, y) = (p[0], p[1]);
        let q = 0.0625 - (x - 0.5).powi(2) - (y - 0.5).powi(2);
        let w = 1.0 + 400.0 * q * q;
        let a = 0.5 + (20.0 * q).atan() / PI;
        let px = 16.0 * (1.0 - 2.0 * x) * y * (1.0 - y);
        let py = 16.0 * x * (1.0 - x) * (1.0 - 2.0 * y);
        let pxx = -32.0 * y * (1.0 - y);
        let pyy = -32.0 * x * (1.0 - x);
        let pp = 16.0 * x * (1.0 - x) * y * (1.0 - y);
        let (qx, qy) = (-2.0 * (x - 0.5), -2.0 * (y - 0.5));
        let ax = 20.0 / PI * qx / w;
        let ay = 20.0 / PI * qy / w;
        let axx = 20.0 / PI * (-2.0 / w - 800.0 * q * qx * qx / (w * w));
        let ayy = 20.0 / PI * (-2.0 / w - 800.0 * q * qy * qy / (w * w));
        pxx * a + 2.0 * px * ax + pp * axx + pyy * a + 2.0 * py * ay + pp * ayy
    });
    Ok(Builder {
        name: "flower_diff",
        summary: "u_xx + u_yy = f inside the flower r(t) = 0.2 + 0.15 sin(5 t) centred at (0.5, 0.5)".into(),
        provenance: "2D diffusion on a complex domain",
        geometry: Geometry::star(
            [(0.0, 1.0), (0.0, 1.0)],
            (0.5, 0.5),
            StarRadius {
                base: 0.2,
                amplitude: 0.15,
                lobes: 5,
            },
        )?,
        pde: PdeKind::Linear(
            LinearOperator::derivative(vec![2, 0], 1.0).with_term(vec![0, 2], 1.0)?,
        ),
        source: f,
        exact: Some(u),
        dirichlet: None,
        initial: None,
        ladders: vec![(0, 4), (0, 4)],
        counts: (4000, 400, 0),
        strategy: SamplingStrategy::UniformRandom,
        boundary_matches_exact: true,
    })
}

#[derive(Clone, Copy)]
enum Pulse {
    Packet,
    Gauss,
}

impl Pulse {
    fn eval(self, z: f64) -> f64 {
        match self {
            Pulse::Packet => (-5.0 * z * z).exp() * (10.0 * PI * z).sin(),
            Pulse::Gauss => (-50.0 * z * z).exp(),
        }
    }
}

fn advection_space_time(name: &'static str, pulse: Pulse, homogeneous: bool) -> Result<Builder> {
    let u = point_fn(move |p| pulse.eval(p[0] - p[1]));
    let h0 = point_fn(move |p| pulse.eval(p[0]));
    let (summary, provenance, ladders, counts) = match pulse {
        Pulse::Packet => (
            "u_t + u_x = 0 on (-1, 1) x (0, 0.5], wave packet exp(-5 x^2) sin(10 pi x)",
            "unsteady advection of a wave packet",
            vec![(-2, 5), (-2, 3)],
            (6000, 200, 200),
        ),
        Pulse::Gauss => (
            "u_t + u_x = 0 on (-1, 1) x (0, 0.5], sharp Gaussian exp(-50 x^2)",
            "unsteady advection of a sharp Gaussian",
            vec![(-2, 4), (-2, 2)],
            (6000, 200, 200),
        ),
    };
    Ok(Builder {
        name,
        summary: summary.into(),
        provenance,
        geometry: Geometry::box_time(vec![(-1.0, 1.0)], 0.5)?,
        pde: PdeKind::Linear(
            LinearOperator::derivative(vec![0, 1], 1.0).with_term(vec![1, 0], 1.0)?,
        ),
        source: zero(),
        exact: Some(u),
        dirichlet: homogeneous.then(zero),
        initial: Some(h0),
        ladders,
        counts,
        strategy: SamplingStrategy::GridEquispaced,
        boundary_matches_exact: !homogeneous,
    })
}

fn growing_diffusion(k1: f64, k2: f64) -> Result<Builder> {
    let u = point_fn(move |p| p[1].exp() * ((k1 * p[0]).sin() - (k2 * p[0]).cos()));
    let h0 = point_fn(move |p| (k1 * p[0]).sin() - (k2 * p[0]).cos());
    let f = point_fn(move |p| {
        let x = p[0];
        p[1].exp() * ((1.0 + k1 * k1) * (k1 * x).sin() - (1.0 + k2 * k2) * (k2 * x).cos())
    });
    Ok(Builder {
        name: "growing_diffusion",
        summary: format!(
            "u_t - u_xx = f on (-1, 1) x (0, 1], u = e^t (sin(k1 x) - cos(k2 x)), k1 = {k1}, k2 = {k2}"
        ),
        provenance: "diffusion with exponentially growing amplitude",
        geometry: Geometry::box_time(vec![(-1.0, 1.0)], 1.0)?,
        pde: PdeKind::Linear(
            LinearOperator::derivative(vec![0, 1], 1.0).with_term(vec![2, 0], -1.0)?,
        ),
        source: f,
        exact: Some(u),
        dirichlet: None,
        initial: Some(h0),
        ladders: vec![(0, 4), (0, 2)],
        counts: (2000, 100, 100),
        strategy: SamplingStrategy::GridEquispaced,
        boundary_matches_exact: true,
    })
}

fn burgers(epsilon: f64) -> Result<Builder> {
    Ok(Builder {
        name: "burgers",
        summary: format!("u_t + u u_x = eps u_xx on (-1, 1) x (0, 1], u(x, 0) = -sin(pi x), eps = {epsilon}"),
        provenance: "viscous Burgers equation, Picard + backward Euler",
        geometry: Geometry::box_time(vec![(-1.0, 1.0)], 1.0)?,
        pde: PdeKind::Burgers { epsilon },
        source: zero(),
        exact: None,
        dirichlet: Some(zero()),
        initial: Some(point_fn(|p| -(PI * p[0]).sin())),
        ladders: vec![(-1, 9)],
        counts: (2000, 2, 0),
        strategy: SamplingStrategy::GridEquispaced,
        boundary_matches_exact: true,
    })
}
