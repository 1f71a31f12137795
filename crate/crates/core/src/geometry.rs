//! Domains and collocation point sampling.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub type Point = Vec<f64>;

const MAX_REJECTIONS: usize = 1_000_000;

/// Radius of a star-shaped domain: `base + amplitude * sin(lobes * theta)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StarRadius {
    pub base: f64,
    pub amplitude: f64,
    pub lobes: u32,
}

impl StarRadius {
    pub fn at(&self, theta: f64) -> f64 {
        self.base + self.amplitude * (self.lobes as f64 * theta).sin()
    }

    pub fn max(&self) -> f64 {
        self.base + self.amplitude.abs()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Geometry {
    Interval {
        lo: f64,
        hi: f64,
    },
    Box {
        bounds: Vec<(f64, f64)>,
    },
    /// Planar star domain `{ c + rho (cos t, sin t) : rho < r(t) }`.
    ///
    /// `bounds` is the box the basis lives on and must contain the domain.
    Star {
        bounds: [(f64, f64); 2],
        center: (f64, f64),
        radius: StarRadius,
    },
    /// Spatial box times `(0, t_end]`; time is the last coordinate.
    BoxTime {
        space: Vec<(f64, f64)>,
        t_end: f64,
    },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SamplingStrategy {
    #[default]
    GridEquispaced,
    /// Midpoints of `n` equal cells along open axes: `lo + (i + 1/2) L / n`.
    GridCellCentered,
    UniformRandom,
}

impl std::str::FromStr for SamplingStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "grid" | "grid_equispaced" | "GridEquispaced" => Ok(Self::GridEquispaced),
            "cell" | "grid_cell_centered" | "GridCellCentered" => Ok(Self::GridCellCentered),
            "random" | "uniform_random" | "UniformRandom" => Ok(Self::UniformRandom),
            other => Err(Error::Parameter(format!("unknown sampling strategy `{other}`"))),
        }
    }
}

impl Geometry {
    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        let g = Geometry::Interval { lo, hi };
        g.validate()?;
        Ok(g)
    }

    pub fn box_nd(bounds: Vec<(f64, f64)>) -> Result<Self> {
        let g = Geometry::Box { bounds };
        g.validate()?;
        Ok(g)
    }

    pub fn star(bounds: [(f64, f64); 2], center: (f64, f64), radius: StarRadius) -> Result<Self> {
        let g = Geometry::Star {
            bounds,
            center,
            radius,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn box_time(space: Vec<(f64, f64)>, t_end: f64) -> Result<Self> {
        let g = Geometry::BoxTime { space, t_end };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        let bounds = self.bounds();
        if bounds.is_empty() {
            return Err(Error::InvalidArgument("geometry has no axes".into()));
        }
        for (a, &(lo, hi)) in bounds.iter().enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::InvalidArgument(format!(
                    "axis {a}: bounds ({lo}, {hi}) must satisfy lo < hi"
                )));
            }
        }
        if let Geometry::Star {
            bounds,
            center,
            radius,
        } = self
        {
            if !(radius.base > radius.amplitude.abs()) || radius.lobes == 0 {
                return Err(Error::InvalidArgument(
                    "star radius must stay positive for every angle".into(),
                ));
            }
            let r = radius.max();
            let fits = bounds[0].0 <= center.0 - r
                && center.0 + r <= bounds[0].1
                && bounds[1].0 <= center.1 - r
                && center.1 + r <= bounds[1].1;
            if !fits {
                return Err(Error::InvalidArgument(
                    "star domain does not fit inside its bounding box".into(),
                ));
            }
        }
        Ok(())
    }

    /// Per-axis `(lo, hi)`; for space-time the last pair is `(0, t_end)`.
    pub fn bounds(&self) -> Vec<(f64, f64)> {
        match self {
            Geometry::Interval { lo, hi } => vec![(*lo, *hi)],
            Geometry::Box { bounds } => bounds.clone(),
            Geometry::Star { bounds, .. } => bounds.to_vec(),
            Geometry::BoxTime { space, t_end } => {
                let mut b = space.clone();
                b.push((0.0, *t_end));
                b
            }
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Geometry::Interval { .. } => 1,
            Geometry::Box { bounds } => bounds.len(),
            Geometry::Star { .. } => 2,
            Geometry::BoxTime { space, .. } => space.len() + 1,
        }
    }

    pub fn is_time_dependent(&self) -> bool {
        matches!(self, Geometry::BoxTime { .. })
    }

    /// Interior membership; space-time interiors include the final time.
    pub fn contains(&self, p: &[f64]) -> bool {
        if p.len() != self.dim() {
            return false;
        }
        match self {
            Geometry::Interval { lo, hi } => *lo < p[0] && p[0] < *hi,
            Geometry::Box { bounds } => open_box_contains(bounds, p),
            Geometry::Star { center, radius, .. } => {
                let (dx, dy) = (p[0] - center.0, p[1] - center.1);
                let theta = dy.atan2(dx);
                let r = radius.at(theta);
                dx * dx + dy * dy < r * r
            }
            Geometry::BoxTime { space, t_end } => {
                let t = p[space.len()];
                open_box_contains(space, &p[..space.len()]) && 0.0 < t && t <= *t_end
            }
        }
    }

    /// Boundary membership (Dirichlet part), up to `tol`.
    pub fn on_boundary(&self, p: &[f64], tol: f64) -> bool {
        if p.len() != self.dim() {
            return false;
        }
        match self {
            Geometry::Interval { lo, hi } => (p[0] - lo).abs() <= tol || (p[0] - hi).abs() <= tol,
            Geometry::Box { bounds } => on_box_surface(bounds, p, tol),
            Geometry::Star { center, radius, .. } => {
                let (dx, dy) = (p[0] - center.0, p[1] - center.1);
                let r = radius.at(dy.atan2(dx));
                ((dx * dx + dy * dy).sqrt() - r).abs() <= tol
            }
            Geometry::BoxTime { space, t_end } => {
                let t = p[space.len()];
                on_box_surface(space, &p[..space.len()], tol) && 0.0 < t && t <= *t_end + tol
            }
        }
    }
}

fn open_box_contains(bounds: &[(f64, f64)], p: &[f64]) -> bool {
    bounds.iter().zip(p).all(|(&(lo, hi), &x)| lo < x && x < hi)
}

fn on_box_surface(bounds: &[(f64, f64)], p: &[f64], tol: f64) -> bool {
    let inside = bounds
        .iter()
        .zip(p)
        .all(|(&(lo, hi), &x)| lo - tol <= x && x <= hi + tol);
    let touches = bounds
        .iter()
        .zip(p)
        .any(|(&(lo, hi), &x)| (x - lo).abs() <= tol || (x - hi).abs() <= tol);
    inside && touches
}

/// How the extreme ends of one axis are treated when sampling it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum AxisSpan {
    /// `(lo, hi)`
    Open,
    /// `(lo, hi]`
    UpperClosed,
    /// `[lo, hi]`
    Closed,
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Equispaced nodes along one axis.
fn axis_nodes(lo: f64, hi: f64, m: usize, span: AxisSpan, centered: bool) -> Vec<f64> {
    let len = hi - lo;
    match span {
        AxisSpan::Open if centered => (0..m).map(|i| lo + (i as f64 + 0.5) * len / m as f64).collect(),
        AxisSpan::Open => (0..m)
            .map(|i| lo + (i + 1) as f64 * len / (m + 1) as f64)
            .collect(),
        AxisSpan::UpperClosed => (0..m).map(|i| lo + (i + 1) as f64 * len / m as f64).collect(),
        AxisSpan::Closed if m == 1 => vec![lo + 0.5 * len],
        AxisSpan::Closed => (0..m)
            .map(|i| lo + i as f64 * len / (m - 1) as f64)
            .collect(),
    }
}

/// Per-axis node counts whose product is at least `n`, roughly proportional
/// to axis length.
fn grid_shape(bounds: &[(f64, f64)], n: usize) -> Vec<usize> {
    let d = bounds.len();
    if d == 1 {
        return vec![n];
    }
    let volume: f64 = bounds.iter().map(|(lo, hi)| hi - lo).product();
    let mut density = (n as f64 / volume).powf(1.0 / d as f64);
    loop {
        let shape: Vec<usize> = bounds
            .iter()
            .map(|(lo, hi)| (((hi - lo) * density).round() as usize).max(1))
            .collect();
        if shape.iter().product::<usize>() >= n {
            return shape;
        }
        density *= 1.01;
    }
}

/// Row-major grid over `bounds`, thinned to exactly `n` points by even striding.
fn grid_points(bounds: &[(f64, f64)], spans: &[AxisSpan], n: usize, centered: bool) -> Vec<Point> {
    let shape = grid_shape(bounds, n);
    let nodes: Vec<Vec<f64>> = bounds
        .iter()
        .zip(&shape)
        .zip(spans)
        .map(|((&(lo, hi), &m), &span)| axis_nodes(lo, hi, m, span, centered))
        .collect();
    let total: usize = shape.iter().product();
    (0..n)
        .map(|i| {
            let mut flat = i * total / n;
            let mut p = vec![0.0; bounds.len()];
            for a in (0..bounds.len()).rev() {
                p[a] = nodes[a][flat % shape[a]];
                flat /= shape[a];
            }
            p
        })
        .collect()
}

fn random_coord(rng: &mut ChaCha8Rng, lo: f64, hi: f64, span: AxisSpan) -> f64 {
    loop {
        let u: f64 = rng.random();
        let x = match span {
            AxisSpan::UpperClosed => hi - u * (hi - lo),
            _ => lo + u * (hi - lo),
        };
        let ok = match span {
            AxisSpan::Open => lo < x && x < hi,
            AxisSpan::UpperClosed => lo < x && x <= hi,
            AxisSpan::Closed => lo <= x && x <= hi,
        };
        if ok {
            return x;
        }
    }
}

fn random_points(rng: &mut ChaCha8Rng, bounds: &[(f64, f64)], spans: &[AxisSpan], n: usize) -> Vec<Point> {
    (0..n)
        .map(|_| {
            bounds
                .iter()
                .zip(spans)
                .map(|(&(lo, hi), &span)| random_coord(rng, lo, hi, span))
                .collect()
        })
        .collect()
}

fn box_points(
    bounds: &[(f64, f64)],
    spans: &[AxisSpan],
    n: usize,
    strategy: SamplingStrategy,
    rng: &mut ChaCha8Rng,
) -> Vec<Point> {
    match strategy {
        SamplingStrategy::GridEquispaced => grid_points(bounds, spans, n, false),
        SamplingStrategy::GridCellCentered => grid_points(bounds, spans, n, true),
        SamplingStrategy::UniformRandom => random_points(rng, bounds, spans, n),
    }
}

fn require_positive(n: usize, what: &str) -> Result<()> {
    if n == 0 {
        Err(Error::InvalidArgument(format!("{what} point count must be at least 1")))
    } else {
        Ok(())
    }
}

/// `n` points strictly inside the domain (space-time interiors include `t_end`).
pub fn sample_interior(
    geom: &Geometry,
    n: usize,
    strategy: SamplingStrategy,
    seed: u64,
) -> Result<Vec<Point>> {
    require_positive(n, "interior")?;
    geom.validate()?;
    let mut rng = rng_for(seed, 0);
    let points = match geom {
        Geometry::Interval { .. } | Geometry::Box { .. } => {
            let bounds = geom.bounds();
            let spans = vec![AxisSpan::Open; bounds.len()];
            box_points(&bounds, &spans, n, strategy, &mut rng)
        }
        Geometry::BoxTime { space, .. } => {
            let bounds = geom.bounds();
            let mut spans = vec![AxisSpan::Open; space.len()];
            spans.push(AxisSpan::UpperClosed);
            box_points(&bounds, &spans, n, strategy, &mut rng)
        }
        Geometry::Star { bounds, .. } => star_interior(geom, bounds, n, strategy, &mut rng)?,
    };
    Ok(points)
}

fn star_interior(
    geom: &Geometry,
    bounds: &[(f64, f64); 2],
    n: usize,
    strategy: SamplingStrategy,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Point>> {
    match strategy {
        SamplingStrategy::UniformRandom => {
            let mut out = Vec::with_capacity(n);
            let mut misses = 0;
            while out.len() < n {
                let p = vec![
                    random_coord(rng, bounds[0].0, bounds[0].1, AxisSpan::Open),
                    random_coord(rng, bounds[1].0, bounds[1].1, AxisSpan::Open),
                ];
                if geom.contains(&p) {
                    out.push(p);
                    misses = 0;
                } else {
                    misses += 1;
                    if misses >= MAX_REJECTIONS {
                        return Err(Error::GeometryDegenerate(format!(
                            "{MAX_REJECTIONS} consecutive rejections while sampling the interior"
                        )));
                    }
                }
            }
            Ok(out)
        }
        SamplingStrategy::GridEquispaced | SamplingStrategy::GridCellCentered => {
            let centered = strategy == SamplingStrategy::GridCellCentered;
            // refine a box grid until enough nodes fall inside, then thin evenly
            let spans = [AxisSpan::Open; 2];
            let mut m = n.max(4);
            for _ in 0..64 {
                let inside: Vec<Point> = grid_points(bounds, &spans, m, centered)
                    .into_iter()
                    .filter(|p| geom.contains(p))
                    .collect();
                if inside.len() >= n {
                    let total = inside.len();
                    return Ok((0..n).map(|i| inside[i * total / n].clone()).collect());
                }
                m = m * 3 / 2 + 1;
            }
            Err(Error::GeometryDegenerate(
                "grid refinement never placed enough nodes inside the domain".into(),
            ))
        }
    }
}

/// `n` points on the Dirichlet boundary.
///
/// An interval always yields its two endpoints. Boxes split `n` evenly over
/// their faces; space-time boxes sample the spatial faces over `(0, t_end]`,
/// leaving the `t = 0` slab to [`sample_initial`].
pub fn sample_boundary(
    geom: &Geometry,
    n: usize,
    strategy: SamplingStrategy,
    seed: u64,
) -> Result<Vec<Point>> {
    require_positive(n, "boundary")?;
    geom.validate()?;
    let mut rng = rng_for(seed, 1);
    match geom {
        Geometry::Interval { lo, hi } => {
            if n < 2 {
                return Err(Error::InvalidArgument(
                    "an interval boundary needs at least 2 points".into(),
                ));
            }
            Ok(vec![vec![*lo], vec![*hi]])
        }
        Geometry::Box { bounds } => {
            if bounds.len() == 1 {
                return sample_boundary(&Geometry::interval(bounds[0].0, bounds[0].1)?, n, strategy, seed);
            }
            let spans = vec![AxisSpan::Open; bounds.len() - 1];
            Ok(box_faces(bounds, &[], &spans, n, strategy, &mut rng))
        }
        Geometry::BoxTime { space, t_end } => {
            let mut spans = vec![AxisSpan::Open; space.len() - 1];
            spans.push(AxisSpan::UpperClosed);
            Ok(box_faces(space, &[(0.0, *t_end)], &spans, n, strategy, &mut rng))
        }
        Geometry::Star { center, radius, .. } => {
            let thetas: Vec<f64> = match strategy {
                SamplingStrategy::GridEquispaced => {
                    (0..n).map(|i| 2.0 * PI * i as f64 / n as f64).collect()
                }
                SamplingStrategy::GridCellCentered => {
                    (0..n).map(|i| 2.0 * PI * (i as f64 + 0.5) / n as f64).collect()
                }
                SamplingStrategy::UniformRandom => {
                    (0..n).map(|_| 2.0 * PI * rng.random::<f64>()).collect()
                }
            };
            Ok(thetas
                .into_iter()
                .map(|t| {
                    let r = radius.at(t);
                    vec![center.0 + r * t.cos(), center.1 + r * t.sin()]
                })
                .collect())
        }
    }
}

/// Points on the faces of `space`, each face extended by `extra` axes.
fn box_faces(
    space: &[(f64, f64)],
    extra: &[(f64, f64)],
    spans: &[AxisSpan],
    n: usize,
    strategy: SamplingStrategy,
    rng: &mut ChaCha8Rng,
) -> Vec<Point> {
    let d = space.len();
    let faces = 2 * d;
    let mut out = Vec::with_capacity(n);
    for face in 0..faces {
        let count = n / faces + usize::from(face < n % faces);
        if count == 0 {
            continue;
        }
        let axis = face / 2;
        let fixed = if face % 2 == 0 { space[axis].0 } else { space[axis].1 };
        let sub: Vec<(f64, f64)> = space
            .iter()
            .enumerate()
            .filter(|&(a, _)| a != axis)
            .map(|(_, b)| *b)
            .chain(extra.iter().copied())
            .collect();
        for q in box_points(&sub, spans, count, strategy, rng) {
            let mut p = Vec::with_capacity(d + extra.len());
            p.extend_from_slice(&q[..axis]);
            p.push(fixed);
            p.extend_from_slice(&q[axis..]);
            out.push(p);
        }
    }
    out
}

/// `n` points on the `t = 0` slab of a space-time box (closed in space).
pub fn sample_initial(
    geom: &Geometry,
    n: usize,
    strategy: SamplingStrategy,
    seed: u64,
) -> Result<Vec<Point>> {
    require_positive(n, "initial")?;
    let Geometry::BoxTime { space, .. } = geom else {
        return Err(Error::InvalidArgument(
            "initial points only exist for space-time geometries".into(),
        ));
    };
    geom.validate()?;
    let mut rng = rng_for(seed, 2);
    let spans = vec![AxisSpan::Closed; space.len()];
    Ok(box_points(space, &spans, n, strategy, &mut rng)
        .into_iter()
        .map(|mut p| {
            p.push(0.0);
            p
        })
        .collect())
}

/// Equispaced evaluation grid including the end points, row-major.
pub fn evaluation_grid(bounds: &[(f64, f64)], per_axis: &[usize]) -> Vec<Point> {
    let spans = vec![AxisSpan::Closed; bounds.len()];
    let nodes: Vec<Vec<f64>> = bounds
        .iter()
        .zip(per_axis)
        .zip(&spans)
        .map(|((&(lo, hi), &m), &s)| axis_nodes(lo, hi, m, s, false))
        .collect();
    let total: usize = per_axis.iter().product();
    (0..total)
        .map(|mut flat| {
            let mut p = vec![0.0; bounds.len()];
            for a in (0..bounds.len()).rev() {
                p[a] = nodes[a][flat % per_axis[a]];
                flat /= per_axis[a];
            }
            p
        })
        .collect()
}
