//! Second-order jets in two variables and hand-written exact solutions,
//! independent of the closures in the problem registry.
#![allow(dead_code)]

use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use pimwnn::ProblemSpec;

/// Value, gradient and Hessian of a function of `(p0, p1)`.
#[derive(Clone, Copy, Debug)]
pub struct Jet {
    pub v: f64,
    pub d: [f64; 2],
    pub h: [[f64; 2]; 2],
}

impl Jet {
    pub fn constant(v: f64) -> Self {
        Self {
            v,
            d: [0.0; 2],
            h: [[0.0; 2]; 2],
        }
    }

    pub fn var(v: f64, axis: usize) -> Self {
        let mut j = Self::constant(v);
        j.d[axis] = 1.0;
        j
    }

    /// `g(self)` given `g`, `g'`, `g''` at `self.v`.
    fn chain(self, g: f64, g1: f64, g2: f64) -> Self {
        let mut out = Self::constant(g);
        for i in 0..2 {
            out.d[i] = g1 * self.d[i];
            for j in 0..2 {
                out.h[i][j] = g2 * self.d[i] * self.d[j] + g1 * self.h[i][j];
            }
        }
        out
    }

    pub fn sin(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(s, c, -s)
    }

    pub fn cos(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(c, -s, -c)
    }

    pub fn exp(self) -> Self {
        let e = self.v.exp();
        self.chain(e, e, e)
    }

    pub fn atan(self) -> Self {
        let w = 1.0 + self.v * self.v;
        self.chain(self.v.atan(), 1.0 / w, -2.0 * self.v / (w * w))
    }

    pub fn sq(self) -> Self {
        self * self
    }

    /// Partial derivative by per-axis orders (total order at most 2).
    pub fn partial(&self, orders: &[usize]) -> f64 {
        let o: Vec<usize> = (0..2).map(|i| orders.get(i).copied().unwrap_or(0)).collect();
        match (o[0], o[1]) {
            (0, 0) => self.v,
            (1, 0) => self.d[0],
            (0, 1) => self.d[1],
            (2, 0) => self.h[0][0],
            (0, 2) => self.h[1][1],
            (1, 1) => self.h[0][1],
            other => panic!("jet has no derivative {other:?}"),
        }
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        let mut r = self;
        r.v += o.v;
        for i in 0..2 {
            r.d[i] += o.d[i];
            for j in 0..2 {
                r.h[i][j] += o.h[i][j];
            }
        }
        r
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self * -1.0
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        self + -o
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        let mut r = Jet::constant(self.v * o.v);
        for i in 0..2 {
            r.d[i] = self.v * o.d[i] + o.v * self.d[i];
            for j in 0..2 {
                r.h[i][j] = self.v * o.h[i][j] + o.v * self.h[i][j] + self.d[i] * o.d[j] + self.d[j] * o.d[i];
            }
        }
        r
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, s: f64) -> Jet {
        let mut r = self;
        r.v *= s;
        for i in 0..2 {
            r.d[i] *= s;
            for j in 0..2 {
                r.h[i][j] *= s;
            }
        }
        r
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(self, s: f64) -> Jet {
        let mut r = self;
        r.v += s;
        r
    }
}

fn c(v: f64) -> Jet {
    Jet::constant(v)
}

/// Exact solution of a registered linear problem (default parameters) as
/// a jet at `p`; `None` for problems without a smooth closed form.
pub fn exact_jet(name: &str, p: &[f64]) -> Option<Jet> {
    let x = Jet::var(p[0], 0);
    let y = Jet::var(p.get(1).copied().unwrap_or(0.0), 1);
    Some(match name {
        "repr_f2" => ((x.sq() + y.sq()) * -20.0).exp(),
        "adv1d" => (x * (2.0 * PI)).sin() * (x * (4.0 * PI)).cos() + 1.0,
        "diff1d" => (x * (0.5 * PI)).sin() * (x * (2.0 * PI)).cos() + 1.0,
        "advdiff1d" => {
            let v: f64 = 0.25;
            let tail = (-1.0 / v).exp();
            (((x + -1.0) * (1.0 / v)).exp() + (-tail)) * (1.0 / (1.0 - tail))
        }
        "helmholtz1d" => (x.sq() + 1.0) * 0.5 * ((x * x * x) * 40.0 + -24.0).cos().exp(),
        "adv2d" => (x * PI).cos() * (y * PI).sin() * 0.5,
        "diff2d" => ((x.sq() * 2.0 + y.sq() * 4.0) * -1.0).exp() + 0.5,
        "flower_diff" => {
            let q = c(0.0625) - (x + -0.5).sq() - (y + -0.5).sq();
            x * (c(1.0) - x) * y * (c(1.0) - y) * 16.0 * ((q * 20.0).atan() * (1.0 / PI) + 0.5)
        }
        // second variable is time
        "adv_space_time_packet" => {
            let z = x - y;
            (z.sq() * -5.0).exp() * (z * (10.0 * PI)).sin()
        }
        "adv_space_time_gauss" => ((x - y).sq() * -50.0).exp(),
        "growing_diffusion" => {
            let k = 2.0 * PI;
            y.exp() * ((x * k).sin() - (x * k).cos())
        }
        _ => return None,
    })
}

/// `L u - f` and `|f|` at `p`, with `u` from [`exact_jet`].
pub fn manufactured_residual(problem: &ProblemSpec, p: &[f64]) -> Option<(f64, f64)> {
    let jet = exact_jet(&problem.name, p)?;
    let op = problem.operator().ok()?;
    let lu = op.apply(p, |_, orders| jet.partial(orders));
    let f = (problem.source)(p);
    Some((lu - f, f.abs()))
}
