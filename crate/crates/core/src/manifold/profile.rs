use std::f64::consts::E;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::spline::CubicSpline;
use crate::dimension::Dimension;
use crate::error::{Error, Result};
use crate::quadrature;

/// Below this radius the warping function is replaced by its odd Taylor
/// polynomial `r + a3 r^3 + a5 r^5 + a7 r^7`.
const POLE_RADIUS: f64 = 1e-2;

/// The warping function `f` of `g = dr^2 + f(r)^2 g_{S^{n-1}}`.
#[derive(Debug, Clone)]
pub enum Warp {
    /// `f = r`
    Euclidean,
    /// `f = sinh r`
    Hyperbolic,
    /// `f = tanh r`
    Cigar,
    /// `f = sin r`, valid for `r_max < π`
    Spherical,
    /// `f = r (1 + a r^2 exp(-b r^2))`
    PowerBump { a: f64, b: f64 },
    /// Sampled table, interpolated by a cubic spline clamped to `f'(0) = 1`.
    Table(WarpTable),
}

#[derive(Debug, Clone)]
pub struct WarpTable {
    spline: CubicSpline,
    a3: f64,
}

impl WarpTable {
    pub fn from_samples(r: Vec<f64>, f: Vec<f64>) -> Result<Self> {
        if r.len() < 8 || r.len() != f.len() {
            return Err(Error::SparseTable(format!(
                "need at least 8 matching (r, f) rows, got {} and {}",
                r.len(),
                f.len()
            )));
        }
        if r[0] != 0.0 {
            return Err(Error::InvalidProfile("table must start at r = 0".into()));
        }
        if r.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidProfile("table radii must be strictly increasing".into()));
        }
        if f[0].abs() > 1e-4 {
            return Err(Error::InvalidProfile(format!("f(0) = {} (must vanish at the pole)", f[0])));
        }
        let (x1, x2, y1, y2) = (r[1], r[2], f[1] - f[0], f[2] - f[0]);
        let slope = (y1 * x2 * x2 - y2 * x1 * x1) / (x1 * x2 * (x2 - x1));
        if (slope - 1.0).abs() > 1e-4 {
            return Err(Error::InvalidProfile(format!("f'(0) ≈ {slope} (must equal 1)")));
        }
        if let Some(i) = f.iter().skip(1).position(|v| *v <= 0.0) {
            return Err(Error::InvalidProfile(format!("f <= 0 at r = {}", r[i + 1])));
        }
        // a3 from a least-squares fit of f - r ≈ a3 r^3 + a5 r^5 near the pole.
        let near: Vec<(f64, f64)> = r
            .iter()
            .zip(&f)
            .skip(1)
            .take_while(|(ri, _)| **ri <= 0.5)
            .map(|(ri, fi)| (*ri, *fi))
            .collect();
        let a3 = if near.len() >= 3 {
            let (mut s33, mut s35, mut s55, mut b3, mut b5) = (0.0, 0.0, 0.0, 0.0, 0.0);
            for (ri, fi) in &near {
                let (p3, p5, y) = (ri.powi(3), ri.powi(5), fi - ri);
                s33 += p3 * p3;
                s35 += p3 * p5;
                s55 += p5 * p5;
                b3 += p3 * y;
                b5 += p5 * y;
            }
            let det = s33 * s55 - s35 * s35;
            if det.abs() > 0.0 {
                (b3 * s55 - b5 * s35) / det
            } else {
                b3 / s33
            }
        } else {
            0.0
        };
        let spline = CubicSpline::clamped_left(r, f, 1.0)?;
        Ok(WarpTable { spline, a3 })
    }

    /// Reads a two-column CSV with header `r,f`.
    pub fn from_csv(path: &Path) -> Result<Self> {
        #[derive(Deserialize)]
        struct Row {
            r: f64,
            f: f64,
        }
        let mut rdr = csv::Reader::from_path(path)?;
        let headers = rdr.headers()?.clone();
        if headers.len() != 2 || &headers[0] != "r" || &headers[1] != "f" {
            return Err(Error::InvalidProfile(format!(
                "table header must be `r,f`, found `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let (mut r, mut f) = (Vec::new(), Vec::new());
        for row in rdr.deserialize() {
            let row: Row = row?;
            r.push(row.r);
            f.push(row.f);
        }
        Self::from_samples(r, f)
    }

    pub fn last_radius(&self) -> f64 {
        *self.spline.knots().last().unwrap()
    }
}

/// Value and first two derivatives of the warping function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WarpValue {
    pub f: f64,
    pub df: f64,
    pub d2f: f64,
}

impl Warp {
    pub fn name(&self) -> &'static str {
        match self {
            Warp::Euclidean => "euclidean",
            Warp::Hyperbolic => "hyperbolic",
            Warp::Cigar => "cigar",
            Warp::Spherical => "spherical",
            Warp::PowerBump { .. } => "power-bump",
            Warp::Table(_) => "table",
        }
    }

    /// Odd Taylor coefficients `(a3, a5, a7)` of `f` at the pole.
    fn series(&self) -> [f64; 3] {
        match self {
            Warp::Euclidean => [0.0, 0.0, 0.0],
            Warp::Hyperbolic => [1.0 / 6.0, 1.0 / 120.0, 1.0 / 5040.0],
            Warp::Cigar => [-1.0 / 3.0, 2.0 / 15.0, -17.0 / 315.0],
            Warp::Spherical => [-1.0 / 6.0, 1.0 / 120.0, -1.0 / 5040.0],
            Warp::PowerBump { a, b } => [*a, -a * b, a * b * b / 2.0],
            Warp::Table(t) => [t.a3, 0.0, 0.0],
        }
    }

    fn exact(&self, r: f64) -> WarpValue {
        match self {
            Warp::Euclidean => WarpValue { f: r, df: 1.0, d2f: 0.0 },
            Warp::Hyperbolic => WarpValue { f: r.sinh(), df: r.cosh(), d2f: r.sinh() },
            Warp::Cigar => {
                let t = r.tanh();
                let s2 = 1.0 - t * t;
                WarpValue { f: t, df: s2, d2f: -2.0 * t * s2 }
            }
            Warp::Spherical => WarpValue { f: r.sin(), df: r.cos(), d2f: -r.sin() },
            Warp::PowerBump { a, b } => {
                let r2 = r * r;
                let e = (-b * r2).exp();
                // f = r + a r^3 e
                let f = r + a * r2 * r * e;
                let df = 1.0 + a * e * (3.0 * r2 - 2.0 * b * r2 * r2);
                let d2f = a * e * (6.0 * r - 14.0 * b * r2 * r + 4.0 * b * b * r2 * r2 * r);
                WarpValue { f, df, d2f }
            }
            Warp::Table(t) => {
                let (f, df, d2f) = t.spline.eval(r);
                WarpValue { f, df, d2f }
            }
        }
    }

    pub fn eval(&self, r: f64) -> WarpValue {
        if r < POLE_RADIUS && !matches!(self, Warp::Table(_)) {
            let [a3, a5, a7] = self.series();
            let r2 = r * r;
            WarpValue {
                f: r * (1.0 + r2 * (a3 + r2 * (a5 + r2 * a7))),
                df: 1.0 + r2 * (3.0 * a3 + r2 * (5.0 * a5 + r2 * 7.0 * a7)),
                d2f: r * (6.0 * a3 + r2 * (20.0 * a5 + r2 * 42.0 * a7)),
            }
        } else {
            self.exact(r)
        }
    }
}

/// A rotationally symmetric model manifold.
#[derive(Debug, Clone)]
pub struct MetricProfile {
    dim: Dimension,
    warp: Warp,
    r_max: f64,
}

/// Result of fitting `log V` against `log r` on a window.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GrowthFit {
    pub rho: f64,
    pub residual: f64,
    /// RMS residual of the competing `log V` vs `r` fit.
    pub exponential_residual: f64,
    /// False when the log-log residual exceeds the polynomial-growth threshold.
    pub polynomial: bool,
    pub window: [f64; 2],
}

pub const GROWTH_RESIDUAL_THRESHOLD: f64 = 1e-2;

impl MetricProfile {
    pub fn new(dim: Dimension, warp: Warp, r_max: f64) -> Result<Self> {
        if !(r_max.is_finite() && r_max > 0.0) {
            return Err(Error::InvalidProfile(format!("r_max must be positive and finite, got {r_max}")));
        }
        match &warp {
            Warp::PowerBump { a, b } => {
                if !(*b > 0.0) {
                    return Err(Error::InvalidProfile(format!("power-bump needs b > 0, got {b}")));
                }
                // min of r^2 exp(-b r^2) is attained at r^2 = 1/b with value 1/(b e)
                if !(*a > -b * E) {
                    return Err(Error::InvalidProfile(format!(
                        "power-bump needs a > -b·e = {}, got a = {a}",
                        -b * E
                    )));
                }
            }
            Warp::Spherical if r_max >= std::f64::consts::PI => {
                return Err(Error::InvalidProfile("spherical warp requires r_max < π".into()));
            }
            Warp::Hyperbolic if r_max * (dim.nf() - 1.0) > 600.0 => {
                return Err(Error::InvalidProfile(format!(
                    "hyperbolic volume density overflows beyond r = {}",
                    600.0 / (dim.nf() - 1.0)
                )));
            }
            Warp::Table(t) if r_max > t.last_radius() + 1e-12 => {
                return Err(Error::InvalidProfile(format!(
                    "r_max = {r_max} exceeds the last table radius {}",
                    t.last_radius()
                )));
            }
            _ => {}
        }
        let profile = MetricProfile { dim, warp, r_max };
        let w0 = profile.warp.exact(0.0);
        let tol = if matches!(profile.warp, Warp::Table(_)) { 1e-4 } else { 1e-8 };
        if w0.f.abs() > tol || (w0.df - 1.0).abs() > tol {
            return Err(Error::InvalidProfile(format!(
                "pole regularity fails: f(0) = {}, f'(0) = {}",
                w0.f, w0.df
            )));
        }
        let samples = 4096;
        for k in 1..=samples {
            let r = profile.r_max * (k as f64 / samples as f64).powi(2);
            if !(profile.warp.eval(r).f > 0.0) {
                return Err(Error::InvalidProfile(format!("f(r) <= 0 at r = {r}")));
            }
        }
        Ok(profile)
    }

    pub fn euclidean(n: u32, r_max: f64) -> Result<Self> {
        Self::new(Dimension::new(n)?, Warp::Euclidean, r_max)
    }

    pub fn hyperbolic(n: u32, r_max: f64) -> Result<Self> {
        Self::new(Dimension::new(n)?, Warp::Hyperbolic, r_max)
    }

    pub fn power_bump(n: u32, a: f64, b: f64, r_max: f64) -> Result<Self> {
        Self::new(Dimension::new(n)?, Warp::PowerBump { a, b }, r_max)
    }

    pub fn dim(&self) -> Dimension {
        self.dim
    }

    pub fn warp(&self) -> &Warp {
        &self.warp
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    /// True when the metric is exactly flat.
    pub fn is_flat(&self) -> bool {
        matches!(self.warp, Warp::Euclidean) || matches!(self.warp, Warp::PowerBump { a, .. } if a == 0.0)
    }

    fn check(&self, r: f64) -> Result<()> {
        if !(0.0..=self.r_max).contains(&r) {
            return Err(Error::OutOfDomain { r, r_max: self.r_max });
        }
        Ok(())
    }

    pub fn warp_at(&self, r: f64) -> Result<WarpValue> {
        self.check(r)?;
        Ok(self.warp.eval(r))
    }

    /// `ω_{n-1} f(r)^{n-1}`, the area of the geodesic sphere of radius `r`.
    pub fn area_density(&self, r: f64) -> f64 {
        self.dim.angular_area() * self.warp.eval(r).f.powi(self.dim.n() as i32 - 1)
    }

    /// Scalar curvature of the warped product,
    /// `R = -2(n-1) f''/f + (n-1)(n-2)(1 - f'^2)/f^2`, with the pole limit
    /// `-6 n (n-1) a3` taken from the Taylor coefficients.
    pub fn scalar_curvature(&self, r: f64) -> Result<f64> {
        self.check(r)?;
        Ok(self.curvature_unchecked(r))
    }

    pub(crate) fn curvature_unchecked(&self, r: f64) -> f64 {
        let n = self.dim.nf();
        let table = matches!(self.warp, Warp::Table(_));
        if (table && r == 0.0) || (!table && r < POLE_RADIUS) {
            let [a3, a5, a7] = self.warp.series();
            let r2 = r * r;
            let q = 1.0 + r2 * (a3 + r2 * (a5 + r2 * a7));
            let ddf_over_f = (6.0 * a3 + r2 * (20.0 * a5 + r2 * 42.0 * a7)) / q;
            // 1 - f'^2 = -(2g + g^2) with g = f' - 1 = r^2 gr
            let gr = 3.0 * a3 + r2 * (5.0 * a5 + r2 * 7.0 * a7);
            let one_minus = -(2.0 * gr + r2 * gr * gr) / (q * q);
            -2.0 * (n - 1.0) * ddf_over_f + (n - 1.0) * (n - 2.0) * one_minus
        } else {
            let w = self.warp.eval(r);
            -2.0 * (n - 1.0) * w.d2f / w.f + (n - 1.0) * (n - 2.0) * (1.0 - w.df * w.df) / (w.f * w.f)
        }
    }

    /// `∫_a^b ω f^{n-1} dr` by composite Gauss–Legendre.
    pub(crate) fn shell_volume(&self, a: f64, b: f64) -> f64 {
        let g = |t: f64| self.area_density(t);
        if b <= a {
            return 0.0;
        }
        let exponential = matches!(self.warp, Warp::Hyperbolic);
        let mut acc = 0.0;
        let mut lo = a;
        while lo < b {
            let mut w = (0.02 * lo).max(0.25);
            if exponential {
                w = w.min(2.0);
            }
            let hi = (lo + w).min(b);
            acc += quadrature::gauss8(&g, lo, hi);
            lo = hi;
        }
        acc
    }

    /// Volume of the geodesic ball `B_r(O)`.
    pub fn ball_volume(&self, r: f64) -> Result<f64> {
        self.check(r)?;
        Ok(self.shell_volume(0.0, r))
    }

    /// Least-squares slope of `log V` vs `log r` on `[lo, hi]`, minus `n`.
    pub fn volume_growth_exponent(&self, lo: f64, hi: f64) -> Result<GrowthFit> {
        if !(lo > 0.0 && hi > lo) {
            return Err(Error::InvalidArgument(format!("bad growth window [{lo}, {hi}]")));
        }
        self.check(hi)?;
        let samples = 16;
        let mut xs = Vec::with_capacity(samples);
        let mut ls = Vec::with_capacity(samples);
        let mut ys = Vec::with_capacity(samples);
        let mut prev_r = 0.0;
        let mut vol = 0.0;
        for k in 0..samples {
            let r = lo * (hi / lo).powf(k as f64 / (samples - 1) as f64);
            vol += self.shell_volume(prev_r, r);
            prev_r = r;
            xs.push(r.ln());
            ls.push(r);
            ys.push(vol.ln());
        }
        let (slope, _, residual) = linear_fit(&xs, &ys);
        let (_, _, exp_residual) = linear_fit(&ls, &ys);
        if exp_residual < residual {
            return Err(Error::ExponentialGrowth { lo, hi });
        }
        Ok(GrowthFit {
            rho: slope - self.dim.nf(),
            residual,
            exponential_residual: exp_residual,
            polynomial: residual <= GROWTH_RESIDUAL_THRESHOLD,
            window: [lo, hi],
        })
    }

    /// Smallest `C` with `R_g >= -C r^{-2}` on `[lo, hi]` (zero when `R_g >= 0` there).
    pub fn curvature_decay_constant(&self, lo: f64, hi: f64, samples: usize) -> Result<f64> {
        self.check(hi)?;
        let mut c: f64 = 0.0;
        for k in 0..samples.max(2) {
            let r = lo + (hi - lo) * k as f64 / (samples.max(2) - 1) as f64;
            let rc = self.curvature_unchecked(r);
            c = c.max(-rc * r * r);
        }
        Ok(c)
    }
}

/// Ordinary least squares `y ≈ a x + b`; returns `(a, b, rms residual)`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let a = sxy / sxx;
    let b = my - a * mx;
    let rss: f64 = x.iter().zip(y).map(|(xi, yi)| (yi - a * xi - b).powi(2)).sum();
    (a, b, (rss / n).sqrt())
}
