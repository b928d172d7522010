//! Blow-up rescaling of concentrating fields and diagnostics against the
//! standard bubble.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::dimension::Dimension;
use crate::error::{Error, Result};
use crate::functional::lambda_constant;
use crate::manifold::{linear_fit, CubicSpline, MetricProfile};
use crate::radial::RadialField;

/// Default half-width of the comparison window, in rescaled units.
pub const WINDOW: f64 = 5.0;

/// Uniform samples `v(k h)`, `k = 0..len`, of a radial function on `[0, R]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialSamples {
    pub n: u32,
    pub h: f64,
    pub values: Vec<f64>,
}

impl RadialSamples {
    pub fn from_fn(n: u32, radius: f64, intervals: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        Dimension::new(n)?;
        if !(radius > 0.0) || intervals < 4 {
            return Err(Error::InvalidArgument("samples need a positive radius and at least 4 intervals".into()));
        }
        let h = radius / intervals as f64;
        Ok(RadialSamples { n, h, values: (0..=intervals).map(|k| f(k as f64 * h)).collect() })
    }

    pub fn radius(&self) -> f64 {
        self.h * (self.values.len() - 1) as f64
    }

    pub fn radii(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.values.len()).map(move |k| k as f64 * self.h)
    }

    /// Samples up to the node nearest `radius`.
    pub fn truncated(&self, radius: f64) -> Result<RadialSamples> {
        let k = (radius / self.h).round() as usize;
        if k < 4 || k >= self.values.len() {
            return Err(Error::InvalidArgument(format!(
                "radius {radius} outside the sampled range (0, {}]",
                self.radius()
            )));
        }
        Ok(RadialSamples { n: self.n, h: self.h, values: self.values[..=k].to_vec() })
    }

    /// Fourth-order differences; the samples are reflected evenly through `r = 0`.
    pub fn derivative(&self) -> Vec<f64> {
        let v = &self.values;
        let len = v.len();
        let at = |k: isize| v[k.unsigned_abs()];
        (0..len as isize)
            .map(|k| {
                if k + 2 < len as isize {
                    (at(k - 2) - 8.0 * at(k - 1) + 8.0 * at(k + 1) - at(k + 2)) / (12.0 * self.h)
                } else {
                    let j = k as usize;
                    if k + 1 < len as isize {
                        (-3.0 * v[j + 1] - 10.0 * v[j] + 18.0 * v[j - 1] - 6.0 * v[j - 2] + v[j - 3]) / (-12.0 * self.h)
                    } else {
                        (25.0 * v[j] - 48.0 * v[j - 1] + 36.0 * v[j - 2] - 16.0 * v[j - 3] + 3.0 * v[j - 4]) / (12.0 * self.h)
                    }
                }
            })
            .collect()
    }

    /// `|S^{n-1}| ∫_0^R g(r) r^{n-1} dr` by Simpson's rule (3/8 rule on the last
    /// three intervals when the count is odd).
    pub fn ball_integral(&self, g: impl Fn(usize) -> f64) -> f64 {
        let n = self.n as i32;
        let f: Vec<f64> = (0..self.values.len()).map(|k| g(k) * (k as f64 * self.h).powi(n - 1)).collect();
        let omega = Dimension::new(self.n).expect("validated").angular_area();
        omega * simpson(self.h, &f)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["x", "v"])?;
        for (x, v) in self.radii().zip(&self.values) {
            wtr.write_record([format!("{x:.17e}"), format!("{v:.17e}")])?;
        }
        wtr.flush()?;
        Ok(())
    }
}

fn simpson(h: f64, f: &[f64]) -> f64 {
    let m = f.len() - 1;
    let (even, rest) = if m.is_multiple_of(2) { (m, 0) } else { (m - 3, 3) };
    let mut s = 0.0;
    for k in (0..even).step_by(2) {
        s += f[k] + 4.0 * f[k + 1] + f[k + 2];
    }
    s *= h / 3.0;
    if rest == 3 {
        let k = even;
        s += 3.0 * h / 8.0 * (f[k] + 3.0 * f[k + 1] + 3.0 * f[k + 2] + f[k + 3]);
    }
    s
}

/// `v(x) = m^{-1} u(x_c + δ x)` with `δ = m^{1 - p/2}`, sampled on `[0, window]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RescaledField {
    pub m: f64,
    pub delta: f64,
    pub center: f64,
    /// Distance from the center to `∂B_j` in rescaled units.
    pub rho: f64,
    pub window: f64,
    pub samples: RadialSamples,
}

impl RescaledField {
    /// `sup |v - standard_bubble(n, y, ·)|` over the window.
    pub fn bubble_deviation(&self, y: f64) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for (x, v) in self.samples.radii().zip(&self.samples.values) {
            worst = worst.max((v - standard_bubble(self.samples.n, y, x)?).abs());
        }
        Ok(worst)
    }
}

/// Rescales `u` about its maximum. The window is `min(5, ρ/2)` rescaled units
/// and the samples come from a cubic spline through the nodes, clipped to `[0, 1]`.
pub fn rescale(u: &RadialField, profile: &MetricProfile) -> Result<RescaledField> {
    rescale_with_window(u, profile, WINDOW)
}

pub fn rescale_with_window(u: &RadialField, profile: &MetricProfile, window: f64) -> Result<RescaledField> {
    let grid = u.grid();
    let (m, k) = u.max();
    if !(m > 0.0) {
        return Err(Error::InvalidField("rescaling needs a field with a positive maximum".into()));
    }
    if k + 1 == grid.len() {
        return Err(Error::MaxAtBoundary(grid.node(k)));
    }
    let dim = profile.dim();
    let delta = m.powf(1.0 - dim.critical_exponent() / 2.0);
    let center = grid.node(k);
    let rho = (grid.radius() - center) / delta;
    let window = window.min(rho / 2.0);
    let v = u.values();
    let (xs, ys) = ((k..grid.len()).map(|i| grid.node(i)).collect::<Vec<_>>(), v[k..].to_vec());
    if xs.len() < 3 {
        return Err(Error::MaxAtBoundary(center));
    }
    let slope = if k == 0 { 0.0 } else { (v[k + 1] - v[k - 1]) / (2.0 * grid.h()) };
    let spline = CubicSpline::clamped_left(xs, ys, slope)?;
    let step = grid.h() / delta;
    let intervals = ((2.0 * window / step).ceil() as usize).max(200);
    let mut samples = RadialSamples::from_fn(dim.n(), window, intervals, |x| {
        (spline.eval(center + delta * x).0 / m).clamp(0.0, 1.0)
    })?;
    samples.values[0] = 1.0;
    Ok(RescaledField { m, delta, center, rho, window, samples })
}

/// `(1 + Y x² / (n(n-2)))^{-(n-2)/2}`, the entire solution of `Δv + Y v^{p-1} = 0` with `v(0) = 1`.
pub fn standard_bubble(n: u32, y: f64, x: f64) -> Result<f64> {
    let nf = Dimension::new(n)?.nf();
    if !(y > 0.0) {
        return Err(Error::InvalidArgument(format!("the standard bubble needs Y > 0, got {y}")));
    }
    Ok((1.0 + y * x * x / (nf * (nf - 2.0))).powf(-(nf - 2.0) / 2.0))
}

/// `d/dx` of [`standard_bubble`].
pub fn standard_bubble_slope(n: u32, y: f64, x: f64) -> Result<f64> {
    let nf = n as f64;
    let b = standard_bubble(n, y, x)?;
    Ok(-y * x / nf * b.powf(nf / (nf - 2.0)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub r_ball: f64,
    /// `∫_{B_R} |∇v|^2`.
    pub gradient: f64,
    /// `Y ∫_{B_R} v^p`.
    pub potential: f64,
    /// `∮_{∂B_R} v ∂_r v`.
    pub flux: f64,
    pub defect: f64,
    pub relative_defect: f64,
    /// `∫_{B_R} v^p`.
    pub lp_integral: f64,
}

/// Checks `∫_{B_R} |∇v|^2 = Y ∫_{B_R} v^p + ∮ v ∂_r v` on flat `B_R`.
pub fn energy_identity_check(v: &RadialSamples, y: f64, r_ball: f64) -> Result<IdentityReport> {
    let v = v.truncated(r_ball)?;
    let p = Dimension::new(v.n)?.critical_exponent();
    let d = v.derivative();
    let gradient = v.ball_integral(|k| d[k] * d[k]);
    let lp_integral = v.ball_integral(|k| v.values[k].abs().powf(p));
    let r = v.radius();
    let last = v.values.len() - 1;
    let omega = Dimension::new(v.n)?.angular_area();
    let flux = omega * r.powi(v.n as i32 - 1) * v.values[last] * d[last];
    let potential = y * lp_integral;
    let defect = gradient - potential - flux;
    Ok(IdentityReport {
        r_ball: r,
        gradient,
        potential,
        flux,
        defect,
        relative_defect: defect.abs() / gradient.abs().max(f64::MIN_POSITIVE),
        lp_integral,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ContradictionVerdict {
    ConsistentWithContradiction,
    Violated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContradictionReport {
    pub y: f64,
    /// `Λ(n)`.
    pub lhs: f64,
    /// `Y (∫ v^p)^{2/n}` with the full-space integral.
    pub rhs: f64,
    pub rhs_error: f64,
    pub lp_ball: f64,
    pub lp_tail: f64,
    pub lp_total: f64,
    /// Tail exponent fitted without constraint, against the bubble's `(2-n)p + n - 1`.
    pub tail_slope: f64,
    pub expected_slope: f64,
    pub verdict: ContradictionVerdict,
}

/// Relative slack in `Λ <= Y (∫ v^p)^{2/n}`.
pub const CONTRADICTION_TOL: f64 = 1e-2;

/// Evaluates `Λ <= Y (∫ v^p)^{2/n}`, extending `∫ v^p` past the samples with the
/// bubble tail `C r^{(2-n)p+n-1}` fitted on the outer quarter.
pub fn contradiction_test(v: &RadialSamples, y: f64) -> Result<ContradictionReport> {
    let dim = Dimension::new(v.n)?;
    let (nf, p) = (dim.nf(), dim.critical_exponent());
    let lambda = lambda_constant(v.n)?;
    let omega = dim.angular_area();
    let len = v.values.len();
    let first = 3 * len / 4;
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for k in first..len {
        let r = k as f64 * v.h;
        let val = v.values[k];
        if !(val > 0.0) {
            return Err(Error::TailRefused(format!("nonpositive sample v({r}) = {val}")));
        }
        xs.push(r.ln());
        ys.push((omega * r.powf(nf - 1.0) * val.powf(p)).ln());
    }
    if xs.len() < 4 {
        return Err(Error::TailRefused("fewer than 4 tail samples".into()));
    }
    let expected = (2.0 - nf) * p + nf - 1.0;
    let (slope, _, _) = linear_fit(&xs, &ys);
    if (slope - expected).abs() > 0.5 {
        return Err(Error::TailRefused(format!(
            "tail exponent {slope:.3} is not the bubble rate {expected:.3}"
        )));
    }
    let r = v.radius();
    let log_c = ys.iter().zip(&xs).map(|(y, x)| y - expected * x).sum::<f64>() / xs.len() as f64;
    let lp_tail = log_c.exp() * r.powf(expected + 1.0) / -(expected + 1.0);
    let free_tail = if slope < -1.0 {
        let last = ys.len() - 1;
        (ys[last] - slope * xs[last]).exp() * r.powf(slope + 1.0) / -(slope + 1.0)
    } else {
        f64::INFINITY
    };
    let tail_error = (free_tail - lp_tail).abs();
    let lp_ball = v.ball_integral(|k| v.values[k].powf(p));
    let lp_total = lp_ball + lp_tail;
    let rhs = y * lp_total.powf(2.0 / nf);
    let rhs_error = y * (2.0 / nf) * lp_total.powf(2.0 / nf - 1.0) * tail_error;
    let verdict = if lambda <= rhs * (1.0 + CONTRADICTION_TOL) + rhs_error {
        ContradictionVerdict::ConsistentWithContradiction
    } else {
        ContradictionVerdict::Violated
    };
    Ok(ContradictionReport {
        y,
        lhs: lambda,
        rhs,
        rhs_error,
        lp_ball,
        lp_tail,
        lp_total,
        tail_slope: slope,
        expected_slope: expected,
        verdict,
    })
}
