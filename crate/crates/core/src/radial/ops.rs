use super::field::{Boundary, RadialField};
use super::operator::RadialOperator;
use crate::error::{Error, Result};
use crate::manifold::MetricProfile;

/// Finite-volume operator on the nodes of `u`'s grid.
pub fn operator_for(u: &RadialField, profile: &MetricProfile) -> Result<RadialOperator> {
    RadialOperator::new(u.grid().nodes(), profile)
}

/// `Δ_g u = u'' + (n-1)(f'/f) u'`, returned as a free field.
///
/// Flux form at every node but the last; the outer node uses second-order
/// one-sided differences of the pointwise formula.
pub fn laplace_beltrami(u: &RadialField, profile: &MetricProfile) -> Result<RadialField> {
    let op = operator_for(u, profile)?;
    let v = u.values();
    let mut lap = op.laplacian(v);
    let nn = v.len() - 1;
    let h = u.grid().h();
    let r = u.grid().radius();
    let d1 = (3.0 * v[nn] - 4.0 * v[nn - 1] + v[nn - 2]) / (2.0 * h);
    let d2 = (2.0 * v[nn] - 5.0 * v[nn - 1] + 4.0 * v[nn - 2] - v[nn - 3]) / (h * h);
    let w = profile.warp_at(r)?;
    lap[nn] = d2 + (profile.dim().nf() - 1.0) * w.df / w.f * d1;
    RadialField::new(u.grid(), lap, Boundary::Free)
}

/// `(∫ |u|^s dV)^{1/s}` with the lumped dual-cell quadrature.
pub fn lp_norm(u: &RadialField, s: f64, profile: &MetricProfile) -> Result<f64> {
    if !(s >= 1.0) {
        return Err(Error::InvalidArgument(format!("norm exponent must be at least 1, got {s}")));
    }
    Ok(operator_for(u, profile)?.lp_norm(u.values(), s))
}

/// `∫ |∇u|^2 dV`.
pub fn gradient_energy(u: &RadialField, profile: &MetricProfile) -> Result<f64> {
    Ok(operator_for(u, profile)?.gradient_energy(u.values()))
}

/// `E_g(u) = ∫ |∇u|^2 + c(n) R_g u^2 dV`, defined only for fields vanishing at `r = j`.
pub fn yamabe_energy(u: &RadialField, profile: &MetricProfile) -> Result<f64> {
    if !u.vanishes_at_boundary() {
        return Err(Error::InvalidField(
            "energy needs a field vanishing at the outer radius (compact support)".into(),
        ));
    }
    Ok(operator_for(u, profile)?.energy(u.values()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::RadialGrid;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn flat3() -> MetricProfile {
        MetricProfile::euclidean(3, 100.0).unwrap()
    }

    #[test]
    fn laplacian_of_constant_vanishes() {
        let p = MetricProfile::hyperbolic(3, 10.0).unwrap();
        let g = RadialGrid::new(3.0, 64).unwrap();
        let u = RadialField::from_fn(g, Boundary::Free, |_| 1.0).unwrap();
        let lap = laplace_beltrami(&u, &p).unwrap();
        assert!(lap.values().iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn hyperbolic_cosine() {
        // Δ cos r = -cos r - 2 coth r sin r on H^3.
        let p = MetricProfile::hyperbolic(3, 10.0).unwrap();
        let g = RadialGrid::new(2.0, 2048).unwrap();
        let u = RadialField::from_fn(g, Boundary::Free, f64::cos).unwrap();
        let lap = laplace_beltrami(&u, &p).unwrap();
        for i in [256, 512, 1024, 1536, 2048] {
            let r = g.node(i);
            let exact = -r.cos() - 2.0 * r.sin() / r.tanh();
            assert!((lap.values()[i] - exact).abs() < 1e-5, "r={r}");
        }
    }

    #[test]
    fn norms() {
        let g = RadialGrid::new(1.0, 256).unwrap();
        let one = RadialField::from_fn(g, Boundary::Free, |_| 1.0).unwrap();
        assert_relative_eq!(lp_norm(&one, 2.0, &flat3()).unwrap(), (4.0 * PI / 3.0).sqrt(), max_relative = 1e-12);
        let lin = RadialField::from_fn(g, Boundary::Free, |r| r).unwrap();
        assert_relative_eq!(lp_norm(&lin, 6.0, &flat3()).unwrap(), (4.0 * PI / 9.0).powf(1.0 / 6.0), max_relative = 1e-4);
        assert!(lp_norm(&lin, 0.5, &flat3()).is_err());
    }

    #[test]
    fn energy_of_sine() {
        let g = RadialGrid::new(1.0, 1024).unwrap();
        let u = RadialField::from_fn(g, Boundary::DirichletZero, |r| (PI * r).sin()).unwrap();
        let exact = 4.0 * PI * PI * PI * (1.0 / 6.0 + 1.0 / (4.0 * PI * PI));
        assert_relative_eq!(yamabe_energy(&u, &flat3()).unwrap(), exact, max_relative = 1e-5);
        let free = RadialField::from_fn(g, Boundary::Free, |r| 1.0 + r).unwrap();
        assert!(yamabe_energy(&free, &flat3()).is_err());
    }
}
