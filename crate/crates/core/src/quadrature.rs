//! Composite Gauss–Legendre quadrature for smooth integrands on bounded intervals.

const GL8_NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL8_WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// Eight-point Gauss–Legendre rule on `[a, b]`; exact for polynomials of degree 15.
pub fn gauss8<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for (x, w) in GL8_NODES.iter().zip(GL8_WEIGHTS.iter()) {
        acc += w * (f(mid - half * x) + f(mid + half * x));
    }
    acc * half
}

/// Panels whose width grows geometrically away from `a`; suited to integrands
/// spanning many decades of radius.
pub fn graded<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, first: f64, ratio: f64) -> f64 {
    let mut acc = 0.0;
    let mut lo = a;
    let mut w = first;
    while lo < b {
        let hi = (lo + w).min(b);
        acc += gauss8(f, lo, hi);
        lo = hi;
        w *= ratio;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn polynomial_exactness() {
        let v = gauss8(&|x: f64| x.powi(15) + 3.0 * x.powi(4), 0.0, 2.0);
        assert_relative_eq!(v, 2f64.powi(16) / 16.0 + 3.0 * 32.0 / 5.0, max_relative = 1e-14);
    }

    #[test]
    fn graded_decades() {
        let g = graded(&|x: f64| 1.0 / (x * x), 1.0, 1e6, 0.05, 1.2);
        assert_relative_eq!(g, 1.0 - 1e-6, max_relative = 1e-12);
    }
}
