//! Gauss rules on the unit interval and the reference triangle.
//!
//! The triangle rules are collapsed (Duffy) tensor products of Gauss–Legendre
//! rules: all weights are positive and all points lie strictly inside.

use std::sync::OnceLock;

use crate::{Error, Result};

/// Highest exactness degree offered on the reference triangle.
pub const MAX_TRIANGLE_DEGREE: usize = 24;
/// Highest exactness degree offered on the unit interval.
pub const MAX_EDGE_DEGREE: usize = 39;

const MAX_GL_POINTS: usize = 20;

/// Points and weights of a quadrature rule.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule<P> {
    pub points: Vec<P>,
    pub weights: Vec<f64>,
}

impl<P> QuadratureRule<P> {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    static CACHE: OnceLock<Vec<(Vec<f64>, Vec<f64>)>> = OnceLock::new();
    if (1..=MAX_GL_POINTS).contains(&n) {
        let cache = CACHE.get_or_init(|| (1..=MAX_GL_POINTS).map(compute_gauss_legendre).collect());
        return cache[n - 1].clone();
    }
    compute_gauss_legendre(n)
}

fn compute_gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Chebyshev-type initial guess, then Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Value and derivative of the Legendre polynomial of degree n.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss rule on `[0, 1]` exact for polynomials of degree `degree`.
pub fn edge_quadrature(degree: usize) -> Result<QuadratureRule<f64>> {
    if degree > MAX_EDGE_DEGREE {
        return Err(Error::UnsupportedDegree(degree));
    }
    let n = (degree + 2) / 2;
    let (x, w) = gauss_legendre(n.max(1));
    Ok(QuadratureRule {
        points: x.iter().map(|&x| 0.5 * (x + 1.0)).collect(),
        weights: w.iter().map(|&w| 0.5 * w).collect(),
    })
}

/// Rule on the reference triangle `{(x, y) : x, y >= 0, x + y <= 1}`
/// exact for all monomials of total degree `<= degree`.
pub fn triangle_quadrature(degree: usize) -> Result<&'static QuadratureRule<[f64; 2]>> {
    static CACHE: OnceLock<Vec<QuadratureRule<[f64; 2]>>> = OnceLock::new();
    if degree > MAX_TRIANGLE_DEGREE {
        return Err(Error::UnsupportedDegree(degree));
    }
    let cache = CACHE.get_or_init(|| (0..=MAX_TRIANGLE_DEGREE).map(collapsed_rule).collect());
    Ok(&cache[degree])
}

fn collapsed_rule(degree: usize) -> QuadratureRule<[f64; 2]> {
    // x = u (1 - v), y = v with Jacobian (1 - v): x^a y^b J has degree a in u
    // and a + b + 1 in v.
    let n = (degree + 3).div_ceil(2).max(1);
    let (g, w) = gauss_legendre(n);
    let mut points = Vec::with_capacity(n * n);
    let mut weights = Vec::with_capacity(n * n);
    for (&gv, &wv) in g.iter().zip(&w) {
        let v = 0.5 * (gv + 1.0);
        for (&gu, &wu) in g.iter().zip(&w) {
            let u = 0.5 * (gu + 1.0);
            points.push([u * (1.0 - v), v]);
            weights.push(0.25 * wu * wv * (1.0 - v));
        }
    }
    QuadratureRule { points, weights }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: usize) -> f64 {
        (1..=n).map(|k| k as f64).product()
    }

    #[test]
    fn gauss_legendre_weights_and_symmetry() {
        for n in 1..=25 {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13, "n={n}");
            for i in 0..n {
                assert!((x[i] + x[n - 1 - i]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn edge_rules() {
        let r = edge_quadrature(0).unwrap();
        assert!((r.weights.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        let r = edge_quadrature(1).unwrap();
        let s: f64 = r.points.iter().zip(&r.weights).map(|(x, w)| x * w).sum();
        assert!((s - 0.5).abs() < 1e-15);
        // three points reach degree five
        let r = edge_quadrature(5).unwrap();
        assert_eq!(r.len(), 3);
        let s: f64 = r.points.iter().zip(&r.weights).map(|(x, w)| x.powi(4) * w).sum();
        assert!((s - 0.2).abs() < 1e-15);
        assert!(matches!(edge_quadrature(100), Err(Error::UnsupportedDegree(100))));
    }

    #[test]
    fn triangle_closed_form_examples() {
        let r = triangle_quadrature(3).unwrap();
        let integrate = |f: &dyn Fn(f64, f64) -> f64| -> f64 {
            r.points.iter().zip(&r.weights).map(|(p, w)| w * f(p[0], p[1])).sum()
        };
        assert!((integrate(&|_, _| 1.0) - 0.5).abs() < 1e-15);
        assert!((integrate(&|x, _| x) - 1.0 / 6.0).abs() < 1e-15);
        assert!((integrate(&|x, y| x * x * y) - 1.0 / 60.0).abs() < 1e-15);
    }

    #[test]
    fn triangle_exactness_table() {
        for degree in 0..=MAX_TRIANGLE_DEGREE {
            let r = triangle_quadrature(degree).unwrap();
            assert!(r.weights.iter().all(|&w| w > 0.0));
            assert!(r.points.iter().all(|p| p[0] > 0.0 && p[1] > 0.0 && p[0] + p[1] < 1.0));
            for a in 0..=degree {
                for b in 0..=(degree - a) {
                    let exact = factorial(a) * factorial(b) / factorial(a + b + 2);
                    let q: f64 = r
                        .points
                        .iter()
                        .zip(&r.weights)
                        .map(|(p, w)| w * p[0].powi(a as i32) * p[1].powi(b as i32))
                        .sum();
                    assert!((q - exact).abs() <= 1e-14 + 1e-12 * exact, "degree {degree} x^{a} y^{b}");
                }
            }
        }
        assert!(triangle_quadrature(MAX_TRIANGLE_DEGREE + 1).is_err());
    }
}
