//! Gauss-type quadrature on the reference triangle.
//!
//! Rules are conical (collapsed) products of Gauss–Legendre rules, so any degree is available and
//! all weights are positive with points strictly inside the triangle.

use crate::error::{Error, Result};

/// Quadrature rule on a triangle in barycentric coordinates. Weights sum to one, so the integral
/// over a physical triangle is `area · Σ wᵢ f(xᵢ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
    pub degree: usize,
}

impl QuadratureRule {
    /// Rule exact for all polynomials of total degree `≤ degree`.
    pub fn triangle(degree: usize) -> Self {
        // The collapsed integrand has degree `degree + 1` in the first and `degree` in the second
        // direction; n Gauss points integrate degree 2n − 1 exactly.
        let n = (degree + 2).div_ceil(2).max(1);
        let (xs, ws) = gauss_legendre_unit(n);
        let mut points = Vec::with_capacity(n * n);
        let mut weights = Vec::with_capacity(n * n);
        for (&u, &wu) in xs.iter().zip(&ws) {
            for (&v, &wv) in xs.iter().zip(&ws) {
                let x = u;
                let y = (1.0 - u) * v;
                points.push([1.0 - x - y, x, y]);
                // Reference area is 1/2; normalize to unit total weight.
                weights.push(2.0 * wu * wv * (1.0 - u));
            }
        }
        Self {
            points,
            weights,
            degree,
        }
    }

    /// Ensures the rule integrates an integrand of the given degree exactly.
    pub fn check_degree(&self, needed: usize) -> Result<()> {
        if needed > self.degree {
            Err(Error::QuadratureTooLow {
                rule: self.degree,
                needed,
            })
        } else {
            Ok(())
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Gauss–Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre_unit(n: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    (
        x.iter().map(|t| 0.5 * (t + 1.0)).collect(),
        w.iter().map(|v| 0.5 * v).collect(),
    )
}

/// Gauss–Legendre nodes and weights on `[−1, 1]`, by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                let (_, d) = legendre_with_derivative(n, z);
                dp = d;
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let pk = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = pk;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}
