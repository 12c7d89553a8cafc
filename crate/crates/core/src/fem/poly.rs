//! Exact bivariate polynomials, used for manufactured forcings and analytic reference norms.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

/// Polynomial `Σ c_ij x^i y^j` with exact (rational-free, floating) coefficients.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Poly2 {
    terms: BTreeMap<(u32, u32), f64>,
}

impl Poly2 {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        Self::monomial(c, 0, 0)
    }

    pub fn monomial(c: f64, i: u32, j: u32) -> Self {
        let mut terms = BTreeMap::new();
        if c != 0.0 {
            terms.insert((i, j), c);
        }
        Self { terms }
    }

    pub fn x() -> Self {
        Self::monomial(1.0, 1, 0)
    }

    pub fn y() -> Self {
        Self::monomial(1.0, 0, 1)
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::constant(1.0), |acc, _| &acc * self)
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c *= s;
        }
        out.prune();
        out
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(|&(i, j)| (i + j) as usize).max()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.terms
            .iter()
            .map(|(&(i, j), &c)| c * x.powi(i as i32) * y.powi(j as i32))
            .sum()
    }

    pub fn dx(&self) -> Self {
        let mut out = Self::zero();
        for (&(i, j), &c) in &self.terms {
            if i > 0 {
                out.add_term(i - 1, j, c * i as f64);
            }
        }
        out
    }

    pub fn dy(&self) -> Self {
        let mut out = Self::zero();
        for (&(i, j), &c) in &self.terms {
            if j > 0 {
                out.add_term(i, j - 1, c * j as f64);
            }
        }
        out
    }

    pub fn laplacian(&self) -> Self {
        &self.dx().dx() + &self.dy().dy()
    }

    /// Exact integral over the unit square `(0,1)²`.
    pub fn integrate_unit_square(&self) -> f64 {
        self.terms
            .iter()
            .map(|(&(i, j), &c)| c / ((i + 1) as f64 * (j + 1) as f64))
            .sum()
    }

    fn add_term(&mut self, i: u32, j: u32, c: f64) {
        *self.terms.entry((i, j)).or_insert(0.0) += c;
    }

    fn prune(&mut self) {
        self.terms.retain(|_, c| *c != 0.0);
    }
}

impl Add for &Poly2 {
    type Output = Poly2;
    fn add(self, rhs: &Poly2) -> Poly2 {
        let mut out = self.clone();
        for (&(i, j), &c) in &rhs.terms {
            out.add_term(i, j, c);
        }
        out.prune();
        out
    }
}

impl Sub for &Poly2 {
    type Output = Poly2;
    fn sub(self, rhs: &Poly2) -> Poly2 {
        self + &(-rhs)
    }
}

impl Neg for &Poly2 {
    type Output = Poly2;
    fn neg(self) -> Poly2 {
        self.scale(-1.0)
    }
}

impl Mul for &Poly2 {
    type Output = Poly2;
    fn mul(self, rhs: &Poly2) -> Poly2 {
        let mut out = Poly2::zero();
        for (&(i, j), &c) in &self.terms {
            for (&(k, l), &d) in &rhs.terms {
                out.add_term(i + k, j + l, c * d);
            }
        }
        out.prune();
        out
    }
}

/// Vector field with polynomial components.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PolyField {
    pub components: [Poly2; 2],
}

impl PolyField {
    pub fn new(fx: Poly2, fy: Poly2) -> Self {
        Self { components: [fx, fy] }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// `∇s = (∂ₓs, ∂ᵧs)`.
    pub fn gradient(s: &Poly2) -> Self {
        Self::new(s.dx(), s.dy())
    }

    /// `curl s = (∂ᵧs, −∂ₓs)`.
    pub fn curl(s: &Poly2) -> Self {
        Self::new(s.dy(), -&s.dx())
    }

    pub fn scale(&self, a: f64) -> Self {
        Self::new(self.components[0].scale(a), self.components[1].scale(a))
    }

    pub fn laplacian(&self) -> Self {
        Self::new(self.components[0].laplacian(), self.components[1].laplacian())
    }

    pub fn divergence(&self) -> Poly2 {
        &self.components[0].dx() + &self.components[1].dy()
    }

    /// Scalar rotation `∂ₓv₂ − ∂ᵧv₁`.
    pub fn rot(&self) -> Poly2 {
        &self.components[1].dx() - &self.components[0].dy()
    }

    /// `(v·∇)v`.
    pub fn convection(&self) -> Self {
        let [v1, v2] = &self.components;
        let c = |w: &Poly2| &(v1 * &w.dx()) + &(v2 * &w.dy());
        Self::new(c(v1), c(v2))
    }

    /// `|v|²`.
    pub fn norm_squared(&self) -> Poly2 {
        let [v1, v2] = &self.components;
        &(v1 * v1) + &(v2 * v2)
    }

    pub fn degree(&self) -> Option<usize> {
        self.components.iter().filter_map(Poly2::degree).max()
    }

    pub fn eval(&self, x: f64, y: f64) -> [f64; 2] {
        [self.components[0].eval(x, y), self.components[1].eval(x, y)]
    }

    /// `Σ_c ∫ |∇v_c|²` over the unit square.
    pub fn h1_seminorm_squared(&self) -> f64 {
        self.components
            .iter()
            .map(|c| (&(&c.dx() * &c.dx()) + &(&c.dy() * &c.dy())).integrate_unit_square())
            .sum()
    }
}

impl Add for &PolyField {
    type Output = PolyField;
    fn add(self, rhs: &PolyField) -> PolyField {
        PolyField::new(
            &self.components[0] + &rhs.components[0],
            &self.components[1] + &rhs.components[1],
        )
    }
}

impl Sub for &PolyField {
    type Output = PolyField;
    fn sub(self, rhs: &PolyField) -> PolyField {
        PolyField::new(
            &self.components[0] - &rhs.components[0],
            &self.components[1] - &rhs.components[1],
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_monomials_exactly() {
        let p = &Poly2::monomial(6.0, 2, 1) + &Poly2::constant(1.0);
        assert!((p.integrate_unit_square() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn centered_cubic_has_the_expected_l2_norm() {
        let p = &Poly2::x().pow(3) - &Poly2::constant(0.25);
        assert!(p.integrate_unit_square().abs() < 1e-16);
        let n2 = (&p * &p).integrate_unit_square();
        assert!((n2 - 9.0 / 112.0).abs() < 1e-15);
    }

    #[test]
    fn curl_fields_are_solenoidal() {
        let x = Poly2::x();
        let y = Poly2::y();
        let one = Poly2::constant(1.0);
        let psi = &(&x.pow(2) * &(&x - &one).pow(2)) * &(&y.pow(2) * &(&y - &one).pow(2));
        assert_eq!(psi.degree(), Some(8));
        let u = PolyField::curl(&psi);
        assert!(u.divergence().is_zero());
        assert_eq!(u.laplacian().degree(), Some(5));
    }

    #[test]
    fn lamb_identity_for_potential_flow() {
        let h = &Poly2::x().pow(3) - &(&Poly2::x() * &Poly2::y().pow(2)).scale(3.0);
        let u = PolyField::gradient(&h);
        assert!(u.rot().is_zero());
        let lhs = u.convection();
        let rhs = PolyField::gradient(&u.norm_squared()).scale(0.5);
        let diff = &lhs - &rhs;
        assert!(diff.components.iter().all(Poly2::is_zero));
    }
}
