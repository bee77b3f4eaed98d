use crate::error::{Error, Result};
use crate::radial::{StationaryField, VorticityState};
use crate::smooth::{cutoff, cutoff_derivative};
use crate::solver::TestField;
use crate::spectral::{divergence, gradient, ScalarField, VectorField};

/// `coef · Π_j y_j^{powers_j}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Monomial {
    pub coef: f64,
    pub powers: Vec<u32>,
}

impl Monomial {
    fn eval(&self, y: &[f64]) -> f64 {
        self.powers
            .iter()
            .zip(y)
            .fold(self.coef, |acc, (&p, &x)| acc * x.powi(p as i32))
    }

    fn partial(&self, y: &[f64], j: usize) -> f64 {
        let p = self.powers[j];
        if p == 0 {
            return 0.0;
        }
        let mut acc = self.coef * p as f64;
        for (i, (&q, &x)) in self.powers.iter().zip(y).enumerate() {
            let e = if i == j { q - 1 } else { q };
            acc *= x.powi(e as i32);
        }
        acc
    }
}

/// `Φ(u) = φ(⟨u,v₁⟩, …, ⟨u,v_k⟩)` with `φ(y) = P(y) χ(|y|/R)`; `χ` is 1 on
/// `[0,1]` and 0 beyond 2, so `φ = P` on `|y| ≤ R` and vanishes for `|y| ≥ 2R`.
#[derive(Debug, Clone)]
pub struct CylindricalFunctional {
    tests: Vec<TestField>,
    poly: Vec<Monomial>,
    radius: f64,
}

/// Allowed spectral divergence of a test field relative to its sup-norm.
const DIV_TOL: f64 = 1e-10;

impl CylindricalFunctional {
    pub fn new(test_fields: Vec<VectorField>, poly: Vec<Monomial>, cutoff_radius: f64) -> Result<Self> {
        let k = test_fields.len();
        if k == 0 {
            return Err(Error::InvalidArgument("need at least one test field".into()));
        }
        if !(cutoff_radius > 0.0) {
            return Err(Error::InvalidArgument(format!("cutoff radius {cutoff_radius}")));
        }
        if let Some(m) = poly.iter().find(|m| m.powers.len() != k) {
            return Err(Error::InvalidArgument(format!(
                "monomial has {} powers for {k} test fields",
                m.powers.len()
            )));
        }
        let grid = *test_fields[0].grid();
        for v in &test_fields {
            grid.same_as(v.grid())?;
            let div = divergence(v).max_abs();
            let scale = v.max_magnitude();
            if div > DIV_TOL * scale {
                return Err(Error::InvalidArgument(format!(
                    "test field divergence {div:e} exceeds {DIV_TOL:e}·{scale:e}"
                )));
            }
        }
        Ok(Self {
            tests: test_fields.into_iter().map(TestField::new).collect(),
            poly,
            radius: cutoff_radius,
        })
    }

    /// `φ(y) = y₁` inside the cutoff.
    pub fn first_moment(v: VectorField, cutoff_radius: f64) -> Result<Self> {
        Self::new(vec![v], vec![Monomial { coef: 1.0, powers: vec![1] }], cutoff_radius)
    }

    /// `φ(y) = y₁²` inside the cutoff.
    pub fn second_moment(v: VectorField, cutoff_radius: f64) -> Result<Self> {
        Self::new(vec![v], vec![Monomial { coef: 1.0, powers: vec![2] }], cutoff_radius)
    }

    pub fn k(&self) -> usize {
        self.tests.len()
    }

    pub fn cutoff_radius(&self) -> f64 {
        self.radius
    }

    pub fn with_cutoff_radius(&self, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::InvalidArgument(format!("cutoff radius {radius}")));
        }
        Ok(Self {
            radius,
            ..self.clone()
        })
    }

    pub fn tests(&self) -> &[TestField] {
        &self.tests
    }

    /// `y_j = ∫ u · v_j`.
    pub fn project(&self, u: &VectorField) -> Result<Vec<f64>> {
        self.tests.iter().map(|t| t.pair(u)).collect()
    }

    pub fn phi(&self, y: &[f64]) -> f64 {
        let r = norm(y);
        let chi = cutoff(r / self.radius);
        if chi == 0.0 {
            return 0.0;
        }
        self.poly.iter().map(|m| m.eval(y)).sum::<f64>() * chi
    }

    pub fn grad_phi(&self, y: &[f64]) -> Vec<f64> {
        let r = norm(y);
        let z = r / self.radius;
        let chi = cutoff(z);
        let dchi = cutoff_derivative(z);
        let p: f64 = self.poly.iter().map(|m| m.eval(y)).sum();
        (0..y.len())
            .map(|j| {
                let dp: f64 = self.poly.iter().map(|m| m.partial(y, j)).sum();
                let radial = if r > 0.0 && dchi != 0.0 {
                    p * dchi * y[j] / (r * self.radius)
                } else {
                    0.0
                };
                dp * chi + radial
            })
            .collect()
    }

    pub fn eval(&self, u: &VectorField) -> Result<f64> {
        Ok(self.phi(&self.project(u)?))
    }

    /// `Σ_j ∂_jφ(y) ∫ (u⊗u):∇v_j`.
    pub fn pairing(&self, u: &VectorField) -> Result<f64> {
        let grad = self.grad_phi(&self.project(u)?);
        let mut acc = 0.0;
        for (g, t) in grad.iter().zip(&self.tests) {
            if *g != 0.0 {
                acc += g * t.convective(u)?;
            }
        }
        Ok(acc)
    }

    /// `Σ_j ∂_jφ(y) ∫ u·Δv_j`.
    pub fn viscous_pairing(&self, u: &VectorField) -> Result<f64> {
        let grad = self.grad_phi(&self.project(u)?);
        let mut acc = 0.0;
        for (g, t) in grad.iter().zip(&self.tests) {
            if *g != 0.0 {
                acc += g * t.viscous(u)?;
            }
        }
        Ok(acc)
    }
}

fn norm(y: &[f64]) -> f64 {
    y.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Divergence-free test field `∇⊥ψ = (-∂_yψ, ∂_xψ)` with spectral derivatives,
/// so its spectral divergence vanishes to rounding.
pub fn test_field_from_streamfunction(psi: &ScalarField) -> Result<VectorField> {
    let g = gradient(psi);
    VectorField::new(g.u2.scaled(-1.0), g.u1)
}

/// `Φ(u)` for a decomposed state.
pub fn eval_cylindrical(phi: &CylindricalFunctional, state: &VorticityState, sigma: &StationaryField) -> Result<f64> {
    phi.eval(&state.velocity(sigma)?)
}

/// `⟨u⊗u, ∇Φ′(u)⟩` for a decomposed state.
pub fn cylindrical_pairing(
    phi: &CylindricalFunctional,
    state: &VorticityState,
    sigma: &StationaryField,
) -> Result<f64> {
    phi.pairing(&state.velocity(sigma)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;

    fn field(grid: Grid) -> VectorField {
        let psi = ScalarField::from_fn(grid, |x, y| (-(x * x + (y - 0.2).powi(2)) / 0.5).exp());
        test_field_from_streamfunction(&psi).unwrap()
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let grid = Grid::new(32, 4.0).unwrap();
        let v = field(grid);
        let phi = CylindricalFunctional::new(
            vec![v.clone(), v],
            vec![
                Monomial { coef: 1.5, powers: vec![2, 1] },
                Monomial { coef: -0.5, powers: vec![0, 3] },
            ],
            1.0,
        )
        .unwrap();
        for y in [[0.3, -0.4], [1.2, 0.9], [-0.1, 1.6], [0.0, 0.0]] {
            let g = phi.grad_phi(&y);
            for j in 0..2 {
                let h = 1e-6;
                let mut a = y;
                let mut b = y;
                a[j] += h;
                b[j] -= h;
                let fd = (phi.phi(&a) - phi.phi(&b)) / (2.0 * h);
                assert!((fd - g[j]).abs() < 1e-6, "{y:?} {j}: {fd} vs {}", g[j]);
            }
        }
    }

    #[test]
    fn cutoff_support() {
        let grid = Grid::new(32, 4.0).unwrap();
        let phi = CylindricalFunctional::first_moment(field(grid), 1.0).unwrap();
        assert_eq!(phi.phi(&[0.7]), 0.7);
        assert_eq!(phi.phi(&[2.0]), 0.0);
        assert_eq!(phi.phi(&[-3.0]), 0.0);
        assert_eq!(phi.grad_phi(&[0.5]), vec![1.0]);
    }

    #[test]
    fn rejects_divergent_test_fields() {
        let grid = Grid::new(32, 4.0).unwrap();
        let v = VectorField::from_fn(grid, |x, _| ((x * std::f64::consts::PI / 4.0).sin(), 0.0));
        assert!(CylindricalFunctional::first_moment(v, 1.0).is_err());
    }

    #[test]
    fn test_fields_are_divergence_free() {
        let grid = Grid::new(64, 4.0).unwrap();
        let v = field(grid);
        assert!(divergence(&v).max_abs() <= 1e-13 * v.max_magnitude());
    }
}
