//! Velocity-space test functions: Galerkin coefficient vectors or black-box
//! evaluators with an optional exact gradient.

use crate::basis::GalerkinBasis;
use crate::geometry::Point;
use nalgebra::{DVector, Matrix3};
use std::sync::Arc;

pub type ScalarFn = Arc<dyn Fn(&Point) -> f64 + Send + Sync>;
pub type VectorFn = Arc<dyn Fn(&Point) -> Point + Send + Sync>;

/// Step of the central finite-difference gradient fallback.
pub const FD_STEP: f64 = 1e-5;

#[derive(Clone)]
pub enum Repr {
    Galerkin { basis: Arc<GalerkinBasis>, coeffs: DVector<f64> },
    Evaluator { value: ScalarFn, gradient: Option<VectorFn> },
}

#[derive(Clone)]
pub struct TestFunction {
    pub dim: usize,
    pub repr: Repr,
    pub label: String,
}

impl std::fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "TestFunction({}, dim {})", self.label, self.dim)
    }
}

impl TestFunction {
    pub fn galerkin(basis: Arc<GalerkinBasis>, coeffs: DVector<f64>, label: impl Into<String>) -> TestFunction {
        assert_eq!(basis.len(), coeffs.len(), "coefficient length");
        TestFunction { dim: basis.dim, repr: Repr::Galerkin { basis, coeffs }, label: label.into() }
    }

    pub fn from_fn(dim: usize, label: impl Into<String>, f: impl Fn(&Point) -> f64 + Send + Sync + 'static) -> TestFunction {
        TestFunction { dim, repr: Repr::Evaluator { value: Arc::new(f), gradient: None }, label: label.into() }
    }

    pub fn with_gradient(
        dim: usize,
        label: impl Into<String>,
        f: impl Fn(&Point) -> f64 + Send + Sync + 'static,
        g: impl Fn(&Point) -> Point + Send + Sync + 'static,
    ) -> TestFunction {
        TestFunction {
            dim,
            repr: Repr::Evaluator { value: Arc::new(f), gradient: Some(Arc::new(g)) },
            label: label.into(),
        }
    }

    /// Constant function.
    pub fn constant(dim: usize, c: f64) -> TestFunction {
        TestFunction::with_gradient(dim, format!("{c}"), move |_| c, |_| Point::zeros())
    }

    /// Coordinate function `v_i`.
    pub fn coordinate(dim: usize, i: usize) -> TestFunction {
        TestFunction::with_gradient(dim, format!("v{}", i + 1), move |v| v[i], move |_| {
            let mut g = Point::zeros();
            g[i] = 1.0;
            g
        })
    }

    /// Kinetic energy `|v|^2`.
    pub fn energy(dim: usize) -> TestFunction {
        TestFunction::with_gradient(dim, "|v|^2", |v| v.norm_squared(), |v| 2.0 * v)
    }

    /// Monomial `v^a` with exponents `a`.
    pub fn monomial(dim: usize, a: [u32; 3]) -> TestFunction {
        let label = format!("v^({},{},{})", a[0], a[1], a[2]);
        TestFunction::with_gradient(
            dim,
            label,
            move |v| (0..3).map(|i| v[i].powi(a[i] as i32)).product(),
            move |v| {
                let mut g = Point::zeros();
                for i in 0..3 {
                    if a[i] > 0 {
                        g[i] = (0..3)
                            .map(|j| if j == i { a[j] as f64 * v[j].powi(a[j] as i32 - 1) } else { v[j].powi(a[j] as i32) })
                            .product();
                    }
                }
                g
            },
        )
    }

    #[inline]
    pub fn eval(&self, v: &Point) -> f64 {
        match &self.repr {
            Repr::Galerkin { basis, coeffs } => basis.value(coeffs, v),
            Repr::Evaluator { value, .. } => value(v),
        }
    }

    /// Whether `gradient` is exact (otherwise it is a flagged finite difference).
    pub fn gradient_is_exact(&self) -> bool {
        match &self.repr {
            Repr::Galerkin { .. } => true,
            Repr::Evaluator { gradient, .. } => gradient.is_some(),
        }
    }

    pub fn gradient(&self, v: &Point) -> Point {
        match &self.repr {
            Repr::Galerkin { basis, coeffs } => basis.gradient(coeffs, v),
            Repr::Evaluator { gradient: Some(g), .. } => g(v),
            Repr::Evaluator { value, gradient: None } => {
                let mut g = Point::zeros();
                for i in 0..self.dim {
                    let mut e = Point::zeros();
                    e[i] = FD_STEP;
                    g[i] = (value(&(v + e)) - value(&(v - e))) / (2.0 * FD_STEP);
                }
                g
            }
        }
    }

    /// Polynomial degree when known.
    pub fn degree(&self) -> Option<usize> {
        match &self.repr {
            Repr::Galerkin { basis, coeffs } => Some(
                (0..basis.len()).filter(|&j| coeffs[j] != 0.0).map(|j| basis.total_degree(j)).max().unwrap_or(0),
            ),
            Repr::Evaluator { .. } => None,
        }
    }

    pub fn coefficients(&self) -> Option<(&Arc<GalerkinBasis>, &DVector<f64>)> {
        match &self.repr {
            Repr::Galerkin { basis, coeffs } => Some((basis, coeffs)),
            Repr::Evaluator { .. } => None,
        }
    }

    /// `c * h`.
    pub fn scaled(&self, c: f64) -> TestFunction {
        match &self.repr {
            Repr::Galerkin { basis, coeffs } => TestFunction::galerkin(basis.clone(), coeffs * c, format!("{c}*{}", self.label)),
            Repr::Evaluator { value, gradient } => {
                let f = value.clone();
                let value: ScalarFn = Arc::new(move |x| c * f(x));
                let gradient = gradient.clone().map(|g| -> VectorFn { Arc::new(move |x| c * g(x)) });
                TestFunction { dim: self.dim, repr: Repr::Evaluator { value, gradient }, label: format!("{c}*{}", self.label) }
            }
        }
    }

    /// `self - other`.
    pub fn minus(&self, other: &TestFunction) -> TestFunction {
        if let (Repr::Galerkin { basis, coeffs }, Repr::Galerkin { basis: b2, coeffs: c2 }) = (&self.repr, &other.repr) {
            if basis == b2 {
                return TestFunction::galerkin(basis.clone(), coeffs - c2, format!("{}-{}", self.label, other.label));
            }
        }
        let (a, b, ga, gb) = (self.clone(), other.clone(), self.clone(), other.clone());
        TestFunction::with_gradient(
            self.dim,
            format!("{}-{}", self.label, other.label),
            move |v| a.eval(v) - b.eval(v),
            move |v| ga.gradient(v) - gb.gradient(v),
        )
    }

    /// `x ↦ h(shift + scale * x)`.
    pub fn affine_pullback(&self, shift: Point, scale: f64) -> TestFunction {
        let (a, b) = (self.clone(), self.clone());
        TestFunction::with_gradient(
            self.dim,
            format!("{}(u+s*x)", self.label),
            move |x| a.eval(&(shift + scale * x)),
            move |x| scale * b.gradient(&(shift + scale * x)),
        )
    }

    /// `x ↦ h(r x)` for an orthogonal matrix `r`.
    pub fn rotated(&self, r: Matrix3<f64>) -> TestFunction {
        let (a, b) = (self.clone(), self.clone());
        TestFunction::with_gradient(
            self.dim,
            format!("{}∘R", self.label),
            move |x| a.eval(&(r * x)),
            move |x| r.transpose() * b.gradient(&(r * x)),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finite_difference_fallback_is_flagged_and_accurate() {
        let f = TestFunction::from_fn(3, "cubic", |v| v[0].powi(3) + v[1] * v[2]);
        assert!(!f.gradient_is_exact());
        let g = f.gradient(&Point::new(1.0, 2.0, 3.0));
        assert!((g - Point::new(3.0, 3.0, 2.0)).norm() < 1e-8);
    }

    #[test]
    fn monomial_gradient() {
        let f = TestFunction::monomial(3, [2, 1, 0]);
        let g = f.gradient(&Point::new(2.0, 3.0, 5.0));
        assert_eq!(g, Point::new(12.0, 4.0, 0.0));
    }
}
