//! Maxwellian equilibria, weighted inner products and the projection onto the
//! collision invariants.

use crate::error::{Error, Result};
use crate::geometry::{bracket, Point};
use crate::quadrature::QuadratureRule;
use crate::test_function::TestFunction;
use nalgebra::{DMatrix, SymmetricEigen};
use std::f64::consts::PI;
use std::sync::Arc;

/// Equilibrium with mass `rho`, mean velocity `u` and temperature `temperature`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxwellianParams {
    pub dim: usize,
    pub rho: f64,
    pub u: Point,
    pub temperature: f64,
}

impl MaxwellianParams {
    /// The normalization for which `M(v) = e^{-|v|^2}`.
    pub fn normalized(dim: usize) -> MaxwellianParams {
        MaxwellianParams { dim, rho: PI.powf(dim as f64 / 2.0), u: Point::zeros(), temperature: 0.5 }
    }

    pub fn new(dim: usize, rho: f64, u: Point, temperature: f64) -> Result<MaxwellianParams> {
        if dim != 2 && dim != 3 {
            return Err(Error::DomainError(format!("dimension {dim} not in {{2,3}}")));
        }
        if !(rho > 0.0 && rho.is_finite()) || !(temperature > 0.0 && temperature.is_finite()) {
            return Err(Error::DomainError(format!("rho={rho}, T={temperature} must be positive")));
        }
        if !u.iter().all(|x| x.is_finite()) || (dim == 2 && u[2] != 0.0) {
            return Err(Error::DomainError("mean velocity must be finite and in R^N".into()));
        }
        Ok(MaxwellianParams { dim, rho, u, temperature })
    }

    /// `rho / (2 pi T)^{N/2}`.
    pub fn amplitude(&self) -> f64 {
        self.rho / (2.0 * PI * self.temperature).powf(self.dim as f64 / 2.0)
    }

    /// Velocity scale `sqrt(2T)` mapping normalized to physical velocities.
    pub fn scale(&self) -> f64 {
        (2.0 * self.temperature).sqrt()
    }

    pub fn eval(&self, v: &Point) -> f64 {
        self.amplitude() * (-(v - self.u).norm_squared() / (2.0 * self.temperature)).exp()
    }

    /// Physical velocity attached to a normalized Gauss–Hermite node.
    pub fn physical(&self, x: &Point) -> Point {
        self.u + self.scale() * x
    }

    /// Factor turning Gauss–Hermite weights into weights for `∫ · M dv`.
    pub fn weight_factor(&self) -> f64 {
        self.rho / PI.powf(self.dim as f64 / 2.0)
    }

    pub fn is_normalized(&self) -> bool {
        let n = MaxwellianParams::normalized(self.dim);
        (self.rho - n.rho).abs() <= 1e-15 * n.rho && self.u == n.u && self.temperature == 0.5
    }
}

pub fn eval_maxwellian(p: &MaxwellianParams, v: &Point) -> f64 {
    p.eval(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Space {
    L2,
    H1,
}

/// `L^2(<v>^s M)` or `H^1(<v>^s M)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedNormSpec {
    pub space: Space,
    pub weight_exponent: f64,
    pub maxwellian: MaxwellianParams,
}

impl WeightedNormSpec {
    pub fn l2(p: MaxwellianParams, s: f64) -> WeightedNormSpec {
        WeightedNormSpec { space: Space::L2, weight_exponent: s, maxwellian: p }
    }

    pub fn h1(p: MaxwellianParams, s: f64) -> WeightedNormSpec {
        WeightedNormSpec { space: Space::H1, weight_exponent: s, maxwellian: p }
    }
}

/// `∫ f(v) M(v) dv` by the tensor rule, in physical variables.
pub fn integrate_against_maxwellian(p: &MaxwellianParams, q: &QuadratureRule, f: impl Fn(&Point) -> f64) -> Result<f64> {
    let c = p.weight_factor();
    let mut acc = 0.0;
    for (x, w) in q.nodes.iter().zip(&q.weights) {
        let val = f(&p.physical(x));
        if !val.is_finite() {
            return Err(Error::NonFiniteEvaluation(format!("integrand at {:?}", x.as_slice())));
        }
        acc += w * val;
    }
    Ok(c * acc)
}

pub fn weighted_inner_product(f: &TestFunction, g: &TestFunction, spec: &WeightedNormSpec, q: &QuadratureRule) -> Result<f64> {
    let s = spec.weight_exponent;
    let p = &spec.maxwellian;
    let l2 = integrate_against_maxwellian(p, q, |v| f.eval(v) * g.eval(v) * bracket(v).powf(s))?;
    if spec.space == Space::L2 {
        return Ok(l2);
    }
    let h1 = integrate_against_maxwellian(p, q, |v| f.gradient(v).dot(&g.gradient(v)) * bracket(v).powf(s))?;
    Ok(l2 + h1)
}

pub fn weighted_norm(f: &TestFunction, spec: &WeightedNormSpec, q: &QuadratureRule) -> Result<f64> {
    Ok(weighted_inner_product(f, f, spec, q)?.max(0.0).sqrt())
}

/// Orthonormal basis of the collision invariants in `L^2(M)`.
#[derive(Debug, Clone)]
pub struct NullSpace {
    pub params: MaxwellianParams,
    /// Element `i` is `Σ_j coeffs[(i, j)] r_j` for the raw family
    /// `r = (1, v_1, …, v_N, |v|^2)`.
    pub coeffs: DMatrix<f64>,
    pub raw_gram: DMatrix<f64>,
    pub elements: Vec<TestFunction>,
}

fn raw_family(dim: usize, v: &Point) -> Vec<f64> {
    let mut r = Vec::with_capacity(dim + 2);
    r.push(1.0);
    for i in 0..dim {
        r.push(v[i]);
    }
    r.push(v.norm_squared());
    r
}

pub fn null_space_basis(p: &MaxwellianParams, q: &QuadratureRule) -> Result<NullSpace> {
    if q.exactness_degree() < 4 {
        return Err(Error::ExactnessViolation(format!("degree {} < 4", q.exactness_degree())));
    }
    let dim = p.dim;
    let m = dim + 2;
    let c = p.weight_factor();
    let xs: Vec<Point> = q.nodes.iter().map(|x| p.physical(x)).collect();
    let vals: Vec<Vec<f64>> = xs.iter().map(|v| raw_family(dim, v)).collect();
    let ip = |a: &dyn Fn(usize) -> f64, b: &dyn Fn(usize) -> f64| -> f64 {
        (0..xs.len()).map(|i| c * q.weights[i] * a(i) * b(i)).sum()
    };
    let mut gram = DMatrix::zeros(m, m);
    for a in 0..m {
        for b in 0..m {
            gram[(a, b)] = ip(&|i| vals[i][a], &|i| vals[i][b]);
        }
    }
    let eig = SymmetricEigen::new(gram.clone());
    let (lo, hi) = eig.eigenvalues.iter().fold((f64::INFINITY, 0.0f64), |(l, h), x| (l.min(*x), h.max(*x)));
    if !(lo > 0.0) || hi / lo > 1e12 {
        return Err(Error::DegenerateGram(format!("condition number {:.3e}", hi / lo)));
    }
    // Modified Gram–Schmidt on coefficient vectors in the Gram inner product.
    let mut coeffs = DMatrix::<f64>::identity(m, m);
    for k in 0..m {
        for _ in 0..2 {
            for j in 0..k {
                let proj = (coeffs.row(j) * &gram * coeffs.row(k).transpose())[(0, 0)];
                let rj = coeffs.row(j).clone_owned();
                let mut rk = coeffs.row_mut(k);
                rk -= rj * proj;
            }
        }
        let nk = (coeffs.row(k) * &gram * coeffs.row(k).transpose())[(0, 0)].sqrt();
        let mut rk = coeffs.row_mut(k);
        rk /= nk;
    }
    let elements = (0..m)
        .map(|k| {
            let row: Vec<f64> = coeffs.row(k).iter().copied().collect();
            let (r1, r2) = (Arc::new(row), Arc::new(coeffs.row(k).iter().copied().collect::<Vec<f64>>()));
            TestFunction::with_gradient(
                dim,
                format!("invariant{k}"),
                move |v| raw_family(dim, v).iter().zip(r1.iter()).map(|(a, b)| a * b).sum(),
                move |v| {
                    let mut g = Point::zeros();
                    for i in 0..dim {
                        g[i] = r2[1 + i];
                    }
                    g + 2.0 * r2[dim + 1] * v
                },
            )
        })
        .collect();
    Ok(NullSpace { params: *p, coeffs, raw_gram: gram, elements })
}

/// `Π h = Σ <h, e_i> e_i`.
pub fn project_null(h: &TestFunction, basis: &NullSpace, q: &QuadratureRule) -> Result<TestFunction> {
    let spec = WeightedNormSpec::l2(basis.params, 0.0);
    let dim = basis.params.dim;
    let m = dim + 2;
    let mut raw = vec![0.0; m];
    for (k, e) in basis.elements.iter().enumerate() {
        let a = weighted_inner_product(h, e, &spec, q)?;
        for j in 0..m {
            raw[j] += a * basis.coeffs[(k, j)];
        }
    }
    let raw = Arc::new(raw);
    let r2 = raw.clone();
    Ok(TestFunction::with_gradient(
        dim,
        format!("Π({})", h.label),
        move |v| raw_family(dim, v).iter().zip(raw.iter()).map(|(a, b)| a * b).sum(),
        move |v| {
            let mut g = Point::zeros();
            for i in 0..dim {
                g[i] = r2[1 + i];
            }
            g + 2.0 * r2[dim + 1] * v
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn maxwellian_values() {
        let p = MaxwellianParams::normalized(3);
        assert_eq!(eval_maxwellian(&p, &Point::zeros()), 1.0);
        assert!((p.eval(&Point::x()) - (-1f64).exp()).abs() < 1e-15);
        let p2 = MaxwellianParams::new(3, 2.0 * PI.powf(1.5), Point::zeros(), 0.5).unwrap();
        assert!((p2.eval(&Point::zeros()) - 2.0).abs() < 1e-14);
        assert!(MaxwellianParams::new(3, -1.0, Point::zeros(), 0.5).is_err());
    }

    #[test]
    fn inner_products_match_moments() {
        let p = MaxwellianParams::normalized(3);
        let q = QuadratureRule::new(3);
        let one = TestFunction::constant(3, 1.0);
        let v1 = TestFunction::coordinate(3, 0);
        let l2 = WeightedNormSpec::l2(p, 0.0);
        assert!((weighted_inner_product(&one, &one, &l2, &q).unwrap() / PI.powf(1.5) - 1.0).abs() < 1e-12);
        assert!((weighted_inner_product(&v1, &v1, &l2, &q).unwrap() / (PI.powf(1.5) / 2.0) - 1.0).abs() < 1e-12);
        assert!(weighted_inner_product(&one, &v1, &WeightedNormSpec::l2(p, 1.7), &q).unwrap().abs() < 1e-13);
        let h1 = weighted_inner_product(&v1, &v1, &WeightedNormSpec::h1(p, 0.0), &q).unwrap();
        assert!((h1 / (1.5 * PI.powf(1.5)) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn null_space_examples() {
        let p = MaxwellianParams::normalized(3);
        let q = QuadratureRule::new(3);
        let ns = null_space_basis(&p, &q).unwrap();
        assert_eq!(ns.elements.len(), 5);
        assert!((ns.elements[0].eval(&Point::new(0.3, 1.0, 2.0)) - PI.powf(-0.75)).abs() < 1e-14);
        // Only {1, |v|^2} couple in the raw Gram matrix.
        for a in 0..5 {
            for b in 0..5 {
                let coupled = a == b || (a, b) == (0, 4) || (a, b) == (4, 0);
                assert_eq!(ns.raw_gram[(a, b)].abs() > 1e-12, coupled, "({a},{b})");
            }
        }
        let cube = TestFunction::monomial(3, [3, 0, 0]);
        let pc = project_null(&cube, &ns, &q).unwrap();
        for v in [Point::new(0.2, -1.0, 0.5), Point::new(-2.0, 0.0, 1.0)] {
            assert!((pc.eval(&v) - 1.5 * v[0]).abs() < 1e-12);
        }
        let v1v2 = TestFunction::monomial(3, [1, 1, 0]);
        assert!(project_null(&v1v2, &ns, &q).unwrap().eval(&Point::new(1.0, 2.0, 3.0)).abs() < 1e-12);
        let e = TestFunction::energy(3);
        let pe = project_null(&e, &ns, &q).unwrap();
        assert!((pe.eval(&Point::new(1.0, 2.0, 3.0)) - 14.0).abs() < 1e-11);
    }

    #[test]
    fn broken_quadrature_is_rejected() {
        let p = MaxwellianParams::normalized(2);
        let q = QuadratureRule::with_orders(2, 1, 7, 0);
        assert!(matches!(null_space_basis(&p, &q), Err(Error::ExactnessViolation(_))));
    }
}
