//! Tensor-product Hermite basis, orthonormal in `L^2(e^{-|v|^2})`.

use crate::geometry::Point;
use crate::quadrature::QuadratureRule;
use nalgebra::{DMatrix, DVector};
use std::f64::consts::PI;

/// Largest supported total degree.
pub const MAX_DEGREE: usize = 24;

/// Values `h_0(x), …, h_d(x)` of the Hermite polynomials normalized against
/// `e^{-x^2}` on the real line.
#[inline]
pub fn hermite_values(x: f64, degree: usize, out: &mut [f64]) {
    out[0] = PI.powf(-0.25);
    if degree == 0 {
        return;
    }
    out[1] = std::f64::consts::SQRT_2 * x * out[0];
    for k in 1..degree {
        let kf = k as f64;
        out[k + 1] = (2.0 / (kf + 1.0)).sqrt() * x * out[k] - (kf / (kf + 1.0)).sqrt() * out[k - 1];
    }
}

/// Orthonormal polynomial basis of total degree at most `degree`, ordered by
/// total degree so that every lower-degree basis is a prefix.
#[derive(Debug, Clone, PartialEq)]
pub struct GalerkinBasis {
    pub dim: usize,
    pub degree: usize,
    pub indices: Vec<[usize; 3]>,
}

impl GalerkinBasis {
    pub fn new(dim: usize, degree: usize) -> GalerkinBasis {
        assert!(dim == 2 || dim == 3, "dimension must be 2 or 3");
        assert!(degree <= MAX_DEGREE, "degree above {MAX_DEGREE}");
        let mut indices = Vec::new();
        for total in 0..=degree {
            for a in (0..=total).rev() {
                if dim == 2 {
                    indices.push([a, total - a, 0]);
                } else {
                    for b in (0..=total - a).rev() {
                        indices.push([a, b, total - a - b]);
                    }
                }
            }
        }
        GalerkinBasis { dim, degree, indices }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Number of basis elements of total degree at most `d`.
    pub fn len_up_to(&self, d: usize) -> usize {
        self.indices.iter().filter(|ix| ix.iter().sum::<usize>() <= d).count()
    }

    pub fn total_degree(&self, i: usize) -> usize {
        self.indices[i].iter().sum()
    }

    fn tables(&self, v: &Point) -> [[f64; MAX_DEGREE + 1]; 3] {
        let mut t = [[0.0; MAX_DEGREE + 1]; 3];
        for (i, row) in t.iter_mut().enumerate().take(self.dim) {
            hermite_values(v[i], self.degree, row);
        }
        t
    }

    /// Values of all basis functions at `v`.
    #[inline]
    pub fn eval_into(&self, v: &Point, out: &mut [f64]) {
        let t = self.tables(v);
        if self.dim == 2 {
            for (o, ix) in out.iter_mut().zip(&self.indices) {
                *o = t[0][ix[0]] * t[1][ix[1]];
            }
        } else {
            for (o, ix) in out.iter_mut().zip(&self.indices) {
                *o = t[0][ix[0]] * t[1][ix[1]] * t[2][ix[2]];
            }
        }
    }

    /// Gradients of all basis functions at `v`, laid out as `out[i * n + j]`
    /// for component `i` of element `j`. Uses `h_k' = sqrt(2k) h_{k-1}`.
    #[inline]
    pub fn grad_into(&self, v: &Point, out: &mut [f64]) {
        let t = self.tables(v);
        let mut d = [[0.0; MAX_DEGREE + 1]; 3];
        for i in 0..self.dim {
            for k in 1..=self.degree {
                d[i][k] = (2.0 * k as f64).sqrt() * t[i][k - 1];
            }
        }
        let n = self.len();
        for (j, ix) in self.indices.iter().enumerate() {
            if self.dim == 2 {
                out[j] = d[0][ix[0]] * t[1][ix[1]];
                out[n + j] = t[0][ix[0]] * d[1][ix[1]];
            } else {
                out[j] = d[0][ix[0]] * t[1][ix[1]] * t[2][ix[2]];
                out[n + j] = t[0][ix[0]] * d[1][ix[1]] * t[2][ix[2]];
                out[2 * n + j] = t[0][ix[0]] * t[1][ix[1]] * d[2][ix[2]];
            }
        }
    }

    pub fn value(&self, coeffs: &DVector<f64>, v: &Point) -> f64 {
        let mut buf = vec![0.0; self.len()];
        self.eval_into(v, &mut buf);
        buf.iter().zip(coeffs.iter()).map(|(a, b)| a * b).sum()
    }

    pub fn gradient(&self, coeffs: &DVector<f64>, v: &Point) -> Point {
        let n = self.len();
        let mut buf = vec![0.0; self.dim * n];
        self.grad_into(v, &mut buf);
        let mut g = Point::zeros();
        for i in 0..self.dim {
            g[i] = (0..n).map(|j| buf[i * n + j] * coeffs[j]).sum();
        }
        g
    }

    /// Coefficients of the `L^2(e^{-|v|^2})` projection of `f` onto the span,
    /// exact when `f` is a polynomial of degree at most `degree`.
    pub fn project(&self, f: impl Fn(&Point) -> f64) -> DVector<f64> {
        let q = QuadratureRule::with_orders(self.dim, self.degree + 2, 1, 0);
        let n = self.len();
        let mut c = DVector::zeros(n);
        let mut buf = vec![0.0; n];
        for (x, w) in q.nodes.iter().zip(&q.weights) {
            self.eval_into(x, &mut buf);
            let fx = w * f(x);
            for j in 0..n {
                c[j] += fx * buf[j];
            }
        }
        c
    }

    /// Orthonormal coefficient columns spanning `{1, v_1, …, v_N, |v|^2}`.
    pub fn null_space_coefficients(&self) -> DMatrix<f64> {
        assert!(self.degree >= 2, "the collision invariants need degree 2");
        let dim = self.dim;
        let mut cols: Vec<DVector<f64>> = Vec::new();
        cols.push(self.project(|_| 1.0));
        for i in 0..dim {
            cols.push(self.project(move |v| v[i]));
        }
        cols.push(self.project(|v| v.norm_squared()));
        for k in 0..cols.len() {
            for _ in 0..2 {
                for j in 0..k {
                    let c = cols[j].dot(&cols[k]);
                    let cj = cols[j].clone();
                    cols[k] -= cj * c;
                }
            }
            let nk = cols[k].norm();
            cols[k] /= nk;
        }
        DMatrix::from_columns(&cols)
    }

    /// Orthogonal projector onto the collision invariants in coefficient space.
    pub fn null_projector(&self) -> DMatrix<f64> {
        let z = self.null_space_coefficients();
        &z * z.transpose()
    }
}
