//! The Landau operator: projection `P(z)`, Dirichlet form, diffusion matrix,
//! Bakry–Émery potential and Poincaré checks, the weight identity, the tail
//! operator `K_R^L` and the dyadic decomposition.

use crate::basis::GalerkinBasis;
use crate::boltzmann::{check_dyadic, check_exactness, dyadic_windows, form_degree, geometric_sum, shell_rule, DyadicDecomposition, DyadicMatrices};
use crate::error::{Error, Result};
use crate::geometry::{bracket, Point};
use crate::kernels::CollisionKernel;
use crate::maxwellian::{integrate_against_maxwellian, MaxwellianParams};
use crate::pair::{assemble_pair_form, frames, sum_pairs, Directions, PairForm, PairRule, RadialProfile, RotationSet, Window};
use crate::pointwise::{CenteredRule, PointwiseOrders};
use crate::quadrature::{QuadratureRule, SphereRule};
use crate::test_function::TestFunction;
use nalgebra::{DMatrix, Matrix3, SymmetricEigen};

/// `P(z) = I - z zᵀ/|z|^2` on the first `dim` coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectionMatrix {
    pub z: Point,
    pub entries: Matrix3<f64>,
}

impl ProjectionMatrix {
    pub fn new(z: &Point, dim: usize) -> Result<ProjectionMatrix> {
        let n2 = z.norm_squared();
        if !(n2 > 0.0) {
            return Err(Error::DomainError("projection onto the complement of a zero vector".into()));
        }
        let mut p = Matrix3::zeros();
        for i in 0..dim {
            for j in 0..dim {
                p[(i, j)] = if i == j { 1.0 } else { 0.0 } - z[i] * z[j] / n2;
            }
        }
        Ok(ProjectionMatrix { z: *z, entries: p })
    }

    /// `A(z) = |z|^2 Φ(|z|) P(z)`.
    pub fn landau_matrix(&self, k: &CollisionKernel) -> Matrix3<f64> {
        let r = self.z.norm();
        self.entries * (r * r * k.phi_eval(r))
    }
}

/// `‖P(z) w‖^2 = |w|^2 - (z·w)^2/|z|^2`.
#[inline]
fn projected_sq(z: &Point, w: &Point) -> f64 {
    let n2 = z.norm_squared();
    (w.norm_squared() - z.dot(w).powi(2) / n2).max(0.0)
}

fn landau_pair_sum(p: &MaxwellianParams, profile: &RadialProfile, degree: usize, h: &TestFunction) -> Result<f64> {
    let rule = PairRule::for_degree(p, profile, degree)?;
    let dirs = frames(&SphereRule::exact_to(p.dim, degree));
    let val = sum_pairs(&rule, &dirs, None, |pp| {
        let d = h.gradient(&pp.v) - h.gradient(&pp.v_star);
        pp.weight * projected_sq(&pp.omega, &d)
    });
    if !val.is_finite() {
        return Err(Error::NonFiniteEvaluation("Landau pair quadrature".into()));
    }
    Ok(0.5 * val)
}

/// `(1/2)∫∫ Φ |v - v_*|^2 ‖P(v - v_*)[∇h - (∇h)_*]‖^2 M M_*`.
pub fn dirichlet_form_l(h: &TestFunction, k: &CollisionKernel, p: &MaxwellianParams, q: &QuadratureRule) -> Result<f64> {
    let deg = form_degree(h, q);
    check_exactness(q, deg)?;
    landau_pair_sum(p, &RadialProfile::landau(k), deg, h)
}

/// `ℳ(v) = ∫ |v - v_*|^2 Φ P(v - v_*) M_* dv_*`.
pub fn diffusion_matrix(k: &CollisionKernel, p: &MaxwellianParams, v: &Point, _q: &QuadratureRule) -> Result<Matrix3<f64>> {
    let rule = CenteredRule::new(v, p, &RadialProfile::landau(k), PointwiseOrders::default())?;
    let mut m = Matrix3::zeros();
    for (vs, w) in rule.nodes.iter().zip(&rule.weights) {
        m += ProjectionMatrix::new(&(v - vs), p.dim)?.entries * *w;
    }
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFiniteEvaluation(format!("diffusion matrix at {:?}", v.as_slice())));
    }
    Ok(m)
}

/// Smallest eigenvalue of the leading `dim × dim` block.
pub fn min_eigenvalue(m: &Matrix3<f64>, dim: usize) -> f64 {
    if dim == 2 {
        let (a, b, d) = (m[(0, 0)], m[(0, 1)], m[(1, 1)]);
        0.5 * (a + d) - (0.25 * (a - d).powi(2) + b * b).sqrt()
    } else {
        SymmetricEigen::new(*m).eigenvalues.min()
    }
}

/// Radial curve of the smallest eigenvalue of `ℳ(v)` and the fitted
/// constant of `λ_min(v) ≈ c ⟨v⟩^γ`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffusionMatrixField {
    pub kernel: CollisionKernel,
    pub params: MaxwellianParams,
    pub radii: Vec<f64>,
    pub min_eigenvalues: Vec<f64>,
    /// Least-squares fit of `log λ_min - γ log⟨v⟩` (geometric mean).
    pub c_fit: f64,
    /// Largest constant with `λ_min ≥ c ⟨v⟩^γ` on the grid.
    pub c_lower: f64,
    /// Root-mean-square of `log λ_min - log(c_fit ⟨v⟩^γ)`.
    pub rms_log_deviation: f64,
    /// Largest `|log λ_min - log(c_fit ⟨v⟩^γ)|` on the grid.
    pub max_log_deviation: f64,
}

impl DiffusionMatrixField {
    /// Evaluate along `|v| ∈ {0, step, …, max}` in the first axis direction
    /// (the field is rotation invariant when `u = 0`).
    pub fn sample(k: &CollisionKernel, p: &MaxwellianParams, max_radius: f64, step: f64, q: &QuadratureRule) -> Result<DiffusionMatrixField> {
        let n = (max_radius / step).round() as usize;
        let mut radii = Vec::with_capacity(n + 1);
        let mut min_eigenvalues = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let r = step * i as f64;
            let v = p.u + Point::new(r, 0.0, 0.0);
            let m = diffusion_matrix(k, p, &v, q)?;
            let lam = min_eigenvalue(&m, p.dim);
            if !(lam > 0.0) {
                return Err(Error::EigSolveFailure(format!("ℳ not positive definite at |v| = {r}: λ_min = {lam}")));
            }
            radii.push(r);
            min_eigenvalues.push(lam);
        }
        let g = k.gamma;
        let logs: Vec<f64> = radii.iter().zip(&min_eigenvalues).map(|(r, l)| l.ln() - g * (1.0 + r * r).sqrt().ln()).collect();
        let mean = logs.iter().sum::<f64>() / logs.len() as f64;
        let lower = logs.iter().cloned().fold(f64::INFINITY, f64::min);
        let max_dev = logs.iter().map(|x| (x - mean).abs()).fold(0.0, f64::max);
        let sq = logs.iter().map(|x| (x - mean).powi(2)).sum::<f64>();
        Ok(DiffusionMatrixField {
            kernel: *k,
            params: *p,
            radii,
            min_eigenvalues,
            c_fit: mean.exp(),
            c_lower: lower.exp(),
            rms_log_deviation: (sq / logs.len() as f64).sqrt(),
            max_log_deviation: max_dev,
        })
    }

    pub fn eval(&self, v: &Point, q: &QuadratureRule) -> Result<Matrix3<f64>> {
        diffusion_matrix(&self.kernel, &self.params, v, q)
    }
}

/// `φ(v) = |v|^2 - (γ/2) ln(1 + |v|^2)`, so that `e^{-φ} = ⟨v⟩^γ e^{-|v|^2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BakryEmeryPotential {
    pub gamma: f64,
    pub dim: usize,
}

impl BakryEmeryPotential {
    pub fn new(gamma: f64, dim: usize) -> BakryEmeryPotential {
        BakryEmeryPotential { gamma, dim }
    }

    pub fn phi(&self, v: &Point) -> f64 {
        let s = v.norm_squared();
        s - 0.5 * self.gamma * s.ln_1p()
    }

    pub fn density(&self, v: &Point) -> f64 {
        (-self.phi(v)).exp()
    }

    pub fn hessian(&self, v: &Point) -> Matrix3<f64> {
        hessian_phi(self.gamma, v, self.dim)
    }

    pub fn min_hessian_eigenvalue(&self, v: &Point) -> f64 {
        min_eigenvalue(&self.hessian(v), self.dim)
    }

    /// Exact infimum over all `v` of the smallest Hessian eigenvalue.
    pub fn convexity_bound(&self) -> f64 {
        // Radial eigenvalue 2 - γ(1-s)/(1+s)^2, transverse 2 - γ/(1+s), s = |v|^2.
        if self.gamma <= 0.0 {
            2.0 + self.gamma / 8.0
        } else {
            2.0 - self.gamma
        }
    }
}

/// Closed-form `∇^2 φ = 2I - γ[I/(1+|v|^2) - 2 v vᵀ/(1+|v|^2)^2]`.
pub fn hessian_phi(gamma: f64, v: &Point, dim: usize) -> Matrix3<f64> {
    let s = v.norm_squared();
    let a = 1.0 + s;
    let mut h = Matrix3::zeros();
    for i in 0..dim {
        for j in 0..dim {
            let id = if i == j { 1.0 } else { 0.0 };
            h[(i, j)] = 2.0 * id - gamma * (id / a - 2.0 * v[i] * v[j] / (a * a));
        }
    }
    h
}

/// Reference measure of a Poincaré check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PoincareMeasure {
    Maxwellian,
    /// `m = ⟨v⟩^γ M`.
    Weighted(f64),
}

impl PoincareMeasure {
    /// Poincaré constant the inequality is checked against.
    pub fn constant(&self) -> f64 {
        match self {
            PoincareMeasure::Maxwellian => 2.0,
            PoincareMeasure::Weighted(_) => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoincareResult {
    pub lhs: f64,
    pub variance: f64,
    pub ratio: f64,
    pub constant: f64,
    pub holds: bool,
    pub exact_gradient: bool,
}

/// `∫|∇h|^2 dμ̂` against `Var_μ̂(h)` for the normalized measure `μ̂`.
pub fn poincare_check(measure: PoincareMeasure, h: &TestFunction, p: &MaxwellianParams, q: &QuadratureRule) -> Result<PoincareResult> {
    let weight = |v: &Point| match measure {
        PoincareMeasure::Maxwellian => 1.0,
        PoincareMeasure::Weighted(g) => bracket(&(v - p.u)).powf(g),
    };
    let mass = integrate_against_maxwellian(p, q, weight)?;
    let mean = integrate_against_maxwellian(p, q, |v| weight(v) * h.eval(v))? / mass;
    let second = integrate_against_maxwellian(p, q, |v| weight(v) * (h.eval(v) - mean).powi(2))? / mass;
    let lhs = integrate_against_maxwellian(p, q, |v| weight(v) * h.gradient(v).norm_squared())? / mass;
    let constant = measure.constant();
    let ratio = if second > 0.0 { lhs / second } else { f64::INFINITY };
    let holds = lhs >= (constant - 1e-8) * second;
    Ok(PoincareResult { lhs, variance: second, ratio, constant, holds, exact_gradient: h.gradient_is_exact() })
}

/// Terms of `∫|∇h|^2 M⟨v⟩^γ = ∫|∇g|^2⟨v⟩^γ + ∫ g^2 |v-u|^2/(4T^2) ⟨v⟩^γ + ∫ g ∇g·(v-u)/T ⟨v⟩^γ`
/// with `g = h M^{1/2}` (at `T = 1` the coefficients are `1/4` and `1`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightIdentity {
    pub lhs: f64,
    pub gradient_term: f64,
    pub potential_term: f64,
    pub cross_term: f64,
    pub residual: f64,
    /// `‖h|v|^{1+γ/2}‖^2_{L^2(M)}`.
    pub moment_term: f64,
    /// `‖h‖^2_{H^1(⟨v⟩^γ M)}`.
    pub h1_term: f64,
    /// `‖h⟨v⟩^{γ/2}‖^2_{L^2(M)}`.
    pub l2_term: f64,
    /// Smallest `C` with `H^1 ≥ moment - C·L^2` for this `h`.
    pub measured_c: f64,
}

pub fn weight_identity_check(h: &TestFunction, gamma: f64, p: &MaxwellianParams, q: &QuadratureRule) -> Result<WeightIdentity> {
    let t = p.temperature;
    let w = |v: &Point| bracket(&(v - p.u)).powf(gamma);
    // Integrals over Lebesgue measure are written against M: g^2 = h^2 M etc.
    let half_log_grad = |v: &Point| -(v - p.u) / (2.0 * t);
    let lhs = integrate_against_maxwellian(p, q, |v| h.gradient(v).norm_squared() * w(v))?;
    let gradient_term = integrate_against_maxwellian(p, q, |v| (h.gradient(v) + h.eval(v) * half_log_grad(v)).norm_squared() * w(v))?;
    let potential_term = integrate_against_maxwellian(p, q, |v| h.eval(v).powi(2) * (v - p.u).norm_squared() / (4.0 * t * t) * w(v))?;
    let cross_term = integrate_against_maxwellian(p, q, |v| {
        let grad_g = h.gradient(v) + h.eval(v) * half_log_grad(v);
        h.eval(v) * grad_g.dot(&(v - p.u)) / t * w(v)
    })?;
    let residual = lhs - (gradient_term + potential_term + cross_term);
    let moment_term = integrate_against_maxwellian(p, q, |v| h.eval(v).powi(2) * (v - p.u).norm().powf(2.0 + gamma))?;
    let l2_term = integrate_against_maxwellian(p, q, |v| h.eval(v).powi(2) * w(v))?;
    let h1_term = lhs + l2_term;
    let measured_c = if l2_term > 0.0 { ((moment_term - h1_term) / l2_term).max(0.0) } else { 0.0 };
    Ok(WeightIdentity { lhs, gradient_term, potential_term, cross_term, residual, moment_term, h1_term, l2_term, measured_c })
}

/// Mollified tail weight `1 - Θ_R`; `R = 0` means no truncation.
pub fn tail_window(radius: f64) -> Window {
    if radius == 0.0 {
        Window::All
    } else {
        Window::SmoothTail(radius)
    }
}

/// `K_R^L h(v) = -M^{-1} ∇·(M ∫ a_R(v - v_*) ∇h(v_*) M_* dv_*)` for the Maxwell
/// kernel, with `a_R(z) = (1 - Θ_R(|z|))|z|^2 P(z)`. Since `∇·a_R(z) = -(N-1)(1-Θ_R) z`,
/// `K_R^L h(v) = ∫ (1-Θ_R)[(N-1) z + |z|^2 P(z)(v-u)/T]·∇h(v_*) M_* dv_*`.
pub fn apply_k_r_l(h: &TestFunction, radius: f64, p: &MaxwellianParams, _q: &QuadratureRule) -> Result<TestFunction> {
    if !(radius >= 0.0) {
        return Err(Error::DomainError(format!("tail radius {radius} < 0")));
    }
    let k = CollisionKernel::maxwell(p.dim);
    let profile = RadialProfile::kinetic(&k).with_window(tail_window(radius));
    let (h, p) = (h.clone(), *p);
    let label = format!("K_{radius}^L[{}]", h.label);
    Ok(TestFunction::from_fn(p.dim, label, move |v| {
        let rule = match CenteredRule::new(v, &p, &profile, PointwiseOrders::default()) {
            Ok(r) => r,
            Err(_) => return f64::NAN,
        };
        let n1 = (p.dim - 1) as f64;
        let drift = (v - p.u) / p.temperature;
        let mut acc = 0.0;
        for (vs, w) in rule.nodes.iter().zip(&rule.weights) {
            let z = v - vs;
            let g = h.gradient(vs);
            let pz = z.norm_squared() * drift - z * z.dot(&drift);
            acc += w * (n1 * z + pz).dot(&g);
        }
        acc
    }))
}

/// Galerkin matrix of `⟨K_R^L e_j, e_i⟩` for the Maxwell kernel.
pub fn tail_gain_matrix_l(basis: &GalerkinBasis, radius: f64, rotations: &RotationSet, degree: usize) -> Result<DMatrix<f64>> {
    let dim = basis.dim;
    let k = CollisionKernel::maxwell(dim);
    let p = MaxwellianParams::normalized(dim);
    let profile = RadialProfile::landau(&k).with_window(tail_window(radius));
    let rule = PairRule::for_degree(&p, &profile, degree)?;
    Ok(assemble_pair_form(basis, &rule, None, PairForm::LandauGain, None, Directions::Rotations(rotations))?.matrix)
}

fn ball_profile(window: Window) -> RadialProfile {
    RadialProfile { phi: None, extra_power: 2.0, window }
}

/// Dyadic decomposition of `D^L(h)`: each term is the Landau Dirichlet form
/// with `Φ` replaced by the ball or shell indicator.
pub fn dyadic_decompose_l(
    h: &TestFunction,
    ratio: f64,
    n_max: usize,
    k: &CollisionKernel,
    p: &MaxwellianParams,
    q: &QuadratureRule,
) -> Result<DyadicDecomposition> {
    check_dyadic(k, ratio)?;
    let deg = form_degree(h, q);
    check_exactness(q, deg)?;
    let (tw, bw) = dyadic_windows(ratio, n_max);
    let eval = |w: Window| -> Result<(f64, usize, f64)> {
        let (rule, n) = shell_rule(p, w, deg, 1)?;
        match rule {
            None => Ok((0.0, 0, 0.0)),
            Some(rule) => Ok((landau_pair_sum(p, &ball_profile(w), deg, h)?, n, rule.mass())),
        }
    };
    let mut out = DyadicDecomposition {
        ratio,
        gamma: k.gamma,
        n0: 0,
        terms_tilde: vec![],
        terms_cumulative: vec![],
        s: geometric_sum(ratio, k.gamma)?,
        shell_nodes: vec![],
        shell_mass: vec![],
    };
    for w in tw {
        let (d, n, m) = eval(w)?;
        out.terms_tilde.push(d);
        out.shell_nodes.push(n);
        out.shell_mass.push(m);
    }
    for w in bw {
        out.terms_cumulative.push(eval(w)?.0);
    }
    Ok(out)
}

/// Shell and ball matrices of the Landau dyadic terms (`u = 0`).
pub fn dyadic_matrices_l(basis: &GalerkinBasis, ratio: f64, n_max: usize, k: &CollisionKernel, rotations: &RotationSet) -> Result<DyadicMatrices> {
    check_dyadic(k, ratio)?;
    let p = MaxwellianParams::normalized(basis.dim);
    let deg = 2 * basis.degree;
    let n = basis.len();
    let (tw, bw) = dyadic_windows(ratio, n_max);
    let build = |w: Window| -> Result<(DMatrix<f64>, usize, f64)> {
        match shell_rule(&p, w, deg, 1)? {
            (None, _) => Ok((DMatrix::zeros(n, n), 0, 0.0)),
            (Some(_), nodes) => {
                let rule = PairRule::for_degree(&p, &ball_profile(w), deg)?;
                let m = assemble_pair_form(basis, &rule, None, PairForm::LandauDirichlet, None, Directions::Rotations(rotations))?;
                Ok((m.matrix, nodes, rule.mass()))
            }
        }
    };
    let mut out = DyadicMatrices { ratio, gamma: k.gamma, tilde: vec![], cumulative: vec![], shell_nodes: vec![], shell_mass: vec![] };
    for w in tw {
        let (m, nodes, mass) = build(w)?;
        out.tilde.push(m);
        out.shell_nodes.push(nodes);
        out.shell_mass.push(mass);
    }
    for w in bw {
        out.cumulative.push(build(w)?.0);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn projection_invariants() {
        let z = Point::new(0.3, -1.0, 2.0);
        let p = ProjectionMatrix::new(&z, 3).unwrap().entries;
        assert!((p * p - p).amax() < 1e-14);
        assert!((p * z).amax() < 1e-14);
        assert!((p.trace() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn maxwell_diffusion_matrix_closed_form() {
        // ℳ(v) = π^{3/2}[(|v|^2 + 1) I - v vᵀ] for Φ = 1, N = 3.
        let k = CollisionKernel::maxwell(3);
        let p = MaxwellianParams::normalized(3);
        let q = QuadratureRule::new(3);
        for v in [Point::zeros(), Point::new(0.5, -1.0, 2.0), Point::new(6.0, 0.0, 1.0)] {
            let m = diffusion_matrix(&k, &p, &v, &q).unwrap();
            let want = (Matrix3::identity() * (v.norm_squared() + 1.0) - v * v.transpose()) * PI.powf(1.5);
            assert!((m - want).amax() < 1e-9 * want.amax(), "{m} {want}");
        }
    }

    #[test]
    fn dirichlet_form_vanishes_on_invariants() {
        for dim in [2, 3] {
            let p = MaxwellianParams::normalized(dim);
            let q = QuadratureRule::new(dim);
            let k = CollisionKernel::truncated(dim, -1.0).unwrap();
            for h in [TestFunction::coordinate(dim, 0), TestFunction::energy(dim)] {
                assert!(dirichlet_form_l(&h, &k, &p, &q).unwrap().abs() < 1e-9);
            }
            let h = TestFunction::monomial(dim, [1, 1, 0]);
            assert!(dirichlet_form_l(&h, &k, &p, &q).unwrap() > 0.0);
        }
    }

    #[test]
    fn hessian_examples() {
        for g in [-3.0, -1.0, 0.0, 1.0] {
            let h = hessian_phi(g, &Point::zeros(), 3);
            assert!((h - Matrix3::identity() * (2.0 - g)).amax() < 1e-15);
        }
        let be = BakryEmeryPotential::new(-1.0, 3);
        let v = Point::new(3f64.sqrt(), 0.0, 0.0);
        assert!((be.min_hessian_eigenvalue(&v) - be.convexity_bound()).abs() < 1e-14);
    }

    #[test]
    fn poincare_extremal_case() {
        let p = MaxwellianParams::normalized(3);
        let q = QuadratureRule::new(3);
        let r = poincare_check(PoincareMeasure::Maxwellian, &TestFunction::coordinate(3, 0), &p, &q).unwrap();
        assert!((r.lhs - 1.0).abs() < 1e-12 && (r.variance - 0.5).abs() < 1e-12);
        assert!((r.ratio - 2.0).abs() < 1e-9);
        let r = poincare_check(PoincareMeasure::Weighted(-1.0), &TestFunction::coordinate(3, 0), &p, &q).unwrap();
        assert!(r.holds && r.ratio >= 1.0);
    }

    #[test]
    fn weight_identity_residuals() {
        let p = MaxwellianParams::normalized(3);
        let q = QuadratureRule::new(3);
        for h in [TestFunction::constant(3, 1.0), TestFunction::coordinate(3, 0), TestFunction::monomial(3, [2, 1, 0])] {
            for g in [-1.0, 0.0] {
                let w = weight_identity_check(&h, g, &p, &q).unwrap();
                assert!(w.residual.abs() < 1e-8, "{w:?}");
            }
        }
    }

    #[test]
    fn pointwise_tail_operator_matches_galerkin_form() {
        // ⟨K^L h, h⟩ from the pointwise formula against the pair-rule form.
        let p = MaxwellianParams::normalized(2);
        let q = QuadratureRule::with_orders(2, 16, 9, 8);
        let h = TestFunction::monomial(2, [2, 1, 0]);
        for radius in [0.0, 1.0] {
            let kh = apply_k_r_l(&h, radius, &p, &q).unwrap();
            let pointwise = integrate_against_maxwellian(&p, &q, |v| kh.eval(v) * h.eval(v)).unwrap();
            let k = CollisionKernel::maxwell(2);
            let rule = PairRule::for_degree(&p, &RadialProfile::landau(&k).with_window(tail_window(radius)), 8).unwrap();
            let pair = sum_pairs(&rule, &frames(&SphereRule::exact_to(2, 8)), None, |pp| {
                let z = pp.omega;
                let (a, b) = (h.gradient(&pp.v), h.gradient(&pp.v_star));
                pp.weight * (a.dot(&b) - a.dot(&z) * b.dot(&z))
            });
            assert!((pointwise / pair - 1.0).abs() < 1e-6, "{radius}: {pointwise} {pair}");
        }
    }
}
