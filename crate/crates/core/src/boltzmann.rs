//! Collision geometry, the Boltzmann Dirichlet form, Grad's splitting
//! `L = K - A`, the tail operator `K_R` and the dyadic decomposition of the
//! Dirichlet form by relative speed.

use crate::basis::GalerkinBasis;
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::kernels::{collision_frequency, AngularRule, CollisionKernel};
use crate::maxwellian::{integrate_against_maxwellian, MaxwellianParams};
use crate::pair::{assemble_pair_form, frames, sum_pairs, Directions, PairForm, PairRule, RadialProfile, RotationSet, Window};
use crate::pointwise::{gain_at, PointwiseOrders};
use crate::quadrature::{QuadratureRule, SphereRule};
use crate::test_function::TestFunction;
use nalgebra::{DMatrix, DVector};

/// Velocities before and after an elastic collision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollisionState {
    pub v: Point,
    pub v_star: Point,
    pub sigma: Point,
    pub v_prime: Point,
    pub v_star_prime: Point,
    /// `k·σ` with `k = (v - v_*)/|v - v_*|`; 1 when `v = v_*`.
    pub cos_theta: f64,
}

impl CollisionState {
    pub fn momentum_defect(&self) -> Point {
        (self.v_prime + self.v_star_prime) - (self.v + self.v_star)
    }

    /// Relative change of `|v|^2 + |v_*|^2`.
    pub fn energy_defect(&self) -> f64 {
        let before = self.v.norm_squared() + self.v_star.norm_squared();
        let after = self.v_prime.norm_squared() + self.v_star_prime.norm_squared();
        if before == 0.0 {
            after
        } else {
            (after - before).abs() / before
        }
    }
}

/// `v' = V + (r/2)σ`, `v'_* = V - (r/2)σ` with `V = (v + v_*)/2`, `r = |v - v_*|`.
pub fn post_collision(v: &Point, v_star: &Point, sigma: &Point) -> CollisionState {
    let center = (v + v_star) * 0.5;
    let z = v - v_star;
    let r = z.norm();
    let half = sigma * (0.5 * r);
    let v_prime = center + half;
    // Built from the sum so that momentum is conserved to the last bit.
    let v_star_prime = (v + v_star) - v_prime;
    let cos_theta = if r == 0.0 { 1.0 } else { z.dot(sigma) / r };
    CollisionState { v: *v, v_star: *v_star, sigma: *sigma, v_prime, v_star_prime, cos_theta }
}

/// Polynomial degree the pair rules must integrate for quadratic forms in `h`.
pub(crate) fn form_degree(h: &TestFunction, q: &QuadratureRule) -> usize {
    q.pair_degree.max(2 * h.degree().unwrap_or(0))
}

pub(crate) fn check_exactness(q: &QuadratureRule, degree: usize) -> Result<()> {
    if q.exactness_degree() < degree.max(4) {
        return Err(Error::ExactnessViolation(format!(
            "tensor rule exact to degree {} but degree {} is needed",
            q.exactness_degree(),
            degree.max(4)
        )));
    }
    Ok(())
}

/// Full-loop pair sum `Σ w F` with σ for the given profile.
fn pair_sum(
    k: &CollisionKernel,
    p: &MaxwellianParams,
    profile: &RadialProfile,
    degree: usize,
    f: impl FnMut(&crate::pair::PairPoint) -> f64,
) -> Result<f64> {
    let rule = PairRule::for_degree(p, profile, degree)?;
    let dirs = frames(&SphereRule::exact_to(p.dim, degree));
    let ang = AngularRule::new(k, degree)?;
    let val = sum_pairs(&rule, &dirs, Some(&ang), f);
    if !val.is_finite() {
        return Err(Error::NonFiniteEvaluation("pair quadrature".into()));
    }
    Ok(val)
}

fn delta_sq(h: &TestFunction, pp: &crate::pair::PairPoint) -> f64 {
    let (_, vp, vps) = pp.post.expect("angular rule");
    let d = h.eval(&vps) + h.eval(&vp) - h.eval(&pp.v_star) - h.eval(&pp.v);
    pp.weight * d * d
}

/// `(1/4) ∫∫∫ B [h'_* + h' - h_* - h]^2 M M_*`.
pub fn dirichlet_form_b(h: &TestFunction, k: &CollisionKernel, p: &MaxwellianParams, q: &QuadratureRule) -> Result<f64> {
    k.check_boltzmann()?;
    let deg = form_degree(h, q);
    check_exactness(q, deg)?;
    Ok(0.25 * pair_sum(k, p, &RadialProfile::kinetic(k), deg, |pp| delta_sq(h, pp))?)
}

/// `⟨K^B h, h⟩_{L^2(M)} = ∫∫∫ B h [h'_* + h' - h_*] M M_*`.
pub fn gain_form_b(h: &TestFunction, k: &CollisionKernel, p: &MaxwellianParams, q: &QuadratureRule) -> Result<f64> {
    k.check_boltzmann()?;
    let deg = form_degree(h, q);
    check_exactness(q, deg)?;
    pair_sum(k, p, &RadialProfile::kinetic(k), deg, |pp| {
        let (_, vp, vps) = pp.post.expect("angular rule");
        pp.weight * h.eval(&pp.v) * (h.eval(&vps) + h.eval(&vp) - h.eval(&pp.v_star))
    })
}

/// `⟨A^B h, h⟩_{L^2(M)} = ∫ ν h^2 M`, with `ν` from its radial reduction.
pub fn loss_form_b(h: &TestFunction, k: &CollisionKernel, p: &MaxwellianParams, q: &QuadratureRule) -> Result<f64> {
    k.check_boltzmann()?;
    check_exactness(q, 2 * h.degree().unwrap_or(0))?;
    let err = std::cell::RefCell::new(None);
    let val = integrate_against_maxwellian(p, q, |v| match collision_frequency(k, p, v) {
        Ok(nu) => nu * h.eval(v).powi(2),
        Err(e) => {
            err.borrow_mut().get_or_insert(e);
            0.0
        }
    })?;
    match err.into_inner() {
        Some(e) => Err(e),
        None => Ok(val),
    }
}

/// The three terms of Grad's splitting for one test function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitCheck {
    pub dirichlet: f64,
    pub loss: f64,
    pub gain: f64,
}

impl SplitCheck {
    /// `|D - (⟨Ah,h⟩ - ⟨Kh,h⟩)| / (1 + |D|)`.
    pub fn residual(&self) -> f64 {
        (self.dirichlet - (self.loss - self.gain)).abs() / (1.0 + self.dirichlet.abs())
    }
}

pub fn split_check_b(h: &TestFunction, k: &CollisionKernel, p: &MaxwellianParams, q: &QuadratureRule) -> Result<SplitCheck> {
    if !k.is_cutoff() {
        return Err(Error::DomainError("Grad splitting needs an integrable angular kernel".into()));
    }
    Ok(SplitCheck {
        dirichlet: dirichlet_form_b(h, k, p, q)?,
        loss: loss_form_b(h, k, p, q)?,
        gain: gain_form_b(h, k, p, q)?,
    })
}

/// `A^B h = ν h`, evaluated on demand.
pub fn apply_a_b(h: &TestFunction, k: &CollisionKernel, p: &MaxwellianParams, _q: &QuadratureRule) -> Result<TestFunction> {
    k.check_boltzmann()?;
    if !k.is_cutoff() {
        return Err(Error::DomainError("A^B needs an integrable angular kernel".into()));
    }
    let (h, k, p) = (h.clone(), *k, *p);
    let label = format!("A^B[{}]", h.label);
    Ok(TestFunction::from_fn(p.dim, label, move |v| collision_frequency(&k, &p, v).unwrap_or(f64::NAN) * h.eval(v)))
}

fn gain_operator(h: &TestFunction, k: &CollisionKernel, p: &MaxwellianParams, q: &QuadratureRule, window: Window, label: String) -> Result<TestFunction> {
    k.check_boltzmann()?;
    let deg = form_degree(h, q) / 2 + 2;
    let ang = AngularRule::new(k, deg)?;
    let profile = RadialProfile::kinetic(k).with_window(window);
    let orders = PointwiseOrders { azimuth: (deg + 4).max(PointwiseOrders::default().azimuth), ..Default::default() };
    let (h, p) = (h.clone(), *p);
    Ok(TestFunction::from_fn(p.dim, label, move |v| gain_at(&h, v, &p, &profile, &ang, orders).unwrap_or(f64::NAN)))
}

/// `K^B h(v) = ∫∫ B M_* [h'_* + h' - h_*] dv_* dσ`, evaluated on demand.
pub fn apply_k_b(h: &TestFunction, k: &CollisionKernel, p: &MaxwellianParams, q: &QuadratureRule) -> Result<TestFunction> {
    if !k.is_cutoff() {
        return Err(Error::DomainError("K^B needs an integrable angular kernel".into()));
    }
    gain_operator(h, k, p, q, Window::All, format!("K^B[{}]", h.label))
}

/// Tail operator `K_R^B` for the Maxwell kernel: `K^B` restricted to `|v - v_*| ≥ R`.
pub fn apply_k_r_b(h: &TestFunction, radius: f64, p: &MaxwellianParams, q: &QuadratureRule) -> Result<TestFunction> {
    if !(radius >= 0.0) {
        return Err(Error::DomainError(format!("tail radius {radius} < 0")));
    }
    let k = CollisionKernel::maxwell(p.dim);
    let w = if radius == 0.0 { Window::All } else { Window::AtLeast(radius) };
    gain_operator(h, &k, p, q, w, format!("K_{radius}^B[{}]", h.label))
}

/// Galerkin matrix of `⟨K_R^B e_j, e_i⟩` for the Maxwell kernel (`R = 0`: full `K^B`).
pub fn tail_gain_matrix_b(basis: &GalerkinBasis, radius: f64, rotations: &RotationSet, degree: usize) -> Result<DMatrix<f64>> {
    let dim = basis.dim;
    let k = CollisionKernel::maxwell(dim);
    let p = MaxwellianParams::normalized(dim);
    let w = if radius == 0.0 { Window::All } else { Window::AtLeast(radius) };
    let profile = RadialProfile::kinetic(&k).with_window(w);
    let rule = PairRule::for_degree(&p, &profile, degree)?;
    let ang = AngularRule::new(&k, degree)?;
    Ok(assemble_pair_form(basis, &rule, Some(&ang), PairForm::BoltzmannGain, None, Directions::Rotations(rotations))?.matrix)
}

/// Shell terms, cumulative ball terms and the geometric factor of the dyadic
/// decomposition. Each term is `(1/4)∫∫∫ 1_{window} b [Δh]^2 M M_*`, i.e. the
/// Dirichlet form with `Φ` replaced by the window.
#[derive(Debug, Clone, PartialEq)]
pub struct DyadicDecomposition {
    pub ratio: f64,
    pub gamma: f64,
    pub n0: usize,
    /// Ball `|v - v_*| ≤ R` first, then shells `R^n < |v - v_*| ≤ R^{n+1}`.
    pub terms_tilde: Vec<f64>,
    /// Balls `|v - v_*| ≤ R^{k+1}`.
    pub terms_cumulative: Vec<f64>,
    /// `Σ_k (R^γ)^k`, summed numerically.
    pub s: f64,
    /// Radial nodes used in each shell (0 for shells whose Gaussian mass underflows).
    pub shell_nodes: Vec<usize>,
    /// `∫∫ 1_{shell} M M_*` from the quadrature.
    pub shell_mass: Vec<f64>,
}

/// `Σ_{k ≥ 0} (R^γ)^k` summed until the terms stop changing the total.
pub fn geometric_sum(ratio: f64, gamma: f64) -> Result<f64> {
    let q = ratio.powf(gamma);
    if !(q < 1.0) || ratio <= 1.0 {
        return Err(Error::DomainError(format!("geometric ratio R^γ = {q} is not below 1")));
    }
    let mut s = 0.0;
    let mut term = 1.0;
    loop {
        let next = s + term;
        if next == s {
            return Ok(s);
        }
        s = next;
        term *= q;
    }
}

impl DyadicDecomposition {
    /// Closed form `1/(1 - R^γ)`.
    pub fn s_closed_form(&self) -> f64 {
        1.0 / (1.0 - self.ratio.powf(self.gamma))
    }

    /// `max_k |D_k - Σ_{n ≤ k} D̃_n| / max(|D_k|, tiny)`.
    pub fn telescoping_residual(&self) -> f64 {
        let mut acc = 0.0;
        let mut worst: f64 = 0.0;
        let scale = self.terms_cumulative.iter().fold(0.0f64, |a, b| a.max(b.abs())).max(f64::MIN_POSITIVE);
        for (t, c) in self.terms_tilde.iter().zip(&self.terms_cumulative) {
            acc += t;
            worst = worst.max((c - acc).abs() / c.abs().max(1e-14 * scale));
        }
        worst
    }

    /// `Σ_n R^{(n+1)γ} D̃_n`.
    pub fn weighted_sum(&self) -> f64 {
        self.terms_tilde.iter().enumerate().map(|(n, d)| self.ratio.powf((n + 1) as f64 * self.gamma) * d).sum()
    }

    /// Both sides of the summation exchange over the computed range. The
    /// right side is truncated the same way so the identity is exact; the
    /// neglected tail is bounded by [`DyadicDecomposition::tail_bound`].
    pub fn exchange_sides(&self) -> (f64, f64) {
        let g = self.gamma;
        let rr = self.ratio;
        let kmax = self.terms_cumulative.len();
        let lhs: f64 = self.terms_cumulative.iter().enumerate().map(|(k, d)| rr.powf((k + 1) as f64 * g) * d).sum();
        let rhs: f64 = self
            .terms_tilde
            .iter()
            .enumerate()
            .map(|(n, d)| d * (n..kmax).map(|k| rr.powf((k + 1) as f64 * g)).sum::<f64>())
            .sum();
        (lhs, rhs)
    }

    /// `D_{kmax} Σ_{k > kmax} R^{(k+1)γ}`, the omitted part of the exchanged sum.
    pub fn tail_bound(&self) -> f64 {
        let kmax = self.terms_cumulative.len();
        let last = self.terms_cumulative.last().copied().unwrap_or(0.0);
        last * self.ratio.powf((kmax + 1) as f64 * self.gamma) * self.s
    }
}

/// Windows of the dyadic ball and shells, then of the cumulative balls.
pub fn dyadic_windows(ratio: f64, n_max: usize) -> (Vec<Window>, Vec<Window>) {
    let mut tilde = vec![Window::AtMost(ratio)];
    for n in 1..=n_max {
        tilde.push(Window::Shell(ratio.powi(n as i32), ratio.powi(n as i32 + 1)));
    }
    let balls = (0..=n_max).map(|k| Window::AtMost(ratio.powi(k as i32 + 1))).collect();
    (tilde, balls)
}

pub(crate) fn check_dyadic(k: &CollisionKernel, ratio: f64) -> Result<()> {
    if !(ratio > 1.0) {
        return Err(Error::DomainError(format!("dyadic ratio {ratio} must exceed 1")));
    }
    if k.gamma >= 0.0 {
        return Err(Error::DomainError("dyadic decomposition is for soft potentials (γ < 0)".into()));
    }
    Ok(())
}

/// Minimum node count a shell with non-negligible mass must receive.
pub const MIN_SHELL_NODES: usize = 10;

/// Build the rule for one window and apply the shell-underflow guard.
pub(crate) fn shell_rule(p: &MaxwellianParams, window: Window, degree: usize, angular_len: usize) -> Result<(Option<PairRule>, usize)> {
    let profile = RadialProfile { phi: None, extra_power: 0.0, window };
    let rule = PairRule::for_degree(p, &profile, degree)?;
    if rule.radial.is_empty() {
        return Ok((None, 0));
    }
    let total = rule.radial.len() * rule.centers.len() * angular_len.max(1);
    if total < MIN_SHELL_NODES || rule.radial.len() < degree / 2 + 1 {
        return Err(Error::ShellUnderflow(format!(
            "window {window:?} received {} radial nodes ({total} in total)",
            rule.radial.len()
        )));
    }
    let n = rule.radial.len();
    Ok((Some(rule), n))
}

/// Dyadic decomposition of `D^B(h)` for a soft truncated kernel.
pub fn dyadic_decompose(
    h: &TestFunction,
    ratio: f64,
    n_max: usize,
    k: &CollisionKernel,
    p: &MaxwellianParams,
    q: &QuadratureRule,
) -> Result<DyadicDecomposition> {
    k.check_boltzmann()?;
    check_dyadic(k, ratio)?;
    let deg = form_degree(h, q);
    check_exactness(q, deg)?;
    let dirs = frames(&SphereRule::exact_to(p.dim, deg));
    let ang = AngularRule::new(k, deg)?;
    let (tw, bw) = dyadic_windows(ratio, n_max);
    let eval = |w: Window| -> Result<(f64, usize, f64)> {
        let (rule, n) = shell_rule(p, w, deg, ang.len())?;
        match rule {
            None => Ok((0.0, 0, 0.0)),
            Some(rule) => {
                let mass = rule.mass();
                Ok((0.25 * sum_pairs(&rule, &dirs, Some(&ang), |pp| delta_sq(h, pp)), n, mass))
            }
        }
    };
    let mut terms_tilde = Vec::new();
    let mut shell_nodes = Vec::new();
    let mut shell_mass = Vec::new();
    for w in tw {
        let (d, n, m) = eval(w)?;
        terms_tilde.push(d);
        shell_nodes.push(n);
        shell_mass.push(m);
    }
    let mut terms_cumulative = Vec::new();
    for w in bw {
        terms_cumulative.push(eval(w)?.0);
    }
    Ok(DyadicDecomposition { ratio, gamma: k.gamma, n0: 0, terms_tilde, terms_cumulative, s: geometric_sum(ratio, k.gamma)?, shell_nodes, shell_mass })
}

/// Galerkin matrices of the dyadic terms, for evaluating many test functions.
#[derive(Debug, Clone)]
pub struct DyadicMatrices {
    pub ratio: f64,
    pub gamma: f64,
    pub tilde: Vec<DMatrix<f64>>,
    pub cumulative: Vec<DMatrix<f64>>,
    pub shell_nodes: Vec<usize>,
    pub shell_mass: Vec<f64>,
}

impl DyadicMatrices {
    pub fn decompose(&self, c: &DVector<f64>) -> Result<DyadicDecomposition> {
        let quad = |m: &DMatrix<f64>| (c.transpose() * m * c)[(0, 0)];
        Ok(DyadicDecomposition {
            ratio: self.ratio,
            gamma: self.gamma,
            n0: 0,
            terms_tilde: self.tilde.iter().map(quad).collect(),
            terms_cumulative: self.cumulative.iter().map(quad).collect(),
            s: geometric_sum(self.ratio, self.gamma)?,
            shell_nodes: self.shell_nodes.clone(),
            shell_mass: self.shell_mass.clone(),
        })
    }
}

/// Assemble shell and ball matrices of the Boltzmann dyadic terms (`u = 0`).
pub fn dyadic_matrices_b(
    basis: &GalerkinBasis,
    ratio: f64,
    n_max: usize,
    k: &CollisionKernel,
    rotations: &RotationSet,
) -> Result<DyadicMatrices> {
    k.check_boltzmann()?;
    check_dyadic(k, ratio)?;
    let p = MaxwellianParams::normalized(basis.dim);
    let deg = 2 * basis.degree;
    let ang = AngularRule::new(k, deg)?;
    let n = basis.len();
    let (tw, bw) = dyadic_windows(ratio, n_max);
    let build = |w: Window| -> Result<(DMatrix<f64>, usize, f64)> {
        match shell_rule(&p, w, deg, ang.len())? {
            (None, _) => Ok((DMatrix::zeros(n, n), 0, 0.0)),
            (Some(rule), nodes) => {
                let m = assemble_pair_form(basis, &rule, Some(&ang), PairForm::BoltzmannDirichlet, None, Directions::Rotations(rotations))?;
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
