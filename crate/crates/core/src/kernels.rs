//! Collision kernels `B = Φ(|v - v_*|) b(cos θ)`, the collision frequency and
//! numerical checks of the structural assumptions on `Φ` and `b`.

use crate::error::{Error, Result};
use crate::geometry::{sphere_area, Point};
use crate::maxwellian::MaxwellianParams;
use crate::quadrature::{composite_legendre, gauss_from_discrete, gauss_legendre, gauss_power, Rule1D, SphereRule};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhiFamily {
    /// `Φ(r) = r^γ`.
    Power,
    /// `Φ(r) = min(r^γ, 1)`.
    Truncated,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AngularFamily {
    /// `b ≡ 1`.
    Constant,
    /// `b(θ) = θ^{-(N-1)-α}`, frozen below `theta_min`.
    Singular { alpha: f64, theta_min: f64 },
}

/// Recorded structural constants of a kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelConstants {
    pub c_phi: f64,
    pub c_phi_upper: f64,
    pub c_b_lower: f64,
    pub c_b_upper: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollisionKernel {
    pub dim: usize,
    pub gamma: f64,
    pub phi: PhiFamily,
    pub angular: AngularFamily,
    /// Restrict deviation angles to `[0, π/2]`.
    pub symmetrized: bool,
    pub constants: KernelConstants,
}

impl CollisionKernel {
    pub fn new(dim: usize, gamma: f64, phi: PhiFamily, angular: AngularFamily, symmetrized: bool) -> Result<CollisionKernel> {
        if dim != 2 && dim != 3 {
            return Err(Error::DomainError(format!("dimension {dim}")));
        }
        if !(gamma >= -(dim as f64) && gamma <= 1.0) {
            return Err(Error::DomainError(format!("gamma = {gamma} outside [-N, 1]")));
        }
        if let AngularFamily::Singular { alpha, theta_min } = angular {
            if !(0.0..2.0).contains(&alpha) || !(theta_min > 0.0 && theta_min < PI / 2.0) {
                return Err(Error::DomainError(format!("alpha = {alpha}, theta_min = {theta_min}")));
            }
        }
        Ok(CollisionKernel {
            dim,
            gamma,
            phi,
            angular,
            symmetrized,
            constants: KernelConstants { c_phi: 1.0, c_phi_upper: 1.0, c_b_lower: 1.0, c_b_upper: 1.0 },
        })
    }

    /// Maxwell molecules with constant angular kernel.
    pub fn maxwell(dim: usize) -> CollisionKernel {
        CollisionKernel::new(dim, 0.0, PhiFamily::Power, AngularFamily::Constant, false).unwrap()
    }

    pub fn power(dim: usize, gamma: f64) -> Result<CollisionKernel> {
        CollisionKernel::new(dim, gamma, PhiFamily::Power, AngularFamily::Constant, false)
    }

    pub fn truncated(dim: usize, gamma: f64) -> Result<CollisionKernel> {
        CollisionKernel::new(dim, gamma, PhiFamily::Truncated, AngularFamily::Constant, false)
    }

    /// Same kinetic part with the non-cutoff angular kernel.
    pub fn with_singular(self, alpha: f64, theta_min: f64, symmetrized: bool) -> Result<CollisionKernel> {
        CollisionKernel::new(self.dim, self.gamma, self.phi, AngularFamily::Singular { alpha, theta_min }, symmetrized)
    }

    pub fn with_gamma(self, gamma: f64) -> Result<CollisionKernel> {
        CollisionKernel::new(self.dim, gamma, self.phi, self.angular, self.symmetrized)
    }

    /// Boltzmann requires `γ > -N`.
    pub fn check_boltzmann(&self) -> Result<()> {
        if self.phi == PhiFamily::Power && self.gamma <= -(self.dim as f64) {
            return Err(Error::SingularMask(format!("|v-v*|^{} is not locally integrable", self.gamma)));
        }
        Ok(())
    }

    pub fn is_cutoff(&self) -> bool {
        matches!(self.angular, AngularFamily::Constant)
    }

    pub fn alpha(&self) -> Option<f64> {
        match self.angular {
            AngularFamily::Constant => None,
            AngularFamily::Singular { alpha, .. } => Some(alpha),
        }
    }

    pub fn theta_min(&self) -> Option<f64> {
        match self.angular {
            AngularFamily::Constant => None,
            AngularFamily::Singular { theta_min, .. } => Some(theta_min),
        }
    }

    /// Kinetic part. For the power family with `γ < 0`, `r = 0` returns `+∞`.
    pub fn phi_eval(&self, r: f64) -> f64 {
        let p = if self.gamma == 0.0 { 1.0 } else { r.powf(self.gamma) };
        match self.phi {
            PhiFamily::Power => p,
            PhiFamily::Truncated => p.min(1.0),
        }
    }

    /// Exponent `e` such that `Φ(r) ~ r^e` near the origin.
    pub fn phi_exponent_at_zero(&self) -> f64 {
        match self.phi {
            PhiFamily::Power => self.gamma,
            PhiFamily::Truncated => self.gamma.max(0.0),
        }
    }

    /// Radii where `Φ` is not smooth.
    pub fn phi_breakpoints(&self) -> Vec<f64> {
        match self.phi {
            PhiFamily::Truncated if self.gamma != 0.0 => vec![1.0],
            _ => vec![],
        }
    }

    fn theta_max(&self) -> f64 {
        if self.symmetrized {
            PI / 2.0
        } else {
            PI
        }
    }

    /// Angular part as a function of the deviation angle.
    pub fn b_eval(&self, theta: f64) -> Result<f64> {
        if !(theta > 0.0 && theta <= PI) {
            return Err(Error::DomainError(format!("theta = {theta} not in (0, pi]")));
        }
        Ok(self.b_unchecked(theta))
    }

    pub(crate) fn b_unchecked(&self, theta: f64) -> f64 {
        if theta > self.theta_max() {
            return 0.0;
        }
        match self.angular {
            AngularFamily::Constant => 1.0,
            AngularFamily::Singular { alpha, theta_min } => {
                theta.max(theta_min).powf(-((self.dim - 1) as f64) - alpha)
            }
        }
    }

    /// Angular part as a function of `cos θ`.
    pub fn b_of_cos(&self, x: f64) -> f64 {
        self.b_unchecked(x.clamp(-1.0, 1.0).acos().max(f64::MIN_POSITIVE))
    }

    /// `∫_{S^{N-1}} b(k·σ) dσ`.
    pub fn angular_mass(&self) -> f64 {
        let base = angular_base_rule(self);
        base.mass() * sphere_area(self.dim - 1)
    }
}

/// Discretization of `b(θ) sin^{N-2}θ dθ` in the variable `x = cos θ`.
fn angular_base_rule(k: &CollisionKernel) -> Rule1D {
    let tmax = k.theta_max();
    let mut breaks = vec![0.0];
    if let AngularFamily::Singular { theta_min, .. } = k.angular {
        let mut t = theta_min;
        while t < tmax {
            breaks.push(t);
            t *= 2.0;
        }
    }
    breaks.push(tmax);
    let th = composite_legendre(&breaks, PI / 8.0, 24);
    let nodes = th.nodes.iter().map(|t| t.cos()).collect();
    let weights = th
        .nodes
        .iter()
        .zip(&th.weights)
        .map(|(t, w)| w * k.b_unchecked(*t) * t.sin().powi(k.dim as i32 - 2))
        .collect();
    Rule1D { nodes, weights }
}

/// Gauss rule for `σ` measured from an axis `k`: `σ = x k + sqrt(1-x^2) τ` with
/// `x` from a Gauss rule for the weight `b(x)(1-x^2)^{(N-3)/2}` and `τ` on the
/// unit sphere of `k^⊥`.
#[derive(Debug, Clone, PartialEq)]
pub struct AngularRule {
    pub dim: usize,
    pub cos: Vec<f64>,
    pub weights: Vec<f64>,
    /// `(cos φ, sin φ)` in a frame of `k^⊥`; in dimension 2 the pair `(±1, 0)`.
    pub tau: Vec<[f64; 2]>,
    pub tau_weights: Vec<f64>,
}

impl AngularRule {
    /// Exact for integrands that are polynomials of the given degree in `σ`.
    pub fn new(k: &CollisionKernel, degree: usize) -> Result<AngularRule> {
        let base = angular_base_rule(k);
        let x = gauss_from_discrete(&base.nodes, &base.weights, degree / 2 + 1)?;
        let (tau, tau_weights) = if k.dim == 2 {
            (vec![[1.0, 0.0], [-1.0, 0.0]], vec![1.0, 1.0])
        } else {
            let n = degree + 1;
            let t = (0..n)
                .map(|j| {
                    let a = 2.0 * PI * j as f64 / n as f64;
                    [a.cos(), a.sin()]
                })
                .collect();
            (t, vec![2.0 * PI / n as f64; n])
        };
        Ok(AngularRule { dim: k.dim, cos: x.nodes, weights: x.weights, tau, tau_weights })
    }

    pub fn len(&self) -> usize {
        self.cos.len() * self.tau.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All `(σ, weight)` pairs for the axis `k` with orthonormal complement `(t1, t2)`.
    pub fn sigmas(&self, k: &Point, t1: &Point, t2: &Point) -> Vec<(Point, f64)> {
        let mut out = Vec::with_capacity(self.len());
        for (x, wx) in self.cos.iter().zip(&self.weights) {
            let s = (1.0 - x * x).max(0.0).sqrt();
            for (t, wt) in self.tau.iter().zip(&self.tau_weights) {
                let sigma = k * *x + (t1 * t[0] + t2 * t[1]) * s;
                out.push((sigma, wx * wt));
            }
        }
        out
    }

    pub fn mass(&self) -> f64 {
        self.weights.iter().sum::<f64>() * self.tau_weights.iter().sum::<f64>()
    }
}

/// `e^{-t} I_0(t)` for `t ≥ 0`.
pub fn scaled_bessel_i0(t: f64) -> f64 {
    if t < 30.0 {
        let q = 0.25 * t * t;
        let (mut term, mut sum, mut k) = (1.0f64, 1.0f64, 0.0f64);
        loop {
            k += 1.0;
            term *= q / (k * k);
            sum += term;
            if term < 1e-17 * sum {
                break;
            }
        }
        sum * (-t).exp()
    } else {
        let (mut term, mut sum, mut k) = (1.0f64, 1.0f64, 0.0f64);
        loop {
            k += 1.0;
            let next = term * (2.0 * k - 1.0).powi(2) / (8.0 * k * t);
            if next > term || next < 1e-17 {
                break;
            }
            term = next;
            sum += term;
        }
        sum / (2.0 * PI * t).sqrt()
    }
}

/// `e^{-t} ∫_{S^{N-1}} e^{t ω·e} dω`.
pub fn scaled_sphere_exponential(dim: usize, t: f64) -> f64 {
    if dim == 2 {
        2.0 * PI * scaled_bessel_i0(t)
    } else if t < 1e-12 {
        4.0 * PI * (1.0 - t)
    } else {
        -4.0 * PI * (-2.0 * t).exp_m1() / (2.0 * t)
    }
}

/// Integral `∫_0^∞ g(r) r^β (...)` split in panels, with a Gauss–Jacobi first panel.
/// `smooth(r)` must be the integrand divided by `r^beta`.
pub(crate) fn radial_integral(beta: f64, breaks: &[f64], upper: f64, smooth: impl Fn(f64) -> f64) -> f64 {
    let mut pts: Vec<f64> = breaks.iter().copied().filter(|b| *b > 0.0 && *b < upper).collect();
    pts.push(upper);
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let first = pts[0].min(0.5);
    let jac = gauss_power(24, beta, first);
    let mut acc = jac.integrate(&smooth);
    let mut all = vec![first];
    all.extend(pts.iter().filter(|p| **p > first));
    let gl = composite_legendre(&all, 0.5, 24);
    acc += gl.integrate(|r| smooth(r) * r.powf(beta));
    acc
}

/// Collision frequency `ν(v) = ∫∫ B(|v - v_*|, σ) M_*(v_*) dv_* dσ`.
pub fn collision_frequency(k: &CollisionKernel, p: &MaxwellianParams, v: &Point) -> Result<f64> {
    k.check_boltzmann()?;
    let c = p.scale();
    let x = (v - p.u) / c;
    let a = x.norm();
    let n = k.dim as f64;
    let beta = n - 1.0 + k.phi_exponent_at_zero();
    let breaks: Vec<f64> = k.phi_breakpoints().iter().map(|b| b / c).chain([a]).collect();
    let upper = a + 10.0;
    let kk = *k;
    let radial = radial_integral(beta, &breaks, upper, |r| {
        let phi_over = if r == 0.0 { c.powf(kk.phi_exponent_at_zero()) } else { kk.phi_eval(c * r) / r.powf(kk.phi_exponent_at_zero()) };
        phi_over * (-(a - r) * (a - r)).exp() * scaled_sphere_exponential(kk.dim, 2.0 * a * r)
    });
    let val = k.angular_mass() * p.weight_factor() * radial;
    if !val.is_finite() {
        return Err(Error::NonFiniteEvaluation(format!("collision frequency at {:?}", v.as_slice())));
    }
    Ok(val)
}

/// Result of the sampled infimum in the angular lower-bound assumption.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CbEstimate {
    /// Minimum over the sampled pairs: an upper bound on the infimum.
    pub sampled_min: f64,
    /// `|S^{N-1}| min b`, a lower bound valid for monotone `b`.
    pub lower_bound: f64,
}

/// `inf_{σ1,σ2} ∫ min{b(σ1·σ3), b(σ2·σ3)} dσ3` over a deterministic sample.
/// By rotation invariance `σ1` is fixed to the first axis.
pub fn check_cb_lower_bound(k: &CollisionKernel, samples: usize, sphere: &SphereRule) -> CbEstimate {
    let s1 = Point::x();
    let golden = PI * (3.0 - 5f64.sqrt());
    let mut sampled_min = f64::INFINITY;
    for i in 0..samples.max(16) {
        let s2 = if k.dim == 2 {
            let a = PI * (i as f64 + 0.5) / samples as f64;
            Point::new(a.cos(), a.sin(), 0.0)
        } else {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / samples as f64;
            let r = (1.0 - z * z).sqrt();
            let a = golden * i as f64;
            Point::new(z, r * a.cos(), r * a.sin())
        };
        let val = sphere.integrate(|s3| k.b_of_cos(s1.dot(s3)).min(k.b_of_cos(s2.dot(s3))));
        sampled_min = sampled_min.min(val);
    }
    let bmin = if k.symmetrized { 0.0 } else { k.b_unchecked(PI) };
    CbEstimate { sampled_min, lower_bound: sphere_area(k.dim) * bmin }
}

/// Measured `(min, max)` of `Φ(r)/r^γ` over log-spaced radii in `[r_min, r_max]`.
pub fn phi_sandwich(k: &CollisionKernel, r_min: f64, r_max: f64, samples: usize) -> (f64, f64) {
    let (lo, hi) = (r_min.ln(), r_max.ln());
    (0..samples).fold((f64::INFINITY, 0.0f64), |(a, b), i| {
        let r = (lo + (hi - lo) * i as f64 / (samples - 1) as f64).exp();
        let ratio = k.phi_eval(r) / r.powf(k.gamma);
        (a.min(ratio), b.max(ratio))
    })
}

/// Measured `(min, max)` of `b(θ) θ^{N-1+α}` over `[θ_min, π/2]`.
pub fn angular_sandwich(k: &CollisionKernel, samples: usize) -> (f64, f64) {
    let (alpha, tmin) = match k.angular {
        AngularFamily::Singular { alpha, theta_min } => (alpha, theta_min),
        AngularFamily::Constant => return (1.0, 1.0),
    };
    let e = (k.dim - 1) as f64 + alpha;
    (0..samples).fold((f64::INFINITY, 0.0f64), |(a, b), i| {
        let t = tmin + (PI / 2.0 - tmin) * i as f64 / (samples - 1) as f64;
        let ratio = k.b_unchecked(t) * t.powf(e);
        (a.min(ratio), b.max(ratio))
    })
}

/// Gauss rule of `n` nodes for `∫_lower^∞ f(r) r^beta s(r) e^{-r^2/(4T)} dr`,
/// where `density(r)` is the full positive weight and `beta` its power at 0.
pub fn radial_gauss_rule(
    density: impl Fn(f64) -> f64,
    beta: f64,
    lower: f64,
    breaks: &[f64],
    decay_scale: f64,
    n: usize,
) -> Result<Rule1D> {
    let panel = 0.25 * decay_scale.max(0.25);
    gauss_rule_on(density, beta, lower, lower + 14.0 * decay_scale, breaks, panel, n)
}

/// `n`-point Gauss rule for `density` on `[lower, upper]`, built by Lanczos on a
/// composite rule with panels no wider than `panel`, split at `breaks`. When
/// `lower = 0` the first panel is Gauss–Jacobi for `r^beta`.
pub fn gauss_rule_on(
    density: impl Fn(f64) -> f64,
    beta: f64,
    lower: f64,
    upper: f64,
    breaks: &[f64],
    panel: f64,
    n: usize,
) -> Result<Rule1D> {
    let mut base = Rule1D::default();
    let mut pts: Vec<f64> = breaks.iter().copied().filter(|b| *b > lower && *b < upper).collect();
    pts.push(upper);
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut start = lower;
    if lower == 0.0 {
        let first = pts[0].min(panel);
        let jac = gauss_power(32, beta, first);
        for (r, w) in jac.nodes.iter().zip(&jac.weights) {
            base.nodes.push(*r);
            base.weights.push(w * density(*r) / r.powf(beta));
        }
        start = first;
    }
    let mut all = vec![start];
    all.extend(pts.iter().filter(|p| **p > start));
    if all.len() > 1 {
        let gl = composite_legendre(&all, panel, 24);
        for (r, w) in gl.nodes.iter().zip(&gl.weights) {
            base.nodes.push(*r);
            base.weights.push(w * density(*r));
        }
    }
    if base.mass() == 0.0 {
        return Ok(Rule1D::default());
    }
    gauss_from_discrete(&base.nodes, &base.weights, n)
}

/// Gauss–Legendre convenience re-export for callers needing a plain rule.
pub fn legendre(n: usize) -> Rule1D {
    gauss_legendre(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_and_b_examples() {
        let p = CollisionKernel::power(3, 1.0).unwrap();
        assert_eq!(p.phi_eval(2.0), 2.0);
        let t = CollisionKernel::truncated(3, -1.0).unwrap();
        assert_eq!(t.phi_eval(0.5), 1.0);
        assert_eq!(t.phi_eval(4.0), 0.25);
        assert_eq!(CollisionKernel::maxwell(3).b_eval(1.0).unwrap(), 1.0);
        let s = CollisionKernel::maxwell(3).with_singular(1.0, 1e-2, false).unwrap();
        assert!((s.b_eval(PI / 2.0).unwrap() - (PI / 2.0).powi(-3)).abs() < 1e-14);
        let ss = CollisionKernel::maxwell(3).with_singular(1.0, 1e-2, true).unwrap();
        assert_eq!(ss.b_eval(3.0).unwrap(), 0.0);
        assert!(matches!(s.b_eval(0.0), Err(Error::DomainError(_))));
        assert!(matches!(s.b_eval(4.0), Err(Error::DomainError(_))));
    }

    #[test]
    fn bessel_branches_agree() {
        let below = scaled_bessel_i0(29.999999);
        let above = scaled_bessel_i0(30.0);
        assert!((below / above - 1.0).abs() < 1e-6);
        // e^{-1} I_0(1) = 0.4657596075936404
        assert!((scaled_bessel_i0(1.0) - 0.465_759_607_593_640_4).abs() < 1e-15);
        // e^{-50} I_0(50)
        assert!((scaled_bessel_i0(50.0) - 0.056_561_626_647_454_18).abs() < 1e-12);
    }

    #[test]
    fn collision_frequency_examples() {
        let p3 = MaxwellianParams::normalized(3);
        let m = CollisionKernel::maxwell(3);
        for v in [Point::zeros(), Point::new(3.0, -1.0, 2.0)] {
            let nu = collision_frequency(&m, &p3, &v).unwrap();
            assert!((nu / (4.0 * PI * PI.powf(1.5)) - 1.0).abs() < 1e-12);
        }
        let hard = CollisionKernel::power(3, 1.0).unwrap();
        let nu0 = collision_frequency(&hard, &p3, &Point::zeros()).unwrap();
        assert!((nu0 / (8.0 * PI * PI) - 1.0).abs() < 1e-12);
        // Large |v|: ν(v) ~ |S^2| π^{3/2} |v| for hard spheres.
        let nu = collision_frequency(&hard, &p3, &Point::new(9.0, 0.0, 0.0)).unwrap();
        let want = 4.0 * PI * PI.powf(1.5) * (9.0 + 1.0 / 18.0);
        assert!((nu / want - 1.0).abs() < 1e-12, "{nu} {want}");
    }

    #[test]
    fn angular_rule_integrates_polynomials() {
        let k = CollisionKernel::maxwell(3).with_singular(1.5, 1e-2, true).unwrap();
        let rule = AngularRule::new(&k, 8).unwrap();
        let base = angular_base_rule(&k);
        for deg in 0..=8 {
            let want = 2.0 * PI * base.integrate(|x| x.powi(deg));
            let got: f64 = rule.sigmas(&Point::z(), &Point::x(), &Point::y()).iter().map(|(s, w)| w * s[2].powi(deg)).sum();
            assert!((got / want - 1.0).abs() < 1e-11, "deg {deg}");
        }
        assert!((rule.mass() / k.angular_mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cb_examples() {
        let s3 = SphereRule::default_for(3);
        let e = check_cb_lower_bound(&CollisionKernel::maxwell(3), 32, &s3);
        assert!((e.sampled_min - 4.0 * PI).abs() < 1e-12);
        let s2 = SphereRule::default_for(2);
        let e2 = check_cb_lower_bound(&CollisionKernel::maxwell(2), 32, &s2);
        assert!((e2.sampled_min - 2.0 * PI).abs() < 1e-12);
        let sing = CollisionKernel::maxwell(3).with_singular(1.0, 1e-2, false).unwrap();
        let es = check_cb_lower_bound(&sing, 32, &SphereRule::exact_to(3, 41));
        assert!(es.lower_bound > 0.0 && es.sampled_min >= es.lower_bound);
    }
}
