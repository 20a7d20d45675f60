//! Non-cutoff (long-range) kernels: the localized decomposition of the
//! Dirichlet form into a Gagliardo-controlled part and a cancellation part,
//! the Carleman kernel, the map `ψ_σ` and the Taylor bound on sphere averages.

use crate::basis::GalerkinBasis;
use crate::boltzmann::{check_exactness, form_degree};
use crate::error::{Error, Result};
use crate::geometry::{orthonormal_complement, sphere_area, Point};
use crate::kernels::{AngularRule, CollisionKernel};
use crate::maxwellian::MaxwellianParams;
use crate::pair::{assemble_pair_form, frames, localization, sum_pairs, Directions, PairForm, PairRule, RadialProfile, RotationSet};
use crate::profiles::smooth_cutoff;
use crate::quadrature::{gauss_legendre, gauss_power, QuadratureRule, SphereRule};
use crate::spectral::coercivity_constant;
use crate::test_function::TestFunction;
use nalgebra::{DMatrix, DVector};
use std::f64::consts::PI;

/// `I_R(v, v_*) = χ_R(|v|) χ_R(|v_*|)`, with `χ_R` a C^∞ step from 1 on `[0, R]` to 0 beyond `R + 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MollifiedIndicator {
    pub radius: f64,
}

impl MollifiedIndicator {
    pub fn eval(&self, v: &Point, v_star: &Point) -> f64 {
        localization(self.radius, v, v_star)
    }

    pub fn profile(&self, s: f64) -> f64 {
        smooth_cutoff(s, self.radius)
    }
}

/// Quadrature for `∫_{B_R}∫_{B_R} (h(v') - h(v))^2 / |v - v'|^{N+α} dv dv'`.
///
/// Writing `v' = v + ρ θ`, the integral becomes
/// `∫_{B_R} dv ∫_{S^{N-1}} dθ ∫_0^{ρ_max(v,θ)} ((h(v+ρθ) - h(v))/ρ)^2 ρ^{1-α} dρ`;
/// the inner integral uses a Gauss–Jacobi rule for `ρ^{1-α}` on `[0, ρ_max]`,
/// which is exact for polynomial `h` of degree up to the number of nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct GagliardoNorm {
    pub dim: usize,
    pub alpha: f64,
    pub radius: f64,
    pub resolution: usize,
    /// Points of `B_R` with weights.
    pub centers: Vec<(Point, f64)>,
    /// Directions `θ` with weights.
    pub directions: Vec<(Point, f64)>,
    /// Jacobi rule for `ρ^{1-α}` on `[0, 1]`.
    pub radial: (Vec<f64>, Vec<f64>),
}

impl GagliardoNorm {
    pub fn new(dim: usize, alpha: f64, radius: f64, resolution: usize, radial_nodes: usize) -> Result<GagliardoNorm> {
        if !(alpha > 0.0 && alpha < 2.0) {
            return Err(Error::DomainError(format!("alpha = {alpha} outside (0, 2)")));
        }
        if !(radius > 0.0) || resolution < 2 {
            return Err(Error::DomainError(format!("radius {radius}, resolution {resolution}")));
        }
        let radial_rule = gauss_power(resolution, (dim - 1) as f64, radius);
        let ring = circle_or_sphere(dim, 2 * resolution);
        let mut centers = Vec::new();
        for (s, ws) in radial_rule.nodes.iter().zip(&radial_rule.weights) {
            for (u, wu) in &ring {
                centers.push((u * *s, ws * wu));
            }
        }
        let directions = circle_or_sphere(dim, 4 * resolution);
        let jac = gauss_power(radial_nodes, 1.0 - alpha, 1.0);
        Ok(GagliardoNorm { dim, alpha, radius, resolution, centers, directions, radial: (jac.nodes, jac.weights) })
    }

    fn for_each_node(&self, mut f: impl FnMut(&Point, &Point, f64, f64)) {
        let beta = 1.0 - self.alpha;
        let r2 = self.radius * self.radius;
        for (v, wv) in &self.centers {
            let vv = v.norm_squared();
            for (th, wt) in &self.directions {
                let b = v.dot(th);
                let rho_max = -b + (b * b + r2 - vv).max(0.0).sqrt();
                if rho_max <= 0.0 {
                    continue;
                }
                let scale = rho_max.powf(beta + 1.0);
                for (x, wx) in self.radial.0.iter().zip(&self.radial.1) {
                    let rho = rho_max * x;
                    f(v, &(v + th * rho), rho, wv * wt * wx * scale);
                }
            }
        }
    }

    pub fn seminorm_sq(&self, h: &TestFunction) -> f64 {
        let mut acc = 0.0;
        self.for_each_node(|v, vp, rho, w| {
            let d = (h.eval(vp) - h.eval(v)) / rho;
            acc += w * d * d;
        });
        acc
    }

    /// `∫_{B_R} h^2 dv`.
    pub fn l2_sq(&self, h: &TestFunction) -> f64 {
        self.centers.iter().map(|(v, w)| w * h.eval(v).powi(2)).sum()
    }

    /// Galerkin matrix of the seminorm.
    pub fn matrix(&self, basis: &GalerkinBasis) -> DMatrix<f64> {
        let n = basis.len();
        let chunk = 2048;
        let mut rows = DMatrix::<f64>::zeros(chunk, n);
        let mut out = DMatrix::<f64>::zeros(n, n);
        let mut a = vec![0.0; n];
        let mut b = vec![0.0; n];
        let mut filled = 0;
        self.for_each_node(|v, vp, rho, w| {
            basis.eval_into(v, &mut a);
            basis.eval_into(vp, &mut b);
            let s = w.sqrt() / rho;
            for j in 0..n {
                rows[(filled, j)] = s * (b[j] - a[j]);
            }
            filled += 1;
            if filled == chunk {
                out += rows.tr_mul(&rows);
                filled = 0;
            }
        });
        if filled > 0 {
            let part = rows.rows(0, filled);
            out += part.tr_mul(&part);
        }
        out
    }
}

/// Equispaced circle (dimension 2) or Gauss product sphere rule (dimension 3).
fn circle_or_sphere(dim: usize, n: usize) -> Vec<(Point, f64)> {
    if dim == 2 {
        (0..n)
            .map(|j| {
                let a = 2.0 * PI * (j as f64 + 0.5) / n as f64;
                (Point::new(a.cos(), a.sin(), 0.0), 2.0 * PI / n as f64)
            })
            .collect()
    } else {
        let s = SphereRule::exact_to(3, n);
        s.nodes.into_iter().zip(s.weights).collect()
    }
}

/// Gagliardo double integral of `h` over `B_R`. Errors with
/// `ResolutionTooCoarse` when halving the resolution changes the value by more
/// than 10%.
pub fn gagliardo_seminorm(h: &TestFunction, alpha: f64, radius: f64, resolution: usize) -> Result<f64> {
    let nodes = h.degree().unwrap_or(resolution).max(2);
    let fine = GagliardoNorm::new(h.dim, alpha, radius, resolution, nodes)?.seminorm_sq(h);
    let coarse = GagliardoNorm::new(h.dim, alpha, radius, (resolution / 2).max(2), nodes)?.seminorm_sq(h);
    if (fine - coarse).abs() > 0.1 * fine.abs() {
        return Err(Error::ResolutionTooCoarse(format!("value {fine:.6e} against {coarse:.6e} at half resolution")));
    }
    Ok(fine)
}

/// `R ↦ Gagliardo(h; B_R) + ‖h‖^2_{L^2(B_R)}` at the given radii.
pub fn local_sobolev_curve(h: &TestFunction, alpha: f64, radii: &[f64], resolution: usize) -> Result<Vec<(f64, f64)>> {
    let nodes = h.degree().unwrap_or(resolution).max(2);
    radii
        .iter()
        .map(|r| {
            let g = GagliardoNorm::new(h.dim, alpha, *r, resolution, nodes)?;
            Ok((*r, g.seminorm_sq(h) + g.l2_sq(h)))
        })
        .collect()
}

fn check_long_range(k: &CollisionKernel) -> Result<()> {
    k.check_boltzmann()?;
    if k.theta_min().is_none() || !k.symmetrized {
        return Err(Error::DomainError("the localized decomposition needs a symmetrized singular angular kernel".into()));
    }
    Ok(())
}

/// Localized terms for one test function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LongRangeTerms {
    /// `(1/2)∫∫∫ B I_R (h' - h)^2 M M_*`.
    pub i1: f64,
    /// `-∫∫∫ B I_R h_* (h' - h) M M_*`.
    pub i2: f64,
    /// `(1/4)∫∫∫ B I_R [Δh]^2 M M_*`.
    pub localized_dirichlet: f64,
    pub theta_min: f64,
}

impl LongRangeTerms {
    /// `D_{I_R} - (I_1 + I_2)`. Not zero in general: `I_R(v, v_*)` is not
    /// invariant under the exchange of pre- and post-collision velocities.
    pub fn reconstruction_gap(&self) -> f64 {
        self.localized_dirichlet - (self.i1 + self.i2)
    }
}

pub fn i1_i2_decomposition(h: &TestFunction, k: &CollisionKernel, radius: f64, p: &MaxwellianParams, q: &QuadratureRule) -> Result<LongRangeTerms> {
    check_long_range(k)?;
    check_exactness(q, form_degree(h, q))?;
    // The ω-rule sees the non-polynomial localization directly.
    let deg = form_degree(h, q) + 24;
    let rule = PairRule::for_degree(p, &RadialProfile::kinetic(k), deg)?;
    let dirs = frames(&SphereRule::exact_to(p.dim, deg));
    let ang = AngularRule::new(k, deg)?;
    let (mut i1, mut i2, mut d) = (0.0, 0.0, 0.0);
    sum_pairs(&rule, &dirs, Some(&ang), |pp| {
        let (_, vp, vps) = pp.post.expect("angular rule");
        let w = pp.weight * localization(radius, &pp.v, &pp.v_star);
        if w == 0.0 {
            return 0.0;
        }
        let (hv, hs, hp, hps) = (h.eval(&pp.v), h.eval(&pp.v_star), h.eval(&vp), h.eval(&vps));
        i1 += 0.5 * w * (hp - hv).powi(2);
        i2 -= w * hs * (hp - hv);
        d += 0.25 * w * (hp + hps - hv - hs).powi(2);
        0.0
    });
    if !(i1.is_finite() && i2.is_finite() && d.is_finite()) {
        return Err(Error::NonFiniteEvaluation("localized decomposition".into()));
    }
    Ok(LongRangeTerms { i1, i2, localized_dirichlet: d, theta_min: k.theta_min().unwrap_or(0.0) })
}

/// Galerkin matrices of the localized terms and the norms they are compared with.
#[derive(Debug, Clone)]
pub struct LongRangeMatrices {
    pub i1: DMatrix<f64>,
    pub i2: DMatrix<f64>,
    pub localized_dirichlet: DMatrix<f64>,
    /// Relative antisymmetric part of the `I_2` bilinear form; only the
    /// symmetric part enters the quadratic form.
    pub i2_asymmetry: f64,
}

/// Assemble `I_1`, `I_2` and `D_{I_R}` on the basis (`u = 0`). `extra_degree`
/// raises the pair-rule degree above `2d` to resolve the non-polynomial `I_R`.
pub fn long_range_matrices(
    basis: &GalerkinBasis,
    k: &CollisionKernel,
    radius: f64,
    rotations: &RotationSet,
    extra_degree: usize,
) -> Result<LongRangeMatrices> {
    check_long_range(k)?;
    let p = MaxwellianParams::normalized(basis.dim);
    let deg = 2 * basis.degree + extra_degree;
    let rule = PairRule::for_degree(&p, &RadialProfile::kinetic(k), deg)?;
    let ang = AngularRule::new(k, deg)?;
    let build = |f: PairForm| assemble_pair_form(basis, &rule, Some(&ang), f, Some(radius), Directions::Rotations(rotations));
    let i1 = build(PairForm::LocalizedFirst)?;
    let i2 = build(PairForm::LocalizedSecond)?;
    let d = build(PairForm::LocalizedDirichlet)?;
    Ok(LongRangeMatrices { i1: i1.matrix, i2: i2.matrix, localized_dirichlet: d.matrix, i2_asymmetry: i2.asymmetry })
}

/// Constants of the localized estimate on the Galerkin space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LongRangeConstants {
    /// `min I_1 / Gagliardo` over `range(I - Π)`.
    pub c1: f64,
    /// `max |I_2| / ‖h⟨v⟩^{γ/2}‖^2` over `range(I - Π)`.
    pub c4: f64,
}

pub fn long_range_constants(m: &LongRangeMatrices, gagliardo: &DMatrix<f64>, weighted_mass: &DMatrix<f64>, null_proj: &DMatrix<f64>) -> Result<LongRangeConstants> {
    let c1 = coercivity_constant(&m.i1, gagliardo, null_proj)?.constant_estimate;
    let lo = coercivity_constant(&m.i2, weighted_mass, null_proj)?.constant_estimate;
    let hi = -coercivity_constant(&(-&m.i2), weighted_mass, null_proj)?.constant_estimate;
    Ok(LongRangeConstants { c1, c4: lo.abs().max(hi.abs()) })
}

/// `x ↦ xᵀ A x`.
pub fn quadratic(a: &DMatrix<f64>, x: &DVector<f64>) -> f64 {
    (x.transpose() * a * x)[(0, 0)]
}

/// Node counts of the Carleman plane integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CarlemanOrders {
    pub radial: usize,
    pub angular: usize,
}

impl Default for CarlemanOrders {
    fn default() -> Self {
        CarlemanOrders { radial: 24, angular: 256 }
    }
}

/// `S(v, v') = M(v) ∫_{E ∩ B_R} 1_{B_R}(v_*) |v' - v'_*|^{1+γ+α} 1_{|v' - v| ≤ |v'_* - v|} M(v_*) dv'_*`
/// where `E` is the hyperplane through `v` orthogonal to `v - v'`, `v'_* = v + y`
/// with `y ∈ E - v`, and `v_* = v' + y`.
///
/// Polar coordinates `y = t e(φ)` in `E`; for each direction the three
/// constraints cut out an interval of `t`, integrated by Gauss–Legendre.
pub fn carleman_kernel(
    v: &Point,
    v_prime: &Point,
    k: &CollisionKernel,
    p: &MaxwellianParams,
    radius: f64,
    orders: CarlemanOrders,
) -> Result<f64> {
    let d = v - v_prime;
    let delta = d.norm();
    if delta < 1e-10 {
        return Err(Error::DegenerateGeometry(format!("|v - v'| = {delta:.3e}")));
    }
    let alpha = k.alpha().unwrap_or(0.0);
    let expo = 0.5 * (1.0 + k.gamma + alpha);
    let dh = d / delta;
    let dim = p.dim;
    // Covariant frame of E built from v, so the result is rotation invariant.
    let a = v - dh * v.dot(&dh);
    let e1 = if a.norm() > 1e-12 * (1.0 + v.norm()) { a.normalize() } else { orthonormal_complement(&dh, dim).0 };
    let e2 = if dim == 3 { dh.cross(&e1) } else { Point::zeros() };
    let dirs: Vec<(Point, f64)> = if dim == 2 {
        vec![(e1, 1.0), (-e1, 1.0)]
    } else {
        let m = orders.angular;
        (0..m)
            .map(|j| {
                let f = 2.0 * PI * (j as f64 + 0.5) / m as f64;
                (e1 * f.cos() + e2 * f.sin(), 2.0 * PI / m as f64)
            })
            .collect()
    };
    let gl = gauss_legendre(orders.radial);
    let r2 = radius * radius;
    let exit = |c: &Point, e: &Point| -> Option<f64> {
        let b = c.dot(e);
        let disc = b * b - c.norm_squared() + r2;
        if disc < 0.0 {
            None
        } else {
            Some(-b + disc.sqrt())
        }
    };
    let mut acc = 0.0;
    for (e, we) in &dirs {
        let (Some(t1), Some(t2)) = (exit(v, e), exit(v_prime, e)) else { continue };
        let hi = t1.min(t2);
        if hi <= delta {
            continue;
        }
        let half = 0.5 * (hi - delta);
        let mut inner = 0.0;
        for (x, wx) in gl.nodes.iter().zip(&gl.weights) {
            let t = delta + half * (x + 1.0);
            let vs = v_prime + e * t;
            inner += wx * (delta * delta + t * t).powf(expo) * p.eval(&vs) * t.powi(dim as i32 - 2);
        }
        acc += we * half * inner;
    }
    let val = p.eval(v) * acc;
    if !val.is_finite() {
        return Err(Error::NonFiniteEvaluation("Carleman kernel".into()));
    }
    Ok(val)
}

/// Point of the plane of `(v, v_*, σ)` with `(ψ - v) ⊥ (v_* - v)` and
/// `|ψ - v| = tan(θ/2)|v - v_*|`, displaced against the part of `σ` orthogonal
/// to `v - v_*`.
pub fn psi_sigma(v: &Point, v_star: &Point, sigma: &Point) -> Point {
    let z = v - v_star;
    let r = z.norm();
    if r == 0.0 {
        return *v;
    }
    let k = z / r;
    let c = k.dot(sigma).clamp(-1.0, 1.0);
    let perp = sigma - k * c;
    let s = perp.norm();
    if s < 1e-15 || c >= 1.0 {
        return *v;
    }
    // tan(θ/2) = sin θ / (1 + cos θ).
    let tan_half = s / (1.0 + c);
    v - perp / s * (tan_half * r)
}

/// A `C^2` function with a bound on its Hessian.
pub struct C2Function<'a> {
    pub value: &'a dyn Fn(&Point) -> f64,
    /// `sup |∇^2 φ|` (spectral norm), the part of `‖φ‖_{W^{2,∞}}` entering the bound.
    pub hessian_bound: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereAverage {
    pub value: f64,
    pub bound: f64,
    pub holds: bool,
}

/// `I(φ) = ∫_{S^{N-2}} (φ(v + ρω) - φ(v)) dω` over unit `ω ⊥ (v - v_*)`, and
/// the Taylor bound `(ρ^2/2)|S^{N-2}| sup|∇^2 φ|`.
pub fn sphere_average_estimate(phi: &C2Function<'_>, v: &Point, v_star: &Point, rho: f64, dim: usize) -> Result<SphereAverage> {
    let z = v - v_star;
    if z.norm() == 0.0 {
        return Err(Error::DegenerateGeometry("v = v_*".into()));
    }
    let (t1, t2) = orthonormal_complement(&z.normalize(), dim);
    let f0 = (phi.value)(v);
    let value = if dim == 2 {
        (phi.value)(&(v + t1 * rho)) + (phi.value)(&(v - t1 * rho)) - 2.0 * f0
    } else {
        let m = 128;
        (0..m)
            .map(|j| {
                let a = 2.0 * PI * j as f64 / m as f64;
                (phi.value)(&(v + (t1 * a.cos() + t2 * a.sin()) * rho)) - f0
            })
            .sum::<f64>()
            * (2.0 * PI / m as f64)
    };
    let bound = 0.5 * rho * rho * sphere_area(dim - 1) * phi.hessian_bound;
    Ok(SphereAverage { value, bound, holds: value.abs() <= bound + 1e-10 })
}

/// Sampled `sup |∇^2 φ|` of a radial function `φ(w) = f(|w|)` on `|w| ≤ s_max`:
/// the Hessian eigenvalues are `f''(s)` and `f'(s)/s`. Derivatives by central
/// differences on a grid of the given spacing.
pub fn radial_hessian_sup(f: impl Fn(f64) -> f64, s_max: f64, spacing: f64) -> f64 {
    let h = 1e-4;
    let n = (s_max / spacing).ceil() as usize;
    let mut sup: f64 = 0.0;
    for i in 0..=n {
        let s = (i as f64 * spacing).min(s_max);
        // f is even in s, so f(-h) = f(h) at the origin.
        let (fm, f0, fp) = (f((s - h).abs()), f(s), f(s + h));
        let d2 = (fp - 2.0 * f0 + fm) / (h * h);
        let d1 = if s > h { (fp - fm) / (2.0 * h * s) } else { d2 };
        sup = sup.max(d2.abs()).max(d1.abs());
    }
    sup
}

/// `φ(w) = M(w) I_R(w, v_*)` for `|v_*| ≤ R` (where `I_R` reduces to `χ_R(|w|)`).
pub fn localized_maxwellian_profile(p: &MaxwellianParams, radius: f64) -> impl Fn(f64) -> f64 {
    let amp = p.amplitude();
    let t = p.temperature;
    move |s: f64| amp * (-s * s / (2.0 * t)).exp() * smooth_cutoff(s, radius)
}

/// Sampled `sup_{v, v_* ∈ B_R} |∫ b [M(ψ_σ(v)) I_R(ψ_σ(v), v_*) - M(v) I_R(v, v_*)] dσ|`.
pub fn cancellation_constant(k: &CollisionKernel, p: &MaxwellianParams, radius: f64, samples: &[(Point, Point)]) -> Result<f64> {
    let ang = AngularRule::new(k, 24)?;
    let ind = MollifiedIndicator { radius };
    let mut sup: f64 = 0.0;
    for (v, vs) in samples {
        let z = v - vs;
        if z.norm() == 0.0 {
            continue;
        }
        let kk = z.normalize();
        let (t1, t2) = orthonormal_complement(&kk, p.dim);
        let base = p.eval(v) * ind.eval(v, vs);
        let mut acc = 0.0;
        for (s, w) in ang.sigmas(&kk, &t1, &t2) {
            let psi = psi_sigma(v, vs, &s);
            acc += w * (p.eval(&psi) * ind.eval(&psi, vs) - base);
        }
        sup = sup.max(acc.abs());
    }
    Ok(sup)
}

/// `∫_{S^{N-1}} b(cos θ) |cos^{-N-γ}(θ/2) - 1| dσ`.
pub fn jacobian_constant(k: &CollisionKernel) -> Result<f64> {
    let ang = AngularRule::new(k, 24)?;
    let n = k.dim as f64;
    let tau: f64 = ang.tau_weights.iter().sum();
    Ok(ang
        .cos
        .iter()
        .zip(&ang.weights)
        .map(|(x, w)| {
            let c_half = (0.5 * (1.0 + x)).sqrt();
            w * (c_half.powf(-n - k.gamma) - 1.0).abs()
        })
        .sum::<f64>()
        * tau)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::random_rotation;
    use rand::SeedableRng;

    #[test]
    fn psi_sigma_examples() {
        let v = Point::new(1.0, 0.0, 0.0);
        let vs = Point::new(-1.0, 0.0, 0.0);
        let psi = psi_sigma(&v, &vs, &Point::new(0.0, 1.0, 0.0));
        assert!(((psi - v).norm() - 2.0).abs() < 1e-12);
        assert!((psi - v).dot(&(vs - v)).abs() < 1e-12);
        assert_eq!(psi_sigma(&v, &vs, &Point::new(1.0, 0.0, 0.0)), v);
    }

    #[test]
    fn sphere_average_of_square_saturates() {
        let f = |w: &Point| w.norm_squared();
        let phi = C2Function { value: &f, hessian_bound: 2.0 };
        let r = sphere_average_estimate(&phi, &Point::new(0.3, 0.2, -1.0), &Point::new(1.0, 1.0, 1.0), 0.7, 3).unwrap();
        assert!((r.value - 2.0 * PI * 0.49).abs() < 1e-12);
        assert!((r.value - r.bound).abs() < 1e-12 && r.holds);
        let lin = |w: &Point| 2.0 * w[0] - w[2];
        let phi = C2Function { value: &lin, hessian_bound: 0.0 };
        let r = sphere_average_estimate(&phi, &Point::new(0.3, 0.2, -1.0), &Point::new(1.0, 1.0, 1.0), 0.7, 3).unwrap();
        assert!(r.value.abs() < 1e-13);
    }

    #[test]
    fn gagliardo_basic_properties() {
        let h = TestFunction::coordinate(2, 0);
        let g = gagliardo_seminorm(&h, 1.0, 2.0, 16).unwrap();
        assert!(g > 0.0);
        let shifted = TestFunction::from_fn(2, "v1+3", |v| v[0] + 3.0);
        let gn = GagliardoNorm::new(2, 1.0, 2.0, 16, 2).unwrap();
        assert!((gn.seminorm_sq(&shifted) / g - 1.0).abs() < 1e-12);
        assert_eq!(gn.seminorm_sq(&TestFunction::constant(2, 4.0)), 0.0);
    }

    #[test]
    fn carleman_kernel_is_positive_and_rotation_invariant() {
        let p = MaxwellianParams::normalized(3);
        let k = CollisionKernel::power(3, 0.5).unwrap().with_singular(1.0, 1e-2, true).unwrap();
        let v = Point::new(0.5, 0.0, 0.0);
        let vp = Point::new(0.0, 0.5, 0.0);
        let s = carleman_kernel(&v, &vp, &k, &p, 2.0, CarlemanOrders::default()).unwrap();
        assert!(s > 0.0);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let r = random_rotation(&mut rng, 3);
        let s2 = carleman_kernel(&(r * v), &(r * vp), &k, &p, 2.0, CarlemanOrders::default()).unwrap();
        assert!((s2 / s - 1.0).abs() < 1e-12);
        assert!(matches!(carleman_kernel(&v, &v, &k, &p, 2.0, CarlemanOrders::default()), Err(Error::DegenerateGeometry(_))));
    }

    #[test]
    fn gagliardo_matches_dense_grid() {
        let (r, alpha) = (2.0, 1.0);
        let value = gagliardo_seminorm(&TestFunction::coordinate(2, 0), alpha, r, 16).unwrap();
        // Midpoint grid over B_R × B_R; the excluded self-cell adds
        // δ^2 ∫_{cell} x_1^2/|x|^3 dx = δ^3 · 2 ln(1 + √2) per cell.
        let n = 160;
        let d = 2.0 * r / n as f64;
        let pts: Vec<(f64, f64)> = (0..n * n)
            .map(|i| (-r + d * ((i % n) as f64 + 0.5), -r + d * ((i / n) as f64 + 0.5)))
            .filter(|(x, y)| x * x + y * y <= r * r)
            .collect();
        let mut sum = 0.0;
        for (i, a) in pts.iter().enumerate() {
            for b in &pts[i + 1..] {
                let (dx, dy) = (b.0 - a.0, b.1 - a.1);
                sum += 2.0 * dx * dx / (dx * dx + dy * dy).powf(1.5);
            }
        }
        let oracle = sum * d.powi(4) + pts.len() as f64 * d.powi(3) * 2.0 * (1.0 + 2f64.sqrt()).ln();
        assert!((value / oracle - 1.0).abs() < 0.02, "{value} vs {oracle}");
    }

    #[test]
    fn gagliardo_grows_with_alpha() {
        let h = TestFunction::from_fn(2, "smooth", |v| (v[0] + 0.3 * v[1] * v[1]).sin());
        let a = GagliardoNorm::new(2, 0.5, 2.0, 16, 16).unwrap().seminorm_sq(&h);
        let b = GagliardoNorm::new(2, 1.5, 2.0, 16, 16).unwrap().seminorm_sq(&h);
        assert!(b > a);
    }

    #[test]
    fn galerkin_terms_match_direct_sums() {
        let setup = crate::spectral::GalerkinSetup::new(2, 4, QuadratureRule::new(2));
        let k = CollisionKernel::power(2, 0.5).unwrap().with_singular(1.0, 2e-2, true).unwrap();
        let m = long_range_matrices(&setup.basis, &k, 1.5, &setup.rotations, 32).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let c = DVector::from_fn(setup.basis.len(), |_, _| rand::Rng::gen_range(&mut rng, -1.0..1.0));
        let h = setup.test_function(c.clone(), "h");
        let q = QuadratureRule::new(2).with_pair_degree(8);
        let t = i1_i2_decomposition(&h, &k, 1.5, &MaxwellianParams::normalized(2), &q).unwrap();
        // Both sides integrate the smooth but non-polynomial localization.
        let scale = 1.0 + t.i1.abs();
        let rel = |a: f64, b: f64| (a - b).abs() / scale;
        assert!(rel(quadratic(&m.i1, &c), t.i1) < 1e-4, "{} {}", quadratic(&m.i1, &c), t.i1);
        assert!(rel(quadratic(&m.i2, &c), t.i2) < 1e-4, "{} {}", quadratic(&m.i2, &c), t.i2);
        assert!(rel(quadratic(&m.localized_dirichlet, &c), t.localized_dirichlet) < 1e-4);
        assert!(t.i1 >= 0.0);
        let one = i1_i2_decomposition(&TestFunction::constant(2, 1.0), &k, 1.5, &MaxwellianParams::normalized(2), &q).unwrap();
        assert!(one.i1.abs() < 1e-14 && one.i2.abs() < 1e-14);
    }

    #[test]
    fn carleman_kernel_bounded_below_on_grid() {
        let p = MaxwellianParams::normalized(3);
        let k = CollisionKernel::power(3, 0.5).unwrap().with_singular(1.0, 1e-2, true).unwrap();
        let grid: Vec<Point> = (0..10)
            .map(|i| {
                let a = 2.0 * PI * i as f64 / 10.0;
                Point::new(a.cos(), a.sin() * 0.6, a.sin() * 0.8) * (0.2 + 0.06 * i as f64)
            })
            .collect();
        let mut min = f64::INFINITY;
        for v in &grid {
            for w in &grid {
                if (v - w).norm() >= 0.2 {
                    min = min.min(carleman_kernel(v, w, &k, &p, 2.0, CarlemanOrders::default()).unwrap());
                }
            }
        }
        assert!(min > 0.0 && min.is_finite());
    }

    #[test]
    fn psi_sigma_orthogonal_for_random_triples() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let v = crate::geometry::random_in_ball(&mut rng, 3, 2.0);
            let vs = crate::geometry::random_in_ball(&mut rng, 3, 2.0);
            let s = crate::geometry::random_unit(&mut rng, 3);
            let psi = psi_sigma(&v, &vs, &s);
            let scale = (v - vs).norm();
            assert!((psi - v).dot(&(vs - v)).abs() < 1e-10 * (1.0 + scale * scale));
            let k = (v - vs) / scale;
            let th = k.dot(&s).clamp(-1.0, 1.0).acos();
            assert!(((psi - v).norm() - (th / 2.0).tan() * scale).abs() < 1e-8 * (1.0 + (psi - v).norm()));
        }
    }
}
