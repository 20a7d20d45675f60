//! Rules for `∫ F(v_*) Ψ(|v - v_*|) M(v_*) dv_*` at a fixed point `v`.
//!
//! Polar coordinates `v_* = v + r ω` about `v`. With `a = v - u`, the Gaussian
//! factors as `e^{-(r - |a|)^2/(2T)} e^{-(r|a|/T)(1 - cos ψ)}`, where `ψ` is the
//! angle between `ω` and `-a`. The radial rule is Gauss for the weight
//! integrated over directions, and the polar angle uses panels graded at the
//! `1/sqrt(r|a|/T)` scale of the directional peak.

use crate::error::Result;
use crate::geometry::{orthonormal_complement, Point};
use crate::kernels::{gauss_rule_on, scaled_sphere_exponential, AngularRule};
use crate::maxwellian::MaxwellianParams;
use crate::pair::RadialProfile;
use crate::quadrature::gauss_legendre;
use crate::test_function::TestFunction;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointwiseOrders {
    pub radial: usize,
    pub polar_per_panel: usize,
    pub azimuth: usize,
}

impl Default for PointwiseOrders {
    fn default() -> Self {
        PointwiseOrders { radial: 24, polar_per_panel: 12, azimuth: 16 }
    }
}

/// Nodes `v_*` with weights including `Ψ(|v - v_*|) M(v_*)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CenteredRule {
    pub center: Point,
    pub nodes: Vec<Point>,
    pub weights: Vec<f64>,
}

impl CenteredRule {
    pub fn new(v: &Point, p: &MaxwellianParams, profile: &RadialProfile, orders: PointwiseOrders) -> Result<CenteredRule> {
        let dim = p.dim;
        let t = p.temperature;
        let a = v - p.u;
        let s = a.norm();
        let axis = if s > 0.0 { -a / s } else { Point::x() };
        let (t1, t2) = orthonormal_complement(&axis, dim);
        let width = (2.0 * t).sqrt();
        let profile = *profile;
        let amp = p.amplitude();
        let radial_density = move |r: f64| {
            if r <= 0.0 {
                return 0.0;
            }
            let g = -(r - s) * (r - s) / (2.0 * t);
            r.powi(dim as i32 - 1) * profile.eval(r) * amp * g.exp() * scaled_sphere_exponential(dim, r * s / t)
        };
        let (lo, hi) = window_support(&profile);
        let upper = hi.min(s + 14.0 * width);
        let mut out = CenteredRule { center: *v, nodes: Vec::new(), weights: Vec::new() };
        if lo >= upper {
            return Ok(out);
        }
        let mut breaks = profile.phi.map_or(vec![], |k| k.phi_breakpoints());
        breaks.extend(window_breaks(&profile));
        breaks.push(s);
        let beta = (dim - 1) as f64 + profile.extra_power + profile.phi.map_or(0.0, |k| k.phi_exponent_at_zero());
        let rule = gauss_rule_on(radial_density, if lo == 0.0 { beta } else { 0.0 }, lo, upper, &breaks, 0.25 * width, orders.radial)?;
        let gl = gauss_legendre(orders.polar_per_panel);
        let az: Vec<(f64, f64)> = if dim == 2 {
            vec![(1.0, 1.0), (-1.0, 1.0)]
        } else {
            let m = orders.azimuth;
            (0..m).map(|j| 2.0 * PI * j as f64 / m as f64).map(|f| (f, 2.0 * PI / m as f64)).collect()
        };
        for (r, wr) in rule.nodes.iter().zip(&rule.weights) {
            let tt = r * s / t;
            let norm = scaled_sphere_exponential(dim, tt);
            for (lo_p, hi_p) in polar_panels(tt) {
                let half = 0.5 * (hi_p - lo_p);
                for (x, wx) in gl.nodes.iter().zip(&gl.weights) {
                    let psi = lo_p + half * (x + 1.0);
                    let (sp, cp) = psi.sin_cos();
                    let jac = if dim == 3 { sp } else { 1.0 };
                    let wpsi = wx * half * jac * (tt * (cp - 1.0)).exp() / norm;
                    for (phi, wphi) in &az {
                        let dir = if dim == 2 {
                            axis * cp + t1 * (sp * phi)
                        } else {
                            axis * cp + (t1 * phi.cos() + t2 * phi.sin()) * sp
                        };
                        out.nodes.push(v + dir * *r);
                        out.weights.push(wr * wpsi * wphi);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

fn window_support(profile: &RadialProfile) -> (f64, f64) {
    use crate::pair::Window;
    match profile.window {
        Window::All => (0.0, f64::INFINITY),
        Window::AtLeast(a) | Window::SmoothTail(a) => (a, f64::INFINITY),
        Window::AtMost(b) => (0.0, b),
        Window::Shell(a, b) => (a, b),
    }
}

fn window_breaks(profile: &RadialProfile) -> Vec<f64> {
    match profile.window {
        crate::pair::Window::SmoothTail(a) => vec![a + 1.0],
        _ => vec![],
    }
}

/// Panels of `[0, π]` in `ψ`, graded at the width of `e^{t(cos ψ - 1)}` and cut
/// where that factor drops below `e^{-40}`.
fn polar_panels(t: f64) -> Vec<(f64, f64)> {
    if t <= 4.0 {
        return vec![(0.0, PI / 2.0), (PI / 2.0, PI)];
    }
    let cut = if t > 20.0 { (80.0 / t).sqrt().min(PI) } else { PI };
    let mut edges = vec![0.0];
    let mut e = 1.0 / t.sqrt();
    while e < cut {
        edges.push(e);
        e *= 2.0;
    }
    edges.push(cut);
    edges.windows(2).map(|w| (w[0], w[1])).collect()
}

/// `∫∫ Φ b M_* [h'_* + h' - h_*] dv_* dσ` at `v`, for the profile's window.
pub fn gain_at(
    h: &TestFunction,
    v: &Point,
    p: &MaxwellianParams,
    profile: &RadialProfile,
    angular: &AngularRule,
    orders: PointwiseOrders,
) -> Result<f64> {
    let rule = CenteredRule::new(v, p, profile, orders)?;
    let mut acc = 0.0;
    for (vs, w) in rule.nodes.iter().zip(&rule.weights) {
        let z = v - vs;
        let r = z.norm();
        let k = z / r;
        let (t1, t2) = orthonormal_complement(&k, p.dim);
        let c = 0.5 * (v + vs);
        let hs = h.eval(vs);
        let mut inner = 0.0;
        for (sig, ws) in angular.sigmas(&k, &t1, &t2) {
            let half = sig * (0.5 * r);
            inner += ws * (h.eval(&(c - half)) + h.eval(&(c + half)) - hs);
        }
        acc += w * inner;
    }
    Ok(acc)
}
