//! One-dimensional Gauss rules, rules for custom weights, sphere rules and the
//! tensor Gaussian rule used for integrals against the Maxwellian.

use crate::error::{Error, Result};
use crate::geometry::{sphere_area, Point};
use nalgebra::{DMatrix, SymmetricEigen};
use std::f64::consts::PI;

/// Nodes and positive weights of a one-dimensional rule.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Rule1D {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule1D {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(*x)).sum()
    }

    /// Affine image of a rule on `[-1, 1]` onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> Rule1D {
        let h = 0.5 * (b - a);
        Rule1D {
            nodes: self.nodes.iter().map(|x| a + h * (x + 1.0)).collect(),
            weights: self.weights.iter().map(|w| w * h).collect(),
        }
    }

    pub fn append(&mut self, other: &Rule1D) {
        self.nodes.extend_from_slice(&other.nodes);
        self.weights.extend_from_slice(&other.weights);
    }
}

/// Gauss rule from a symmetric Jacobi matrix given by its diagonal `a`,
/// off-diagonal `b` (length n-1) and total mass `mu0`.
///
/// Nodes are the eigenvalues, polished by Newton steps on the orthonormal
/// recurrence; weights come from the Christoffel function, which keeps tiny
/// weights accurate to full relative precision.
pub fn gauss_from_jacobi(a: &[f64], b: &[f64], mu0: f64) -> Result<Rule1D> {
    let n = a.len();
    if n == 0 {
        return Ok(Rule1D::default());
    }
    let mut j = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        j[(i, i)] = a[i];
        if i + 1 < n {
            j[(i, i + 1)] = b[i];
            j[(i + 1, i)] = b[i];
        }
    }
    let eig = SymmetricEigen::try_new(j, 1e-15, 10_000)
        .ok_or_else(|| Error::EigSolveFailure("Jacobi matrix eigensolve".into()))?;
    let mut nodes: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    nodes.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let p0 = 1.0 / mu0.sqrt();
    // Orthonormal recurrence: b_k p_{k+1} = (x - a_k) p_k - b_{k-1} p_{k-1}.
    let eval = |x: f64| -> (f64, f64, f64) {
        let (mut pm, mut p) = (0.0, p0);
        let (mut dpm, mut dp) = (0.0, 0.0);
        let mut christoffel = p * p;
        for k in 0..n {
            let bk = if k + 1 < n { b[k] } else { 1.0 };
            let bkm = if k == 0 { 0.0 } else { b[k - 1] };
            let pn = ((x - a[k]) * p - bkm * pm) / bk;
            let dpn = (p + (x - a[k]) * dp - bkm * dpm) / bk;
            pm = p;
            p = pn;
            dpm = dp;
            dp = dpn;
            if k + 1 < n {
                christoffel += p * p;
            }
        }
        (p, dp, christoffel)
    };
    let mut weights = Vec::with_capacity(n);
    for x in nodes.iter_mut() {
        for _ in 0..2 {
            let (p, dp, _) = eval(*x);
            if dp != 0.0 && p.is_finite() && dp.is_finite() {
                let step = p / dp;
                let cand = *x - step;
                if eval(cand).0.abs() < p.abs() {
                    *x = cand;
                }
            }
        }
        let (_, _, c) = eval(*x);
        weights.push(1.0 / c);
    }
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(Error::NonFiniteEvaluation("Gauss weights".into()));
    }
    Ok(Rule1D { nodes, weights })
}

/// Gauss–Hermite rule for the weight `exp(-x^2)` on the real line.
pub fn gauss_hermite(n: usize) -> Rule1D {
    let a = vec![0.0; n];
    let b: Vec<f64> = (1..n).map(|k| (k as f64 / 2.0).sqrt()).collect();
    symmetrized(gauss_from_jacobi(&a, &b, PI.sqrt()).expect("Hermite rule"))
}

/// Enforce exact mirror symmetry of a rule for an even weight.
fn symmetrized(mut r: Rule1D) -> Rule1D {
    let n = r.len();
    for i in 0..n / 2 {
        let j = n - 1 - i;
        let x = 0.5 * (r.nodes[j] - r.nodes[i]);
        let w = 0.5 * (r.weights[i] + r.weights[j]);
        r.nodes[i] = -x;
        r.nodes[j] = x;
        r.weights[i] = w;
        r.weights[j] = w;
    }
    if n % 2 == 1 {
        r.nodes[n / 2] = 0.0;
    }
    r
}

/// Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> Rule1D {
    let a = vec![0.0; n];
    let b: Vec<f64> = (1..n)
        .map(|k| {
            let k = k as f64;
            k / (4.0 * k * k - 1.0).sqrt()
        })
        .collect();
    symmetrized(gauss_from_jacobi(&a, &b, 2.0).expect("Legendre rule"))
}

/// Gauss–Jacobi rule on `[-1, 1]` for the weight `(1-x)^al (1+x)^be`.
pub fn gauss_jacobi(n: usize, al: f64, be: f64) -> Rule1D {
    let ab = al + be;
    let mut a = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n.saturating_sub(1));
    for k in 0..n {
        let kf = k as f64;
        let s = 2.0 * kf + ab;
        a.push(if k == 0 {
            (be - al) / (ab + 2.0)
        } else {
            (be * be - al * al) / (s * (s + 2.0))
        });
        if k >= 1 {
            let num = 4.0 * kf * (kf + al) * (kf + be) * (kf + ab);
            let den = s * s * (s + 1.0) * (s - 1.0);
            b.push((num / den).sqrt());
        }
    }
    let mu0 = 2f64.powf(ab + 1.0) * libm::tgamma(al + 1.0) * libm::tgamma(be + 1.0)
        / libm::tgamma(ab + 2.0);
    gauss_from_jacobi(&a, &b, mu0).expect("Jacobi rule")
}

/// Gauss rule on `[0, c]` for the weight `r^beta`, `beta > -1`.
pub fn gauss_power(n: usize, beta: f64, c: f64) -> Rule1D {
    let base = gauss_jacobi(n, 0.0, beta);
    let scale = (0.5 * c).powf(beta + 1.0);
    Rule1D {
        nodes: base.nodes.iter().map(|x| 0.5 * c * (x + 1.0)).collect(),
        weights: base.weights.iter().map(|w| w * scale).collect(),
    }
}

/// Gauss rule with `n` nodes for a discrete positive measure, by Lanczos
/// iteration with full reorthogonalization. The discrete measure must resolve
/// polynomials of degree `2n` accurately for the result to be meaningful.
pub fn gauss_from_discrete(nodes: &[f64], weights: &[f64], n: usize) -> Result<Rule1D> {
    let mu0: f64 = weights.iter().sum();
    if !(mu0 > 0.0) || !mu0.is_finite() {
        return Err(Error::NonFiniteEvaluation("discrete measure has no mass".into()));
    }
    let support = weights.iter().filter(|w| **w > 0.0).count();
    let n = n.min(support);
    let m = nodes.len();
    let mut vs: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    vs.push(weights.iter().map(|w| (w / mu0).sqrt()).collect());
    let mut a = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n);
    for k in 0..n {
        let v = &vs[k];
        let mut z: Vec<f64> = (0..m).map(|i| nodes[i] * v[i]).collect();
        let ak: f64 = (0..m).map(|i| z[i] * v[i]).sum();
        a.push(ak);
        if k + 1 == n {
            break;
        }
        for _ in 0..2 {
            for u in vs.iter() {
                let c: f64 = (0..m).map(|i| z[i] * u[i]).sum();
                for i in 0..m {
                    z[i] -= c * u[i];
                }
            }
        }
        let bk = z.iter().map(|x| x * x).sum::<f64>().sqrt();
        if bk <= 1e-300 {
            break;
        }
        b.push(bk);
        vs.push(z.iter().map(|x| x / bk).collect());
    }
    let n = a.len();
    b.truncate(n.saturating_sub(1));
    gauss_from_jacobi(&a, &b, mu0)
}

/// Composite Gauss–Legendre rule over the sorted breakpoints, with panels no
/// wider than `max_width` and `per_panel` nodes each.
pub fn composite_legendre(breaks: &[f64], max_width: f64, per_panel: usize) -> Rule1D {
    let gl = gauss_legendre(per_panel);
    let mut out = Rule1D::default();
    for w in breaks.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if hi <= lo {
            continue;
        }
        let pieces = ((hi - lo) / max_width).ceil().max(1.0) as usize;
        let h = (hi - lo) / pieces as f64;
        for j in 0..pieces {
            out.append(&gl.mapped(lo + j as f64 * h, lo + (j + 1) as f64 * h));
        }
    }
    out
}

/// Quadrature on the unit sphere of `R^dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereRule {
    pub dim: usize,
    pub degree: usize,
    pub nodes: Vec<Point>,
    pub weights: Vec<f64>,
}

impl SphereRule {
    /// Rule exact for polynomials of the given degree. On the circle this is
    /// the uniform trapezoid rule with `degree + 1` nodes; on the 2-sphere a
    /// Gauss–Legendre (in the polar cosine) times trapezoid (in azimuth) product.
    pub fn exact_to(dim: usize, degree: usize) -> SphereRule {
        match dim {
            2 => {
                let n = degree + 1;
                let nodes = (0..n)
                    .map(|i| {
                        let t = 2.0 * PI * i as f64 / n as f64;
                        Point::new(t.cos(), t.sin(), 0.0)
                    })
                    .collect();
                SphereRule { dim, degree, nodes, weights: vec![2.0 * PI / n as f64; n] }
            }
            3 => {
                let nz = degree / 2 + 1;
                let nphi = degree + 1;
                let gl = gauss_legendre(nz);
                let mut nodes = Vec::with_capacity(nz * nphi);
                let mut weights = Vec::with_capacity(nz * nphi);
                for (z, wz) in gl.nodes.iter().zip(&gl.weights) {
                    let s = (1.0 - z * z).max(0.0).sqrt();
                    for j in 0..nphi {
                        let t = 2.0 * PI * (j as f64 + 0.5) / nphi as f64;
                        nodes.push(Point::new(s * t.cos(), s * t.sin(), *z));
                        weights.push(wz * 2.0 * PI / nphi as f64);
                    }
                }
                SphereRule { dim, degree, nodes, weights }
            }
            _ => panic!("dimension must be 2 or 3"),
        }
    }

    pub fn default_for(dim: usize) -> SphereRule {
        SphereRule::exact_to(dim, if dim == 2 { 63 } else { 17 })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(&Point) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(x)).sum()
    }
}

/// Tensor Gauss–Hermite rule for `∫ f(v) e^{-|v|^2} dv` plus a sphere rule and
/// the polynomial degree requested from the collision (pair) quadratures.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub dim: usize,
    pub hermite_order: usize,
    pub nodes: Vec<Point>,
    pub weights: Vec<f64>,
    pub sphere: SphereRule,
    /// Total polynomial degree integrated exactly by the pair rules built from
    /// this rule (center of mass, relative speed, deviation angle).
    pub pair_degree: usize,
}

impl QuadratureRule {
    pub fn new(dim: usize) -> QuadratureRule {
        let order = if dim == 2 { 32 } else { 24 };
        let sphere = if dim == 2 { 63 } else { 17 };
        QuadratureRule::with_orders(dim, order, sphere, 8)
    }

    pub fn with_orders(dim: usize, hermite_order: usize, sphere_degree: usize, pair_degree: usize) -> QuadratureRule {
        assert!(dim == 2 || dim == 3, "dimension must be 2 or 3");
        let gh = gauss_hermite(hermite_order);
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        let n = gh.len();
        let zmax = if dim == 3 { n } else { 1 };
        for i in 0..n {
            for j in 0..n {
                for l in 0..zmax {
                    let z = if dim == 3 { gh.nodes[l] } else { 0.0 };
                    let wz = if dim == 3 { gh.weights[l] } else { 1.0 };
                    nodes.push(Point::new(gh.nodes[i], gh.nodes[j], z));
                    weights.push(gh.weights[i] * gh.weights[j] * wz);
                }
            }
        }
        QuadratureRule {
            dim,
            hermite_order,
            nodes,
            weights,
            sphere: SphereRule::exact_to(dim, sphere_degree),
            pair_degree,
        }
    }

    pub fn with_pair_degree(mut self, pair_degree: usize) -> QuadratureRule {
        self.pair_degree = pair_degree;
        self
    }

    /// Highest total degree integrated exactly against `e^{-|v|^2}`.
    pub fn exactness_degree(&self) -> usize {
        2 * self.hermite_order - 1
    }

    pub fn sphere_area(&self) -> f64 {
        sphere_area(self.dim)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn double_factorial_odd(k: i32) -> f64 {
        (1..=k).step_by(2).map(|x| x as f64).product()
    }

    #[test]
    fn hermite_moments() {
        let r = gauss_hermite(20);
        for k in 0..=39 {
            let got = r.integrate(|x| x.powi(k));
            let want = if k % 2 == 1 { 0.0 } else { PI.sqrt() * double_factorial_odd(k - 1) / 2f64.powi(k / 2) };
            let scale = r.integrate(|x| x.abs().powi(k));
            assert!((got - want).abs() <= 1e-13 * scale, "k={k} {got} {want}");
        }
    }

    #[test]
    fn large_hermite_rule_keeps_mass() {
        let r = gauss_hermite(64);
        assert!((r.mass() - PI.sqrt()).abs() < 1e-13);
        assert!(r.weights.iter().all(|w| *w > 0.0));
    }

    #[test]
    fn jacobi_power_rule_integrates_monomials() {
        for beta in [-0.5, 0.0, 1.3, 2.0] {
            let r = gauss_power(8, beta, 3.0);
            for k in 0..16 {
                let got = r.integrate(|x| x.powi(k));
                let want = 3f64.powf(k as f64 + beta + 1.0) / (k as f64 + beta + 1.0);
                assert!((got / want - 1.0).abs() < 1e-12, "beta={beta} k={k}");
            }
        }
    }

    #[test]
    fn lanczos_recovers_legendre() {
        let fine = composite_legendre(&[-1.0, 0.0, 1.0], 0.25, 20);
        let r = gauss_from_discrete(&fine.nodes, &fine.weights, 10).unwrap();
        let gl = gauss_legendre(10);
        for i in 0..10 {
            assert!((r.nodes[i] - gl.nodes[i]).abs() < 1e-13);
            assert!((r.weights[i] - gl.weights[i]).abs() < 1e-13);
        }
    }

    #[test]
    fn sphere_rules_are_exact() {
        let s3 = SphereRule::exact_to(3, 17);
        assert!((s3.integrate(|_| 1.0) - 4.0 * PI).abs() < 1e-12);
        // ∫ x^4 y^6 z^6 over S^2 = 2 Γ(5/2)Γ(7/2)Γ(7/2)/Γ(19/2)
        let g = libm::tgamma;
        let want = 2.0 * g(2.5) * g(3.5) * g(3.5) / g(9.5);
        let got = s3.integrate(|p| p[0].powi(4) * p[1].powi(6) * p[2].powi(6));
        assert!((got - want).abs() < 1e-14, "{got} {want}");
        let s2 = SphereRule::default_for(2);
        assert!((s2.integrate(|p| p[0].powi(10)) - 2.0 * PI * 63.0 / 256.0).abs() < 1e-13);
    }

    #[test]
    fn tensor_rule_mass() {
        for dim in [2, 3] {
            let q = QuadratureRule::new(dim);
            let m: f64 = q.weights.iter().sum();
            assert!((m / PI.powf(dim as f64 / 2.0) - 1.0).abs() < 1e-12);
        }
    }
}
