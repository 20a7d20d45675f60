//! Quadrature for double integrals `∫∫ F(v, v_*) Ψ(|v - v_*|) M M_* dv dv_*`
//! (optionally with a deviation angle `σ`) and Galerkin assembly of the
//! resulting bilinear forms.
//!
//! Coordinates: `V = (v + v_*)/2`, `v - v_* = r ω`. Then
//! `M M_* = c² e^{-|V-u|²/T} e^{-r²/(4T)}` and `dv dv_* = dV r^{N-1} dr dω`.
//! `V` uses a tensor Gauss–Hermite rule, `r` a Gauss rule for the weight
//! `r^{N-1} Ψ(r) e^{-r²/(4T)}` (so kinks, sharp windows and integrable
//! singularities of `Ψ` are absorbed exactly), `ω` a sphere rule and `σ` an
//! [`AngularRule`] around `ω`.
//!
//! Galerkin forms that are invariant under rotations about the origin are
//! assembled with `ω` frozen to the first axis and then averaged over
//! rotations `R_j` (`R_j e_1 = ω_j`) through the coefficient matrices of
//! `f ↦ f∘R_j`, which are exact on the polynomial space.

use crate::basis::GalerkinBasis;
use crate::error::{Error, Result};
use crate::geometry::{orthonormal_complement, rotation_from_first_axis, Point};
use crate::kernels::{radial_gauss_rule, AngularRule, CollisionKernel};
use crate::maxwellian::MaxwellianParams;
use crate::profiles::{quintic_step, smooth_cutoff};
use crate::quadrature::{gauss_hermite, QuadratureRule, Rule1D, SphereRule};
use nalgebra::DMatrix;

/// Factor of the radial weight selecting relative speeds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Window {
    All,
    /// `1_{r ≥ R}`.
    AtLeast(f64),
    /// `1_{r ≤ R}`.
    AtMost(f64),
    /// `1_{lo < r ≤ hi}`.
    Shell(f64, f64),
    /// `1 - Θ_R(r)` with `Θ_R` the quintic step equal to 1 on `[0, R]` and 0 beyond `R + 1`.
    SmoothTail(f64),
}

impl Window {
    pub fn eval(&self, r: f64) -> f64 {
        match *self {
            Window::All => 1.0,
            Window::AtLeast(a) => (r >= a) as u8 as f64,
            Window::AtMost(b) => (r <= b) as u8 as f64,
            Window::Shell(a, b) => (r > a && r <= b) as u8 as f64,
            Window::SmoothTail(a) => quintic_step(r - a),
        }
    }

    fn support(&self) -> (f64, f64) {
        match *self {
            Window::All => (0.0, f64::INFINITY),
            Window::AtLeast(a) => (a, f64::INFINITY),
            Window::AtMost(b) => (0.0, b),
            Window::Shell(a, b) => (a, b),
            Window::SmoothTail(a) => (a, f64::INFINITY),
        }
    }

    fn breaks(&self) -> Vec<f64> {
        match *self {
            Window::SmoothTail(a) => vec![a, a + 1.0],
            _ => vec![],
        }
    }
}

/// `Ψ(r) = Φ(r) r^p window(r)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialProfile {
    pub phi: Option<CollisionKernel>,
    pub extra_power: f64,
    pub window: Window,
}

impl RadialProfile {
    pub fn kinetic(k: &CollisionKernel) -> RadialProfile {
        RadialProfile { phi: Some(*k), extra_power: 0.0, window: Window::All }
    }

    /// `|z|^2 Φ(|z|)`, the Landau weight.
    pub fn landau(k: &CollisionKernel) -> RadialProfile {
        RadialProfile { phi: Some(*k), extra_power: 2.0, window: Window::All }
    }

    pub fn with_window(mut self, w: Window) -> RadialProfile {
        self.window = w;
        self
    }

    pub fn eval(&self, r: f64) -> f64 {
        let phi = self.phi.map_or(1.0, |k| k.phi_eval(r));
        let p = if self.extra_power == 0.0 { 1.0 } else { r.powf(self.extra_power) };
        phi * p * self.window.eval(r)
    }

    fn exponent_at_zero(&self) -> f64 {
        self.extra_power + self.phi.map_or(0.0, |k| k.phi_exponent_at_zero())
    }
}

/// Rule for the center of mass and the relative speed.
#[derive(Debug, Clone, PartialEq)]
pub struct PairRule {
    pub dim: usize,
    pub params: MaxwellianParams,
    pub centers: Vec<Point>,
    pub center_weights: Vec<f64>,
    pub radial: Rule1D,
}

impl PairRule {
    pub fn new(params: &MaxwellianParams, profile: &RadialProfile, center_order: usize, radial_order: usize) -> Result<PairRule> {
        let dim = params.dim;
        let t = params.temperature;
        let gh = gauss_hermite(center_order);
        let c = params.amplitude();
        let w0 = c * c * t.powf(dim as f64 / 2.0);
        let mut centers = Vec::new();
        let mut center_weights = Vec::new();
        let n = gh.len();
        let nz = if dim == 3 { n } else { 1 };
        for i in 0..n {
            for j in 0..n {
                for l in 0..nz {
                    let (z, wz) = if dim == 3 { (gh.nodes[l], gh.weights[l]) } else { (0.0, 1.0) };
                    let y = Point::new(gh.nodes[i], gh.nodes[j], z);
                    centers.push(params.u + t.sqrt() * y);
                    center_weights.push(w0 * gh.weights[i] * gh.weights[j] * wz);
                }
            }
        }
        let (lo, hi) = profile.window.support();
        let scale = 2.0 * t.sqrt();
        let mut breaks: Vec<f64> = profile.window.breaks();
        if let Some(k) = profile.phi {
            breaks.extend(k.phi_breakpoints());
        }
        let beta = (dim - 1) as f64 + profile.exponent_at_zero();
        let density = |r: f64| {
            if r < lo || r > hi {
                return 0.0;
            }
            let base = if r == 0.0 { 0.0 } else { r.powi(dim as i32 - 1) * profile.eval(r) };
            base * (-r * r / (4.0 * t)).exp()
        };
        let upper_cut = hi.min(lo + 14.0 * scale);
        if hi.is_finite() {
            breaks.push(hi);
        }
        let radial = if lo >= upper_cut {
            Rule1D::default()
        } else {
            let smooth_beta = if lo == 0.0 { beta } else { 0.0 };
            radial_gauss_rule(density, smooth_beta, lo, &breaks, (upper_cut - lo) / 14.0, radial_order)?
        };
        Ok(PairRule { dim, params: *params, centers, center_weights, radial })
    }

    /// Orders exact for integrands of total polynomial degree `degree`.
    pub fn for_degree(params: &MaxwellianParams, profile: &RadialProfile, degree: usize) -> Result<PairRule> {
        PairRule::new(params, profile, degree / 2 + 1, degree / 2 + 1)
    }

    /// Total weight `∫∫ Ψ M M_*`.
    pub fn mass(&self) -> f64 {
        self.center_weights.iter().sum::<f64>() * self.radial.mass() * crate::geometry::sphere_area(self.dim)
    }
}

/// Orthonormal frame `(ω, t1, t2)` with its sphere weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub omega: Point,
    pub t1: Point,
    pub t2: Point,
    pub weight: f64,
}

pub fn frames(directions: &SphereRule) -> Vec<Frame> {
    directions
        .nodes
        .iter()
        .zip(&directions.weights)
        .map(|(w, wt)| {
            let (t1, t2) = orthonormal_complement(w, directions.dim);
            Frame { omega: *w, t1, t2, weight: *wt }
        })
        .collect()
}

fn reference_frame(dim: usize) -> Frame {
    let e1 = Point::x();
    let (t1, t2) = orthonormal_complement(&e1, dim);
    Frame { omega: e1, t1, t2, weight: 1.0 }
}

/// One node of a pair quadrature.
#[derive(Debug, Clone, Copy)]
pub struct PairPoint {
    pub v: Point,
    pub v_star: Point,
    pub r: f64,
    pub omega: Point,
    /// `(σ, v', v'_*)` when an angular rule is used.
    pub post: Option<(Point, Point, Point)>,
    pub weight: f64,
}

/// `Σ w F` over all pair nodes (full loop over the frames).
pub fn sum_pairs(rule: &PairRule, dirs: &[Frame], angular: Option<&AngularRule>, mut f: impl FnMut(&PairPoint) -> f64) -> f64 {
    let mut total = 0.0;
    for fr in dirs {
        let sigmas = angular.map(|a| a.sigmas(&fr.omega, &fr.t1, &fr.t2));
        for (vc, wc) in rule.centers.iter().zip(&rule.center_weights) {
            for (r, wr) in rule.radial.nodes.iter().zip(&rule.radial.weights) {
                let half = fr.omega * (0.5 * r);
                let (v, vs) = (vc + half, vc - half);
                let w = wc * wr * fr.weight;
                match &sigmas {
                    None => total += f(&PairPoint { v, v_star: vs, r: *r, omega: fr.omega, post: None, weight: w }),
                    Some(list) => {
                        for (s, ws) in list {
                            let hs = s * (0.5 * r);
                            let pp = PairPoint { v, v_star: vs, r: *r, omega: fr.omega, post: Some((*s, vc + hs, vc - hs)), weight: w * ws };
                            total += f(&pp);
                        }
                    }
                }
            }
        }
    }
    total
}

/// Bilinear forms assembled on a Galerkin basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PairForm {
    /// `(1/4) ∫∫∫ B [Δh][Δg]`, `Δh = h' + h'_* - h - h_*`.
    BoltzmannDirichlet,
    /// `∫∫∫ B g [h'_* + h' - h_*]`.
    BoltzmannGain,
    /// `∫∫∫ B g h` (loss part through the pair rule).
    BoltzmannLoss,
    /// `(1/2) ∫∫ |z|²Φ (P∇(h - h_*))·(P∇(g - g_*))`; radial weight carries `|z|²Φ`.
    LandauDirichlet,
    /// `∫∫ |z|²Φ (P∇g)·(P∇h_*)`.
    LandauGain,
    /// `∫∫ |z|²Φ (P∇g)·(P∇h)`.
    LandauLoss,
    /// `(1/2) ∫∫∫ B I_R (h'-h)(g'-g)`.
    LocalizedFirst,
    /// `-∫∫∫ B I_R g_* (h' - h)`.
    LocalizedSecond,
    /// `(1/4) ∫∫∫ B I_R [Δh][Δg]`.
    LocalizedDirichlet,
}

impl PairForm {
    fn scale(&self) -> f64 {
        match self {
            PairForm::BoltzmannDirichlet | PairForm::LocalizedDirichlet => 0.25,
            PairForm::LandauDirichlet | PairForm::LocalizedFirst => 0.5,
            PairForm::LocalizedSecond => -1.0,
            _ => 1.0,
        }
    }

    fn symmetric(&self) -> bool {
        !matches!(self, PairForm::BoltzmannGain | PairForm::LandauGain | PairForm::LocalizedSecond)
    }

    fn needs_sigma(&self) -> bool {
        !matches!(self, PairForm::BoltzmannLoss | PairForm::LandauDirichlet | PairForm::LandauGain | PairForm::LandauLoss)
    }

    fn is_landau(&self) -> bool {
        matches!(self, PairForm::LandauDirichlet | PairForm::LandauGain | PairForm::LandauLoss)
    }

    fn localized(&self) -> bool {
        matches!(self, PairForm::LocalizedFirst | PairForm::LocalizedSecond | PairForm::LocalizedDirichlet)
    }
}

/// `I_R(v, v_*) = χ_R(|v|) χ_R(|v_*|)` with a C^∞ transition on `[R, R+1]`.
pub fn localization(radius: f64, v: &Point, vs: &Point) -> f64 {
    smooth_cutoff(v.norm(), radius) * smooth_cutoff(vs.norm(), radius)
}

/// Coefficient matrices of `f ↦ f∘R_j` for a sphere rule of axes.
#[derive(Debug, Clone)]
pub struct RotationSet {
    pub weights: Vec<f64>,
    pub matrices: Vec<DMatrix<f64>>,
}

impl RotationSet {
    pub fn new(basis: &GalerkinBasis, directions: &SphereRule) -> RotationSet {
        let q = QuadratureRule::with_orders(basis.dim, basis.degree + 1, 1, 0);
        let n = basis.len();
        let m = q.nodes.len();
        let mut a = DMatrix::<f64>::zeros(m, n);
        let mut buf = vec![0.0; n];
        for (i, x) in q.nodes.iter().enumerate() {
            basis.eval_into(x, &mut buf);
            for j in 0..n {
                a[(i, j)] = buf[j] * q.weights[i];
            }
        }
        let mut matrices = Vec::with_capacity(directions.len());
        for w in &directions.nodes {
            let rot = rotation_from_first_axis(w, basis.dim);
            let mut b = DMatrix::<f64>::zeros(m, n);
            for (i, x) in q.nodes.iter().enumerate() {
                basis.eval_into(&(rot * x), &mut buf);
                for j in 0..n {
                    b[(i, j)] = buf[j];
                }
            }
            matrices.push(a.tr_mul(&b));
        }
        RotationSet { weights: directions.weights.clone(), matrices }
    }

    /// `Σ_j w_j T_jᵀ X T_j`.
    pub fn average(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        let n = x.nrows();
        let mut out = DMatrix::<f64>::zeros(n, n);
        let mut y = DMatrix::<f64>::zeros(n, n);
        for (w, t) in self.weights.iter().zip(&self.matrices) {
            y.gemm(1.0, x, t, 0.0);
            out.gemm_tr(*w, t, &y, 1.0);
        }
        out
    }
}

/// Batched accumulation of `Σ_p w_p L_pᵀ R_p` with row-major row blocks.
struct Accumulator {
    n: usize,
    cap: usize,
    rows: usize,
    symmetric: bool,
    left: Vec<f64>,
    right: Vec<f64>,
    out: Vec<f64>,
}

impl Accumulator {
    fn new(n: usize, symmetric: bool) -> Accumulator {
        let cap = 256;
        Accumulator { n, cap, rows: 0, symmetric, left: vec![0.0; cap * n], right: vec![0.0; cap * n], out: vec![0.0; n * n] }
    }

    /// Next row slots; the caller writes `left` (and `right` when asymmetric).
    #[inline]
    fn slot(&mut self) -> (&mut [f64], &mut [f64]) {
        if self.rows == self.cap {
            self.flush();
        }
        let n = self.n;
        let i = self.rows;
        self.rows += 1;
        (&mut self.left[i * n..(i + 1) * n], &mut self.right[i * n..(i + 1) * n])
    }

    fn flush(&mut self) {
        if self.rows == 0 {
            return;
        }
        let n = self.n;
        let k = self.rows;
        let b = if self.symmetric { &self.left } else { &self.right };
        unsafe {
            matrixmultiply::dgemm(
                n, k, n, 1.0,
                self.left.as_ptr(), 1, n as isize,
                b.as_ptr(), n as isize, 1,
                1.0,
                self.out.as_mut_ptr(), n as isize, 1,
            );
        }
        self.rows = 0;
    }

    fn finish(mut self) -> DMatrix<f64> {
        self.flush();
        DMatrix::from_row_slice(self.n, self.n, &self.out)
    }
}

/// Assembled matrix with the asymmetry measured before symmetrization.
#[derive(Debug, Clone)]
pub struct AssembledForm {
    pub matrix: DMatrix<f64>,
    pub asymmetry: f64,
    pub nodes: usize,
}

/// How the directions `ω` are integrated.
pub enum Directions<'a> {
    /// Freeze `ω = e_1` and average over rotations (requires `u = 0`).
    Rotations(&'a RotationSet),
    /// Loop over all frames.
    Frames(&'a [Frame]),
}

/// Assemble `form` on `basis`. `radius` is the localization radius for the
/// localized forms.
pub fn assemble_pair_form(
    basis: &GalerkinBasis,
    rule: &PairRule,
    angular: Option<&AngularRule>,
    form: PairForm,
    radius: Option<f64>,
    dirs: Directions<'_>,
) -> Result<AssembledForm> {
    if form.needs_sigma() && angular.is_none() {
        return Err(Error::DomainError(format!("{form:?} needs an angular rule")));
    }
    if form.localized() && radius.is_none() {
        return Err(Error::DomainError("localized form needs a radius".into()));
    }
    let reference = [reference_frame(basis.dim)];
    let (frame_list, rotations): (&[Frame], Option<&RotationSet>) = match dirs {
        Directions::Rotations(rs) => {
            if rule.params.u.norm() != 0.0 {
                return Err(Error::DomainError("rotation averaging needs zero mean velocity".into()));
            }
            (&reference, Some(rs))
        }
        Directions::Frames(f) => (f, None),
    };
    let n = basis.len();
    let dim = basis.dim;
    let angular_mass = angular.map_or(1.0, |a| a.mass());
    let mut acc = Accumulator::new(n, form.symmetric());
    let mut ev = vec![0.0; n];
    let mut evs = vec![0.0; n];
    let mut ep = vec![0.0; n];
    let mut eps = vec![0.0; n];
    let mut gv = vec![0.0; dim * n];
    let mut gvs = vec![0.0; dim * n];
    let mut nodes = 0usize;
    for fr in frame_list {
        let sigmas = if form.needs_sigma() { angular.map(|a| a.sigmas(&fr.omega, &fr.t1, &fr.t2)).unwrap_or_default() } else { vec![] };
        // Orthonormal basis of ω^⊥ for the Landau projection.
        let perp = [fr.t1, fr.t2];
        for (vc, wc) in rule.centers.iter().zip(&rule.center_weights) {
            for (r, wr) in rule.radial.nodes.iter().zip(&rule.radial.weights) {
                let half = fr.omega * (0.5 * r);
                let (v, vs) = (vc + half, vc - half);
                let mut w = wc * wr * fr.weight;
                if let Some(rad) = radius.filter(|_| form.localized()) {
                    w *= localization(rad, &v, &vs);
                }
                if w == 0.0 {
                    continue;
                }
                if form.is_landau() {
                    basis.grad_into(&v, &mut gv);
                    basis.grad_into(&vs, &mut gvs);
                    let sw = w.sqrt();
                    for t in perp.iter().take(dim - 1) {
                        let (l, rr) = acc.slot();
                        for j in 0..n {
                            let mut a = 0.0;
                            let mut b = 0.0;
                            for i in 0..dim {
                                a += t[i] * gv[i * n + j];
                                b += t[i] * gvs[i * n + j];
                            }
                            match form {
                                PairForm::LandauDirichlet => l[j] = sw * (a - b),
                                PairForm::LandauLoss => l[j] = sw * a,
                                _ => {
                                    l[j] = a;
                                    rr[j] = w * b;
                                }
                            }
                        }
                    }
                    nodes += 1;
                    continue;
                }
                basis.eval_into(&v, &mut ev);
                if form == PairForm::BoltzmannLoss {
                    let sw = (w * angular_mass).sqrt();
                    let (l, _) = acc.slot();
                    for j in 0..n {
                        l[j] = sw * ev[j];
                    }
                    nodes += 1;
                    continue;
                }
                basis.eval_into(&vs, &mut evs);
                for (s, ws) in &sigmas {
                    let hs = s * (0.5 * r);
                    basis.eval_into(&(vc + hs), &mut ep);
                    basis.eval_into(&(vc - hs), &mut eps);
                    let wt = w * ws;
                    let (l, rr) = acc.slot();
                    match form {
                        PairForm::BoltzmannDirichlet | PairForm::LocalizedDirichlet => {
                            let sw = wt.sqrt();
                            for j in 0..n {
                                l[j] = sw * (ep[j] + eps[j] - ev[j] - evs[j]);
                            }
                        }
                        PairForm::LocalizedFirst => {
                            let sw = wt.sqrt();
                            for j in 0..n {
                                l[j] = sw * (ep[j] - ev[j]);
                            }
                        }
                        PairForm::BoltzmannGain => {
                            for j in 0..n {
                                l[j] = ev[j];
                                rr[j] = wt * (eps[j] + ep[j] - evs[j]);
                            }
                        }
                        PairForm::LocalizedSecond => {
                            for j in 0..n {
                                l[j] = evs[j];
                                rr[j] = wt * (ep[j] - ev[j]);
                            }
                        }
                        _ => unreachable!(),
                    }
                    nodes += 1;
                }
            }
        }
    }
    let mut x = acc.finish();
    if let Some(rs) = rotations {
        x = rs.average(&x);
    }
    x *= form.scale();
    let norm = x.norm();
    let asymmetry = if norm > 0.0 { (&x - x.transpose()).norm() / norm } else { 0.0 };
    let sym = (&x + x.transpose()) * 0.5;
    if sym.iter().any(|a| !a.is_finite()) {
        return Err(Error::NonFiniteEvaluation(format!("{form:?} assembly")));
    }
    Ok(AssembledForm { matrix: sym, asymmetry, nodes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::CollisionKernel;
    use std::f64::consts::PI;

    #[test]
    fn pair_rule_mass_matches_closed_form() {
        // ∫∫ |v - v_*| e^{-|v|^2 - |v_*|^2} = ∫ e^{-2|V|^2} dV · ∫ |z| e^{-|z|^2/2} dz = (π/2)^{3/2} · 8π.
        let p = MaxwellianParams::normalized(3);
        let k = CollisionKernel::power(3, 1.0).unwrap();
        let rule = PairRule::for_degree(&p, &RadialProfile::kinetic(&k), 4).unwrap();
        let want = (PI / 2.0).powf(1.5) * 8.0 * PI;
        assert!((rule.mass() / want - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rotation_matrices_are_orthogonal() {
        let basis = GalerkinBasis::new(3, 4);
        let rs = RotationSet::new(&basis, &SphereRule::exact_to(3, 8));
        for t in &rs.matrices {
            let n = t.nrows();
            assert!((t.transpose() * t - DMatrix::<f64>::identity(n, n)).amax() < 1e-12);
        }
    }

    #[test]
    fn rotation_averaging_matches_the_full_loop() {
        for dim in [2, 3] {
            let basis = GalerkinBasis::new(dim, 3);
            let p = MaxwellianParams::normalized(dim);
            let k = CollisionKernel::power(dim, 0.5).unwrap();
            let deg = 2 * basis.degree;
            let rule = PairRule::for_degree(&p, &RadialProfile::kinetic(&k), deg).unwrap();
            let ang = AngularRule::new(&k, deg).unwrap();
            let sph = SphereRule::exact_to(dim, deg);
            let rs = RotationSet::new(&basis, &sph);
            let fr = frames(&sph);
            for form in [PairForm::BoltzmannDirichlet, PairForm::BoltzmannGain] {
                let a = assemble_pair_form(&basis, &rule, Some(&ang), form, None, Directions::Rotations(&rs)).unwrap();
                let b = assemble_pair_form(&basis, &rule, Some(&ang), form, None, Directions::Frames(&fr)).unwrap();
                let err = (&a.matrix - &b.matrix).amax() / b.matrix.amax();
                assert!(err < 1e-12, "{dim} {form:?} {err}");
            }
            let kl = RadialProfile::landau(&k);
            let rule_l = PairRule::for_degree(&p, &kl, deg).unwrap();
            let a = assemble_pair_form(&basis, &rule_l, None, PairForm::LandauDirichlet, None, Directions::Rotations(&rs)).unwrap();
            let b = assemble_pair_form(&basis, &rule_l, None, PairForm::LandauDirichlet, None, Directions::Frames(&fr)).unwrap();
            assert!((&a.matrix - &b.matrix).amax() / b.matrix.amax() < 1e-12);
        }
    }
}
