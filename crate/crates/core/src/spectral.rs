//! Galerkin matrices of the Dirichlet forms and weighted norms, coercivity
//! constants as deflated generalized eigenproblems, rescaling identities and
//! operator-norm estimates.
//!
//! All matrices are expressed in the orthonormal basis of `L^2(M)` for the
//! normalized Maxwellian `M = e^{-|v|^2}`.

use crate::basis::GalerkinBasis;
use crate::boltzmann::dirichlet_form_b;
use crate::error::{Error, Result};
use crate::geometry::{bracket, Point};
use crate::kernels::{collision_frequency, AngularRule, CollisionKernel, PhiFamily};
use crate::landau::dirichlet_form_l;
use crate::maxwellian::{integrate_against_maxwellian, MaxwellianParams};
use crate::pair::{assemble_pair_form, Directions, PairForm, PairRule, RadialProfile, RotationSet};
use crate::quadrature::{QuadratureRule, SphereRule};
use crate::test_function::TestFunction;
use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};
use std::sync::Arc;

/// Quadratic forms that can be assembled on the basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FormKind {
    BoltzmannDirichlet,
    LandauDirichlet,
    /// `⟨A^B h, h⟩ = ∫ ν h^2 M`.
    BoltzmannLoss,
    /// `⟨K^B h, h⟩`.
    BoltzmannGain,
    /// `⟨A^L h, h⟩ = ∫ ∇hᵀ ℳ ∇h M`.
    LandauLoss,
    /// `⟨K^L h, h⟩`.
    LandauGain,
    /// `‖h⟨v⟩^{s/2}‖^2_{L^2(M)}`.
    Mass { s: f64 },
    /// `‖h‖^2_{H^1(⟨v⟩^s M)}`.
    H1 { s: f64 },
    /// `‖h‖^2_{H^1(⟨v⟩^γ M)} + ‖h⟨v⟩^{1+γ/2}‖^2_{L^2(M)}`.
    LandauRhs { gamma: f64 },
    /// `∫ ν h^2 M`, the weight of the collision-frequency comparison; same matrix as `BoltzmannLoss`.
    NuMass,
}

/// Basis, tensor rule and rotation matrices shared by all assemblies.
#[derive(Debug, Clone)]
pub struct GalerkinSetup {
    pub basis: Arc<GalerkinBasis>,
    pub quadrature: QuadratureRule,
    pub rotations: Arc<RotationSet>,
}

impl GalerkinSetup {
    pub fn new(dim: usize, degree: usize, quadrature: QuadratureRule) -> GalerkinSetup {
        let basis = Arc::new(GalerkinBasis::new(dim, degree));
        let rotations = Arc::new(RotationSet::new(&basis, &SphereRule::exact_to(dim, 2 * degree)));
        GalerkinSetup { basis, quadrature, rotations }
    }

    pub fn params(&self) -> MaxwellianParams {
        MaxwellianParams::normalized(self.basis.dim)
    }

    /// Polynomial degree of the pair rules: products of two basis elements.
    pub fn pair_degree(&self) -> usize {
        (2 * self.basis.degree).max(self.quadrature.pair_degree)
    }

    pub fn test_function(&self, coeffs: DVector<f64>, label: impl Into<String>) -> TestFunction {
        TestFunction::galerkin(self.basis.clone(), coeffs, label)
    }
}

/// Assembled symmetric matrix with the asymmetry measured before symmetrization.
#[derive(Debug, Clone)]
pub struct AssembledMatrix {
    pub form: FormKind,
    pub matrix: DMatrix<f64>,
    pub asymmetry: f64,
}

fn tensor_form(setup: &GalerkinSetup, weight: impl Fn(&Point) -> f64, gradient_weight: Option<&dyn Fn(&Point) -> f64>) -> DMatrix<f64> {
    let b = &setup.basis;
    let q = &setup.quadrature;
    let n = b.len();
    let dim = b.dim;
    let m = q.nodes.len();
    let rows = if gradient_weight.is_some() { 1 + dim } else { 1 };
    let mut e = DMatrix::<f64>::zeros(m * rows, n);
    let mut buf = vec![0.0; n];
    let mut gbuf = vec![0.0; n * dim];
    for (i, (x, w)) in q.nodes.iter().zip(&q.weights).enumerate() {
        b.eval_into(x, &mut buf);
        let sw = (w * weight(x)).sqrt();
        for j in 0..n {
            e[(i * rows, j)] = sw * buf[j];
        }
        if let Some(gw) = gradient_weight {
            b.grad_into(x, &mut gbuf);
            let sg = (w * gw(x)).sqrt();
            for c in 0..dim {
                for j in 0..n {
                    e[(i * rows + 1 + c, j)] = sg * gbuf[c * n + j];
                }
            }
        }
    }
    e.tr_mul(&e)
}

fn check_degree(setup: &GalerkinSetup) -> Result<()> {
    let need = 2 * setup.basis.degree + 2;
    if setup.quadrature.exactness_degree() < need {
        return Err(Error::ExactnessViolation(format!(
            "tensor rule exact to degree {} but products of degree-{} basis elements with weights need {}",
            setup.quadrature.exactness_degree(),
            setup.basis.degree,
            need
        )));
    }
    Ok(())
}

pub fn assemble_form(form: FormKind, setup: &GalerkinSetup, k: &CollisionKernel) -> Result<AssembledMatrix> {
    check_degree(setup)?;
    let p = setup.params();
    let deg = setup.pair_degree();
    let pair = |profile: RadialProfile, pf: PairForm, angular: bool| -> Result<AssembledMatrix> {
        let rule = PairRule::for_degree(&p, &profile, deg)?;
        let ang = if angular { Some(AngularRule::new(k, deg)?) } else { None };
        let a = assemble_pair_form(&setup.basis, &rule, ang.as_ref(), pf, None, Directions::Rotations(&setup.rotations))?;
        Ok(AssembledMatrix { form, matrix: a.matrix, asymmetry: a.asymmetry })
    };
    let plain = |m: DMatrix<f64>| Ok(AssembledMatrix { form, matrix: m, asymmetry: 0.0 });
    match form {
        FormKind::BoltzmannDirichlet => {
            k.check_boltzmann()?;
            pair(RadialProfile::kinetic(k), PairForm::BoltzmannDirichlet, true)
        }
        FormKind::BoltzmannGain => {
            k.check_boltzmann()?;
            pair(RadialProfile::kinetic(k), PairForm::BoltzmannGain, true)
        }
        FormKind::LandauDirichlet => pair(RadialProfile::landau(k), PairForm::LandauDirichlet, false),
        FormKind::LandauLoss => pair(RadialProfile::landau(k), PairForm::LandauLoss, false),
        FormKind::LandauGain => pair(RadialProfile::landau(k), PairForm::LandauGain, false),
        FormKind::BoltzmannLoss | FormKind::NuMass => {
            k.check_boltzmann()?;
            let nu = NuTable::new(k, &p, &setup.quadrature)?;
            plain(tensor_form(setup, |x| nu.eval(x.norm()), None))
        }
        FormKind::Mass { s } => plain(tensor_form(setup, |x| bracket(x).powf(s), None)),
        FormKind::H1 { s } => {
            let w = move |x: &Point| bracket(x).powf(s);
            plain(tensor_form(setup, w, Some(&w)))
        }
        FormKind::LandauRhs { gamma } => {
            let w = move |x: &Point| bracket(x).powf(gamma) + bracket(x).powf(2.0 + gamma);
            let g = move |x: &Point| bracket(x).powf(gamma);
            plain(tensor_form(setup, w, Some(&g)))
        }
    }
}

/// `ν(|v|)` for `u = 0`, tabulated at the distinct radii of a tensor rule.
struct NuTable {
    radii: Vec<f64>,
    values: Vec<f64>,
}

impl NuTable {
    fn new(k: &CollisionKernel, p: &MaxwellianParams, q: &QuadratureRule) -> Result<NuTable> {
        let mut radii: Vec<f64> = q.nodes.iter().map(|x| x.norm()).collect();
        radii.sort_by(|a, b| a.partial_cmp(b).unwrap());
        radii.dedup_by(|a, b| (*a - *b).abs() <= 1e-13 * b.abs().max(1.0));
        let values = radii.iter().map(|r| collision_frequency(k, p, &Point::new(*r, 0.0, 0.0))).collect::<Result<Vec<_>>>()?;
        Ok(NuTable { radii, values })
    }

    fn eval(&self, r: f64) -> f64 {
        let i = match self.radii.binary_search_by(|x| x.partial_cmp(&r).unwrap()) {
            Ok(i) => i,
            Err(i) => {
                if i == 0 {
                    0
                } else if i == self.radii.len() || (r - self.radii[i - 1]) < (self.radii[i] - r) {
                    i - 1
                } else {
                    i
                }
            }
        };
        self.values[i]
    }
}

/// Generalized spectrum of `(D, Q)` on `range(I - Π)` and convergence data.
#[derive(Debug, Clone)]
pub struct SpectralReport {
    pub form_matrix: DMatrix<f64>,
    pub norm_matrix: DMatrix<f64>,
    pub null_projector: DMatrix<f64>,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub constant_estimate: f64,
    /// Coefficients of the extremal test function.
    pub extremal: DVector<f64>,
    /// All eigenvectors whose eigenvalue is within `1e-8` of the minimum.
    pub cluster: Vec<DVector<f64>>,
    /// `(degree, estimate)` from principal submatrices, when a basis is given.
    pub convergence: Vec<(usize, f64)>,
    pub form_asymmetry: f64,
}

/// `min { hᵀDh / hᵀQh : Πh = 0 }` by congruence onto an orthonormal basis of
/// `range(I - Π)` and a Cholesky-reduced symmetric eigenproblem.
pub fn coercivity_constant(d: &DMatrix<f64>, q: &DMatrix<f64>, null_proj: &DMatrix<f64>) -> Result<SpectralReport> {
    let n = d.nrows();
    if q.nrows() != n || null_proj.nrows() != n {
        return Err(Error::DomainError("matrix sizes differ".into()));
    }
    let comp = DMatrix::<f64>::identity(n, n) - null_proj;
    let eig = SymmetricEigen::new(comp);
    let cols: Vec<DVector<f64>> = (0..n).filter(|&i| eig.eigenvalues[i] > 0.5).map(|i| eig.eigenvectors.column(i).into_owned()).collect();
    if cols.is_empty() {
        return Err(Error::EigSolveFailure("complement of the null space is empty".into()));
    }
    let z = DMatrix::from_columns(&cols);
    let qz = z.transpose() * q * &z;
    let qz = (&qz + qz.transpose()) * 0.5;
    let qmin = SymmetricEigen::new(qz.clone()).eigenvalues.min();
    if !(qmin > 1e-12) {
        return Err(Error::IndefiniteQ(format!("smallest eigenvalue of Q on the complement is {qmin:.3e}")));
    }
    let chol = Cholesky::new(qz).ok_or_else(|| Error::IndefiniteQ("Cholesky factorization failed".into()))?;
    let l = chol.l();
    let dz = z.transpose() * d * &z;
    let linv = l.clone().try_inverse().ok_or_else(|| Error::EigSolveFailure("singular Cholesky factor".into()))?;
    let c = &linv * dz * linv.transpose();
    let c = (&c + c.transpose()) * 0.5;
    if c.iter().any(|x| !x.is_finite()) {
        return Err(Error::EigSolveFailure("non-finite reduced matrix".into()));
    }
    let se = SymmetricEigen::new(c);
    let mut order: Vec<usize> = (0..se.eigenvalues.len()).collect();
    order.sort_by(|a, b| se.eigenvalues[*a].partial_cmp(&se.eigenvalues[*b]).unwrap());
    let eigenvalues: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let lam = eigenvalues[0];
    let back = |i: usize| -> DVector<f64> {
        let y = se.eigenvectors.column(i).into_owned();
        let x = linv.transpose() * y;
        &z * x
    };
    let tol = 1e-8 * lam.abs().max(1.0);
    let cluster: Vec<DVector<f64>> = order.iter().filter(|&&i| se.eigenvalues[i] - lam <= tol).map(|&i| back(i)).collect();
    let dn = d.norm();
    let form_asymmetry = if dn > 0.0 { (d - d.transpose()).norm() / dn } else { 0.0 };
    Ok(SpectralReport {
        form_matrix: d.clone(),
        norm_matrix: q.clone(),
        null_projector: null_proj.clone(),
        eigenvalues,
        constant_estimate: lam,
        extremal: cluster[0].clone(),
        cluster,
        convergence: vec![],
        form_asymmetry,
    })
}

/// Leading principal block.
pub fn leading(m: &DMatrix<f64>, n: usize) -> DMatrix<f64> {
    m.view((0, 0), (n, n)).into_owned()
}

/// Coercivity constant at the basis degree with estimates at `d - 2`, `d - 1`, `d`.
pub fn coercivity_report(basis: &GalerkinBasis, d: &DMatrix<f64>, q: &DMatrix<f64>) -> Result<SpectralReport> {
    let proj = basis.null_projector();
    let mut report = coercivity_constant(d, q, &proj)?;
    let lo = basis.degree.saturating_sub(2).max(3);
    for deg in lo..=basis.degree {
        let m = basis.len_up_to(deg);
        let val = if deg == basis.degree {
            report.constant_estimate
        } else {
            coercivity_constant(&leading(d, m), &leading(q, m), &leading(&proj, m))?.constant_estimate
        };
        report.convergence.push((deg, val));
    }
    Ok(report)
}

/// Spectral gap: `Q` is the `L^2(M)` mass matrix.
pub fn spectral_gap(d: &DMatrix<f64>, mass: &DMatrix<f64>, null_proj: &DMatrix<f64>) -> Result<f64> {
    Ok(coercivity_constant(d, mass, null_proj)?.constant_estimate)
}

/// Which Dirichlet form a rescaling check uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    Boltzmann,
    Landau,
}

/// Both sides of each rescaling identity.
#[derive(Debug, Clone, PartialEq)]
pub struct RescalingCheck {
    /// `(name, physical side, rescaled side)`.
    pub identities: Vec<(String, f64, f64)>,
}

impl RescalingCheck {
    pub fn residual(&self) -> f64 {
        self.identities
            .iter()
            .map(|(_, a, b)| {
                let s = a.abs().max(b.abs());
                if s < 1e-300 {
                    0.0
                } else {
                    (a - b).abs() / s
                }
            })
            .fold(0.0, f64::max)
    }
}

/// `D_{ρ,u,T}(h) = (ρ^2/π^N)(2T)^{γ/2} D(h(u + sqrt(2T)·))` for both models, plus
/// `‖h‖^2_{L^2(M_{ρ,u,T})} = (ρ/π^{N/2})‖h̃‖^2_{L^2(M)}` and the gradient analogue
/// with an extra `1/(2T)`. Changing `T` needs a homogeneous `Φ` (power family).
pub fn rescaling_check(p: &MaxwellianParams, h: &TestFunction, model: Model, k: &CollisionKernel, q: &QuadratureRule) -> Result<RescalingCheck> {
    if k.phi != PhiFamily::Power && p.scale() != 1.0 {
        return Err(Error::DomainError("rescaling in T needs a homogeneous kinetic part (power family)".into()));
    }
    let dim = p.dim;
    let norm = MaxwellianParams::normalized(dim);
    let scale = p.scale();
    let pulled = h.affine_pullback(p.u, scale);
    let n = dim as f64;
    let mass_ratio = p.rho / std::f64::consts::PI.powf(n / 2.0);
    let form_factor = mass_ratio * mass_ratio * scale.powf(k.gamma);
    let (lhs, rhs) = match model {
        Model::Boltzmann => (dirichlet_form_b(h, k, p, q)?, dirichlet_form_b(&pulled, k, &norm, q)?),
        Model::Landau => (dirichlet_form_l(h, k, p, q)?, dirichlet_form_l(&pulled, k, &norm, q)?),
    };
    let l2 = integrate_against_maxwellian(p, q, |v| h.eval(v).powi(2))?;
    let l2n = integrate_against_maxwellian(&norm, q, |v| pulled.eval(v).powi(2))?;
    let g2 = integrate_against_maxwellian(p, q, |v| h.gradient(v).norm_squared())?;
    let g2n = integrate_against_maxwellian(&norm, q, |v| pulled.gradient(v).norm_squared())?;
    Ok(RescalingCheck {
        identities: vec![
            (format!("{model:?} form"), lhs, form_factor * rhs),
            ("L2 norm".into(), l2, mass_ratio * l2n),
            ("gradient norm".into(), g2, mass_ratio * g2n / (scale * scale)),
        ],
    })
}

/// Linear map on `L^2(M)` represented on the Galerkin basis.
pub trait GalerkinOperator {
    fn size(&self) -> usize;
    /// `⟨op e_j, e_i⟩` for `i, j < n`.
    fn matrix(&self, n: usize) -> DMatrix<f64>;
}

pub struct IdentityOperator(pub usize);

impl GalerkinOperator for IdentityOperator {
    fn size(&self) -> usize {
        self.0
    }
    fn matrix(&self, n: usize) -> DMatrix<f64> {
        DMatrix::identity(n, n)
    }
}

pub struct ScalingOperator(pub f64, pub usize);

impl GalerkinOperator for ScalingOperator {
    fn size(&self) -> usize {
        self.1
    }
    fn matrix(&self, n: usize) -> DMatrix<f64> {
        DMatrix::identity(n, n) * self.0
    }
}

/// Operator known through its full Galerkin matrix.
pub struct MatrixOperator(pub DMatrix<f64>);

impl GalerkinOperator for MatrixOperator {
    fn size(&self) -> usize {
        self.0.nrows()
    }
    fn matrix(&self, n: usize) -> DMatrix<f64> {
        leading(&self.0, n)
    }
}

/// Largest singular value of the compression onto the first `basis_dim` elements.
pub fn operator_norm_estimate(op: &dyn GalerkinOperator, basis_dim: usize) -> Result<f64> {
    if basis_dim == 0 || basis_dim > op.size() {
        return Err(Error::DomainError(format!("basis_dim {basis_dim} outside 1..={}", op.size())));
    }
    let m = op.matrix(basis_dim);
    let sv = m.singular_values();
    let s = sv.max();
    if !s.is_finite() {
        return Err(Error::EigSolveFailure("non-finite singular value".into()));
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_coercivity_cases() {
        let b = GalerkinBasis::new(2, 4);
        let n = b.len();
        let proj = b.null_projector();
        let i = DMatrix::<f64>::identity(n, n);
        let a = DMatrix::from_fn(n, n, |r, c| 1.0 / (1.0 + r as f64 + c as f64)) + &i * 2.0;
        let r = coercivity_constant(&a, &a, &proj).unwrap();
        assert!((r.constant_estimate - 1.0).abs() < 1e-10);
        let d = &a * 2.0;
        let r1 = coercivity_constant(&a, &i, &proj).unwrap().constant_estimate;
        let r2 = coercivity_constant(&d, &i, &proj).unwrap().constant_estimate;
        assert!((r2 / r1 - 2.0).abs() < 1e-12);
        let neg = &i * -1.0;
        assert!(matches!(coercivity_constant(&a, &neg, &proj), Err(Error::IndefiniteQ(_))));
    }

    #[test]
    fn operator_norm_examples() {
        assert!((operator_norm_estimate(&IdentityOperator(10), 10).unwrap() - 1.0).abs() < 1e-10);
        assert!((operator_norm_estimate(&ScalingOperator(2.0, 10), 5).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn mass_matrix_is_identity() {
        let s = GalerkinSetup::new(2, 6, QuadratureRule::new(2));
        let k = CollisionKernel::maxwell(2);
        let m = assemble_form(FormKind::Mass { s: 0.0 }, &s, &k).unwrap().matrix;
        assert!((m - DMatrix::<f64>::identity(28, 28)).amax() < 1e-10);
    }

    #[test]
    fn galerkin_dirichlet_matches_test_function_route() {
        let setup = GalerkinSetup::new(3, 3, QuadratureRule::new(3));
        let k = CollisionKernel::power(3, 1.0).unwrap();
        let d = assemble_form(FormKind::BoltzmannDirichlet, &setup, &k).unwrap();
        let dl = assemble_form(FormKind::LandauDirichlet, &setup, &k).unwrap();
        let c = DVector::from_fn(setup.basis.len(), |i, _| ((i * 7 % 5) as f64 - 2.0) / 3.0);
        let h = setup.test_function(c.clone(), "h");
        let p = setup.params();
        let q = &setup.quadrature;
        let direct = dirichlet_form_b(&h, &k, &p, q).unwrap();
        let via = (c.transpose() * &d.matrix * &c)[(0, 0)];
        assert!((direct / via - 1.0).abs() < 1e-10, "{direct} {via}");
        let direct = dirichlet_form_l(&h, &k, &p, q).unwrap();
        let via = (c.transpose() * &dl.matrix * &c)[(0, 0)];
        assert!((direct / via - 1.0).abs() < 1e-10, "{direct} {via}");
    }

    #[test]
    fn exactness_violation_for_coarse_rules() {
        let setup = GalerkinSetup::new(2, 6, QuadratureRule::with_orders(2, 2, 3, 8));
        let k = CollisionKernel::maxwell(2);
        assert!(matches!(assemble_form(FormKind::Mass { s: 0.0 }, &setup, &k), Err(Error::ExactnessViolation(_))));
    }
}
