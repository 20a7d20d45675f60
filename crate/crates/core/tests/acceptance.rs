//! Acceptance suite. Each test prints one `criterion N PASS|FAIL: ...` line
//! (run with `--nocapture` to see them) and asserts the same verdict.

use kincoerce::basis::GalerkinBasis;
use kincoerce::boltzmann::{dirichlet_form_b, dyadic_matrices_b, post_collision, split_check_b, tail_gain_matrix_b};
use kincoerce::cli::{self, CommandKind, Flags, RunConfig, Status};
use kincoerce::geometry::{random_in_ball, random_unit, Point};
use kincoerce::kernels::CollisionKernel;
use kincoerce::landau::{dirichlet_form_l, poincare_check, tail_gain_matrix_l, BakryEmeryPotential, DiffusionMatrixField, PoincareMeasure};
use kincoerce::maxwellian::{integrate_against_maxwellian, null_space_basis, MaxwellianParams};
use kincoerce::quadrature::QuadratureRule;
use kincoerce::spectral::{
    assemble_form, coercivity_constant, leading, operator_norm_estimate, rescaling_check, FormKind, GalerkinSetup, MatrixOperator, Model,
};
use kincoerce::test_function::TestFunction;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::sync::Arc;

fn verdict(n: usize, pass: bool, detail: String) {
    println!("\ncriterion {n:>2} {}: {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {n}: {detail}");
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_coeffs(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0))
}

fn quadratic(a: &DMatrix<f64>, c: &DVector<f64>) -> f64 {
    c.dot(&(a * c))
}

#[test]
fn criterion_01_conservation() {
    let mut r = rng(11);
    let (mut mom, mut en) = (0.0f64, 0.0f64);
    let mut nonzero = 0usize;
    for i in 0..1_000_000 {
        let dim = 2 + i % 2;
        let v = random_in_ball(&mut r, dim, 10.0);
        let vs = random_in_ball(&mut r, dim, 10.0);
        let s = random_unit(&mut r, dim);
        let st = post_collision(&v, &vs, &s);
        let d = st.momentum_defect().amax();
        // One rounding of the sum `v + v_*` in each component.
        let ulp = f64::EPSILON * (v + vs).amax().max(st.v_prime.amax());
        nonzero += usize::from(d > 0.0);
        mom = mom.max(d / ulp.max(f64::MIN_POSITIVE));
        en = en.max(st.energy_defect());
    }
    let pass = mom <= 1.0 && en <= 1e-12;
    verdict(
        1,
        pass,
        format!("1e6 triples: max momentum defect {mom:.2} ulp ({nonzero} nonzero), max relative energy defect {en:.2e} (tol 1e-12)"),
    );
}

#[test]
fn criterion_02_null_space() {
    let mut worst = (0.0f64, String::new());
    for dim in [2, 3] {
        let p = MaxwellianParams::normalized(dim);
        let q = QuadratureRule::new(dim);
        let ns = null_space_basis(&p, &q).unwrap();
        assert_eq!(ns.elements.len(), dim + 2);
        for gamma in [-1.0, 0.0, 1.0] {
            for truncated in [false, true] {
                for singular in [false, true] {
                    let k = if truncated { CollisionKernel::truncated(dim, gamma) } else { CollisionKernel::power(dim, gamma) }.unwrap();
                    let k = if singular { k.with_singular(1.0, 1e-2, true).unwrap() } else { k };
                    for h in &ns.elements {
                        let norm = integrate_against_maxwellian(&p, &q, |v| h.eval(v).powi(2)).unwrap();
                        for (label, d) in [("B", dirichlet_form_b(h, &k, &p, &q).unwrap()), ("L", dirichlet_form_l(h, &k, &p, &q).unwrap())] {
                            let rel = d.abs() / norm;
                            if rel >= worst.0 {
                                worst = (rel, format!("D^{label}, N={dim}, gamma={gamma}, truncated={truncated}, singular={singular}"));
                            }
                        }
                    }
                }
            }
        }
    }
    verdict(2, worst.0 < 1e-8, format!("max |D(h)|/|h|^2 = {:.2e} at {} (tol 1e-8)", worst.0, worst.1));
}

#[test]
fn criterion_03_rescaling() {
    let mut worst = (0.0f64, String::new());
    for dim in [2, 3] {
        let q = QuadratureRule::new(dim);
        let mass = PI.powf(dim as f64 / 2.0);
        let e1 = Point::new(1.0, 0.0, 0.0);
        let params = [
            MaxwellianParams::new(dim, mass, Point::zeros(), 0.5).unwrap(),
            MaxwellianParams::new(dim, 2.0 * mass, Point::zeros(), 0.5).unwrap(),
            MaxwellianParams::new(dim, mass, e1, 0.5).unwrap(),
            MaxwellianParams::new(dim, mass, Point::zeros(), 1.0).unwrap(),
        ];
        // Collision invariants are left out: both sides vanish and the relative residual is noise.
        let monomials: &[[u32; 3]] = if dim == 2 { &[[1, 1, 0], [2, 1, 0], [0, 3, 0], [3, 1, 0]] } else { &[[1, 1, 0], [1, 1, 1], [2, 0, 1], [1, 1, 2]] };
        let kernels = [CollisionKernel::power(dim, -1.0).unwrap(), CollisionKernel::power(dim, 0.0).unwrap(), CollisionKernel::power(dim, 1.0).unwrap()];
        for k in &kernels {
            for a in monomials {
                let h = TestFunction::monomial(dim, *a);
                for p in &params {
                    for model in [Model::Boltzmann, Model::Landau] {
                        let res = rescaling_check(p, &h, model, k, &q).unwrap().residual();
                        if res >= worst.0 {
                            worst = (res, format!("{model:?}, N={dim}, gamma={}, h=v^{a:?}, rho={:.3}, u1={}, T={}", k.gamma, p.rho, p.u[0], p.temperature));
                        }
                    }
                }
            }
        }
    }
    verdict(3, worst.0 < 1e-7, format!("max relative residual {:.2e} at {} (tol 1e-7)", worst.0, worst.1));
}

#[test]
fn criterion_04_poincare_extremal() {
    let mut worst = 0.0f64;
    for dim in [2, 3] {
        let p = MaxwellianParams::normalized(dim);
        let r = poincare_check(PoincareMeasure::Maxwellian, &TestFunction::coordinate(dim, 0), &p, &QuadratureRule::new(dim)).unwrap();
        worst = worst.max((r.ratio - 2.0).abs());
    }
    verdict(4, worst < 1e-9, format!("h = v1: |ratio - 2| = {worst:.2e} (tol 1e-9)"));
}

#[test]
fn criterion_05_bakry_emery_hessian() {
    let mut r = rng(5);
    let mut lines = vec![];
    let mut pass = true;
    for gamma in [-3.0, -1.0, 0.0] {
        let pot = BakryEmeryPotential::new(gamma, 3);
        let mut min = f64::INFINITY;
        for _ in 0..10_000 {
            let v = random_in_ball(&mut r, 3, 10.0);
            min = min.min(pot.min_hessian_eigenvalue(&v));
        }
        let target = 2.0 - gamma - 1e-10;
        pass &= min >= target;
        lines.push(format!("gamma={gamma}: min eig {min:.6} vs required {:.1}", 2.0 - gamma));
    }
    verdict(5, pass, lines.join("; "));
}

#[test]
fn criterion_06_diffusion_matrix() {
    let mut lines = vec![];
    let mut pass = true;
    for dim in [2, 3] {
        let p = MaxwellianParams::normalized(dim);
        let q = QuadratureRule::new(dim);
        for gamma in [-1.0, 0.0, 1.0] {
            let k = CollisionKernel::power(dim, gamma).unwrap();
            let f = DiffusionMatrixField::sample(&k, &p, 8.0, 0.25, &q).unwrap();
            let ok = f.c_lower > 0.0 && f.rms_log_deviation < 0.1;
            pass &= ok;
            lines.push(format!("N={dim} gamma={gamma}: c={:.4} rms log dev {:.4}{}", f.c_lower, f.rms_log_deviation, if ok { "" } else { " (over 0.1)" }));
        }
    }
    verdict(6, pass, lines.join("; "));
}

#[test]
fn criterion_07_grad_split() {
    let dim = 3;
    let p = MaxwellianParams::normalized(dim);
    let q = QuadratureRule::new(dim);
    let setup = GalerkinSetup::new(dim, 4, q.clone());
    let basis = Arc::new(GalerkinBasis::new(dim, 3));
    let mut r = rng(7);
    let (mut worst, mut direct) = (0.0f64, 0.0f64);
    for gamma in [0.0, 1.0] {
        let k = CollisionKernel::power(dim, gamma).unwrap();
        let d = assemble_form(FormKind::BoltzmannDirichlet, &setup, &k).unwrap().matrix;
        let a = assemble_form(FormKind::BoltzmannLoss, &setup, &k).unwrap().matrix;
        let kk = assemble_form(FormKind::BoltzmannGain, &setup, &k).unwrap().matrix;
        for _ in 0..50 {
            let c = random_coeffs(&mut r, setup.basis.len());
            let dv = quadratic(&d, &c);
            worst = worst.max((dv - (quadratic(&a, &c) - quadratic(&kk, &c))).abs() / (1.0 + dv));
        }
        // Pointwise evaluation of the three forms, independent of the assembly.
        for i in 0..2 {
            let h = TestFunction::galerkin(basis.clone(), random_coeffs(&mut r, basis.len()), format!("h{i}"));
            let s = split_check_b(&h, &k, &p, &q).unwrap();
            direct = direct.max(s.residual().abs() / (1.0 + s.dirichlet));
        }
    }
    let pass = worst <= 1e-7 && direct <= 1e-7;
    verdict(7, pass, format!("max |D - (<Ah,h> - <Kh,h>)| / (1 + D) = {worst:.2e} over 2x50 Galerkin h, {direct:.2e} over 2x2 pointwise h (tol 1e-7)"));
}

#[test]
fn criterion_08_tail_decay() {
    let setup = GalerkinSetup::new(3, 6, QuadratureRule::new(3));
    let deg = setup.pair_degree();
    let mut lines = vec![];
    let mut pass = true;
    for model in ["B", "L"] {
        let mut norms = vec![];
        for radius in [1.0, 2.0, 4.0, 8.0] {
            let m = if model == "B" {
                tail_gain_matrix_b(&setup.basis, radius, &setup.rotations, deg)
            } else {
                tail_gain_matrix_l(&setup.basis, radius, &setup.rotations, deg)
            }
            .unwrap();
            norms.push(operator_norm_estimate(&MatrixOperator(m), setup.basis.len()).unwrap());
        }
        let strict = norms.windows(2).all(|w| w[1] < w[0]);
        let ratio = norms[3] / norms[0];
        pass &= strict && ratio < 0.1;
        lines.push(format!("K_R^{model} norms at R=1,2,4,8: {:.3e}, {:.3e}, {:.3e}, {:.3e}, ratio {ratio:.2e}", norms[0], norms[1], norms[2], norms[3]));
    }
    verdict(8, pass, lines.join("; "));
}

#[test]
fn criterion_09_dyadic() {
    let dim = 3;
    let setup = GalerkinSetup::new(dim, 6, QuadratureRule::new(dim));
    let k = CollisionKernel::truncated(dim, -1.0).unwrap();
    let mats = dyadic_matrices_b(&setup.basis, 2.0, 6, &k, &setup.rotations).unwrap();
    let d = assemble_form(FormKind::BoltzmannDirichlet, &setup, &k).unwrap().matrix;
    let mut r = rng(9);
    let (mut tele, mut s_err, mut excess) = (0.0f64, 0.0f64, f64::NEG_INFINITY);
    for _ in 0..100 {
        let c = random_coeffs(&mut r, setup.basis.len());
        let dec = mats.decompose(&c).unwrap();
        tele = tele.max(dec.telescoping_residual());
        s_err = s_err.max((dec.s - dec.s_closed_form()).abs() / dec.s_closed_form());
        let form = quadratic(&d, &c);
        excess = excess.max((k.constants.c_phi * dec.weighted_sum() - form) / form.abs());
    }
    let pass = tele <= 1e-9 && s_err <= 4.0 * f64::EPSILON && excess <= 0.0;
    verdict(
        9,
        pass,
        format!("telescoping {tele:.2e} (tol 1e-9), |S - 1/(1-R^gamma)|/S {s_err:.1e}, max (C_Phi sum - D)/D {excess:.3e} (must be <= 0)"),
    );
}

/// Eigenvalue of the Maxwell-molecule operator (`N = 3`, `b ≡ 1`) on the
/// Burnett mode `(n, l)`, by Gauss–Legendre quadrature of the angular integral.
fn maxwell_eigenvalue(n: u32, l: u32, rho: f64) -> f64 {
    let legendre = |l: u32, x: f64| {
        let (mut p0, mut p1) = (1.0, x);
        if l == 0 {
            return 1.0;
        }
        for k in 1..l {
            let k = k as f64;
            let p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
            p0 = p1;
            p1 = p2;
        }
        p1
    };
    let m = 2 * n + l;
    let delta = if n == 0 && l == 0 { 1.0 } else { 0.0 };
    let rule = kincoerce::quadrature::gauss_legendre(64);
    let mut s = 0.0;
    for (x, w) in rule.nodes.iter().zip(&rule.weights) {
        let theta = 0.5 * PI * (x + 1.0);
        let (c, sn) = ((0.5 * theta).cos(), (0.5 * theta).sin());
        let f = c.powi(m as i32) * legendre(l, c) + sn.powi(m as i32) * legendre(l, sn) - 1.0 - delta;
        s += 0.5 * PI * w * theta.sin() * f;
    }
    -rho * 2.0 * PI * s
}

#[test]
fn criterion_10_gap_contrast() {
    let dim = 3;
    let setup = GalerkinSetup::new(dim, 8, QuadratureRule::new(dim));
    let proj = setup.basis.null_projector();
    let gap_at = |d: &DMatrix<f64>, q: &DMatrix<f64>, deg: usize| {
        let m = setup.basis.len_up_to(deg);
        coercivity_constant(&leading(d, m), &leading(q, m), &leading(&proj, m)).unwrap().constant_estimate
    };
    let maxwell = CollisionKernel::maxwell(dim);
    let d = assemble_form(FormKind::BoltzmannDirichlet, &setup, &maxwell).unwrap().matrix;
    let mass = assemble_form(FormKind::Mass { s: 0.0 }, &setup, &maxwell).unwrap().matrix;
    let (g6, g8) = (gap_at(&d, &mass, 6), gap_at(&d, &mass, 8));
    let rho = PI.powf(1.5);
    let mut oracle = f64::INFINITY;
    for n in 0..=4u32 {
        for l in 0..=8u32 {
            let null = matches!((n, l), (0, 0) | (0, 1) | (1, 0));
            if 2 * n + l <= 8 && !null {
                oracle = oracle.min(maxwell_eigenvalue(n, l, rho));
            }
        }
    }
    let three_digits = (g6 - g8).abs() / g8 < 5e-4;
    let oracle_err = (g8 - oracle).abs() / oracle;

    let soft = CollisionKernel::truncated(dim, -1.0).unwrap();
    let ds = assemble_form(FormKind::BoltzmannDirichlet, &setup, &soft).unwrap().matrix;
    let w = assemble_form(FormKind::Mass { s: -1.0 }, &setup, &soft).unwrap().matrix;
    let (s4, s8) = (gap_at(&ds, &mass, 4), gap_at(&ds, &mass, 8));
    let (w4, w8) = (gap_at(&ds, &w, 4), gap_at(&ds, &w, 8));
    let decrease = (s4 - s8) / s4;
    let weighted_change = (w8 - w4).abs() / w4;

    let pass = three_digits && oracle_err < 1e-2 && decrease > 0.2 && weighted_change < 0.05;
    verdict(
        10,
        pass,
        format!(
            "Maxwell gap d6 {g6:.6} d8 {g8:.6}, oracle {oracle:.6} (rel err {oracle_err:.1e}); \
             gamma=-1 plain gap d4 {s4:.4} d8 {s8:.4} decrease {:.1}% (need > 20%), weighted d4 {w4:.4} d8 {w8:.4} change {:.2}% (need < 5%)",
            100.0 * decrease,
            100.0 * weighted_change
        ),
    );
}

#[test]
fn criterion_11_galerkin_inequalities() {
    let dim = 3;
    let setup = GalerkinSetup::new(dim, 6, QuadratureRule::new(dim));
    let proj = setup.basis.null_projector();
    let mut r = rng(13);
    let mut worst = (f64::NEG_INFINITY, String::new());
    let configs: Vec<(&str, CollisionKernel)> = vec![
        ("B", CollisionKernel::truncated(dim, -1.0).unwrap()),
        ("B", CollisionKernel::maxwell(dim)),
        ("B", CollisionKernel::power(dim, 1.0).unwrap()),
        ("B", CollisionKernel::power(dim, 0.5).unwrap().with_singular(1.0, 1e-2, true).unwrap()),
        ("L", CollisionKernel::power(dim, -3.0).unwrap()),
        ("L", CollisionKernel::power(dim, -1.0).unwrap()),
        ("L", CollisionKernel::power(dim, 0.0).unwrap()),
        ("L", CollisionKernel::power(dim, 1.0).unwrap()),
    ];
    for (model, k) in configs {
        let (form, weight) = if model == "B" {
            (FormKind::BoltzmannDirichlet, FormKind::Mass { s: k.gamma })
        } else {
            (FormKind::LandauDirichlet, FormKind::LandauRhs { gamma: k.gamma })
        };
        let d = assemble_form(form, &setup, &k).unwrap().matrix;
        let q = assemble_form(weight, &setup, &k).unwrap().matrix;
        let c = coercivity_constant(&d, &q, &proj).unwrap().constant_estimate;
        for _ in 0..500 {
            let h = random_coeffs(&mut r, setup.basis.len());
            let h = &h - &proj * &h;
            let (dv, qv) = (quadratic(&d, &h), quadratic(&q, &h));
            let defect = (c * qv - dv) / dv;
            if defect > worst.0 {
                worst = (defect, format!("{model}, gamma={}, singular={}, c={c:.4}", k.gamma, !k.is_cutoff()));
            }
        }
    }
    verdict(11, worst.0 <= 1e-10, format!("max (c Q(h) - D(h))/D(h) = {:.2e} over 8x500 h, worst at {}", worst.0, worst.1));
}

#[test]
fn criterion_12_long_range() {
    let cfg = RunConfig::resolve(CommandKind::Longrange, &Flags::default()).unwrap();
    assert_eq!(cfg.dim, 2);
    let report = cli::run(CommandKind::Longrange, cfg);
    let wanted = ["longrange.i1_min", "longrange.c1_sampled", "longrange.i2_bounded_by_c4", "longrange.theta_stability", "longrange.taylor_bound_violations"];
    let mut failed = vec![];
    let mut counted = 0;
    for row in &report.rows {
        if wanted.iter().any(|w| row.quantity.starts_with(w)) {
            counted += 1;
            if row.status != Status::Pass {
                failed.push(format!("{}={:.3e}", row.quantity, row.value));
            }
        }
    }
    let max_stab = report.rows.iter().filter(|r| r.quantity.starts_with("longrange.theta_stability")).map(|r| r.value).fold(0.0, f64::max);
    let c1_min = report.rows.iter().filter(|r| r.quantity.starts_with("longrange.c1_sampled")).map(|r| r.value).fold(f64::INFINITY, f64::min);
    let pass = report.errors.is_empty() && failed.is_empty() && counted == 6 * 3 + 2 * 5 + 2;
    verdict(
        12,
        pass,
        format!("{counted} checks, min sampled C1 {c1_min:.4}, max theta-halving change {:.2}% (tol 5%), errors {}, failures {failed:?}", 100.0 * max_stab, report.errors.len()),
    );
}

#[test]
fn criterion_13_determinism() {
    let dir = std::env::temp_dir().join(format!("kincoerce-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bin = env!("CARGO_BIN_EXE_kincoerce");
    let mut outputs = vec![];
    for i in 0..2 {
        let out = dir.join(format!("run{i}.csv"));
        let status = std::process::Command::new(bin)
            .args(["verify", "--dim", "2", "--seed", "42", "--out"])
            .arg(&out)
            .env("RAYON_NUM_THREADS", "1")
            .status()
            .unwrap();
        assert!(status.code().is_some());
        outputs.push(std::fs::read(&out).unwrap());
    }
    let lib_a = cli::run(CommandKind::Dyadic, RunConfig::resolve(CommandKind::Dyadic, &Flags { dim: Some(2), ..Flags::default() }).unwrap()).to_csv();
    let lib_b = cli::run(CommandKind::Dyadic, RunConfig::resolve(CommandKind::Dyadic, &Flags { dim: Some(2), ..Flags::default() }).unwrap()).to_csv();
    let _ = std::fs::remove_dir_all(&dir);
    let pass = outputs[0] == outputs[1] && !outputs[0].is_empty() && lib_a == lib_b;
    verdict(13, pass, format!("verify CSV {} bytes identical: {}; dyadic CSV identical: {}", outputs[0].len(), outputs[0] == outputs[1], lib_a == lib_b));
}
