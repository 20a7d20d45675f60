//! Property tests for invariants that hold for every admissible input.

use kincoerce::boltzmann::{dirichlet_form_b, geometric_sum, post_collision};
use kincoerce::geometry::{point, random_rotation, Point};
use kincoerce::kernels::CollisionKernel;
use kincoerce::landau::{dirichlet_form_l, BakryEmeryPotential};
use kincoerce::longrange::{psi_sigma, GagliardoNorm};
use kincoerce::maxwellian::MaxwellianParams;
use kincoerce::quadrature::QuadratureRule;
use kincoerce::spectral::{assemble_form, rescaling_check, FormKind, GalerkinSetup, Model};
use kincoerce::test_function::TestFunction;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::OnceLock;

fn velocity(dim: usize) -> impl Strategy<Value = Point> {
    prop::collection::vec(-8.0f64..8.0, dim).prop_map(move |c| point(dim, &c))
}

fn unit(dim: usize) -> impl Strategy<Value = Point> {
    velocity(dim).prop_filter("nonzero", |v| v.norm() > 1e-3).prop_map(|v| v / v.norm())
}

struct Forms {
    null: DMatrix<f64>,
    boltzmann: DMatrix<f64>,
    landau: DMatrix<f64>,
}

/// Hard-sphere-like kernel, `N = 2`, degree 4.
fn forms() -> &'static Forms {
    static FORMS: OnceLock<Forms> = OnceLock::new();
    FORMS.get_or_init(|| {
        let setup = GalerkinSetup::new(2, 4, QuadratureRule::new(2));
        let k = CollisionKernel::power(2, 1.0).unwrap();
        Forms {
            null: setup.basis.null_projector(),
            boltzmann: assemble_form(FormKind::BoltzmannDirichlet, &setup, &k).unwrap().matrix,
            landau: assemble_form(FormKind::LandauDirichlet, &setup, &k).unwrap().matrix,
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn collisions_conserve_and_preserve_relative_speed(v in velocity(3), vs in velocity(3), s in unit(3)) {
        let st = post_collision(&v, &vs, &s);
        let scale = (v + vs).amax().max(st.v_prime.amax()).max(1.0);
        prop_assert!(st.momentum_defect().amax() <= f64::EPSILON * scale);
        prop_assert!(st.energy_defect() <= 1e-12);
        let before = (v - vs).norm();
        prop_assert!(((st.v_prime - st.v_star_prime).norm() - before).abs() <= 1e-12 * before.max(1.0));
    }

    #[test]
    fn psi_moves_orthogonally_to_the_relative_velocity(v in velocity(2), vs in velocity(2), s in unit(2)) {
        prop_assume!((v - vs).norm() > 1e-6);
        let step = psi_sigma(&v, &vs, &s) - v;
        let rel = vs - v;
        prop_assert!(step.dot(&rel).abs() <= 1e-9 * step.norm().max(1e-300) * rel.norm());
    }

    #[test]
    fn bakry_emery_hessian_is_bounded_by_its_infimum(v in velocity(3), gamma in -3.0f64..1.0) {
        let pot = BakryEmeryPotential::new(gamma, 3);
        prop_assert!(pot.min_hessian_eigenvalue(&v) >= pot.convexity_bound() - 1e-12);
    }

    #[test]
    fn geometric_sum_matches_closed_form(ratio in 1.05f64..16.0, gamma in -3.0f64..-0.05) {
        let s = geometric_sum(ratio, gamma).unwrap();
        let exact = 1.0 / (1.0 - ratio.powf(gamma));
        prop_assert!((s - exact).abs() <= 1e-12 * exact);
    }

    #[test]
    fn kernel_rejects_inadmissible_gamma(gamma in prop_oneof![-10.0f64..-3.0001, 1.0001f64..5.0]) {
        prop_assert!(CollisionKernel::power(3, gamma).is_err());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dirichlet_forms_are_nonnegative_and_blind_to_invariants(
        c in prop::collection::vec(-1.0f64..1.0, 15),
        z in prop::collection::vec(-1.0f64..1.0, 15),
    ) {
        let f = forms();
        let c = DVector::from_vec(c);
        let z = &f.null * DVector::from_vec(z);
        for d in [&f.boltzmann, &f.landau] {
            let base = c.dot(&(d * &c));
            prop_assert!(base >= -1e-10 * c.norm_squared());
            let shifted = &c + &z;
            prop_assert!((shifted.dot(&(d * &shifted)) - base).abs() <= 1e-9 * (1.0 + base));
        }
    }

    #[test]
    fn gagliardo_is_shift_invariant_and_quadratic(a in -2.0f64..2.0, b in -2.0f64..2.0, shift in -5.0f64..5.0, lam in -3.0f64..3.0) {
        let g = GagliardoNorm::new(2, 1.0, 1.0, 8, 4).unwrap();
        let h = TestFunction::from_fn(2, "h", move |v| a * v[0] * v[1] + b * v[0] * v[0]);
        let base = g.seminorm_sq(&h);
        prop_assert!(base >= 0.0);
        let hs = h.clone();
        let moved = TestFunction::from_fn(2, "h+c", move |v| hs.eval(v) + shift);
        prop_assert!((g.seminorm_sq(&moved) - base).abs() <= 1e-10 * (1.0 + base));
        prop_assert!((g.seminorm_sq(&h.scaled(lam)) - lam * lam * base).abs() <= 1e-10 * (1.0 + lam * lam * base));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn dirichlet_forms_are_rotation_invariant(seed in 0u64..1000, a in 0u32..3, b in 0u32..3) {
        let q = QuadratureRule::new(2);
        let p = MaxwellianParams::normalized(2);
        let k = CollisionKernel::power(2, 0.5).unwrap();
        let h = TestFunction::monomial(2, [a + 1, b, 0]);
        let r = random_rotation(&mut ChaCha8Rng::seed_from_u64(seed), 2);
        let hr = h.rotated(r);
        for (x, y) in [
            (dirichlet_form_b(&h, &k, &p, &q).unwrap(), dirichlet_form_b(&hr, &k, &p, &q).unwrap()),
            (dirichlet_form_l(&h, &k, &p, &q).unwrap(), dirichlet_form_l(&hr, &k, &p, &q).unwrap()),
        ] {
            prop_assert!((x - y).abs() <= 1e-9 * (1.0 + x.abs()));
        }
    }

    #[test]
    fn rescaling_holds_for_any_maxwellian(
        rho in 0.2f64..5.0,
        u in prop::collection::vec(-2.0f64..2.0, 2),
        t in 0.2f64..3.0,
        gamma in -1.0f64..1.0,
    ) {
        let p = MaxwellianParams::new(2, rho, point(2, &u), t).unwrap();
        let k = CollisionKernel::power(2, gamma).unwrap();
        let h = TestFunction::monomial(2, [2, 1, 0]);
        for model in [Model::Boltzmann, Model::Landau] {
            let r = rescaling_check(&p, &h, model, &k, &QuadratureRule::new(2)).unwrap();
            prop_assert!(r.residual() < 1e-7, "{model:?}: {}", r.residual());
        }
    }
}
