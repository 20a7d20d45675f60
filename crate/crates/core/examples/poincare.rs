//! Poincaré ratios for the Maxwellian and the weighted measure ⟨v⟩^γ M, and
//! the convexity of the corresponding potential.

use kincoerce::geometry::Point;
use kincoerce::landau::{poincare_check, BakryEmeryPotential, PoincareMeasure};
use kincoerce::maxwellian::MaxwellianParams;
use kincoerce::quadrature::QuadratureRule;
use kincoerce::test_function::TestFunction;

fn main() -> kincoerce::Result<()> {
    let dim = 3;
    let p = MaxwellianParams::normalized(dim);
    let q = QuadratureRule::new(dim);
    let tests = [TestFunction::coordinate(dim, 0), TestFunction::monomial(dim, [1, 1, 0]), TestFunction::monomial(dim, [3, 0, 1])];
    for h in &tests {
        let r = poincare_check(PoincareMeasure::Maxwellian, h, &p, &q)?;
        println!("M, {:?}: ratio {:.12}", h.label, r.ratio);
    }
    for gamma in [-3.0, -1.0, 0.0, 1.0] {
        let r = poincare_check(PoincareMeasure::Weighted(gamma), &tests[0], &p, &q)?;
        let pot = BakryEmeryPotential::new(gamma, dim);
        let profile: Vec<String> = [0.0, 1.0, 2.0, 4.0, 8.0].iter().map(|&s| format!("{:.4}", pot.min_hessian_eigenvalue(&Point::new(s, 0.0, 0.0)))).collect();
        println!(
            "gamma {gamma:+}: ratio for v1 {:.6} (constant {:.4}, holds {}), Hessian min eigenvalue along a ray [{}], infimum {:.4}",
            r.ratio,
            r.constant,
            r.holds,
            profile.join(", "),
            pot.convexity_bound()
        );
    }
    Ok(())
}
