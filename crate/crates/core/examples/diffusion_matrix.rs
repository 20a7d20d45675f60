//! Smallest eigenvalue of the Landau diffusion matrix along a ray, against the
//! weight `⟨v⟩^γ`.

use kincoerce::kernels::CollisionKernel;
use kincoerce::landau::DiffusionMatrixField;
use kincoerce::maxwellian::MaxwellianParams;
use kincoerce::quadrature::QuadratureRule;

fn main() -> kincoerce::Result<()> {
    let dim: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    let p = MaxwellianParams::normalized(dim);
    let q = QuadratureRule::new(dim);
    for gamma in [-1.0, 0.0, 1.0] {
        let k = CollisionKernel::power(dim, gamma)?;
        let field = DiffusionMatrixField::sample(&k, &p, 8.0, 0.25, &q)?;
        println!("gamma {gamma:+}: c_fit {:.6e} c_lower {:.6e} rms log deviation {:.4} max {:.4}", field.c_fit, field.c_lower, field.rms_log_deviation, field.max_log_deviation);
        for (r, l) in field.radii.iter().zip(&field.min_eigenvalues).step_by(4) {
            println!("    |v| {r:>5.2}  lambda_min {l:.6e}  ratio {:.6e}", l / (1.0 + r * r).powf(gamma / 2.0));
        }
    }
    Ok(())
}
