//! Collision frequency ν(v) against ⟨v⟩^γ, and the sandwich constants of the
//! kinetic and angular parts of the kernel.

use kincoerce::geometry::{bracket, Point};
use kincoerce::kernels::{angular_sandwich, check_cb_lower_bound, collision_frequency, phi_sandwich, CollisionKernel};
use kincoerce::maxwellian::MaxwellianParams;
use kincoerce::quadrature::QuadratureRule;

fn main() -> kincoerce::Result<()> {
    let dim: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    let p = MaxwellianParams::normalized(dim);
    let sphere = QuadratureRule::new(dim).sphere;
    for k in [CollisionKernel::power(dim, 1.0)?, CollisionKernel::maxwell(dim), CollisionKernel::truncated(dim, -1.0)?] {
        println!("gamma {:+}", k.gamma);
        for r in [0.0, 1.0, 2.0, 4.0, 8.0] {
            let v = Point::new(r, 0.0, 0.0);
            let nu = collision_frequency(&k, &p, &v)?;
            println!("    |v| {r:>4}: nu {nu:.6e}  nu/<v>^gamma {:.6e}", nu / bracket(&v).powf(k.gamma));
        }
        let (lo, hi) = phi_sandwich(&k, 1e-3, 1e3, 200);
        let cb = check_cb_lower_bound(&k, 200, &sphere);
        println!("    Phi/r^gamma in [{lo:.4}, {hi:.4}], C_b sampled {:.4} >= bound {:.4}", cb.sampled_min, cb.lower_bound);
    }
    let singular = CollisionKernel::power(dim, 0.0)?.with_singular(1.0, 1e-2, true)?;
    let (lo, hi) = angular_sandwich(&singular, 200);
    println!("singular b: b(cos theta) theta^(N-1+alpha) in [{lo:.4}, {hi:.4}], truncated angular mass {:.4}", singular.angular_mass());
    Ok(())
}
