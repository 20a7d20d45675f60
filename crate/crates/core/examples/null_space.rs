//! Collision invariants as an orthonormal family in L²(M), and the Boltzmann
//! and Landau Dirichlet forms on them for a few kernels.

use kincoerce::boltzmann::dirichlet_form_b;
use kincoerce::kernels::CollisionKernel;
use kincoerce::landau::dirichlet_form_l;
use kincoerce::maxwellian::{null_space_basis, MaxwellianParams};
use kincoerce::quadrature::QuadratureRule;

fn main() -> kincoerce::Result<()> {
    let dim: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    let p = MaxwellianParams::normalized(dim);
    let q = QuadratureRule::new(dim);
    let ns = null_space_basis(&p, &q)?;
    println!("raw Gram matrix of (1, v, |v|^2):{:.6}", ns.raw_gram);
    let kernels = [
        CollisionKernel::maxwell(dim),
        CollisionKernel::power(dim, 1.0)?,
        CollisionKernel::truncated(dim, -1.0)?,
        CollisionKernel::power(dim, 0.5)?.with_singular(1.0, 1e-2, true)?,
    ];
    for k in &kernels {
        let worst = ns
            .elements
            .iter()
            .map(|h| Ok(dirichlet_form_b(h, k, &p, &q)?.abs().max(dirichlet_form_l(h, k, &p, &q)?.abs())))
            .collect::<kincoerce::Result<Vec<f64>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        println!("gamma {:+}, cutoff {}: max |D(h)| over invariants {worst:.3e}", k.gamma, k.is_cutoff());
    }
    Ok(())
}
