//! Localized decomposition of the non-cutoff Dirichlet form in two dimensions:
//! `I_1`, `I_2`, the Gagliardo seminorm and the measured constants, for several
//! angular truncations.

use kincoerce::kernels::CollisionKernel;
use kincoerce::longrange::{long_range_constants, long_range_matrices, GagliardoNorm};
use kincoerce::quadrature::QuadratureRule;
use kincoerce::spectral::{assemble_form, FormKind, GalerkinSetup};
use std::time::Instant;

fn main() -> kincoerce::Result<()> {
    let degree: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(6);
    let (dim, alpha, gamma) = (2, 1.0, 0.5);
    let setup = GalerkinSetup::new(dim, degree, QuadratureRule::new(dim));
    let proj = setup.basis.null_projector();
    let base = CollisionKernel::power(dim, gamma)?;
    let mass = assemble_form(FormKind::Mass { s: gamma }, &setup, &base)?.matrix;
    for radius in [1.0, 2.0] {
        let t0 = Instant::now();
        let g = GagliardoNorm::new(dim, alpha, radius, 24, degree)?.matrix(&setup.basis);
        for theta_min in [4e-2, 2e-2, 1e-2] {
            let k = base.with_singular(alpha, theta_min, true)?;
            let m = long_range_matrices(&setup.basis, &k, radius, &setup.rotations, 8)?;
            let c = long_range_constants(&m, &g, &mass, &proj)?;
            println!(
                "R {radius} theta_min {theta_min:.0e}: C1 {:.6e} C4 {:.6e} trace I1 {:.6e} trace I2 {:.6e} ({:.1?})",
                c.c1,
                c.c4,
                m.i1.trace(),
                m.i2.trace(),
                t0.elapsed()
            );
        }
    }
    Ok(())
}
