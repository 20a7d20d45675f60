//! Spectral gap of the linearized Boltzmann operator for Maxwell molecules in
//! three dimensions, with its convergence in the basis degree.

use kincoerce::kernels::CollisionKernel;
use kincoerce::quadrature::QuadratureRule;
use kincoerce::spectral::{assemble_form, coercivity_report, FormKind, GalerkinSetup};
use std::time::Instant;

fn main() -> kincoerce::Result<()> {
    let degree: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(8);
    let t0 = Instant::now();
    let setup = GalerkinSetup::new(3, degree, QuadratureRule::new(3));
    let k = CollisionKernel::maxwell(3);
    let d = assemble_form(FormKind::BoltzmannDirichlet, &setup, &k)?;
    let mass = assemble_form(FormKind::Mass { s: 0.0 }, &setup, &k)?;
    let report = coercivity_report(&setup.basis, &d.matrix, &mass.matrix)?;
    println!("basis size {} assembled in {:.1?}", setup.basis.len(), t0.elapsed());
    for (deg, gap) in &report.convergence {
        println!("degree {deg}: gap {gap:.10}");
    }
    println!("lowest eigenvalues: {:?}", &report.eigenvalues[..6.min(report.eigenvalues.len())]);
    Ok(())
}
