//! Norms of the gain operators restricted to relative speeds above `R`, for
//! Maxwell molecules, on a Hermite basis.

use kincoerce::boltzmann::tail_gain_matrix_b;
use kincoerce::landau::tail_gain_matrix_l;
use kincoerce::pair::RotationSet;
use kincoerce::basis::GalerkinBasis;
use kincoerce::quadrature::SphereRule;
use kincoerce::spectral::{operator_norm_estimate, MatrixOperator};

fn main() -> kincoerce::Result<()> {
    let dim: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    let degree: usize = std::env::args().nth(2).and_then(|s| s.parse().ok()).unwrap_or(6);
    let basis = GalerkinBasis::new(dim, degree);
    let rot = RotationSet::new(&basis, &SphereRule::exact_to(dim, 2 * degree));
    println!("{:>6}  {:>16}  {:>16}", "R", "Boltzmann", "Landau");
    for radius in [0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0] {
        let kb = tail_gain_matrix_b(&basis, radius, &rot, 2 * degree)?;
        let kl = tail_gain_matrix_l(&basis, radius, &rot, 2 * degree)?;
        let nb = operator_norm_estimate(&MatrixOperator(kb), basis.len())?;
        let nl = operator_norm_estimate(&MatrixOperator(kl), basis.len())?;
        println!("{radius:>6.1}  {nb:>16.8e}  {nl:>16.8e}");
    }
    Ok(())
}
