//! Soft potentials: the plain spectral-gap estimate against the coercivity
//! constant for the weight `⟨v⟩^γ`, as the basis degree grows.

use kincoerce::kernels::CollisionKernel;
use kincoerce::quadrature::QuadratureRule;
use kincoerce::spectral::{assemble_form, coercivity_report, FormKind, GalerkinSetup};

fn main() -> kincoerce::Result<()> {
    let mut args = std::env::args().skip(1);
    let dim: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(3);
    let gamma: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(-1.0);
    let degree: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(8);
    let setup = GalerkinSetup::new(dim, degree, QuadratureRule::new(dim));
    let k = match args.next().as_deref() {
        Some("power") => CollisionKernel::power(dim, gamma)?,
        _ => CollisionKernel::truncated(dim, gamma)?,
    };
    let d = assemble_form(FormKind::BoltzmannDirichlet, &setup, &k)?;
    let mass = assemble_form(FormKind::Mass { s: 0.0 }, &setup, &k)?;
    let weighted = assemble_form(FormKind::Mass { s: gamma }, &setup, &k)?;
    let mut plain = vec![];
    let mut weight = vec![];
    for deg in 2..=degree {
        let m = setup.basis.len_up_to(deg);
        let sub = kincoerce::basis::GalerkinBasis::new(dim, deg);
        let cut = |a: &nalgebra::DMatrix<f64>| kincoerce::spectral::leading(a, m);
        plain.push((deg, coercivity_report(&sub, &cut(&d.matrix), &cut(&mass.matrix))?.constant_estimate));
        weight.push((deg, coercivity_report(&sub, &cut(&d.matrix), &cut(&weighted.matrix))?.constant_estimate));
    }
    println!("degree  gap            weighted constant");
    for ((deg, g), (_, w)) in plain.iter().zip(&weight) {
        println!("{deg:>6}  {g:.8e}  {w:.8e}");
    }
    Ok(())
}
