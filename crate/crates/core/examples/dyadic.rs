//! Dyadic shell decomposition of the Dirichlet forms for a soft potential:
//! shell and ball contributions, telescoping and the weighted lower bound.

use kincoerce::boltzmann::dyadic_matrices_b;
use kincoerce::kernels::CollisionKernel;
use kincoerce::landau::dyadic_matrices_l;
use kincoerce::quadrature::QuadratureRule;
use kincoerce::spectral::{assemble_form, FormKind, GalerkinSetup};
use nalgebra::DVector;

fn main() -> kincoerce::Result<()> {
    let mut args = std::env::args().skip(1);
    let dim: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(3);
    let gamma: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(-1.0);
    let ratio: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(2.0);
    let setup = GalerkinSetup::new(dim, 4, QuadratureRule::new(dim));
    let k = CollisionKernel::truncated(dim, gamma)?;
    let c = DVector::from_fn(setup.basis.len(), |i, _| 1.0 / (1.0 + i as f64));
    for (name, form) in [("Boltzmann", FormKind::BoltzmannDirichlet), ("Landau", FormKind::LandauDirichlet)] {
        let mats = match form {
            FormKind::BoltzmannDirichlet => dyadic_matrices_b(&setup.basis, ratio, 6, &k, &setup.rotations)?,
            _ => dyadic_matrices_l(&setup.basis, ratio, 6, &k, &setup.rotations)?,
        };
        let d = assemble_form(form, &setup, &k)?.matrix;
        let dec = mats.decompose(&c)?;
        println!("{name}: D(h) = {:.8e}", c.dot(&(&d * &c)));
        println!("  n   shell term     ball term      nodes  shell mass");
        for n in 0..dec.terms_tilde.len() {
            println!("{n:>3}  {:.6e}  {:.6e}  {:>5}  {:.4e}", dec.terms_tilde[n], dec.terms_cumulative[n], mats.shell_nodes[n], mats.shell_mass[n]);
        }
        let (l, r) = dec.exchange_sides();
        println!("  telescoping residual {:.2e}, S {:.12} (closed form {:.12})", dec.telescoping_residual(), dec.s, dec.s_closed_form());
        println!("  weighted sum {:.6e}, exchanged sides {l:.6e} / {r:.6e}, tail bound {:.2e}", dec.weighted_sum(), dec.tail_bound());
    }
    Ok(())
}
