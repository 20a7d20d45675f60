//! Grad's splitting of the cutoff Boltzmann form into the collision-frequency
//! part and the gain part, for random polynomial test functions.

use kincoerce::basis::GalerkinBasis;
use kincoerce::boltzmann::split_check_b;
use kincoerce::kernels::CollisionKernel;
use kincoerce::maxwellian::MaxwellianParams;
use kincoerce::quadrature::QuadratureRule;
use kincoerce::test_function::TestFunction;
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

fn main() -> kincoerce::Result<()> {
    let dim = 3;
    let p = MaxwellianParams::normalized(dim);
    let q = QuadratureRule::new(dim);
    let basis = Arc::new(GalerkinBasis::new(dim, 3));
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for gamma in [0.0, 1.0] {
        let k = CollisionKernel::power(dim, gamma)?;
        for i in 0..3 {
            let c = DVector::from_fn(basis.len(), |_, _| rng.gen_range(-1.0..1.0));
            let h = TestFunction::galerkin(basis.clone(), c, format!("h{i}"));
            let s = split_check_b(&h, &k, &p, &q)?;
            println!("gamma {gamma}: D {:.10e} = <Ah,h> {:.10e} - <Kh,h> {:.10e}, residual {:.2e}", s.dirichlet, s.loss, s.gain, s.residual());
        }
    }
    Ok(())
}
