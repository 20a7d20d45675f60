//! Moving between a general Maxwellian (ρ, u, T) and the normalized one:
//! the Dirichlet forms transform by explicit factors.

use kincoerce::geometry::Point;
use kincoerce::kernels::CollisionKernel;
use kincoerce::maxwellian::MaxwellianParams;
use kincoerce::quadrature::QuadratureRule;
use kincoerce::spectral::{rescaling_check, Model};
use kincoerce::test_function::TestFunction;

fn main() -> kincoerce::Result<()> {
    let dim = 3;
    let q = QuadratureRule::new(dim);
    let k = CollisionKernel::power(dim, 1.0)?;
    let h = TestFunction::monomial(dim, [2, 1, 1]);
    let cases = [(2.0, Point::new(0.0, 0.0, 0.0), 0.5), (1.0, Point::new(1.0, -0.5, 0.2), 0.5), (0.7, Point::new(0.3, 0.0, 0.0), 2.0)];
    for (rho, u, t) in cases {
        let p = MaxwellianParams::new(dim, rho, u, t)?;
        for model in [Model::Boltzmann, Model::Landau] {
            let r = rescaling_check(&p, &h, model, &k, &q)?;
            println!("rho {rho}, u {:?}, T {t}, {model:?}: residual {:.2e}", u.as_slice(), r.residual());
            for (name, a, b) in &r.identities {
                println!("    {name}: {a:.10e} vs {b:.10e}");
            }
        }
    }
    Ok(())
}
