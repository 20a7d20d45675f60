//! Geometry behind the non-cutoff estimates: the map ψ_σ, sphere averages of
//! C² functions against their Taylor bound, and the Carleman kernel.

use kincoerce::geometry::{random_in_ball, random_unit, Point};
use kincoerce::kernels::CollisionKernel;
use kincoerce::longrange::{
    carleman_kernel, localized_maxwellian_profile, psi_sigma, radial_hessian_sup, sphere_average_estimate, C2Function, CarlemanOrders,
};
use kincoerce::maxwellian::MaxwellianParams;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> kincoerce::Result<()> {
    let dim = 3;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let v = Point::new(1.0, 0.0, 0.0);
    let vs = Point::new(-1.0, 0.5, 0.0);
    for _ in 0..3 {
        let s = random_unit(&mut rng, dim);
        let psi = psi_sigma(&v, &vs, &s);
        println!("psi {:?}, (psi - v).(v_* - v) = {:.2e}", psi.as_slice(), (psi - v).dot(&(vs - v)));
    }
    let p = MaxwellianParams::normalized(dim);
    let radius = 2.0;
    let f = localized_maxwellian_profile(&p, radius);
    let bound = radial_hessian_sup(&f, radius + 1.0, 1e-2);
    let value = |w: &Point| f(w.norm());
    let phi = C2Function { value: &value, hessian_bound: bound };
    println!("Hessian bound of the localized Maxwellian: {bound:.6}");
    for rho in [1e-2, 1e-1, 0.5] {
        let a = random_in_ball(&mut rng, dim, radius);
        let b = random_in_ball(&mut rng, dim, radius);
        let r = sphere_average_estimate(&phi, &a, &b, rho, dim)?;
        println!("rho {rho}: |I(phi)| {:.4e} <= {:.4e}: {}", r.value.abs(), r.bound, r.holds);
    }
    let k = CollisionKernel::power(dim, 0.5)?.with_singular(1.0, 1e-2, true)?;
    for _ in 0..3 {
        let a = random_in_ball(&mut rng, dim, 0.7);
        let rb = rng.gen_range(0.1..0.7);
        let b = random_in_ball(&mut rng, dim, rb);
        println!("S({:?}, {:?}) = {:.6e}", a.as_slice(), b.as_slice(), carleman_kernel(&a, &b, &k, &p, radius, CarlemanOrders::default())?);
    }
    Ok(())
}
