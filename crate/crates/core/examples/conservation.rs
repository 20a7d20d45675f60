//! Elastic collisions in the σ-representation: momentum and energy defects
//! over random pre-collision velocities.

use kincoerce::boltzmann::post_collision;
use kincoerce::geometry::{random_in_ball, random_unit};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let samples: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(100_000);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for dim in [2, 3] {
        let (mut mom, mut en) = (0.0f64, 0.0f64);
        for _ in 0..samples {
            let v = random_in_ball(&mut rng, dim, 10.0);
            let vs = random_in_ball(&mut rng, dim, 10.0);
            let st = post_collision(&v, &vs, &random_unit(&mut rng, dim));
            mom = mom.max(st.momentum_defect().amax());
            en = en.max(st.energy_defect());
        }
        println!("N = {dim}: max momentum defect {mom:.3e}, max relative energy defect {en:.3e}");
    }
}
