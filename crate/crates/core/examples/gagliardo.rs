//! Gagliardo seminorm of a test function on growing balls, and the effect of
//! the fractional order.

use kincoerce::longrange::{gagliardo_seminorm, local_sobolev_curve};
use kincoerce::test_function::TestFunction;

fn main() -> kincoerce::Result<()> {
    let dim: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2);
    let h = TestFunction::monomial(dim, [1, 1, 0]);
    for alpha in [0.5, 1.0, 1.5] {
        println!("alpha {alpha}: [h]^2 on B_1 = {:.6e}", gagliardo_seminorm(&h, alpha, 1.0, 24)?);
    }
    for (r, v) in local_sobolev_curve(&h, 1.0, &[0.5, 1.0, 2.0, 3.0], 24)? {
        println!("R {r}: {v:.6e}");
    }
    Ok(())
}
