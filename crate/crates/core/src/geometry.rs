//! Small vector helpers. Velocities live in a `Vector3`; in dimension 2 the
//! third component is kept at zero.

use nalgebra::{Matrix3, Vector3};
use rand::Rng;

pub type Point = Vector3<f64>;

/// Surface measure of the unit sphere in `R^n` (n = 1 gives the two-point set).
pub fn sphere_area(n: usize) -> f64 {
    match n {
        1 => 2.0,
        2 => 2.0 * std::f64::consts::PI,
        3 => 4.0 * std::f64::consts::PI,
        _ => 2.0 * std::f64::consts::PI.powf(n as f64 / 2.0) / libm::tgamma(n as f64 / 2.0),
    }
}

/// Japanese bracket `sqrt(1 + |v|^2)`.
pub fn bracket(v: &Point) -> f64 {
    (1.0 + v.norm_squared()).sqrt()
}

pub fn point(dim: usize, coords: &[f64]) -> Point {
    let mut p = Point::zeros();
    for (i, c) in coords.iter().take(dim).enumerate() {
        p[i] = *c;
    }
    p
}

/// Unit vectors completing `k` to an orthonormal frame of `R^dim`.
/// In dimension 2 only the first one is meaningful; the second is zero.
pub fn orthonormal_complement(k: &Point, dim: usize) -> (Point, Point) {
    if dim == 2 {
        return (Point::new(-k[1], k[0], 0.0), Point::zeros());
    }
    let a = if k[0].abs() < 0.6 {
        Point::x()
    } else if k[1].abs() < 0.6 {
        Point::y()
    } else {
        Point::z()
    };
    let t1 = (a - k * k.dot(&a)).normalize();
    let t2 = k.cross(&t1);
    (t1, t2)
}

/// A proper rotation whose first column is the unit vector `w`.
pub fn rotation_from_first_axis(w: &Point, dim: usize) -> Matrix3<f64> {
    let (t1, t2) = orthonormal_complement(w, dim);
    let mut r = Matrix3::zeros();
    r.set_column(0, w);
    r.set_column(1, &t1);
    if dim == 3 {
        r.set_column(2, &t2);
    } else {
        r[(2, 2)] = 1.0;
    }
    r
}

/// Uniformly distributed rotation of `R^dim` (embedded in 3x3).
pub fn random_rotation<R: Rng>(rng: &mut R, dim: usize) -> Matrix3<f64> {
    if dim == 2 {
        let a: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let (s, c) = a.sin_cos();
        return Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0);
    }
    // Unit quaternion from normalized Gaussian-free uniform sampling (Shoemake).
    let u1: f64 = rng.gen();
    let u2: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let u3: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let (a, b) = ((1.0 - u1).sqrt(), u1.sqrt());
    let q = nalgebra::UnitQuaternion::from_quaternion(nalgebra::Quaternion::new(
        b * u3.cos(),
        a * u2.sin(),
        a * u2.cos(),
        b * u3.sin(),
    ));
    *q.to_rotation_matrix().matrix()
}

/// Uniform point on the unit sphere of `R^dim`.
pub fn random_unit<R: Rng>(rng: &mut R, dim: usize) -> Point {
    if dim == 2 {
        let a: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        return Point::new(a.cos(), a.sin(), 0.0);
    }
    let z: f64 = rng.gen_range(-1.0..1.0);
    let a: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let s = (1.0 - z * z).sqrt();
    Point::new(s * a.cos(), s * a.sin(), z)
}

/// Uniform point in the ball of radius `r` in `R^dim`.
pub fn random_in_ball<R: Rng>(rng: &mut R, dim: usize, r: f64) -> Point {
    let u: f64 = rng.gen();
    random_unit(rng, dim) * (r * u.powf(1.0 / dim as f64))
}
