//! Seeded random streams and the standard random inputs used by tests and the CLI.
//!
//! Every worker derives its own stream from `(seed, index)`, so results never
//! depend on how work is scheduled.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::quaternion::{exp_slice, random_unit_imaginary, Quaternion, UnitImaginary};
use crate::series::QSeries;

pub type Stream = ChaCha8Rng;

/// Sub-stream `index` of the generator seeded with `seed`.
pub fn stream(seed: u64, index: u64) -> Stream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Quaternion with each component uniform in `[-1, 1]`.
pub fn random_quaternion<R: Rng + ?Sized>(rng: &mut R) -> Quaternion {
    Quaternion::new(
        rng.random_range(-1.0..=1.0),
        rng.random_range(-1.0..=1.0),
        rng.random_range(-1.0..=1.0),
        rng.random_range(-1.0..=1.0),
    )
}

/// Series of the given order whose coefficient components are uniform in `[-1, 1]`.
pub fn random_series<R: Rng + ?Sized>(rng: &mut R, order: usize) -> QSeries {
    QSeries::from_fn(order, |_| random_quaternion(rng))
}

/// Like [`random_series`], with every coefficient rescaled to modulus at most `bound`.
pub fn random_series_bounded<R: Rng + ?Sized>(rng: &mut R, order: usize, bound: f64) -> QSeries {
    QSeries::from_fn(order, |_| {
        let q = random_quaternion(rng);
        q * (bound / q.norm().max(1.0))
    })
}

/// Random series with `|a0| >= a0_min` and `|an| <= 1` for `n >= 1`.
pub fn random_invertible_series<R: Rng + ?Sized>(rng: &mut R, order: usize, a0_min: f64) -> QSeries {
    let mut f = random_series_bounded(rng, order, 1.0);
    let a0 = f.coeffs()[0];
    let n = a0.norm();
    let dir = if n > 0.0 { a0 / n } else { Quaternion::ONE };
    let target = a0_min + (1.0 - a0_min).max(0.0) * rng.random::<f64>();
    f.coeffs_mut()[0] = dir * target.max(a0_min);
    f
}

/// Point uniform (by volume) in the closed 4-ball of radius `radius`.
pub fn random_point_in_ball<R: Rng + ?Sized>(rng: &mut R, radius: f64) -> Quaternion {
    let dir = random_direction4(rng);
    let u: f64 = rng.random();
    dir * (radius * u.powf(0.25))
}

/// Point with modulus exactly `radius` and uniform direction.
pub fn random_point_on_sphere<R: Rng + ?Sized>(rng: &mut R, radius: f64) -> Quaternion {
    random_direction4(rng) * radius
}

/// Point `r e^{Iφ}` in the slice of `unit`, with `r` uniform in `[0, radius]`.
pub fn random_slice_point<R: Rng + ?Sized>(rng: &mut R, unit: UnitImaginary, radius: f64) -> Quaternion {
    let r = radius * rng.random::<f64>();
    let phi = rng.random_range(0.0..std::f64::consts::TAU);
    exp_slice(unit, phi) * r
}

fn random_direction4<R: Rng + ?Sized>(rng: &mut R) -> Quaternion {
    loop {
        let q = Quaternion::new(
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        );
        let n = q.norm();
        if n > 1e-12 {
            return q / n;
        }
    }
}

/// A unit imaginary orthogonal to `unit`, drawn uniformly from the great circle.
pub fn random_orthogonal_unit<R: Rng + ?Sized>(rng: &mut R, unit: UnitImaginary) -> UnitImaginary {
    let i = unit.get();
    loop {
        let v = random_unit_imaginary(rng).get();
        let proj = v - i * v.im_dot(i);
        if proj.norm() > 1e-6 {
            if let Ok(u) = UnitImaginary::from_vector(proj.x1, proj.x2, proj.x3) {
                return u;
            }
        }
    }
}
