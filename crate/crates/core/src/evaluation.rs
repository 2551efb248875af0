//! Evaluating series at quaternionic points, the conjugation map `T_f`, the
//! pointwise formulas for regular products and quotients, and the splitting of
//! a slice restriction into two `C_I`-valued holomorphic parts.

use crate::error::{Error, Result};
use crate::quaternion::{Quaternion, UnitImaginary};
use crate::series::{QSeries, TailBound};

/// Guard for evaluations that must stay away from zero sets.
pub const EVAL_FLOOR: f64 = 1e-9;

/// Below this modulus `f(q)` is treated as zero by [`pointwise_star_eval`].
pub const ZERO_FLOOR: f64 = 1e-12;

/// `f(q) = Σ qⁿ aₙ`.
///
/// Horner accumulation from the top coefficient down, `r ← aₙ + q·r`. Powers
/// of `q` only ever multiply from the left, so the order is load-bearing.
pub fn eval(f: &QSeries, q: Quaternion) -> Quaternion {
    horner(f.coeffs().iter().copied(), q)
}

/// `f^c(q)` without materializing the conjugate series.
pub fn eval_conjugate(f: &QSeries, q: Quaternion) -> Quaternion {
    horner(f.coeffs().iter().map(|c| c.conj()), q)
}

fn horner(coeffs: impl DoubleEndedIterator<Item = Quaternion>, q: Quaternion) -> Quaternion {
    coeffs.rev().fold(Quaternion::ZERO, |r, a| a + q * r)
}

/// `p⁻¹ q p`, computed as `conj(p) q p / |p|²`.
fn conjugate_by(p: Quaternion, q: Quaternion) -> Quaternion {
    let n = p.norm();
    (p.conj() / n) * q * (p / n)
}

/// `T_f(q) = f^c(q)⁻¹ q f^c(q)`.
pub fn t_map(f: &QSeries, q: Quaternion) -> Result<Quaternion> {
    t_map_with_floor(f, q, EVAL_FLOOR)
}

pub fn t_map_with_floor(f: &QSeries, q: Quaternion, floor: f64) -> Result<Quaternion> {
    let p = eval_conjugate(f, q);
    let modulus = p.norm();
    if !(modulus > floor) {
        return Err(Error::EvalNearZeroSet { modulus, floor });
    }
    Ok(conjugate_by(p, q))
}

/// `(f⋆g)(q) = f(q) g(f(q)⁻¹ q f(q))`, and `0` where `f(q)` vanishes.
pub fn pointwise_star_eval(f: &QSeries, g: &QSeries, q: Quaternion) -> Quaternion {
    let fq = eval(f, q);
    if fq.norm() <= ZERO_FLOOR {
        return Quaternion::ZERO;
    }
    fq * eval(g, conjugate_by(fq, q))
}

/// `(f^{-⋆}⋆g)(q) = f(T_f(q))⁻¹ g(T_f(q))`.
pub fn quotient_eval(f: &QSeries, g: &QSeries, q: Quaternion) -> Result<Quaternion> {
    quotient_eval_with_floor(f, g, q, EVAL_FLOOR)
}

pub fn quotient_eval_with_floor(f: &QSeries, g: &QSeries, q: Quaternion, floor: f64) -> Result<Quaternion> {
    let t = t_map_with_floor(f, q, floor)?;
    let ft = eval(f, t);
    let modulus = ft.norm();
    if !(modulus > floor) {
        return Err(Error::EvalNearZeroSet { modulus, floor });
    }
    Ok(ft.inv_with_floor(floor)? * eval(g, t))
}

/// Coefficients of `f_I = F + G J`, with `F`, `G` valued in `C_I`.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitPair {
    pub unit_i: UnitImaginary,
    pub unit_j: UnitImaginary,
    pub f_coeffs: Vec<Quaternion>,
    pub g_coeffs: Vec<Quaternion>,
}

impl SplitPair {
    /// `F(z)` for `z` in `C_I`.
    pub fn eval_f(&self, z: Quaternion) -> Quaternion {
        horner(self.f_coeffs.iter().copied(), z)
    }

    /// `G(z)` for `z` in `C_I`.
    pub fn eval_g(&self, z: Quaternion) -> Quaternion {
        horner(self.g_coeffs.iter().copied(), z)
    }

    /// `F(z) + G(z) J`.
    pub fn eval(&self, z: Quaternion) -> Quaternion {
        self.eval_f(z) + self.eval_g(z) * self.unit_j.get()
    }

    /// `αₙ + βₙ J`, which should give back `aₙ`.
    pub fn coefficient(&self, n: usize) -> Quaternion {
        self.f_coeffs[n] + self.g_coeffs[n] * self.unit_j.get()
    }
}

/// Splits every coefficient in the basis `{1, I, J, IJ}` as
/// `aₙ = (c0 + c1 I) + (c2 + c3 I) J`.
pub fn split(f: &QSeries, unit_i: UnitImaginary, unit_j: UnitImaginary) -> Result<SplitPair> {
    let (i, j) = (unit_i.get(), unit_j.get());
    let inner = i.im_dot(j);
    if inner.abs() > 1e-10 {
        return Err(Error::NotOrthogonal { inner });
    }
    let ij = i * j;
    let mut f_coeffs = Vec::with_capacity(f.order() + 1);
    let mut g_coeffs = Vec::with_capacity(f.order() + 1);
    for &a in f.coeffs() {
        let c0 = a.re();
        let c1 = a.im_dot(i);
        let c2 = a.im_dot(j);
        let c3 = a.im_dot(ij);
        f_coeffs.push(Quaternion::real(c0) + i * c1);
        g_coeffs.push(Quaternion::real(c2) + i * c3);
    }
    Ok(SplitPair {
        unit_i,
        unit_j,
        f_coeffs,
        g_coeffs,
    })
}

/// `M r^{N+1} / (1 - r)`.
pub fn tail_bound(coeff_bound: f64, order: usize, r: f64) -> Result<f64> {
    TailBound::new(coeff_bound, order).value_at(r)
}

/// Coefficient bound `(N+1) M_f M_g` for the ⋆-product of two bounded series.
pub fn product_coeff_bound(f: &QSeries, g: &QSeries) -> f64 {
    let n = f.order().min(g.order()) + 1;
    n as f64 * f.max_coeff_norm() * g.max_coeff_norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quaternion::exp_slice;
    use crate::sampling::{random_point_in_ball, random_series, random_slice_point, stream};

    fn series(c: &[Quaternion]) -> QSeries {
        QSeries::new(c.to_vec()).unwrap()
    }

    // Direct sum Σ qⁿ aₙ with explicit powers.
    fn eval_oracle(f: &QSeries, q: Quaternion) -> Quaternion {
        let mut acc = Quaternion::ZERO;
        let mut power = Quaternion::ONE;
        for &a in f.coeffs() {
            acc += power * a;
            power = power * q;
        }
        acc
    }

    #[test]
    fn eval_basics() {
        let f = series(&[Quaternion::ONE, Quaternion::I]);
        assert_eq!(eval(&f, Quaternion::J), Quaternion::new(1.0, 0.0, 0.0, -1.0));
        let mut rng = stream(20, 0);
        for _ in 0..20 {
            let g = random_series(&mut rng, 10);
            assert_eq!(eval(&g, Quaternion::ZERO), g.coeffs()[0]);
            let q = random_point_in_ball(&mut rng, 0.9);
            assert!((eval(&g, q) - eval_oracle(&g, q)).norm() < 1e-13);
        }
    }

    #[test]
    fn t_map_fixes_real_points_and_real_series() {
        let mut rng = stream(21, 0);
        let f = random_series(&mut rng, 8);
        let x = Quaternion::real(0.4);
        assert!((t_map(&f, x).unwrap() - x).norm() < 1e-15);
        let real = QSeries::from_fn(8, |n| Quaternion::real(1.0 / (n as f64 + 1.0)));
        let q = Quaternion::new(0.1, 0.3, -0.2, 0.4);
        assert!((t_map(&real, q).unwrap() - q).norm() < 1e-15);
    }

    #[test]
    fn t_map_geometry() {
        let mut rng = stream(22, 0);
        for _ in 0..100 {
            let f = random_series(&mut rng, 12);
            let q = crate::sampling::random_point_on_sphere(&mut rng, 0.7);
            let Ok(t) = t_map(&f, q) else { continue };
            assert!((t.norm() - 0.7).abs() <= 1e-12);
            assert!((t.re() - q.re()).abs() <= 1e-12);
        }
    }

    #[test]
    fn t_map_guard() {
        let f = series(&[Quaternion::real(-0.5), Quaternion::ONE]);
        assert!(matches!(
            t_map(&f, Quaternion::real(0.5)),
            Err(Error::EvalNearZeroSet { .. })
        ));
    }

    #[test]
    fn pointwise_product_cases() {
        let mut rng = stream(23, 0);
        let g = random_series(&mut rng, 6);
        let q = Quaternion::new(0.2, -0.1, 0.3, 0.05);
        assert_eq!(pointwise_star_eval(&QSeries::one(6), &g, q), eval(&g, q));
        // f(q) = q - 0.3 vanishes at 0.3
        let f = series(&[Quaternion::real(-0.3), Quaternion::ONE]);
        assert_eq!(pointwise_star_eval(&f, &g, Quaternion::real(0.3)), Quaternion::ZERO);

        for _ in 0..50 {
            let f = random_series(&mut rng, 32);
            let g = random_series(&mut rng, 32);
            let q = random_point_in_ball(&mut rng, 0.5);
            let tol = tail_bound(product_coeff_bound(&f, &g), 32, q.norm()).unwrap() + 1e-12;
            let diff = (eval(&f.star(&g), q) - pointwise_star_eval(&f, &g, q)).norm();
            assert!(diff <= tol, "{diff} > {tol}");
        }
    }

    #[test]
    fn quotient_cases() {
        let mut rng = stream(24, 0);
        let q = Quaternion::new(0.1, 0.2, -0.3, 0.1);
        let f = QSeries::from_fn(8, |n| {
            if n == 0 {
                Quaternion::real(2.0)
            } else {
                random_series(&mut rng, 0).coeffs()[0] * 0.1
            }
        });
        assert!((quotient_eval(&f, &f, q).unwrap() - Quaternion::ONE).norm() < 1e-14);

        let c = Quaternion::new(1.0, 2.0, -1.0, 0.5);
        let g = random_series(&mut rng, 8);
        // constant c: Σ qⁿ c⁻¹ gₙ = c⁻¹ g(c q c⁻¹), which is c⁻¹ g(q) only for real c
        let got = quotient_eval(&QSeries::constant(c, 8), &g, q).unwrap();
        let rotated = c * q * c.inv().unwrap();
        assert!((got - c.inv().unwrap() * eval(&g, rotated)).norm() < 1e-14);
        let via_series = eval(&QSeries::constant(c, 8).regular_reciprocal().unwrap().star(&g), q);
        assert!((got - via_series).norm() < 1e-14);
        let real = Quaternion::real(-2.5);
        let got = quotient_eval(&QSeries::constant(real, 8), &g, q).unwrap();
        assert!((got - real.inv().unwrap() * eval(&g, q)).norm() < 1e-14);

        for _ in 0..50 {
            let mut f = crate::sampling::random_series_bounded(&mut rng, 32, 0.25 / 32.0);
            f.coeffs_mut()[0] = Quaternion::real(1.0) + f.coeffs()[0];
            let g = random_series(&mut rng, 32);
            let q = random_point_in_ball(&mut rng, 0.5);
            let series_val = eval(&f.regular_reciprocal().unwrap().star(&g), q);
            let formula = quotient_eval(&f, &g, q).unwrap();
            // reciprocal coefficients decay geometrically, so the truncation error at |q| <= 0.5 is negligible
            assert!(
                (series_val - formula).norm() < 1e-9,
                "{}",
                (series_val - formula).norm()
            );
        }
    }

    #[test]
    fn split_basis_readout_and_real_series() {
        let f = series(&[Quaternion::J]);
        let s = split(&f, UnitImaginary::I, UnitImaginary::J).unwrap();
        assert_eq!(s.f_coeffs[0], Quaternion::ZERO);
        assert_eq!(s.g_coeffs[0], Quaternion::ONE);

        let real = series(&[Quaternion::real(1.0), Quaternion::real(-2.0)]);
        let s = split(&real, UnitImaginary::K, UnitImaginary::I).unwrap();
        assert!(s.g_coeffs.iter().all(|c| *c == Quaternion::ZERO));
        assert_eq!(s.f_coeffs, real.coeffs());

        assert!(matches!(
            split(&real, UnitImaginary::I, UnitImaginary::I),
            Err(Error::NotOrthogonal { .. })
        ));
    }

    #[test]
    fn split_reconstruction() {
        let mut rng = stream(25, 0);
        for _ in 0..10 {
            let f = random_series(&mut rng, 16);
            let unit = crate::quaternion::random_unit_imaginary(&mut rng);
            let j = crate::sampling::random_orthogonal_unit(&mut rng, unit);
            let s = split(&f, unit, j).unwrap();
            for n in 0..=16 {
                assert!((s.coefficient(n) - f.coeffs()[n]).norm() <= 1e-13);
            }
            for _ in 0..20 {
                let z = random_slice_point(&mut rng, unit, 0.99);
                assert!((s.eval(z) - eval(&f, z)).norm() <= 1e-12);
            }
            // F and G take values in C_I
            let z = exp_slice(unit, 0.3) * 0.5;
            for v in [s.eval_f(z), s.eval_g(z)] {
                let off_plane = v.im() - unit.get() * v.im_dot(unit.get());
                assert!(off_plane.norm() < 1e-14);
            }
        }
    }
}
