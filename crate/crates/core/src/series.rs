//! Truncated quaternionic power series `f(q) = Σ qⁿ aₙ` (coefficients on the right)
//! and their regular (⋆) calculus.
//!
//! A series of order `N` stands for `f` modulo `q^{N+1}`. Binary operations
//! truncate to the smaller of the two orders; callers pad with zeros to raise it.

use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quaternion::Quaternion;

/// `|a0|` must exceed this for the regular reciprocal to exist.
pub const RECIPROCAL_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSeries", into = "RawSeries")]
pub struct QSeries {
    coeffs: Vec<Quaternion>,
}

#[derive(Serialize, Deserialize)]
struct RawSeries {
    order: usize,
    coeffs: Vec<Quaternion>,
}

impl TryFrom<RawSeries> for QSeries {
    type Error = Error;

    fn try_from(raw: RawSeries) -> Result<Self> {
        if raw.coeffs.len() != raw.order + 1 {
            return Err(Error::InvalidSeries(format!(
                "field `coeffs`: order {} requires {} coefficients, found {}",
                raw.order,
                raw.order + 1,
                raw.coeffs.len()
            )));
        }
        QSeries::new(raw.coeffs)
    }
}

impl From<QSeries> for RawSeries {
    fn from(f: QSeries) -> Self {
        RawSeries {
            order: f.order(),
            coeffs: f.coeffs,
        }
    }
}

impl QSeries {
    /// Builds a series from `a0..aN`; the list must be non-empty and finite.
    pub fn new(coeffs: Vec<Quaternion>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidSeries("empty coefficient list".into()));
        }
        if let Some(n) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(Error::InvalidSeries(format!("non-finite coefficient at degree {n}")));
        }
        Ok(QSeries { coeffs })
    }

    pub fn from_fn(order: usize, f: impl FnMut(usize) -> Quaternion) -> Self {
        QSeries {
            coeffs: (0..=order).map(f).collect(),
        }
    }

    pub fn zero(order: usize) -> Self {
        QSeries::from_fn(order, |_| Quaternion::ZERO)
    }

    pub fn constant(c: Quaternion, order: usize) -> Self {
        QSeries::from_fn(order, |n| if n == 0 { c } else { Quaternion::ZERO })
    }

    pub fn one(order: usize) -> Self {
        QSeries::constant(Quaternion::ONE, order)
    }

    /// `qⁿ c` padded to `order` (the zero series when `n > order`).
    pub fn monomial(n: usize, c: Quaternion, order: usize) -> Self {
        QSeries::from_fn(order, |m| if m == n { c } else { Quaternion::ZERO })
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Quaternion] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Quaternion] {
        &mut self.coeffs
    }

    /// Coefficient of `qⁿ`, zero beyond the order.
    pub fn coeff(&self, n: usize) -> Quaternion {
        self.coeffs.get(n).copied().unwrap_or(Quaternion::ZERO)
    }

    pub fn truncate(&self, order: usize) -> QSeries {
        QSeries::from_fn(order, |n| self.coeff(n))
    }

    /// Same series with zero coefficients appended up to `order`; never shortens.
    pub fn pad_to(&self, order: usize) -> QSeries {
        self.truncate(order.max(self.order()))
    }

    pub fn max_coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Regular product: `cₙ = Σ_{k=0}^{n} aₖ b_{n-k}`, with `f`'s coefficient on the left.
    pub fn star(&self, g: &QSeries) -> QSeries {
        let order = self.order().min(g.order());
        let (a, b) = (&self.coeffs, &g.coeffs);
        QSeries::from_fn(order, |n| {
            let mut c = Quaternion::ZERO;
            for k in 0..=n {
                c += a[k] * b[n - k];
            }
            c
        })
    }

    /// `f^c(q) = Σ qⁿ conj(aₙ)`.
    pub fn regular_conjugate(&self) -> QSeries {
        QSeries {
            coeffs: self.coeffs.iter().map(|c| c.conj()).collect(),
        }
    }

    /// `f^s = f ⋆ f^c`; every coefficient is real up to rounding.
    pub fn symmetrization(&self) -> QSeries {
        self.star(&self.regular_conjugate())
    }

    /// `f^{-⋆} = (f^s)^{-1} f^c`, with the default floor on `|a0|`.
    pub fn regular_reciprocal(&self) -> Result<QSeries> {
        self.regular_reciprocal_with_floor(RECIPROCAL_FLOOR)
    }

    pub fn regular_reciprocal_with_floor(&self, floor: f64) -> Result<QSeries> {
        let modulus = self.coeffs[0].norm();
        if !(modulus > floor) {
            return Err(Error::NonInvertibleAtOrigin { modulus, floor });
        }
        let sym = self.symmetrization();
        let s = real_coefficients(&sym, self)?;
        let order = self.order();

        let mut b = vec![0.0; order + 1];
        b[0] = 1.0 / s[0];
        for n in 1..=order {
            let acc: f64 = (1..=n).map(|k| s[k] * b[n - k]).sum();
            b[n] = -acc / s[0];
        }

        // b has real coefficients, so the ⋆-product with f^c is a plain convolution
        let fc = self.regular_conjugate();
        Ok(QSeries::from_fn(order, |n| {
            let mut c = Quaternion::ZERO;
            for k in 0..=n {
                c += fc.coeffs[n - k] * b[k];
            }
            c
        }))
    }

    /// n-th slice derivative: `a_m ← (m+n)!/m! · a_{m+n}`, order reduced by `n`.
    pub fn slice_derivative(&self, n: usize) -> Result<QSeries> {
        if n > self.order() {
            return Err(Error::InvalidSeries(format!(
                "derivative of order {n} exceeds series order {}",
                self.order()
            )));
        }
        Ok(QSeries::from_fn(self.order() - n, |m| {
            self.coeffs[m + n] * falling_factorial(m + n, n)
        }))
    }

    /// `φ(q) = Σ q^m a_{m n0}`, of order `floor(N / n0)`.
    pub fn subseries(&self, n0: usize) -> QSeries {
        assert!(n0 >= 1, "subseries step must be at least 1");
        QSeries::from_fn(self.order() / n0, |m| self.coeffs[m * n0])
    }

    /// `h(q) = φ(q^{n0})`, of order `n0 · N`.
    pub fn compose_power(&self, n0: usize) -> QSeries {
        assert!(n0 >= 1, "power must be at least 1");
        QSeries::from_fn(self.order() * n0, |n| {
            if n % n0 == 0 {
                self.coeffs[n / n0]
            } else {
                Quaternion::ZERO
            }
        })
    }

    /// Multiplies each coefficient on the right by `c`, i.e. the series of `f(q) c`.
    pub fn scale_right(&self, c: Quaternion) -> QSeries {
        QSeries {
            coeffs: self.coeffs.iter().map(|a| *a * c).collect(),
        }
    }

    pub fn scale_real(&self, t: f64) -> QSeries {
        QSeries {
            coeffs: self.coeffs.iter().map(|a| *a * t).collect(),
        }
    }

    fn zip_with(&self, g: &QSeries, op: impl Fn(Quaternion, Quaternion) -> Quaternion) -> QSeries {
        let order = self.order().min(g.order());
        QSeries::from_fn(order, |n| op(self.coeffs[n], g.coeffs[n]))
    }
}

pub fn star_mul(f: &QSeries, g: &QSeries) -> QSeries {
    f.star(g)
}

/// Max coefficient modulus of `(f⋆g)' - (f'⋆g + f⋆g')`.
pub fn leibniz_residual(f: &QSeries, g: &QSeries) -> f64 {
    let order = f.order().min(g.order());
    if order == 0 {
        return 0.0;
    }
    let (f, g) = (f.truncate(order), g.truncate(order));
    let lhs = f.star(&g).slice_derivative(1).expect("order >= 1");
    let df = f.slice_derivative(1).expect("order >= 1");
    let dg = g.slice_derivative(1).expect("order >= 1");
    let rhs = &df.star(&g) + &f.star(&dg);
    (&lhs - &rhs).max_coeff_norm()
}

/// `k!/(k-n)!` as a float.
pub fn falling_factorial(k: usize, n: usize) -> f64 {
    (k + 1 - n..=k).fold(1.0, |acc, j| acc * j as f64)
}

fn real_coefficients(sym: &QSeries, f: &QSeries) -> Result<Vec<f64>> {
    sym.coeffs
        .iter()
        .enumerate()
        .map(|(n, c)| {
            let scale: f64 = (0..=n).map(|k| f.coeffs[k].norm() * f.coeffs[n - k].norm()).sum();
            let imag = c.im_norm();
            if imag > 1e-10 * scale.max(f64::MIN_POSITIVE) {
                Err(Error::NonRealSymmetrization { degree: n, imag })
            } else {
                Ok(c.re())
            }
        })
        .collect()
}

impl Add for &QSeries {
    type Output = QSeries;
    fn add(self, g: &QSeries) -> QSeries {
        self.zip_with(g, |a, b| a + b)
    }
}

impl Sub for &QSeries {
    type Output = QSeries;
    fn sub(self, g: &QSeries) -> QSeries {
        self.zip_with(g, |a, b| a - b)
    }
}

impl Neg for &QSeries {
    type Output = QSeries;
    fn neg(self) -> QSeries {
        self.scale_real(-1.0)
    }
}

/// Geometric bound `M r^{N+1} / (1 - r)` on the discarded tail `Σ_{n>N} |aₙ| rⁿ`
/// of a series whose coefficients satisfy `|aₙ| <= M`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailBound {
    pub coeff_bound: f64,
    pub order: usize,
}

impl TailBound {
    pub fn new(coeff_bound: f64, order: usize) -> Self {
        TailBound { coeff_bound, order }
    }

    /// No tail: the series is an exact polynomial.
    pub fn none(order: usize) -> Self {
        TailBound::new(0.0, order)
    }

    pub fn value_at(&self, r: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&r) {
            return Err(Error::RadiusOutOfRange { radius: r });
        }
        if self.coeff_bound == 0.0 {
            return Ok(0.0);
        }
        Ok(self.coeff_bound * r.powi(self.order as i32 + 1) / (1.0 - r))
    }

    /// Bound on the tail of the n-th derivative, `Σ_{m>N} m!/(m-n)! M r^{m-n}`.
    pub fn derivative_value_at(&self, n: usize, r: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&r) {
            return Err(Error::RadiusOutOfRange { radius: r });
        }
        if self.coeff_bound == 0.0 {
            return Ok(0.0);
        }
        let mut total = 0.0;
        let mut m = self.order + 1;
        loop {
            let term = falling_factorial(m, n) * r.powi((m - n) as i32);
            total += term;
            // terms decay geometrically once m is past n / (1 - r)
            if term <= 1e-17 * total && (m as f64) > n as f64 / (1.0 - r) {
                break;
            }
            if m > self.order + 100_000 {
                break;
            }
            m += 1;
        }
        Ok(self.coeff_bound * total)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quaternion::{exp_slice, UnitImaginary};
    use crate::sampling::{random_invertible_series, random_series, stream};

    fn q(x0: f64, x1: f64, x2: f64, x3: f64) -> Quaternion {
        Quaternion::new(x0, x1, x2, x3)
    }

    fn series(c: &[Quaternion]) -> QSeries {
        QSeries::new(c.to_vec()).unwrap()
    }

    fn max_diff(a: &QSeries, b: &QSeries) -> f64 {
        assert_eq!(a.order(), b.order());
        (a - b).max_coeff_norm()
    }

    // Brute-force double loop over all index pairs, kept apart from `star`.
    fn convolution_oracle(f: &QSeries, g: &QSeries) -> QSeries {
        let order = f.order().min(g.order());
        let mut out = vec![Quaternion::ZERO; order + 1];
        for (i, a) in f.coeffs().iter().enumerate() {
            for (j, b) in g.coeffs().iter().enumerate() {
                if i + j <= order {
                    out[i + j] += *a * *b;
                }
            }
        }
        QSeries::new(out).unwrap()
    }

    #[test]
    fn star_worked_pair() {
        let f = series(&[Quaternion::ONE, Quaternion::I]);
        let g = series(&[Quaternion::ONE, Quaternion::J]);
        let h = f.pad_to(2).star(&g.pad_to(2));
        assert_eq!(h.coeffs(), &[Quaternion::ONE, q(0.0, 1.0, 1.0, 0.0), Quaternion::K]);
        assert_eq!(h, convolution_oracle(&f.pad_to(2), &g.pad_to(2)));
        // reversed order gives -k at degree two
        assert_eq!(g.pad_to(2).star(&f.pad_to(2)).coeff(2), -Quaternion::K);
    }

    #[test]
    fn star_unit_and_truncation() {
        let mut rng = stream(1, 0);
        let f = random_series(&mut rng, 8);
        assert_eq!(f.star(&QSeries::one(8)), f);
        assert_eq!(f.star(&QSeries::one(3)).order(), 3);
    }

    #[test]
    fn geometric_series_telescopes() {
        let e = exp_slice(UnitImaginary::I, 0.7);
        let n = 20;
        let left = &QSeries::one(n) - &QSeries::monomial(1, e, n);
        let geo = QSeries::from_fn(n, |m| e.powi(m as u32));
        let prod = convolution_oracle(&left, &geo);
        assert!(max_diff(&prod, &QSeries::one(n)) < 1e-14);
        assert!(max_diff(&left.star(&geo), &QSeries::one(n)) < 1e-14);
    }

    #[test]
    fn conjugate_and_symmetrization() {
        let f = series(&[Quaternion::ONE, Quaternion::I]);
        assert_eq!(f.regular_conjugate().coeffs(), &[Quaternion::ONE, -Quaternion::I]);
        let real = series(&[Quaternion::real(2.0), Quaternion::real(-1.0)]);
        assert_eq!(real.regular_conjugate(), real);
        assert_eq!(real.symmetrization(), real.star(&real));

        let s = f.pad_to(2).symmetrization();
        assert_eq!(s.coeffs(), &[Quaternion::ONE, Quaternion::ZERO, Quaternion::ONE]);

        let theta = 1.1;
        let unit = UnitImaginary::from_vector(1.0, 2.0, -2.0).unwrap();
        let g = &QSeries::one(2) - &QSeries::monomial(1, exp_slice(unit, theta), 2);
        let expected = series(&[Quaternion::ONE, Quaternion::real(-2.0 * theta.cos()), Quaternion::ONE]);
        let s = g.symmetrization();
        assert!(max_diff(&s, &expected) < 1e-15);
        assert!(max_diff(&s, &convolution_oracle(&g, &g.regular_conjugate())) < 1e-15);
    }

    #[test]
    fn conjugate_reverses_products() {
        let mut rng = stream(2, 0);
        for _ in 0..20 {
            let f = random_series(&mut rng, 12);
            let g = random_series(&mut rng, 12);
            let lhs = f.star(&g).regular_conjugate();
            let rhs = convolution_oracle(&g.regular_conjugate(), &f.regular_conjugate());
            assert!(max_diff(&lhs, &rhs) < 1e-12);
        }
    }

    #[test]
    fn reciprocal_of_linear_factor() {
        let e = exp_slice(UnitImaginary::K, -0.4);
        let n = 24;
        let f = &QSeries::one(n) - &QSeries::monomial(1, e, n);
        let r = f.regular_reciprocal().unwrap();
        let geo = QSeries::from_fn(n, |m| e.powi(m as u32));
        assert!(max_diff(&r, &geo) < 1e-12);
        assert!(max_diff(&convolution_oracle(&f, &r), &QSeries::one(n)) < 1e-12);
    }

    #[test]
    fn reciprocal_of_constant_and_errors() {
        let c = q(1.0, -2.0, 0.5, 3.0);
        let r = QSeries::constant(c, 3).regular_reciprocal().unwrap();
        assert!(max_diff(&r, &QSeries::constant(c.inv().unwrap(), 3)) < 1e-16);
        let zero_lead = series(&[Quaternion::ZERO, Quaternion::ONE]);
        assert!(matches!(
            zero_lead.regular_reciprocal(),
            Err(Error::NonInvertibleAtOrigin { .. })
        ));
        let tiny = series(&[Quaternion::real(1e-10), Quaternion::ONE]);
        assert!(tiny.regular_reciprocal().is_err());
        assert!(tiny.regular_reciprocal_with_floor(1e-12).is_ok());
    }

    #[test]
    fn reciprocal_identities_zero_free() {
        // Σ_{n>=1} |an| < |a0| keeps f, hence f^s, zero-free on the closed ball
        let mut rng = stream(3, 0);
        for _ in 0..50 {
            let mut f = crate::sampling::random_series_bounded(&mut rng, 32, 0.45 / 32.0);
            f.coeffs_mut()[0] = f.coeffs()[0] + Quaternion::real(0.5);
            let f = f;
            let r = f.regular_reciprocal().unwrap();
            let one = QSeries::one(32);
            assert!(max_diff(&convolution_oracle(&r, &f), &one) < 1e-10);
            assert!(max_diff(&convolution_oracle(&f, &r), &one) < 1e-10);
        }
    }

    #[test]
    fn reciprocal_is_backward_stable() {
        // residual_n stays within a modest multiple of eps * Σ |b_k| |a_{n-k}|
        let mut rng = stream(3, 1);
        for _ in 0..100 {
            let f = random_invertible_series(&mut rng, 32, 0.5);
            let r = f.regular_reciprocal().unwrap();
            let prod = convolution_oracle(&r, &f);
            for n in 0..=32 {
                let scale: f64 = (0..=n).map(|k| r.coeffs()[k].norm() * f.coeffs()[n - k].norm()).sum();
                let target = if n == 0 { Quaternion::ONE } else { Quaternion::ZERO };
                let residual = (prod.coeffs()[n] - target).norm();
                assert!(
                    residual <= 1e3 * f64::EPSILON * scale,
                    "n={n} residual {residual:e} scale {scale:e}"
                );
            }
        }
    }

    #[test]
    fn derivatives() {
        let f = series(&[Quaternion::ONE, Quaternion::ZERO, Quaternion::ONE]);
        let d = f.slice_derivative(1).unwrap();
        assert_eq!(d.coeffs(), &[Quaternion::ZERO, Quaternion::real(2.0)]);
        assert_eq!(f.slice_derivative(0).unwrap(), f);
        assert!(f.slice_derivative(3).is_err());
        let cubic = series(&[Quaternion::ZERO, Quaternion::ZERO, Quaternion::ZERO, Quaternion::I]);
        assert_eq!(
            cubic.slice_derivative(2).unwrap().coeffs(),
            &[Quaternion::ZERO, Quaternion::I * 6.0]
        );
        assert_eq!(falling_factorial(5, 0), 1.0);
        assert_eq!(falling_factorial(5, 2), 20.0);
    }

    #[test]
    fn leibniz_rule() {
        let mut rng = stream(4, 0);
        for _ in 0..20 {
            let f = random_series(&mut rng, 16);
            let g = random_series(&mut rng, 16);
            assert!(leibniz_residual(&f, &g) <= 1e-12);
            assert!(leibniz_residual(&f, &f) <= 1e-12);
        }
        let f = random_series(&mut rng, 16);
        let c = QSeries::constant(q(0.5, 0.25, -1.0, 2.0), 16);
        // zero in exact arithmetic; only rounding remains
        assert!(leibniz_residual(&f, &c) <= 1e-13);
        assert!(leibniz_residual(&c, &f) <= 1e-13);
    }

    #[test]
    fn subseries_and_compose_power() {
        let (a, b, c, d) = (Quaternion::I, Quaternion::J, Quaternion::K, Quaternion::real(4.0));
        let f = series(&[Quaternion::ONE, a, b, c, d]);
        assert_eq!(f.subseries(2).coeffs(), &[Quaternion::ONE, b, d]);
        assert_eq!(f.subseries(1), f);
        assert_eq!(f.subseries(9).coeffs(), &[Quaternion::ONE]);
        let phi = series(&[Quaternion::ONE, c]);
        assert_eq!(phi.compose_power(2).coeffs(), &[Quaternion::ONE, Quaternion::ZERO, c]);
        assert_eq!(phi.compose_power(1), phi);

        let mut rng = stream(5, 0);
        for n0 in 1..=5 {
            let g = random_series(&mut rng, 23);
            let round = g.subseries(n0).compose_power(n0);
            let masked = QSeries::from_fn(
                round.order(),
                |n| if n % n0 == 0 { g.coeff(n) } else { Quaternion::ZERO },
            );
            assert_eq!(round, masked);
            // a pure n0-series survives the round trip unchanged
            let pure = QSeries::from_fn(6 * n0, |n| if n % n0 == 0 { g.coeff(n % 24) } else { Quaternion::ZERO });
            assert_eq!(pure.subseries(n0).compose_power(n0), pure);
        }
    }

    #[test]
    fn linear_operations() {
        let f = series(&[Quaternion::ONE, Quaternion::I]);
        assert_eq!(&f + &QSeries::zero(1), f);
        assert_eq!(f.scale_right(Quaternion::J).coeffs(), &[Quaternion::J, Quaternion::K]);
        let mut rng = stream(6, 0);
        let (g, h) = (random_series(&mut rng, 5), random_series(&mut rng, 5));
        let t = 0.37;
        assert!(max_diff(&(&g + &h).scale_real(t), &(&g.scale_real(t) + &h.scale_real(t))) < 1e-15);
        assert!(max_diff(&(&g - &g), &QSeries::zero(5)) == 0.0);
        assert_eq!((&g + &QSeries::zero(2)).order(), 2);
    }

    #[test]
    fn tail_bounds() {
        assert_eq!(TailBound::new(0.0, 10).value_at(0.5).unwrap(), 0.0);
        let v = TailBound::new(2.0, 64).value_at(0.5).unwrap();
        assert!((v - 0.5f64.powi(63)).abs() <= 1e-30);
        let t = TailBound::new(2.0, 8);
        assert!(t.value_at(0.3).unwrap() < t.value_at(0.6).unwrap());
        assert!(matches!(t.value_at(1.0), Err(Error::RadiusOutOfRange { .. })));
        // n = 0 reduces to the geometric tail
        let d0 = t.derivative_value_at(0, 0.5).unwrap();
        assert!((d0 - t.value_at(0.5).unwrap()).abs() < 1e-15);
        // n = 1: Σ_{m>N} m r^{m-1} = d/dr (r^{N+1}/(1-r))
        let r: f64 = 0.4;
        let n = 8;
        let closed = ((n as f64 + 1.0) * r.powi(n) * (1.0 - r) + r.powi(n + 1)) / (1.0 - r).powi(2);
        let d1 = TailBound::new(1.0, n as usize).derivative_value_at(1, r).unwrap();
        assert!((d1 - closed).abs() < 1e-14 * closed);
    }

    #[test]
    fn json_encoding() {
        let f = series(&[Quaternion::ONE, Quaternion::I]);
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(s, r#"{"order":1,"coeffs":[[1.0,0.0,0.0,0.0],[0.0,1.0,0.0,0.0]]}"#);
        assert_eq!(serde_json::from_str::<QSeries>(&s).unwrap(), f);
        assert!(serde_json::from_str::<QSeries>(r#"{"order":0,"coeffs":[]}"#).is_err());
        assert!(serde_json::from_str::<QSeries>(r#"{"order":2,"coeffs":[[1,0,0,0]]}"#).is_err());
    }
}
