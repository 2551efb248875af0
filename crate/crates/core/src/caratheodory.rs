//! Extremal kernels, positive-real-part test functions, and checkers for the
//! quaternionic Carathéodory and Borel-Carathéodory inequalities.
//!
//! Every checker reports signed margins (bound minus observed value). A margin
//! below `-(tolerance + allowance)` is a violation; `allowance` carries the
//! truncation tail of the series at the point in question.

use std::f64::consts::TAU;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluation::{eval, EVAL_FLOOR};
use crate::quaternion::{exp_slice, random_unit_imaginary, Quaternion, UnitImaginary};
use crate::series::{falling_factorial, QSeries, TailBound};

/// Parameters `(I, θ)` of the kernel `(1 - q e^{Iθ})^{-⋆} ⋆ (1 + q e^{Iθ})`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub unit: UnitImaginary,
    pub theta: f64,
}

impl KernelSpec {
    pub fn new(unit: UnitImaginary, theta: f64) -> Self {
        KernelSpec { unit, theta }
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let unit = random_unit_imaginary(rng);
        KernelSpec::new(unit, rng.random_range(0.0..TAU))
    }

    /// `e^{Iθ}`.
    pub fn rotation(&self) -> Quaternion {
        exp_slice(self.unit, self.theta)
    }
}

/// `1 + 2 Σ_{m=1}^{N} q^m e^{Imθ}`.
pub fn kernel_series(spec: KernelSpec, order: usize) -> QSeries {
    QSeries::from_fn(order, |m| {
        if m == 0 {
            Quaternion::ONE
        } else {
            exp_slice(spec.unit, m as f64 * spec.theta) * 2.0
        }
    })
}

/// Closed form `(1 - 2q cos θ + q²)⁻¹ (1 + 2q I sin θ - q²)` of the kernel.
pub fn kernel_eval_closed(spec: KernelSpec, q: Quaternion) -> Result<Quaternion> {
    let (s, c) = spec.theta.sin_cos();
    let q2 = q * q;
    let den = Quaternion::ONE - q * (2.0 * c) + q2;
    let num = Quaternion::ONE + q * (spec.unit.get() * (2.0 * s)) - q2;
    let modulus = den.norm();
    if !(modulus > EVAL_FLOOR) {
        return Err(Error::EvalNearZeroSet {
            modulus,
            floor: EVAL_FLOOR,
        });
    }
    Ok(den.inv()? * num)
}

/// Convex combination of kernels. Real parts add, so the mixture keeps `a0 = 1`
/// and a positive real part on the open ball.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HerglotzMix {
    weights: Vec<f64>,
    kernels: Vec<KernelSpec>,
}

impl HerglotzMix {
    pub fn new(weights: Vec<f64>, kernels: Vec<KernelSpec>) -> Result<Self> {
        if weights.is_empty() || weights.len() != kernels.len() {
            return Err(Error::WeightsInvalid(format!(
                "{} weights for {} kernels",
                weights.len(),
                kernels.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return Err(Error::WeightsInvalid(format!(
                "weight {w} is not a finite non-negative number"
            )));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::WeightsInvalid(format!("weights sum to {total}")));
        }
        Ok(HerglotzMix { weights, kernels })
    }

    pub fn single(spec: KernelSpec) -> Self {
        HerglotzMix {
            weights: vec![1.0],
            kernels: vec![spec],
        }
    }

    /// Between 1 and `max_kernels` random kernels with normalized uniform weights.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, max_kernels: usize) -> Self {
        let count = rng.random_range(1..=max_kernels.max(1));
        let kernels: Vec<KernelSpec> = (0..count).map(|_| KernelSpec::random(rng)).collect();
        let raw: Vec<f64> = (0..count).map(|_| rng.random_range(0.05..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let weights = raw.iter().map(|w| w / total).collect();
        HerglotzMix::new(weights, kernels).expect("normalized weights")
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn kernels(&self) -> &[KernelSpec] {
        &self.kernels
    }
}

pub fn mix_series(mix: &HerglotzMix, order: usize) -> QSeries {
    let mut total = QSeries::zero(order);
    for (w, spec) in mix.weights.iter().zip(&mix.kernels) {
        total = &total + &kernel_series(*spec, order).scale_real(*w);
    }
    // weights sum to one up to rounding; pin the constant term
    total.coeffs_mut()[0] = Quaternion::ONE;
    total
}

/// The inequality a margin belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Inequality {
    /// `(1-|q|)/(1+|q|) <= Re f(q)`
    CtLower,
    /// `Re f(q) <= |f(q)|`
    CtMid,
    /// `|f(q)| <= (1+|q|)/(1-|q|)`
    CtUpper,
    /// `|aₙ| <= 2`
    CtCoefficient,
    /// `|aₙ| <= 2(A - Re f(0))`
    BctCoefficient,
    /// `|f(q) - f(0)| <= 2r/(1-r) (A - Re f(0))`
    BctGrowth,
    /// `Re f(q) <= 2r/(1+r) A + (1-r)/(1+r) Re f(0)`
    BctRealPart,
    /// `|f⁽ⁿ⁾(q)| <= 2 n!/(1-r)^{n+1} (A - Re f(0))`
    BctDerivative,
}

impl Inequality {
    pub fn name(self) -> &'static str {
        match self {
            Inequality::CtLower => "ct_lower",
            Inequality::CtMid => "ct_mid",
            Inequality::CtUpper => "ct_upper",
            Inequality::CtCoefficient => "ct_coefficient",
            Inequality::BctCoefficient => "bct_coefficient",
            Inequality::BctGrowth => "bct_growth",
            Inequality::BctRealPart => "bct_realpart",
            Inequality::BctDerivative => "bct_derivative",
        }
    }

    pub fn statement(self) -> &'static str {
        match self {
            Inequality::CtLower => "(1-|q|)/(1+|q|) <= Re f(q)",
            Inequality::CtMid => "Re f(q) <= |f(q)|",
            Inequality::CtUpper => "|f(q)| <= (1+|q|)/(1-|q|)",
            Inequality::CtCoefficient => "|a_n| <= 2",
            Inequality::BctCoefficient => "|a_n| <= 2(A - Re f(0))",
            Inequality::BctGrowth => "|f(q) - f(0)| <= 2r/(1-r) (A - Re f(0))",
            Inequality::BctRealPart => "Re f(q) <= 2r/(1+r) A + (1-r)/(1+r) Re f(0)",
            Inequality::BctDerivative => "|f^(n)(q)| <= 2 n!/(1-r)^(n+1) (A - Re f(0))",
        }
    }
}

/// One signed margin. `index` is the degree `n` for coefficient and derivative
/// families and unused (zero) otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Margin {
    pub inequality: Inequality,
    pub index: usize,
    pub value: f64,
    pub allowance: f64,
}

impl Margin {
    pub fn holds(&self, tol: f64) -> bool {
        self.value >= -(tol + self.allowance)
    }
}

/// Margins of the chain `(1-|q|)/(1+|q|) <= Re f(q) <= |f(q)| <= (1+|q|)/(1-|q|)` at `q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub q: Quaternion,
    pub lower_margin: f64,
    pub mid_margin: f64,
    pub upper_margin: f64,
    /// Truncation allowance `tail.value_at(|q|)`.
    pub tail: f64,
}

impl BoundReport {
    pub fn margins(&self) -> [Margin; 3] {
        let m = |inequality, value, allowance| Margin {
            inequality,
            index: 0,
            value,
            allowance,
        };
        [
            m(Inequality::CtLower, self.lower_margin, self.tail),
            // |w| >= Re w holds for every quaternion, truncated or not
            m(Inequality::CtMid, self.mid_margin, 0.0),
            m(Inequality::CtUpper, self.upper_margin, self.tail),
        ]
    }

    pub fn holds(&self, tol: f64) -> bool {
        self.margins().iter().all(|m| m.holds(tol))
    }
}

pub fn check_caratheodory_bounds(f: &QSeries, q: Quaternion, tail: TailBound) -> Result<BoundReport> {
    let r = q.norm();
    let allowance = tail.value_at(r)?;
    let value = eval(f, q);
    let (re, modulus) = (value.re(), value.norm());
    Ok(BoundReport {
        q,
        lower_margin: re - (1.0 - r) / (1.0 + r),
        mid_margin: modulus - re,
        upper_margin: (1.0 + r) / (1.0 - r) - modulus,
        tail: allowance,
    })
}

/// `2 - |aₙ|` for `n = 1..=N`.
pub fn check_coefficient_bounds(f: &QSeries) -> Vec<f64> {
    f.coeffs().iter().skip(1).map(|a| 2.0 - a.norm()).collect()
}

pub fn coefficient_margins(f: &QSeries) -> Vec<Margin> {
    check_coefficient_bounds(f)
        .into_iter()
        .enumerate()
        .map(|(k, value)| Margin {
            inequality: Inequality::CtCoefficient,
            index: k + 1,
            value,
            allowance: 0.0,
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtremalCheck {
    /// `max_k |a_{k n0} - 2 (a_{n0}/2)^k|` over the grid inside the truncation.
    Residual(f64),
    /// `|a_{n0}|` is not 2, so the extremal law says nothing.
    Inapplicable { modulus: f64 },
}

pub fn check_extremal_coefficients(f: &QSeries, n0: usize) -> ExtremalCheck {
    assert!(n0 >= 1, "n0 must be at least 1");
    let lead = f.coeff(n0);
    let modulus = lead.norm();
    if (modulus - 2.0).abs() > 1e-9 || n0 > f.order() {
        return ExtremalCheck::Inapplicable { modulus };
    }
    let half = lead * 0.5;
    let mut power = Quaternion::ONE;
    let mut worst: f64 = 0.0;
    for k in 1..=f.order() / n0 {
        power *= half;
        worst = worst.max((f.coeff(k * n0) - power * 2.0).norm());
    }
    ExtremalCheck::Residual(worst)
}

/// `g = (f - 1) ⋆ (f + 1)^{-⋆}`, which maps the class `a0 = 1, Re f > 0` into
/// self-maps of the ball fixing the origin.
pub fn mobius_transform(f: &QSeries) -> Result<QSeries> {
    let a0 = f.coeffs()[0];
    if (a0 - Quaternion::ONE).norm() > 1e-9 {
        return Err(Error::InvalidSeries(format!("transform needs a0 = 1, found {a0}")));
    }
    let one = QSeries::one(f.order());
    let minus = f - &one;
    let plus = f + &one;
    Ok(minus.star(&plus.regular_reciprocal()?))
}

/// Points on the sphere of unit imaginaries from a Fibonacci lattice.
pub fn sphere_units(count: usize) -> Vec<UnitImaginary> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|s| {
            let z = 1.0 - (2.0 * s as f64 + 1.0) / count as f64;
            let rho = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * s as f64;
            UnitImaginary::from_vector(rho * phi.cos(), rho * phi.sin(), z).expect("unit vector")
        })
        .collect()
}

/// Estimate of `sup_{|q|<1} Re f(q)` from `Re f(e^{Iθ})` on `n_theta`
/// equispaced angles and `n_sphere` lattice units `I`, plus, for each angle,
/// the unit that maximizes `Re f` on that circle of the sphere.
///
/// A truncated series is continuous up to the boundary and its real part is
/// harmonic on each slice, so the supremum is a boundary maximum.
pub fn sup_re_estimate(f: &QSeries, n_theta: usize, n_sphere: usize) -> f64 {
    let n_theta = n_theta.max(1);
    let units = sphere_units(n_sphere.max(1));
    let re: Vec<f64> = f.coeffs().iter().map(|a| a.re()).collect();
    let im: Vec<Quaternion> = f.coeffs().iter().map(|a| a.im()).collect();
    let mut best = f64::NEG_INFINITY;
    for t in 0..n_theta {
        let theta = TAU * t as f64 / n_theta as f64;
        // Re f(cos θ + I sin θ) = Σ cos(nθ) Re aₙ - <I, Σ sin(nθ) Im aₙ>
        let mut u = 0.0;
        let mut w = Quaternion::ZERO;
        for (n, (r, v)) in re.iter().zip(&im).enumerate() {
            let (s, c) = (n as f64 * theta).sin_cos();
            u += c * r;
            w += *v * s;
        }
        for unit in &units {
            best = best.max(u - unit.get().im_dot(w));
        }
        // the affine map I -> u - <I, w> peaks at I = -w/|w|
        best = best.max(u + w.norm());
    }
    best
}

/// Margins of the four Borel-Carathéodory families on the ball `|q| <= r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BorelReport {
    pub a_sup: f64,
    pub radius: f64,
    pub re_f0: f64,
    /// `2(A - Re f(0)) - |aₙ|`, `n = 1..=N`.
    pub coefficient_margins: Vec<f64>,
    /// One per sample point.
    pub growth_margins: Vec<f64>,
    pub realpart_margins: Vec<f64>,
    /// `derivative_margins[n-1][p]` for derivative order `n` at point `p`.
    pub derivative_margins: Vec<Vec<f64>>,
    /// Truncation allowance for the growth and real-part families.
    pub tail: f64,
    /// Truncation allowance per derivative order.
    pub derivative_tails: Vec<f64>,
}

impl BorelReport {
    pub fn margins(&self) -> Vec<Margin> {
        let mut out = Vec::new();
        for (k, &value) in self.coefficient_margins.iter().enumerate() {
            out.push(Margin {
                inequality: Inequality::BctCoefficient,
                index: k + 1,
                value,
                allowance: 0.0,
            });
        }
        for &value in &self.growth_margins {
            out.push(Margin {
                inequality: Inequality::BctGrowth,
                index: 0,
                value,
                allowance: self.tail,
            });
        }
        for &value in &self.realpart_margins {
            out.push(Margin {
                inequality: Inequality::BctRealPart,
                index: 0,
                value,
                allowance: self.tail,
            });
        }
        for (k, row) in self.derivative_margins.iter().enumerate() {
            for &value in row {
                out.push(Margin {
                    inequality: Inequality::BctDerivative,
                    index: k + 1,
                    value,
                    allowance: self.derivative_tails[k],
                });
            }
        }
        out
    }

    pub fn holds(&self, tol: f64) -> bool {
        self.margins().iter().all(|m| m.holds(tol))
    }
}

/// Evaluates the Borel-Carathéodory families for `f` given an upper bound `A`
/// of `Re f` on the ball. Sample points must satisfy `|q| <= r`.
pub fn check_borel_caratheodory(
    f: &QSeries,
    a_sup: f64,
    r: f64,
    q_samples: &[Quaternion],
    n_max: usize,
    tail: TailBound,
) -> Result<BorelReport> {
    let allowance = tail.value_at(r)?;
    if let Some(q) = q_samples.iter().find(|q| q.norm() > r * (1.0 + 1e-12)) {
        return Err(Error::RadiusOutOfRange { radius: q.norm() });
    }
    if n_max > f.order() {
        return Err(Error::InvalidSeries(format!(
            "derivative order {n_max} exceeds series order {}",
            f.order()
        )));
    }
    let f0 = f.coeffs()[0];
    let re_f0 = f0.re();
    let gap = a_sup - re_f0;

    let coefficient_margins = f.coeffs().iter().skip(1).map(|a| 2.0 * gap - a.norm()).collect();

    let growth_bound = 2.0 * r / (1.0 - r) * gap;
    let realpart_bound = 2.0 * r / (1.0 + r) * a_sup + (1.0 - r) / (1.0 + r) * re_f0;
    let values: Vec<Quaternion> = q_samples.iter().map(|&q| eval(f, q)).collect();
    let growth_margins = values.iter().map(|v| growth_bound - (*v - f0).norm()).collect();
    let realpart_margins = values.iter().map(|v| realpart_bound - v.re()).collect();

    let mut derivative_margins = Vec::with_capacity(n_max);
    let mut derivative_tails = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let d = f.slice_derivative(n)?;
        let bound = 2.0 * falling_factorial(n, n) / (1.0 - r).powi(n as i32 + 1) * gap;
        derivative_margins.push(q_samples.iter().map(|&q| bound - eval(&d, q).norm()).collect());
        derivative_tails.push(tail.derivative_value_at(n, r)?);
    }

    Ok(BorelReport {
        a_sup,
        radius: r,
        re_f0,
        coefficient_margins,
        growth_margins,
        realpart_margins,
        derivative_margins,
        tail: allowance,
        derivative_tails,
    })
}

/// `ω_I^k` with `ω_I = cos(2π/n0) + I sin(2π/n0)`; `k` must be coprime to `n0`.
pub fn primitive_root(unit: UnitImaginary, n0: usize, k: usize) -> Result<Quaternion> {
    if n0 == 0 || gcd(k % n0, n0) != 1 {
        return Err(Error::NotPrimitiveRoot { k, n0 });
    }
    Ok(exp_slice(unit, TAU * k as f64 / n0 as f64))
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// `max_z |h(z) - (1/n0) Σ_k f(z ω^k)|` with `h = φ(q^{n0})` built from the
/// `n0`-subseries of `f` and `ω` the principal primitive root in `C_I`.
pub fn averaging_identity_check(f: &QSeries, n0: usize, unit: UnitImaginary, z_samples: &[Quaternion]) -> f64 {
    averaging_identity_check_with_root(f, n0, unit, z_samples, 1).expect("k = 1 is always primitive")
}

/// As [`averaging_identity_check`], using the primitive root `ω^k`.
pub fn averaging_identity_check_with_root(
    f: &QSeries,
    n0: usize,
    unit: UnitImaginary,
    z_samples: &[Quaternion],
    k: usize,
) -> Result<f64> {
    let omega = primitive_root(unit, n0, k)?;
    let h = f.subseries(n0).compose_power(n0);
    let powers: Vec<Quaternion> = (0..n0 as u32).map(|j| omega.powi(j)).collect();
    let mut worst: f64 = 0.0;
    for &z in z_samples {
        let mut avg = Quaternion::ZERO;
        for w in &powers {
            avg += eval(f, z * *w);
        }
        let avg = avg / n0 as f64;
        worst = worst.max((eval(&h, z) - avg).norm());
    }
    Ok(worst)
}

/// `g = ((A + Re f(0)) - (f + conj f(0))) / (A - Re f(0))`, which turns a
/// function with `Re f <= A` into one with `g(0) = 1` and `Re g > 0`.
pub fn equivalence_transform(f: &QSeries, a_sup: f64) -> Result<QSeries> {
    let a0 = f.coeffs()[0];
    let gap = a_sup - a0.re();
    if !(gap > 1e-9) {
        return Err(Error::DegenerateNormalization { gap });
    }
    Ok(QSeries::from_fn(f.order(), |n| {
        if n == 0 {
            (Quaternion::real(a_sup + a0.re()) - a0 - a0.conj()) / gap
        } else {
            -f.coeffs()[n] / gap
        }
    }))
}

/// `(2 - |gₙ|)(A - Re f(0))` for the transformed `g`; identical to the direct
/// margins `2(A - Re f(0)) - |aₙ|`.
pub fn equivalence_coefficient_margins(f: &QSeries, a_sup: f64) -> Result<Vec<f64>> {
    let g = equivalence_transform(f, a_sup)?;
    let gap = a_sup - f.coeffs()[0].re();
    Ok(check_coefficient_bounds(&g).into_iter().map(|m| m * gap).collect())
}
