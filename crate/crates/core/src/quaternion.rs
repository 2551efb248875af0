//! Quaternion arithmetic in the basis `{1, i, j, k}` with `i² = j² = k² = ijk = -1`,
//! together with the slice coordinates `q = x + yI` used throughout the crate.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default floor below which `inv` refuses to divide.
pub const INVERSION_FLOOR: f64 = 1e-300;

/// Below this imaginary modulus a quaternion is treated as lying on the real axis.
pub const DEGENERACY_FLOOR: f64 = 1e-12;

/// A quaternion `x0 + x1 i + x2 j + x3 k`.
///
/// Serializes as the JSON array `[x0, x1, x2, x3]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "[f64; 4]", into = "[f64; 4]")]
pub struct Quaternion {
    pub x0: f64,
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
}

impl Quaternion {
    pub const ZERO: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Quaternion = Quaternion::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Quaternion = Quaternion::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Quaternion = Quaternion::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 1.0);

    pub const fn new(x0: f64, x1: f64, x2: f64, x3: f64) -> Self {
        Quaternion { x0, x1, x2, x3 }
    }

    pub const fn real(x: f64) -> Self {
        Quaternion::new(x, 0.0, 0.0, 0.0)
    }

    pub const fn pure(x1: f64, x2: f64, x3: f64) -> Self {
        Quaternion::new(0.0, x1, x2, x3)
    }

    pub fn re(self) -> f64 {
        self.x0
    }

    pub fn im(self) -> Quaternion {
        Quaternion::pure(self.x1, self.x2, self.x3)
    }

    /// The imaginary part as a 3-vector `(x1, x2, x3)`.
    pub fn im_vector(self) -> [f64; 3] {
        [self.x1, self.x2, self.x3]
    }

    pub fn conj(self) -> Quaternion {
        Quaternion::new(self.x0, -self.x1, -self.x2, -self.x3)
    }

    pub fn norm_sqr(self) -> f64 {
        self.x0 * self.x0 + self.x1 * self.x1 + self.x2 * self.x2 + self.x3 * self.x3
    }

    pub fn norm(self) -> f64 {
        // hypot-style scaling keeps tiny and huge moduli representable
        let m = self.x0.abs().max(self.x1.abs()).max(self.x2.abs()).max(self.x3.abs());
        if m == 0.0 || !m.is_finite() {
            return m;
        }
        let s = self / m;
        m * s.norm_sqr().sqrt()
    }

    pub fn im_norm(self) -> f64 {
        self.im().norm()
    }

    pub fn is_finite(self) -> bool {
        self.x0.is_finite() && self.x1.is_finite() && self.x2.is_finite() && self.x3.is_finite()
    }

    /// Multiplicative inverse `conj(q) / |q|²` with the default floor.
    pub fn inv(self) -> Result<Quaternion> {
        self.inv_with_floor(INVERSION_FLOOR)
    }

    pub fn inv_with_floor(self, floor: f64) -> Result<Quaternion> {
        let modulus = self.norm();
        if !(modulus > floor) {
            return Err(Error::DivisionByNearZero { modulus, floor });
        }
        // divide by the modulus twice to avoid overflow of |q|² near the floor
        Ok(self.conj() / modulus / modulus)
    }

    /// Euclidean inner product of the imaginary 3-vectors.
    pub fn im_dot(self, other: Quaternion) -> f64 {
        self.x1 * other.x1 + self.x2 * other.x2 + self.x3 * other.x3
    }

    /// Integer power by repeated squaring.
    pub fn powi(self, n: u32) -> Quaternion {
        let mut base = self;
        let mut acc = Quaternion::ONE;
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc *= base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.x0, self.x1, self.x2, self.x3]
    }

    /// Slice coordinates of `self`; see [`slice_decompose`].
    pub fn slice(self, fallback: UnitImaginary) -> SlicePoint {
        slice_decompose(self, fallback)
    }
}

impl TryFrom<[f64; 4]> for Quaternion {
    type Error = String;

    fn try_from(a: [f64; 4]) -> std::result::Result<Self, Self::Error> {
        let q = Quaternion::new(a[0], a[1], a[2], a[3]);
        if q.is_finite() {
            Ok(q)
        } else {
            Err(format!("non-finite quaternion component in {a:?}"))
        }
    }
}

impl From<Quaternion> for [f64; 4] {
    fn from(q: Quaternion) -> Self {
        q.to_array()
    }
}

impl From<f64> for Quaternion {
    fn from(x: f64) -> Self {
        Quaternion::real(x)
    }
}

impl fmt::Display for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}i + {}j + {}k", self.x0, self.x1, self.x2, self.x3)
    }
}

impl Add for Quaternion {
    type Output = Quaternion;
    fn add(self, b: Quaternion) -> Quaternion {
        Quaternion::new(self.x0 + b.x0, self.x1 + b.x1, self.x2 + b.x2, self.x3 + b.x3)
    }
}

impl AddAssign for Quaternion {
    fn add_assign(&mut self, b: Quaternion) {
        *self = *self + b;
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;
    fn sub(self, b: Quaternion) -> Quaternion {
        Quaternion::new(self.x0 - b.x0, self.x1 - b.x1, self.x2 - b.x2, self.x3 - b.x3)
    }
}

impl SubAssign for Quaternion {
    fn sub_assign(&mut self, b: Quaternion) {
        *self = *self - b;
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;
    fn neg(self) -> Quaternion {
        Quaternion::new(-self.x0, -self.x1, -self.x2, -self.x3)
    }
}

/// Hamilton product.
impl Mul for Quaternion {
    type Output = Quaternion;
    fn mul(self, b: Quaternion) -> Quaternion {
        let a = self;
        Quaternion::new(
            a.x0 * b.x0 - a.x1 * b.x1 - a.x2 * b.x2 - a.x3 * b.x3,
            a.x0 * b.x1 + a.x1 * b.x0 + a.x2 * b.x3 - a.x3 * b.x2,
            a.x0 * b.x2 - a.x1 * b.x3 + a.x2 * b.x0 + a.x3 * b.x1,
            a.x0 * b.x3 + a.x1 * b.x2 - a.x2 * b.x1 + a.x3 * b.x0,
        )
    }
}

impl MulAssign for Quaternion {
    fn mul_assign(&mut self, b: Quaternion) {
        *self = *self * b;
    }
}

impl Mul<f64> for Quaternion {
    type Output = Quaternion;
    fn mul(self, t: f64) -> Quaternion {
        Quaternion::new(self.x0 * t, self.x1 * t, self.x2 * t, self.x3 * t)
    }
}

impl Mul<Quaternion> for f64 {
    type Output = Quaternion;
    fn mul(self, q: Quaternion) -> Quaternion {
        q * self
    }
}

impl Div<f64> for Quaternion {
    type Output = Quaternion;
    fn div(self, t: f64) -> Quaternion {
        Quaternion::new(self.x0 / t, self.x1 / t, self.x2 / t, self.x3 / t)
    }
}

/// Free-function form of the Hamilton product.
pub fn qmul(a: Quaternion, b: Quaternion) -> Quaternion {
    a * b
}

pub fn qconj(q: Quaternion) -> Quaternion {
    q.conj()
}

pub fn qinv(q: Quaternion) -> Result<Quaternion> {
    q.inv()
}

/// An element of the sphere `S = { I : I² = -1 }` of unit imaginary quaternions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Quaternion", into = "Quaternion")]
pub struct UnitImaginary(Quaternion);

impl UnitImaginary {
    pub const I: UnitImaginary = UnitImaginary(Quaternion::I);
    pub const J: UnitImaginary = UnitImaginary(Quaternion::J);
    pub const K: UnitImaginary = UnitImaginary(Quaternion::K);

    /// Accepts `q` if it is purely imaginary with unit modulus to 1e-12.
    pub fn new(q: Quaternion) -> Result<Self> {
        if q.is_finite() && q.x0.abs() <= 1e-12 && (q.norm() - 1.0).abs() <= 1e-12 {
            Ok(UnitImaginary(q.im()))
        } else {
            Err(Error::NotUnitImaginary(q.to_string()))
        }
    }

    /// Normalizes the imaginary vector `(x1, x2, x3)`.
    pub fn from_vector(x1: f64, x2: f64, x3: f64) -> Result<Self> {
        let v = Quaternion::pure(x1, x2, x3);
        let n = v.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::NotUnitImaginary(v.to_string()));
        }
        Ok(UnitImaginary(v / n))
    }

    pub fn get(self) -> Quaternion {
        self.0
    }
}

impl TryFrom<Quaternion> for UnitImaginary {
    type Error = Error;
    fn try_from(q: Quaternion) -> Result<Self> {
        UnitImaginary::new(q)
    }
}

impl From<UnitImaginary> for Quaternion {
    fn from(u: UnitImaginary) -> Self {
        u.0
    }
}

/// `Im(q)/|Im(q)|`, or `fallback` when `q` lies on the real axis.
pub fn unit_of(q: Quaternion, fallback: UnitImaginary) -> UnitImaginary {
    let y = q.im_norm();
    if y > DEGENERACY_FLOOR {
        UnitImaginary(q.im() / y)
    } else {
        fallback
    }
}

/// A point `x + yI` of a slice `C_I`, with `y >= 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlicePoint {
    pub x: f64,
    pub y: f64,
    pub unit: UnitImaginary,
}

impl SlicePoint {
    pub fn reconstitute(self) -> Quaternion {
        Quaternion::real(self.x) + self.unit.get() * self.y
    }
}

pub fn slice_decompose(q: Quaternion, fallback: UnitImaginary) -> SlicePoint {
    SlicePoint {
        x: q.re(),
        y: q.im_norm(),
        unit: unit_of(q, fallback),
    }
}

/// `cos θ + I sin θ`.
pub fn exp_slice(unit: UnitImaginary, theta: f64) -> Quaternion {
    let (s, c) = theta.sin_cos();
    Quaternion::real(c) + unit.get() * s
}

/// Uniform draw on the sphere of unit imaginaries: a normalized 3-d Gaussian.
pub fn random_unit_imaginary<R: Rng + ?Sized>(rng: &mut R) -> UnitImaginary {
    loop {
        let x1: f64 = rng.sample(StandardNormal);
        let x2: f64 = rng.sample(StandardNormal);
        let x3: f64 = rng.sample(StandardNormal);
        // the zero vector has probability zero but is not representable
        if let Ok(u) = UnitImaginary::from_vector(x1, x2, x3) {
            return u;
        }
    }
}
