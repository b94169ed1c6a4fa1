//! Pseudohyperbolic geometry of the unit disk.
//!
//! Everything downstream measures distances with [`rho`], so the kernel is
//! written to keep relative accuracy for nearby points and for points close
//! to the unit circle: `1 - |z|^2` is evaluated with error-free products and
//! `1 - conj(w) z` is rewritten as `(1 - |w|^2) - conj(w)(z - w)`.

use std::fmt;
use std::hash::{Hash, Hasher};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Minimum allowed distance `1 - |z|` to the unit circle.
pub const BOUNDARY_MARGIN: f64 = 1e-15;

/// A point strictly inside the unit disk.
///
/// Equality and hashing are bitwise on `(re, im)`; two points are distinct
/// exactly when their bit patterns differ.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(try_from = "RawPoint", into = "RawPoint")]
pub struct DiskPoint {
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct RawPoint {
    re: f64,
    im: f64,
}

impl TryFrom<RawPoint> for DiskPoint {
    type Error = Error;

    fn try_from(raw: RawPoint) -> Result<Self> {
        DiskPoint::new(raw.re, raw.im)
    }
}

impl From<DiskPoint> for RawPoint {
    fn from(p: DiskPoint) -> Self {
        RawPoint { re: p.re, im: p.im }
    }
}

impl DiskPoint {
    pub const ORIGIN: DiskPoint = DiskPoint { re: 0.0, im: 0.0 };

    pub fn new(re: f64, im: f64) -> Result<Self> {
        if !re.is_finite() || !im.is_finite() {
            return Err(Error::OutsideDisk { re, im });
        }
        let r = re.hypot(im);
        if r >= 1.0 || one_minus_norm_sq(re, im) / (1.0 + r) < BOUNDARY_MARGIN {
            return Err(Error::OutsideDisk { re, im });
        }
        Ok(DiskPoint { re, im })
    }

    pub fn real(x: f64) -> Result<Self> {
        Self::new(x, 0.0)
    }

    pub fn from_complex(z: Complex64) -> Result<Self> {
        Self::new(z.re, z.im)
    }

    pub fn from_polar(r: f64, theta: f64) -> Result<Self> {
        let z = Complex64::from_polar(r, theta);
        Self::new(z.re, z.im)
    }

    #[inline]
    pub fn re(self) -> f64 {
        self.re
    }

    #[inline]
    pub fn im(self) -> f64 {
        self.im
    }

    #[inline]
    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.re.hypot(self.im)
    }

    /// `1 - |z|^2`, accurate to a few ulps even for `|z|` close to one.
    #[inline]
    pub fn one_minus_norm_sq(self) -> f64 {
        one_minus_norm_sq(self.re, self.im)
    }

    /// Argument in `[0, 2π)`.
    pub fn angle(self) -> f64 {
        let t = self.im.atan2(self.re);
        if t < 0.0 {
            t + std::f64::consts::TAU
        } else {
            t
        }
    }
}

impl PartialEq for DiskPoint {
    fn eq(&self, other: &Self) -> bool {
        self.re.to_bits() == other.re.to_bits() && self.im.to_bits() == other.im.to_bits()
    }
}

impl Eq for DiskPoint {}

impl Hash for DiskPoint {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.re.to_bits().hash(state);
        self.im.to_bits().hash(state);
    }
}

impl fmt::Display for DiskPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_sign_negative() {
            write!(f, "{}-{}i", self.re, -self.im)
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// Compensated `1 - re^2 - im^2`.
pub(crate) fn one_minus_norm_sq(re: f64, im: f64) -> f64 {
    let (p1, e1) = two_prod(re, re);
    let (p2, e2) = two_prod(im, im);
    let (s1, t1) = two_sum(1.0, -p1);
    let (s2, t2) = two_sum(s1, -p2);
    s2 + (((t1 + t2) - e1) - e2)
}

/// A pseudohyperbolic disk `{w : rho(center, w) < radius}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PseudoDisk {
    pub center: DiskPoint,
    pub radius: f64,
}

impl PseudoDisk {
    pub fn new(center: DiskPoint, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius < 1.0) {
            return Err(Error::InvalidRadius(radius));
        }
        Ok(PseudoDisk { center, radius })
    }

    pub fn contains(&self, w: DiskPoint) -> bool {
        rho(self.center, w) < self.radius
    }
}

/// Pseudohyperbolic distance `|z - w| / |1 - conj(z) w|`.
///
/// Uses `|1 - conj(z) w|^2 = |z - w|^2 + (1 - |z|^2)(1 - |w|^2)`, which has
/// no cancellation. The result is bitwise symmetric in its arguments.
pub fn rho(z: DiskPoint, w: DiskPoint) -> f64 {
    let d = (z.re - w.re).hypot(z.im - w.im);
    if d == 0.0 {
        return 0.0;
    }
    let s = (z.one_minus_norm_sq() * w.one_minus_norm_sq()).sqrt();
    (d / d.hypot(s)).min(1.0)
}

/// Pseudohyperbolic distance from `z` to a finite set (`+inf` for the empty set).
pub fn rho_to_set(z: DiskPoint, set: &[DiskPoint]) -> f64 {
    set.iter()
        .map(|&w| rho(z, w))
        .fold(f64::INFINITY, f64::min)
}

/// Denominator `1 - conj(lambda) z`, evaluated as `(1 - |λ|^2) - conj(λ)(z - λ)`.
#[inline]
pub(crate) fn mobius_denominator(lambda: DiskPoint, z: DiskPoint) -> Complex64 {
    let l = lambda.to_complex();
    let diff = z.to_complex() - l;
    Complex64::new(lambda.one_minus_norm_sq(), 0.0) - l.conj() * diff
}

/// The disk automorphism `b_λ(z) = (z - λ) / (1 - conj(λ) z)`.
pub fn blaschke_factor(lambda: DiskPoint, z: DiskPoint) -> Complex64 {
    let num = z.to_complex() - lambda.to_complex();
    if num.re == 0.0 && num.im == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    num / mobius_denominator(lambda, z)
}

/// Harnack bounds `((1 - r)/(1 + r), (1 + r)/(1 - r))` on `H(z)/H(w)` when `rho(z, w) = r`.
pub fn harnack_interval(r: f64) -> Result<(f64, f64)> {
    if !(0.0..1.0).contains(&r) {
        return Err(Error::HarnackDomain(r));
    }
    Ok(((1.0 - r) / (1.0 + r), (1.0 + r) / (1.0 - r)))
}

/// `rho(centers) - radius_a - radius_b`; negative values mean the disks overlap.
pub fn pseudo_disk_gap(a: &PseudoDisk, b: &PseudoDisk) -> f64 {
    rho(a.center, b.center) - a.radius - b.radius
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(re: f64, im: f64) -> DiskPoint {
        DiskPoint::new(re, im).unwrap()
    }

    #[test]
    fn rejects_points_on_or_near_the_circle() {
        assert!(DiskPoint::new(1.0, 0.0).is_err());
        assert!(DiskPoint::new(0.6, 0.8).is_err());
        assert!(DiskPoint::new(1.0 - 1e-16, 0.0).is_err());
        assert!(DiskPoint::new(f64::NAN, 0.0).is_err());
        assert!(DiskPoint::new(1.0 - 1e-14, 0.0).is_ok());
        assert!(DiskPoint::new(-0.3, 0.2).is_ok());
    }

    #[test]
    fn rho_examples() {
        assert!((rho(DiskPoint::ORIGIN, p(0.8, 0.0)) - 0.8).abs() < 1e-15);
        assert_eq!(rho(p(0.3, -0.2), p(0.3, -0.2)), 0.0);
        // (0.5 + 0.5) / (1 + 0.25)
        assert!((rho(p(0.5, 0.0), p(-0.5, 0.0)) - 0.8).abs() < 1e-15);
    }

    #[test]
    fn rho_keeps_precision_near_the_boundary() {
        // Two points on the positive axis at 1 - 2^-40 and 1 - 2^-41:
        // rho = (a/2) / (1.5a - a^2/2) with a = 2^-40, i.e. 1/(3 - a).
        let a = 2f64.powi(-40);
        let z = p(1.0 - a, 0.0);
        let w = p(1.0 - a / 2.0, 0.0);
        let expected = 1.0 / (3.0 - a);
        assert!((rho(z, w) - expected).abs() < 1e-14);
        assert!((blaschke_factor(z, w).norm() - expected).abs() < 1e-14);
    }

    #[test]
    fn blaschke_factor_examples() {
        let l = p(0.2, 0.4);
        assert_eq!(blaschke_factor(l, l), Complex64::new(0.0, 0.0));
        let z = p(-0.3, 0.1);
        let b = blaschke_factor(DiskPoint::ORIGIN, z);
        assert!((b - z.to_complex()).norm() < 1e-16);
        let b = blaschke_factor(p(0.5, 0.0), DiskPoint::ORIGIN);
        assert!((b - Complex64::new(-0.5, 0.0)).norm() < 1e-16);
    }

    #[test]
    fn harnack_examples() {
        assert_eq!(harnack_interval(0.0).unwrap(), (1.0, 1.0));
        let (lo, hi) = harnack_interval(0.5).unwrap();
        assert!((lo - 1.0 / 3.0).abs() < 1e-15 && (hi - 3.0).abs() < 1e-15);
        let (lo, hi) = harnack_interval(0.8).unwrap();
        assert!((lo - 1.0 / 9.0).abs() < 1e-15 && (hi - 9.0).abs() < 1e-13);
        assert!(harnack_interval(1.0).is_err());
        assert!(harnack_interval(-0.1).is_err());
    }

    #[test]
    fn gap_examples() {
        let d = |c: DiskPoint, r| PseudoDisk::new(c, r).unwrap();
        let g = pseudo_disk_gap(&d(DiskPoint::ORIGIN, 0.1), &d(p(0.8, 0.0), 0.1));
        assert!((g - 0.6).abs() < 1e-15);
        let z = p(0.1, 0.7);
        assert_eq!(pseudo_disk_gap(&d(z, 0.3), &d(z, 0.3)), -0.6);
        let g = pseudo_disk_gap(&d(DiskPoint::ORIGIN, 0.2), &d(p(0.5, 0.0), 0.2));
        assert!((g - 0.1).abs() < 1e-15);
        assert!(PseudoDisk::new(z, 1.0).is_err());
        assert!(PseudoDisk::new(z, 0.0).is_err());
    }

    #[test]
    fn equality_is_bitwise() {
        assert_ne!(p(0.0, 0.0), p(-0.0, 0.0));
        assert_eq!(p(0.25, 0.5), p(0.25, 0.5));
    }

    #[test]
    fn json_rejects_outside_points() {
        let ok: DiskPoint = serde_json::from_str(r#"{"re":0.5,"im":-0.25}"#).unwrap();
        assert_eq!(ok, p(0.5, -0.25));
        assert!(serde_json::from_str::<DiskPoint>(r#"{"re":1.5,"im":0.0}"#).is_err());
    }
}
