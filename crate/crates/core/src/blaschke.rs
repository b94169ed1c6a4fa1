//! Finite Blaschke products.
//!
//! Products of thousands of factors underflow in linear scale, so every
//! separation-sensitive quantity here also has a log-modulus form.

use std::collections::HashSet;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{blaschke_factor, rho, rho_to_set, DiskPoint};
use crate::majorant::HarmonicMajorant;

/// `B(z) = Π_k b_{λ_k}(z)`; the empty product is the constant 1.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FiniteBlaschkeProduct {
    pub zeros: Vec<DiskPoint>,
}

impl FiniteBlaschkeProduct {
    pub fn new(zeros: Vec<DiskPoint>) -> Self {
        FiniteBlaschkeProduct { zeros }
    }

    pub fn evaluate(&self, z: DiskPoint) -> Complex64 {
        self.zeros
            .iter()
            .fold(Complex64::new(1.0, 0.0), |acc, &l| acc * blaschke_factor(l, z))
    }

    /// `Σ_k log rho(λ_k, z)`, or `-inf` when `z` is a zero.
    pub fn log_modulus(&self, z: DiskPoint) -> f64 {
        self.zeros.iter().map(|&l| rho(l, z).ln()).sum()
    }

    /// `(log |B(z)|, arg B(z))`, the arg accumulated factor by factor and not reduced.
    pub fn log_polar(&self, z: DiskPoint) -> (f64, f64) {
        self.zeros.iter().fold((0.0, 0.0), |(lm, ph), &l| {
            let b = blaschke_factor(l, z);
            (lm + rho(l, z).ln(), ph + b.arg())
        })
    }

    /// `B / b_λ`: drops one occurrence of `λ` from the zero list.
    pub fn deflate(&self, lambda: DiskPoint) -> Result<Self> {
        let idx = self
            .zeros
            .iter()
            .position(|&z| z == lambda)
            .ok_or(Error::NotAZero(lambda))?;
        let mut zeros = self.zeros.clone();
        zeros.remove(idx);
        Ok(FiniteBlaschkeProduct { zeros })
    }
}

/// Interpolation margin `|B_λ(λ)| = Π_{μ≠λ} rho(μ, λ)` against `e^{-H(λ)}`.
///
/// `|B_λ(λ)| = (1 - |λ|^2)|B'(λ)|`, so the `(1 - |λ|)|B'(λ)|` form differs by
/// the factor `1 + |λ|`; both are reported.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarginReport {
    pub point: DiskPoint,
    pub margin: f64,
    pub log_margin: f64,
    pub threshold: f64,
    pub satisfied: bool,
    /// `(1 - |λ|)|B'(λ)| = margin / (1 + |λ|)`.
    pub one_sided_margin: f64,
    pub one_sided_satisfied: bool,
}

fn check_distinct(points: &[DiskPoint]) -> Result<()> {
    let mut seen = HashSet::with_capacity(points.len());
    for &p in points {
        if !seen.insert(p) {
            return Err(Error::DuplicatePoint(p));
        }
    }
    Ok(())
}

pub fn interpolation_margin(
    lambda_set: &[DiskPoint],
    lambda: DiskPoint,
    h: &HarmonicMajorant,
) -> Result<MarginReport> {
    check_distinct(lambda_set)?;
    if !lambda_set.contains(&lambda) {
        return Err(Error::NotInSequence(lambda));
    }
    Ok(margin_unchecked(lambda_set, lambda, h))
}

fn margin_unchecked(lambda_set: &[DiskPoint], lambda: DiskPoint, h: &HarmonicMajorant) -> MarginReport {
    let log_margin: f64 = lambda_set
        .iter()
        .filter(|&&m| m != lambda)
        .map(|&m| rho(m, lambda).ln())
        .sum();
    let hv = h.eval(lambda);
    let log_one_sided = log_margin - lambda.norm().ln_1p();
    MarginReport {
        point: lambda,
        margin: log_margin.exp(),
        log_margin,
        threshold: (-hv).exp(),
        satisfied: log_margin >= -hv,
        one_sided_margin: log_one_sided.exp(),
        one_sided_satisfied: log_one_sided >= -hv,
    }
}

/// Margins at every point of `lambda_set`.
pub fn interpolation_margins(
    lambda_set: &[DiskPoint],
    h: &HarmonicMajorant,
) -> Result<Vec<MarginReport>> {
    check_distinct(lambda_set)?;
    Ok(lambda_set
        .iter()
        .map(|&l| margin_unchecked(lambda_set, l, h))
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalBoundSample {
    pub z: DiskPoint,
    /// `|B(z)|`
    pub modulus: f64,
    /// `e^{-H_1(z)} rho(z, Λ)`
    pub bound: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalBoundReport {
    pub samples: Vec<LocalBoundSample>,
    pub all_hold: bool,
}

/// Checks `|B(z)| >= e^{-H_1(z)} rho(z, Λ)` at each sample, in log scale.
pub fn local_lower_bound_check(
    lambda_set: &[DiskPoint],
    h1: &HarmonicMajorant,
    samples: &[DiskPoint],
) -> Result<LocalBoundReport> {
    if lambda_set.is_empty() {
        return Err(Error::TooFewPoints { needed: 1, have: 0 });
    }
    let b = FiniteBlaschkeProduct::new(lambda_set.to_vec());
    let samples: Vec<LocalBoundSample> = samples
        .iter()
        .map(|&z| {
            let lhs = b.log_modulus(z);
            let rhs = -h1.eval(z) + rho_to_set(z, lambda_set).ln();
            let holds = if rhs == f64::NEG_INFINITY {
                true
            } else {
                lhs >= rhs - 1e-12 * (1.0 + rhs.abs())
            };
            LocalBoundSample {
                z,
                modulus: lhs.exp(),
                bound: rhs.exp(),
                holds,
            }
        })
        .collect();
    let all_hold = samples.iter().all(|s| s.holds);
    Ok(LocalBoundReport { samples, all_hold })
}

/// Smallest constant majorant (at least `log 3`) for which the local lower
/// bound holds at every sample.
pub fn certify_local_majorant(
    lambda_set: &[DiskPoint],
    samples: &[DiskPoint],
) -> Result<HarmonicMajorant> {
    let b = FiniteBlaschkeProduct::new(lambda_set.to_vec());
    let worst = samples
        .iter()
        .filter(|z| !lambda_set.contains(z))
        .map(|&z| rho_to_set(z, lambda_set).ln() - b.log_modulus(z))
        .fold(crate::majorant::LOG_3, f64::max);
    HarmonicMajorant::constant(worst)
}
