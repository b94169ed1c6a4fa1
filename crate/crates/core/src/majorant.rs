//! Positive harmonic majorants: a constant plus finitely many Poisson atoms.
//!
//! `H(z) = c + Σ w_j P(z, e^{iθ_j})` with `P(z, ζ) = (1 - |z|^2) / |ζ - z|^2`.
//! The family is closed under non-negative linear combinations, which is all
//! the constructions in this crate need.

use std::f64::consts::{LN_2, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{harnack_interval, rho, DiskPoint};

/// `log 3`, the standing lower bound on every majorant.
pub const LOG_3: f64 = 1.098_612_288_668_109_8;
/// `log 8`, the floor the covering construction works with.
pub const LOG_8: f64 = 3.0 * LN_2;
/// Largest atom weight the grid search will propose.
pub const MAX_ATOM_WEIGHT: f64 = 1e3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub theta: f64,
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMajorant", into = "RawMajorant")]
pub struct HarmonicMajorant {
    constant: f64,
    atoms: Vec<Atom>,
}

#[derive(Serialize, Deserialize)]
struct RawMajorant {
    constant: f64,
    #[serde(default)]
    atoms: Vec<Atom>,
}

impl TryFrom<RawMajorant> for HarmonicMajorant {
    type Error = Error;

    fn try_from(raw: RawMajorant) -> Result<Self> {
        HarmonicMajorant::new(raw.constant, raw.atoms)
    }
}

impl From<HarmonicMajorant> for RawMajorant {
    fn from(h: HarmonicMajorant) -> Self {
        RawMajorant {
            constant: h.constant,
            atoms: h.atoms,
        }
    }
}

impl HarmonicMajorant {
    pub fn new(constant: f64, atoms: Vec<Atom>) -> Result<Self> {
        if !constant.is_finite() {
            return Err(Error::InvalidMajorant(format!("constant {constant}")));
        }
        if constant < LOG_3 {
            return Err(Error::MajorantNormalization(constant));
        }
        let mut normalized = Vec::with_capacity(atoms.len());
        for a in atoms {
            if !a.theta.is_finite() || !a.weight.is_finite() || a.weight < 0.0 {
                return Err(Error::InvalidMajorant(format!(
                    "atom theta={} weight={}",
                    a.theta, a.weight
                )));
            }
            let theta = a.theta.rem_euclid(TAU);
            // rem_euclid can round up to TAU itself
            let theta = if theta >= TAU { 0.0 } else { theta };
            normalized.push(Atom {
                theta,
                weight: a.weight,
            });
        }
        Ok(HarmonicMajorant {
            constant,
            atoms: normalized,
        })
    }

    pub fn constant(c: f64) -> Result<Self> {
        Self::new(c, Vec::new())
    }

    /// The constant `log 3`.
    pub fn standard() -> Self {
        HarmonicMajorant {
            constant: LOG_3,
            atoms: Vec::new(),
        }
    }

    pub fn constant_term(&self) -> f64 {
        self.constant
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn eval(&self, z: DiskPoint) -> f64 {
        let zc = z.to_complex();
        let one_minus = z.one_minus_norm_sq();
        self.atoms.iter().fold(self.constant, |acc, a| {
            let (s, c) = a.theta.sin_cos();
            let d = (c - zc.re).hypot(s - zc.im);
            acc + a.weight * (one_minus / (d * d))
        })
    }

    /// `Σ scales[i] * hs[i] + shift`.
    pub fn combine(hs: &[&HarmonicMajorant], scales: &[f64], shift: f64) -> Result<Self> {
        if hs.len() != scales.len() || hs.is_empty() {
            return Err(Error::InvalidMajorant(format!(
                "combine needs equal non-empty lists, got {} and {}",
                hs.len(),
                scales.len()
            )));
        }
        if scales.iter().any(|s| !(s.is_finite() && *s >= 0.0)) || !(shift >= 0.0) {
            return Err(Error::InvalidMajorant(
                "scales and shift must be non-negative".into(),
            ));
        }
        let mut constant = shift;
        let mut atoms: Vec<Atom> = Vec::new();
        for (h, &s) in hs.iter().zip(scales) {
            constant += s * h.constant;
            for a in &h.atoms {
                match atoms
                    .iter_mut()
                    .find(|b| b.theta.to_bits() == a.theta.to_bits())
                {
                    Some(b) => b.weight += s * a.weight,
                    None => atoms.push(Atom {
                        theta: a.theta,
                        weight: s * a.weight,
                    }),
                }
            }
        }
        Self::new(constant, atoms)
    }

    /// `scale * self + shift`.
    pub fn scaled(&self, scale: f64, shift: f64) -> Result<Self> {
        Self::combine(&[self], &[scale], shift)
    }

    /// Sum of the majorant over a tuple.
    pub fn sum_over(&self, points: &[DiskPoint]) -> f64 {
        points.iter().map(|&p| self.eval(p)).sum()
    }
}

/// Harnack inequality at `(z, w)`: true iff `H(z)/H(w)` lies in the interval.
///
/// Holds for every member of the family; a `false` means an evaluation bug.
pub fn harnack_check(h: &HarmonicMajorant, z: DiskPoint, w: DiskPoint) -> bool {
    let r = rho(z, w);
    let Ok((lo, hi)) = harnack_interval(r) else {
        return false;
    };
    let ratio = h.eval(z) / h.eval(w);
    let slack = 1e-12;
    ratio >= lo * (1.0 - slack) && ratio <= hi * (1.0 + slack)
}

/// Finite search grid over `constant + weight * Σ_angles P(·, e^{iθ})`.
///
/// Candidates are visited with constants outermost and weights innermost,
/// both in the listed order, so the first hit is the "smallest" witness.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MajorantGrid {
    pub constants: Vec<f64>,
    pub atom_angles: Vec<f64>,
    pub atom_weights: Vec<f64>,
}

impl Default for MajorantGrid {
    fn default() -> Self {
        MajorantGrid {
            constants: vec![
                LOG_3, LOG_8, 3.0, 4.0, 6.0, 8.0, 12.0, 16.0, 24.0, 32.0, 48.0, 64.0,
            ],
            atom_angles: vec![0.0, TAU / 4.0, TAU / 2.0, 3.0 * TAU / 4.0],
            atom_weights: vec![0.0, 1.0, 4.0, 16.0],
        }
    }
}

impl MajorantGrid {
    pub fn candidates(&self) -> Result<Vec<HarmonicMajorant>> {
        if let Some(w) = self
            .atom_weights
            .iter()
            .find(|w| !(**w >= 0.0 && **w <= MAX_ATOM_WEIGHT))
        {
            return Err(Error::InvalidMajorant(format!(
                "grid weight {w} outside [0, {MAX_ATOM_WEIGHT}]"
            )));
        }
        let mut out = Vec::new();
        for &c in &self.constants {
            for &w in &self.atom_weights {
                let atoms = if w == 0.0 {
                    Vec::new()
                } else {
                    self.atom_angles
                        .iter()
                        .map(|&theta| Atom { theta, weight: w })
                        .collect()
                };
                out.push(HarmonicMajorant::new(c, atoms)?);
            }
        }
        Ok(out)
    }

    /// First candidate satisfying `accept`; `None` means no witness was found
    /// on this grid, not that none exists.
    pub fn search<F>(&self, mut accept: F) -> Result<Option<HarmonicMajorant>>
    where
        F: FnMut(&HarmonicMajorant) -> bool,
    {
        Ok(self.candidates()?.into_iter().find(|h| accept(h)))
    }
}
