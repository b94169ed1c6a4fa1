//! Disk coverings of a union of weakly separated sequences and the value
//! extension that is constant on each disk.

use std::collections::HashSet;
use std::f64::consts::LN_2;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{rho, DiskPoint};
use crate::majorant::{HarmonicMajorant, LOG_8};
use crate::sequence::LabeledSequence;

/// Relative slack used when re-checking the radius bounds and gaps.
pub const COVER_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Assignment {
    pub point: DiskPoint,
    /// 1-based part label.
    pub part: usize,
    /// Index into `Covering::centers`.
    pub center: usize,
}

/// Classification made when `Λ_{k+1}` is merged into the covering.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoveringStep {
    /// The part being merged, `k + 1`.
    pub part: usize,
    /// Centers whose enlarged disks met the new part (`M_1`).
    pub grown: Vec<usize>,
    /// Points of the new part absorbed by an enlarged disk (`N_1`).
    pub absorbed: Vec<DiskPoint>,
    /// Points of the new part that became centers (`N_2`).
    pub new_centers: Vec<DiskPoint>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Covering {
    pub centers: Vec<DiskPoint>,
    /// `r_λ`, aligned with `centers`.
    pub radii: Vec<f64>,
    pub majorant: HarmonicMajorant,
    pub c: f64,
    pub alpha: f64,
    pub beta: f64,
    pub assignment: Vec<Assignment>,
    pub steps: Vec<CoveringStep>,
}

pub fn default_c(n: usize) -> f64 {
    (n as f64 + 1.0).max(4.0)
}

fn check_parts(parts: &[Vec<DiskPoint>], h: &HarmonicMajorant) -> Result<()> {
    let mut seen = HashSet::new();
    for p in parts.iter().flatten() {
        if !seen.insert(*p) {
            return Err(Error::PartsOverlap(*p));
        }
        let v = h.eval(*p);
        if v < LOG_8 {
            return Err(Error::MajorantFloor { value: v, at: *p });
        }
    }
    for (j, part) in parts.iter().enumerate() {
        let thr: Vec<f64> = part.iter().map(|&p| (-h.eval(p)).exp()).collect();
        for a in 0..part.len() {
            for b in a + 1..part.len() {
                if rho(part[a], part[b]) < thr[a].max(thr[b]) {
                    return Err(Error::NotSeparated {
                        part: j + 1,
                        a: part[a],
                        b: part[b],
                    });
                }
            }
        }
    }
    Ok(())
}

fn positive_radius(r: f64, at: DiskPoint) -> Result<f64> {
    if r > 0.0 && r.is_normal() {
        Ok(r)
    } else {
        Err(Error::RadiusUnderflow(at))
    }
}

/// Inductive covering of `Λ_1 ∪ .. ∪ Λ_n`.
///
/// `h` must satisfy `rho(λ, λ') >= e^{-H(λ)}` inside every part and
/// `H >= log 8` on the points. `c` defaults to `max(n + 1, 4)`.
pub fn build_covering(
    parts: &[Vec<DiskPoint>],
    h: &HarmonicMajorant,
    c: Option<f64>,
) -> Result<Covering> {
    let n = parts.len();
    if n == 0 {
        return Err(Error::InvalidParams("need at least one part".into()));
    }
    let c = c.unwrap_or_else(|| default_c(n));
    if !(c > n as f64 && c >= 4.0) {
        return Err(Error::InvalidParams(format!(
            "covering constant C = {c} must exceed n = {n} and be at least 4"
        )));
    }
    check_parts(parts, h)?;

    let mut centers: Vec<DiskPoint> = parts[0].clone();
    let mut hc: Vec<f64> = centers.iter().map(|&p| h.eval(p)).collect();
    let mut radii: Vec<f64> = centers
        .iter()
        .zip(&hc)
        .map(|(&p, &v)| positive_radius((-c * v).exp(), p))
        .collect::<Result<_>>()?;
    let mut steps = Vec::with_capacity(n - 1);

    for k in 1..n {
        let beta_k = c + (k - 1) as f64;
        let grow: Vec<f64> = hc.iter().map(|&v| 0.25 * (-beta_k * v).exp()).collect();
        let mut grown = vec![false; centers.len()];
        let mut absorbed = Vec::new();
        let mut fresh = Vec::new();
        for &q in &parts[k] {
            let mut hit = false;
            for i in 0..centers.len() {
                if rho(centers[i], q) < radii[i] + grow[i] {
                    grown[i] = true;
                    hit = true;
                }
            }
            if hit {
                absorbed.push(q);
            } else {
                fresh.push(q);
            }
        }
        for i in 0..centers.len() {
            if grown[i] {
                radii[i] += grow[i];
            }
        }
        for &q in &fresh {
            let v = h.eval(q);
            radii.push(positive_radius(0.125 * (-beta_k * v).exp(), q)?);
            centers.push(q);
            hc.push(v);
        }
        steps.push(CoveringStep {
            part: k + 1,
            grown: (0..grown.len()).filter(|&i| grown[i]).collect(),
            absorbed,
            new_centers: fresh,
        });
    }

    // earliest-created center wins when disks overlap
    let mut assignment = Vec::new();
    for (j, part) in parts.iter().enumerate() {
        for &p in part {
            if let Some(center) = (0..centers.len()).find(|&i| rho(centers[i], p) < radii[i]) {
                assignment.push(Assignment {
                    point: p,
                    part: j + 1,
                    center,
                });
            }
        }
    }
    Ok(Covering {
        centers,
        radii,
        majorant: h.clone(),
        c,
        alpha: c - (n - 1) as f64,
        beta: c + (n - 1) as f64,
        assignment,
        steps,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropertyCheck {
    pub passed: bool,
    /// Offending points: a single point for (i) and (ii), a center pair for
    /// (iii), center then the two part points for (iv).
    pub witness: Vec<DiskPoint>,
    pub detail: Option<String>,
}

impl PropertyCheck {
    fn pass() -> Self {
        PropertyCheck {
            passed: true,
            witness: Vec::new(),
            detail: None,
        }
    }

    fn fail(witness: Vec<DiskPoint>, detail: String) -> Self {
        PropertyCheck {
            passed: false,
            witness,
            detail: Some(detail),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoveringVerification {
    pub covers: PropertyCheck,
    pub radius_bounds: PropertyCheck,
    pub gaps: PropertyCheck,
    pub multiplicity: PropertyCheck,
}

impl CoveringVerification {
    pub fn all_pass(&self) -> bool {
        self.covers.passed && self.radius_bounds.passed && self.gaps.passed && self.multiplicity.passed
    }
}

/// Brute-force re-check of (i)-(iv) that reads only centers, radii, the
/// majorant and the constants of `cov`.
pub fn verify_covering(cov: &Covering, parts: &[Vec<DiskPoint>]) -> CoveringVerification {
    let cs = &cov.centers;
    let rs = &cov.radii;
    let hc: Vec<f64> = cs.iter().map(|&p| cov.majorant.eval(p)).collect();

    let covers = parts
        .iter()
        .flatten()
        .find(|&&p| !(0..cs.len()).any(|i| rho(cs[i], p) < rs[i]))
        .map_or_else(PropertyCheck::pass, |&p| {
            PropertyCheck::fail(vec![p], "point outside every disk".into())
        });

    let radius_bounds = (0..cs.len())
        .find_map(|i| {
            let lo = (-cov.beta * hc[i]).exp();
            let hi = (-cov.alpha * hc[i]).exp();
            let ok = rs[i] >= lo * (1.0 - COVER_TOL) && rs[i] <= hi * (1.0 + COVER_TOL);
            (!ok).then(|| {
                PropertyCheck::fail(
                    vec![cs[i]],
                    format!("radius {:e} outside [{lo:e}, {hi:e}]", rs[i]),
                )
            })
        })
        .unwrap_or_else(PropertyCheck::pass);

    let gaps = (0..cs.len())
        .into_par_iter()
        .filter_map(|i| {
            (i + 1..cs.len()).find_map(|j| {
                let gap = rho(cs[i], cs[j]) - rs[i] - rs[j];
                let need = (-cov.beta * hc[i]).exp().max((-cov.beta * hc[j]).exp());
                (gap < need * (1.0 - COVER_TOL)).then_some((i, j, gap, need))
            })
        })
        .min_by_key(|&(i, j, _, _)| (i, j))
        .map_or_else(PropertyCheck::pass, |(i, j, gap, need)| {
            PropertyCheck::fail(vec![cs[i], cs[j]], format!("gap {gap:e} below {need:e}"))
        });

    let multiplicity = (0..cs.len())
        .find_map(|i| {
            parts.iter().enumerate().find_map(|(j, part)| {
                let inside: Vec<DiskPoint> =
                    part.iter().copied().filter(|&p| rho(cs[i], p) < rs[i]).collect();
                (inside.len() > 1).then(|| {
                    PropertyCheck::fail(
                        vec![cs[i], inside[0], inside[1]],
                        format!("disk meets part {} in {} points", j + 1, inside.len()),
                    )
                })
            })
        })
        .unwrap_or_else(PropertyCheck::pass);

    CoveringVerification {
        covers,
        radius_bounds,
        gaps,
        multiplicity,
    }
}

/// Extends `omega_j` (values on part `j`, 1-based) to the whole union: a
/// point in `D_λ` gets `ω(α)` when `D_λ ∩ Λ_j = {α}` and 0 otherwise.
///
/// The result lists the parts in order, labeled, as `LabeledSequence::from_parts`.
pub fn extend_values(
    cov: &Covering,
    parts: &[Vec<DiskPoint>],
    j: usize,
    omega_j: &[Complex64],
) -> Result<LabeledSequence> {
    if j == 0 || j > parts.len() {
        return Err(Error::InvalidParams(format!("part {j} out of range 1..={}", parts.len())));
    }
    let part = &parts[j - 1];
    if omega_j.len() != part.len() {
        return Err(Error::InvalidParams(format!(
            "{} values for {} points",
            omega_j.len(),
            part.len()
        )));
    }
    let mut disk_value = vec![Complex64::new(0.0, 0.0); cov.centers.len()];
    for (i, (&c, &r)) in cov.centers.iter().zip(&cov.radii).enumerate() {
        let mut inside = part.iter().zip(omega_j).filter(|(&p, _)| rho(c, p) < r);
        if let Some((_, &v)) = inside.next() {
            if inside.next().is_some() {
                return Err(Error::CoveringMultiplicity { center: c, part: j });
            }
            disk_value[i] = v;
        }
    }
    let seq = LabeledSequence::from_parts(parts)?;
    let values = seq
        .points()
        .iter()
        .map(|&p| {
            cov.assignment
                .iter()
                .find(|a| a.point == p)
                .map(|a| disk_value[a.center])
                .ok_or(Error::NotInSequence(p))
        })
        .collect::<Result<Vec<_>>>()?;
    seq.with_values(values)
}

/// Majorants `H_(1), .., H_(n)` for the extended sequence.
///
/// `H_(1)` bounds the values; `H_(k) = H_(k-1) + β H_0 + log 2` with
/// `H_0 = 2 H`, which by Harnack covers `rho(α_1, α_k) >= e^{-β H_0(α_1)}`
/// whenever the two points sit in different disks.
pub fn extension_majorants(
    cov: &Covering,
    value_majorant: &HarmonicMajorant,
    n: usize,
) -> Result<Vec<HarmonicMajorant>> {
    let h0 = cov.majorant.scaled(2.0, 0.0)?;
    let mut out = vec![value_majorant.clone()];
    for _ in 1..n {
        let prev = out.last().expect("non-empty");
        out.push(HarmonicMajorant::combine(&[prev, &h0], &[1.0, cov.beta], LN_2)?);
    }
    Ok(out)
}
