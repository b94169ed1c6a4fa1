//! Deterministic sequence generators. Every random choice goes through a
//! `ChaCha8Rng` seeded from the caller's seed.

use std::collections::HashSet;
use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{rho, DiskPoint};
use crate::majorant::{HarmonicMajorant, LOG_3};
use crate::sequence::LabeledSequence;

/// Largest `k` with `1 - 2^-k` still a valid disk point.
pub const MAX_RADIAL: usize = 49;

const MAX_TRIES: usize = 100_000;

/// Area-uniform point in `|z| <= max_radius`.
pub fn random_disk_point<R: Rng>(rng: &mut R, max_radius: f64) -> DiskPoint {
    loop {
        let r = max_radius * rng.random::<f64>().sqrt();
        let theta = TAU * rng.random::<f64>();
        if let Ok(p) = DiskPoint::from_polar(r, theta) {
            return p;
        }
    }
}

/// Image of `u` under the automorphism `u -> (u + c) / (1 + conj(c) u)`,
/// which sends 0 to `c` and preserves `rho`.
pub fn mobius_shift(c: DiskPoint, u: Complex64) -> Result<DiskPoint> {
    let cc = c.to_complex();
    DiskPoint::from_complex((u + cc) / (1.0 + cc.conj() * u))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneratorSpec {
    /// `λ_k = 1 - 2^-k`, `k = 1..=m`, one part.
    RadialExponential { m: usize },
    /// `n` parts of `per_part` points, each part with pairwise `rho >= separation`.
    RandomUnion {
        n: usize,
        per_part: usize,
        separation: f64,
        max_radius: f64,
    },
    /// `clusters` groups of `n` points at mutual distance about `intra`,
    /// group centers pairwise at `rho >= 0.5`. Labels give the position in
    /// the group, so each label class is one point per group.
    Clustered {
        n: usize,
        clusters: usize,
        intra: f64,
    },
}

pub fn generate(spec: &GeneratorSpec, seed: u64) -> Result<LabeledSequence> {
    match *spec {
        GeneratorSpec::RadialExponential { m } => radial_exponential(m),
        GeneratorSpec::RandomUnion {
            n,
            per_part,
            separation,
            max_radius,
        } => random_union(n, per_part, separation, max_radius, seed),
        GeneratorSpec::Clustered { n, clusters, intra } => clustered(n, clusters, intra, seed),
    }
}

pub fn radial_exponential(m: usize) -> Result<LabeledSequence> {
    if m == 0 || m > MAX_RADIAL {
        return Err(Error::InvalidParams(format!(
            "radial_exponential needs 1 <= m <= {MAX_RADIAL}, got {m}"
        )));
    }
    let points = (1..=m)
        .map(|k| DiskPoint::real(1.0 - (-(k as f64)).exp2()))
        .collect::<Result<Vec<_>>>()?;
    LabeledSequence::new(points)?.with_labels(vec![1; m])
}

fn sample_separated<R: Rng>(
    rng: &mut R,
    count: usize,
    separation: f64,
    max_radius: f64,
    taken: &HashSet<DiskPoint>,
) -> Result<Vec<DiskPoint>> {
    let mut out: Vec<DiskPoint> = Vec::with_capacity(count);
    let mut tries = 0;
    while out.len() < count {
        tries += 1;
        if tries > MAX_TRIES {
            return Err(Error::InvalidParams(format!(
                "could not place {count} points at separation {separation} within radius {max_radius}"
            )));
        }
        let p = random_disk_point(rng, max_radius);
        if !taken.contains(&p) && out.iter().all(|&q| rho(p, q) >= separation) {
            out.push(p);
        }
    }
    Ok(out)
}

pub fn random_union(
    n: usize,
    per_part: usize,
    separation: f64,
    max_radius: f64,
    seed: u64,
) -> Result<LabeledSequence> {
    if n == 0 || !(separation > 0.0 && separation < 1.0) || !(max_radius > 0.0 && max_radius < 1.0) {
        return Err(Error::InvalidParams(
            "random_union needs n >= 1, separation and max_radius in (0, 1)".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut taken = HashSet::new();
    let mut parts = Vec::with_capacity(n);
    for _ in 0..n {
        let part = sample_separated(&mut rng, per_part, separation, max_radius, &taken)?;
        taken.extend(part.iter().copied());
        parts.push(part);
    }
    LabeledSequence::from_parts(&parts)
}

/// Constant majorant under which every part of a `random_union` with this
/// separation is weakly separated: `e^{-H} = separation / 3`.
pub fn separation_majorant(separation: f64) -> Result<HarmonicMajorant> {
    HarmonicMajorant::constant(LOG_3.max(-(separation / 3.0).ln()))
}

pub fn clustered(n: usize, clusters: usize, intra: f64, seed: u64) -> Result<LabeledSequence> {
    if n == 0 || clusters == 0 || !(intra > 0.0 && intra < 0.01) {
        return Err(Error::InvalidParams(
            "clustered needs n >= 1, clusters >= 1 and intra in (0, 0.01)".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let centers = sample_separated(&mut rng, clusters, 0.5, 0.9, &HashSet::new())?;
    let mut points = Vec::with_capacity(n * clusters);
    let mut labels = Vec::with_capacity(n * clusters);
    for &c in &centers {
        let phase = TAU * rng.random::<f64>();
        for i in 0..n {
            let u = if i == 0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::from_polar(intra, phase + TAU * (i - 1) as f64 / (n - 1) as f64)
            };
            points.push(mobius_shift(c, u)?);
            labels.push(i + 1);
        }
    }
    LabeledSequence::new(points)?.with_labels(labels)
}
