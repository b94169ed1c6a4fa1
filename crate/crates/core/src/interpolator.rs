//! Interpolation on a union `Λ_1 ∪ .. ∪ Λ_n` by the Newton-type chain
//! `f = g_1 + B_1 (g_2 + B_2 (g_3 + ..))`, where `B_j` vanishes on `Λ_j` and
//! each `g_j` interpolates corrected targets on `Λ_j`.

use std::collections::HashSet;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::blaschke::{certify_local_majorant, local_lower_bound_check, FiniteBlaschkeProduct};
use crate::divdiff::DiskFunction;
use crate::error::{Error, Result};
use crate::geometry::{blaschke_factor, rho, DiskPoint};
use crate::majorant::HarmonicMajorant;
use crate::separation::weakly_separated;
use crate::sequence::LabeledSequence;

/// Below this modulus stage targets are divided in log-polar form.
pub const SMALL_PRODUCT: f64 = 1e-12;

/// `g(z) = Σ_k c_k Π_{i≠k} b_{λ_i}(z)` with `c_k = v_k / Π_{i≠k} b_{λ_i}(λ_k)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BaseInterpolant {
    pub nodes: Vec<DiskPoint>,
    #[serde(with = "crate::json::complex_vec")]
    pub values: Vec<Complex64>,
    #[serde(with = "crate::json::complex_vec")]
    pub coefficients: Vec<Complex64>,
    /// `Σ_k |v_k| / |B_k(λ_k)|`, an upper bound for `|g|` on the disk.
    pub growth: f64,
}

fn leave_one_out(factors: &[Complex64]) -> Vec<Complex64> {
    let m = factors.len();
    let mut out = vec![Complex64::new(1.0, 0.0); m];
    let mut acc = Complex64::new(1.0, 0.0);
    for k in 0..m {
        out[k] = acc;
        acc *= factors[k];
    }
    acc = Complex64::new(1.0, 0.0);
    for k in (0..m).rev() {
        out[k] *= acc;
        acc *= factors[k];
    }
    out
}

pub fn base_interpolate(nodes: &[DiskPoint], values: &[Complex64]) -> Result<BaseInterpolant> {
    if nodes.len() != values.len() {
        return Err(Error::InvalidParams(format!(
            "{} values for {} nodes",
            values.len(),
            nodes.len()
        )));
    }
    let mut seen = HashSet::with_capacity(nodes.len());
    for &p in nodes {
        if !seen.insert(p) {
            return Err(Error::DuplicatePoint(p));
        }
    }
    if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(Error::InvalidParams("values must be finite".into()));
    }
    let coefficients: Vec<Complex64> = nodes
        .iter()
        .zip(values)
        .enumerate()
        .map(|(k, (&lk, &v))| {
            if v == Complex64::new(0.0, 0.0) {
                return v;
            }
            let den = nodes
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != k)
                .fold(Complex64::new(1.0, 0.0), |acc, (_, &li)| acc * blaschke_factor(li, lk));
            v / den
        })
        .collect();
    let growth = coefficients.iter().map(|c| c.norm()).sum();
    Ok(BaseInterpolant {
        nodes: nodes.to_vec(),
        values: values.to_vec(),
        coefficients,
        growth,
    })
}

impl BaseInterpolant {
    pub fn eval(&self, z: DiskPoint) -> Complex64 {
        let factors: Vec<Complex64> = self.nodes.iter().map(|&l| blaschke_factor(l, z)).collect();
        leave_one_out(&factors)
            .iter()
            .zip(&self.coefficients)
            .map(|(p, c)| c * p)
            .sum()
    }
}

/// Nearest point of an earlier part to a later-stage node.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pairing {
    pub part: usize,
    pub point: DiskPoint,
    pub rho: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeBound {
    pub node: DiskPoint,
    /// `|g_j(node)|`
    pub magnitude: f64,
    /// `2 j (H(node) + H_1(node))`
    pub log_bound: f64,
    pub exceeds: bool,
    pub pairings: Vec<Pairing>,
    /// Some pairing has `rho > 1/2`, where the bound is not claimed.
    pub far_pairing: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageReport {
    pub stage: usize,
    pub nodes: Vec<NodeBound>,
    pub flagged: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageBoundReport {
    pub majorant: HarmonicMajorant,
    pub local_majorant: HarmonicMajorant,
    pub stages: Vec<StageReport>,
    pub all_within: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InterpolantChain {
    pub parts: Vec<Vec<DiskPoint>>,
    /// `B_1 .. B_{n-1}`
    pub blaschke_factors: Vec<FiniteBlaschkeProduct>,
    pub stages: Vec<BaseInterpolant>,
    /// Stages of a second chain on the same nodes that interpolates the
    /// rounding residual `ω - f` of the first. Kept as a separate summand so
    /// the correction is not lost to the size of the main stages. Empty for
    /// a single part.
    #[serde(default)]
    pub refinement: Vec<BaseInterpolant>,
    /// Constant `H_1` with `|B_i(z)| >= e^{-H_1} rho(z, Λ_i)` at every later node.
    pub local_majorant: HarmonicMajorant,
    pub local_bound_holds: bool,
    pub report: StageBoundReport,
}

impl InterpolantChain {
    /// Nested evaluation `g_1 + B_1 (g_2 + B_2 (..))`.
    pub fn eval(&self, z: DiskPoint) -> Complex64 {
        eval_nested(&self.stages, &self.blaschke_factors, z)
            + eval_nested(&self.refinement, &self.blaschke_factors, z)
    }

    /// `Σ_j B_1 .. B_{j-1} g_j`, summed term by term.
    pub fn eval_expanded(&self, z: DiskPoint) -> Complex64 {
        eval_expanded(&self.stages, &self.blaschke_factors, z)
            + eval_expanded(&self.refinement, &self.blaschke_factors, z)
    }

    pub fn eval_grid(&self, zs: &[DiskPoint]) -> Vec<Complex64> {
        zs.par_iter().map(|&z| self.eval(z)).collect()
    }

    /// `Σ_j growth(g_j)`, an upper bound for `|f|` on the disk.
    pub fn sup_bound(&self) -> f64 {
        self.stages.iter().chain(&self.refinement).map(|g| g.growth).sum()
    }

    /// `max |f(λ) - ω(λ)|` over all nodes.
    pub fn max_residual(&self, omega: &[Vec<Complex64>]) -> f64 {
        self.parts
            .iter()
            .zip(omega)
            .flat_map(|(part, w)| part.iter().zip(w))
            .map(|(&p, &v)| (self.eval(p) - v).norm())
            .fold(0.0, f64::max)
    }
}

impl DiskFunction for InterpolantChain {
    fn value(&self, z: DiskPoint) -> Complex64 {
        self.eval(z)
    }
}

fn eval_expanded(stages: &[BaseInterpolant], bs: &[FiniteBlaschkeProduct], z: DiskPoint) -> Complex64 {
    let mut prefix = Complex64::new(1.0, 0.0);
    let mut total = Complex64::new(0.0, 0.0);
    for (j, g) in stages.iter().enumerate() {
        total += prefix * g.eval(z);
        if let Some(b) = bs.get(j) {
            prefix *= b.evaluate(z);
        }
    }
    total
}

fn eval_nested(stages: &[BaseInterpolant], bs: &[FiniteBlaschkeProduct], z: DiskPoint) -> Complex64 {
    let Some(last) = stages.last() else {
        return Complex64::new(0.0, 0.0);
    };
    let mut f = last.eval(z);
    for j in (0..stages.len() - 1).rev() {
        f = stages[j].eval(z) + bs[j].evaluate(z) * f;
    }
    f
}

fn stage_target(
    node: DiskPoint,
    omega: Complex64,
    fprev: Complex64,
    bs: &[FiniteBlaschkeProduct],
) -> Result<Complex64> {
    let num = omega - fprev;
    let (lm, ph) = bs.iter().fold((0.0, 0.0), |(lm, ph), b| {
        let (l, p) = b.log_polar(node);
        (lm + l, ph + p)
    });
    if lm == f64::NEG_INFINITY {
        return Err(Error::NodeOnZeroSet(node));
    }
    if lm.exp() >= SMALL_PRODUCT {
        let prod = bs
            .iter()
            .fold(Complex64::new(1.0, 0.0), |acc, b| acc * b.evaluate(node));
        return Ok(num / prod);
    }
    if num == Complex64::new(0.0, 0.0) {
        return Ok(num);
    }
    Ok(Complex64::from_polar((num.norm().ln() - lm).exp(), num.arg() - ph))
}

fn build_stages(
    parts: &[Vec<DiskPoint>],
    omega: &[Vec<Complex64>],
    bs: &[FiniteBlaschkeProduct],
) -> Result<Vec<BaseInterpolant>> {
    let mut stages = vec![base_interpolate(&parts[0], &omega[0])?];
    for j in 1..parts.len() {
        let targets = parts[j]
            .iter()
            .zip(&omega[j])
            .map(|(&node, &w)| {
                let fprev = eval_nested(&stages, &bs[..j - 1], node);
                stage_target(node, w, fprev, &bs[..j])
            })
            .collect::<Result<Vec<_>>>()?;
        stages.push(base_interpolate(&parts[j], &targets)?);
    }
    Ok(stages)
}

/// Builds the chain stage by stage. `omega[j]` holds the targets on
/// `parts[j]`; every part must be weakly separated under `h`.
pub fn chained_solve(
    parts: &[Vec<DiskPoint>],
    omega: &[Vec<Complex64>],
    h: &HarmonicMajorant,
) -> Result<InterpolantChain> {
    if parts.is_empty() || parts.len() != omega.len() {
        return Err(Error::InvalidParams("need one value list per non-empty list of parts".into()));
    }
    let mut seen = HashSet::new();
    for p in parts.iter().flatten() {
        if !seen.insert(*p) {
            return Err(Error::PartsOverlap(*p));
        }
    }
    for (j, part) in parts.iter().enumerate() {
        if let Some([a, b]) = weakly_separated(part, h).violating_pair {
            return Err(Error::NotSeparated { part: j + 1, a, b });
        }
    }

    let bs: Vec<FiniteBlaschkeProduct> = parts[..parts.len() - 1]
        .iter()
        .map(|p| FiniteBlaschkeProduct::new(p.clone()))
        .collect();
    let stages = build_stages(parts, omega, &bs)?;
    let refinement = if parts.len() > 1 {
        let residual: Vec<Vec<Complex64>> = parts
            .iter()
            .zip(omega)
            .map(|(part, w)| {
                part.iter()
                    .zip(w)
                    .map(|(&p, &v)| v - eval_nested(&stages, &bs, p))
                    .collect()
            })
            .collect();
        build_stages(parts, &residual, &bs)?
    } else {
        Vec::new()
    };

    let mut h1 = HarmonicMajorant::standard();
    let mut holds = true;
    for i in 0..parts.len().saturating_sub(1) {
        let later: Vec<DiskPoint> = parts[i + 1..].iter().flatten().copied().collect();
        let cert = certify_local_majorant(&parts[i], &later)?;
        if cert.constant_term() > h1.constant_term() {
            h1 = cert;
        }
    }
    for i in 0..parts.len().saturating_sub(1) {
        let later: Vec<DiskPoint> = parts[i + 1..].iter().flatten().copied().collect();
        holds &= local_lower_bound_check(&parts[i], &h1, &later)?.all_hold;
    }

    let mut chain = InterpolantChain {
        parts: parts.to_vec(),
        blaschke_factors: bs,
        stages,
        refinement,
        local_majorant: h1,
        local_bound_holds: holds,
        report: StageBoundReport {
            majorant: h.clone(),
            local_majorant: HarmonicMajorant::standard(),
            stages: Vec::new(),
            all_within: true,
        },
    };
    chain.report = stage_bound_report(&chain, h);
    Ok(chain)
}

/// Runs `chained_solve` on the labeled parts and values of `seq`.
pub fn chained_solve_sequence(seq: &LabeledSequence, h: &HarmonicMajorant) -> Result<InterpolantChain> {
    let (parts, omega) = split_values(seq)?;
    chained_solve(&parts, &omega, h)
}

/// Values of `seq` grouped like `seq.parts()`.
pub fn split_values(seq: &LabeledSequence) -> Result<(Vec<Vec<DiskPoint>>, Vec<Vec<Complex64>>)> {
    let labels = seq.labels().ok_or(Error::NoLabels)?;
    let values = seq.require_values()?;
    let parts = seq.parts()?;
    let mut omega = vec![Vec::new(); parts.len()];
    for (&l, &v) in labels.iter().zip(values) {
        omega[l - 1].push(v);
    }
    Ok((parts, omega))
}

/// Nearest point of each earlier part, ties to the first in part order.
pub fn nearest_pairings(parts: &[Vec<DiskPoint>], stage: usize, node: DiskPoint) -> Vec<Pairing> {
    parts[..stage]
        .iter()
        .enumerate()
        .filter_map(|(i, part)| {
            part.iter()
                .map(|&p| (rho(node, p), p))
                .fold(None, |best: Option<(f64, DiskPoint)>, cur| match best {
                    Some(b) if b.0 <= cur.0 => Some(b),
                    _ => Some(cur),
                })
                .map(|(r, p)| Pairing {
                    part: i + 1,
                    point: p,
                    rho: r,
                })
        })
        .collect()
}

/// Compares `|g_j(node)|` with `e^{2 j (H + H_1)}` at every node of every stage.
pub fn stage_bound_report(chain: &InterpolantChain, h: &HarmonicMajorant) -> StageBoundReport {
    let h1 = &chain.local_majorant;
    let stages: Vec<StageReport> = chain
        .stages
        .iter()
        .enumerate()
        .map(|(j, g)| {
            let nodes: Vec<NodeBound> = g
                .nodes
                .iter()
                .zip(&g.values)
                .map(|(&node, v)| {
                    let magnitude = v.norm();
                    let log_bound = 2.0 * (j + 1) as f64 * (h.eval(node) + h1.eval(node));
                    let pairings = nearest_pairings(&chain.parts, j, node);
                    NodeBound {
                        node,
                        magnitude,
                        log_bound,
                        exceeds: magnitude.ln() > log_bound,
                        far_pairing: pairings.iter().any(|p| p.rho > 0.5),
                        pairings,
                    }
                })
                .collect();
            StageReport {
                stage: j + 1,
                flagged: nodes.iter().filter(|n| n.exceeds).count(),
                nodes,
            }
        })
        .collect();
    StageBoundReport {
        majorant: h.clone(),
        local_majorant: h1.clone(),
        all_within: stages.iter().all(|s| s.flagged == 0),
        stages,
    }
}
