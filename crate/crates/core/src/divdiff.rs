//! Pseudohyperbolic divided differences and the order-`n - 1` sup statistic.
//!
//! `Δ^0 ω(λ_1) = ω(λ_1)` and
//! `Δ^j ω(λ_1..λ_{j+1}) = (Δ^{j-1} ω(λ_2..λ_{j+1}) - Δ^{j-1} ω(λ_1..λ_j)) / b_{λ_1}(λ_{j+1})`.
//!
//! The statistic enumerates every ordered tuple of distinct points; the
//! depth-first walk extends one column of the difference table per appended
//! point, so a full sweep costs `O(n m^n)` factor evaluations.

use std::collections::{HashMap, HashSet};
use std::f64::consts::LN_2;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::blaschke::FiniteBlaschkeProduct;
use crate::error::{Error, Result};
use crate::generate::random_disk_point;
use crate::geometry::{blaschke_factor, DiskPoint};
use crate::majorant::HarmonicMajorant;
use crate::sequence::LabeledSequence;

/// Anything that can be evaluated on the disk.
pub trait DiskFunction {
    fn value(&self, z: DiskPoint) -> Complex64;
}

impl DiskFunction for FiniteBlaschkeProduct {
    fn value(&self, z: DiskPoint) -> Complex64 {
        self.evaluate(z)
    }
}

impl<F: Fn(DiskPoint) -> Complex64> DiskFunction for F {
    fn value(&self, z: DiskPoint) -> Complex64 {
        self(z)
    }
}

/// Below this modulus the quotient is formed from log-modulus and phase.
const LOG_DIVISION_THRESHOLD: f64 = 1e-12;

#[inline]
pub(crate) fn divide(num: Complex64, den: Complex64) -> Complex64 {
    let dn = den.norm();
    if dn >= LOG_DIVISION_THRESHOLD {
        return num / den;
    }
    let nn = num.norm();
    if nn == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    Complex64::from_polar((nn.ln() - dn.ln()).exp(), num.arg() - den.arg())
}

fn check_distinct(nodes: &[DiskPoint]) -> Result<()> {
    let mut seen = HashSet::with_capacity(nodes.len());
    for &p in nodes {
        if !seen.insert(p) {
            return Err(Error::TupleNotDistinct(p));
        }
    }
    Ok(())
}

/// `Δ^{k-1}` of the values at `k` distinct nodes.
pub fn divided_difference(nodes: &[DiskPoint], values: &[Complex64]) -> Result<Complex64> {
    if nodes.is_empty() || nodes.len() != values.len() {
        return Err(Error::InvalidParams(format!(
            "{} nodes, {} values",
            nodes.len(),
            values.len()
        )));
    }
    check_distinct(nodes)?;
    let mut col = values.to_vec();
    let k = nodes.len();
    for order in 1..k {
        for i in 0..k - order {
            col[i] = divide(col[i + 1] - col[i], blaschke_factor(nodes[i], nodes[i + order]));
        }
    }
    Ok(col[0])
}

/// `Δ^{k-1} ω(tuple)` with `ω` given as a point-to-value map.
pub fn divdiff(omega: &HashMap<DiskPoint, Complex64>, tuple: &[DiskPoint]) -> Result<Complex64> {
    let values = tuple
        .iter()
        .map(|p| omega.get(p).copied().ok_or(Error::MissingValue(*p)))
        .collect::<Result<Vec<_>>>()?;
    divided_difference(tuple, &values)
}

/// `Δ^{k-1} f(nodes)` for a function defined on the whole disk.
pub fn divided_difference_of<F: DiskFunction + ?Sized>(
    f: &F,
    nodes: &[DiskPoint],
) -> Result<Complex64> {
    let values: Vec<Complex64> = nodes.iter().map(|&z| f.value(z)).collect();
    divided_difference(nodes, &values)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatConfig {
    /// Largest tuple length `n` accepted.
    pub max_order: usize,
    /// Upper bound on `|Λ|^n`.
    pub budget: u128,
}

impl Default for StatConfig {
    fn default() -> Self {
        StatConfig {
            max_order: 4,
            budget: 10_000_000,
        }
    }
}

impl StatConfig {
    fn admit(&self, m: usize, n: usize) -> Result<()> {
        if n == 0 {
            return Err(Error::InvalidParams("tuple length n must be >= 1".into()));
        }
        if n > self.max_order {
            return Err(Error::OrderCap {
                n,
                cap: self.max_order,
            });
        }
        let needed = (m as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
        if needed > self.budget {
            return Err(Error::BudgetExceeded {
                needed,
                budget: self.budget,
            });
        }
        Ok(())
    }
}

/// `sup |Δ^{n-1} ω(λ_1..λ_n)| e^{-(H(λ_1) + .. + H(λ_n))}` over `Λ^n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DividedDifferenceStat {
    pub order: usize,
    pub sup: f64,
    pub witness: Vec<DiskPoint>,
    pub majorant: HarmonicMajorant,
}

#[derive(Clone)]
struct Best {
    score: f64,
    tuple: Vec<usize>,
}

impl Best {
    fn none() -> Self {
        Best {
            score: f64::NEG_INFINITY,
            tuple: Vec::new(),
        }
    }

    fn better(a: Best, b: Best) -> Best {
        if b.score > a.score || (b.score == a.score && !b.tuple.is_empty() && (a.tuple.is_empty() || b.tuple < a.tuple)) {
            b
        } else {
            a
        }
    }
}

struct Walk<'a> {
    n: usize,
    values: &'a [Complex64],
    h: &'a [f64],
    factors: &'a [Complex64],
    m: usize,
}

impl Walk<'_> {
    fn descend(
        &self,
        idx: &mut Vec<usize>,
        used: &mut [bool],
        cols: &mut Vec<Vec<Complex64>>,
        hsum: f64,
        best: &mut Best,
    ) {
        let k = idx.len();
        if k == self.n {
            let d = cols[k - 1][0].norm();
            let score = if d.is_nan() {
                f64::INFINITY
            } else {
                (d.ln() - hsum).exp()
            };
            if score > best.score {
                best.score = score;
                best.tuple.clone_from(idx);
            }
            return;
        }
        for next in 0..self.m {
            if used[next] {
                continue;
            }
            let mut col = std::mem::take(&mut cols[k]);
            col.clear();
            col.resize(k + 1, Complex64::new(0.0, 0.0));
            col[k] = self.values[next];
            for i in (0..k).rev() {
                let den = self.factors[idx[i] * self.m + next];
                col[i] = divide(col[i + 1] - cols[k - 1][i], den);
            }
            cols[k] = col;
            used[next] = true;
            idx.push(next);
            self.descend(idx, used, cols, hsum + self.h[next], best);
            idx.pop();
            used[next] = false;
        }
    }
}

/// Exact sup over all ordered `n`-tuples of distinct points of `seq`.
///
/// Ties are broken towards the lexicographically smallest index tuple, so the
/// witness does not depend on how the parallel reduction is scheduled.
pub fn xn_statistic(
    seq: &LabeledSequence,
    n: usize,
    h: &HarmonicMajorant,
    cfg: &StatConfig,
) -> Result<DividedDifferenceStat> {
    let values = seq.require_values()?;
    let pts = seq.points();
    let m = pts.len();
    cfg.admit(m, n)?;
    if m < n {
        return Ok(DividedDifferenceStat {
            order: n - 1,
            sup: 0.0,
            witness: Vec::new(),
            majorant: h.clone(),
        });
    }
    let hv: Vec<f64> = pts.iter().map(|&p| h.eval(p)).collect();
    let factors: Vec<Complex64> = pts
        .iter()
        .flat_map(|&a| pts.iter().map(move |&b| blaschke_factor(a, b)))
        .collect();
    let walk = Walk {
        n,
        values,
        h: &hv,
        factors: &factors,
        m,
    };
    let best = (0..m)
        .into_par_iter()
        .map(|first| {
            let mut idx = vec![first];
            let mut used = vec![false; m];
            used[first] = true;
            let mut cols = vec![Vec::with_capacity(n); n];
            cols[0] = vec![values[first]];
            let mut best = Best::none();
            walk.descend(&mut idx, &mut used, &mut cols, hv[first], &mut best);
            best
        })
        .reduce(Best::none, Best::better);
    Ok(DividedDifferenceStat {
        order: n - 1,
        sup: best.score,
        witness: best.tuple.iter().map(|&i| pts[i]).collect(),
        majorant: h.clone(),
    })
}

/// Constructive bound for the inclusion `X^n ⊂ X^{n-1}`.
///
/// For a tuple `(λ_1..λ_n)` pick anchors `λ^0_1..λ^0_n`, the first `n` points
/// of `Λ` not in the tuple, and telescope
/// `Δ^{n-1}(T_0) = Σ_i [Δ^{n-1}(T_{i-1}) - Δ^{n-1}(T_i)] + Δ^{n-1}(T_n)` with
/// `T_i = (λ^0_i, .., λ^0_1, λ_1, .., λ_{n-i})`. Each bracket equals
/// `Δ^n(λ^0_i, T_{i-1}) b_{λ^0_i}(last of T_{i-1})`, so
/// `|Δ^{n-1}(λ)| <= (n S E + A) e^{ΣH(λ)}` where `S` is the order-`n`
/// statistic, `E` bounds `e^{ΣH}` over anchor sets and `A` bounds the anchor
/// term. All anchors come from the first `2n` points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InclusionBound {
    /// Order of the bounded differences, `n - 1`.
    pub order: usize,
    pub majorant: HarmonicMajorant,
    pub constant: f64,
    /// Order-`n` statistic under the input majorant.
    pub higher_order_sup: f64,
    pub anchor_pool: Vec<DiskPoint>,
}

pub fn lemma_inclusions_bound(
    seq: &LabeledSequence,
    n: usize,
    h: &HarmonicMajorant,
    cfg: &StatConfig,
) -> Result<InclusionBound> {
    if n == 0 {
        return Err(Error::InvalidParams("n must be >= 1".into()));
    }
    let m = seq.len();
    if m < 2 * n {
        return Err(Error::TooFewPoints {
            needed: 2 * n,
            have: m,
        });
    }
    let higher = xn_statistic(seq, n + 1, h, cfg)?;
    let pool: Vec<DiskPoint> = seq.points()[..2 * n].to_vec();
    let mut pool_h: Vec<f64> = pool.iter().map(|&p| h.eval(p)).collect();
    pool_h.sort_by(|a, b| b.total_cmp(a));
    let log_e: f64 = pool_h[..n].iter().sum();

    let values = seq.require_values()?;
    let pool_seq = LabeledSequence::new(pool.clone())?.with_values(values[..2 * n].to_vec())?;
    // every anchor tuple T_n is an ordered n-tuple from the pool
    let anchor_max = max_abs_divided_difference(&pool_seq, n)?;

    let constant = n as f64 * higher.sup * log_e.exp() + anchor_max;
    Ok(InclusionBound {
        order: n - 1,
        majorant: h.clone(),
        constant,
        higher_order_sup: higher.sup,
        anchor_pool: pool,
    })
}

/// Unweighted `max |Δ^{n-1}|` over ordered `n`-tuples of distinct points.
pub fn max_abs_divided_difference(seq: &LabeledSequence, n: usize) -> Result<f64> {
    let values = seq.require_values()?;
    let pts = seq.points();
    let mut best = 0.0f64;
    let mut idx = Vec::with_capacity(n);
    fn rec(
        pts: &[DiskPoint],
        values: &[Complex64],
        n: usize,
        idx: &mut Vec<usize>,
        best: &mut f64,
    ) -> Result<()> {
        if idx.len() == n {
            let nodes: Vec<DiskPoint> = idx.iter().map(|&i| pts[i]).collect();
            let vals: Vec<Complex64> = idx.iter().map(|&i| values[i]).collect();
            *best = best.max(divided_difference(&nodes, &vals)?.norm());
            return Ok(());
        }
        for i in 0..pts.len() {
            if !idx.contains(&i) {
                idx.push(i);
                rec(pts, values, n, idx, best)?;
                idx.pop();
            }
        }
        Ok(())
    }
    rec(pts, values, n, &mut idx, &mut best)?;
    Ok(best)
}

/// The telescoping decomposition behind [`lemma_inclusions_bound`]: returns
/// `(brackets, anchor_term)` whose sum is `Δ^{n-1}(tuple)`.
pub fn telescoping_decomposition(
    seq: &LabeledSequence,
    tuple: &[DiskPoint],
) -> Result<(Vec<Complex64>, Complex64)> {
    let n = tuple.len();
    let omega = seq.value_map()?;
    let anchors: Vec<DiskPoint> = seq
        .points()
        .iter()
        .copied()
        .filter(|p| !tuple.contains(p))
        .take(n)
        .collect();
    if anchors.len() < n {
        return Err(Error::TooFewPoints {
            needed: 2 * n,
            have: seq.len(),
        });
    }
    let mut current: Vec<DiskPoint> = tuple.to_vec();
    let mut brackets = Vec::with_capacity(n);
    for &a in &anchors {
        let last = *current.last().expect("non-empty tuple");
        let mut extended = Vec::with_capacity(n + 1);
        extended.push(a);
        extended.extend_from_slice(&current);
        let higher = divdiff(&omega, &extended)?;
        brackets.push(higher * blaschke_factor(a, last));
        current.pop();
        current.insert(0, a);
    }
    let anchor_term = divdiff(&omega, &current)?;
    Ok((brackets, anchor_term))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceInclusionReport {
    pub order: usize,
    pub samples: usize,
    /// Majorant after `n - 1` applications of `H -> 2H + log 4`.
    pub majorant: HarmonicMajorant,
    /// `max |Δ^{n-1} f| e^{-ΣH̃}` over the sampled tuples.
    pub max_ratio: f64,
    pub witness: Vec<DiskPoint>,
}

/// Majorant for order `n - 1` produced from an order-0 witness `|f| <= e^H`
/// by the update `H -> 2H + log 4` per order.
pub fn trace_majorant(h0: &HarmonicMajorant, n: usize) -> Result<HarmonicMajorant> {
    let mut h = h0.clone();
    for _ in 1..n {
        h = h.scaled(2.0, 2.0 * LN_2)?;
    }
    Ok(h)
}

/// Samples tuples in `D^n` and checks `|Δ^{n-1} f| <= e^{ΣH̃}`.
pub fn verify_trace_inclusion<F: DiskFunction + Sync + ?Sized>(
    f: &F,
    n: usize,
    h_witness: &HarmonicMajorant,
    samples: usize,
    seed: u64,
) -> Result<TraceInclusionReport> {
    if n == 0 {
        return Err(Error::InvalidParams("n must be >= 1".into()));
    }
    let h = trace_majorant(h_witness, n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = Best::none();
    let mut best_nodes = Vec::new();
    for _ in 0..samples {
        let nodes: Vec<DiskPoint> = (0..n).map(|_| random_disk_point(&mut rng, 1.0)).collect();
        let d = match divided_difference_of(f, &nodes) {
            Ok(d) => d.norm(),
            Err(Error::TupleNotDistinct(_)) => continue,
            Err(e) => return Err(e),
        };
        let ratio = (d.ln() - h.sum_over(&nodes)).exp();
        if ratio > best.score {
            best.score = ratio;
            best_nodes = nodes;
        }
    }
    Ok(TraceInclusionReport {
        order: n - 1,
        samples,
        majorant: h,
        max_ratio: best.score.max(0.0),
        witness: best_nodes,
    })
}
