//! Weak separation, the counting condition, the partition into weakly
//! separated subsequences, dyadic squares with their critical radii, and the
//! counterexample value assignment built from them.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::divdiff::divided_difference;
use crate::error::{Error, Result};
use crate::geometry::{blaschke_factor, rho, DiskPoint};
use crate::majorant::{HarmonicMajorant, LOG_8};

/// Dyadic square `Q_{k,j}`: `1 - 2^-k <= r < 1 - 2^-(k+1)` and
/// `j 2π/2^k <= θ < (j+1) 2π/2^k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DyadicSquare {
    pub k: u32,
    pub j: u64,
}

fn inner_radius(k: u32) -> f64 {
    1.0 - (-(k as f64)).exp2()
}

impl DyadicSquare {
    pub fn of(z: DiskPoint) -> DyadicSquare {
        let r = z.norm();
        let gap = 1.0 - r;
        let mut k = if gap > 0.0 {
            (-gap.log2()).floor().max(0.0) as u32
        } else {
            0
        };
        while k > 0 && r < inner_radius(k) {
            k -= 1;
        }
        while r >= inner_radius(k + 1) {
            k += 1;
        }
        let count = 1u64 << k;
        let width = TAU / count as f64;
        let mut j = ((z.angle() / width).floor() as u64).min(count - 1);
        // floor of a rounded quotient can land one square off
        while j > 0 && z.angle() < j as f64 * width {
            j -= 1;
        }
        while j + 1 < count && z.angle() >= (j + 1) as f64 * width {
            j += 1;
        }
        DyadicSquare { k, j }
    }

    pub fn contains(&self, z: DiskPoint) -> bool {
        if self.k > 62 || self.j >= 1u64 << self.k {
            return false;
        }
        let r = z.norm();
        let width = TAU / (1u64 << self.k) as f64;
        let t = z.angle();
        r >= inner_radius(self.k)
            && r < inner_radius(self.k + 1)
            && t >= self.j as f64 * width
            && t < (self.j + 1) as f64 * width
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationReport {
    pub separated: bool,
    pub violating_pair: Option<[DiskPoint; 2]>,
}

/// Disks `D(λ, e^{-H(λ)})` are pairwise disjoint, tested as
/// `rho(λ, λ') >= e^{-H(λ)} + e^{-H(λ')}`.
pub fn weakly_separated(points: &[DiskPoint], h: &HarmonicMajorant) -> SeparationReport {
    let radii: Vec<f64> = points.iter().map(|&p| (-h.eval(p)).exp()).collect();
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            if rho(points[i], points[j]) < radii[i] + radii[j] {
                return SeparationReport {
                    separated: false,
                    violating_pair: Some([points[i], points[j]]),
                };
            }
        }
    }
    SeparationReport {
        separated: true,
        violating_pair: None,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountReport {
    pub max_count: usize,
    pub witness: Option<DiskPoint>,
}

fn count_in_disk(points: &[DiskPoint], center: DiskPoint, radius: f64) -> usize {
    points.iter().filter(|&&q| rho(center, q) < radius).count()
}

/// `max_λ #(Λ ∩ D(λ, e^{-H(λ)}))`, `λ` counting itself.
pub fn count_condition(points: &[DiskPoint], h: &HarmonicMajorant) -> CountReport {
    let mut best = CountReport {
        max_count: 0,
        witness: None,
    };
    for &p in points {
        let c = count_in_disk(points, p, (-h.eval(p)).exp());
        if c > best.max_count {
            best = CountReport {
                max_count: c,
                witness: Some(p),
            };
        }
    }
    best
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionResult {
    pub parts: Vec<Vec<DiskPoint>>,
    pub witness: HarmonicMajorant,
    /// Separation of each part under `witness`, re-checked after construction.
    pub verification: Vec<SeparationReport>,
}

impl PartitionResult {
    pub fn all_separated(&self) -> bool {
        self.verification.iter().all(|r| r.separated)
    }
}

/// Splits `points` into `n` weakly separated parts.
///
/// At level `j`, points whose disk of radius `e^{-10 s H}` holds exactly `j`
/// points form clusters; the rest is split into `j - 1` parts at scale `10 s`,
/// and every cluster then sends one point to each part (parts visited from
/// smallest to largest) with the last going into a fresh part. The majorant
/// scale grows tenfold per level, so the witness is `10^{n-1} H + log 8`.
pub fn partition_weakly_separated(
    points: &[DiskPoint],
    h: &HarmonicMajorant,
    n: usize,
) -> Result<PartitionResult> {
    if n == 0 {
        return Err(Error::InvalidParams("n must be >= 1".into()));
    }
    let count = count_condition(points, h);
    if count.max_count > n {
        return Err(Error::CountCondition {
            count: count.max_count,
            allowed: n,
            witness: count.witness.expect("non-empty when count > 0"),
        });
    }
    let hv: Vec<f64> = points.iter().map(|&p| h.eval(p)).collect();
    let all: Vec<usize> = (0..points.len()).collect();
    let parts_idx = split_level(points, &hv, all, 1.0, n);
    let parts: Vec<Vec<DiskPoint>> = parts_idx
        .iter()
        .map(|part| part.iter().map(|&i| points[i]).collect())
        .collect();
    let witness = h.scaled(10f64.powi(n as i32 - 1), LOG_8)?;
    let verification = parts.iter().map(|p| weakly_separated(p, &witness)).collect();
    Ok(PartitionResult {
        parts,
        witness,
        verification,
    })
}

fn split_level(
    points: &[DiskPoint],
    hv: &[f64],
    subset: Vec<usize>,
    scale: f64,
    j: usize,
) -> Vec<Vec<usize>> {
    if j == 1 {
        return vec![subset];
    }
    let mut in_cluster = vec![false; points.len()];
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for &c in &subset {
        if in_cluster[c] {
            continue;
        }
        let radius = (-10.0 * scale * hv[c]).exp();
        let members: Vec<usize> = subset
            .iter()
            .copied()
            .filter(|&q| rho(points[c], points[q]) < radius)
            .collect();
        if members.len() == j {
            let fresh: Vec<usize> = members.into_iter().filter(|&q| !in_cluster[q]).collect();
            for &q in &fresh {
                in_cluster[q] = true;
            }
            clusters.push(fresh);
        }
    }
    let rest: Vec<usize> = subset.into_iter().filter(|&q| !in_cluster[q]).collect();
    let mut parts = split_level(points, hv, rest, 10.0 * scale, j - 1);
    parts.push(Vec::new());
    for cluster in clusters {
        let mut order: Vec<usize> = (0..parts.len()).collect();
        order.sort_by_key(|&i| (parts[i].len(), i));
        for (&q, &part) in cluster.iter().zip(&order) {
            parts[part].push(q);
        }
    }
    parts
}

/// Critical radius of one non-empty dyadic square: the least `r` for which
/// some `λ` in the square has `n + 1` points of `Λ` in the closed disk
/// `D(λ, r)`; `None` when no point ever captures `n + 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalRadius {
    pub square: DyadicSquare,
    pub radius: Option<f64>,
    pub alpha: DiskPoint,
    /// The `n` nearest other points of `alpha`, by increasing distance.
    pub nearest: Vec<DiskPoint>,
}

fn nearest_others(points: &[DiskPoint], i: usize, n: usize) -> Vec<(f64, usize)> {
    let mut d: Vec<(f64, usize)> = points
        .iter()
        .enumerate()
        .filter(|&(q, _)| q != i)
        .map(|(q, &p)| (rho(points[i], p), q))
        .collect();
    d.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    d.truncate(n);
    d
}

pub fn critical_radii(points: &[DiskPoint], n: usize) -> Result<Vec<CriticalRadius>> {
    if n == 0 {
        return Err(Error::InvalidParams("n must be >= 1".into()));
    }
    let per_point: Vec<(DyadicSquare, Option<f64>, Vec<(f64, usize)>)> = (0..points.len())
        .into_par_iter()
        .map(|i| {
            let near = nearest_others(points, i, n);
            let r = (near.len() == n).then(|| near[n - 1].0);
            (DyadicSquare::of(points[i]), r, near)
        })
        .collect();
    let mut squares: BTreeMap<DyadicSquare, usize> = BTreeMap::new();
    for (i, (sq, r, _)) in per_point.iter().enumerate() {
        squares
            .entry(*sq)
            .and_modify(|best| {
                let cur = per_point[*best].1.unwrap_or(f64::INFINITY);
                if r.unwrap_or(f64::INFINITY) < cur {
                    *best = i;
                }
            })
            .or_insert(i);
    }
    Ok(squares
        .into_iter()
        .map(|(square, i)| CriticalRadius {
            square,
            radius: per_point[i].1,
            alpha: points[i],
            nearest: per_point[i].2.iter().map(|&(_, q)| points[q]).collect(),
        })
        .collect())
}

/// `r_{k,j} / e^{-H(α_{k,j})}` for each square with a finite radius.
pub fn critical_ratio_table(radii: &[CriticalRadius], h: &HarmonicMajorant) -> Vec<(DyadicSquare, f64)> {
    radii
        .iter()
        .filter_map(|c| c.radius.map(|r| (c.square, r * h.eval(c.alpha).exp())))
        .collect()
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleParams {
    /// Stop after selecting this many centers.
    pub max_centers: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleCenter {
    pub alpha: DiskPoint,
    pub square: DyadicSquare,
    pub radius: f64,
    pub nearest: Vec<DiskPoint>,
    #[serde(with = "crate::json::complex")]
    pub value: Complex64,
    /// `|Δ^{n-1} ω(λ^α_1, .., λ^α_{n-1}, α)|`, at most 1.
    pub lower_order_value: f64,
    /// `|Δ^n ω(λ^α_1, .., λ^α_n, α)|`, equal to `1 / radius`.
    pub blowup_value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub n: usize,
    pub centers: Vec<CounterexampleCenter>,
    /// `ω` aligned with the input points.
    #[serde(with = "crate::json::complex_vec")]
    pub values: Vec<Complex64>,
}

impl Counterexample {
    /// Largest relative deviation of `|Δ^n ω(λ^α.., α)|` from `1 / r_α`.
    pub fn blowup_rel_error(&self) -> f64 {
        self.centers
            .iter()
            .map(|c| (c.blowup_value * c.radius - 1.0).abs())
            .fold(0.0, f64::max)
    }

    pub fn max_blowup(&self) -> f64 {
        self.centers.iter().map(|c| 1.0 / c.radius).fold(0.0, f64::max)
    }
}

/// Value assignment in `X^{n-1} \ X^n` built from critical radii.
///
/// Centers are chosen greedily by increasing critical radius, keeping only
/// those whose disks `D(α, r_α)` stay disjoint from the ones already taken.
/// Each center gets `ω(α) = Π_{j<n} b_α(λ^α_j)`; every other point gets 0.
pub fn build_counterexample(
    points: &[DiskPoint],
    n: usize,
    params: &CounterexampleParams,
) -> Result<Counterexample> {
    let radii = critical_radii(points, n)?;
    let mut candidates: Vec<&CriticalRadius> = radii.iter().filter(|c| c.radius.is_some()).collect();
    if candidates.is_empty() {
        return Err(Error::NoCounterexample);
    }
    let index_of = |p: DiskPoint| points.iter().position(|&q| q == p).expect("own point");
    candidates.sort_by(|a, b| {
        a.radius
            .unwrap()
            .total_cmp(&b.radius.unwrap())
            .then(index_of(a.alpha).cmp(&index_of(b.alpha)))
    });
    let mut chosen: Vec<&CriticalRadius> = Vec::new();
    for c in candidates {
        if params.max_centers.is_some_and(|m| chosen.len() >= m) {
            break;
        }
        let r = c.radius.unwrap();
        if chosen
            .iter()
            .all(|o| rho(o.alpha, c.alpha) >= o.radius.unwrap() + r)
        {
            chosen.push(c);
        }
    }
    let mut values = vec![Complex64::new(0.0, 0.0); points.len()];
    let mut centers = Vec::with_capacity(chosen.len());
    for c in &chosen {
        let value = c.nearest[..n - 1]
            .iter()
            .fold(Complex64::new(1.0, 0.0), |acc, &l| acc * blaschke_factor(c.alpha, l));
        values[index_of(c.alpha)] = value;
        centers.push((c, value));
    }
    let lookup = |p: DiskPoint| values[index_of(p)];
    let centers = centers
        .into_iter()
        .map(|(c, value)| -> Result<CounterexampleCenter> {
            let mut lower: Vec<DiskPoint> = c.nearest[..n - 1].to_vec();
            lower.push(c.alpha);
            let mut full: Vec<DiskPoint> = c.nearest.clone();
            full.push(c.alpha);
            let lv: Vec<Complex64> = lower.iter().map(|&p| lookup(p)).collect();
            let fv: Vec<Complex64> = full.iter().map(|&p| lookup(p)).collect();
            Ok(CounterexampleCenter {
                alpha: c.alpha,
                square: c.square,
                radius: c.radius.unwrap(),
                nearest: c.nearest.clone(),
                value,
                lower_order_value: divided_difference(&lower, &lv)?.norm(),
                blowup_value: divided_difference(&full, &fv)?.norm(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Counterexample {
        n,
        centers,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::majorant::LOG_3;

    fn p(re: f64, im: f64) -> DiskPoint {
        DiskPoint::new(re, im).unwrap()
    }

    #[test]
    fn weak_separation_examples() {
        let h = HarmonicMajorant::standard();
        assert!(weakly_separated(&[p(0.3, 0.3)], &h).separated);
        // rho(-0.9, 0.9) = 1.8 / 1.81 >= 2/3
        assert!(weakly_separated(&[p(-0.9, 0.0), p(0.9, 0.0)], &h).separated);
        let close = [DiskPoint::ORIGIN, p(1e-9, 0.0)];
        let r = weakly_separated(&close, &h);
        assert!(!r.separated);
        assert_eq!(r.violating_pair, Some(close));
    }

    #[test]
    fn count_examples() {
        let h = HarmonicMajorant::standard();
        let sep = [p(-0.9, 0.0), p(0.9, 0.0), p(0.0, 0.9)];
        assert_eq!(count_condition(&sep, &h).max_count, 1);
        let c = count_condition(&[DiskPoint::ORIGIN, p(1e-9, 0.0)], &h);
        assert_eq!(c.max_count, 2);
        assert_eq!(c.witness, Some(DiskPoint::ORIGIN));
        // four points within (1/3)/2 of each other around 0.2
        let cluster: Vec<DiskPoint> = (0..4)
            .map(|k| p(0.2 + 0.01 * k as f64, 0.01 * k as f64))
            .chain([p(-0.9, 0.0)])
            .collect();
        assert_eq!(count_condition(&cluster, &h).max_count, 4);
    }

    #[test]
    fn partition_base_case_is_identity() {
        let h = HarmonicMajorant::standard();
        let pts = vec![p(-0.9, 0.0), p(0.9, 0.0), p(0.0, 0.9)];
        let r = partition_weakly_separated(&pts, &h, 1).unwrap();
        assert_eq!(r.parts, vec![pts]);
        assert!(r.all_separated());
        assert!((r.witness.constant_term() - (LOG_3 + LOG_8)).abs() < 1e-15);
    }

    #[test]
    fn partition_two_clusters() {
        let h = HarmonicMajorant::standard();
        // intra-cluster distance e^{-12 log 3} = 3^-12, clusters far apart
        let eps = 3f64.powi(-12);
        let a = p(-0.45, 0.0);
        let b = p(0.45, 0.0);
        let pts = vec![a, p(-0.45 + eps, 0.0), b, p(0.45 + eps, 0.0)];
        let r = partition_weakly_separated(&pts, &h, 2).unwrap();
        assert_eq!(r.parts.len(), 2);
        assert_eq!(r.parts[0].len(), 2);
        assert_eq!(r.parts[1].len(), 2);
        for part in &r.parts {
            let from_a = part.iter().filter(|q| q.re() < 0.0).count();
            assert_eq!(from_a, 1);
        }
        assert!(r.all_separated());
    }

    #[test]
    fn partition_isolated_point_and_cluster() {
        let h = HarmonicMajorant::standard();
        let eps = 3f64.powi(-12);
        let pts = vec![p(-0.6, 0.2), p(0.5, 0.1), p(0.5 + eps, 0.1)];
        let r = partition_weakly_separated(&pts, &h, 2).unwrap();
        let mut sizes: Vec<usize> = r.parts.iter().map(Vec::len).collect();
        sizes.sort();
        assert_eq!(sizes, vec![1, 2]);
        assert!(r.all_separated());
    }

    #[test]
    fn partition_rejects_dense_input() {
        let h = HarmonicMajorant::standard();
        let pts = [DiskPoint::ORIGIN, p(1e-9, 0.0)];
        match partition_weakly_separated(&pts, &h, 1) {
            Err(Error::CountCondition {
                count: 2,
                allowed: 1,
                witness,
            }) => assert_eq!(witness, DiskPoint::ORIGIN),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn dyadic_squares() {
        assert_eq!(DyadicSquare::of(DiskPoint::ORIGIN), DyadicSquare { k: 0, j: 0 });
        assert_eq!(DyadicSquare::of(p(0.5, 0.0)), DyadicSquare { k: 1, j: 0 });
        assert_eq!(DyadicSquare::of(p(-0.6, 0.0)), DyadicSquare { k: 1, j: 1 });
        assert_eq!(DyadicSquare::of(p(0.0, -0.8)), DyadicSquare { k: 2, j: 3 });
        let z = p(0.0, 1.0 - 2f64.powi(-30));
        let sq = DyadicSquare::of(z);
        assert_eq!(sq.k, 30);
        assert!(sq.contains(z));
    }

    #[test]
    fn critical_radius_examples() {
        let pts = [DiskPoint::ORIGIN, p(0.1, 0.0)];
        let radii = critical_radii(&pts, 2).unwrap();
        assert!(radii.iter().all(|c| c.radius.is_none()));

        let radii = critical_radii(&pts, 1).unwrap();
        let sq0 = radii.iter().find(|c| c.square.k == 0).unwrap();
        assert!((sq0.radius.unwrap() - 0.1).abs() < 1e-15);
        assert!(sq0.alpha == pts[0] || sq0.alpha == pts[1]);

        // three points within 1e-6 of each other inside Q_{0,0}, plus far points
        let eps = 1e-6;
        let cl = [p(0.2, 0.1), p(0.2 + eps, 0.1), p(0.2, 0.1 + eps)];
        let mut all = cl.to_vec();
        all.extend([p(-0.9, 0.0), p(0.0, -0.9)]);
        let radii = critical_radii(&all, 2).unwrap();
        let sq = radii.iter().find(|c| c.square == DyadicSquare::of(cl[0])).unwrap();
        assert!(sq.radius.unwrap() <= 2.0 * eps);
    }

    #[test]
    fn counterexample_for_n_one_is_an_indicator() {
        let pts = vec![p(0.1, 0.0), p(0.1 + 1e-4, 0.0), p(-0.7, 0.3), p(-0.7, 0.3 + 1e-3)];
        let ce = build_counterexample(&pts, 1, &CounterexampleParams::default()).unwrap();
        for (i, v) in ce.values.iter().enumerate() {
            let is_center = ce.centers.iter().any(|c| c.alpha == pts[i]);
            assert_eq!(*v, Complex64::new(if is_center { 1.0 } else { 0.0 }, 0.0));
        }
        assert!(ce.blowup_rel_error() < 1e-9);
    }

    #[test]
    fn counterexample_needs_enough_points() {
        let pts = [p(0.1, 0.0), p(0.5, 0.0)];
        assert!(matches!(
            build_counterexample(&pts, 2, &CounterexampleParams::default()),
            Err(Error::NoCounterexample)
        ));
    }
}
