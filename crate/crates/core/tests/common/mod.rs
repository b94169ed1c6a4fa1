#![allow(dead_code)]

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nevkit::generate::{mobius_shift, random_disk_point};
use nevkit::majorant::{Atom, HarmonicMajorant, LOG_3};
use nevkit::{rho, DiskPoint};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_value(rng: &mut ChaCha8Rng, scale: f64) -> Complex64 {
    Complex64::new(rng.random_range(-scale..scale), rng.random_range(-scale..scale))
}

/// `n` parts, each with pairwise `rho >= sep`. Points after the first part
/// are, with probability 1/2, dropped at distance `10^-u`, `u` uniform in
/// `[1, max_exp]`, from a random point of an earlier part.
pub fn close_union(
    rng: &mut ChaCha8Rng,
    n: usize,
    per_part: usize,
    sep: f64,
    max_exp: f64,
) -> Vec<Vec<DiskPoint>> {
    let mut parts: Vec<Vec<DiskPoint>> = Vec::with_capacity(n);
    for j in 0..n {
        let mut part: Vec<DiskPoint> = Vec::with_capacity(per_part);
        let mut tries = 0;
        while part.len() < per_part && tries < 10_000 {
            tries += 1;
            let p = if j > 0 && rng.random_bool(0.5) {
                let earlier = &parts[rng.random_range(0..j)];
                let anchor = earlier[rng.random_range(0..earlier.len())];
                let d = 10f64.powf(-rng.random_range(1.0..max_exp));
                let theta = rng.random_range(0.0..std::f64::consts::TAU);
                match mobius_shift(anchor, Complex64::from_polar(d, theta)) {
                    Ok(p) => p,
                    Err(_) => continue,
                }
            } else {
                random_disk_point(rng, 0.95)
            };
            let fresh = parts.iter().flatten().chain(part.iter()).all(|&q| q != p);
            if fresh && part.iter().all(|&q| rho(p, q) >= sep) {
                part.push(p);
            }
        }
        parts.push(part);
    }
    parts
}

/// Constant plus up to two Poisson atoms.
pub fn random_majorant(rng: &mut ChaCha8Rng) -> HarmonicMajorant {
    let c = LOG_3 + rng.random_range(0.0..3.0);
    let atoms = (0..rng.random_range(0..3))
        .map(|_| Atom {
            theta: rng.random_range(0.0..std::f64::consts::TAU),
            weight: rng.random_range(0.0..2.0),
        })
        .collect();
    HarmonicMajorant::new(c, atoms).unwrap()
}

/// Textbook automorphism `(z - l) / (1 - conj(l) z)`.
pub fn naive_factor(l: Complex64, z: Complex64) -> Complex64 {
    (z - l) / (1.0 - l.conj() * z)
}

/// Divided difference straight from the two-term recursion, no table reuse.
pub fn naive_divdiff(nodes: &[Complex64], values: &[Complex64]) -> Complex64 {
    let k = nodes.len();
    if k == 1 {
        return values[0];
    }
    let tail = naive_divdiff(&nodes[1..], &values[1..]);
    let init = naive_divdiff(&nodes[..k - 1], &values[..k - 1]);
    (tail - init) / naive_factor(nodes[0], nodes[k - 1])
}

/// `H = c + Σ w P(z, e^{iθ})` evaluated from the Poisson kernel formula.
pub fn naive_majorant(h: &HarmonicMajorant, z: Complex64) -> f64 {
    h.constant_term()
        + h.atoms()
            .iter()
            .map(|a| {
                let e = Complex64::from_polar(1.0, a.theta);
                a.weight * (1.0 - z.norm_sqr()) / (e - z).norm_sqr()
            })
            .sum::<f64>()
}

/// Brute-force `sup |Δ^{n-1}| e^{-ΣH}` over ordered tuples of distinct indices.
pub fn oracle_statistic(points: &[DiskPoint], values: &[Complex64], n: usize, h: &HarmonicMajorant) -> f64 {
    let zs: Vec<Complex64> = points.iter().map(|p| p.to_complex()).collect();
    let hv: Vec<f64> = zs.iter().map(|&z| naive_majorant(h, z)).collect();
    let mut best = 0.0f64;
    let mut idx = Vec::new();
    fn walk(
        zs: &[Complex64],
        vs: &[Complex64],
        hv: &[f64],
        n: usize,
        idx: &mut Vec<usize>,
        best: &mut f64,
    ) {
        if idx.len() == n {
            let nodes: Vec<Complex64> = idx.iter().map(|&i| zs[i]).collect();
            let vals: Vec<Complex64> = idx.iter().map(|&i| vs[i]).collect();
            let hs: f64 = idx.iter().map(|&i| hv[i]).sum();
            *best = best.max(naive_divdiff(&nodes, &vals).norm() * (-hs).exp());
            return;
        }
        for i in 0..zs.len() {
            if !idx.contains(&i) {
                idx.push(i);
                walk(zs, vs, hv, n, idx, best);
                idx.pop();
            }
        }
    }
    walk(&zs, values, &hv, n, &mut idx, &mut best);
    best
}

/// Pairwise check of `rho >= e^{-H(a)} + e^{-H(b)}` straight from the definition.
pub fn oracle_weakly_separated(points: &[DiskPoint], h: &HarmonicMajorant) -> bool {
    points.iter().enumerate().all(|(i, &a)| {
        points[i + 1..].iter().all(|&b| {
            let d = (a.to_complex() - b.to_complex()).norm() / (1.0 - a.to_complex().conj() * b.to_complex()).norm();
            d >= (-naive_majorant(h, a.to_complex())).exp() + (-naive_majorant(h, b.to_complex())).exp()
        })
    })
}

/// Largest number of points in an open disk `D(λ, e^{-H(λ)})`, by brute force.
pub fn oracle_count(points: &[DiskPoint], h: &HarmonicMajorant) -> usize {
    points
        .iter()
        .map(|&a| {
            let r = (-naive_majorant(h, a.to_complex())).exp();
            points
                .iter()
                .filter(|&&b| naive_factor(a.to_complex(), b.to_complex()).norm() < r)
                .count()
        })
        .max()
        .unwrap_or(0)
}
