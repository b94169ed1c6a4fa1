mod common;

use std::f64::consts::TAU;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;

use common::*;
use nevkit::covering::{build_covering, extend_values, verify_covering};
use nevkit::divdiff::{divided_difference, xn_statistic, StatConfig};
use nevkit::generate::{random_union, separation_majorant};
use nevkit::interpolator::{base_interpolate, chained_solve, nearest_pairings, InterpolantChain};
use nevkit::majorant::HarmonicMajorant;
use nevkit::pipeline::covering_majorant;
use nevkit::separation::{count_condition, partition_weakly_separated, weakly_separated, DyadicSquare};
use nevkit::{blaschke_factor, rho, DiskPoint, LabeledSequence};

fn point() -> impl Strategy<Value = DiskPoint> {
    (0.0..0.999f64, 0.0..TAU).prop_map(|(r, t)| DiskPoint::from_polar(r, t).unwrap())
}

fn value() -> impl Strategy<Value = Complex64> {
    (-5.0..5.0f64, -5.0..5.0f64).prop_map(|(a, b)| Complex64::new(a, b))
}

fn union_parts(n: usize, per: usize, seed: u64) -> Vec<Vec<DiskPoint>> {
    random_union(n, per, 0.3, 0.9, seed).unwrap().parts().unwrap()
}

proptest! {
    #[test]
    fn rho_is_a_symmetric_bounded_metric(z in point(), w in point()) {
        let d = rho(z, w);
        prop_assert_eq!(d, rho(w, z));
        prop_assert!((0.0..1.0).contains(&d));
        prop_assert_eq!(rho(z, z), 0.0);
    }

    #[test]
    fn factor_modulus_is_rho(l in point(), z in point()) {
        let b = blaschke_factor(l, z);
        prop_assert!((b.norm() - rho(l, z)).abs() <= 1e-12);
        let naive = naive_factor(l.to_complex(), z.to_complex());
        prop_assert!((b - naive).norm() <= 1e-9 * (1.0 + naive.norm()));
    }

    #[test]
    fn majorant_matches_poisson_formula(seed in any::<u64>(), z in point()) {
        let h = random_majorant(&mut rng(seed));
        let want = naive_majorant(&h, z.to_complex());
        prop_assert!((h.eval(z) - want).abs() <= 1e-9 * want.abs().max(1.0));
    }

    #[test]
    fn dyadic_square_contains_its_point(z in point()) {
        let q = DyadicSquare::of(z);
        prop_assert!(q.contains(z));
        let n = 1u64 << q.k;
        let next = DyadicSquare { k: q.k, j: (q.j + 1) % n };
        let outer = DyadicSquare { k: q.k + 1, j: q.j };
        prop_assert!(n == 1 || !next.contains(z));
        prop_assert!(!outer.contains(z));
    }

    #[test]
    fn divided_difference_matches_recursion(
        nodes in prop::collection::vec(point(), 1..6),
        values in prop::collection::vec(value(), 6),
    ) {
        let zs: Vec<Complex64> = nodes.iter().map(|p| p.to_complex()).collect();
        let vs = &values[..nodes.len()];
        if let Ok(got) = divided_difference(&nodes, vs) {
            let want = naive_divdiff(&zs, vs);
            prop_assert!((got - want).norm() <= 1e-8 * want.norm().max(1.0), "{got} vs {want}");
        }
    }

    #[test]
    fn first_order_modulus_is_symmetric(a in point(), b in point(), u in value(), v in value()) {
        prop_assume!(rho(a, b) > 1e-6);
        let ab = divided_difference(&[a, b], &[u, v]).unwrap();
        let ba = divided_difference(&[b, a], &[v, u]).unwrap();
        prop_assert!((ab.norm() - ba.norm()).abs() <= 1e-9 * ab.norm().max(1.0));
    }

    #[test]
    fn separation_and_count_match_brute_force(
        pts in prop::collection::hash_set(point(), 1..25),
        seed in any::<u64>(),
    ) {
        let pts: Vec<DiskPoint> = pts.into_iter().collect();
        let h = random_majorant(&mut rng(seed));
        prop_assert_eq!(weakly_separated(&pts, &h).separated, oracle_weakly_separated(&pts, &h));
        prop_assert_eq!(count_condition(&pts, &h).max_count, oracle_count(&pts, &h));
    }

    #[test]
    fn base_interpolant_is_exact_and_bounded(
        nodes in prop::collection::hash_set(point(), 1..12),
        values in prop::collection::vec(value(), 12),
        probes in prop::collection::vec(point(), 20),
    ) {
        let nodes: Vec<DiskPoint> = nodes.into_iter().collect();
        let vs = &values[..nodes.len()];
        let g = base_interpolate(&nodes, vs).unwrap();
        for (&p, &v) in nodes.iter().zip(vs) {
            prop_assert!((g.eval(p) - v).norm() <= 1e-9 * (1.0 + v.norm()));
        }
        for &z in &probes {
            prop_assert!(g.eval(z).norm() <= g.growth * (1.0 + 1e-9));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn partition_splits_unions_into_separated_parts(n in 1usize..4, per in 1usize..10, seed in any::<u64>()) {
        let parts = union_parts(n, per, seed);
        let all: Vec<DiskPoint> = parts.iter().flatten().copied().collect();
        let h = separation_majorant(0.3).unwrap();
        let res = partition_weakly_separated(&all, &h, n).unwrap();
        prop_assert!(res.all_separated());
        prop_assert!(res.parts.len() <= n);
        let mut got: Vec<DiskPoint> = res.parts.iter().flatten().copied().collect();
        let mut want = all.clone();
        got.sort_by(|a, b| (a.re(), a.im()).partial_cmp(&(b.re(), b.im())).unwrap());
        want.sort_by(|a, b| (a.re(), a.im()).partial_cmp(&(b.re(), b.im())).unwrap());
        prop_assert_eq!(got, want);
        for part in &res.parts {
            prop_assert!(oracle_weakly_separated(part, &res.witness));
        }
    }

    #[test]
    fn coverings_verify_and_extend_exactly(n in 1usize..4, per in 1usize..8, seed in any::<u64>()) {
        let parts = union_parts(n, per, seed);
        let h = covering_majorant(&parts).unwrap();
        let cov = build_covering(&parts, &h, None).unwrap();
        prop_assert!(verify_covering(&cov, &parts).all_pass());
        prop_assert_eq!(cov.alpha, cov.c - (n as f64 - 1.0));
        prop_assert_eq!(cov.beta, cov.c + (n as f64 - 1.0));
        let mut r = rng(seed);
        for j in 1..=n {
            let w: Vec<Complex64> = parts[j - 1].iter().map(|_| random_value(&mut r, 2.0)).collect();
            let ext = extend_values(&cov, &parts, j, &w).unwrap();
            let offset: usize = parts[..j - 1].iter().map(Vec::len).sum();
            prop_assert_eq!(&ext.values().unwrap()[offset..offset + w.len()], &w[..]);
        }
    }

    #[test]
    fn chains_interpolate_and_telescope(n in 1usize..4, per in 1usize..10, seed in any::<u64>()) {
        let mut r = rng(seed);
        let parts = close_union(&mut r, n, per, 0.2, 3.0);
        let h = nevkit::pipeline::weak_separation_majorant(&parts).unwrap();
        let omega: Vec<Vec<Complex64>> =
            parts.iter().map(|p| p.iter().map(|_| random_value(&mut r, 3.0)).collect()).collect();
        let chain = chained_solve(&parts, &omega, &h).unwrap();
        let max_w = omega.iter().flatten().map(|v| v.norm()).fold(0.0, f64::max);
        prop_assert!(chain.max_residual(&omega) <= 1e-9 * (1.0 + max_w));
        let scale = chain.sup_bound().max(1.0);
        for _ in 0..1000 {
            let z = nevkit::generate::random_disk_point(&mut r, 0.999);
            let (a, b) = (chain.eval(z), chain.eval_expanded(z));
            prop_assert!((a - b).norm() <= 1e-10 * scale, "{a} vs {b}");
        }
    }

    #[test]
    fn pairings_are_nearest_points(n in 2usize..4, per in 1usize..8, seed in any::<u64>()) {
        let parts = union_parts(n, per, seed);
        for stage in 1..n {
            for &node in &parts[stage] {
                let got = nearest_pairings(&parts, stage, node);
                prop_assert_eq!(got.len(), stage);
                for (i, pair) in got.iter().enumerate() {
                    let best = parts[i].iter().map(|&p| rho(node, p)).fold(f64::INFINITY, f64::min);
                    prop_assert_eq!(pair.rho, best);
                    prop_assert_eq!(rho(node, pair.point), best);
                }
            }
        }
    }

    #[test]
    fn statistic_matches_brute_force(m in 1usize..8, order in 1usize..4, seed in any::<u64>()) {
        let mut r = rng(seed);
        let pts: Vec<DiskPoint> =
            (0..m).map(|_| nevkit::generate::random_disk_point(&mut r, 0.95)).collect();
        let vals: Vec<Complex64> = pts.iter().map(|_| random_value(&mut r, 2.0)).collect();
        let h = random_majorant(&mut r);
        let seq = LabeledSequence::new(pts.clone()).unwrap().with_values(vals.clone()).unwrap();
        prop_assume!(order <= m);
        let st = xn_statistic(&seq, order, &h, &StatConfig::default()).unwrap();
        prop_assert_eq!(st.order, order - 1);
        let want = oracle_statistic(&pts, &vals, order, &h);
        prop_assert!((st.sup - want).abs() <= 1e-9 * want.max(1e-300), "{} vs {}", st.sup, want);
    }

    #[test]
    fn json_round_trips(n in 1usize..4, per in 1usize..6, seed in any::<u64>()) {
        let parts = union_parts(n, per, seed);
        let mut r = rng(seed);
        let seq = LabeledSequence::from_parts(&parts).unwrap();
        let vals: Vec<Complex64> = seq.points().iter().map(|_| random_value(&mut r, 1.0)).collect();
        let seq = seq.with_values(vals).unwrap();
        let back: LabeledSequence = serde_json::from_str(&serde_json::to_string(&seq).unwrap()).unwrap();
        prop_assert_eq!(&back, &seq);

        let h = random_majorant(&mut r);
        let back: HarmonicMajorant = serde_json::from_str(&serde_json::to_string(&h).unwrap()).unwrap();
        prop_assert_eq!(&back, &h);

        let hc = covering_majorant(&parts).unwrap();
        let cov = build_covering(&parts, &hc, None).unwrap();
        let back: nevkit::covering::Covering = serde_json::from_str(&serde_json::to_string(&cov).unwrap()).unwrap();
        prop_assert_eq!(&back, &cov);

        let omega: Vec<Vec<Complex64>> =
            parts.iter().map(|p| p.iter().map(|_| random_value(&mut r, 1.0)).collect()).collect();
        let chain = chained_solve(&parts, &omega, &separation_majorant(0.3).unwrap()).unwrap();
        let back: InterpolantChain = serde_json::from_str(&serde_json::to_string(&chain).unwrap()).unwrap();
        prop_assert_eq!(&back, &chain);
    }
}

#[test]
fn dyadic_squares_tile_each_annulus() {
    for k in 0..6u32 {
        let count = 1u64 << k;
        let width = TAU / count as f64;
        let r = 1.0 - 0.75 * (-(k as f64)).exp2();
        for j in 0..count {
            let z = DiskPoint::from_polar(r, (j as f64 + 0.5) * width).unwrap();
            let owners: Vec<u64> = (0..count).filter(|&i| DyadicSquare { k, j: i }.contains(z)).collect();
            assert_eq!(owners, vec![j]);
            assert_eq!(DyadicSquare::of(z), DyadicSquare { k, j });
        }
    }
}

#[test]
fn second_order_differences_depend_on_node_order() {
    let mut r = rng(3);
    let mut moved = 0;
    for _ in 0..50 {
        let z: Vec<DiskPoint> = (0..3).map(|_| nevkit::generate::random_disk_point(&mut r, 0.9)).collect();
        let v: Vec<Complex64> = (0..3).map(|_| random_value(&mut r, 1.0)).collect();
        let a = divided_difference(&z, &v).unwrap();
        let b = divided_difference(&[z[1], z[0], z[2]], &[v[1], v[0], v[2]]).unwrap();
        if (a.norm() - b.norm()).abs() > 1e-6 * a.norm().max(b.norm()) {
            moved += 1;
        }
    }
    assert!(moved > 40, "only {moved} of 50 triples changed modulus");
}

#[test]
fn second_order_difference_has_a_pole_at_the_repeated_node() {
    let z1 = DiskPoint::new(0.3, 0.2).unwrap();
    let z2 = DiskPoint::new(-0.4, 0.5).unwrap();
    let (v1, v2, v3) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 2.0), Complex64::new(1.0, 0.0));
    let residue = (divided_difference(&[z2, z1], &[v2, v3]).unwrap()
        - divided_difference(&[z1, z2], &[v1, v2]).unwrap())
    .norm();
    assert!(residue > 1e-3);
    for e in [1e-3, 1e-5, 1e-7] {
        let z3 = nevkit::generate::mobius_shift(z1, Complex64::new(e, 0.0)).unwrap();
        let d = divided_difference(&[z1, z2, z3], &[v1, v2, v3]).unwrap();
        let scaled = d.norm() * rho(z1, z3);
        assert!((scaled - residue).abs() <= 10.0 * e * residue.max(1.0), "{e}: {scaled} vs {residue}");
    }
    assert!(divided_difference(&[z1, z2, z1], &[v1, v2, v3]).is_err());
}

#[test]
fn count_matches_oracle_on_clusters() {
    for seed in 0..20 {
        let mut r = rng(seed);
        let n = r.random_range(1..4);
        let s = nevkit::generate::clustered(n, 4, 1e-5, seed).unwrap();
        let h = HarmonicMajorant::standard();
        assert_eq!(count_condition(s.points(), &h).max_count, oracle_count(s.points(), &h));
        assert_eq!(count_condition(s.points(), &h).max_count, n);
    }
}
