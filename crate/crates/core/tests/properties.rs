//! Invariants checked over seeded random instances.

use hyperex_core::sample::{random_euclidean_space, random_polytope, random_weights, rng, short_map_instance};
use hyperex_core::*;
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn space(r: &mut ChaCha8Rng, max: usize) -> FiniteMetricSpace {
    let m = r.gen_range(2..=max);
    let dim = r.gen_range(1..=3);
    random_euclidean_space(r, m, dim, 4.0).unwrap().0
}

fn measure<'a>(r: &mut ChaCha8Rng, s: &'a FiniteMetricSpace) -> DiscreteMeasure<'a> {
    DiscreteMeasure::new(s, random_weights(r, s.len(), 0.3)).unwrap()
}

fn hull<'a>(r: &mut ChaCha8Rng, s: &'a FiniteMetricSpace) -> ConvexMeasureSet<'a> {
    let g = r.gen_range(1..=3);
    ConvexMeasureSet::new((0..g).map(|_| measure(r, s)).collect()).unwrap()
}

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 48,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn graph_metrics_satisfy_axioms(n in 2usize..=4, k in 1usize..=5) {
        let g = gnk_metric(&build_gnk(n, k).unwrap()).unwrap();
        prop_assert!(verify_metric(&g).unwrap().pass);
    }

    #[test]
    fn kantorovich_is_a_metric(seed in any::<u64>()) {
        let mut r = rng(seed, 0);
        let s = space(&mut r, 8);
        let (a, b, c) = (measure(&mut r, &s), measure(&mut r, &s), measure(&mut r, &s));
        let d = |x: &DiscreteMeasure, y: &DiscreteMeasure| kantorovich(x, y).unwrap().value;
        prop_assert!(d(&a, &a).abs() <= 1e-9);
        prop_assert!((d(&a, &b) - d(&b, &a)).abs() <= 1e-9);
        prop_assert!(d(&a, &c) <= d(&a, &b) + d(&b, &c) + 1e-9);
    }

    #[test]
    fn hausdorff_ccp_is_a_pseudometric(seed in any::<u64>()) {
        let mut r = rng(seed, 1);
        let s = space(&mut r, 6);
        let (a, b, c) = (hull(&mut r, &s), hull(&mut r, &s), hull(&mut r, &s));
        let d = |x: &ConvexMeasureSet, y: &ConvexMeasureSet| hausdorff_ccp(x, y).unwrap().value;
        prop_assert!(d(&a, &a).abs() <= 1e-9);
        prop_assert!((d(&a, &b) - d(&b, &a)).abs() <= 1e-9);
        prop_assert!(d(&a, &c) <= d(&a, &b) + d(&b, &c) + 1e-7);
    }

    #[test]
    fn canonical_hull_keeps_its_distances(seed in any::<u64>()) {
        let mut r = rng(seed, 2);
        let s = space(&mut r, 6);
        let (a, b) = (hull(&mut r, &s), hull(&mut r, &s));
        let canon = a.canonicalize().unwrap();
        prop_assert!(hausdorff_ccp(&a, &canon).unwrap().value <= 1e-7);
        let d1 = hausdorff_ccp(&a, &b).unwrap().value;
        let d2 = hausdorff_ccp(&canon, &b).unwrap().value;
        prop_assert!((d1 - d2).abs() <= 1e-7);
    }

    #[test]
    fn short_maps_compose_and_transfer(seed in any::<u64>()) {
        let mut r = rng(seed, 3);
        let m = r.gen_range(2..=7);
        let t = r.gen_range(1..=m);
        let inst = short_map_instance(&mut r, m, t).unwrap();
        let f = PointMap::new(&inst.source, &inst.target, inst.assignment.clone()).unwrap();
        let g = PointMap::constant(&inst.target, &inst.target, 0).unwrap();
        let fg = f.compose(&g).unwrap();
        prop_assert!(lipschitz_constant(&fg, 0.0).unwrap().lambda_star <= 1.0 + 1e-9);
        let (a, b) = (hull(&mut r, &inst.source), hull(&mut r, &inst.source));
        let before = hausdorff_ccp(&a, &b).unwrap().value;
        let after = hausdorff_ccp(&ccp_pushforward(&f, &a).unwrap(), &ccp_pushforward(&f, &b).unwrap()).unwrap().value;
        prop_assert!(after <= before + 1e-7);
    }

    #[test]
    fn lipschitz_constant_is_antitone_in_epsilon(seed in any::<u64>(), e1 in 0.0f64..3.0, e2 in 0.0f64..3.0) {
        let mut r = rng(seed, 4);
        let a = space(&mut r, 7);
        let b = space(&mut r, 7);
        let assignment = (0..a.len()).map(|_| r.gen_range(0..b.len())).collect();
        let f = PointMap::new(&a, &b, assignment).unwrap();
        let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
        let l_lo = lipschitz_constant(&f, lo).unwrap().lambda_star;
        let l_hi = lipschitz_constant(&f, hi).unwrap().lambda_star;
        prop_assert!(l_hi <= l_lo + 1e-9);
    }

    #[test]
    fn chains_coarsen_as_the_scale_grows(seed in any::<u64>(), c1 in 0.1f64..6.0, dc in 0.0f64..6.0) {
        let mut r = rng(seed, 5);
        let s = space(&mut r, 12);
        let small = chain_components(&s, c1).unwrap();
        let big = chain_components(&s, c1 + dc).unwrap();
        let mut owner = vec![0; s.len()];
        for (i, comp) in big.components.iter().enumerate() {
            comp.iter().for_each(|&x| owner[x] = i);
        }
        for comp in &small.components {
            prop_assert!(comp.iter().all(|&x| owner[x] == owner[comp[0]]));
        }
        prop_assert!(big.max_diameter >= small.max_diameter);
    }

    #[test]
    fn glued_metric_is_dominated_by_parts(seed in any::<u64>()) {
        let mut r = rng(seed, 6);
        let pts = sample::random_points(&mut r, 6, 2, 3.0);
        let labels: Vec<String> = (0..6).map(|i| format!("p{i}")).collect();
        let left = FiniteMetricSpace::euclidean(labels[..4].to_vec(), &pts[..4]).unwrap();
        let right = FiniteMetricSpace::from_fn(labels[2..].to_vec(), |i, j| {
            if i == j { 0.0 } else { pts[i + 2].iter().zip(&pts[j + 2]).map(|(a, b)| (a - b).abs()).sum() }
        }).unwrap();
        let glued = glue_maximal(&[left.clone(), right.clone()]).unwrap();
        let metric = &glued.space;
        prop_assert!(verify_metric(metric).unwrap().pass);
        for part in [&left, &right] {
            for i in 0..part.len() {
                for j in 0..part.len() {
                    let gi = metric.index_of(part.label(i)).unwrap();
                    let gj = metric.index_of(part.label(j)).unwrap();
                    prop_assert!(metric.dist(gi, gj) <= part.dist(i, j) + 1e-9);
                }
            }
        }
    }

    #[test]
    fn min_norm_point_satisfies_the_variational_inequality(seed in any::<u64>()) {
        let mut r = rng(seed, 7);
        let dim = r.gen_range(1..=6);
        let nv = r.gen_range(1..=12);
        let p = random_polytope(&mut r, dim, nv, 2.0).unwrap();
        let y = min_norm_point(&p);
        for v in p.vertices() {
            let vi: f64 = v.iter().zip(&y).map(|(a, b)| b * (a - b)).sum();
            prop_assert!(vi >= -1e-9);
        }
    }

    #[test]
    fn polytope_hausdorff_is_a_metric(seed in any::<u64>()) {
        let mut r = rng(seed, 8);
        let dim = r.gen_range(1..=4);
        let mut poly = || {
            let nv = r.gen_range(1..=6);
            random_polytope(&mut r, dim, nv, 2.0).unwrap()
        };
        let (a, b, c) = (poly(), poly(), poly());
        let d = |x: &Polytope, y: &Polytope| hausdorff_polytopes(x, y).unwrap();
        prop_assert!(d(&a, &a) <= 1e-9);
        prop_assert!((d(&a, &b) - d(&b, &a)).abs() <= 1e-9);
        prop_assert!(d(&a, &c) <= d(&a, &b) + d(&b, &c) + 1e-7);
    }

    #[test]
    fn barycenter_images_are_short(seed in any::<u64>()) {
        let mut r = rng(seed, 9);
        let m = r.gen_range(1..=6);
        let dim = r.gen_range(1..=3);
        let (s, coords) = random_euclidean_space(&mut r, m, dim, 3.0).unwrap();
        let (a, b) = (hull(&mut r, &s), hull(&mut r, &s));
        let ia = barycenter_image(&a, &coords).unwrap();
        let ib = barycenter_image(&b, &coords).unwrap();
        prop_assert!(hausdorff_polytopes(&ia, &ib).unwrap() <= hausdorff_ccp(&a, &b).unwrap().value + 1e-7);
    }
}
