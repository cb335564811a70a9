//! Worked examples checked against oracles computed here from first principles.

use hyperex_core::*;

fn two_point(d: f64) -> FiniteMetricSpace {
    FiniteMetricSpace::from_fn(vec!["a".into(), "b".into()], |_, _| d).unwrap()
}

fn euclid(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

#[test]
fn dirac_to_uniform_on_two_points() {
    let s = two_point(3.0);
    let mu = DiscreteMeasure::dirac(&s, 0).unwrap();
    let nu = DiscreteMeasure::new(&s, vec![0.5, 0.5]).unwrap();
    // couplings from a Dirac are forced; scan them anyway over the mass moved a→b
    let oracle = (0..=1000)
        .map(|i| i as f64 / 1000.0)
        .filter(|&t| (1.0 - t - 0.5).abs() < 1e-12)
        .map(|t| 3.0 * t)
        .fold(f64::INFINITY, f64::min);
    let k = kantorovich(&mu, &nu).unwrap();
    assert!((k.value - oracle).abs() < 1e-12);
    assert!((k.value - 1.5).abs() < 1e-12);
}

/// Distance from mass `p` on the first point to the segment of masses
/// between `lo` and `hi`, by grid.
fn grid_to_segment(p: f64, lo: f64, hi: f64, d: f64) -> f64 {
    (0..=1000)
        .map(|i| {
            let l = i as f64 / 1000.0;
            (p - (l * lo + (1.0 - l) * hi)).abs() * d
        })
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn point_to_hull_on_two_points() {
    let s = two_point(1.0);
    let mu = DiscreteMeasure::dirac(&s, 1).unwrap();
    let hull = ConvexMeasureSet::new(vec![
        DiscreteMeasure::dirac(&s, 0).unwrap(),
        DiscreteMeasure::new(&s, vec![0.25, 0.75]).unwrap(),
    ])
    .unwrap();
    let d = dist_point_to_hull(&mu, &hull).unwrap();
    let oracle = grid_to_segment(0.0, 1.0, 0.25, 1.0);
    assert!((d.value - oracle).abs() < 1e-9);
    assert!((d.value - 0.25).abs() < 1e-9);
}

#[test]
fn hausdorff_of_dirac_and_full_segment() {
    let s = two_point(1.0);
    let a = ConvexMeasureSet::dirac(&s, 0).unwrap();
    let b = ConvexMeasureSet::new(vec![
        DiscreteMeasure::dirac(&s, 0).unwrap(),
        DiscreteMeasure::dirac(&s, 1).unwrap(),
    ])
    .unwrap();
    let h = hausdorff_ccp(&a, &b).unwrap();
    let b_to_a = (0..=1000)
        .map(|i| grid_to_segment(i as f64 / 1000.0, 1.0, 1.0, 1.0))
        .fold(0.0, f64::max);
    assert!((h.value - b_to_a).abs() < 1e-9);
    assert!((h.value - 1.0).abs() < 1e-9);
    assert!(h.a_to_b.abs() < 1e-9);
}

fn segment_grid_min(a: &[f64], b: &[f64], steps: usize) -> Vec<f64> {
    (0..=steps)
        .map(|i| {
            let t = i as f64 / steps as f64;
            vec![a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]
        })
        .min_by(|p, q| euclid(p, &[0.0, 0.0]).total_cmp(&euclid(q, &[0.0, 0.0])))
        .unwrap()
}

#[test]
fn min_norm_point_on_segments() {
    for (a, b) in [([-1.0, 0.0], [0.0, 1.0]), ([0.0, 1.0], [0.1, 0.99])] {
        let y = min_norm_point(&Polytope::new(2, vec![a.to_vec(), b.to_vec()]).unwrap());
        let g = segment_grid_min(&a, &b, 1_000_000);
        assert!(euclid(&y, &g) < 1e-6, "{y:?} vs {g:?}");
    }
    let y = min_norm_point(&Polytope::new(2, vec![vec![0.0, 1.0], vec![0.1, 0.99]]).unwrap());
    assert!((y[0] - 0.0990).abs() < 1e-4 && (y[1] - 0.9901).abs() < 1e-4);
}

#[test]
fn hausdorff_of_nearby_segments() {
    let a = Polytope::new(2, vec![vec![0.0, 1.0], vec![0.1, 1.0]]).unwrap();
    let b = Polytope::new(2, vec![vec![0.0, 1.0], vec![0.1, 0.99]]).unwrap();
    let pts = |p: &Polytope| -> Vec<Vec<f64>> {
        let (u, v) = (&p.vertices()[0], &p.vertices()[1]);
        (0..=2000)
            .map(|i| {
                let t = i as f64 / 2000.0;
                vec![u[0] + t * (v[0] - u[0]), u[1] + t * (v[1] - u[1])]
            })
            .collect()
    };
    let (ga, gb) = (pts(&a), pts(&b));
    let directed = |x: &[Vec<f64>], y: &[Vec<f64>]| {
        x.iter()
            .map(|p| y.iter().map(|q| euclid(p, q)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    let oracle = directed(&ga, &gb).max(directed(&gb, &ga));
    let h = hausdorff_polytopes(&a, &b).unwrap();
    assert!((h - oracle).abs() < 1e-4);
    assert!((h - 0.01).abs() < 1e-4);
}

#[test]
fn x_n_over_g21_matches_a_hand_built_union() {
    let asm = build_assembly(
        AssemblyKind::XN,
        &AssemblyParams::new(vec![2], vec![1]).with_sample(SampleSpec::Minimal),
    )
    .unwrap();
    let coords = asm.coords();
    let m = coords.len();
    let anchors = asm.anchors();
    let mut d = vec![vec![f64::INFINITY; m]; m];
    for i in 0..m {
        d[i][i] = 0.0;
        for j in 0..m {
            let (p, q) = (&coords[i], &coords[j]);
            let linf = p.iter().zip(q).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            if anchors.contains(&i) && anchors.contains(&j) {
                d[i][j] = d[i][j].min(euclid(p, q));
            }
            let inner = |c: &[f64]| c.iter().all(|x| x.abs() == 1.0);
            let spoke = inner(p) && q.iter().zip(p).all(|(a, b)| *a == 2.0 * b);
            let back = inner(q) && p.iter().zip(q).all(|(a, b)| *a == 2.0 * b);
            let square = inner(p) && inner(q) && euclid(p, q) == 2.0;
            if spoke || back || square {
                d[i][j] = d[i][j].min(linf);
            }
        }
    }
    for k in 0..m {
        for i in 0..m {
            for j in 0..m {
                d[i][j] = d[i][j].min(d[i][k] + d[k][j]);
            }
        }
    }
    for i in 0..m {
        for j in 0..m {
            assert!((asm.space.dist(i, j) - d[i][j]).abs() < 1e-12, "{i} {j}");
        }
    }
    let find = |c: [f64; 2]| coords.iter().position(|p| p[..] == c[..]).unwrap();
    let v = asm.space.dist(find([0.0, 0.0]), find([1.0, 1.0]));
    assert!((v - (1.0 + 2.0 * 2f64.sqrt())).abs() < 1e-12);
}

#[test]
fn planar_projection_of_the_ambient_slice_is_short() {
    let asm = build_assembly(AssemblyKind::XprimeSlice, &AssemblyParams::new(vec![2, 3], vec![1, 2])).unwrap();
    let projected: Vec<Vec<f64>> = asm
        .points
        .iter()
        .map(|p| (0..2).map(|i| p.coords.get(i).copied().unwrap_or(0.0)).collect())
        .collect();
    let mut images: Vec<Vec<f64>> = Vec::new();
    let assignment: Vec<usize> = projected
        .iter()
        .map(|p| match images.iter().position(|q| q == p) {
            Some(i) => i,
            None => {
                images.push(p.clone());
                images.len() - 1
            }
        })
        .collect();
    let labels = (0..images.len()).map(|i| format!("y{i}")).collect();
    let target = FiniteMetricSpace::euclidean(labels, &images).unwrap();
    let f = PointMap::new(&asm.space, &target, assignment).unwrap();
    let lambda = lipschitz_constant(&f, 0.0).unwrap().lambda_star;
    let m = projected.len();
    let brute = (0..m)
        .flat_map(|i| (0..m).map(move |j| (i, j)))
        .filter(|&(i, j)| i != j)
        .map(|(i, j)| euclid(&projected[i], &projected[j]) / asm.space.dist(i, j))
        .fold(0.0, f64::max);
    assert!((lambda - brute).abs() < 1e-9);
    assert!(lambda <= 1.0 + 1e-9);
}

#[test]
fn glued_graph_and_corners_take_the_euclidean_diagonal() {
    let build = build_gnk(2, 1).unwrap();
    let g = gnk_metric(&build).unwrap();
    let corners: Vec<usize> = (0..g.len()).filter(|&i| !build.is_inner(i)).collect();
    assert_eq!(corners.len(), 4);
    let labels: Vec<String> = corners.iter().map(|&i| g.label(i).to_string()).collect();
    let pts: Vec<Vec<f64>> = corners.iter().map(|&i| build.coords_f64(i)).collect();
    let glued = glue_maximal(&[g.clone(), FiniteMetricSpace::euclidean(labels.clone(), &pts).unwrap()]).unwrap();
    let a = glued.space.index_of(&labels[0]).unwrap();
    let opposite = (1..4).find(|&j| pts[j].iter().zip(&pts[0]).all(|(x, y)| *x == -y)).unwrap();
    let b = glued.space.index_of(&labels[opposite]).unwrap();
    assert!((glued.space.dist(a, b) - 32f64.sqrt()).abs() < 1e-12);
    assert!(verify_metric(&glued.space).unwrap().pass);
}
