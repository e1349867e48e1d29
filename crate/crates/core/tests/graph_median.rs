use median_lab_core::graph::*;
use median_lab_core::median::*;
use proptest::prelude::*;

fn kind_strategy() -> impl Strategy<Value = GraphKind> {
    prop_oneof![
        (1u32..=4).prop_map(|k| GraphKind::Hypercube { k }),
        (1usize..=4, 1usize..=4).prop_map(|(rows, cols)| GraphKind::Grid { rows, cols }),
        (1usize..=9).prop_map(|n| GraphKind::Path { n }),
        (3usize..=9).prop_map(|n| GraphKind::Cycle { n }),
        (1usize..=14, any::<u64>()).prop_map(|(n, seed)| GraphKind::RandomTree { n, seed }),
        (2usize..=12, 0usize..=6, any::<u64>()).prop_map(|(n, extra, seed)| GraphKind::RandomConnected { n, extra, seed }),
        (2usize..=5).prop_map(|n| GraphKind::Complete { n }),
    ]
}

/// Floyd–Warshall, independent of the BFS distances.
fn floyd(g: &Graph) -> Vec<Vec<u32>> {
    let n = g.n();
    let inf = u32::MAX / 4;
    let mut d = vec![vec![inf; n]; n];
    for (v, row) in d.iter_mut().enumerate() {
        row[v] = 0;
    }
    for (u, v) in g.edges() {
        d[u][v] = 1;
        d[v][u] = 1;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    d
}

/// Medians by definition: vertices with d(x,m)+d(m,y) = d(x,y) for all three pairs.
fn naive_is_median(d: &[Vec<u32>]) -> bool {
    let n = d.len();
    let on = |x: usize, y: usize, m: usize| d[x][m] + d[m][y] == d[x][y];
    (0..n).all(|x| {
        (0..n).all(|y| (0..n).all(|z| (0..n).filter(|&m| on(x, y, m) && on(y, z, m) && on(x, z, m)).count() == 1))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn intervals_follow_the_definition(kind in kind_strategy(), delta in 0u32..4) {
        let g = generate(&kind).unwrap();
        let dm = all_pairs_distances(&g);
        let fw = floyd(&g);
        let n = g.n();
        for x in 0..n {
            for y in 0..n {
                prop_assert_eq!(dm.get(x, y), fw[x][y]);
                let iv = delta_interval(&g, &dm, IntervalQuery::new(x, y, delta));
                let expected: Vec<usize> = (0..n)
                    .filter(|&z| (i64::from(fw[x][y]) - i64::from(fw[x][z]) - i64::from(fw[z][y])).unsigned_abs() <= u64::from(delta))
                    .collect();
                prop_assert_eq!(&iv, &expected);
                let wider = delta_interval(&g, &dm, IntervalQuery::new(x, y, delta + 1));
                prop_assert!(iv.iter().all(|z| wider.contains(z)));
                prop_assert_eq!(&iv, &delta_interval(&g, &dm, IntervalQuery::new(y, x, delta)));
                let geo = delta_interval(&g, &dm, IntervalQuery::new(x, y, 0));
                prop_assert!(geo.contains(&x) && geo.contains(&y));
            }
        }
    }

    #[test]
    fn product_distances_add(a in kind_strategy(), b in kind_strategy()) {
        let ga = generate(&a).unwrap();
        let gb = generate(&b).unwrap();
        prop_assume!(ga.n() * gb.n() <= 200);
        let p = l1_product(&ga, &gb).unwrap();
        let (da, db, dp) = (floyd(&ga), floyd(&gb), all_pairs_distances(&p));
        let nb = gb.n();
        for x in 0..p.n() {
            for y in 0..p.n() {
                prop_assert_eq!(dp.get(x, y), da[x / nb][y / nb] + db[x % nb][y % nb]);
            }
        }
    }

    #[test]
    fn frontier_at_zero_matches_median_check(kind in kind_strategy()) {
        let g = generate(&kind).unwrap();
        let dm = all_pairs_distances(&g);
        let report = check_median(&g, &dm);
        let fw = floyd(&g);
        prop_assert_eq!(report.is_median, naive_is_median(&fw));
        let fr = almost_median_frontier(&g, &dm, 3);
        let e0 = fr.entry(0).unwrap();
        prop_assert_eq!(e0.feasible && e0.max_diameter == Some(0), report.is_median);
        // Feasibility is monotone and Δ(δ) non-decreasing.
        let mut last: Option<u32> = None;
        let mut seen_feasible = false;
        for e in &fr.entries {
            if seen_feasible {
                prop_assert!(e.feasible);
            }
            if e.feasible {
                seen_feasible = true;
                let d = e.max_diameter.unwrap();
                if let Some(prev) = last {
                    prop_assert!(d >= prev);
                }
                last = Some(d);
            }
        }
    }

    #[test]
    fn hyperplanes_count_distances_on_median_graphs(kind in kind_strategy()) {
        let g = generate(&kind).unwrap();
        let dm = all_pairs_distances(&g);
        let hs = hyperplanes(&g, &dm);
        if !check_median(&g, &dm).is_median {
            prop_assert!(hs.is_err());
            return Ok(());
        }
        let hs = hs.unwrap();
        for h in &hs {
            let sides: Vec<usize> = (0..g.n()).map(|v| h.side_of(v)).collect();
            prop_assert!(sides.contains(&0) && sides.contains(&1));
        }
        for x in 0..g.n() {
            for y in 0..g.n() {
                prop_assert_eq!(separating_count(&hs, x, y) as u32, dm.get(x, y));
            }
        }
    }

    #[test]
    fn quasi_line_windows_are_exact(lambda in 1u32..=4, lo in -6i64..=0, len in 1i64..=25) {
        let g = generate(&GraphKind::QuasiLine { lambda, lo, hi: lo + len }).unwrap();
        let dm = all_pairs_distances(&g);
        for i in 0..g.n() {
            for j in 0..g.n() {
                let gap = (i as i64 - j as i64).unsigned_abs() as u32;
                prop_assert_eq!(dm.get(i, j), gap.div_ceil(lambda));
            }
        }
    }
}

#[test]
fn hypercube_dimensions() {
    for k in 1..=4 {
        let g = generate(&GraphKind::Hypercube { k }).unwrap();
        let dm = all_pairs_distances(&g);
        let hs = hyperplanes(&g, &dm).unwrap();
        assert_eq!(hs.len(), k as usize);
        assert_eq!(cubical_dimension(&hs).unwrap(), k as usize);
    }
}

#[test]
fn median_product_of_median_graphs() {
    // Products of median graphs are median; frontiers of the factors bound the product's.
    let pairs = [
        (GraphKind::Path { n: 4 }, GraphKind::Path { n: 3 }),
        (GraphKind::Cycle { n: 6 }, GraphKind::Path { n: 2 }),
        (GraphKind::Cycle { n: 5 }, GraphKind::Cycle { n: 4 }),
        (GraphKind::Complete { n: 3 }, GraphKind::Path { n: 3 }),
        (GraphKind::RandomTree { n: 6, seed: 3 }, GraphKind::Cycle { n: 6 }),
    ];
    for (a, b) in pairs {
        let (ga, gb) = (generate(&a).unwrap(), generate(&b).unwrap());
        let p = l1_product(&ga, &gb).unwrap();
        let frontier = |g: &Graph| almost_median_frontier(g, &all_pairs_distances(g), 6);
        let (fa, fb, fp) = (frontier(&ga), frontier(&gb), frontier(&p));
        let ((da, big_a), (db, big_b)) = (fa.least_feasible().unwrap(), fb.least_feasible().unwrap());
        let (dp, _) = fp.least_feasible().unwrap();
        assert!(dp <= da + db, "{a:?} x {b:?}: {dp} > {da} + {db}");
        // I_δ of the product lies inside the product of the factors' I_δ, so
        // Δ_p(δ) ≤ Δ_a(δ) + Δ_b(δ) at δ = δ_a + δ_b.
        let sum = da + db;
        let at_sum = fp.entry(sum).unwrap();
        assert!(at_sum.feasible);
        let bound = fa.entry(sum).unwrap().max_diameter.unwrap() + fb.entry(sum).unwrap().max_diameter.unwrap();
        assert!(at_sum.max_diameter.unwrap() <= bound, "{a:?} x {b:?}: Δ {:?} > {bound}", at_sum.max_diameter);
        assert!(big_a <= fa.entry(sum).unwrap().max_diameter.unwrap() && big_b <= fb.entry(sum).unwrap().max_diameter.unwrap());
        let ma = check_median(&ga, &all_pairs_distances(&ga)).is_median;
        let mb = check_median(&gb, &all_pairs_distances(&gb)).is_median;
        if ma && mb {
            assert!(check_median(&p, &all_pairs_distances(&p)).is_median);
        }
    }
}

#[test]
fn least_parameters_do_not_simply_add() {
    // C6 has least parameters (2, 3) and P2 has (0, 0), yet the product at
    // δ = 2 has Δ = 4: the extra slack lets the path factor spread.
    let c6 = generate(&GraphKind::Cycle { n: 6 }).unwrap();
    let p2 = generate(&GraphKind::Path { n: 2 }).unwrap();
    let p = l1_product(&c6, &p2).unwrap();
    let f = |g: &Graph| almost_median_frontier(g, &all_pairs_distances(g), 3);
    assert_eq!(f(&c6).least_feasible(), Some((2, 3)));
    assert_eq!(f(&p2).least_feasible(), Some((0, 0)));
    assert_eq!(f(&p).least_feasible(), Some((2, 4)));
}
