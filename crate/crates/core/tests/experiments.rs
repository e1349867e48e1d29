use median_lab_core::cocycle::{Extension, TrivialCocycle};
use median_lab_core::experiments::*;
use median_lab_core::groups::*;

fn check_ball<M: GroupModel>(model: &M, radius: u32) {
    let ball = cayley_ball(model, radius, 1_000_000).unwrap();
    let gens = model.generators();
    assert_eq!(ball.sphere_sizes[0], 1);
    assert_eq!(ball.sphere_sizes.iter().sum::<usize>(), ball.len());
    for r in 1..ball.sphere_sizes.len() {
        assert!(ball.sphere_sizes[r] <= ball.sphere_sizes[r - 1] * gens.len());
    }
    for (i, e) in ball.elements.iter().enumerate() {
        // Each element is found at its own index, so spheres are disjoint.
        assert_eq!(ball.find(model, e), Some(i));
        let word = ball.word(i);
        assert_eq!(word.len() as u32, ball.lengths[i]);
        if ball.lengths[i] > 0 {
            let (p, _) = ball.parents[i].unwrap();
            assert_eq!(ball.lengths[p] + 1, ball.lengths[i]);
        }
        // The word evaluates back to the element.
        let names: Vec<&str> = word.iter().map(String::as_str).collect();
        let idx: Vec<usize> = names.iter().map(|n| gens.iter().position(|g| g.name == *n).unwrap()).collect();
        assert!(model.eq(&eval_generator_word(model, &gens, &idx), e));
    }
}

#[test]
fn ball_invariants() {
    check_ball(&FreeAbelian::new(2).unwrap(), 4);
    check_ball(&FreeGroup::new(2).unwrap(), 3);
    check_ball(&Heisenberg, 4);
    check_ball(&Lamplighter, 5);
    check_ball(&TwistedLamplighter::new(TwistSet::empty()), 5);
    check_ball(&SurfaceGroup::new(2).unwrap(), 2);
}

#[test]
fn known_ball_sizes() {
    assert_eq!(cayley_ball(&FreeAbelian::new(2).unwrap(), 2, 100).unwrap().len(), 13);
    assert_eq!(cayley_ball(&FreeGroup::new(2).unwrap(), 3, 100).unwrap().sphere_sizes, vec![1, 4, 12, 36]);
    assert_eq!(cayley_ball(&SurfaceGroup::new(2).unwrap(), 2, 100).unwrap().len(), 65);
    assert!(matches!(cayley_ball(&ThompsonT, 1, 100), Err(ExperimentError::NotEnumerable(_))));
    assert!(matches!(
        cayley_ball(&FreeGroup::new(2).unwrap(), 4, 100),
        Err(ExperimentError::CapExceeded { cap: 100, radius: 4 })
    ));
}

#[test]
fn balls_do_not_depend_on_thread_count() {
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let b = cayley_ball(&Heisenberg, 6, 1_000_000).unwrap();
            (b.sphere_sizes.clone(), b.elements.clone(), b.parents.clone())
        })
    };
    assert_eq!(run(1), run(4));
}

#[test]
fn split_center_is_undistorted() {
    // ℤ² × ℤ with the center as a generator.
    let ext = Extension::new_unchecked(TrivialCocycle { base: FreeAbelian::new(2).unwrap() });
    let p = distortion_profile(&ext, &ext.central(), 8, 1_000_000).unwrap();
    assert_eq!(p.points.len(), 8);
    for pt in &p.points {
        assert_eq!(u64::from(pt.length), pt.k);
    }
    assert!((p.exponent.unwrap() - 1.0).abs() < 1e-9);
    let free_abelian = FreeAbelian::new(3).unwrap();
    let z = parse_word(&free_abelian, "c").unwrap();
    let q = distortion_profile(&free_abelian, &z, 6, 1_000_000).unwrap();
    assert!(q.points.iter().all(|pt| u64::from(pt.length) == pt.k));
}

#[test]
fn short_profiles_report_insufficient_data() {
    let g = TwistedLamplighter::new(TwistSet::empty());
    let p = distortion_profile(&g, &g.z(), 8, 1_000_000).unwrap();
    assert_eq!(p.points.len(), 1);
    assert_eq!(p.points[0].length, 8);
    assert_eq!(p.fit, "insufficient data");
    assert!(matches!(distortion_profile(&g, &g.a(), 2, 1000), Err(ExperimentError::NotCentral(_))));
}
