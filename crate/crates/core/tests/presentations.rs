use std::collections::HashMap;

use median_lab_core::groups::{GroupModel, TwistSet};
use median_lab_core::presentation::*;
use proptest::prelude::*;

/// Brute-force isomorphism test for tables of equal order: map a generating
/// set, extend along a spanning tree, check the result is a bijective hom.
fn isomorphic(a: &FiniteGroupTable, b: &FiniteGroupTable) -> bool {
    if a.order() != b.order() || a.order_profile() != b.order_profile() || a.center_size() != b.center_size() {
        return false;
    }
    let n = a.order();
    // Greedy generating set of `a`.
    let mut gens = Vec::new();
    let mut span = vec![false; n];
    span[0] = true;
    let close = |gens: &[usize]| {
        let mut seen = vec![false; n];
        seen[0] = true;
        let mut stack = vec![0];
        while let Some(x) = stack.pop() {
            for &g in gens {
                let y = a.mul(x, g);
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        seen
    };
    while span.iter().any(|s| !s) {
        let g = (0..n).find(|&x| !span[x]).unwrap();
        gens.push(g);
        span = close(&gens);
    }
    let k = gens.len();
    let mut images = vec![0usize; k];
    loop {
        if gens.iter().zip(&images).all(|(&g, &h)| a.element_order(g) == b.element_order(h)) {
            let mut map = vec![usize::MAX; n];
            map[0] = 0;
            let mut stack = vec![0];
            let mut ok = true;
            while let Some(x) = stack.pop() {
                for (i, &g) in gens.iter().enumerate() {
                    let y = a.mul(x, g);
                    let fy = b.mul(map[x], images[i]);
                    if map[y] == usize::MAX {
                        map[y] = fy;
                        stack.push(y);
                    } else if map[y] != fy {
                        ok = false;
                    }
                }
            }
            if ok {
                let mut hit = vec![false; n];
                map.iter().for_each(|&m| hit[m] = true);
                if hit.iter().all(|&h| h) && (0..n).all(|x| (0..n).all(|y| map[a.mul(x, y)] == b.mul(map[x], map[y]))) {
                    return true;
                }
            }
        }
        let mut i = 0;
        loop {
            if i == k {
                return false;
            }
            images[i] += 1;
            if images[i] < n {
                break;
            }
            images[i] = 0;
            i += 1;
        }
    }
}

#[test]
fn catalog_classes_are_distinct() {
    let groups = small_groups(16).unwrap();
    // Number of isomorphism classes of groups of order 1..=16.
    let classes = [1, 1, 1, 2, 1, 2, 1, 5, 2, 2, 1, 5, 1, 2, 1, 14];
    for (order, &count) in classes.iter().enumerate() {
        assert_eq!(groups.iter().filter(|g| g.order() == order + 1).count(), count, "order {}", order + 1);
    }
    for (i, a) in groups.iter().enumerate() {
        assert!(isomorphic(a, a), "{}", a.name());
        for b in &groups[i + 1..] {
            assert!(!isomorphic(a, b), "{} ≅ {}", a.name(), b.name());
        }
    }
    assert!(isomorphic(&symmetric(3).unwrap(), &dihedral(3).unwrap()));
    assert!(isomorphic(&named_target("Z2xZ3").unwrap(), &cyclic(6).unwrap()));
}

#[test]
fn every_presentation_has_one_trivial_hom() {
    let trivial = named_target("trivial").unwrap();
    let ps = [
        lamplighter(),
        twisted_lamplighter(&TwistSet::empty()),
        twisted_lamplighter(&"all\\{2}".parse().unwrap()),
        von_dyck(2, 3, 7),
        triangle(2, 3, 7),
        extension_237(),
        surface(2).unwrap(),
    ];
    for p in &ps {
        assert_eq!(count_homs(p, &trivial, DEFAULT_HOM_BUDGET).unwrap().count, 1, "{}", p.name);
    }
}

#[test]
fn known_counts() {
    let z2 = cyclic(2).unwrap();
    let count = |p: &FinitePresentation, h: &FiniteGroupTable| count_homs(p, h, DEFAULT_HOM_BUDGET).unwrap().count;
    assert_eq!(count(&twisted_lamplighter(&TwistSet::empty()), &z2), 4);
    assert_eq!(count(&twisted_lamplighter(&TwistSet::all()), &z2), 8);
    assert_eq!(count(&von_dyck(2, 3, 7), &z2), 1);
    // Reflections: (tu)³ and (us)⁷ force s = t = u in ℤ/2.
    assert_eq!(count(&triangle(2, 3, 7), &z2), 2);
    // Hom(π₁Σ₂, ℤ/k) = (ℤ/k)⁴.
    assert_eq!(count(&surface(2).unwrap(), &cyclic(3).unwrap()), 81);
    // Hom(L₂, ℤ/2) = (ℤ/2)².
    assert_eq!(count(&lamplighter(), &z2), 4);
}

/// Abelian targets only see exponent sums: a hom to ℤ/k is a vector `v` with
/// `⟨sum(w), v⟩ ≡ 0 (mod k)` for every relator `w`.
fn abelian_count(p: &FinitePresentation, k: i64) -> u64 {
    let g = p.generators.len();
    let top = p.twist_horizon() + k;
    let mut sums: Vec<Vec<i64>> = Vec::new();
    let sum = |w: &Word| {
        let mut s = vec![0i64; g];
        w.iter().for_each(|&(i, e)| s[i] += e);
        s
    };
    sums.extend(p.relators.iter().map(|r| sum(&r.word)));
    for f in &p.families {
        sums.extend((f.n_min()..=top.max(f.n_min())).map(|n| sum(&f.word(n, p.twist.as_ref()))));
    }
    let total = (k as u64).pow(g as u32);
    (0..total)
        .filter(|&code| {
            let v: Vec<i64> = (0..g).map(|i| (code / (k as u64).pow(i as u32) % k as u64) as i64).collect();
            sums.iter().all(|s| s.iter().zip(&v).map(|(a, b)| a * b).sum::<i64>().rem_euclid(k) == 0)
        })
        .count() as u64
}

#[test]
fn abelian_counts_match_abelianization() {
    let ps = [
        lamplighter(),
        twisted_lamplighter(&TwistSet::empty()),
        twisted_lamplighter(&"{1,3}".parse().unwrap()),
        von_dyck(2, 3, 7),
        von_dyck(2, 4, 6),
        triangle(2, 2, 4),
        extension_237(),
        surface(2).unwrap(),
    ];
    for p in &ps {
        for k in [2, 3, 4, 6] {
            let h = cyclic(k as usize).unwrap();
            assert_eq!(count_homs(p, &h, DEFAULT_HOM_BUDGET).unwrap().count, abelian_count(p, k), "{} -> Z{k}", p.name);
        }
    }
    let klein = named_target("Z2xZ2").unwrap();
    for p in &ps {
        let z2 = count_homs(p, &cyclic(2).unwrap(), DEFAULT_HOM_BUDGET).unwrap().count;
        assert_eq!(count_homs(p, &klein, DEFAULT_HOM_BUDGET).unwrap().count, z2 * z2, "{}", p.name);
    }
}

#[test]
fn order_only_bound_would_overcount() {
    // I = {1}, ℤ/2, t ↦ 0: n = 1 alone leaves z free, n = 2 kills it.
    let p = twisted_lamplighter(&"{1}".parse().unwrap());
    let r = count_homs(&p, &cyclic(2).unwrap(), DEFAULT_HOM_BUDGET).unwrap();
    assert_eq!(r.count, 4);
    assert!(r.family_bound >= 2);
}

#[test]
fn finite_twists_die_in_finite_quotients() {
    // For finite I, n = k·ord(t) ∉ I gives [a, a] = z, so z ↦ 1 and the counts
    // coincide with those of the lamplighter group.
    let ps = [
        twisted_lamplighter(&"{1}".parse().unwrap()),
        twisted_lamplighter(&"{2}".parse().unwrap()),
        twisted_lamplighter(&TwistSet::empty()),
    ];
    for h in [cyclic(4).unwrap(), dihedral(4).unwrap(), quaternion(), symmetric(3).unwrap(), alternating4()] {
        let base = count_homs(&lamplighter(), &h, DEFAULT_HOM_BUDGET).unwrap().count;
        for p in &ps {
            assert_eq!(count_homs(p, &h, DEFAULT_HOM_BUDGET).unwrap().count, base, "{} -> {}", p.name, h.name());
        }
    }
}

#[test]
fn check_relators_is_periodic_past_the_horizon() {
    // Assignments into finite tables; pass/fail at n_bound = L + ord(t) never
    // changes when the bound grows.
    let sets: [TwistSet; 4] = [TwistSet::empty(), "{1,3}".parse().unwrap(), "all".parse().unwrap(), "all\\{2}".parse().unwrap()];
    for h in [dihedral(4).unwrap(), cyclic(4).unwrap(), named_target("Z2xZ4").unwrap()] {
        for set in &sets {
            let p = twisted_lamplighter(set);
            for a in 0..h.order() {
                for t in 0..h.order() {
                    for z in [0, 1.min(h.order() - 1)] {
                        let asg: HashMap<String, usize> =
                            [("a", a), ("t", t), ("z", z)].into_iter().map(|(k, v)| (k.to_string(), v)).collect();
                        let horizon = p.twist_horizon() + i64::from(h.element_order(t));
                        let short = check_relators(&p, &h, &asg, horizon).unwrap().pass;
                        let long = check_relators(&p, &h, &asg, horizon + 3 * h.order() as i64).unwrap().pass;
                        assert_eq!(short, long, "{} a={a} t={t} z={z}", p.name);
                    }
                }
            }
        }
    }
    // Untwisted lamplighter: n ≤ ord(t) already suffices.
    let h = dihedral(4).unwrap();
    let p = lamplighter();
    for a in 0..h.order() {
        for t in 0..h.order() {
            let asg: HashMap<String, usize> = [("a", a), ("t", t)].into_iter().map(|(k, v)| (k.to_string(), v)).collect();
            let ord = i64::from(h.element_order(t));
            assert_eq!(
                check_relators(&p, &h, &asg, ord).unwrap().pass,
                check_relators(&p, &h, &asg, 40).unwrap().pass
            );
        }
    }
}

#[test]
fn separation_verdicts() {
    let z2 = [cyclic(2).unwrap()];
    let v = separate(&twisted_lamplighter(&TwistSet::empty()), &twisted_lamplighter(&TwistSet::all()), &z2, DEFAULT_HOM_BUDGET)
        .unwrap();
    assert_eq!(v, Verdict::Separated { target: "Z2".into(), a: 4, b: 8 });
    let p = von_dyck(2, 3, 7);
    assert!(!separate(&p, &p, &z2, DEFAULT_HOM_BUDGET).unwrap().is_separated());
}

#[test]
fn unknown_generators_are_reported() {
    let p = lamplighter();
    let h = cyclic(2).unwrap();
    let asg: HashMap<String, usize> = [("a", 1), ("t", 0), ("w", 0)].into_iter().map(|(k, v)| (k.to_string(), v)).collect();
    assert_eq!(check_relators(&p, &h, &asg, 5), Err(PresentationError::UnknownGenerator("w".into())));
    let asg: HashMap<String, usize> = [("a", 1)].into_iter().map(|(k, v)| (k.to_string(), v)).collect();
    assert_eq!(check_relators(&p, &h, &asg, 5), Err(PresentationError::MissingAssignment("t".into())));
    assert_eq!(h.name(), GroupModel::name(&h));
}

fn rel_text(gens: &[&str], rels: &[String]) -> String {
    format!("gens: {}; rel: {}", gens.join(" "), rels.join(", "))
}

fn word_text(gens: &[&str], w: &[(usize, i64)]) -> String {
    if w.is_empty() {
        return "1".into();
    }
    w.iter().map(|&(g, e)| format!("{}^{e}", gens[g])).collect::<Vec<_>>().join(" ")
}

fn inverse(w: &[(usize, i64)]) -> Vec<(usize, i64)> {
    w.iter().rev().map(|&(g, e)| (g, -e)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn counts_ignore_relator_order_rotation_and_inversion(
        words in prop::collection::vec(prop::collection::vec((0usize..3, -3i64..=3), 1..6), 1..4),
        perm_seed in any::<u64>(),
        target in 0usize..4,
    ) {
        let gens = ["x", "y", "w"];
        let words: Vec<Vec<(usize, i64)>> = words.into_iter().map(|w| w.into_iter().filter(|l| l.1 != 0).collect()).collect();
        let h = [cyclic(3).unwrap(), symmetric(3).unwrap(), quaternion(), dihedral(4).unwrap()][target].clone();
        let base: Vec<String> = words.iter().map(|w| word_text(&gens, w)).collect();
        let p = FinitePresentation::parse(&rel_text(&gens, &base)).unwrap();
        let expected = count_homs(&p, &h, DEFAULT_HOM_BUDGET).unwrap().count;

        let mut variant: Vec<String> = words
            .iter()
            .enumerate()
            .map(|(i, w)| {
                let k = (perm_seed as usize >> i) % w.len().max(1);
                let mut r = w[k.min(w.len())..].to_vec();
                r.extend_from_slice(&w[..k.min(w.len())]);
                if (perm_seed >> (8 + i)) & 1 == 1 {
                    r = inverse(&r);
                }
                word_text(&gens, &r)
            })
            .collect();
        let len = variant.len();
        variant.rotate_left(perm_seed as usize % len);
        let q = FinitePresentation::parse(&rel_text(&gens, &variant)).unwrap();
        prop_assert_eq!(count_homs(&q, &h, DEFAULT_HOM_BUDGET).unwrap().count, expected);
    }

    #[test]
    fn parser_accepts_rendered_words(w in prop::collection::vec((0usize..3, -4i64..=4), 0..8)) {
        let gens = ["a", "b", "c"];
        let w: Vec<(usize, i64)> = w.into_iter().filter(|l| l.1 != 0).collect();
        let p = FinitePresentation::parse(&rel_text(&gens, &[word_text(&gens, &w)])).unwrap();
        // Exponent sums survive parsing and merging.
        let mut a = [0i64; 3];
        let mut b = [0i64; 3];
        w.iter().for_each(|&(g, e)| a[g] += e);
        p.relators[0].word.iter().for_each(|&(g, e)| b[g] += e);
        prop_assert_eq!(a, b);
        prop_assert!(p.relators[0].word.iter().all(|&(g, _)| g < 3));
    }
}
