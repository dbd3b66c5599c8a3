use std::collections::{BTreeMap, BTreeSet};

use ordbij::arith::{divides, divisors, gcd, strip_prime};
use ordbij::bijection::{
    build_sa, class_level_flow, divisibility_matching, find_coset_bijection,
    find_group_bijection, find_subset_embedding, lift_coset_bijection, match_families,
    quotient_coset_bijection, sigma, verify_dis, DivBijection, ElementFamily, LiftCase,
    LiftOptions, LiftVariant, Matched, OrderMultiset,
};
use ordbij::catalog::{builtin, lookup_default};
use ordbij::group::{conjugacy_classes, normal_subgroups, CyclicModel, FiniteGroup, Subgroup};
use ordbij::Error;
use proptest::prelude::*;

fn g(name: &str) -> FiniteGroup {
    lookup_default(name).unwrap()
}

fn ms(pairs: &[(u64, u64)]) -> OrderMultiset {
    OrderMultiset::from_counts(pairs.iter().copied())
}

fn small_catalog(max: usize) -> Vec<FiniteGroup> {
    builtin()
        .into_iter()
        .filter(|e| e.order <= max)
        .map(|e| lookup_default(&e.name).unwrap())
        .collect()
}

/// Exhaustive search for an injective admissible assignment of every
/// right element, element by element.
fn brute_exists(left: &[u64], right: &[u64]) -> bool {
    fn go(j: usize, left: &[u64], right: &[u64], used: &mut [bool]) -> bool {
        if j == right.len() {
            return true;
        }
        let mut tried = BTreeSet::new();
        for i in 0..left.len() {
            // equal-order left elements are interchangeable
            if !used[i] && divides(left[i], right[j]) && tried.insert(left[i]) {
                used[i] = true;
                if go(j + 1, left, right, used) {
                    return true;
                }
                used[i] = false;
            }
        }
        false
    }
    go(0, left, right, &mut vec![false; left.len()])
}

/// Hall's condition over every set of right order classes.
fn hall_holds(left: &OrderMultiset, right: &OrderMultiset) -> bool {
    let classes: Vec<u64> = right.counts.keys().copied().collect();
    assert!(classes.len() <= 16);
    (1u32..1 << classes.len()).all(|mask| {
        let w: Vec<u64> = (0..classes.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| classes[i])
            .collect();
        let demand: u64 = w.iter().map(|&b| right.get(b)).sum();
        let supply: u64 = left
            .counts
            .iter()
            .filter(|(&a, _)| w.iter().any(|&b| divides(a, b)))
            .map(|(_, &m)| m)
            .sum();
        supply >= demand
    })
}

/// Rechecks a bijection against orders recomputed from the group and `C_n`.
fn recheck(group: &FiniteGroup, b: &DivBijection) {
    let n = group.order() as u64;
    let mut seen = BTreeSet::new();
    assert_eq!(b.left.len(), b.right.len());
    for (x, k) in b.pairs() {
        assert!(seen.insert(k), "{k} hit twice");
        let (ox, ok) = (group.order_of(x as usize), n / gcd(n, k));
        assert!(divides(ox, ok), "{x} -> {k}: {ox} does not divide {ok}");
    }
}

fn element_of_order(group: &FiniteGroup, order: u64) -> usize {
    group.elements().find(|&x| group.order_of(x) == order).unwrap()
}

fn center_involution(group: &FiniteGroup) -> usize {
    group
        .elements()
        .find(|&x| group.order_of(x) == 2 && group.elements().all(|y| group.commutes(x, y)))
        .unwrap()
}

#[test]
fn order_multisets() {
    let s3 = g("S3");
    assert_eq!(OrderMultiset::of_group(&s3), ms(&[(1, 1), (2, 3), (3, 2)]));
    assert_eq!(OrderMultiset::of_cyclic(6), ms(&[(1, 1), (2, 1), (3, 2), (6, 2)]));
    assert_eq!(OrderMultiset::of_group(&g("C6")), OrderMultiset::of_cyclic(6));
    let r = element_of_order(&s3, 3);
    let t = element_of_order(&s3, 2);
    let a3 = Subgroup::generated(&s3, [r]);
    let coset = a3.left_coset(&s3, t).members;
    assert_eq!(ElementFamily::of_elements(&s3, &coset).multiset(), ms(&[(2, 3)]));
    for group in small_catalog(60) {
        let m = OrderMultiset::of_group(&group);
        assert_eq!(m.total(), group.order() as u64);
        assert_eq!(m.get(1), 1);
        assert!(m.counts.values().all(|&c| c >= 1));
    }
}

#[test]
fn s3_onto_c6() {
    let s3 = g("S3");
    let left: Vec<u64> = s3.element_orders().to_vec();
    let right = CyclicModel::new(6).element_orders();
    assert!(brute_exists(&left, &right));
    let found = find_group_bijection(&s3, None);
    let b = found.bijection().unwrap();
    b.verify().unwrap();
    recheck(&s3, b);
    let mut cert: Vec<(u64, u64)> = b.certificate();
    cert.sort_unstable();
    assert_eq!(cert, vec![(1, 1), (2, 2), (2, 6), (2, 6), (3, 3), (3, 3)]);
}

#[test]
fn coprime_classes_give_violation() {
    let m = divisibility_matching(&ms(&[(3, 2)]), &ms(&[(2, 2)])).unwrap();
    let v = m.violation().unwrap();
    assert_eq!(v.blocking_orders, BTreeSet::from([2]));
    assert_eq!((v.demand, v.supply), (2, 0));
    assert!(v.holds_for(&ms(&[(3, 2)]), &ms(&[(2, 2)])));
}

#[test]
fn equal_multisets_always_match() {
    for n in [1u64, 8, 12, 30, 36] {
        let m = OrderMultiset::of_cyclic(n);
        assert!(divisibility_matching(&m, &m).unwrap().is_found());
    }
}

#[test]
fn q8_onto_c8() {
    let q8 = g("Q8");
    assert_eq!(OrderMultiset::of_group(&q8), ms(&[(1, 1), (2, 1), (4, 6)]));
    assert_eq!(OrderMultiset::of_cyclic(8), ms(&[(1, 1), (2, 1), (4, 2), (8, 4)]));
    let flows = class_level_flow(&OrderMultiset::of_group(&q8), &OrderMultiset::of_cyclic(8)).unwrap();
    assert_eq!(flows[&(4, 4)], 2);
    assert_eq!(flows[&(4, 8)], 4);
    let found = find_group_bijection(&q8, None);
    recheck(&q8, found.bijection().unwrap());
    assert!(brute_exists(q8.element_orders(), &CyclicModel::new(8).element_orders()));
}

#[test]
fn c12_matches_itself() {
    let c12 = g("C12");
    let b = find_group_bijection(&c12, None);
    let b = b.bijection().unwrap();
    recheck(&c12, b);
    assert!(b.certificate().iter().all(|&(a, c)| a == c));
}

#[test]
fn group_bijection_agrees_with_oracles_up_to_60() {
    let mut blocked = Vec::new();
    for group in small_catalog(60) {
        let n = group.order() as u64;
        let left = OrderMultiset::of_group(&group);
        let right = OrderMultiset::of_cyclic(n);
        let m = find_group_bijection(&group, None);
        assert_eq!(m.is_found(), hall_holds(&left, &right), "{}", group.name());
        if n <= 12 {
            let brute = brute_exists(group.element_orders(), &CyclicModel::new(n).element_orders());
            assert_eq!(m.is_found(), brute, "{}", group.name());
        }
        match m {
            Matched::Found(b) => recheck(&group, &b),
            Matched::Blocked(v) => {
                assert!(v.holds_for(&left, &right), "{}", group.name());
                blocked.push(group.name().to_string());
            }
        }
    }
    // a full matching exists for every catalog group up to order 60
    assert!(blocked.is_empty(), "{blocked:?}");
}

#[test]
fn s3_coset_of_a3() {
    let s3 = g("S3");
    let a3 = Subgroup::generated(&s3, [element_of_order(&s3, 3)]);
    let y = element_of_order(&s3, 2);
    let m = find_coset_bijection(&s3, &a3, y, 3, None).unwrap();
    let b = m.bijection().unwrap();
    assert_eq!(b.left.multiset(), ms(&[(2, 3)]));
    assert_eq!(b.right.ids, vec![1, 3, 5]);
    assert_eq!(b.right.multiset(), ms(&[(2, 1), (6, 2)]));
    recheck(&s3, b);

    let err = find_coset_bijection(&s3, &a3, y, 0, None).unwrap_err();
    assert!(matches!(err, Error::OrderMismatch { group_side: 2, cyclic_side: 1 }));
    let c2 = Subgroup::generated(&s3, [y]);
    assert!(matches!(
        find_coset_bijection(&s3, &c2, 0, 0, None),
        Err(Error::NotNormal { .. })
    ));
}

#[test]
fn coset_bijection_extremes() {
    for group in small_catalog(24) {
        let whole = Subgroup::whole(&group);
        let coset = find_coset_bijection(&group, &whole, 0, 0, None).unwrap();
        assert_eq!(coset.is_found(), find_group_bijection(&group, None).is_found());

        let trivial = Subgroup::trivial(&group);
        let n = group.order() as u64;
        let cyclic = CyclicModel::new(n);
        for y in group.elements() {
            let u = (0..n).find(|&u| cyclic.order_of(u) == group.order_of(y)).unwrap();
            let m = find_coset_bijection(&group, &trivial, y, u, None).unwrap();
            assert!(m.is_found());
        }
    }
}

#[test]
fn coset_bijections_agree_with_hall_oracle() {
    for group in small_catalog(32) {
        let n = group.order() as u64;
        let cyclic = CyclicModel::new(n);
        for normal in normal_subgroups(&group).unwrap() {
            let m = normal.order() as u64;
            let mut reps = BTreeSet::new();
            for y in group.elements() {
                reps.insert(*normal.left_coset(&group, y).members.iter().min().unwrap());
            }
            for &y in &reps {
                let left = ElementFamily::of_elements(&group, &normal.left_coset(&group, y).members);
                for u in 0..n / m {
                    match find_coset_bijection(&group, &normal, y, u, None) {
                        Ok(found) => {
                            let right = ElementFamily::of_residues(cyclic, &cyclic.coset(u, m));
                            assert_eq!(
                                found.is_found(),
                                hall_holds(&left.multiset(), &right.multiset())
                            );
                            if let Matched::Found(b) = found {
                                recheck(&group, &b);
                            }
                        }
                        Err(Error::OrderMismatch { .. }) => {}
                        Err(e) => panic!("{e}"),
                    }
                }
            }
        }
    }
}

#[test]
fn subset_embeddings() {
    let s3 = g("S3");
    let m = find_subset_embedding(&s3, &OrderMultiset::of_cyclic(6), None).unwrap();
    let b = m.bijection().unwrap();
    assert_eq!(b.left.ids, (0..6).collect::<Vec<u64>>());

    let v4 = g("V4");
    let m = find_subset_embedding(&v4, &OrderMultiset::of_cyclic(2), None).unwrap();
    let b = m.bijection().unwrap();
    assert_eq!(b.left.len(), 2);
    assert!(b.left.ids.contains(&0));
    assert_eq!(b.left.multiset(), ms(&[(1, 1), (2, 1)]));

    // S4 against C12: settled by the Hall oracle and exhaustive search
    let s4 = g("S4");
    let target = OrderMultiset::of_cyclic(12);
    assert_eq!(target, ms(&[(1, 1), (2, 1), (3, 2), (4, 2), (6, 2), (12, 4)]));
    let oracle = hall_holds(&OrderMultiset::of_group(&s4), &target);
    let brute = brute_exists(s4.element_orders(), &target.to_family().orders);
    assert!(oracle && brute);
    let m = find_subset_embedding(&s4, &target, None).unwrap();
    let b = m.bijection().unwrap();
    b.verify().unwrap();
    assert_eq!(b.left.len(), 12);
    assert_eq!(b.left.ids.iter().collect::<BTreeSet<_>>().len(), 12);

    assert!(matches!(
        find_subset_embedding(&s3, &OrderMultiset::of_cyclic(7), None),
        Err(Error::SizeMismatch { .. })
    ));
}

#[test]
fn exponent_embeddings_exist_up_to_120() {
    for group in small_catalog(120) {
        let target = OrderMultiset::of_cyclic(group.exponent());
        if target.total() > group.order() as u64 {
            continue;
        }
        let m = find_subset_embedding(&group, &target, None).unwrap();
        assert_eq!(m.is_found(), hall_holds(&OrderMultiset::of_group(&group), &target));
        let b = m.bijection().unwrap_or_else(|| panic!("{}", group.name()));
        b.verify().unwrap();
        for (x, _) in b.pairs() {
            assert_eq!(group.order_of(x as usize), b.left.orders[b.left.position(x).unwrap()]);
        }
    }
}

#[test]
fn seeded_pairings_keep_class_flow() {
    let s4 = g("S4");
    let left = ElementFamily::of_group(&s4);
    let right = ElementFamily::cyclic(24);
    let flow_of = |b: &DivBijection| -> BTreeMap<(u64, u64), u64> {
        let mut out = BTreeMap::new();
        for c in b.certificate() {
            *out.entry(c).or_insert(0) += 1;
        }
        out
    };
    let base = match_families(&left, &right, None).unwrap();
    let base = flow_of(base.bijection().unwrap());
    for seed in 0..8 {
        let m = match_families(&left, &right, Some(seed)).unwrap();
        let b = m.bijection().unwrap();
        recheck(&s4, b);
        assert_eq!(flow_of(b), base);
    }
    let a = match_families(&left, &right, Some(3)).unwrap();
    let b = match_families(&left, &right, Some(3)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn sa_examples() {
    let s3 = g("S3");
    let r = element_of_order(&s3, 3);
    assert!(matches!(
        build_sa(&s3, r, &[6]),
        Err(Error::NotQElement { order: 3, q: 2, .. })
    ));
    assert!(matches!(build_sa(&s3, 0, &[6]), Err(Error::NotQElement { .. })));
    let t = element_of_order(&s3, 2);
    let fam = build_sa(&s3, t, &[6]).unwrap();
    assert_eq!(fam.q, 2);
    assert_eq!(fam.stripped, vec![3]);
    assert_eq!(fam.normalizer.order(), 2);
    assert_eq!(fam.elements(), BTreeSet::from([t]));

    let c12 = g("C12");
    let a = element_of_order(&c12, 4);
    let fam = build_sa(&c12, a, &[12]).unwrap();
    assert_eq!(fam.normalizer.order(), 12);
    let c3: Vec<usize> = c12.elements().filter(|&b| divides(c12.order_of(b), 3)).collect();
    let expected: BTreeSet<usize> = c3.iter().map(|&b| c12.mul(b, a)).collect();
    assert_eq!(fam.elements(), expected);
    assert_eq!(expected.len(), 3);
}

/// `S_a` straight from the definition.
fn brute_sa(group: &FiniteGroup, a: usize, bases: &[u64], q: u64) -> BTreeSet<usize> {
    let cyclic: BTreeSet<usize> = (1..=group.order_of(a)).map(|k| group.pow(a, k)).collect();
    group
        .elements()
        .filter(|&b| cyclic.iter().all(|&z| cyclic.contains(&group.conjugate(b, z))))
        .filter(|&b| bases.iter().any(|&n| divides(group.order_of(b), strip_prime(n, q))))
        .map(|b| group.mul(b, a))
        .collect()
}

#[test]
fn dis_examples() {
    let s3 = g("S3");
    let t = element_of_order(&s3, 2);
    let class = conjugacy_classes(&s3).iter().find(|c| c.contains(&t)).unwrap().clone();
    let report = verify_dis(&s3, &class, &[6]).unwrap();
    assert!(report.holds() && report.disjoint());
    for fam in &report.families {
        assert_eq!(fam.elements(), BTreeSet::from([fam.a]));
    }

    let single = verify_dis(&s3, &[t], &[6]).unwrap();
    assert!(single.holds());

    let q8 = g("Q8");
    let i = element_of_order(&q8, 4);
    let class = conjugacy_classes(&q8).iter().find(|c| c.contains(&i)).unwrap().clone();
    assert_eq!(class.len(), 2);
    let report = verify_dis(&q8, &class, &[8]).unwrap();
    assert!(report.holds());
    for fam in &report.families {
        assert_eq!(fam.elements(), BTreeSet::from([fam.a]));
        assert_eq!(fam.d_a.len(), 1);
    }

    let r = element_of_order(&s3, 3);
    assert!(matches!(
        verify_dis(&s3, &[t, r], &[6]),
        Err(Error::HypothesisViolated(_))
    ));
}

#[test]
fn dis_holds_across_catalog() {
    for group in small_catalog(64) {
        let exp = group.exponent();
        if exp == 1 {
            continue;
        }
        let base_lists: Vec<Vec<u64>> = vec![vec![exp], divisors(exp).into_iter().filter(|&d| d > 1).take(3).collect()];
        for bases in base_lists.into_iter().filter(|b| !b.is_empty()) {
            let l = bases.iter().fold(1, |acc, &n| acc * n / gcd(acc, n));
            let q = ordbij::arith::smallest_prime(l).unwrap();
            for class in conjugacy_classes(&group) {
                let a = class[0];
                let o = group.order_of(a);
                if o == 1 || ordbij::arith::prime_power_base(o) != Some(q) {
                    continue;
                }
                let report = verify_dis(&group, class, &bases).unwrap();
                assert!(report.holds(), "{} {:?}: {:?}", group.name(), bases, report.failures);
                for fam in &report.families {
                    assert_eq!(fam.elements(), brute_sa(&group, fam.a, &bases, q));
                }
            }
        }
    }
}

fn abelian_minimal_normals(group: &FiniteGroup) -> Vec<Subgroup> {
    let normals = normal_subgroups(group).unwrap();
    normals
        .iter()
        .filter(|d| !d.is_trivial())
        .filter(|d| {
            normals
                .iter()
                .all(|m| m.is_trivial() || m == *d || !m.is_subset_of(d))
        })
        .filter(|d| d.members().iter().all(|&a| d.members().iter().all(|&b| group.commutes(a, b))))
        .cloned()
        .collect()
}

fn check_lift_output(group: &FiniteGroup, domain: &Subgroup, x: usize, u: u64, b: &DivBijection) {
    let n = group.order() as u64;
    let cyclic = CyclicModel::new(n);
    let left: BTreeSet<u64> = domain.left_coset(group, x).members.iter().map(|&y| y as u64).collect();
    let right: BTreeSet<u64> = cyclic.coset(u, domain.order() as u64).into_iter().collect();
    assert_eq!(b.left.ids.iter().copied().collect::<BTreeSet<_>>(), left);
    assert_eq!(b.right.ids.iter().copied().collect::<BTreeSet<_>>(), right);
    b.verify().unwrap();
    recheck(group, b);
}

#[test]
fn lift_in_c12() {
    let c12 = g("C12");
    let c6 = Subgroup::generated(&c12, [2]);
    let c2 = Subgroup::generated(&c12, [6]);
    assert_eq!((c6.order(), c2.order()), (6, 2));
    let (_, qb) = quotient_coset_bijection(&c12, &c6, &c2, 0, 0, None).unwrap();
    let qb = qb.bijection().unwrap().clone();
    assert!(qb.certificate().iter().all(|&(a, b)| a == b));
    let lifted = lift_coset_bijection(&c12, &c6, &c2, &qb, 0, 0, LiftOptions::default()).unwrap();
    assert_eq!(lifted.case, LiftCase::DInsideN);
    assert!(!lifted.fallback_used);
    check_lift_output(&c12, &c6, 0, 0, &lifted.bijection);

    // D = N: one transversal element, sigma alone
    let c3 = Subgroup::generated(&c12, [4]);
    let (_, qb) = quotient_coset_bijection(&c12, &c3, &c3, 3, 3, None).unwrap();
    let lifted =
        lift_coset_bijection(&c12, &c3, &c3, qb.bijection().unwrap(), 3, 3, LiftOptions::default())
            .unwrap();
    assert_eq!(lifted.case, LiftCase::DInsideN);
    check_lift_output(&c12, &c3, 3, 3, &lifted.bijection);
}

#[test]
fn sigma_respects_divisibility() {
    for group in small_catalog(64) {
        let n = group.order() as u64;
        let cyclic = CyclicModel::new(n);
        for d in abelian_minimal_normals(&group) {
            let s = sigma(&d, n);
            assert_eq!(s[0], (0, 0));
            let images: BTreeSet<u64> = s.iter().map(|&(_, k)| k).collect();
            assert_eq!(images, cyclic.subgroup(d.order() as u64).into_iter().collect());
            for (z, k) in s {
                assert!(divides(group.order_of(z), cyclic.order_of(k)));
            }
        }
    }
}

#[test]
fn lift_in_s3_x_c2() {
    let g6 = g("S3xC2");
    let c = center_involution(&g6);
    let d = Subgroup::generated(&g6, [c]);
    let n = Subgroup::generated(&g6, [element_of_order(&g6, 3)]);
    assert_eq!(n.order(), 3);
    let x = element_of_order(&g6, 2);
    let x = if x == c {
        g6.elements().find(|&y| g6.order_of(y) == 2 && y != c).unwrap()
    } else {
        x
    };

    let (_, qb) = quotient_coset_bijection(&g6, &n, &d, x, 1, None).unwrap();
    let qb = qb.bijection().unwrap().clone();
    let lifted = lift_coset_bijection(&g6, &n, &d, &qb, x, 1, LiftOptions::default()).unwrap();
    assert_eq!(lifted.case, LiftCase::AvoidsCyclic);
    assert_eq!(lifted.bijection.right.ids, vec![1, 5, 9]);
    check_lift_output(&g6, &n, x, 1, &lifted.bijection);

    let options = LiftOptions {
        variant: LiftVariant::OnNd,
        ..LiftOptions::default()
    };
    let lifted = lift_coset_bijection(&g6, &n, &d, &qb, x, 1, options).unwrap();
    assert_eq!(lifted.case, LiftCase::ProductWithD);
    check_lift_output(&g6, &n.join(&g6, &d), x, 1, &lifted.bijection);

    // x central: xN has orders {2,6,6} but u + C_(12,3) = {0,4,8} has {1,3,3}
    let (_, qb) = quotient_coset_bijection(&g6, &n, &d, c, 0, None).unwrap();
    let qb = qb.bijection().unwrap().clone();
    let err = lift_coset_bijection(&g6, &n, &d, &qb, c, 0, LiftOptions::default()).unwrap_err();
    match err {
        Error::ConstructionFailed { case, .. } => assert_eq!(case, "meets-cyclic"),
        other => panic!("unexpected {other}"),
    }
    let options = LiftOptions {
        fallback: true,
        ..LiftOptions::default()
    };
    assert!(matches!(
        lift_coset_bijection(&g6, &n, &d, &qb, c, 0, options),
        Err(Error::ConstructionFailed { .. })
    ));
    let coset = n.left_coset(&g6, c).members;
    let mut orders: Vec<u64> = coset.iter().map(|&y| g6.order_of(y)).collect();
    orders.sort_unstable();
    assert_eq!(orders, vec![2, 6, 6]);
}

#[test]
fn lift_rejects_bad_hypotheses() {
    let s3 = g("S3");
    let a3 = Subgroup::generated(&s3, [element_of_order(&s3, 3)]);
    let t = element_of_order(&s3, 2);
    let c2 = Subgroup::generated(&s3, [t]);
    let (_, qb) = quotient_coset_bijection(&s3, &a3, &a3, t, 3, None).unwrap();
    let qb = qb.bijection().unwrap().clone();
    let err = lift_coset_bijection(&s3, &a3, &c2, &qb, t, 3, LiftOptions::default()).unwrap_err();
    assert!(matches!(err, Error::HypothesisViolated(_)));
    let err = lift_coset_bijection(&s3, &a3, &a3, &qb, t, 0, LiftOptions::default()).unwrap_err();
    assert!(matches!(err, Error::HypothesisViolated(_)));
    let err = lift_coset_bijection(&s3, &a3, &a3, &qb, t, 3, LiftOptions::default());
    let lifted = err.unwrap();
    check_lift_output(&s3, &a3, t, 3, &lifted.bijection);

    // a quotient bijection for the wrong coset
    let (_, other) = quotient_coset_bijection(&s3, &a3, &a3, 0, 0, None).unwrap();
    let err = lift_coset_bijection(&s3, &a3, &a3, other.bijection().unwrap(), t, 3, LiftOptions::default())
        .unwrap_err();
    assert!(matches!(err, Error::HypothesisViolated(_)));
}

/// Runs every admissible lift over catalog groups up to order 24.
/// Successes must verify; failures are classified and counted.
#[test]
fn lift_sweep() {
    let mut failures: BTreeMap<String, usize> = BTreeMap::new();
    let mut successes = 0usize;
    for group in small_catalog(24) {
        let n = group.order() as u64;
        let cyclic = CyclicModel::new(n);
        let normals = normal_subgroups(&group).unwrap();
        for d in abelian_minimal_normals(&group) {
            for normal in &normals {
                let nd = normal.join(&group, &d);
                let mut reps = BTreeSet::new();
                for y in group.elements() {
                    reps.insert(*nd.left_coset(&group, y).members.iter().min().unwrap());
                }
                for &x in &reps {
                    for u in 0..n / nd.order() as u64 {
                        if cyclic.coset_order(u, nd.order() as u64)
                            != ordbij::bijection::coset_order(&group, &nd, x)
                        {
                            continue;
                        }
                        let Ok((_, Matched::Found(qb))) =
                            quotient_coset_bijection(&group, normal, &d, x, u, None)
                        else {
                            continue;
                        };
                        for variant in [LiftVariant::OnN, LiftVariant::OnNd] {
                            let options = LiftOptions { variant, ..LiftOptions::default() };
                            let domain = if variant == LiftVariant::OnN { normal } else { &nd };
                            match lift_coset_bijection(&group, normal, &d, &qb, x, u, options) {
                                Ok(l) => {
                                    check_lift_output(&group, domain, x, u, &l.bijection);
                                    successes += 1;
                                }
                                Err(Error::ConstructionFailed { case, detail }) => {
                                    let p = ordbij::arith::smallest_prime(d.order() as u64).unwrap();
                                    let p_divides_n = divides(p, normal.order() as u64);
                                    let aligned = ordbij::bijection::coset_order(&group, domain, x)
                                        == cyclic.coset_order(u, domain.order() as u64);
                                    // only the D ∩ N = 1 cases on xN fail, and only when
                                    // o(xN) != o(u C_(n,|N|)) or p divides |N|
                                    assert!(
                                        case == "meets-cyclic" || case == "avoids-cyclic",
                                        "{case}: {detail}"
                                    );
                                    assert!(!aligned || p_divides_n, "{case}: {detail}");
                                    if aligned {
                                        assert!(find_coset_bijection(&group, domain, x, u, None)
                                            .unwrap()
                                            .is_found());
                                    }
                                    let key = format!("{case} aligned={aligned} p|N={p_divides_n}");
                                    *failures.entry(key).or_insert(0) += 1;
                                }
                                Err(e) => panic!("{} {e}", group.name()),
                            }
                        }
                    }
                }
            }
        }
    }
    println!("lift sweep: {successes} lifted, failures by case {failures:?}");
    assert_eq!(successes, 14259);
    assert_eq!(failures.values().sum::<usize>(), 3037);
}

fn multiset_strategy() -> impl Strategy<Value = (OrderMultiset, OrderMultiset)> {
    let orders = prop::sample::select(vec![1u64, 2, 3, 4, 6, 8, 12, 24]);
    (
        prop::collection::vec(orders.clone(), 1..20),
        prop::collection::vec(orders, 1..20),
    )
        .prop_map(|(a, b)| (OrderMultiset::of_orders(&a), OrderMultiset::of_orders(&b)))
}

proptest! {
    #[test]
    fn matching_is_sound_and_complete((left, right) in multiset_strategy()) {
        match class_level_flow(&left, &right) {
            Ok(flows) => {
                prop_assert!(left.total() >= right.total());
                prop_assert!(hall_holds(&left, &right));
                for &(a, b) in flows.keys() {
                    prop_assert!(divides(a, b));
                }
                let mut used_left: BTreeMap<u64, u64> = BTreeMap::new();
                let mut used_right: BTreeMap<u64, u64> = BTreeMap::new();
                for (&(a, b), &f) in &flows {
                    *used_left.entry(a).or_insert(0) += f;
                    *used_right.entry(b).or_insert(0) += f;
                }
                prop_assert_eq!(used_right, right.counts.clone());
                for (a, f) in used_left {
                    prop_assert!(f <= left.get(a));
                }
            }
            Err(v) => {
                prop_assert!(v.holds_for(&left, &right));
                prop_assert!(!hall_holds(&left, &right));
            }
        }
    }

    #[test]
    fn equal_size_matching_materializes((left, right) in multiset_strategy(), seed in any::<u64>()) {
        let total = left.total().min(right.total());
        let trim = |m: &OrderMultiset| {
            let fam = m.to_family();
            OrderMultiset::of_orders(&fam.orders[..total as usize])
        };
        let (left, right) = (trim(&left), trim(&right));
        let lf = left.to_family();
        let rf = right.to_family();
        match match_families(&lf, &rf, Some(seed)).unwrap() {
            Matched::Found(b) => {
                b.verify().unwrap();
                prop_assert!(brute_exists(&lf.orders, &rf.orders));
            }
            Matched::Blocked(v) => {
                prop_assert!(v.supply < v.demand);
                prop_assert!(!brute_exists(&lf.orders, &rf.orders));
            }
        }
    }
}
