use std::collections::BTreeSet;

use ordbij::arith::{divides, gcd};
use ordbij::bijection::{divisibility_matching, Matched, OrderMultiset};
use ordbij::catalog::{builtin, lookup_default};
use ordbij::group::{
    normal_subgroups, structural_predicates, FiniteGroup, DEFAULT_LATTICE_CAP,
};
use ordbij::lab::{
    batch_verify, catalog_items, check_am, check_bij, check_min, classify, AmShape, BatchItem,
    BatchOptions, Outcome, Property, ReportStore,
};
use ordbij::Error;

fn g(name: &str) -> FiniteGroup {
    lookup_default(name).unwrap()
}

fn catalog(max: usize) -> Vec<FiniteGroup> {
    builtin()
        .into_iter()
        .filter(|e| e.order <= max)
        .map(|e| lookup_default(&e.name).unwrap())
        .collect()
}

fn fixed() -> BatchOptions {
    BatchOptions {
        fixed_timestamp: Some("2001-09-09T01:46:40Z".into()),
        ..BatchOptions::default()
    }
}

fn hall_holds(left: &OrderMultiset, right: &OrderMultiset) -> bool {
    let classes: Vec<u64> = right.counts.keys().copied().collect();
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

/// Strict Min membership recomputed from raw multiplication and residues.
/// Returns `(member, coset pairs checked)`.
fn brute_min(group: &FiniteGroup) -> (bool, usize) {
    let n = group.order() as u64;
    let mut member = true;
    let mut pairs = 0;
    for normal in normal_subgroups(group).unwrap() {
        let m = normal.order() as u64;
        let set: BTreeSet<usize> = normal.members().iter().copied().collect();
        let mut done = BTreeSet::new();
        for y in group.elements() {
            if done.contains(&y) {
                continue;
            }
            let coset: Vec<usize> = set.iter().map(|&z| group.mul(y, z)).collect();
            done.extend(coset.iter().copied());
            // smallest k >= 1 with y^k in N
            let mut k = 1;
            let mut p = y;
            while !set.contains(&p) {
                p = group.mul(p, y);
                k += 1;
            }
            let left = OrderMultiset::of_orders(
                &coset.iter().map(|&x| group.order_of(x)).collect::<Vec<_>>(),
            );
            let step = n / m;
            for u in 0..step {
                // the coset u + <step> has order step / gcd(u, step) in C_n / C_{n,m}
                if step / gcd(u, step) != k {
                    continue;
                }
                let orders: Vec<u64> = (0..m).map(|j| {
                    let r = (u + j * step) % n;
                    n / gcd(r, n)
                }).collect();
                pairs += 1;
                member &= hall_holds(&left, &OrderMultiset::of_orders(&orders));
            }
        }
    }
    (member, pairs)
}

#[test]
fn bij_membership() {
    assert!(check_bij(&g("S3"), None).in_bij);
    for n in 1..=30 {
        assert!(check_bij(&FiniteGroup::cyclic(format!("C{n}"), n), None).in_bij);
    }
    let a5 = check_bij(&g("A5"), Some(7));
    assert!(a5.in_bij);
    assert!(a5.certificate.bijection().unwrap().verify().is_ok());
}

#[test]
fn min_matches_brute_force_up_to_24() {
    for group in catalog(24) {
        let m = check_min(&group, DEFAULT_LATTICE_CAP).unwrap();
        let (member, pairs) = brute_min(&group);
        assert_eq!(m.in_min, member, "{}", group.name());
        assert_eq!(m.cases.len(), pairs, "{}", group.name());
        assert_eq!(m.in_min, m.counterexample.is_none());
    }
}

#[test]
fn min_examples() {
    let s3 = check_min(&g("S3"), DEFAULT_LATTICE_CAP).unwrap();
    assert!(s3.in_min && s3.in_min_existential);
    // normals 1, A3, S3 with 6 + 2 + 1 cosets
    assert_eq!((s3.normals, s3.cosets), (3, 9));
    // trivial N: every y pairs with the phi(o(y)) residues of that order
    let trivial: Vec<_> = s3.cases.iter().filter(|c| c.normal_order == 1).collect();
    assert_eq!(trivial.len(), 1 + 3 + 2 * 2);
    assert!(trivial.iter().all(|c| c.found));
}

#[test]
fn solvable_groups_are_in_min_up_to_64() {
    for group in catalog(64) {
        let normals = normal_subgroups(&group).unwrap();
        if !structural_predicates(&group, &normals).is_solvable {
            continue;
        }
        let m = check_min(&group, DEFAULT_LATTICE_CAP).unwrap();
        assert!(m.in_min, "{}: {:?}", group.name(), m.counterexample);
        assert!(!m.readings_differ());
    }
}

#[test]
fn s5_is_in_min() {
    let m = check_min(&g("S5"), DEFAULT_LATTICE_CAP).unwrap();
    assert_eq!(m.normals, 3);
    assert_eq!(m.cosets, 120 + 2 + 1);
    // A5 cosets: A5 -> u = 0 (order 1), odd coset -> u = 1 (order 2)
    assert_eq!(m.cases.iter().filter(|c| c.normal_order == 60).count(), 2);
    assert!(m.in_min, "{:?}", m.counterexample);
}

#[test]
fn min_implies_bij_and_counterexamples_replay() {
    for group in catalog(64) {
        let m = check_min(&group, DEFAULT_LATTICE_CAP).unwrap();
        if m.in_min {
            assert!(check_bij(&group, None).in_bij, "{}", group.name());
        }
        if let Some(c) = &m.counterexample {
            match divisibility_matching(&c.left, &c.right).unwrap() {
                Matched::Blocked(v) => assert_eq!(v, c.violation),
                Matched::Found(_) => panic!("{} counterexample matches", group.name()),
            }
        }
    }
}

#[test]
fn am_classification() {
    let s5 = check_am(&g("S5"), DEFAULT_LATTICE_CAP).unwrap();
    for w in [s5.strict.as_ref().unwrap(), s5.loose.as_ref().unwrap()] {
        assert_eq!(w.y_order, 2);
        assert_eq!(w.normal_order, 60);
        assert_eq!(w.shape, AmShape::Simple);
        let group = g("S5");
        let perm = group.permutation(w.y).unwrap();
        let moved = (0..perm.degree()).filter(|&i| perm.image(i) != i).count();
        assert_eq!(moved, 2);
    }
    for name in ["C6", "S4", "Q8", "S3"] {
        let am = check_am(&g(name), DEFAULT_LATTICE_CAP).unwrap();
        assert!(!am.is_semisimple && !am.in_am_strict() && !am.in_am_loose(), "{name}");
    }
    // vacuously semisimple, but without a minimal normal subgroup
    let c1 = check_am(&g("C1"), DEFAULT_LATTICE_CAP).unwrap();
    assert!(c1.is_semisimple && !c1.in_am_loose());
    // loose: y = 1; strict: an involution of A5 itself
    let a5 = check_am(&g("A5"), DEFAULT_LATTICE_CAP).unwrap();
    assert_eq!(a5.loose.as_ref().unwrap().y, 0);
    assert_eq!(a5.strict.as_ref().unwrap().y_order, 2);
    assert!(!a5.readings_differ());
}

#[test]
fn am_product_of_copies() {
    // N = A5 x A5 swapped by the wreath involution
    let w = g("A5wrC2");
    let am = check_am(&w, DEFAULT_LATTICE_CAP).unwrap();
    let strict = am.strict.unwrap();
    assert_eq!(strict.normal_order, 3600);
    assert_eq!(strict.shape, AmShape::Copies { copies: 2, factor_order: 60 });
    // A5 x A5 has no y moving one factor to the other
    let p = check_am(&g("A5xA5"), DEFAULT_LATTICE_CAP).unwrap();
    assert!(p.is_semisimple);
    assert!(!p.in_am_strict() && !p.in_am_loose());
}

#[test]
fn classify_is_consistent() {
    for group in catalog(24) {
        let c = classify(&group, DEFAULT_LATTICE_CAP, None).unwrap();
        assert_eq!(c.in_bij, c.bij.certificate.is_found());
        assert!(!c.min.in_min || c.in_bij);
        assert_eq!(c.is_semisimple, c.am.is_semisimple);
    }
    let tiny = classify(&g("S3"), 2, None);
    assert!(matches!(tiny, Err(Error::LatticeCapExceeded { .. })));
}

#[test]
fn batch_bij_up_to_24() {
    let items = catalog_items(
        &builtin().into_iter().filter(|e| e.order <= 24).collect::<Vec<_>>(),
        10_000,
    )
    .unwrap();
    let summary = batch_verify(&items, &[Property::Bij], &fixed(), None).unwrap();
    assert_eq!(summary.verified, items.len());
    assert_eq!(summary.refuted + summary.skipped, 0);
    let keys: Vec<(usize, String)> =
        summary.reports.iter().map(|r| (r.order, r.group.clone())).collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
}

#[test]
fn empty_catalog_gives_no_reports() {
    let summary = batch_verify(&[], &Property::ALL, &fixed(), None).unwrap();
    assert!(summary.reports.is_empty());
    assert_eq!(summary.verified + summary.refuted + summary.skipped, 0);
}

#[test]
fn s5_min_report() {
    let items = vec![BatchItem::Group(g("S5"))];
    let summary = batch_verify(&items, &[Property::Min], &fixed(), None).unwrap();
    let r = &summary.reports[0];
    assert_eq!(r.outcome, Outcome::Verified);
    let w = r.witness.as_ref().unwrap();
    assert_eq!(w["normals"], 3);
    assert_eq!(w["cosets"], 123);
}

#[test]
fn cap_and_lattice_overflow_are_skipped() {
    let entries: Vec<_> = builtin().into_iter().filter(|e| e.name == "S6" || e.name == "S3").collect();
    let items = catalog_items(&entries, 100).unwrap();
    assert!(matches!(items[1], BatchItem::Skipped { order: 720, .. }));
    let summary = batch_verify(&items, &Property::ALL, &fixed(), None).unwrap();
    assert_eq!(summary.skipped, 4);
    assert_eq!(summary.verified, 4);

    let tight = BatchOptions { lattice_cap: 2, ..fixed() };
    let s = batch_verify(&items[..1], &[Property::Min, Property::Am], &tight, None).unwrap();
    assert!(s.reports.iter().all(|r| r.outcome == Outcome::SkippedCap));
}

#[test]
fn store_is_append_only_and_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let entries: Vec<_> = builtin().into_iter().filter(|e| e.order <= 12).collect();
    let items = catalog_items(&entries, 10_000).unwrap();
    let props = [Property::Bij, Property::Min, Property::Psi];

    let mut runs = Vec::new();
    for jobs in [1, 4] {
        let path = dir.path().join(format!("r{jobs}.jsonl"));
        let store = ReportStore::open(&path).unwrap();
        let options = BatchOptions { jobs, ..fixed() };
        batch_verify(&items, &props, &options, Some(&store)).unwrap();
        let first = std::fs::read_to_string(&path).unwrap();
        batch_verify(&items, &props, &options, Some(&store)).unwrap();
        let both = std::fs::read_to_string(&path).unwrap();
        assert!(both.starts_with(&first));
        assert_eq!(both.len(), 2 * first.len());
        runs.push(first);
    }
    assert_eq!(runs[0], runs[1]);

    let line = runs[0].lines().next().unwrap();
    let v: serde_json::Value = serde_json::from_str(line).unwrap();
    let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
    assert_eq!(keys.len(), 7);
    let order = ["\"ts\"", "\"group\"", "\"order\"", "\"property\"", "\"outcome\"", "\"witness\"", "\"ms\""];
    let pos: Vec<usize> = order.iter().map(|k| line.find(k).unwrap()).collect();
    assert!(pos.windows(2).all(|w| w[0] < w[1]));
    assert_eq!(v["ts"], "2001-09-09T01:46:40Z");
    assert_eq!(v["ms"], 0);
}

#[test]
fn unwritable_store_is_a_persistence_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("missing").join("r.jsonl");
    assert!(matches!(ReportStore::open(&path), Err(Error::Persistence { .. })));
}

#[test]
fn psi_property_reports_values() {
    let items = vec![BatchItem::Group(g("S3")), BatchItem::Group(g("C6"))];
    let s = batch_verify(&items, &[Property::Psi], &fixed(), None).unwrap();
    assert_eq!(s.verified, 2);
    let w = s.reports.iter().find(|r| r.group == "S3").unwrap().witness.clone().unwrap();
    assert_eq!(w["comparisons"][0]["group"], "13");
    assert_eq!(w["comparisons"][0]["cyclic"], "21");
}

#[test]
fn property_names_round_trip() {
    for p in Property::ALL {
        assert_eq!(p.to_string().parse::<Property>().unwrap(), p);
    }
    assert!("nope".parse::<Property>().is_err());
}
