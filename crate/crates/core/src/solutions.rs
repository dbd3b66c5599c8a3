//! Solution sets `L^(m)`, the `(n_1, .., n_k)`-group predicate, families of
//! `d`-subgroups and chains.
//!
//! Everything here depends on elements only through their orders: `x` solves
//! `x^m = 1` iff `o(x) | m`.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::arith::{divides, divisors, euler_phi, gcd};
use crate::error::{Error, Result};
use crate::group::{FiniteGroup, Subgroup};

/// Default bound on the size of a divisor closure whose antichains are enumerated.
pub const ANTICHAIN_LIMIT: usize = 24;
pub const D_SUBGROUP_MAX_D: u64 = 12;
pub const D_SUBGROUP_CAP: usize = 10_000;

/// `Div(n_1, .., n_k)`: the union of the divisor sets of the base.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DivisorSet {
    base: Vec<u64>,
    closure: Vec<u64>,
}

impl DivisorSet {
    pub fn new(base: &[u64]) -> Result<Self> {
        if base.is_empty() {
            return Err(Error::EmptyExponents);
        }
        if base.contains(&0) {
            return Err(Error::HypothesisViolated("zero in divisor base".into()));
        }
        let closure: BTreeSet<u64> = base.iter().flat_map(|&n| divisors(n)).collect();
        Ok(DivisorSet {
            base: base.to_vec(),
            closure: closure.into_iter().collect(),
        })
    }

    pub fn base(&self) -> &[u64] {
        &self.base
    }

    /// Ascending.
    pub fn closure(&self) -> &[u64] {
        &self.closure
    }

    pub fn contains(&self, d: u64) -> bool {
        self.closure.binary_search(&d).is_ok()
    }

    /// Every nonempty antichain of the closure under divisibility.
    pub fn antichains(&self, limit: usize) -> Result<Vec<Vec<u64>>> {
        if self.closure.len() > limit {
            return Err(Error::AntichainExplosion {
                size: self.closure.len(),
                limit,
            });
        }
        let mut out = Vec::new();
        let mut current = Vec::new();
        extend_antichains(&self.closure, 0, &mut current, &mut out);
        Ok(out)
    }
}

fn extend_antichains(items: &[u64], start: usize, current: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
    for i in start..items.len() {
        let d = items[i];
        // items ascend, so an earlier pick can only divide d
        if current.iter().any(|&c| divides(c, d)) {
            continue;
        }
        current.push(d);
        out.push(current.clone());
        extend_antichains(items, i + 1, current, out);
        current.pop();
    }
}

/// The members of `s` not dividing another member.
pub fn maximal_elements(s: &[u64]) -> Vec<u64> {
    let set: BTreeSet<u64> = s.iter().copied().collect();
    set.iter()
        .copied()
        .filter(|&a| !set.iter().any(|&b| b != a && divides(a, b)))
        .collect()
}

/// `L^(s_1, .., s_h)` within a family given by element ids and orders.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SolutionSet {
    pub exponents: Vec<u64>,
    pub members: Vec<usize>,
}

impl SolutionSet {
    pub fn new(ids: &[usize], orders: &[u64], exponents: &[u64]) -> Result<Self> {
        if exponents.is_empty() {
            return Err(Error::EmptyExponents);
        }
        let mut members: Vec<usize> = ids
            .iter()
            .zip(orders)
            .filter(|&(_, &o)| exponents.iter().any(|&s| divides(o, s)))
            .map(|(&id, _)| id)
            .collect();
        members.sort_unstable();
        Ok(SolutionSet {
            exponents: exponents.to_vec(),
            members,
        })
    }

    pub fn of_group(group: &FiniteGroup, exponents: &[u64]) -> Result<Self> {
        let ids: Vec<usize> = group.elements().collect();
        Self::new(&ids, group.element_orders(), exponents)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// `|L^(m)|` over a family of element orders.
pub fn solution_count(orders: &[u64], m: u64) -> usize {
    orders.iter().filter(|&&o| divides(o, m)).count()
}

/// `|L^(m)(C_n)| = gcd(m, n)`.
pub fn cyclic_solution_count(n: u64, m: u64) -> u64 {
    gcd(m, n)
}

pub fn union_solution_count(orders: &[u64], exponents: &[u64]) -> Result<usize> {
    if exponents.is_empty() {
        return Err(Error::EmptyExponents);
    }
    Ok(orders
        .iter()
        .filter(|&&o| exponents.iter().any(|&s| divides(o, s)))
        .count())
}

/// `|L^(s_1, .., s_h)(C_n)|` by inclusion-exclusion over the maximal exponents:
/// `C_{n,a} ∩ C_{n,b} = C_{n,gcd(a,b)}`.
pub fn cyclic_union_count(n: u64, exponents: &[u64]) -> Result<u64> {
    if exponents.is_empty() {
        return Err(Error::EmptyExponents);
    }
    let reduced: Vec<u64> =
        maximal_elements(&exponents.iter().map(|&s| gcd(s, n)).collect::<Vec<_>>());
    let k = reduced.len();
    assert!(
        k < 32,
        "too many incomparable exponents for inclusion-exclusion"
    );
    let mut total: i128 = 0;
    for mask in 1u32..(1 << k) {
        let g = (0..k)
            .filter(|i| mask >> i & 1 == 1)
            .fold(0, |acc, i| gcd(acc, reduced[i]));
        let sign = if mask.count_ones() % 2 == 1 { 1 } else { -1 };
        total += sign * g as i128;
    }
    Ok(total as u64)
}

/// `|L^(S)(C_n)|` as the sum of `phi(d)` over divisors `d | n` dividing some exponent.
pub fn cyclic_union_count_by_phi(n: u64, exponents: &[u64]) -> u64 {
    divisors(n)
        .into_iter()
        .filter(|&d| exponents.iter().any(|&s| divides(d, s)))
        .map(euler_phi)
        .sum()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum NkVerdict {
    Holds {
        antichains_checked: usize,
    },
    Fails {
        antichain: Vec<u64>,
        family_count: u64,
        cyclic_count: u64,
    },
}

impl NkVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, NkVerdict::Holds { .. })
    }
}

/// Whether a family with the given element orders is an `(n_1, .., n_k)`-group
/// inside an ambient group of order `ambient`.
///
/// Only antichains of `Div(n_1, .., n_k)` are tested: for `s | t`,
/// `L^(s) ⊆ L^(t)` on both sides, so dropping non-maximal exponents changes
/// neither count.
pub fn is_nk_group(orders: &[u64], ambient: u64, bases: &[u64]) -> Result<NkVerdict> {
    is_nk_group_with_limit(orders, ambient, bases, ANTICHAIN_LIMIT)
}

pub fn is_nk_group_with_limit(
    orders: &[u64],
    ambient: u64,
    bases: &[u64],
    limit: usize,
) -> Result<NkVerdict> {
    let div = DivisorSet::new(bases)?;
    if let Some(&bad) = bases.iter().find(|&&b| !divides(b, ambient)) {
        return Err(Error::HypothesisViolated(format!(
            "base {bad} does not divide {ambient}"
        )));
    }
    let antichains = div.antichains(limit)?;
    let profile = OrderProfile::new(orders);
    for antichain in &antichains {
        let family_count = profile.union_count(antichain);
        let cyclic_count = cyclic_union_count_by_phi(ambient, antichain);
        if family_count < cyclic_count {
            return Ok(NkVerdict::Fails {
                antichain: antichain.clone(),
                family_count,
                cyclic_count,
            });
        }
    }
    Ok(NkVerdict::Holds {
        antichains_checked: antichains.len(),
    })
}

/// Order histogram of a family, for repeated union counts.
struct OrderProfile(BTreeMap<u64, u64>);

impl OrderProfile {
    fn new(orders: &[u64]) -> Self {
        let mut counts = BTreeMap::new();
        for &o in orders {
            *counts.entry(o).or_insert(0) += 1;
        }
        OrderProfile(counts)
    }

    fn union_count(&self, exponents: &[u64]) -> u64 {
        self.0
            .iter()
            .filter(|&(&o, _)| exponents.iter().any(|&s| divides(o, s)))
            .map(|(_, &c)| c)
            .sum()
    }
}

/// `N(d, G)`, possibly truncated at the cap.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DSubgroups {
    pub d: u64,
    pub subsets: Vec<Vec<usize>>,
    pub truncated: bool,
}

/// All `d`-element subsets of `L^(d)(G)` that are `d`-groups, up to `cap`.
///
/// The `d`-group property depends only on how many elements of each order a
/// subset takes, so admissible order compositions are found first and then
/// expanded into concrete subsets in lexicographic order.
pub fn enumerate_d_subgroups(group: &FiniteGroup, d: u64, cap: usize) -> Result<DSubgroups> {
    if d > D_SUBGROUP_MAX_D {
        return Err(Error::HypothesisViolated(format!(
            "d = {d} exceeds the d-subgroup search limit {D_SUBGROUP_MAX_D}"
        )));
    }
    let n = group.order() as u64;
    if !divides(d, n) {
        return Err(Error::HypothesisViolated(format!(
            "{d} does not divide {n}"
        )));
    }
    let mut classes: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
    for x in group.elements() {
        let o = group.order_of(x);
        if divides(o, d) {
            classes.entry(o).or_default().push(x);
        }
    }
    let class_list: Vec<(u64, Vec<usize>)> = classes.into_iter().collect();
    let mut compositions = Vec::new();
    compose(
        &class_list,
        0,
        d as usize,
        &mut Vec::new(),
        &mut compositions,
    );

    let mut out = DSubgroups {
        d,
        subsets: Vec::new(),
        truncated: false,
    };
    for counts in compositions {
        let orders: Vec<u64> = class_list
            .iter()
            .zip(&counts)
            .flat_map(|((o, _), &c)| std::iter::repeat_n(*o, c))
            .collect();
        if !is_nk_group(&orders, n, &[d])?.holds() {
            continue;
        }
        if !expand(&class_list, &counts, 0, &mut Vec::new(), &mut out, cap) {
            out.truncated = true;
            break;
        }
    }
    Ok(out)
}

fn compose(
    classes: &[(u64, Vec<usize>)],
    i: usize,
    remaining: usize,
    current: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if i == classes.len() {
        if remaining == 0 {
            out.push(current.clone());
        }
        return;
    }
    for c in 0..=remaining.min(classes[i].1.len()) {
        current.push(c);
        compose(classes, i + 1, remaining - c, current, out);
        current.pop();
    }
}

/// Pushes every subset with the given per-class counts; false once the cap is hit.
fn expand(
    classes: &[(u64, Vec<usize>)],
    counts: &[usize],
    i: usize,
    current: &mut Vec<usize>,
    out: &mut DSubgroups,
    cap: usize,
) -> bool {
    if i == classes.len() {
        if out.subsets.len() >= cap {
            return false;
        }
        let mut subset = current.clone();
        subset.sort_unstable();
        out.subsets.push(subset);
        return true;
    }
    let pool = &classes[i].1;
    let mut ok = true;
    for_each_combination(pool.len(), counts[i], &mut |picked| {
        if !ok {
            return;
        }
        let before = current.len();
        current.extend(picked.iter().map(|&j| pool[j]));
        ok = expand(classes, counts, i + 1, current, out, cap);
        current.truncate(before);
    });
    ok
}

fn for_each_combination(n: usize, k: usize, f: &mut dyn FnMut(&[usize])) {
    fn rec(n: usize, k: usize, start: usize, acc: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if acc.len() == k {
            f(acc);
            return;
        }
        for j in start..n {
            if n - j < k - acc.len() {
                break;
            }
            acc.push(j);
            rec(n, k, j + 1, acc, f);
            acc.pop();
        }
    }
    rec(n, k, 0, &mut Vec::new(), f);
}

/// An assignment `d -> A(d)` over `Div(n_1, .., n_k)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Chain {
    pub divisors: DivisorSet,
    pub assignment: BTreeMap<u64, Vec<usize>>,
}

impl Chain {
    pub fn member(&self, d: u64) -> Option<&[usize]> {
        self.assignment.get(&d).map(Vec::as_slice)
    }
}

/// Bound on candidate checks during chain backtracking.
const CHAIN_SEARCH_BUDGET: usize = 200_000;

/// Searches for a chain, trying in order for each divisor `d` (ascending):
/// cyclic subgroups of order `d`, the subgroup generated by the members
/// already chosen for divisors of `d`, `G` itself for `d = |G|`, and finally
/// the `d`-subgroup family when `d` is small.
pub fn build_chain(group: &FiniteGroup, bases: &[u64]) -> Result<Chain> {
    let n = group.order() as u64;
    let divisor_set = DivisorSet::new(bases)?;
    if let Some(&bad) = bases.iter().find(|&&b| !divides(b, n)) {
        return Err(Error::HypothesisViolated(format!(
            "base {bad} does not divide {n}"
        )));
    }
    let mut search = ChainSearch {
        group,
        n,
        closure: divisor_set.closure().to_vec(),
        assignment: BTreeMap::new(),
        budget: CHAIN_SEARCH_BUDGET,
        deepest_failure: 1,
    };
    if search.assign(0) {
        Ok(Chain {
            divisors: divisor_set,
            assignment: search.assignment,
        })
    } else {
        Err(Error::NoChain {
            divisor: search.deepest_failure,
        })
    }
}

struct ChainSearch<'a> {
    group: &'a FiniteGroup,
    n: u64,
    closure: Vec<u64>,
    assignment: BTreeMap<u64, Vec<usize>>,
    budget: usize,
    deepest_failure: u64,
}

impl ChainSearch<'_> {
    fn assign(&mut self, i: usize) -> bool {
        if i == self.closure.len() {
            return true;
        }
        let d = self.closure[i];
        for candidate in self.candidates(d) {
            if self.budget == 0 {
                break;
            }
            self.budget -= 1;
            if !self.compatible(d, &candidate) {
                continue;
            }
            self.assignment.insert(d, candidate);
            if self.assign(i + 1) {
                return true;
            }
            self.assignment.remove(&d);
        }
        self.deepest_failure = self.deepest_failure.max(d);
        false
    }

    fn candidates(&self, d: u64) -> Vec<Vec<usize>> {
        let g = self.group;
        let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
        let mut out = Vec::new();
        let mut push = |members: Vec<usize>| {
            if members.len() as u64 == d && seen.insert(members.clone()) {
                out.push(members);
            }
        };
        for x in g.elements().filter(|&x| g.order_of(x) == d) {
            push(Subgroup::generated(g, [x]).members().to_vec());
        }
        let seeds: Vec<usize> = self
            .assignment
            .iter()
            .filter(|&(&q, _)| q < d && divides(q, d))
            .flat_map(|(_, a)| a.iter().copied())
            .collect();
        push(g.generate(seeds.iter().copied()).0);
        // the union of the members below d, padded from L^(d) outside every
        // other member, small orders first and then large orders first
        let mut union: Vec<usize> = seeds;
        union.sort_unstable();
        union.dedup();
        let blocked: BTreeSet<usize> = self
            .assignment
            .iter()
            .filter(|&(&q, _)| !divides(q, d))
            .flat_map(|(_, a)| a.iter().copied())
            .collect();
        let mut pool: Vec<usize> = g
            .elements()
            .filter(|&x| {
                divides(g.order_of(x), d)
                    && union.binary_search(&x).is_err()
                    && !blocked.contains(&x)
            })
            .collect();
        let need = (d as usize).saturating_sub(union.len());
        if pool.len() >= need {
            pool.sort_by_key(|&x| (g.order_of(x), x));
            let mut padded: Vec<usize> = union
                .iter()
                .copied()
                .chain(pool[..need].iter().copied())
                .collect();
            padded.sort_unstable();
            push(padded);
            pool.sort_by_key(|&x| (std::cmp::Reverse(g.order_of(x)), x));
            let mut padded: Vec<usize> = union
                .iter()
                .copied()
                .chain(pool[..need].iter().copied())
                .collect();
            padded.sort_unstable();
            push(padded);
        }
        if d == self.n {
            push(g.elements().collect());
        }
        if d <= D_SUBGROUP_MAX_D {
            if let Ok(family) = enumerate_d_subgroups(g, d, D_SUBGROUP_CAP) {
                for subset in family.subsets {
                    push(subset);
                }
            }
        }
        out
    }

    fn compatible(&self, d: u64, candidate: &[usize]) -> bool {
        let g = self.group;
        if candidate.len() as u64 != d || !candidate.iter().all(|&x| divides(g.order_of(x), d)) {
            return false;
        }
        let orders: Vec<u64> = candidate.iter().map(|&x| g.order_of(x)).collect();
        if !matches!(is_nk_group(&orders, self.n, &[d]), Ok(v) if v.holds()) {
            return false;
        }
        self.assignment.iter().all(|(&q, a)| {
            let meet = intersect(candidate, a);
            self.assignment.get(&gcd(q, d)) == Some(&meet)
        })
    }
}

fn intersect(a: &[usize], b: &[usize]) -> Vec<usize> {
    let set: BTreeSet<usize> = b.iter().copied().collect();
    a.iter().copied().filter(|x| set.contains(x)).collect()
}

/// Exhaustive recheck of both chain conditions. Returns a description of the
/// first violation.
pub fn verify_chain(group: &FiniteGroup, chain: &Chain) -> std::result::Result<(), String> {
    let n = group.order() as u64;
    let closure = chain.divisors.closure();
    let residue_orders: Vec<u64> = (0..n).map(|k| n / gcd(n, k)).collect();
    for &d in closure {
        let a = chain
            .member(d)
            .ok_or_else(|| format!("no member for divisor {d}"))?;
        if a.len() as u64 != d {
            return Err(format!("A({d}) has {} elements", a.len()));
        }
        if let Some(&x) = a.iter().find(|&&x| !divides(group.order_of(x), d)) {
            return Err(format!(
                "A({d}) contains {x} of order {}",
                group.order_of(x)
            ));
        }
        // every subset of Div(d), not just antichains
        let sub = divisors(d);
        if sub.len() > 16 {
            return Err(format!("Div({d}) too large for the exhaustive check"));
        }
        for mask in 1u32..(1 << sub.len()) {
            let s: Vec<u64> = (0..sub.len())
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| sub[i])
                .collect();
            let have = a
                .iter()
                .filter(|&&x| s.iter().any(|&e| divides(group.order_of(x), e)))
                .count() as u64;
            let need = residue_orders
                .iter()
                .filter(|&&o| s.iter().any(|&e| divides(o, e)))
                .count() as u64;
            if have < need {
                return Err(format!("A({d}) fails the count for {s:?}: {have} < {need}"));
            }
        }
    }
    for &q in closure {
        for &s in closure {
            let meet = intersect(chain.member(q).unwrap(), chain.member(s).unwrap());
            if chain.member(gcd(q, s)) != Some(meet.as_slice()) {
                return Err(format!("A({q}) ∩ A({s}) != A({})", gcd(q, s)));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn antichains_of_div_6() {
        let div = DivisorSet::new(&[6]).unwrap();
        let mut got = div.antichains(24).unwrap();
        got.sort();
        assert_eq!(got, vec![vec![1], vec![2], vec![2, 3], vec![3], vec![6]]);
    }

    #[test]
    fn explosion_is_reported() {
        let div = DivisorSet::new(&[720]).unwrap();
        assert!(matches!(
            div.antichains(24),
            Err(Error::AntichainExplosion {
                size: 30,
                limit: 24
            })
        ));
    }

    #[test]
    fn empty_exponents_rejected() {
        assert!(matches!(DivisorSet::new(&[]), Err(Error::EmptyExponents)));
        assert!(matches!(
            union_solution_count(&[1], &[]),
            Err(Error::EmptyExponents)
        ));
        assert!(matches!(
            cyclic_union_count(6, &[]),
            Err(Error::EmptyExponents)
        ));
    }

    #[test]
    fn cyclic_union_examples() {
        assert_eq!(cyclic_union_count(12, &[4, 6]).unwrap(), 8);
        assert_eq!(cyclic_union_count(12, &[1]).unwrap(), 1);
        assert_eq!(cyclic_union_count(12, &[2, 4, 3]).unwrap(), 6);
    }

    #[test]
    fn maximal_elements_drop_divisors() {
        assert_eq!(maximal_elements(&[2, 4, 3, 6, 1]), vec![4, 6]);
    }

    #[test]
    fn combinations_enumerate_in_order() {
        let mut seen = Vec::new();
        for_each_combination(4, 2, &mut |c| seen.push(c.to_vec()));
        assert_eq!(seen.len(), 6);
        assert_eq!(seen[0], vec![0, 1]);
        assert_eq!(seen[5], vec![2, 3]);
    }
}
