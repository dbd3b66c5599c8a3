//! Order-divisibility bijections.
//!
//! A bijection `f: A -> B` between element families is admissible when
//! `o(x) | o(f(x))` for every `x`. Admissibility depends only on orders, so
//! every search runs as an integral max-flow between order classes and the
//! element-level pairing is materialized afterwards.

mod dis;
mod flow;
mod lift;

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arith::{divides, divisors, euler_phi};
use crate::error::{Error, Result};
use crate::group::{CyclicModel, FiniteGroup, Subgroup};

pub use dis::{build_sa, verify_dis, DisFailure, DisReport, SaFamily, SaMember};
pub use lift::{
    lift_coset_bijection, quotient_coset_bijection, sigma, LiftCase, LiftOptions, LiftVariant,
    Lifted,
};

/// Indexed elements with their orders. Ids are group element indices or
/// residues of a cyclic group, depending on the side.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ElementFamily {
    pub ids: Vec<u64>,
    pub orders: Vec<u64>,
}

impl ElementFamily {
    pub fn new(ids: Vec<u64>, orders: Vec<u64>) -> Self {
        assert_eq!(ids.len(), orders.len(), "ids and orders differ in length");
        ElementFamily { ids, orders }
    }

    pub fn of_elements(group: &FiniteGroup, elements: &[usize]) -> Self {
        ElementFamily {
            ids: elements.iter().map(|&x| x as u64).collect(),
            orders: elements.iter().map(|&x| group.order_of(x)).collect(),
        }
    }

    pub fn of_group(group: &FiniteGroup) -> Self {
        ElementFamily {
            ids: (0..group.order() as u64).collect(),
            orders: group.element_orders().to_vec(),
        }
    }

    pub fn of_residues(cyclic: CyclicModel, residues: &[u64]) -> Self {
        ElementFamily {
            ids: residues.to_vec(),
            orders: residues.iter().map(|&k| cyclic.order_of(k)).collect(),
        }
    }

    /// All of `C_n` as residues `0..n`.
    pub fn cyclic(n: u64) -> Self {
        let residues: Vec<u64> = (0..n).collect();
        Self::of_residues(CyclicModel::new(n), &residues)
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn multiset(&self) -> OrderMultiset {
        OrderMultiset::of_orders(&self.orders)
    }

    pub fn position(&self, id: u64) -> Option<usize> {
        self.ids.iter().position(|&x| x == id)
    }
}

/// Multiplicity of each order value; zero multiplicities are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub struct OrderMultiset {
    pub counts: BTreeMap<u64, u64>,
}

impl OrderMultiset {
    pub fn of_orders(orders: &[u64]) -> Self {
        let mut counts = BTreeMap::new();
        for &o in orders {
            *counts.entry(o).or_insert(0) += 1;
        }
        OrderMultiset { counts }
    }

    pub fn from_counts(pairs: impl IntoIterator<Item = (u64, u64)>) -> Self {
        let mut counts = BTreeMap::new();
        for (order, mult) in pairs {
            if mult > 0 {
                *counts.entry(order).or_insert(0) += mult;
            }
        }
        OrderMultiset { counts }
    }

    /// `C_n` has `phi(d)` elements of each order `d | n`.
    pub fn of_cyclic(n: u64) -> Self {
        Self::from_counts(divisors(n).into_iter().map(|d| (d, euler_phi(d))))
    }

    pub fn of_group(group: &FiniteGroup) -> Self {
        Self::of_orders(group.element_orders())
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn get(&self, order: u64) -> u64 {
        self.counts.get(&order).copied().unwrap_or(0)
    }

    /// One synthetic element per unit of multiplicity, ids `0..total` in
    /// ascending order value.
    pub fn to_family(&self) -> ElementFamily {
        let orders: Vec<u64> = self
            .counts
            .iter()
            .flat_map(|(&o, &m)| std::iter::repeat(o).take(m as usize))
            .collect();
        ElementFamily::new((0..orders.len() as u64).collect(), orders)
    }
}

/// An admissible pairing `left[i] -> right[pairing[i]]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DivBijection {
    pub left: ElementFamily,
    pub right: ElementFamily,
    pub pairing: Vec<usize>,
}

impl DivBijection {
    /// `(o(x), o(f(x)))` for every left element, in left order.
    pub fn certificate(&self) -> Vec<(u64, u64)> {
        self.pairing
            .iter()
            .enumerate()
            .map(|(i, &j)| (self.left.orders[i], self.right.orders[j]))
            .collect()
    }

    /// `(x, f(x))` by id.
    pub fn pairs(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.pairing
            .iter()
            .enumerate()
            .map(|(i, &j)| (self.left.ids[i], self.right.ids[j]))
    }

    pub fn image(&self, id: u64) -> Option<u64> {
        self.left
            .position(id)
            .map(|i| self.right.ids[self.pairing[i]])
    }

    pub fn verify(&self) -> std::result::Result<(), String> {
        if self.left.len() != self.right.len() || self.pairing.len() != self.left.len() {
            return Err(format!(
                "sizes differ: left {}, right {}, pairing {}",
                self.left.len(),
                self.right.len(),
                self.pairing.len()
            ));
        }
        let mut hit = vec![false; self.right.len()];
        for (i, &j) in self.pairing.iter().enumerate() {
            if j >= hit.len() || hit[j] {
                return Err(format!("pairing is not injective at left index {i}"));
            }
            hit[j] = true;
            let (a, b) = (self.left.orders[i], self.right.orders[j]);
            if !divides(a, b) {
                return Err(format!(
                    "{} -> {}: order {a} does not divide {b}",
                    self.left.ids[i], self.right.ids[j]
                ));
            }
        }
        Ok(())
    }
}

/// Deficiency certificate: the right classes `W` need `demand` partners but
/// only `supply` left elements have an order dividing a member of `W`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HallViolation {
    pub blocking_orders: BTreeSet<u64>,
    pub demand: u64,
    pub supply: u64,
}

impl HallViolation {
    /// Recounts both sides from the multisets.
    pub fn holds_for(&self, left: &OrderMultiset, right: &OrderMultiset) -> bool {
        let demand: u64 = self.blocking_orders.iter().map(|&b| right.get(b)).sum();
        let supply: u64 = left
            .counts
            .iter()
            .filter(|(&a, _)| self.blocking_orders.iter().any(|&b| divides(a, b)))
            .map(|(_, &m)| m)
            .sum();
        demand == self.demand && supply == self.supply && supply < demand
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum Matched {
    Found(DivBijection),
    Blocked(HallViolation),
}

impl Matched {
    pub fn is_found(&self) -> bool {
        matches!(self, Matched::Found(_))
    }

    pub fn bijection(&self) -> Option<&DivBijection> {
        match self {
            Matched::Found(b) => Some(b),
            Matched::Blocked(_) => None,
        }
    }

    pub fn violation(&self) -> Option<&HallViolation> {
        match self {
            Matched::Found(_) => None,
            Matched::Blocked(v) => Some(v),
        }
    }
}

/// Flow between order classes, keyed by `(left order, right order)`.
pub type ClassFlow = BTreeMap<(u64, u64), u64>;

/// Max-flow saturating every right class, with each left class used at most
/// its multiplicity.
pub fn class_level_flow(
    left: &OrderMultiset,
    right: &OrderMultiset,
) -> std::result::Result<ClassFlow, HallViolation> {
    let lefts: Vec<(u64, u64)> = left.counts.iter().map(|(&o, &m)| (o, m)).collect();
    let rights: Vec<(u64, u64)> = right.counts.iter().map(|(&o, &m)| (o, m)).collect();
    let source = 0;
    let sink = 1 + lefts.len() + rights.len();
    let right_node = |j: usize| 1 + lefts.len() + j;
    let unbounded = right.total() + 1;

    let mut net = flow::Network::new(sink + 1);
    for (i, &(_, m)) in lefts.iter().enumerate() {
        net.add_edge(source, 1 + i, m);
    }
    let mut middle = Vec::new();
    for (i, &(a, _)) in lefts.iter().enumerate() {
        for (j, &(b, _)) in rights.iter().enumerate() {
            if divides(a, b) {
                middle.push((a, b, net.add_edge(1 + i, right_node(j), unbounded)));
            }
        }
    }
    for (j, &(_, m)) in rights.iter().enumerate() {
        net.add_edge(right_node(j), sink, m);
    }

    if net.max_flow(source, sink) == right.total() {
        let mut flows = ClassFlow::new();
        for (a, b, edge) in middle {
            let f = net.flow_on(edge);
            if f > 0 {
                flows.insert((a, b), f);
            }
        }
        return Ok(flows);
    }

    // Unreachable right classes form W; every left neighbour of W is
    // unreachable too, so its supply is bounded by the cut.
    let reach = net.residual_reachable(source);
    let blocking_orders: BTreeSet<u64> = rights
        .iter()
        .enumerate()
        .filter(|&(j, _)| !reach[right_node(j)])
        .map(|(_, &(b, _))| b)
        .collect();
    let demand = blocking_orders.iter().map(|&b| right.get(b)).sum();
    let supply = lefts
        .iter()
        .filter(|&&(a, _)| blocking_orders.iter().any(|&b| divides(a, b)))
        .map(|&(_, m)| m)
        .sum();
    Err(HallViolation {
        blocking_orders,
        demand,
        supply,
    })
}

fn order_classes(family: &ElementFamily, rng: Option<&mut ChaCha8Rng>) -> BTreeMap<u64, Vec<usize>> {
    let mut classes: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
    for (i, &o) in family.orders.iter().enumerate() {
        classes.entry(o).or_default().push(i);
    }
    if let Some(rng) = rng {
        for members in classes.values_mut() {
            members.shuffle(rng);
        }
    }
    classes
}

/// Turns a class flow into an element pairing. Left elements left unused
/// (subset embeddings) are dropped from the returned left family.
fn materialize(
    left: &ElementFamily,
    right: &ElementFamily,
    flows: &ClassFlow,
    seed: Option<u64>,
) -> DivBijection {
    let mut rng = seed.map(ChaCha8Rng::seed_from_u64);
    let mut left_classes = order_classes(left, rng.as_mut());
    let mut right_classes = order_classes(right, rng.as_mut());
    let mut pairs = Vec::with_capacity(right.len());
    for (&(a, b), &f) in flows {
        let ls = left_classes.get_mut(&a).expect("flow uses an existing left class");
        let rs = right_classes.get_mut(&b).expect("flow uses an existing right class");
        for _ in 0..f {
            // take from the front to keep index order when unseeded
            pairs.push((ls.remove(0), rs.remove(0)));
        }
    }
    pairs.sort_unstable();
    DivBijection {
        left: ElementFamily {
            ids: pairs.iter().map(|&(i, _)| left.ids[i]).collect(),
            orders: pairs.iter().map(|&(i, _)| left.orders[i]).collect(),
        },
        right: right.clone(),
        pairing: pairs.iter().map(|&(_, j)| j).collect(),
    }
}

/// Matching between two condensed multisets over synthetic element ids.
pub fn divisibility_matching(left: &OrderMultiset, right: &OrderMultiset) -> Result<Matched> {
    match_families(&left.to_family(), &right.to_family(), None)
}

/// Matching between two concrete families of equal size.
pub fn match_families(
    left: &ElementFamily,
    right: &ElementFamily,
    seed: Option<u64>,
) -> Result<Matched> {
    if left.len() != right.len() {
        return Err(Error::SizeMismatch {
            left: left.len() as u64,
            right: right.len() as u64,
        });
    }
    Ok(embed(left, right, seed))
}

fn embed(left: &ElementFamily, right: &ElementFamily, seed: Option<u64>) -> Matched {
    match class_level_flow(&left.multiset(), &right.multiset()) {
        Ok(flows) => Matched::Found(materialize(left, right, &flows, seed)),
        Err(violation) => Matched::Blocked(violation),
    }
}

/// Matching of `G` onto `C_{|G|}`; success means `G` lies in `[(|G|)]`.
pub fn find_group_bijection(group: &FiniteGroup, seed: Option<u64>) -> Matched {
    embed(
        &ElementFamily::of_group(group),
        &ElementFamily::cyclic(group.order() as u64),
        seed,
    )
}

/// Order of `yN` in `G/N`: the least `k` with `y^k` in `N`.
pub fn coset_order(group: &FiniteGroup, normal: &Subgroup, y: usize) -> u64 {
    let mut k = 1;
    let mut power = y;
    while !normal.contains(power) {
        power = group.mul(power, y);
        k += 1;
    }
    k
}

/// Matching of `yN` onto `u + C_{n,|N|}` inside `C_n`, `n = |G|`.
pub fn find_coset_bijection(
    group: &FiniteGroup,
    normal: &Subgroup,
    y: usize,
    u: u64,
    seed: Option<u64>,
) -> Result<Matched> {
    normal.check_normal(group)?;
    let cyclic = CyclicModel::new(group.order() as u64);
    let m = normal.order() as u64;
    let group_side = coset_order(group, normal, y);
    let cyclic_side = cyclic.coset_order(u, m);
    if group_side != cyclic_side {
        return Err(Error::OrderMismatch {
            group_side,
            cyclic_side,
        });
    }
    let left = ElementFamily::of_elements(group, &normal.left_coset(group, y).members);
    let right = ElementFamily::of_residues(cyclic, &cyclic.coset(u, m));
    match_families(&left, &right, seed)
}

/// A subset `A` of `G` with an admissible bijection onto `target`; `A` is
/// the left family of the returned bijection.
pub fn find_subset_embedding(
    group: &FiniteGroup,
    target: &OrderMultiset,
    seed: Option<u64>,
) -> Result<Matched> {
    if target.total() > group.order() as u64 {
        return Err(Error::SizeMismatch {
            left: group.order() as u64,
            right: target.total(),
        });
    }
    Ok(embed(&ElementFamily::of_group(group), &target.to_family(), seed))
}
