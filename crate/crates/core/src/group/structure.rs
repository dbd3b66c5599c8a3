//! Conjugacy classes, the normal subgroup lattice, quotients and the
//! distinguished subgroups derived from them.

use std::collections::{HashMap, VecDeque};

use fixedbitset::FixedBitSet;
use serde::Serialize;

use super::{FiniteGroup, Subgroup};
use crate::arith::{factorize, prime_power_base};
use crate::error::{Error, Result};

/// Default bound on the number of normal subgroups enumerated.
pub const DEFAULT_LATTICE_CAP: usize = 4096;

/// Conjugacy classes, each sorted, ordered by smallest member (identity first).
pub fn conjugacy_classes(group: &FiniteGroup) -> &[Vec<usize>] {
    group.class_cache().get_or_init(|| {
        let n = group.order();
        let mut seen = FixedBitSet::with_capacity(n);
        let mut classes = Vec::new();
        for x in 0..n {
            if seen.contains(x) {
                continue;
            }
            seen.insert(x);
            let mut class = vec![x];
            let mut queue = VecDeque::from([x]);
            while let Some(y) = queue.pop_front() {
                for &g in group.generators() {
                    let z = group.conjugate(g, y);
                    if !seen.contains(z) {
                        seen.insert(z);
                        class.push(z);
                        queue.push_back(z);
                    }
                }
            }
            class.sort_unstable();
            classes.push(class);
        }
        classes
    })
}

pub fn normal_subgroups(group: &FiniteGroup) -> Result<Vec<Subgroup>> {
    normal_subgroups_with_cap(group, DEFAULT_LATTICE_CAP)
}

/// All normal subgroups, sorted by (order, members), with minimality flags.
///
/// Each normal subgroup is the join of the normal closures of the classes it
/// contains, so closing the class closures under joins reaches all of them.
pub fn normal_subgroups_with_cap(group: &FiniteGroup, cap: usize) -> Result<Vec<Subgroup>> {
    let mut closures: Vec<Subgroup> = Vec::new();
    for class in conjugacy_classes(group).iter().skip(1) {
        let k = Subgroup::generated(group, class.iter().copied());
        if !closures.contains(&k) {
            closures.push(k);
        }
    }

    let trivial = Subgroup::trivial(group);
    let mut found: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut all = vec![trivial.clone()];
    found.insert(trivial.members().to_vec(), 0);
    let mut head = 0;
    while head < all.len() {
        let current = all[head].clone();
        for k in &closures {
            if k.is_subset_of(&current) {
                continue;
            }
            let joined = current.join(group, k);
            if !found.contains_key(joined.members()) {
                if all.len() >= cap {
                    return Err(Error::LatticeCapExceeded { cap });
                }
                found.insert(joined.members().to_vec(), all.len());
                all.push(joined);
            }
        }
        head += 1;
    }

    all.sort_by(|a, b| {
        a.order()
            .cmp(&b.order())
            .then_with(|| a.members().cmp(b.members()))
    });
    let minimal: Vec<bool> = all
        .iter()
        .map(|n| {
            !n.is_trivial()
                && !all
                    .iter()
                    .any(|m| !m.is_trivial() && m.order() < n.order() && m.is_subset_of(n))
        })
        .collect();
    for (n, is_min) in all.iter_mut().zip(minimal) {
        debug_assert!(n.flags.is_normal);
        n.flags.is_minimal_normal = is_min;
    }
    Ok(all)
}

#[derive(Clone, Debug)]
pub struct Distinguished {
    pub center: Subgroup,
    pub fitting: Subgroup,
    pub socle: Subgroup,
}

/// Center, Fitting subgroup and socle, given the full normal subgroup list.
pub fn distinguished_subgroups(group: &FiniteGroup, normals: &[Subgroup]) -> Distinguished {
    let center_members: Vec<usize> = group
        .elements()
        .filter(|&x| group.generators().iter().all(|&g| group.commutes(x, g)))
        .collect();
    let center = Subgroup::generated(group, center_members);

    let mut fitting = Subgroup::trivial(group);
    for n in normals.iter().filter(|n| is_nilpotent(group, n)) {
        if !n.is_subset_of(&fitting) {
            fitting = fitting.join(group, n);
        }
    }
    let mut socle = Subgroup::trivial(group);
    for n in normals.iter().filter(|n| n.flags.is_minimal_normal) {
        if !n.is_subset_of(&socle) {
            socle = socle.join(group, n);
        }
    }
    Distinguished {
        center,
        fitting,
        socle,
    }
}

/// A finite group is nilpotent iff for every prime `p` its `p`-elements number
/// exactly the `p`-part of its order (each Sylow subgroup is unique).
pub fn is_nilpotent(group: &FiniteGroup, sub: &Subgroup) -> bool {
    let order = sub.order() as u64;
    factorize(order).into_iter().all(|(p, e)| {
        let p_elements = sub
            .members()
            .iter()
            .filter(|&&x| {
                let o = group.order_of(x);
                o == 1 || prime_power_base(o) == Some(p)
            })
            .count() as u64;
        p_elements == p.pow(e)
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Predicates {
    pub is_solvable: bool,
    pub is_semisimple: bool,
    pub is_simple: bool,
    pub is_abelian: bool,
}

pub fn structural_predicates(group: &FiniteGroup, normals: &[Subgroup]) -> Predicates {
    Predicates {
        is_solvable: derived_series(group).last().is_some_and(|s| s.is_trivial()),
        is_semisimple: !normals
            .iter()
            .any(|n| !n.is_trivial() && n.flags.is_abelian),
        is_simple: normals.len() == 2,
        is_abelian: group.is_abelian(),
    }
}

/// `G = G^(0) > G^(1) > ...` until it stabilises.
pub fn derived_series(group: &FiniteGroup) -> Vec<Subgroup> {
    let mut series = vec![Subgroup::whole(group)];
    loop {
        let last = series.last().expect("non-empty");
        let next = derived_subgroup(group, last);
        if next.order() == last.order() {
            return series;
        }
        series.push(next);
    }
}

/// `[H, H]` as the normal closure in `H` of the generator commutators.
pub fn derived_subgroup(group: &FiniteGroup, h: &Subgroup) -> Subgroup {
    let gens = h.generators();
    let mut seeds: Vec<usize> = Vec::new();
    for (i, &a) in gens.iter().enumerate() {
        for &b in &gens[i + 1..] {
            seeds.push(group.commutator(a, b));
        }
    }
    normal_closure(group, gens, seeds)
}

/// Smallest subgroup containing `seeds` and closed under conjugation by `ambient_gens`.
pub fn normal_closure(group: &FiniteGroup, ambient_gens: &[usize], seeds: Vec<usize>) -> Subgroup {
    let mut current = Subgroup::generated(group, seeds);
    loop {
        let extra: Vec<usize> = current
            .generators()
            .iter()
            .flat_map(|&s| ambient_gens.iter().map(move |&g| (g, s)))
            .map(|(g, s)| group.conjugate(g, s))
            .filter(|&c| !current.contains(c))
            .collect();
        if extra.is_empty() {
            return current;
        }
        current = Subgroup::generated(group, current.generators().iter().copied().chain(extra));
    }
}

#[derive(Clone, Debug)]
pub struct NormalizerCentralizer {
    pub cyclic: Subgroup,
    pub normalizer: Subgroup,
    pub centralizer: Subgroup,
}

/// `N_G(<a>)` and `C_G(a)`.
pub fn normalizer_centralizer(group: &FiniteGroup, a: usize) -> NormalizerCentralizer {
    let cyclic = Subgroup::generated(group, [a]);
    let normalizer: Vec<usize> = group
        .elements()
        .filter(|&g| cyclic.contains(group.conjugate(g, a)))
        .collect();
    let centralizer: Vec<usize> = group.elements().filter(|&g| group.commutes(g, a)).collect();
    NormalizerCentralizer {
        normalizer: Subgroup::from_members(group, &normalizer).expect("normalizer is a subgroup"),
        centralizer: Subgroup::from_members(group, &centralizer)
            .expect("centralizer is a subgroup"),
        cyclic,
    }
}

/// `G/N` with the projection `G -> G/N`.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub group: FiniteGroup,
    /// `projection[x]` is the index of `xN` in `group`.
    pub projection: Vec<usize>,
    /// Smallest element of each coset.
    pub representatives: Vec<usize>,
    pub cosets: Vec<Vec<usize>>,
}

impl Quotient {
    pub fn project(&self, x: usize) -> usize {
        self.projection[x]
    }

    pub fn coset(&self, q: usize) -> &[usize] {
        &self.cosets[q]
    }
}

pub fn quotient(group: &FiniteGroup, normal: &Subgroup) -> Result<Quotient> {
    normal.check_normal(group)?;
    let n = group.order();
    let mut projection = vec![usize::MAX; n];
    let mut representatives = Vec::new();
    let mut cosets = Vec::new();
    for x in 0..n {
        if projection[x] != usize::MAX {
            continue;
        }
        let idx = representatives.len();
        let coset = normal.left_coset(group, x).members;
        for &y in &coset {
            projection[y] = idx;
        }
        representatives.push(x);
        cosets.push(coset);
    }
    let proj32: Vec<u32> = projection.iter().map(|&p| p as u32).collect();
    let q = FiniteGroup::quotient_group(
        group,
        format!("{}/N{}", group.name(), normal.order()),
        representatives.clone(),
        proj32,
    );
    Ok(Quotient {
        group: q,
        projection,
        representatives,
        cosets,
    })
}
