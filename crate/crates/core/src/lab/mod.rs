//! Class membership checks (`Bij`, `Min`, `AM`, semisimplicity) and batch
//! verification with a persistent report store.
//!
//! `Min` uses the strict reading: every `u`-coset whose order matches `yN`
//! must admit a matching. The existential reading (some `u` per `yN`) is
//! computed alongside and reported when it differs. `AM` is evaluated under
//! two readings of which `y` qualify in the simple-factor case.

mod batch;

use std::collections::HashMap;

use serde::Serialize;

use crate::arith::is_prime;
use crate::bijection::{
    class_level_flow, coset_order, find_group_bijection, ElementFamily, HallViolation, Matched,
    OrderMultiset,
};
use crate::error::Result;
use crate::group::{
    normal_subgroups_with_cap, structural_predicates, CyclicModel, FiniteGroup, Subgroup,
};

pub use batch::{
    batch_verify, catalog_items, verify_group, BatchItem, BatchOptions, BatchSummary, Outcome, Property,
    ReportStore, VerificationReport,
};

#[derive(Clone, Debug, Serialize)]
pub struct BijFragment {
    pub in_bij: bool,
    pub certificate: Matched,
}

pub fn check_bij(group: &FiniteGroup, seed: Option<u64>) -> BijFragment {
    let certificate = find_group_bijection(group, seed);
    BijFragment {
        in_bij: certificate.is_found(),
        certificate,
    }
}

/// One `(N, yN, u + C_{n,|N|})` matching.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MinCase {
    pub normal_order: usize,
    /// Position of `N` in the sorted normal subgroup list.
    pub normal_index: usize,
    pub y: usize,
    pub u: u64,
    pub found: bool,
}

/// A failed coset matching, replayable through
/// [`crate::bijection::divisibility_matching`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MinCounterexample {
    pub normal_order: usize,
    pub normal_generators: Vec<usize>,
    pub y: usize,
    pub u: u64,
    pub left: OrderMultiset,
    pub right: OrderMultiset,
    pub violation: HallViolation,
}

#[derive(Clone, Debug, Serialize)]
pub struct MinFragment {
    /// Strict reading: all matching `u`-cosets.
    pub in_min: bool,
    /// Existential reading: some matching `u`-coset per `yN`.
    pub in_min_existential: bool,
    pub normals: usize,
    pub cosets: usize,
    pub cases: Vec<MinCase>,
    pub counterexample: Option<MinCounterexample>,
}

impl MinFragment {
    pub fn readings_differ(&self) -> bool {
        self.in_min != self.in_min_existential
    }
}

/// Matches every coset of every normal subgroup against every `u`-coset of
/// equal quotient order. Identical multiset pairs share one flow run.
pub fn check_min(group: &FiniteGroup, lattice_cap: usize) -> Result<MinFragment> {
    let normals = normal_subgroups_with_cap(group, lattice_cap)?;
    let n = group.order() as u64;
    let cyclic = CyclicModel::new(n);
    let mut memo: HashMap<(OrderMultiset, OrderMultiset), Option<HallViolation>> = HashMap::new();
    let mut cases = Vec::new();
    let mut cosets = 0;
    let mut counterexample = None;
    let mut existential = true;

    for (index, normal) in normals.iter().enumerate() {
        let m = normal.order() as u64;
        let mut seen = vec![false; group.order()];
        for y in group.elements() {
            if seen[y] {
                continue;
            }
            let coset = normal.left_coset(group, y).members;
            for &z in &coset {
                seen[z] = true;
            }
            cosets += 1;
            let left = ElementFamily::of_elements(group, &coset).multiset();
            let d = coset_order(group, normal, y);
            let mut any = false;
            for u in cyclic.cosets_of_order(m, d) {
                let right = ElementFamily::of_residues(cyclic, &cyclic.coset(u, m)).multiset();
                let key = (left.clone(), right);
                let blocked = memo
                    .entry(key.clone())
                    .or_insert_with(|| class_level_flow(&key.0, &key.1).err())
                    .clone();
                any |= blocked.is_none();
                if let (Some(violation), None) = (&blocked, &counterexample) {
                    counterexample = Some(MinCounterexample {
                        normal_order: normal.order(),
                        normal_generators: normal.generators().to_vec(),
                        y,
                        u,
                        left: key.0.clone(),
                        right: key.1.clone(),
                        violation: violation.clone(),
                    });
                }
                cases.push(MinCase {
                    normal_order: normal.order(),
                    normal_index: index,
                    y,
                    u,
                    found: blocked.is_none(),
                });
            }
            existential &= any;
        }
    }
    Ok(MinFragment {
        in_min: counterexample.is_none(),
        in_min_existential: existential,
        normals: normals.len(),
        cosets,
        cases,
        counterexample,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "shape", rename_all = "kebab-case")]
pub enum AmShape {
    /// `N` is simple non-abelian.
    Simple,
    /// `N` is `o(y)` copies of a simple group of order `factor_order`,
    /// permuted transitively by `y`.
    Copies { copies: u64, factor_order: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AmWitness {
    pub y: usize,
    pub y_order: u64,
    pub normal_order: usize,
    pub normal_generators: Vec<usize>,
    pub shape: AmShape,
}

#[derive(Clone, Debug, Serialize)]
pub struct AmFragment {
    pub is_semisimple: bool,
    /// `o(y)` prime in both cases.
    pub strict: Option<AmWitness>,
    /// `o(y)` unrestricted (including `y = 1`) when `N` is simple.
    pub loose: Option<AmWitness>,
}

impl AmFragment {
    pub fn in_am_strict(&self) -> bool {
        self.strict.is_some()
    }

    pub fn in_am_loose(&self) -> bool {
        self.loose.is_some()
    }

    pub fn readings_differ(&self) -> bool {
        self.in_am_strict() != self.in_am_loose()
    }
}

/// The structure of a non-abelian minimal normal subgroup `N = L^k`.
struct Decomposition {
    /// `L` as members of the ambient group.
    factor: Subgroup,
    copies: u64,
}

fn decompose(group: &FiniteGroup, normal: &Subgroup, lattice_cap: usize) -> Result<Option<Decomposition>> {
    let members = normal.members();
    let as_group = group.subgroup_as_group("N", members);
    let inner = normal_subgroups_with_cap(&as_group, lattice_cap)?;
    if as_group.is_abelian() {
        return Ok(None);
    }
    if inner.len() == 2 {
        return Ok(Some(Decomposition {
            factor: normal.clone(),
            copies: 1,
        }));
    }
    let Some(m) = inner.iter().find(|s| s.flags.is_minimal_normal) else {
        return Ok(None);
    };
    let m_group = as_group.subgroup_as_group("L", m.members());
    let simple = normal_subgroups_with_cap(&m_group, lattice_cap)?.len() == 2 && !m_group.is_abelian();
    let (factor_order, total) = (m.order() as u64, normal.order() as u64);
    let mut copies = 0;
    let mut power = 1;
    while power < total {
        power *= factor_order;
        copies += 1;
    }
    if !simple || power != total {
        return Ok(None);
    }
    let ambient: Vec<usize> = m.members().iter().map(|&i| members[i]).collect();
    Ok(Some(Decomposition {
        factor: Subgroup::from_members(group, &ambient)?,
        copies,
    }))
}

/// Distinct conjugates of `factor` under powers of `y`.
fn orbit_size(group: &FiniteGroup, factor: &Subgroup, y: usize) -> u64 {
    let mut seen: Vec<Vec<usize>> = Vec::new();
    let mut g = 0;
    loop {
        let mut image: Vec<usize> = factor
            .members()
            .iter()
            .map(|&z| group.conjugate(g, z))
            .collect();
        image.sort_unstable();
        if seen.contains(&image) {
            return seen.len() as u64;
        }
        seen.push(image);
        g = group.mul(g, y);
    }
}

pub fn check_am(group: &FiniteGroup, lattice_cap: usize) -> Result<AmFragment> {
    let normals = normal_subgroups_with_cap(group, lattice_cap)?;
    let is_semisimple = structural_predicates(group, &normals).is_semisimple;
    let mut fragment = AmFragment {
        is_semisimple,
        strict: None,
        loose: None,
    };
    if !is_semisimple {
        return Ok(fragment);
    }
    let mut ys: Vec<usize> = group.elements().collect();
    ys.sort_by_key(|&y| (group.order_of(y), y));
    let n = group.order();

    for normal in normals.iter().filter(|s| s.flags.is_minimal_normal) {
        let Some(dec) = decompose(group, normal, lattice_cap)? else {
            continue;
        };
        for &y in &ys {
            let cyc = Subgroup::generated(group, [y]);
            let meet = cyc.intersection(group, normal).order();
            if cyc.order() * normal.order() / meet != n {
                continue;
            }
            let o = group.order_of(y);
            let shape = if dec.copies == 1 {
                AmShape::Simple
            } else if o == dec.copies && is_prime(o) && orbit_size(group, &dec.factor, y) == o {
                AmShape::Copies {
                    copies: o,
                    factor_order: dec.factor.order(),
                }
            } else {
                continue;
            };
            let witness = AmWitness {
                y,
                y_order: o,
                normal_order: normal.order(),
                normal_generators: normal.generators().to_vec(),
                shape: shape.clone(),
            };
            if fragment.loose.is_none() {
                fragment.loose = Some(witness.clone());
            }
            if fragment.strict.is_none() && is_prime(o) {
                fragment.strict = Some(witness);
            }
            if fragment.strict.is_some() && fragment.loose.is_some() {
                return Ok(fragment);
            }
        }
    }
    Ok(fragment)
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassMembership {
    pub group: String,
    pub order: usize,
    pub in_bij: bool,
    pub bij: BijFragment,
    pub min: MinFragment,
    pub am: AmFragment,
    pub is_semisimple: bool,
}

pub fn classify(group: &FiniteGroup, lattice_cap: usize, seed: Option<u64>) -> Result<ClassMembership> {
    let bij = check_bij(group, seed);
    let min = check_min(group, lattice_cap)?;
    let am = check_am(group, lattice_cap)?;
    Ok(ClassMembership {
        group: group.name().to_string(),
        order: group.order(),
        in_bij: bij.in_bij,
        is_semisimple: am.is_semisimple,
        bij,
        min,
        am,
    })
}
