//! Finite topologies generated by a base: `τ(C_n)`, the topology `τ_c(G)`
//! pulled back through an order-divisibility bijection, and `τ_D(G)` from a
//! chain. Opens are unions of base sets plus `∅`.
//!
//! The open family is materialized only for bases of at most
//! [`ENUMERATION_LIMIT`] sets; larger topologies answer membership and axiom
//! queries from the base.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::arith::{divisors, lcm};
use crate::bijection::DivBijection;
use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::solutions::{verify_chain, Chain};

pub const ENUMERATION_LIMIT: usize = 12;

#[derive(Clone, Debug)]
pub struct FiniteTopology {
    carrier: Vec<u64>,
    position: BTreeMap<u64, usize>,
    /// Divisor labelling each base set.
    labels: Vec<u64>,
    base: Vec<FixedBitSet>,
    opens: Option<Vec<FixedBitSet>>,
}

/// Result of the topology axiom check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    /// Every pair of materialized opens was checked; otherwise the check ran
    /// on base pairs, which suffices because intersection distributes over
    /// union.
    pub exhaustive: bool,
    pub pairs_checked: usize,
    pub failure: Option<String>,
}

impl AxiomReport {
    pub fn holds(&self) -> bool {
        self.failure.is_none()
    }
}

impl FiniteTopology {
    /// `carrier` ids are distinct; `base` sets must lie inside it.
    fn from_base(carrier: Vec<u64>, based: Vec<(u64, Vec<u64>)>) -> Result<Self> {
        let position: BTreeMap<u64, usize> =
            carrier.iter().enumerate().map(|(i, &id)| (id, i)).collect();
        if position.len() != carrier.len() {
            return Err(Error::HypothesisViolated("carrier ids repeat".into()));
        }
        let mut labels = Vec::with_capacity(based.len());
        let mut base = Vec::with_capacity(based.len());
        for (label, set) in based {
            let mut bits = FixedBitSet::with_capacity(carrier.len());
            for id in set {
                let &i = position.get(&id).ok_or_else(|| {
                    Error::HypothesisViolated(format!("base element {id} outside the carrier"))
                })?;
                bits.insert(i);
            }
            labels.push(label);
            base.push(bits);
        }
        let mut topology = FiniteTopology {
            carrier,
            position,
            labels,
            base,
            opens: None,
        };
        if topology.base.len() <= ENUMERATION_LIMIT {
            topology.opens = Some(topology.union_closure());
        }
        Ok(topology)
    }

    fn union_closure(&self) -> Vec<FixedBitSet> {
        let empty = FixedBitSet::with_capacity(self.carrier.len());
        let mut seen: HashSet<FixedBitSet> = HashSet::from([empty.clone()]);
        let mut opens = vec![empty];
        let mut next = 0;
        while next < opens.len() {
            let current = opens[next].clone();
            next += 1;
            for b in &self.base {
                let mut u = current.clone();
                u.union_with(b);
                if seen.insert(u.clone()) {
                    opens.push(u);
                }
            }
        }
        opens.sort_by_key(|s| (s.count_ones(..), s.ones().collect::<Vec<_>>()));
        opens
    }

    fn ids(&self, bits: &FixedBitSet) -> Vec<u64> {
        bits.ones().map(|i| self.carrier[i]).collect()
    }

    fn bits(&self, ids: &[u64]) -> Option<FixedBitSet> {
        let mut bits = FixedBitSet::with_capacity(self.carrier.len());
        for id in ids {
            bits.insert(*self.position.get(id)?);
        }
        Some(bits)
    }

    fn bits_open(&self, set: &FixedBitSet) -> bool {
        let mut cover = FixedBitSet::with_capacity(self.carrier.len());
        for b in self.base.iter().filter(|b| b.is_subset(set)) {
            cover.union_with(b);
        }
        cover == *set
    }

    pub fn carrier(&self) -> &[u64] {
        &self.carrier
    }

    pub fn len(&self) -> usize {
        self.carrier.len()
    }

    pub fn is_empty(&self) -> bool {
        self.carrier.is_empty()
    }

    pub fn base_labels(&self) -> &[u64] {
        &self.labels
    }

    pub fn base_sets(&self) -> Vec<Vec<u64>> {
        self.base.iter().map(|b| self.ids(b)).collect()
    }

    pub fn is_materialized(&self) -> bool {
        self.opens.is_some()
    }

    /// Sorted by size, then by carrier position.
    pub fn opens(&self) -> Option<Vec<Vec<u64>>> {
        self.opens
            .as_ref()
            .map(|o| o.iter().map(|s| self.ids(s)).collect())
    }

    pub fn open_count(&self) -> Option<usize> {
        self.opens.as_ref().map(Vec::len)
    }

    /// A set is open iff it is the union of the base sets it contains.
    pub fn is_open(&self, ids: &[u64]) -> bool {
        self.bits(ids).is_some_and(|b| self.bits_open(&b))
    }

    /// Smallest open set containing `id`: the meet of the base sets holding it.
    pub fn minimal_neighborhood(&self, id: u64) -> Option<Vec<u64>> {
        let i = *self.position.get(&id)?;
        self.min_nbhd(i).map(|b| self.ids(&b))
    }

    fn min_nbhd(&self, i: usize) -> Option<FixedBitSet> {
        let mut out: Option<FixedBitSet> = None;
        for b in self.base.iter().filter(|b| b.contains(i)) {
            match &mut out {
                Some(o) => o.intersect_with(b),
                None => out = Some(b.clone()),
            }
        }
        out
    }

    pub fn check_axioms(&self) -> AxiomReport {
        let full = {
            let mut f = FixedBitSet::with_capacity(self.carrier.len());
            f.insert_range(..);
            f
        };
        let fail = |pairs_checked, exhaustive, msg: String| AxiomReport {
            exhaustive,
            pairs_checked,
            failure: Some(msg),
        };
        match &self.opens {
            Some(opens) => {
                let family: HashSet<&FixedBitSet> = opens.iter().collect();
                if !opens.iter().any(|o| o.is_clear()) {
                    return fail(0, true, "empty set is not open".into());
                }
                if !family.contains(&full) {
                    return fail(0, true, "carrier is not open".into());
                }
                let mut pairs = 0;
                for (i, a) in opens.iter().enumerate() {
                    for b in &opens[i..] {
                        pairs += 1;
                        let mut u = a.clone();
                        u.union_with(b);
                        if !family.contains(&u) {
                            return fail(pairs, true, format!(
                                "union of {:?} and {:?} is not open",
                                self.ids(a),
                                self.ids(b)
                            ));
                        }
                        let mut m = a.clone();
                        m.intersect_with(b);
                        if !family.contains(&m) {
                            return fail(pairs, true, format!(
                                "intersection of {:?} and {:?} is not open",
                                self.ids(a),
                                self.ids(b)
                            ));
                        }
                    }
                }
                AxiomReport {
                    exhaustive: true,
                    pairs_checked: pairs,
                    failure: None,
                }
            }
            None => {
                if !self.bits_open(&full) {
                    return fail(0, false, "carrier is not a union of base sets".into());
                }
                let mut pairs = 0;
                for (i, a) in self.base.iter().enumerate() {
                    for b in &self.base[i + 1..] {
                        pairs += 1;
                        let mut m = a.clone();
                        m.intersect_with(b);
                        if !self.bits_open(&m) {
                            return fail(pairs, false, format!(
                                "intersection of base sets {:?} and {:?} is not open",
                                self.ids(a),
                                self.ids(b)
                            ));
                        }
                    }
                }
                AxiomReport {
                    exhaustive: false,
                    pairs_checked: pairs,
                    failure: None,
                }
            }
        }
    }
}

/// `τ(C_n)` on residues `0..n`, based on the subgroups `C_{n,m}` (label `m`).
pub fn cyclic_base(n: u64) -> Result<FiniteTopology> {
    if n == 0 {
        return Err(Error::HypothesisViolated("n must be positive".into()));
    }
    let based = divisors(n)
        .into_iter()
        .map(|m| (m, (0..m).map(|j| j * (n / m)).collect()))
        .collect();
    FiniteTopology::from_base((0..n).collect(), based)
}

/// Checks that `f` pairs all of `G` with all of `C_n`.
fn check_full(f: &DivBijection) -> Result<u64> {
    f.verify().map_err(Error::NotAGroupBijection)?;
    let n = f.right.len() as u64;
    let right: BTreeSet<u64> = f.right.ids.iter().copied().collect();
    if right.len() as u64 != n || right.iter().any(|&k| k >= n) {
        return Err(Error::NotAGroupBijection(format!(
            "right side is not the residues 0..{n}"
        )));
    }
    if let Some((&k, &o)) = f
        .right
        .ids
        .iter()
        .zip(&f.right.orders)
        .find(|(&k, &o)| o != n / crate::arith::gcd(n, k))
    {
        return Err(Error::NotAGroupBijection(format!(
            "residue {k} carries order {o}"
        )));
    }
    let left: BTreeSet<u64> = f.left.ids.iter().copied().collect();
    if left.len() != f.left.len() {
        return Err(Error::NotAGroupBijection("left ids repeat".into()));
    }
    Ok(n)
}

/// `τ_c(G) = f⁻¹(τ(C_n))`, with base sets `f⁻¹(C_{n,m})` labelled `m`.
pub fn induce_topology(f: &DivBijection) -> Result<FiniteTopology> {
    let n = check_full(f)?;
    let based = divisors(n)
        .into_iter()
        .map(|m| {
            let step = n / m;
            let members = f
                .pairs()
                .filter(|&(_, k)| k % step == 0)
                .map(|(x, _)| x)
                .collect();
            (m, members)
        })
        .collect();
    let mut carrier = f.left.ids.clone();
    carrier.sort_unstable();
    FiniteTopology::from_base(carrier, based)
}

/// `τ_D(G)` over single-divisor members `A(d)`; the carrier is their union.
pub fn chain_topology(group: &FiniteGroup, chain: &Chain) -> Result<FiniteTopology> {
    verify_chain(group, chain).map_err(Error::HypothesisViolated)?;
    let carrier: BTreeSet<u64> = chain
        .assignment
        .values()
        .flatten()
        .map(|&x| x as u64)
        .collect();
    let based = chain
        .assignment
        .iter()
        .map(|(&d, a)| (d, a.iter().map(|&x| x as u64).collect()))
        .collect();
    FiniteTopology::from_base(carrier.into_iter().collect(), based)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RegularityWitness {
    pub point: u64,
    pub closed: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SeparationReport {
    /// Always true: the base is finite.
    pub countable_base: bool,
    pub base_size: usize,
    pub hausdorff: bool,
    /// Two points every pair of whose neighborhoods meet.
    pub hausdorff_witness: Option<(u64, u64)>,
    pub regular: bool,
    pub regular_witness: Option<RegularityWitness>,
    /// `F = carrier ∖ {identity}` is closed and every open superset of `F`
    /// contains the identity.
    pub identity_pattern: bool,
}

/// `identity` is the id of the neutral element in the carrier (0 for both
/// group elements and residues).
pub fn separation_report(t: &FiniteTopology, identity: u64) -> SeparationReport {
    let len = t.len();
    let nbhd: Vec<FixedBitSet> = (0..len)
        .map(|i| {
            t.min_nbhd(i).unwrap_or_else(|| {
                let mut all = FixedBitSet::with_capacity(len);
                all.insert_range(..);
                all
            })
        })
        .collect();

    let mut hausdorff_witness = None;
    'pairs: for i in 0..len {
        for j in i + 1..len {
            if !nbhd[i].is_disjoint(&nbhd[j]) {
                hausdorff_witness = Some((t.carrier[i], t.carrier[j]));
                break 'pairs;
            }
        }
    }

    // x outside closed F separates iff N(x) misses the least open cover of F;
    // complements of base sets suffice, since a finite space is regular iff
    // every base set is closed
    let closure_nbhd = |f: &FixedBitSet| {
        let mut cover = FixedBitSet::with_capacity(len);
        for p in f.ones() {
            cover.union_with(&nbhd[p]);
        }
        cover
    };
    let complement = |o: &FixedBitSet| {
        let mut c = o.clone();
        c.toggle_range(..);
        c
    };
    let mut regular_witness = None;
    let closed_sets: Vec<FixedBitSet> = match &t.opens {
        Some(opens) => opens.iter().map(complement).collect(),
        None => t.base.iter().map(complement).collect(),
    };
    'closed: for f in &closed_sets {
        let cover = closure_nbhd(f);
        for x in (0..len).filter(|&x| !f.contains(x)) {
            if !nbhd[x].is_disjoint(&cover) {
                regular_witness = Some(RegularityWitness {
                    point: t.carrier[x],
                    closed: t.ids(f),
                });
                break 'closed;
            }
        }
    }
    let identity_pattern = t.position.get(&identity).is_some_and(|&e| {
        let mut f = FixedBitSet::with_capacity(len);
        f.insert_range(..);
        f.set(e, false);
        let closed = t.bits_open(&complement(&f));
        !f.is_clear() && closed && closure_nbhd(&f).contains(e)
    });
    SeparationReport {
        countable_base: true,
        base_size: t.base.len(),
        hausdorff: hausdorff_witness.is_none(),
        hausdorff_witness,
        regular: regular_witness.is_none(),
        regular_witness,
        identity_pattern,
    }
}

/// True iff `f` carries the open family of `t_g` onto that of `t_c`.
/// Checked on bases in both directions: images of base sets are open and
/// preimages of base sets are open.
pub fn homeomorphism_check(f: &DivBijection, t_g: &FiniteTopology, t_c: &FiniteTopology) -> bool {
    let forward: BTreeMap<u64, u64> = f.pairs().collect();
    let backward: BTreeMap<u64, u64> = f.pairs().map(|(x, k)| (k, x)).collect();
    let same = |ids: &[u64], map: &BTreeMap<u64, u64>| {
        ids.len() == map.len() && ids.iter().all(|id| map.contains_key(id))
    };
    if !same(t_g.carrier(), &forward) || !same(t_c.carrier(), &backward) {
        return false;
    }
    let carried = |from: &FiniteTopology, to: &FiniteTopology, map: &BTreeMap<u64, u64>| {
        from.base_sets().iter().all(|b| {
            let image: Vec<u64> = b.iter().map(|x| map[x]).collect();
            to.is_open(&image)
        })
    };
    carried(t_g, t_c, &forward) && carried(t_c, t_g, &backward)
}

/// A finite union of subgroups `mℤ`, stored by modulus with redundant
/// moduli (multiples of another member) removed. The empty union is `∅`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub struct SymbolicIntegerOpen {
    moduli: BTreeSet<u64>,
}

impl SymbolicIntegerOpen {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn multiples(m: u64) -> Self {
        assert!(m > 0, "0ℤ is not a base open");
        SymbolicIntegerOpen {
            moduli: BTreeSet::from([m]),
        }
    }

    fn reduced(moduli: impl IntoIterator<Item = u64>) -> Self {
        let all: BTreeSet<u64> = moduli.into_iter().collect();
        let moduli = all
            .iter()
            .copied()
            .filter(|&m| !all.iter().any(|&k| k != m && m % k == 0))
            .collect();
        SymbolicIntegerOpen { moduli }
    }

    pub fn moduli(&self) -> &BTreeSet<u64> {
        &self.moduli
    }

    pub fn is_empty(&self) -> bool {
        self.moduli.is_empty()
    }

    pub fn contains(&self, z: i64) -> bool {
        self.moduli.iter().any(|&m| z.rem_euclid(m as i64) == 0)
    }

    pub fn union(&self, other: &Self) -> Self {
        Self::reduced(self.moduli.iter().chain(&other.moduli).copied())
    }

    /// `mℤ ∩ kℤ = lcm(m, k)ℤ`, distributed over the unions.
    pub fn intersection(&self, other: &Self) -> Self {
        Self::reduced(
            self.moduli
                .iter()
                .flat_map(|&m| other.moduli.iter().map(move |&k| lcm(m, k))),
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProjectionRow {
    /// The divisor `d` labelling the base open `f⁻¹(C_{n,d})`.
    pub d: u64,
    pub size: usize,
    pub preimage: SymbolicIntegerOpen,
    /// The preimage agrees with the base open on every residue mod `n`.
    pub certified: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProjectionReport {
    pub n: u64,
    pub rows: Vec<ProjectionRow>,
}

impl ProjectionReport {
    pub fn all_certified(&self) -> bool {
        self.rows.iter().all(|r| r.certified)
    }
}

/// Continuity of `θ = f⁻¹ ∘ p_n : ℤ → G` into `τ_c(G)`: the preimage of each
/// base open `f⁻¹(C_{n,d})` is the symbolic open `(n/d)ℤ`, certified by
/// comparing membership on all residues mod `n` (every modulus divides `n`).
pub fn integer_projection_continuity(f: &DivBijection) -> Result<ProjectionReport> {
    let n = check_full(f)?;
    let t = induce_topology(f)?;
    let image: BTreeMap<u64, u64> = f.pairs().collect();
    let rows = t
        .labels
        .iter()
        .zip(t.base_sets())
        .map(|(&d, members)| {
            let preimage = SymbolicIntegerOpen::multiples(n / d);
            let residues: BTreeSet<u64> = members.iter().map(|x| image[x]).collect();
            let certified =
                (0..n).all(|z| preimage.contains(z as i64) == residues.contains(&z));
            ProjectionRow {
                d,
                size: members.len(),
                preimage,
                certified,
            }
        })
        .collect();
    Ok(ProjectionReport { n, rows })
}
