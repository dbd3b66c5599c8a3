//! Concrete finite groups on indexed element tables.
//!
//! Every group is fully enumerated. Element `0` is always the identity. Groups
//! of order at most [`DENSE_LIMIT`] keep a dense Cayley table; larger groups
//! recompute products from their underlying representation (permutations,
//! direct-product pairs, coset representatives or an ambient group).

mod cyclic;
mod perm;
mod structure;
mod subgroup;

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::sync::{Arc, OnceLock};

use fixedbitset::FixedBitSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arith::lcm;
use crate::error::{Error, Result};

pub use cyclic::CyclicModel;
pub use perm::Perm;
pub use structure::{
    conjugacy_classes, derived_series, derived_subgroup, distinguished_subgroups, is_nilpotent,
    normal_closure, normal_subgroups, normal_subgroups_with_cap, normalizer_centralizer, quotient,
    structural_predicates, Distinguished, NormalizerCentralizer, Predicates, Quotient,
    DEFAULT_LATTICE_CAP,
};
pub use subgroup::{Coset, Subgroup, SubgroupFlags};

/// Largest order for which a dense multiplication table is stored.
pub const DENSE_LIMIT: usize = 512;
/// Default bound on the number of elements any closure may produce.
pub const DEFAULT_ELEMENT_CAP: usize = 10_000;
/// Up to this order associativity is checked on every triple.
const FULL_AXIOM_CHECK: usize = 64;
const SAMPLED_TRIPLES: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Source {
    PermutationGenerators,
    CayleyTable,
    Constructor,
}

enum Repr {
    Table(Vec<u32>),
    Cyclic,
    Perms {
        perms: Vec<Perm>,
        index: HashMap<Perm, u32>,
    },
    Product {
        left: FiniteGroup,
        right: FiniteGroup,
    },
    Quotient {
        parent: FiniteGroup,
        reps: Vec<usize>,
        proj: Vec<u32>,
    },
    Sub {
        parent: FiniteGroup,
        members: Vec<usize>,
        local: Vec<u32>,
    },
}

impl Repr {
    fn mul(&self, order: usize, a: usize, b: usize) -> usize {
        match self {
            Repr::Table(t) => t[a * order + b] as usize,
            Repr::Cyclic => (a + b) % order,
            Repr::Perms { perms, index } => index[&perms[a].then(&perms[b])] as usize,
            Repr::Product { left, right } => {
                let m = right.order();
                let (a0, a1) = (a / m, a % m);
                let (b0, b1) = (b / m, b % m);
                left.mul(a0, b0) * m + right.mul(a1, b1)
            }
            Repr::Quotient { parent, reps, proj } => proj[parent.mul(reps[a], reps[b])] as usize,
            Repr::Sub {
                parent,
                members,
                local,
            } => local[parent.mul(members[a], members[b])] as usize,
        }
    }
}

struct GroupData {
    source: Source,
    order: usize,
    repr: Repr,
    /// Underlying permutations, kept even after densifying.
    perms: Option<Vec<Perm>>,
    orders: Vec<u64>,
    inverse: Vec<u32>,
    exponent: u64,
    generators: Vec<usize>,
    classes: OnceLock<Vec<Vec<usize>>>,
}

/// A fully enumerated finite group. Cloning is cheap; the data is shared.
#[derive(Clone)]
pub struct FiniteGroup {
    name: Arc<str>,
    inner: Arc<GroupData>,
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteGroup")
            .field("name", &self.name)
            .field("order", &self.inner.order)
            .field("exponent", &self.inner.exponent)
            .finish()
    }
}

impl FiniteGroup {
    fn assemble(
        name: String,
        source: Source,
        order: usize,
        repr: Repr,
        generators: Option<Vec<usize>>,
    ) -> Self {
        let perms = match &repr {
            Repr::Perms { perms, .. } => Some(perms.clone()),
            _ => None,
        };
        let repr = match repr {
            Repr::Table(_) | Repr::Cyclic => repr,
            other if order <= DENSE_LIMIT => {
                let mut table = Vec::with_capacity(order * order);
                for a in 0..order {
                    for b in 0..order {
                        table.push(other.mul(order, a, b) as u32);
                    }
                }
                Repr::Table(table)
            }
            other => other,
        };

        let mut orders = Vec::with_capacity(order);
        let mut inverse = Vec::with_capacity(order);
        for x in 0..order {
            // walk x, x^2, .. until the identity; the last non-identity power is x^-1
            let mut prev = 0;
            let mut power = x;
            let mut k = 1u64;
            while power != 0 {
                prev = power;
                power = repr.mul(order, power, x);
                k += 1;
            }
            orders.push(k);
            inverse.push(prev as u32);
        }
        let exponent = orders.iter().fold(1u64, |acc, &o| lcm(acc, o));

        let generators = match generators {
            Some(g) => g,
            None => greedy_generators(order, |a, b| repr.mul(order, a, b)),
        };

        FiniteGroup {
            name: Arc::from(name),
            inner: Arc::new(GroupData {
                source,
                order,
                repr,
                perms,
                orders,
                inverse,
                exponent,
                generators,
                classes: OnceLock::new(),
            }),
        }
    }

    /// `C_n` as residues mod `n`; element `k` is the residue `k`.
    pub fn cyclic(name: impl Into<String>, n: usize) -> Self {
        assert!(n >= 1, "cyclic group of order zero");
        let generators = if n == 1 { vec![] } else { vec![1] };
        Self::assemble(
            name.into(),
            Source::Constructor,
            n,
            Repr::Cyclic,
            Some(generators),
        )
    }

    /// Closes a set of permutations breadth-first from the identity.
    pub fn from_permutations(
        name: impl Into<String>,
        degree: usize,
        generators: &[Perm],
        cap: usize,
    ) -> Result<Self> {
        for g in generators {
            if g.degree() != degree {
                return Err(Error::InvalidPermutation(format!(
                    "generator {g} has degree {} but {degree} was declared",
                    g.degree()
                )));
            }
        }
        let gens: Vec<&Perm> = generators.iter().filter(|g| !g.is_identity()).collect();
        let identity = Perm::identity(degree);
        let mut perms = vec![identity.clone()];
        let mut index = HashMap::new();
        index.insert(identity, 0u32);
        let mut head = 0;
        while head < perms.len() {
            for g in &gens {
                let next = perms[head].then(g);
                if !index.contains_key(&next) {
                    if perms.len() >= cap {
                        return Err(Error::CapExceeded { cap });
                    }
                    index.insert(next.clone(), perms.len() as u32);
                    perms.push(next);
                }
            }
            head += 1;
        }
        let mut gen_idx: Vec<usize> = gens.iter().map(|g| index[*g] as usize).collect();
        gen_idx.dedup();
        let order = perms.len();
        Ok(Self::assemble(
            name.into(),
            Source::PermutationGenerators,
            order,
            Repr::Perms { perms, index },
            Some(gen_idx),
        ))
    }

    /// Validates a square table exhaustively and renumbers so the identity is 0.
    pub fn from_cayley_table(name: impl Into<String>, table: &[Vec<usize>]) -> Result<Self> {
        let k = table.len();
        if k == 0 {
            return Err(Error::MalformedTable("empty table".into()));
        }
        for (i, row) in table.iter().enumerate() {
            if row.len() != k {
                return Err(Error::MalformedTable(format!(
                    "row {i} has {} entries, expected {k}",
                    row.len()
                )));
            }
            if let Some(&bad) = row.iter().find(|&&v| v >= k) {
                return Err(Error::MalformedTable(format!(
                    "row {i} has entry {bad} outside 0..{k}"
                )));
            }
        }
        let e = (0..k)
            .find(|&e| (0..k).all(|x| table[e][x] == x && table[x][e] == x))
            .ok_or(Error::NoIdentity)?;
        for x in 0..k {
            if !(0..k).any(|y| table[x][y] == e && table[y][x] == e) {
                return Err(Error::NoInverse { element: x });
            }
        }
        for a in 0..k {
            for b in 0..k {
                let ab = table[a][b];
                for c in 0..k {
                    if table[ab][c] != table[a][table[b][c]] {
                        return Err(Error::NotAssociative { a, b, c });
                    }
                }
            }
        }
        // swap e <-> 0
        let relabel = |x: usize| {
            if x == e {
                0
            } else if x == 0 {
                e
            } else {
                x
            }
        };
        let mut flat = vec![0u32; k * k];
        for a in 0..k {
            for b in 0..k {
                flat[relabel(a) * k + relabel(b)] = relabel(table[a][b]) as u32;
            }
        }
        Ok(Self::assemble(
            name.into(),
            Source::CayleyTable,
            k,
            Repr::Table(flat),
            None,
        ))
    }

    /// Builds a group from a multiplication rule on `0..order` with `0` the
    /// identity. The rule is checked for closure, identity and inverses, and
    /// for associativity on every triple up to order 64 and on a seeded sample
    /// of 10,000 triples above.
    pub fn from_fn(
        name: impl Into<String>,
        order: usize,
        mul: impl Fn(usize, usize) -> usize,
    ) -> Result<Self> {
        let mut table = vec![0u32; order * order];
        for a in 0..order {
            for b in 0..order {
                let v = mul(a, b);
                if v >= order {
                    return Err(Error::MalformedTable(format!(
                        "product {a}*{b} = {v} outside 0..{order}"
                    )));
                }
                table[a * order + b] = v as u32;
            }
        }
        let at = |a: usize, b: usize| table[a * order + b] as usize;
        if !(0..order).all(|x| at(0, x) == x && at(x, 0) == x) {
            return Err(Error::NoIdentity);
        }
        for x in 0..order {
            if !(0..order).any(|y| at(x, y) == 0 && at(y, x) == 0) {
                return Err(Error::NoInverse { element: x });
            }
        }
        check_associative(order, &at)?;
        Ok(Self::assemble(
            name.into(),
            Source::Constructor,
            order,
            Repr::Table(table),
            None,
        ))
    }

    /// Builds a group from explicit elements (identity first) and a product.
    pub fn from_elements<T, F>(name: impl Into<String>, elements: Vec<T>, mul: F) -> Result<Self>
    where
        T: Eq + std::hash::Hash + Clone,
        F: Fn(&T, &T) -> T,
    {
        let index: HashMap<T, usize> = elements
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, e)| (e, i))
            .collect();
        if index.len() != elements.len() {
            return Err(Error::MalformedTable("duplicate elements".into()));
        }
        Self::from_fn(name, elements.len(), |a, b| {
            index
                .get(&mul(&elements[a], &elements[b]))
                .copied()
                .unwrap_or(usize::MAX)
        })
    }

    /// Direct product with pair `(a, b)` at index `a * |right| + b`.
    pub fn direct_product(left: &FiniteGroup, right: &FiniteGroup, cap: usize) -> Result<Self> {
        let order = left.order() * right.order();
        if order > cap {
            return Err(Error::CapExceeded { cap });
        }
        let m = right.order();
        let mut gens: Vec<usize> = left.generators().iter().map(|&a| a * m).collect();
        gens.extend(right.generators().iter().copied());
        Ok(Self::assemble(
            format!("{}x{}", left.name(), right.name()),
            Source::Constructor,
            order,
            Repr::Product {
                left: left.clone(),
                right: right.clone(),
            },
            Some(gens),
        ))
    }

    pub(crate) fn quotient_group(
        parent: &FiniteGroup,
        name: String,
        reps: Vec<usize>,
        proj: Vec<u32>,
    ) -> Self {
        let order = reps.len();
        let mut gens: Vec<usize> = parent
            .generators()
            .iter()
            .map(|&g| proj[g] as usize)
            .filter(|&g| g != 0)
            .collect();
        gens.sort_unstable();
        gens.dedup();
        Self::assemble(
            name,
            Source::Constructor,
            order,
            Repr::Quotient {
                parent: parent.clone(),
                reps,
                proj,
            },
            Some(gens),
        )
    }

    /// The subgroup with sorted `members` as a group in its own right; local
    /// index `i` corresponds to `members[i]`.
    pub fn subgroup_as_group(&self, name: impl Into<String>, members: &[usize]) -> Self {
        let mut local = vec![u32::MAX; self.order()];
        for (i, &m) in members.iter().enumerate() {
            local[m] = i as u32;
        }
        Self::assemble(
            name.into(),
            Source::Constructor,
            members.len(),
            Repr::Sub {
                parent: self.clone(),
                members: members.to_vec(),
                local,
            },
            None,
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(&self, name: impl Into<String>) -> Self {
        FiniteGroup {
            name: Arc::from(name.into()),
            inner: Arc::clone(&self.inner),
        }
    }

    pub fn source(&self) -> Source {
        self.inner.source
    }

    pub fn order(&self) -> usize {
        self.inner.order
    }

    pub fn exponent(&self) -> u64 {
        self.inner.exponent
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.inner.repr.mul(self.inner.order, a, b)
    }

    #[inline]
    pub fn inv(&self, x: usize) -> usize {
        self.inner.inverse[x] as usize
    }

    #[inline]
    pub fn order_of(&self, x: usize) -> u64 {
        self.inner.orders[x]
    }

    pub fn element_orders(&self) -> &[u64] {
        &self.inner.orders
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.inner.order
    }

    pub fn generators(&self) -> &[usize] {
        &self.inner.generators
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.inner.repr, Repr::Table(_))
    }

    /// The permutation for element `x` when the group came from generators.
    pub fn permutation(&self, x: usize) -> Option<&Perm> {
        self.inner.perms.as_ref().map(|p| &p[x])
    }

    pub fn pow(&self, x: usize, mut k: u64) -> usize {
        k %= self.order_of(x);
        let mut acc = 0;
        let mut base = x;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            k >>= 1;
        }
        acc
    }

    /// `g x g^-1`
    pub fn conjugate(&self, g: usize, x: usize) -> usize {
        self.mul(self.mul(g, x), self.inv(g))
    }

    /// `a^-1 b^-1 a b`
    pub fn commutator(&self, a: usize, b: usize) -> usize {
        self.mul(self.mul(self.inv(a), self.inv(b)), self.mul(a, b))
    }

    pub fn commutes(&self, a: usize, b: usize) -> bool {
        self.mul(a, b) == self.mul(b, a)
    }

    pub fn is_abelian(&self) -> bool {
        let gens = self.generators();
        gens.iter()
            .enumerate()
            .all(|(i, &a)| gens[i + 1..].iter().all(|&b| self.commutes(a, b)))
    }

    pub fn is_cyclic(&self) -> bool {
        self.inner
            .orders
            .iter()
            .any(|&o| o as usize == self.order())
    }

    /// Sorted members of the subgroup generated by `seeds`, and the seeds that
    /// were actually needed.
    pub fn generate(&self, seeds: impl IntoIterator<Item = usize>) -> (Vec<usize>, Vec<usize>) {
        let n = self.order();
        let mut inset = FixedBitSet::with_capacity(n);
        inset.insert(0);
        let mut members = vec![0usize];
        let mut gens: Vec<usize> = Vec::new();
        for s in seeds {
            if inset.contains(s) {
                continue;
            }
            gens.push(s);
            let mut queue: VecDeque<usize> = members.iter().copied().collect();
            while let Some(x) = queue.pop_front() {
                for &g in &gens {
                    let y = self.mul(x, g);
                    if !inset.contains(y) {
                        inset.insert(y);
                        members.push(y);
                        queue.push_back(y);
                    }
                }
            }
        }
        members.sort_unstable();
        (members, gens)
    }

    /// Exhaustive axiom check up to order 64, seeded sample of triples above.
    pub fn check_axioms(&self) -> Result<()> {
        let n = self.order();
        for x in 0..n {
            if self.mul(0, x) != x || self.mul(x, 0) != x {
                return Err(Error::NoIdentity);
            }
            if self.mul(x, self.inv(x)) != 0 {
                return Err(Error::NoInverse { element: x });
            }
        }
        check_associative(n, &|a, b| self.mul(a, b))
    }

    pub(crate) fn class_cache(&self) -> &OnceLock<Vec<Vec<usize>>> {
        &self.inner.classes
    }
}

fn check_associative(order: usize, at: &dyn Fn(usize, usize) -> usize) -> Result<()> {
    if order <= FULL_AXIOM_CHECK {
        for a in 0..order {
            for b in 0..order {
                let ab = at(a, b);
                for c in 0..order {
                    if at(ab, c) != at(a, at(b, c)) {
                        return Err(Error::NotAssociative { a, b, c });
                    }
                }
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(order as u64);
        for _ in 0..SAMPLED_TRIPLES {
            let (a, b, c) = (
                rng.gen_range(0..order),
                rng.gen_range(0..order),
                rng.gen_range(0..order),
            );
            if at(at(a, b), c) != at(a, at(b, c)) {
                return Err(Error::NotAssociative { a, b, c });
            }
        }
    }
    Ok(())
}

fn greedy_generators(order: usize, mul: impl Fn(usize, usize) -> usize) -> Vec<usize> {
    let mut inset = FixedBitSet::with_capacity(order);
    inset.insert(0);
    let mut members = vec![0usize];
    let mut gens = Vec::new();
    for s in 0..order {
        if inset.contains(s) {
            continue;
        }
        gens.push(s);
        let mut queue: VecDeque<usize> = members.iter().copied().collect();
        while let Some(x) = queue.pop_front() {
            for &g in &gens {
                let y = mul(x, g);
                if !inset.contains(y) {
                    inset.insert(y);
                    members.push(y);
                    queue.push_back(y);
                }
            }
        }
    }
    gens
}
