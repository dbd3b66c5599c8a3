use fixedbitset::FixedBitSet;
use serde::Serialize;

use super::FiniteGroup;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SubgroupFlags {
    pub is_normal: bool,
    pub is_abelian: bool,
    pub is_minimal_normal: bool,
    pub is_central: bool,
}

/// A subgroup of some parent group, stored as a sorted member list.
///
/// The parent is not held; every method that needs it takes it explicitly.
#[derive(Clone, Debug)]
pub struct Subgroup {
    members: Vec<usize>,
    generators: Vec<usize>,
    mask: FixedBitSet,
    pub flags: SubgroupFlags,
}

impl PartialEq for Subgroup {
    fn eq(&self, other: &Self) -> bool {
        self.members == other.members
    }
}

impl Eq for Subgroup {}

impl Subgroup {
    pub fn generated(group: &FiniteGroup, seeds: impl IntoIterator<Item = usize>) -> Self {
        let (members, generators) = group.generate(seeds);
        Self::assemble(group, members, generators)
    }

    /// Checks that `members` is closed and contains the identity.
    pub fn from_members(group: &FiniteGroup, members: &[usize]) -> Result<Self> {
        let mut sorted = members.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        let (closure, generators) = group.generate(sorted.iter().copied());
        if closure != sorted {
            return Err(Error::HypothesisViolated(format!(
                "member set of size {} is not a subgroup",
                sorted.len()
            )));
        }
        Ok(Self::assemble(group, sorted, generators))
    }

    pub fn trivial(group: &FiniteGroup) -> Self {
        Self::generated(group, [])
    }

    pub fn whole(group: &FiniteGroup) -> Self {
        Self::generated(group, group.generators().iter().copied())
    }

    fn assemble(group: &FiniteGroup, members: Vec<usize>, generators: Vec<usize>) -> Self {
        let mut mask = FixedBitSet::with_capacity(group.order());
        for &m in &members {
            mask.insert(m);
        }
        let mut sub = Subgroup {
            members,
            generators,
            mask,
            flags: SubgroupFlags::default(),
        };
        sub.flags.is_normal = sub.find_non_normal_witness(group).is_none();
        sub.flags.is_abelian = sub.generators.iter().enumerate().all(|(i, &a)| {
            sub.generators[i + 1..]
                .iter()
                .all(|&b| group.commutes(a, b))
        });
        sub.flags.is_central = sub
            .generators
            .iter()
            .all(|&h| group.generators().iter().all(|&g| group.commutes(h, g)));
        sub
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.mask.contains(x)
    }

    pub fn is_trivial(&self) -> bool {
        self.members.len() == 1
    }

    pub fn is_subset_of(&self, other: &Subgroup) -> bool {
        self.mask.is_subset(&other.mask)
    }

    pub fn mask(&self) -> &FixedBitSet {
        &self.mask
    }

    /// A generator pair `(h, g)` with `g h g^-1` outside the subgroup, if any.
    pub fn find_non_normal_witness(&self, group: &FiniteGroup) -> Option<(usize, usize)> {
        for &g in group.generators() {
            for &h in &self.generators {
                if !self.contains(group.conjugate(g, h)) {
                    return Some((h, g));
                }
            }
        }
        None
    }

    pub fn check_normal(&self, group: &FiniteGroup) -> Result<()> {
        match self.find_non_normal_witness(group) {
            Some((member, by)) => Err(Error::NotNormal { member, by }),
            None => Ok(()),
        }
    }

    /// Set product `self * other`, generated from both generator lists.
    pub fn join(&self, group: &FiniteGroup, other: &Subgroup) -> Subgroup {
        Self::generated(
            group,
            self.generators
                .iter()
                .chain(other.generators.iter())
                .copied(),
        )
    }

    pub fn intersection(&self, group: &FiniteGroup, other: &Subgroup) -> Subgroup {
        let members: Vec<usize> = self
            .members
            .iter()
            .copied()
            .filter(|&x| other.contains(x))
            .collect();
        let (closure, generators) = group.generate(members.iter().copied());
        debug_assert_eq!(closure, members);
        Self::assemble(group, members, generators)
    }

    pub fn left_coset(&self, group: &FiniteGroup, representative: usize) -> Coset {
        let mut members: Vec<usize> = self
            .members
            .iter()
            .map(|&h| group.mul(representative, h))
            .collect();
        members.sort_unstable();
        Coset {
            subgroup_order: self.order(),
            representative,
            members,
        }
    }

    pub fn right_coset(&self, group: &FiniteGroup, representative: usize) -> Coset {
        let mut members: Vec<usize> = self
            .members
            .iter()
            .map(|&h| group.mul(h, representative))
            .collect();
        members.sort_unstable();
        Coset {
            subgroup_order: self.order(),
            representative,
            members,
        }
    }
}

/// A left coset `y H`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coset {
    pub subgroup_order: usize,
    pub representative: usize,
    pub members: Vec<usize>,
}
