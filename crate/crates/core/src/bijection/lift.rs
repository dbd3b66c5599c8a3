//! Lifting a coset bijection from `G/D` back to `G` across an abelian
//! minimal normal subgroup `D` of order `p^m`.
//!
//! The quotient bijection pairs `xND/D` with `ū + C_{n',|ND|/p^m}` inside
//! `C_{n'}`, `n' = n/p^m`; a residue `r` there stands for the coset
//! `r + C_{n,p^m}` of `C_n`. The construction follows the case split on
//! `D <= N` versus `D ∩ N = 1` and never repairs a failing case silently.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::arith::prime_power_base;
use crate::error::{Error, Result};
use crate::group::{normal_closure, quotient, CyclicModel, FiniteGroup, Quotient, Subgroup};

use super::{coset_order, find_coset_bijection, DivBijection, ElementFamily, Matched};

/// Which coset the lifted bijection lives on.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LiftVariant {
    /// `xN` onto `u + C_{n,|N|}`.
    #[default]
    OnN,
    /// `xND` onto `u + C_{n,|ND|}`.
    OnNd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LiftCase {
    /// `D <= N`: minimal-order representatives of `D`-cosets plus `sigma`.
    DInsideN,
    /// `D ∩ N = 1` and some `<xg>`, `g` in `N`, meets `D`.
    MeetsCyclic,
    /// `D ∩ N = 1` and every `<xg>` avoids `D`.
    AvoidsCyclic,
    /// `D ∩ N = 1` on `xND`: representatives plus `sigma` as for `D <= N`.
    ProductWithD,
}

impl fmt::Display for LiftCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LiftCase::DInsideN => "d-inside-n",
            LiftCase::MeetsCyclic => "meets-cyclic",
            LiftCase::AvoidsCyclic => "avoids-cyclic",
            LiftCase::ProductWithD => "product-with-d",
        })
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct LiftOptions {
    pub variant: LiftVariant,
    /// On a failed case, fall back to plain matching instead of erroring.
    pub fallback: bool,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Lifted {
    pub bijection: DivBijection,
    pub case: LiftCase,
    pub fallback_used: bool,
}

/// `sigma: D -> C_{n,p^m}`: identity to `0`, the remaining elements of `D`
/// in index order to the nonzero multiples of `n/p^m` in ascending order.
pub fn sigma(d: &Subgroup, n: u64) -> Vec<(usize, u64)> {
    let step = n / d.order() as u64;
    let mut members = d.members().to_vec();
    members.sort_unstable();
    // element 0 is the identity, so it comes first
    members
        .into_iter()
        .enumerate()
        .map(|(k, z)| (z, k as u64 * step))
        .collect()
}

/// The quotient `G/D` together with a matching of `xND/D` onto
/// `ū + C_{n',|ND|/|D|}`, ready to be lifted.
pub fn quotient_coset_bijection(
    group: &FiniteGroup,
    normal: &Subgroup,
    d: &Subgroup,
    x: usize,
    u: u64,
    seed: Option<u64>,
) -> Result<(Quotient, Matched)> {
    normal.check_normal(group)?;
    let q = quotient(group, d)?;
    let nd = normal.join(group, d);
    let image: BTreeSet<usize> = nd.members().iter().map(|&y| q.project(y)).collect();
    let image: Vec<usize> = image.into_iter().collect();
    let nd_bar = Subgroup::from_members(&q.group, &image)?;
    let n_bar = q.group.order() as u64;
    let matched = find_coset_bijection(&q.group, &nd_bar, q.project(x), u % n_bar, seed)?;
    Ok((q, matched))
}

struct Setup {
    n: u64,
    n_bar: u64,
    p_power: u64,
    nd: Subgroup,
    q: Quotient,
    fbar: BTreeMap<usize, u64>,
}

fn violated(msg: impl Into<String>) -> Error {
    Error::HypothesisViolated(msg.into())
}

fn check_hypotheses(
    group: &FiniteGroup,
    normal: &Subgroup,
    d: &Subgroup,
    quotient_bijection: &DivBijection,
    x: usize,
    u: u64,
) -> Result<Setup> {
    let n = group.order() as u64;
    if let Some((m, by)) = normal.find_non_normal_witness(group) {
        return Err(violated(format!("N is not normal: {m} conjugated by {by}")));
    }
    if let Some((m, by)) = d.find_non_normal_witness(group) {
        return Err(violated(format!("D is not normal: {m} conjugated by {by}")));
    }
    if d.is_trivial() {
        return Err(violated("D is trivial"));
    }
    let p_power = d.order() as u64;
    if prime_power_base(p_power).is_none() {
        return Err(violated(format!("|D| = {p_power} is not a prime power")));
    }
    let members = d.members();
    if let Some((&a, &b)) = members
        .iter()
        .flat_map(|a| members.iter().map(move |b| (a, b)))
        .find(|(&a, &b)| !group.commutes(a, b))
    {
        return Err(violated(format!("D is not abelian: {a} and {b} do not commute")));
    }
    for &z in members.iter().filter(|&&z| z != 0) {
        let closure = normal_closure(group, group.generators(), vec![z]);
        if closure.order() != d.order() {
            return Err(violated(format!(
                "D is not minimal normal: {z} has normal closure of order {}",
                closure.order()
            )));
        }
    }

    let nd = normal.join(group, d);
    let cyclic = CyclicModel::new(n);
    let group_side = coset_order(group, &nd, x);
    let cyclic_side = cyclic.coset_order(u, nd.order() as u64);
    if group_side != cyclic_side {
        return Err(violated(format!(
            "o(xND) = {group_side} but o(u C_(n,|ND|)) = {cyclic_side}"
        )));
    }

    let q = quotient(group, d)?;
    let n_bar = n / p_power;
    let bar = CyclicModel::new(n_bar);
    let expected_left: BTreeSet<u64> = nd
        .left_coset(group, x)
        .members
        .iter()
        .map(|&y| q.project(y) as u64)
        .collect();
    let expected_right: BTreeSet<u64> = bar
        .coset(u % n_bar, nd.order() as u64 / p_power)
        .into_iter()
        .collect();
    let left: BTreeSet<u64> = quotient_bijection.left.ids.iter().copied().collect();
    let right: BTreeSet<u64> = quotient_bijection.right.ids.iter().copied().collect();
    if left != expected_left || left.len() != quotient_bijection.left.len() {
        return Err(violated("quotient bijection is not defined on xND/D"));
    }
    if right != expected_right || right.len() != quotient_bijection.right.len() {
        return Err(violated("quotient bijection does not land on the residue coset"));
    }
    let true_orders = ElementFamily {
        ids: quotient_bijection.left.ids.clone(),
        orders: quotient_bijection
            .left
            .ids
            .iter()
            .map(|&y| q.group.order_of(y as usize))
            .collect(),
    };
    let recomputed = DivBijection {
        left: true_orders,
        right: ElementFamily::of_residues(bar, &quotient_bijection.right.ids),
        pairing: quotient_bijection.pairing.clone(),
    };
    recomputed
        .verify()
        .map_err(|e| violated(format!("quotient bijection: {e}")))?;
    let fbar = recomputed.pairs().map(|(l, r)| (l as usize, r)).collect();

    Ok(Setup {
        n,
        n_bar,
        p_power,
        nd,
        q,
        fbar,
    })
}

fn min_order_residue(cyclic: CyclicModel, candidates: impl Iterator<Item = u64>) -> Option<u64> {
    candidates.min_by_key(|&k| (cyclic.order_of(k), k))
}

/// `f(t z) = w + sigma(z)` over the `D`-cosets of `x M`, where `t` has least
/// order in its coset and `w` least order in `r + C_{n,p^m}`.
fn lift_by_sigma(
    group: &FiniteGroup,
    d: &Subgroup,
    domain: &[usize],
    setup: &Setup,
) -> std::result::Result<BTreeMap<usize, u64>, String> {
    let cyclic = CyclicModel::new(setup.n);
    let sig = sigma(d, setup.n);
    let mut by_coset: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &y in domain {
        by_coset.entry(setup.q.project(y)).or_default().push(y);
    }
    let mut f = BTreeMap::new();
    for (key, coset) in by_coset {
        let t = *coset
            .iter()
            .min_by_key(|&&y| (group.order_of(y), y))
            .expect("cosets are nonempty");
        let r = *setup
            .fbar
            .get(&key)
            .ok_or_else(|| format!("quotient bijection misses coset {key}"))?;
        let w = min_order_residue(
            cyclic,
            (0..setup.p_power).map(|j| (r + j * setup.n_bar) % setup.n),
        )
        .expect("p^m >= 1");
        for &(z, s) in &sig {
            f.insert(group.mul(t, z), cyclic.add(w, s));
        }
    }
    Ok(f)
}

/// `f(xh)` is the least-order element of `(r_h + C_{n,p^m}) ∩ (u + C_{n,|N|})`.
fn lift_by_intersection(
    domain: &[usize],
    normal: &Subgroup,
    u: u64,
    setup: &Setup,
) -> std::result::Result<BTreeMap<usize, u64>, String> {
    let cyclic = CyclicModel::new(setup.n);
    let n_order = normal.order() as u64;
    let mut f = BTreeMap::new();
    let mut used = BTreeMap::new();
    for &y in domain {
        let key = setup.q.project(y);
        let r = *setup
            .fbar
            .get(&key)
            .ok_or_else(|| format!("quotient bijection misses coset {key}"))?;
        let target = min_order_residue(
            cyclic,
            (0..setup.p_power)
                .map(|j| (r + j * setup.n_bar) % setup.n)
                .filter(|&k| cyclic.in_subgroup(n_order, (k + setup.n - u % setup.n) % setup.n)),
        )
        .ok_or_else(|| {
            format!("coset {r} + C_(n,{}) misses u + C_(n,{n_order}) for element {y}", setup.p_power)
        })?;
        if let Some(prev) = used.insert(target, y) {
            return Err(format!("elements {prev} and {y} both map to {target}"));
        }
        f.insert(y, target);
    }
    Ok(f)
}

/// Lifts `quotient_bijection` (on `xND/D`, as built over `quotient(G, D)`)
/// to a bijection on `xN` or `xND`.
pub fn lift_coset_bijection(
    group: &FiniteGroup,
    normal: &Subgroup,
    d: &Subgroup,
    quotient_bijection: &DivBijection,
    x: usize,
    u: u64,
    options: LiftOptions,
) -> Result<Lifted> {
    let setup = check_hypotheses(group, normal, d, quotient_bijection, x, u)?;
    let d_inside = d.is_subset_of(normal);
    let (case, domain_group) = match (d_inside, options.variant) {
        (true, _) => (LiftCase::DInsideN, normal.clone()),
        (false, LiftVariant::OnNd) => (LiftCase::ProductWithD, setup.nd.clone()),
        (false, LiftVariant::OnN) => {
            let meets = normal.members().iter().any(|&g| {
                Subgroup::generated(group, [group.mul(x, g)])
                    .members()
                    .iter()
                    .any(|&z| z != 0 && d.contains(z))
            });
            let case = if meets {
                LiftCase::MeetsCyclic
            } else {
                LiftCase::AvoidsCyclic
            };
            (case, normal.clone())
        }
    };
    let mut domain = domain_group.left_coset(group, x).members;
    domain.sort_unstable();

    let built = match case {
        LiftCase::DInsideN | LiftCase::ProductWithD => lift_by_sigma(group, d, &domain, &setup),
        LiftCase::MeetsCyclic | LiftCase::AvoidsCyclic => {
            lift_by_intersection(&domain, normal, u, &setup)
        }
    };

    let cyclic = CyclicModel::new(setup.n);
    let right = ElementFamily::of_residues(cyclic, &cyclic.coset(u, domain_group.order() as u64));
    let outcome = built.and_then(|f| {
        let pairing = domain
            .iter()
            .map(|y| {
                right
                    .position(f[y])
                    .ok_or_else(|| format!("{y} maps to {} outside the target coset", f[y]))
            })
            .collect::<std::result::Result<Vec<_>, String>>()?;
        let bijection = DivBijection {
            left: ElementFamily::of_elements(group, &domain),
            right: right.clone(),
            pairing,
        };
        bijection.verify()?;
        Ok(bijection)
    });

    match outcome {
        Ok(bijection) => Ok(Lifted {
            bijection,
            case,
            fallback_used: false,
        }),
        Err(detail) if options.fallback => {
            match find_coset_bijection(group, &domain_group, x, u, options.seed) {
                Ok(Matched::Found(bijection)) => Ok(Lifted {
                    bijection,
                    case,
                    fallback_used: true,
                }),
                Ok(Matched::Blocked(v)) => Err(Error::ConstructionFailed {
                    case: case.to_string(),
                    detail: format!(
                        "{detail}; matching fallback blocked on orders {:?} (demand {}, supply {})",
                        v.blocking_orders, v.demand, v.supply
                    ),
                }),
                Err(e) => Err(Error::ConstructionFailed {
                    case: case.to_string(),
                    detail: format!("{detail}; matching fallback failed: {e}"),
                }),
            }
        }
        Err(detail) => Err(Error::ConstructionFailed {
            case: case.to_string(),
            detail,
        }),
    }
}
