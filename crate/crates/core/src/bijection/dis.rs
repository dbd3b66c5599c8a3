//! The families `S_a = { b a : b in N_G(<a>), o(b) | q(n_i) for some i }`
//! attached to `q`-elements `a`, and their maps onto cosets of `<a>`.
//!
//! `q` is the smallest prime of `lcm(n_i)` and `q(n)` strips every factor `q`
//! from `n`. `D_a` collects the cosets `c<a>` in `C_G(a)/<a>` whose order
//! divides some `q(n_i')` with `n_i' = gcd(n_i, |N_G(<a>)|)`.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::arith::{divides, gcd, lcm, prime_power_base, smallest_prime, strip_prime};
use crate::error::{Error, Result};
use crate::group::{conjugacy_classes, normalizer_centralizer, FiniteGroup, Subgroup};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SaMember {
    pub b: usize,
    /// The product `b a`.
    pub element: usize,
    /// Smallest element of `b<a>`, which names the coset.
    pub coset: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SaFamily {
    pub a: usize,
    pub q: u64,
    /// `q(n_i)`.
    pub stripped: Vec<u64>,
    /// `q(n_i')`.
    pub reduced: Vec<u64>,
    #[serde(skip)]
    pub normalizer: Subgroup,
    #[serde(skip)]
    pub centralizer: Subgroup,
    pub members: Vec<SaMember>,
    /// Cosets of `<a>` in `C_G(a)` forming `D_a`, by smallest element.
    pub d_a: Vec<usize>,
    /// Order of each coset of `<a>` in `C_G(a)/<a>`, by smallest element.
    pub coset_orders: BTreeMap<usize, u64>,
}

impl SaFamily {
    pub fn elements(&self) -> BTreeSet<usize> {
        self.members.iter().map(|m| m.element).collect()
    }
}

pub fn build_sa(group: &FiniteGroup, a: usize, bases: &[u64]) -> Result<SaFamily> {
    if bases.is_empty() {
        return Err(Error::EmptyExponents);
    }
    let l = bases.iter().fold(1, |acc, &n| lcm(acc, n));
    let order = group.order_of(a);
    let q = smallest_prime(l).unwrap_or(1);
    if order == 1 || q == 1 || prime_power_base(order) != Some(q) {
        return Err(Error::NotQElement {
            element: a,
            order,
            q,
        });
    }
    let nc = normalizer_centralizer(group, a);
    let h_order = nc.normalizer.order() as u64;
    let stripped: Vec<u64> = bases.iter().map(|&n| strip_prime(n, q)).collect();
    let reduced: Vec<u64> = bases
        .iter()
        .map(|&n| strip_prime(gcd(n, h_order), q))
        .collect();

    let cyclic = &nc.cyclic;
    let coset_of = |x: usize| -> usize {
        cyclic
            .members()
            .iter()
            .map(|&z| group.mul(x, z))
            .min()
            .expect("<a> is nonempty")
    };

    let mut coset_orders = BTreeMap::new();
    for &c in nc.centralizer.members() {
        coset_orders
            .entry(coset_of(c))
            .or_insert_with(|| coset_order_mod(group, cyclic, c));
    }
    let d_a: Vec<usize> = coset_orders
        .iter()
        .filter(|(_, &o)| reduced.iter().any(|&r| divides(o, r)))
        .map(|(&c, _)| c)
        .collect();

    let members = nc
        .normalizer
        .members()
        .iter()
        .filter(|&&b| stripped.iter().any(|&s| divides(group.order_of(b), s)))
        .map(|&b| SaMember {
            b,
            element: group.mul(b, a),
            coset: coset_of(b),
        })
        .collect();

    Ok(SaFamily {
        a,
        q,
        stripped,
        reduced,
        normalizer: nc.normalizer,
        centralizer: nc.centralizer,
        members,
        d_a,
        coset_orders,
    })
}

fn coset_order_mod(group: &FiniteGroup, cyclic: &Subgroup, c: usize) -> u64 {
    let mut k = 1;
    let mut power = c;
    while !cyclic.contains(power) {
        power = group.mul(power, c);
        k += 1;
    }
    k
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DisFailure {
    Overlap { a1: usize, a2: usize, element: usize },
    OutsideCentralizer { a: usize, b: usize },
    OutsideDa { a: usize, b: usize },
    NotInjective { a: usize, first: usize, second: usize },
    NotSurjective { a: usize, missing: usize },
    Divisibility { a: usize, b: usize, order: u64, bound: u64 },
}

#[derive(Clone, Debug, Serialize)]
pub struct DisReport {
    pub families: Vec<SaFamily>,
    pub failures: Vec<DisFailure>,
}

impl DisReport {
    pub fn holds(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn disjoint(&self) -> bool {
        !self
            .failures
            .iter()
            .any(|f| matches!(f, DisFailure::Overlap { .. }))
    }
}

/// Checks disjointness of the `S_a` over `class` and, per family, that
/// `b a -> b<a>` is a bijection onto `D_a` with `o(ba) | o(b<a>) o(a)`.
pub fn verify_dis(group: &FiniteGroup, class: &[usize], bases: &[u64]) -> Result<DisReport> {
    if let Some(&first) = class.first() {
        let conj = conjugacy_classes(group)
            .iter()
            .find(|c| c.contains(&first))
            .expect("every element lies in a class");
        if let Some(&stray) = class.iter().find(|x| !conj.contains(x)) {
            return Err(Error::HypothesisViolated(format!(
                "element {stray} is not conjugate to {first}"
            )));
        }
    }
    let families = class
        .iter()
        .map(|&a| build_sa(group, a, bases))
        .collect::<Result<Vec<_>>>()?;
    let mut failures = Vec::new();

    let mut owner: BTreeMap<usize, usize> = BTreeMap::new();
    for fam in &families {
        for m in &fam.members {
            if let Some(&prev) = owner.get(&m.element) {
                if prev != fam.a {
                    failures.push(DisFailure::Overlap {
                        a1: prev,
                        a2: fam.a,
                        element: m.element,
                    });
                }
            } else {
                owner.insert(m.element, fam.a);
            }
        }
    }

    for fam in &families {
        let o_a = group.order_of(fam.a);
        let mut image: BTreeMap<usize, usize> = BTreeMap::new();
        for m in &fam.members {
            if !fam.centralizer.contains(m.b) {
                failures.push(DisFailure::OutsideCentralizer { a: fam.a, b: m.b });
                continue;
            }
            if fam.d_a.binary_search(&m.coset).is_err() {
                failures.push(DisFailure::OutsideDa { a: fam.a, b: m.b });
            }
            if let Some(&first) = image.get(&m.coset) {
                failures.push(DisFailure::NotInjective {
                    a: fam.a,
                    first,
                    second: m.element,
                });
            } else {
                image.insert(m.coset, m.element);
            }
            let bound = fam.coset_orders[&m.coset] * o_a;
            let order = group.order_of(m.element);
            if !divides(order, bound) {
                failures.push(DisFailure::Divisibility {
                    a: fam.a,
                    b: m.b,
                    order,
                    bound,
                });
            }
        }
        for &c in &fam.d_a {
            if !image.contains_key(&c) {
                failures.push(DisFailure::NotSurjective {
                    a: fam.a,
                    missing: c,
                });
            }
        }
    }
    Ok(DisReport { families, failures })
}
