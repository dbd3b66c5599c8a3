//! Elementary-symmetric and power-sum aggregates of order weights.
//!
//! For a weight table `f`, `e_k(G)` is the `k`-th elementary symmetric
//! polynomial of the multiset `{ f(o(x)) : x in G }` and `p_k(G)` its `k`-th
//! power sum. Everything is exact `BigRational` arithmetic.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};
use serde::{Serialize, Serializer};

use crate::arith::gcd;
use crate::bijection::OrderMultiset;
use crate::error::{Error, Result};
use crate::group::FiniteGroup;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Monotonicity {
    Increasing,
    Decreasing,
    None,
}

impl fmt::Display for Monotonicity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Monotonicity::Increasing => "increasing",
            Monotonicity::Decreasing => "decreasing",
            Monotonicity::None => "none",
        })
    }
}

/// A finite weight table on order values with a validated monotonicity.
/// Monotonicity is strict: `a < b` forces `f(a) < f(b)` (or `>`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightFunction {
    name: String,
    table: BTreeMap<u64, BigRational>,
    monotonicity: Monotonicity,
}

impl WeightFunction {
    pub fn new(
        name: impl Into<String>,
        table: BTreeMap<u64, BigRational>,
        monotonicity: Monotonicity,
    ) -> Result<Self> {
        let entries: Vec<(&u64, &BigRational)> = table.iter().collect();
        for pair in entries.windows(2) {
            let ((&a, fa), (&b, fb)) = (pair[0], pair[1]);
            let ok = match monotonicity {
                Monotonicity::Increasing => fa < fb,
                Monotonicity::Decreasing => fa > fb,
                Monotonicity::None => true,
            };
            if !ok {
                return Err(Error::MonotonicityViolated {
                    declared: monotonicity.to_string(),
                    a,
                    b,
                });
            }
        }
        Ok(WeightFunction {
            name: name.into(),
            table,
            monotonicity,
        })
    }

    /// `f(d) = d` on `1..=max`.
    pub fn identity(max: u64) -> Self {
        let table = (1..=max).map(|d| (d, BigRational::from_integer(d.into()))).collect();
        Self::new("identity", table, Monotonicity::Increasing).expect("identity is increasing")
    }

    /// `f(d) = 1/d` on `1..=max`.
    pub fn reciprocal(max: u64) -> Self {
        let table = (1..=max)
            .map(|d| (d, BigRational::new(BigInt::one(), d.into())))
            .collect();
        Self::new("reciprocal", table, Monotonicity::Decreasing).expect("1/d is decreasing")
    }

    /// `f = 1` on `1..=max`.
    pub fn constant_one(max: u64) -> Self {
        let table = (1..=max).map(|d| (d, BigRational::one())).collect();
        Self::new("one", table, Monotonicity::None).expect("no monotonicity to check")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn monotonicity(&self) -> Monotonicity {
        self.monotonicity
    }

    pub fn table(&self) -> &BTreeMap<u64, BigRational> {
        &self.table
    }

    pub fn at(&self, order: u64) -> Result<&BigRational> {
        self.table.get(&order).ok_or(Error::WeightMissing(order))
    }
}

/// Exact rationals serialize as `"num/den"`, or `"num"` when integral.
pub fn rational_string(value: &BigRational) -> String {
    value.to_string()
}

fn serialize_rationals<S: Serializer>(values: &[BigRational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(values.iter().map(rational_string))
}

fn serialize_rational<S: Serializer>(value: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&rational_string(value))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PsiValues {
    pub group: String,
    pub weight: String,
    /// `e_1..e_K`.
    #[serde(serialize_with = "serialize_rationals")]
    pub e: Vec<BigRational>,
    /// `p_1..p_K`.
    #[serde(serialize_with = "serialize_rationals")]
    pub p: Vec<BigRational>,
}

fn weights(orders: &OrderMultiset, f: &WeightFunction) -> Result<Vec<(BigRational, u64)>> {
    orders
        .counts
        .iter()
        .map(|(&o, &m)| Ok((f.at(o)?.clone(), m)))
        .collect()
}

/// `e_1..e_K` by multiplying out `prod (1 + w t)` truncated at degree `K`.
pub fn elementary_of(orders: &OrderMultiset, f: &WeightFunction, k_max: usize) -> Result<Vec<BigRational>> {
    let mut e = vec![BigRational::zero(); k_max + 1];
    e[0] = BigRational::one();
    for (w, m) in weights(orders, f)? {
        for _ in 0..m {
            for k in (1..=k_max).rev() {
                let term = &e[k - 1] * &w;
                e[k] += term;
            }
        }
    }
    e.remove(0);
    Ok(e)
}

pub fn power_of(orders: &OrderMultiset, f: &WeightFunction, k_max: usize) -> Result<Vec<BigRational>> {
    let ws = weights(orders, f)?;
    Ok((1..=k_max)
        .map(|k| {
            ws.iter().fold(BigRational::zero(), |acc, (w, m)| {
                acc + Pow::pow(w, k as u32) * BigRational::from_integer((*m).into())
            })
        })
        .collect())
}

pub fn psi_elementary(group: &FiniteGroup, f: &WeightFunction, k_max: usize) -> Result<Vec<BigRational>> {
    elementary_of(&OrderMultiset::of_group(group), f, k_max)
}

pub fn psi_power(group: &FiniteGroup, f: &WeightFunction, k_max: usize) -> Result<Vec<BigRational>> {
    power_of(&OrderMultiset::of_group(group), f, k_max)
}

pub fn psi_values(group: &FiniteGroup, f: &WeightFunction, k_max: usize) -> Result<PsiValues> {
    Ok(PsiValues {
        group: group.name().to_string(),
        weight: f.name().to_string(),
        e: psi_elementary(group, f, k_max)?,
        p: psi_power(group, f, k_max)?,
    })
}

/// Determinant of the `k x k` matrix with first column `i e_i`, ones on the
/// superdiagonal and `e_{i-j+1}` below it, which equals `p_k`.
pub fn newton_determinant(e: &[BigRational], k: usize) -> BigRational {
    assert!(k >= 1 && k <= e.len());
    let entry = |i: usize, j: usize| -> BigRational {
        // 1-based indices
        if j == 1 {
            &e[i - 1] * BigRational::from_integer(BigInt::from(i))
        } else if j == i + 1 {
            BigRational::one()
        } else if j <= i {
            e[i - j].clone()
        } else {
            BigRational::zero()
        }
    };
    let mut m: Vec<Vec<BigRational>> = (1..=k)
        .map(|i| (1..=k).map(|j| entry(i, j)).collect())
        .collect();
    determinant(&mut m)
}

/// Gaussian elimination over the rationals.
fn determinant(m: &mut [Vec<BigRational>]) -> BigRational {
    let n = m.len();
    let mut det = BigRational::one();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return BigRational::zero();
        };
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        let p = m[col][col].clone();
        det *= &p;
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = &m[r][col] / &p;
            for c in col..n {
                let delta = &factor * &m[col][c];
                m[r][c] -= delta;
            }
        }
    }
    det
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NewtonRow {
    pub k: usize,
    #[serde(serialize_with = "serialize_rational")]
    pub determinant: BigRational,
    #[serde(serialize_with = "serialize_rational")]
    pub power_sum: BigRational,
    pub equal: bool,
}

pub fn newton_check(group: &FiniteGroup, f: &WeightFunction, k_max: usize) -> Result<Vec<NewtonRow>> {
    let e = psi_elementary(group, f, k_max)?;
    let p = psi_power(group, f, k_max)?;
    Ok((1..=k_max)
        .map(|k| {
            let determinant = newton_determinant(&e, k);
            let equal = determinant == p[k - 1];
            NewtonRow {
                k,
                determinant,
                power_sum: p[k - 1].clone(),
                equal,
            }
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Comparison {
    pub group: String,
    pub order: usize,
    pub k: usize,
    #[serde(serialize_with = "serialize_rational")]
    pub group_value: BigRational,
    #[serde(serialize_with = "serialize_rational")]
    pub cyclic_value: BigRational,
    pub expected: Monotonicity,
    pub holds: bool,
}

/// `e_k(G)` against `e_k(C_n)` for `k <= min(K, n)`; an increasing weight
/// expects `<`, a decreasing one `>`. Cyclic groups yield no records.
pub fn compare_with_cyclic(group: &FiniteGroup, f: &WeightFunction, k_max: usize) -> Result<Vec<Comparison>> {
    if f.monotonicity() == Monotonicity::None {
        return Err(Error::MonotonicityUndeclared);
    }
    if group.is_cyclic() {
        return Ok(Vec::new());
    }
    let n = group.order();
    let k_max = k_max.min(n);
    let g = psi_elementary(group, f, k_max)?;
    let c = elementary_of(&OrderMultiset::of_cyclic(n as u64), f, k_max)?;
    Ok(g
        .into_iter()
        .zip(c)
        .enumerate()
        .map(|(i, (group_value, cyclic_value))| {
            let holds = match f.monotonicity() {
                Monotonicity::Increasing => group_value < cyclic_value,
                _ => group_value > cyclic_value,
            };
            Comparison {
                group: group.name().to_string(),
                order: n,
                k: i + 1,
                group_value,
                cyclic_value,
                expected: f.monotonicity(),
                holds,
            }
        })
        .collect())
}

pub fn inequality_sweep(groups: &[FiniteGroup], f: &WeightFunction, k_max: usize) -> Result<Vec<Comparison>> {
    let mut out = Vec::new();
    for group in groups {
        out.extend(compare_with_cyclic(group, f, k_max)?);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProductRecord {
    pub left: String,
    pub right: String,
    pub l: usize,
    #[serde(serialize_with = "serialize_rational")]
    pub product_value: BigRational,
    #[serde(serialize_with = "serialize_rational")]
    pub factor_product: BigRational,
    pub coprime: bool,
    /// `p_l(AxB) <= p_l(A) p_l(B)`.
    pub bounded: bool,
    /// Equality holds exactly when the orders are coprime.
    pub equality_matches: bool,
}

impl ProductRecord {
    pub fn holds(&self) -> bool {
        self.bounded && self.equality_matches
    }
}

/// `p_l(A x B)` against `p_l(A) p_l(B)` for `l = 1..L`, raw values kept.
pub fn product_multiplicativity(
    a: &FiniteGroup,
    b: &FiniteGroup,
    f: &WeightFunction,
    l_max: usize,
    cap: usize,
) -> Result<Vec<ProductRecord>> {
    let ab = FiniteGroup::direct_product(a, b, cap)?;
    let pab = psi_power(&ab, f, l_max)?;
    let pa = psi_power(a, f, l_max)?;
    let pb = psi_power(b, f, l_max)?;
    let coprime = gcd(a.order() as u64, b.order() as u64) == 1;
    Ok((0..l_max)
        .map(|i| {
            let factor_product = &pa[i] * &pb[i];
            let equal = pab[i] == factor_product;
            ProductRecord {
                left: a.name().to_string(),
                right: b.name().to_string(),
                l: i + 1,
                bounded: pab[i] <= factor_product,
                equality_matches: equal == coprime,
                product_value: pab[i].clone(),
                factor_product,
                coprime,
            }
        })
        .collect())
}

/// `sum_{d | n} d phi(d)`, the closed form of `e_1(C_n)` for the identity weight.
pub fn cyclic_order_sum(n: u64) -> BigInt {
    crate::arith::divisors(n)
        .into_iter()
        .map(|d| BigInt::from(d) * BigInt::from(crate::arith::euler_phi(d)))
        .sum()
}

/// Rationals are compared as integers when both are integral.
pub fn as_integer(value: &BigRational) -> Option<BigInt> {
    value.denom().is_one().then(|| value.numer().clone())
}
