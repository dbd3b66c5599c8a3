//! Built-in group constructors and the named catalog.
//!
//! The catalog is complete for every order up to 16 (42 groups) and adds the
//! families the conjecture checks lean on: solvable groups up to 64, the
//! perfect groups of order 60 and 120, their relatives and a few larger groups
//! for cap and performance tests.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{FiniteGroup, Perm, DEFAULT_ELEMENT_CAP};
use crate::io;

/// How a catalog group is built.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Constructor {
    Cyclic {
        n: usize,
    },
    /// Dihedral group of the given order `2n`.
    Dihedral {
        order: usize,
    },
    /// Dicyclic group of order `4m`; order 8 is the quaternion group.
    Quaternion {
        order: usize,
    },
    Symmetric {
        degree: usize,
    },
    Alternating {
        degree: usize,
    },
    Klein,
    Sl23,
    Gl23,
    Sl25,
    DirectProduct {
        left: Box<Constructor>,
        right: Box<Constructor>,
    },
    Semidirect(Extension),
    /// One-line images, 1-based.
    Permutations {
        degree: usize,
        generators: Vec<Vec<usize>>,
    },
    File {
        path: PathBuf,
    },
}

/// A cyclic extension of an abelian group `A = Z_{m_1} x .. x Z_{m_r}` by
/// `Z_k`: pairs `(a, b)` with
/// `(a1, b1)(a2, b2) = (a1 + phi^b1(a2) + [b1 + b2 >= k] z, (b1 + b2) mod k)`.
///
/// `phi` acts as the integer matrix `action` on coordinate vectors. It must be
/// an automorphism with `phi^k = 1` and `phi(z) = z`; the group axioms are
/// validated when the group is built.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Extension {
    pub moduli: Vec<usize>,
    pub k: usize,
    pub action: Vec<Vec<usize>>,
    pub wrap: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub name: String,
    pub constructor: Constructor,
    pub order: usize,
}

impl CatalogEntry {
    pub fn new(name: &str, constructor: Constructor, order: usize) -> Self {
        CatalogEntry {
            name: name.to_string(),
            constructor,
            order,
        }
    }

    /// Builds the group and checks its order against the declared one.
    pub fn build(&self, cap: usize) -> Result<FiniteGroup> {
        if self.order > cap {
            return Err(Error::CapExceeded { cap });
        }
        let group = construct(&self.name, &self.constructor, cap)?;
        if group.order() != self.order {
            return Err(Error::CatalogOrder {
                name: self.name.clone(),
                expected: self.order,
                actual: group.order(),
            });
        }
        Ok(group)
    }
}

pub fn construct(name: &str, c: &Constructor, cap: usize) -> Result<FiniteGroup> {
    match c {
        Constructor::Cyclic { n } => {
            if *n > cap {
                return Err(Error::CapExceeded { cap });
            }
            Ok(FiniteGroup::cyclic(name, (*n).max(1)))
        }
        Constructor::Dihedral { order } => {
            if order % 2 != 0 || *order < 2 {
                return Err(Error::UnknownGroup(format!(
                    "dihedral of odd order {order}"
                )));
            }
            extension(name, &dihedral_data(order / 2, 0), cap)
        }
        Constructor::Quaternion { order } => {
            if order % 4 != 0 {
                return Err(Error::UnknownGroup(format!(
                    "dicyclic group of order {order}"
                )));
            }
            let m = order / 4;
            extension(name, &dihedral_data(2 * m, m), cap)
        }
        Constructor::Symmetric { degree } => symmetric(name, *degree, cap),
        Constructor::Alternating { degree } => alternating(name, *degree, cap),
        Constructor::Klein => FiniteGroup::direct_product(
            &FiniteGroup::cyclic("C2", 2),
            &FiniteGroup::cyclic("C2", 2),
            cap,
        )
        .map(|g| g.with_name(name)),
        Constructor::Sl23 => matrix_group(name, 3, |det| det == 1),
        Constructor::Gl23 => matrix_group(name, 3, |det| det != 0),
        Constructor::Sl25 => matrix_group(name, 5, |det| det == 1),
        Constructor::DirectProduct { left, right } => {
            let a = construct("left", left, cap)?;
            let b = construct("right", right, cap)?;
            Ok(FiniteGroup::direct_product(&a, &b, cap)?.with_name(name))
        }
        Constructor::Semidirect(data) => extension(name, data, cap),
        Constructor::Permutations { degree, generators } => {
            let gens = generators
                .iter()
                .map(|g| Perm::from_images_one_based(g))
                .collect::<Result<Vec<_>>>()?;
            FiniteGroup::from_permutations(name, *degree, &gens, cap)
        }
        Constructor::File { path } => Ok(io::load_group_file(path, cap)?.with_name(name)),
    }
}

fn dihedral_data(n: usize, wrap: usize) -> Extension {
    Extension {
        moduli: vec![n],
        k: 2,
        action: vec![vec![n.saturating_sub(1)]],
        wrap: vec![wrap],
    }
}

pub fn symmetric(name: &str, degree: usize, cap: usize) -> Result<FiniteGroup> {
    let d = degree.max(1);
    let mut gens = Vec::new();
    if d >= 2 {
        let cycle: Vec<usize> = (1..=d).collect();
        gens.push(Perm::from_cycles(d, &[&cycle])?);
        gens.push(Perm::from_cycles(d, &[&[1, 2]])?);
    }
    FiniteGroup::from_permutations(name, d, &gens, cap)
}

/// Generated by the 3-cycles `(i i+1 i+2)`.
pub fn alternating(name: &str, degree: usize, cap: usize) -> Result<FiniteGroup> {
    let d = degree.max(1);
    let gens = (1..d.saturating_sub(1))
        .map(|i| Perm::from_cycles(d, &[&[i, i + 1, i + 2]]))
        .collect::<Result<Vec<_>>>()?;
    FiniteGroup::from_permutations(name, d, &gens, cap)
}

/// 2x2 matrices over `F_p` whose determinant passes `keep`, identity first.
fn matrix_group(name: &str, p: u32, keep: impl Fn(u32) -> bool) -> Result<FiniteGroup> {
    let identity = [1u32, 0, 0, 1];
    let mut elements = vec![identity];
    for a in 0..p {
        for b in 0..p {
            for c in 0..p {
                for d in 0..p {
                    let m = [a, b, c, d];
                    let det = (a * d + p * p - (b * c) % p) % p;
                    if m != identity && keep(det) {
                        elements.push(m);
                    }
                }
            }
        }
    }
    FiniteGroup::from_elements(name, elements, |x, y| {
        [
            (x[0] * y[0] + x[1] * y[2]) % p,
            (x[0] * y[1] + x[1] * y[3]) % p,
            (x[2] * y[0] + x[3] * y[2]) % p,
            (x[2] * y[1] + x[3] * y[3]) % p,
        ]
    })
}

pub fn extension(name: &str, data: &Extension, cap: usize) -> Result<FiniteGroup> {
    let r = data.moduli.len();
    if data.action.len() != r
        || data.action.iter().any(|row| row.len() != r)
        || data.wrap.len() != r
        || data.k == 0
        || data.moduli.contains(&0)
    {
        return Err(Error::MalformedTable(format!(
            "extension data for {name} has inconsistent dimensions"
        )));
    }
    let base: usize = data.moduli.iter().product();
    let order = base * data.k;
    if order > cap {
        return Err(Error::CapExceeded { cap });
    }
    let decode = |mut x: usize| -> Vec<usize> {
        data.moduli
            .iter()
            .map(|&m| {
                let c = x % m;
                x /= m;
                c
            })
            .collect()
    };
    let encode = |v: &[usize]| -> usize {
        v.iter()
            .zip(&data.moduli)
            .rev()
            .fold(0, |acc, (&c, &m)| acc * m + c % m)
    };
    let apply = |v: &[usize]| -> Vec<usize> {
        (0..r)
            .map(|i| {
                let m = data.moduli[i];
                (0..r).map(|j| data.action[i][j] * v[j]).sum::<usize>() % m
            })
            .collect()
    };
    // phi^j on A as a lookup table
    let mut powers: Vec<Vec<usize>> = vec![(0..base).collect()];
    for j in 1..data.k {
        let prev = &powers[j - 1];
        powers.push(
            (0..base)
                .map(|a| encode(&apply(&decode(prev[a]))))
                .collect(),
        );
    }
    let add = |a: usize, b: usize| -> usize {
        let (x, y) = (decode(a), decode(b));
        let sum: Vec<usize> = x.iter().zip(&y).map(|(p, q)| p + q).collect();
        encode(&sum)
    };
    let z = encode(&data.wrap);
    FiniteGroup::from_fn(name, order, |p, q| {
        let (a1, b1) = (p % base, p / base);
        let (a2, b2) = (q % base, q / base);
        let mut a = add(a1, powers[b1][a2]);
        if b1 + b2 >= data.k {
            a = add(a, z);
        }
        ((b1 + b2) % data.k) * base + a
    })
}

/// `A5 wr C2` on 10 points, order 7200.
fn a5_wreath_c2() -> Constructor {
    let mut swap: Vec<usize> = (6..=10).collect();
    swap.extend(1..=5);
    Constructor::Permutations {
        degree: 10,
        generators: vec![
            vec![2, 3, 1, 4, 5, 6, 7, 8, 9, 10],
            vec![2, 3, 4, 5, 1, 6, 7, 8, 9, 10],
            swap,
        ],
    }
}

fn cyc(n: usize) -> Constructor {
    Constructor::Cyclic { n }
}

fn dih(order: usize) -> Constructor {
    Constructor::Dihedral { order }
}

fn dic(order: usize) -> Constructor {
    Constructor::Quaternion { order }
}

fn sym(degree: usize) -> Constructor {
    Constructor::Symmetric { degree }
}

fn alt(degree: usize) -> Constructor {
    Constructor::Alternating { degree }
}

fn prod(left: Constructor, right: Constructor) -> Constructor {
    Constructor::DirectProduct {
        left: Box::new(left),
        right: Box::new(right),
    }
}

fn ext(moduli: &[usize], k: usize, action: &[&[usize]], wrap: &[usize]) -> Constructor {
    Constructor::Semidirect(Extension {
        moduli: moduli.to_vec(),
        k,
        action: action.iter().map(|row| row.to_vec()).collect(),
        wrap: wrap.to_vec(),
    })
}

/// Every built-in entry, ascending by order.
pub fn builtin() -> Vec<CatalogEntry> {
    let e = CatalogEntry::new;
    vec![
        e("C1", cyc(1), 1),
        e("C2", cyc(2), 2),
        e("C3", cyc(3), 3),
        e("C4", cyc(4), 4),
        e("V4", Constructor::Klein, 4),
        e("C5", cyc(5), 5),
        e("C6", cyc(6), 6),
        e("S3", sym(3), 6),
        e("C7", cyc(7), 7),
        e("C8", cyc(8), 8),
        e("C4xC2", prod(cyc(4), cyc(2)), 8),
        e("C2xC2xC2", prod(prod(cyc(2), cyc(2)), cyc(2)), 8),
        e("D8", dih(8), 8),
        e("Q8", dic(8), 8),
        e("C9", cyc(9), 9),
        e("C3xC3", prod(cyc(3), cyc(3)), 9),
        e("C10", cyc(10), 10),
        e("D10", dih(10), 10),
        e("C11", cyc(11), 11),
        e("C12", cyc(12), 12),
        e("C6xC2", prod(cyc(6), cyc(2)), 12),
        e("D12", dih(12), 12),
        e("A4", alt(4), 12),
        e("Q12", dic(12), 12),
        e("C13", cyc(13), 13),
        e("C14", cyc(14), 14),
        e("D14", dih(14), 14),
        e("C15", cyc(15), 15),
        e("C16", cyc(16), 16),
        e("C4xC4", prod(cyc(4), cyc(4)), 16),
        e("C2^2:C4", ext(&[4, 2], 2, &[&[1, 0], &[1, 1]], &[0, 0]), 16),
        e("C4:C4", ext(&[4], 4, &[&[3]], &[0]), 16),
        e("C8xC2", prod(cyc(8), cyc(2)), 16),
        e("M16", ext(&[8], 2, &[&[5]], &[0]), 16),
        e("D16", dih(16), 16),
        e("QD16", ext(&[8], 2, &[&[3]], &[0]), 16),
        e("Q16", dic(16), 16),
        e("C4xC2xC2", prod(prod(cyc(4), cyc(2)), cyc(2)), 16),
        e("C2xD8", prod(cyc(2), dih(8)), 16),
        e("C2xQ8", prod(cyc(2), dic(8)), 16),
        e("C4oD8", ext(&[4, 2], 2, &[&[1, 2], &[0, 1]], &[0, 0]), 16),
        e("C2^4", prod(prod(cyc(2), cyc(2)), prod(cyc(2), cyc(2))), 16),
        e("C18", cyc(18), 18),
        e("C6xC3", prod(cyc(6), cyc(3)), 18),
        e("D18", dih(18), 18),
        e("S3xC3", prod(sym(3), cyc(3)), 18),
        e("C3^2:C2", ext(&[3, 3], 2, &[&[2, 0], &[0, 2]], &[0, 0]), 18),
        e("C20", cyc(20), 20),
        e("C10xC2", prod(cyc(10), cyc(2)), 20),
        e("D20", dih(20), 20),
        e("Q20", dic(20), 20),
        e("F20", ext(&[5], 4, &[&[2]], &[0]), 20),
        e("C21", cyc(21), 21),
        e("C7:C3", ext(&[7], 3, &[&[2]], &[0]), 21),
        e("C24", cyc(24), 24),
        e("C12xC2", prod(cyc(12), cyc(2)), 24),
        e("S4", sym(4), 24),
        e("SL23", Constructor::Sl23, 24),
        e("C2xA4", prod(cyc(2), alt(4)), 24),
        e("D24", dih(24), 24),
        e("Q24", dic(24), 24),
        e("C3:C8", ext(&[3], 8, &[&[2]], &[0]), 24),
        e("C3xQ8", prod(cyc(3), dic(8)), 24),
        e("S3xC4", prod(sym(3), cyc(4)), 24),
        e("C3xD8", prod(cyc(3), dih(8)), 24),
        e("C2xQ12", prod(cyc(2), dic(12)), 24),
        e("C25", cyc(25), 25),
        e("C5xC5", prod(cyc(5), cyc(5)), 25),
        e("C27", cyc(27), 27),
        e("C9xC3", prod(cyc(9), cyc(3)), 27),
        e("C3xC3xC3", prod(prod(cyc(3), cyc(3)), cyc(3)), 27),
        e("He27", ext(&[3, 3], 3, &[&[1, 0], &[1, 1]], &[0, 0]), 27),
        e("C9:C3", ext(&[9], 3, &[&[4]], &[0]), 27),
        e("C32", cyc(32), 32),
        e("D32", dih(32), 32),
        e("Q32", dic(32), 32),
        e("S3xS3", prod(sym(3), sym(3)), 36),
        e("C6xC6", prod(cyc(6), cyc(6)), 36),
        e("C7:C6", ext(&[7], 6, &[&[3]], &[0]), 42),
        e("C2xS4", prod(cyc(2), sym(4)), 48),
        e("GL23", Constructor::Gl23, 48),
        e("C11:C5", ext(&[11], 5, &[&[3]], &[0]), 55),
        e("C19:C3", ext(&[19], 3, &[&[7]], &[0]), 57),
        e("A5", alt(5), 60),
        e("C60", cyc(60), 60),
        e("D64", dih(64), 64),
        e("Q64", dic(64), 64),
        e("S5", sym(5), 120),
        e("C2xA5", prod(cyc(2), alt(5)), 120),
        e("SL25", Constructor::Sl25, 120),
        e("C120", cyc(120), 120),
        e("A6", alt(6), 360),
        e("S6", sym(6), 720),
        e("A5xA5", prod(alt(5), alt(5)), 3600),
        e("A5wrC2", a5_wreath_c2(), 7200),
    ]
}

/// Result of building a list of entries; failing entries are kept with their error.
#[derive(Debug, Default)]
pub struct CatalogBuild {
    pub groups: Vec<FiniteGroup>,
    pub skipped: Vec<(CatalogEntry, Error)>,
}

pub fn build_catalog(entries: &[CatalogEntry], cap: usize) -> CatalogBuild {
    let mut out = CatalogBuild::default();
    let mut names = std::collections::HashSet::new();
    for entry in entries {
        if !names.insert(entry.name.clone()) {
            out.skipped.push((
                entry.clone(),
                Error::HypothesisViolated(format!("duplicate catalog name {}", entry.name)),
            ));
            continue;
        }
        match entry.build(cap) {
            Ok(g) => out.groups.push(g),
            Err(err) => out.skipped.push((entry.clone(), err)),
        }
    }
    out
}

/// Catalog entry by exact name, falling back to the name grammar.
pub fn find_entry(name: &str) -> Option<CatalogEntry> {
    builtin()
        .into_iter()
        .find(|e| e.name == name)
        .or_else(|| parse_name(name))
}

/// Resolves a group name: first the given entries, then the built-in catalog,
/// then the grammar `Cn`, `Dn` (order n), `Qn` (dicyclic, order n), `Sk`,
/// `Ak`, `V4`, `SL23`, `GL23`, `SL25` and products joined by `x`.
pub fn lookup(name: &str, extra: &[CatalogEntry], cap: usize) -> Result<FiniteGroup> {
    let entry = extra
        .iter()
        .find(|e| e.name == name)
        .cloned()
        .or_else(|| find_entry(name))
        .ok_or_else(|| Error::UnknownGroup(name.to_string()))?;
    entry.build(cap)
}

pub fn lookup_default(name: &str) -> Result<FiniteGroup> {
    lookup(name, &[], DEFAULT_ELEMENT_CAP)
}

pub fn parse_name(name: &str) -> Option<CatalogEntry> {
    let factors: Vec<&str> = name.split('x').collect();
    if factors.len() > 1 {
        let mut parts = factors.into_iter().map(|f| {
            builtin()
                .into_iter()
                .find(|e| e.name == f)
                .or_else(|| parse_atom(f))
        });
        let first = parts.next()??;
        let mut constructor = first.constructor;
        let mut order = first.order;
        for part in parts {
            let part = part?;
            order = order.checked_mul(part.order)?;
            constructor = prod(constructor, part.constructor);
        }
        return Some(CatalogEntry::new(name, constructor, order));
    }
    parse_atom(name)
}

fn parse_atom(name: &str) -> Option<CatalogEntry> {
    let fixed = match name {
        "V4" => Some((Constructor::Klein, 4)),
        "SL23" => Some((Constructor::Sl23, 24)),
        "GL23" => Some((Constructor::Gl23, 48)),
        "SL25" => Some((Constructor::Sl25, 120)),
        _ => None,
    };
    if let Some((c, order)) = fixed {
        return Some(CatalogEntry::new(name, c, order));
    }
    let (head, digits) = name.split_at(name.find(|c: char| c.is_ascii_digit())?);
    let k: usize = digits.parse().ok()?;
    let (constructor, order) = match head {
        "C" if k >= 1 => (cyc(k), k),
        "D" if k >= 2 && k % 2 == 0 => (dih(k), k),
        "Q" if k >= 4 && k % 4 == 0 => (dic(k), k),
        "S" if (1..=8).contains(&k) => (sym(k), (1..=k).product()),
        "A" if (1..=8).contains(&k) => (alt(k), ((1..=k).product::<usize>() / 2).max(1)),
        _ => return None,
    };
    Some(CatalogEntry::new(name, constructor, order))
}
