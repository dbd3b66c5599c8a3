use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("closure exceeds the element cap of {cap}")]
    CapExceeded { cap: usize },

    #[error("subgroup lattice exceeds the cap of {cap} subgroups")]
    LatticeCapExceeded { cap: usize },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("table is not associative: ({a}*{b})*{c} != {a}*({b}*{c})")]
    NotAssociative { a: usize, b: usize, c: usize },

    #[error("table has no identity element")]
    NoIdentity,

    #[error("element {element} has no inverse")]
    NoInverse { element: usize },

    #[error("malformed table: {0}")]
    MalformedTable(String),

    #[error("subgroup is not normal: conjugating {member} by {by} leaves the subgroup")]
    NotNormal { member: usize, by: usize },

    #[error("divisor closure has {size} elements, more than the antichain limit {limit}")]
    AntichainExplosion { size: usize, limit: usize },

    #[error("no chain: no compatible A({divisor}) found")]
    NoChain { divisor: u64 },

    #[error("element families differ in size: {left} vs {right}")]
    SizeMismatch { left: u64, right: u64 },

    #[error("coset orders differ: o(yN) = {group_side}, o(uC) = {cyclic_side}")]
    OrderMismatch { group_side: u64, cyclic_side: u64 },

    #[error("element {element} of order {order} is not a nontrivial {q}-element")]
    NotQElement { element: usize, order: u64, q: u64 },

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("construction failed in case {case}: {detail}")]
    ConstructionFailed { case: String, detail: String },

    #[error("weight table has no entry for order {0}")]
    WeightMissing(u64),

    #[error("weight table is not {declared} on its support: f({a}) vs f({b})")]
    MonotonicityViolated { declared: String, a: u64, b: u64 },

    #[error("weight function has no declared monotonicity")]
    MonotonicityUndeclared,

    #[error("not a full-group bijection: {0}")]
    NotAGroupBijection(String),

    #[error("empty exponent list")]
    EmptyExponents,

    #[error("catalog entry {name} built a group of order {actual}, expected {expected}")]
    CatalogOrder {
        name: String,
        expected: usize,
        actual: usize,
    },

    #[error("unknown group: {0}")]
    UnknownGroup(String),

    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("report store {}: {source}", path.display())]
    Persistence {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
