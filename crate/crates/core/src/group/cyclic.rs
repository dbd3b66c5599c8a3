use crate::arith::{divides, divisors, gcd};

/// The cyclic group `C_n` as residues `0..n` under addition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CyclicModel {
    n: u64,
}

impl CyclicModel {
    pub fn new(n: u64) -> Self {
        assert!(n >= 1, "cyclic group of order zero");
        CyclicModel { n }
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn order_of(&self, k: u64) -> u64 {
        self.n / gcd(self.n, k % self.n)
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        (a + b) % self.n
    }

    pub fn element_orders(&self) -> Vec<u64> {
        (0..self.n).map(|k| self.order_of(k)).collect()
    }

    /// Members of `C_{n,m}`: the multiples of `n/m`. Panics unless `m | n`.
    pub fn subgroup(&self, m: u64) -> Vec<u64> {
        assert!(divides(m, self.n), "{m} does not divide {}", self.n);
        let step = self.n / m;
        (0..m).map(|j| j * step).collect()
    }

    pub fn in_subgroup(&self, m: u64, k: u64) -> bool {
        (k % self.n) % (self.n / m) == 0
    }

    /// `u + C_{n,m}`, ascending.
    pub fn coset(&self, u: u64, m: u64) -> Vec<u64> {
        let mut out: Vec<u64> = self
            .subgroup(m)
            .into_iter()
            .map(|h| self.add(u, h))
            .collect();
        out.sort_unstable();
        out
    }

    /// Order of `u + C_{n,m}` in `C_n / C_{n,m}`, which is cyclic of order `n/m`.
    pub fn coset_order(&self, u: u64, m: u64) -> u64 {
        let index = self.n / m;
        index / gcd(index, u % index)
    }

    /// Coset representatives `0..n/m` whose coset has order `d` in the quotient.
    pub fn cosets_of_order(&self, m: u64, d: u64) -> Vec<u64> {
        let index = self.n / m;
        (0..index)
            .filter(|&u| self.coset_order(u, m) == d)
            .collect()
    }

    /// Every subgroup `C_{n,m}`, ascending in `m`.
    pub fn subgroups(&self) -> Vec<(u64, Vec<u64>)> {
        divisors(self.n)
            .into_iter()
            .map(|m| (m, self.subgroup(m)))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orders_and_subgroups() {
        let c = CyclicModel::new(12);
        assert_eq!(c.order_of(0), 1);
        assert_eq!(c.order_of(8), 3);
        assert_eq!(c.order_of(5), 12);
        assert_eq!(c.subgroup(4), vec![0, 3, 6, 9]);
        assert_eq!(c.subgroups().len(), 6);
        for (m, members) in c.subgroups() {
            assert_eq!(members.len() as u64, m);
            assert!(members.iter().all(|&k| c.in_subgroup(m, k)));
        }
    }

    #[test]
    fn subgroup_of_order_m_is_unique_solution_set() {
        // C_{n,m} is exactly the set of residues of order dividing m
        for n in 1..=60u64 {
            let c = CyclicModel::new(n);
            for m in divisors(n) {
                let solutions: Vec<u64> = (0..n).filter(|&k| divides(c.order_of(k), m)).collect();
                assert_eq!(solutions, c.subgroup(m), "n={n} m={m}");
            }
        }
    }

    #[test]
    fn coset_orders() {
        let c = CyclicModel::new(6);
        // C_6 / C_{6,3} has order 2
        assert_eq!(c.coset_order(0, 3), 1);
        assert_eq!(c.coset_order(1, 3), 2);
        assert_eq!(c.coset(3, 3), vec![1, 3, 5]);
        assert_eq!(c.cosets_of_order(3, 2), vec![1]);
        assert_eq!(c.cosets_of_order(1, 6), vec![1, 5]);
    }
}
