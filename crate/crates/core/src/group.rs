//! Finite groups as multiplication tables, with subgroups and quotients.
//!
//! Elements are indices `0..n`; index 0 is always the identity.

use std::collections::BTreeSet;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    table: Vec<Vec<usize>>,
    inverses: Vec<usize>,
}

impl FiniteGroup {
    /// Validates closure, identity at index 0, inverses and associativity.
    pub fn from_table(table: Vec<Vec<usize>>) -> Result<Self> {
        let n = table.len();
        let bad = |msg: &str| Err(Error::ModuleInconsistent(format!("group table: {msg}")));
        if n == 0 || table.iter().any(|row| row.len() != n || row.iter().any(|&x| x >= n)) {
            return bad("not a square table over 0..n");
        }
        for a in 0..n {
            if table[0][a] != a || table[a][0] != a {
                return bad("index 0 is not the identity");
            }
        }
        let mut inverses = vec![usize::MAX; n];
        for a in 0..n {
            match (0..n).find(|&b| table[a][b] == 0) {
                Some(b) if table[b][a] == 0 => inverses[a] = b,
                _ => return bad("missing inverse"),
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return bad("not associative");
                    }
                }
            }
        }
        Ok(FiniteGroup { table, inverses })
    }

    pub fn trivial() -> Self {
        FiniteGroup { table: vec![vec![0]], inverses: vec![0] }
    }

    pub fn cyclic(n: usize) -> Self {
        assert!(n >= 1);
        let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        let inverses = (0..n).map(|a| (n - a) % n).collect();
        FiniteGroup { table, inverses }
    }

    /// Direct product; element `(a, b)` has index `a * |H| + b`.
    pub fn product(g: &FiniteGroup, h: &FiniteGroup) -> Self {
        let (n, m) = (g.order(), h.order());
        let table = (0..n * m)
            .map(|x| {
                (0..n * m)
                    .map(|y| g.mul(x / m, y / m) * m + h.mul(x % m, y % m))
                    .collect()
            })
            .collect();
        let inverses = (0..n * m).map(|x| g.inv(x / m) * m + h.inv(x % m)).collect();
        FiniteGroup { table, inverses }
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverses[a]
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order()).all(|a| (0..self.order()).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn is_subgroup(&self, set: &[usize]) -> bool {
        let s: BTreeSet<usize> = set.iter().copied().collect();
        s.contains(&0)
            && s.iter().all(|&a| a < self.order())
            && s.iter().all(|&a| s.iter().all(|&b| s.contains(&self.mul(a, b))))
    }

    pub fn is_normal(&self, set: &[usize]) -> bool {
        let s: BTreeSet<usize> = set.iter().copied().collect();
        (0..self.order()).all(|g| {
            s.iter()
                .all(|&h| s.contains(&self.mul(self.mul(g, h), self.inv(g))))
        })
    }

    /// Sorted subgroup generated by `gens`.
    pub fn generated(&self, gens: &[usize]) -> Vec<usize> {
        let mut set: BTreeSet<usize> = BTreeSet::from([0]);
        let mut frontier = vec![0];
        while let Some(a) = frontier.pop() {
            for &g in gens {
                let b = self.mul(a, g);
                if set.insert(b) {
                    frontier.push(b);
                }
            }
        }
        set.into_iter().collect()
    }
}

/// A subgroup with its own table; `embedding[k]` is the parent index of
/// subgroup element `k`.
#[derive(Debug, Clone)]
pub struct Subgroup {
    pub group: FiniteGroup,
    pub embedding: Vec<usize>,
}

impl Subgroup {
    pub fn new(parent: &FiniteGroup, indices: &[usize]) -> Result<Self> {
        if !parent.is_subgroup(indices) {
            return Err(Error::NotASubgroup);
        }
        let embedding: Vec<usize> = indices.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
        let pos = |x: usize| embedding.binary_search(&x).unwrap();
        let table = embedding
            .iter()
            .map(|&a| embedding.iter().map(|&b| pos(parent.mul(a, b))).collect())
            .collect();
        let inverses = embedding.iter().map(|&a| pos(parent.inv(a))).collect();
        Ok(Subgroup { group: FiniteGroup { table, inverses }, embedding })
    }
}

/// Quotient by a normal subgroup; cosets are ordered by smallest member and
/// the identity coset comes first.
#[derive(Debug, Clone)]
pub struct Quotient {
    pub group: FiniteGroup,
    /// Parent index -> coset index.
    pub projection: Vec<usize>,
    /// Smallest parent index in each coset.
    pub representatives: Vec<usize>,
}

impl Quotient {
    pub fn new(parent: &FiniteGroup, normal: &[usize]) -> Result<Self> {
        if !parent.is_subgroup(normal) || !parent.is_normal(normal) {
            return Err(Error::NotASubgroup);
        }
        let n = parent.order();
        let mut projection = vec![usize::MAX; n];
        let mut representatives = vec![];
        for g in 0..n {
            if projection[g] != usize::MAX {
                continue;
            }
            let idx = representatives.len();
            representatives.push(g);
            for &h in normal {
                projection[parent.mul(g, h)] = idx;
            }
        }
        let table = representatives
            .iter()
            .map(|&a| representatives.iter().map(|&b| projection[parent.mul(a, b)]).collect())
            .collect();
        let inverses = representatives.iter().map(|&a| projection[parent.inv(a)]).collect();
        Ok(Quotient { group: FiniteGroup { table, inverses }, projection, representatives })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_and_product() {
        let g = FiniteGroup::cyclic(4);
        assert_eq!(g.element_order(1), 4);
        assert_eq!(g.element_order(2), 2);
        assert_eq!(g.generated(&[2]), vec![0, 2]);
        let v = FiniteGroup::product(&FiniteGroup::cyclic(2), &FiniteGroup::cyclic(2));
        assert!((1..4).all(|a| v.element_order(a) == 2));
        assert!(FiniteGroup::from_table(v.table().to_vec()).is_ok());
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(FiniteGroup::from_table(vec![vec![0, 1], vec![1, 1]]).is_err());
        assert!(FiniteGroup::from_table(vec![vec![1, 0], vec![0, 1]]).is_err());
    }

    #[test]
    fn subgroups_and_quotients() {
        let g = FiniteGroup::cyclic(6);
        assert!(matches!(Subgroup::new(&g, &[0, 1]), Err(Error::NotASubgroup)));
        let h = Subgroup::new(&g, &[0, 2, 4]).unwrap();
        assert_eq!(h.group.order(), 3);
        assert_eq!(h.group.element_order(1), 3);
        let q = Quotient::new(&g, &[0, 3]).unwrap();
        assert_eq!(q.group.order(), 3);
        assert_eq!(q.projection, vec![0, 1, 2, 0, 1, 2]);
        assert_eq!(q.representatives, vec![0, 1, 2]);
    }
}
