//! Finite groups presented by multiplication tables, plus the bundled
//! examples used throughout the test suite.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GroupError {
    #[error("multiplication table is not square")]
    NotSquare,
    #[error("table is not associative at ({0},{1},{2})")]
    NotAssociative(usize, usize, usize),
    #[error("no identity element")]
    NoIdentity,
    #[error("element {0} has no inverse")]
    NoInverse(usize),
    #[error("unknown group name `{0}`")]
    UnknownName(String),
    #[error("group order {0} exceeds the configured bound {1}")]
    TooLarge(usize, usize),
}

/// A finite group as a multiplication table: `mul[g][h] = g*h`.
#[derive(Debug, Clone)]
pub struct GroupTable {
    pub name: String,
    pub mul: Vec<Vec<usize>>,
    pub identity: usize,
}

pub const DEFAULT_ORDER_BOUND: usize = 24;

impl GroupTable {
    pub fn order(&self) -> usize {
        self.mul.len()
    }

    pub fn new(name: &str, mul: Vec<Vec<usize>>) -> Result<Self, GroupError> {
        let n = mul.len();
        if mul.iter().any(|r| r.len() != n) {
            return Err(GroupError::NotSquare);
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|g| mul[e][g] == g && mul[g][e] == g))
            .ok_or(GroupError::NoIdentity)?;
        let g = GroupTable { name: name.to_string(), mul, identity };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<(), GroupError> {
        let n = self.order();
        if n > DEFAULT_ORDER_BOUND {
            return Err(GroupError::TooLarge(n, DEFAULT_ORDER_BOUND));
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if self.mul[self.mul[a][b]][c] != self.mul[a][self.mul[b][c]] {
                        return Err(GroupError::NotAssociative(a, b, c));
                    }
                }
            }
        }
        for g in 0..n {
            if !(0..n).any(|h| self.mul[g][h] == self.identity) {
                return Err(GroupError::NoInverse(g));
            }
        }
        Ok(())
    }

    pub fn inverse(&self, g: usize) -> usize {
        (0..self.order()).find(|&h| self.mul[g][h] == self.identity).unwrap()
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order();
        (0..n).all(|a| (0..n).all(|b| self.mul[a][b] == self.mul[b][a]))
    }

    pub fn cyclic(n: usize) -> Self {
        let mul = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        GroupTable { name: format!("z{n}"), mul, identity: 0 }
    }

    pub fn product(a: &GroupTable, b: &GroupTable) -> Self {
        let (na, nb) = (a.order(), b.order());
        let idx = |x: usize, y: usize| x * nb + y;
        let mut mul = vec![vec![0; na * nb]; na * nb];
        for x1 in 0..na {
            for y1 in 0..nb {
                for x2 in 0..na {
                    for y2 in 0..nb {
                        mul[idx(x1, y1)][idx(x2, y2)] = idx(a.mul[x1][x2], b.mul[y1][y2]);
                    }
                }
            }
        }
        GroupTable {
            name: format!("{}x{}", a.name, b.name),
            mul,
            identity: idx(a.identity, b.identity),
        }
    }

    /// Symmetric group on three letters; elements listed as permutations of
    /// `[0,1,2]` in a fixed order: e, (01), (02), (12), (012), (021).
    pub fn s3() -> Self {
        let perms: [[usize; 3]; 6] =
            [[0, 1, 2], [1, 0, 2], [2, 1, 0], [0, 2, 1], [1, 2, 0], [2, 0, 1]];
        let compose = |p: &[usize; 3], q: &[usize; 3]| [p[q[0]], p[q[1]], p[q[2]]];
        let find = |r: [usize; 3]| perms.iter().position(|p| *p == r).unwrap();
        let mul = perms
            .iter()
            .map(|p| perms.iter().map(|q| find(compose(p, q))).collect())
            .collect();
        GroupTable { name: "s3".into(), mul, identity: 0 }
    }

    /// Dihedral group of order 8, elements `r^a s^b` with `a < 4`, `b < 2`,
    /// indexed `a + 4b`.
    pub fn d4() -> Self {
        let idx = |a: usize, b: usize| a + 4 * b;
        let mut mul = vec![vec![0; 8]; 8];
        for a1 in 0..4 {
            for b1 in 0..2 {
                for a2 in 0..4 {
                    for b2 in 0..2 {
                        // (r^a1 s^b1)(r^a2 s^b2): s r^a = r^{-a} s.
                        let a = if b1 == 1 { (a1 + 4 - a2 % 4) % 4 } else { (a1 + a2) % 4 };
                        let b = (b1 + b2) % 2;
                        mul[idx(a1, b1)][idx(a2, b2)] = idx(a, b);
                    }
                }
            }
        }
        GroupTable { name: "d4".into(), mul, identity: 0 }
    }

    /// Quaternion group, elements 1, -1, i, -i, j, -j, k, -k in that order.
    pub fn q8() -> Self {
        // Encode as pairs (sign, axis) with axis in {1, i, j, k}.
        let units = ["1", "i", "j", "k"];
        let mult = |x: usize, y: usize| -> (i32, usize) {
            match (units[x], units[y]) {
                ("1", _) => (1, y),
                (_, "1") => (1, x),
                ("i", "i") | ("j", "j") | ("k", "k") => (-1, 0),
                ("i", "j") => (1, 3),
                ("j", "i") => (-1, 3),
                ("j", "k") => (1, 1),
                ("k", "j") => (-1, 1),
                ("k", "i") => (1, 2),
                ("i", "k") => (-1, 2),
                _ => unreachable!(),
            }
        };
        let idx = |sign: i32, axis: usize| axis * 2 + if sign < 0 { 1 } else { 0 };
        let mut mul = vec![vec![0; 8]; 8];
        for ax in 0..4 {
            for sx in [1i32, -1] {
                for ay in 0..4 {
                    for sy in [1i32, -1] {
                        let (s, a) = mult(ax, ay);
                        mul[idx(sx, ax)][idx(sy, ay)] = idx(sx * sy * s, a);
                    }
                }
            }
        }
        GroupTable { name: "q8".into(), mul, identity: 0 }
    }

    pub fn by_name(name: &str) -> Result<Self, GroupError> {
        match name {
            "z2" => Ok(Self::cyclic(2)),
            "z3" => Ok(Self::cyclic(3)),
            "z4" => Ok(Self::cyclic(4)),
            "v4" | "z2xz2" => Ok(Self::product(&Self::cyclic(2), &Self::cyclic(2))),
            "s3" => Ok(Self::s3()),
            "d4" => Ok(Self::d4()),
            "q8" => Ok(Self::q8()),
            other => Err(GroupError::UnknownName(other.to_string())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_groups_are_groups() {
        for name in ["z2", "z3", "z4", "v4", "s3", "d4", "q8"] {
            let g = GroupTable::by_name(name).unwrap();
            g.validate().unwrap();
        }
    }

    #[test]
    fn s3_not_abelian_q8_has_order_8() {
        assert!(!GroupTable::s3().is_abelian());
        assert_eq!(GroupTable::q8().order(), 8);
        assert!(!GroupTable::q8().is_abelian());
        assert!(GroupTable::by_name("v4").unwrap().is_abelian());
    }

    #[test]
    fn inverses() {
        let s3 = GroupTable::s3();
        for g in 0..6 {
            let h = s3.inverse(g);
            assert_eq!(s3.mul[g][h], s3.identity);
            assert_eq!(s3.mul[h][g], s3.identity);
        }
    }
}
