//! Finite *-semigroups with unit, given by explicit tables.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest atom count accepted by [`subset_semigroup`].
pub const MAX_ATOMS: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SemigroupJson", into = "SemigroupJson")]
pub struct FiniteStarSemigroup {
    mul: Vec<Vec<usize>>,
    star: Vec<usize>,
    unit: usize,
    labels: Option<Vec<String>>,
}

/// A violated *-semigroup axiom.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "axiom", rename_all = "snake_case")]
pub enum Violation {
    Associativity { a: usize, b: usize, c: usize },
    LeftUnit { a: usize },
    RightUnit { a: usize },
    Involution { a: usize },
    AntiMultiplicative { a: usize, b: usize },
    StarOfUnit,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Associativity { a, b, c } => {
                write!(f, "(a·b)·c ≠ a·(b·c) for (a, b, c) = ({a}, {b}, {c})")
            }
            Violation::LeftUnit { a } => write!(f, "1·a ≠ a for a = {a}"),
            Violation::RightUnit { a } => write!(f, "a·1 ≠ a for a = {a}"),
            Violation::Involution { a } => write!(f, "(a*)* ≠ a for a = {a}"),
            Violation::AntiMultiplicative { a, b } => {
                write!(f, "(a·b)* ≠ b*·a* for (a, b) = ({a}, {b})")
            }
            Violation::StarOfUnit => write!(f, "1* ≠ 1"),
        }
    }
}

impl FiniteStarSemigroup {
    /// Checks that the tables are well shaped; the axioms are checked by
    /// [`FiniteStarSemigroup::validate`].
    pub fn new(
        mul: Vec<Vec<usize>>,
        star: Vec<usize>,
        unit: usize,
        labels: Option<Vec<String>>,
    ) -> Result<Self> {
        let n = mul.len();
        if n == 0 {
            return Err(Error::Shape("a semigroup needs at least one element".into()));
        }
        if let Some(r) = mul.iter().position(|row| row.len() != n) {
            return Err(Error::Shape(format!(
                "multiplication row {r} has {} entries, expected {n}",
                mul[r].len()
            )));
        }
        if let Some(&bad) = mul.iter().flatten().find(|&&x| x >= n) {
            return Err(Error::IndexOutOfRange { index: bad, len: n });
        }
        if star.len() != n {
            return Err(Error::Shape(format!(
                "involution table has {} entries, expected {n}",
                star.len()
            )));
        }
        if let Some(&bad) = star.iter().find(|&&x| x >= n) {
            return Err(Error::IndexOutOfRange { index: bad, len: n });
        }
        if unit >= n {
            return Err(Error::IndexOutOfRange { index: unit, len: n });
        }
        if let Some(l) = &labels {
            if l.len() != n {
                return Err(Error::Shape(format!("{} labels for {n} elements", l.len())));
            }
        }
        Ok(Self {
            mul,
            star,
            unit,
            labels,
        })
    }

    pub fn len(&self) -> usize {
        self.mul.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mul.is_empty()
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a][b]
    }

    pub fn star(&self, a: usize) -> usize {
        self.star[a]
    }

    pub fn unit(&self) -> usize {
        self.unit
    }

    pub fn label(&self, a: usize) -> String {
        match &self.labels {
            Some(l) => l[a].clone(),
            None => a.to_string(),
        }
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn is_commutative(&self) -> bool {
        let n = self.len();
        (0..n).all(|a| (0..n).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Exhaustive check of associativity, the unit laws and the involution
    /// laws. Every violated triple or pair is listed.
    pub fn validate(&self) -> Vec<Violation> {
        let n = self.len();
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..n {
                let ab = self.mul(a, b);
                for c in 0..n {
                    if self.mul(ab, c) != self.mul(a, self.mul(b, c)) {
                        out.push(Violation::Associativity { a, b, c });
                    }
                }
            }
        }
        for a in 0..n {
            if self.mul(self.unit, a) != a {
                out.push(Violation::LeftUnit { a });
            }
            if self.mul(a, self.unit) != a {
                out.push(Violation::RightUnit { a });
            }
            if self.star(self.star(a)) != a {
                out.push(Violation::Involution { a });
            }
        }
        for a in 0..n {
            for b in 0..n {
                if self.star(self.mul(a, b)) != self.mul(self.star(b), self.star(a)) {
                    out.push(Violation::AntiMultiplicative { a, b });
                }
            }
        }
        if self.star(self.unit) != self.unit {
            out.push(Violation::StarOfUnit);
        }
        out
    }

    /// [`FiniteStarSemigroup::validate`] as a `Result`.
    pub fn ensure_valid(&self) -> Result<()> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidSemigroup(v))
        }
    }

    /// The one-element semigroup.
    pub fn trivial() -> Self {
        Self::new(vec![vec![0]], vec![0], 0, None).expect("well-formed")
    }

    /// `Z_n` written additively, with `a* = −a` (the group inverse).
    pub fn cyclic(n: usize) -> Self {
        assert!(n >= 1);
        let mul = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        let star = (0..n).map(|a| (n - a) % n).collect();
        Self::new(mul, star, 0, None).expect("well-formed")
    }

    /// Dihedral group of order `2k`: element `r^i s^j` has index `i + k·j`.
    /// The involution is the group inverse.
    pub fn dihedral(k: usize) -> Self {
        assert!(k >= 1);
        let n = 2 * k;
        let decode = |x: usize| (x % k, x / k);
        let encode = |i: usize, j: usize| i % k + k * j;
        // (r^i s^a)(r^j s^b) = r^{i + (−1)^a j} s^{a+b}
        let mul = (0..n)
            .map(|x| {
                (0..n)
                    .map(|y| {
                        let ((i, a), (j, b)) = (decode(x), decode(y));
                        let rot = if a == 0 { i + j } else { i + k - j };
                        encode(rot, (a + b) % 2)
                    })
                    .collect()
            })
            .collect();
        let star = (0..n)
            .map(|x| {
                let (i, a) = decode(x);
                if a == 0 {
                    encode(k - i, 0)
                } else {
                    x
                }
            })
            .collect();
        Self::new(mul, star, 0, None).expect("well-formed")
    }

    /// `Z_2 × Z_2` with the identity involution.
    pub fn klein_four() -> Self {
        let mul = (0..4).map(|a| (0..4).map(|b| a ^ b).collect()).collect();
        Self::new(mul, (0..4).collect(), 0, None).expect("well-formed")
    }
}

/// All subsets of `{0, …, m−1}` under intersection, with the full set as
/// unit and the identity as involution. Element `k` is the subset whose
/// bitmask is `k`; bit `i` marks atom `i`.
pub fn subset_semigroup(m: usize) -> Result<FiniteStarSemigroup> {
    if m > MAX_ATOMS {
        return Err(Error::TooManyAtoms {
            atoms: m,
            max: MAX_ATOMS,
        });
    }
    if m == 0 {
        return Err(Error::Shape("at least one atom is required".into()));
    }
    let n = 1usize << m;
    let mul = (0..n).map(|a| (0..n).map(|b| a & b).collect()).collect();
    let labels = (0..n).map(|k| format!("{k:0m$b}")).collect();
    FiniteStarSemigroup::new(mul, (0..n).collect(), n - 1, Some(labels))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SemigroupJson {
    n: usize,
    mul: Vec<Vec<usize>>,
    star: Vec<usize>,
    unit: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

impl TryFrom<SemigroupJson> for FiniteStarSemigroup {
    type Error = Error;

    fn try_from(raw: SemigroupJson) -> Result<Self> {
        if raw.mul.len() != raw.n {
            return Err(Error::Shape(format!(
                "n = {} but the multiplication table has {} rows",
                raw.n,
                raw.mul.len()
            )));
        }
        FiniteStarSemigroup::new(raw.mul, raw.star, raw.unit, raw.labels)
    }
}

impl From<FiniteStarSemigroup> for SemigroupJson {
    fn from(sg: FiniteStarSemigroup) -> Self {
        SemigroupJson {
            n: sg.len(),
            mul: sg.mul,
            star: sg.star,
            unit: sg.unit,
            labels: sg.labels,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_and_z2_are_valid() {
        assert!(FiniteStarSemigroup::trivial().validate().is_empty());
        let z2 = FiniteStarSemigroup::new(vec![vec![0, 1], vec![1, 0]], vec![0, 1], 0, None).unwrap();
        assert!(z2.validate().is_empty());
    }

    #[test]
    fn broken_associativity_is_named() {
        // {0 = unit, 1, 2} with 1·1 = 2, 1·2 = 1, 2·x = 2: (1·2)·1 = 2 but 1·(2·1) = 1.
        let mul = vec![vec![0, 1, 2], vec![1, 2, 1], vec![2, 2, 2]];
        let sg = FiniteStarSemigroup::new(mul, vec![0, 1, 2], 0, None).unwrap();
        let v = sg.validate();
        assert!(v.contains(&Violation::Associativity { a: 1, b: 2, c: 1 }), "{v:?}");
        for viol in &v {
            if let Violation::Associativity { a, b, c } = *viol {
                assert_ne!(sg.mul(sg.mul(a, b), c), sg.mul(a, sg.mul(b, c)));
            }
        }
        assert!(matches!(sg.ensure_valid(), Err(Error::InvalidSemigroup(_))));
    }

    #[test]
    fn bad_involution_is_named() {
        let z3 = FiniteStarSemigroup::cyclic(3);
        let broken = FiniteStarSemigroup::new(z3.mul.clone(), vec![1, 2, 0], 0, None).unwrap();
        let v = broken.validate();
        assert!(v.contains(&Violation::StarOfUnit));
        assert!(v.contains(&Violation::Involution { a: 0 }));
    }

    #[test]
    fn malformed_tables() {
        assert!(FiniteStarSemigroup::new(vec![], vec![], 0, None).is_err());
        assert!(FiniteStarSemigroup::new(vec![vec![0, 1]], vec![0], 0, None).is_err());
        assert!(FiniteStarSemigroup::new(vec![vec![3]], vec![0], 0, None).is_err());
        assert!(FiniteStarSemigroup::new(vec![vec![0]], vec![0], 1, None).is_err());
    }

    #[test]
    fn subset_examples() {
        let s1 = subset_semigroup(1).unwrap();
        assert_eq!(s1.len(), 2);
        for a in 0..2 {
            for b in 0..2 {
                assert_eq!(s1.mul(a, b), a.min(b));
            }
        }
        let s2 = subset_semigroup(2).unwrap();
        assert_eq!(s2.len(), 4);
        assert_eq!(s2.mul(0b01, 0b10), 0);
        assert_eq!(s2.unit(), 0b11);
        assert_eq!(s2.label(0b01), "01");
        assert!(matches!(subset_semigroup(13), Err(Error::TooManyAtoms { .. })));
    }

    #[test]
    fn subset_semigroups_are_commutative_idempotent() {
        for m in 1..=5 {
            let sg = subset_semigroup(m).unwrap();
            assert!(sg.validate().is_empty());
            assert!(sg.is_commutative());
            for a in 0..sg.len() {
                assert_eq!(sg.mul(a, a), a);
                assert_eq!(sg.star(a), a);
            }
        }
    }

    #[test]
    fn groups_are_valid() {
        for n in 1..=8 {
            assert!(FiniteStarSemigroup::cyclic(n).validate().is_empty(), "Z_{n}");
        }
        for k in 1..=4 {
            let d = FiniteStarSemigroup::dihedral(k);
            assert!(d.validate().is_empty(), "D_{k}");
            for x in 0..d.len() {
                assert_eq!(d.mul(x, d.star(x)), d.unit());
            }
        }
        assert!(!FiniteStarSemigroup::dihedral(3).is_commutative());
        assert!(FiniteStarSemigroup::klein_four().validate().is_empty());
    }

    #[test]
    fn json_shape() {
        let sg = subset_semigroup(1).unwrap();
        let text = serde_json::to_string(&sg).unwrap();
        assert_eq!(text, r#"{"n":2,"mul":[[0,0],[0,1]],"star":[0,1],"unit":1,"labels":["0","1"]}"#);
        let back: FiniteStarSemigroup = serde_json::from_str(&text).unwrap();
        assert_eq!(back, sg);
        assert!(serde_json::from_str::<FiniteStarSemigroup>(r#"{"n":2,"mul":[[0]],"star":[0],"unit":0}"#).is_err());
    }
}
