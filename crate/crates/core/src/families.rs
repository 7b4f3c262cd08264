//! The two group families: constant-rank spinal groups `K_r` and the
//! growing-rank groups `G_k`, with their directed generators' section rules.

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::arith::f2::{all_ones_value, F2Vector, Ix, Polarity};
use crate::arith::tower::{f_value, FValue, Rank, TowerInt};
use crate::engine::word::{Letter, Word};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "family")]
pub enum GroupSpec {
    /// `K_r = ⟨A_r ∪ {b_r}⟩` on the regular tree of type `(A_r)`.
    #[serde(rename = "Kr")]
    Kr { r: u64 },
    /// `G_base = ⟨A_{f_3(base)} ∪ {d_base}⟩` with `f(0) = f0`.
    #[serde(rename = "G")]
    Growing {
        f0: u64,
        #[serde(default)]
        base: u64,
    },
}

/// Shape of the directed generator's first-layer sections at a level.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RuleKind {
    /// `(1: D; ē_i: e_i; ∗: id)`
    Bar,
    /// `(1: D; a_i: e_i)`, every vertex carries a non-trivial section.
    Index,
}

impl GroupSpec {
    pub fn kr(r: u64) -> Result<GroupSpec> {
        if r == 0 {
            return Err(Error::Invalid("K_r needs r ≥ 1".into()));
        }
        Ok(GroupSpec::Kr { r })
    }

    pub fn growing(f0: u64, base: u64) -> Result<GroupSpec> {
        if f0 < 3 {
            return Err(Error::Invalid("growing family needs f(0) ≥ 3".into()));
        }
        Ok(GroupSpec::Growing { f0, base })
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            GroupSpec::Kr { r } => GroupSpec::kr(r).map(|_| ()),
            GroupSpec::Growing { f0, base } => GroupSpec::growing(f0, base).map(|_| ()),
        }
    }

    /// Rank of the alphabet group at `level`.
    pub fn rank(&self, level: u64) -> Rank {
        match *self {
            GroupSpec::Kr { r } => Rank::Small(r),
            GroupSpec::Growing { f0, base } => {
                let k = (base + level) / 3;
                let mut cur = f0;
                for _ in 0..k {
                    if cur >= 64 {
                        return match f_value(f0, k) {
                            FValue::Exact(v) => Rank::from_tower(TowerInt::Exact(v)),
                            FValue::Bounded { lower, .. } => Rank::Huge(lower),
                        };
                    }
                    cur = (1u64 << cur) - 1;
                }
                Rank::Small(cur)
            }
        }
    }

    pub fn rule_kind(&self, level: u64) -> RuleKind {
        match *self {
            GroupSpec::Kr { .. } => RuleKind::Bar,
            GroupSpec::Growing { base, .. } => {
                if (base + level) % 3 == 2 {
                    RuleKind::Index
                } else {
                    RuleKind::Bar
                }
            }
        }
    }

    /// Levels that carry identical groups. `K_r` is self-similar so every
    /// level is the same; growing levels are all distinct.
    pub fn level_class(&self, level: u64) -> u64 {
        match self {
            GroupSpec::Kr { .. } => 0,
            GroupSpec::Growing { .. } => level,
        }
    }

    pub fn name(&self) -> String {
        match self {
            GroupSpec::Kr { r } => format!("K_{r}"),
            GroupSpec::Growing { f0, base } => format!("G(f0={f0},base={base})"),
        }
    }
}

/// Accepts the JSON form, or the shorthands `K5`, `Kr5`, `G127` and `G3+1`
/// (`f0` then `base`).
impl std::str::FromStr for GroupSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("bad group spec {s:?}"));
        let spec = if s.starts_with('{') {
            serde_json::from_str::<GroupSpec>(s)?
        } else if let Some(r) = s.strip_prefix("Kr").or_else(|| s.strip_prefix('K')) {
            GroupSpec::Kr { r: r.parse().map_err(|_| bad())? }
        } else if let Some(rest) = s.strip_prefix('G') {
            let (f0, base) = rest.split_once('+').unwrap_or((rest, "0"));
            GroupSpec::Growing {
                f0: f0.parse().map_err(|_| bad())?,
                base: base.parse().map_err(|_| bad())?,
            }
        } else {
            return Err(bad());
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// One first-layer section of the directed generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SectionLetter {
    Identity,
    /// The directed generator of the next level.
    Directed,
    /// A rooted letter, normalized at the next level's rank.
    Rooted(F2Vector),
}

impl SectionLetter {
    pub fn to_letter(self) -> Option<Letter> {
        match self {
            SectionLetter::Identity => None,
            SectionLetter::Directed => Some(Letter::Directed),
            SectionLetter::Rooted(v) => Some(Letter::Rooted(v)),
        }
    }
}

/// Index `i` with `x = ē_i`, if any. `x` must be normalized at `rank`.
pub(crate) fn bar_index(x: &F2Vector, rank: &Rank) -> Option<Ix> {
    if x.polarity() == Polarity::Cosparse && x.support().len() == 1 {
        // at exact ranks ≥ 3 a normalized ē_i is always stored this way
        if rank.as_u64().is_none_or(|r| r >= 3) {
            return Some(x.support()[0].clone());
        }
    }
    if matches!(rank.as_u64(), Some(r) if r < 3) {
        let t = x.translate_bar().normalized(rank);
        if t.polarity() == Polarity::Sparse && t.support().len() == 1 {
            return Some(t.support()[0].clone());
        }
    }
    None
}

/// Section of the level's directed generator at first-layer vertex `x`.
///
/// `x` is validated against the level's rank.
pub fn directed_section_rule(
    spec: &GroupSpec,
    level: u64,
    x: &F2Vector,
    bit_budget: u64,
) -> Result<SectionLetter> {
    let rank = spec.rank(level);
    x.validate(&rank)?;
    let x = x.clone().normalized(&rank);
    section_rule(spec, level, &rank, &spec.rank(level + 1), &x, bit_budget)
}

/// As [`directed_section_rule`] for an already-normalized vertex.
pub(crate) fn section_rule(
    spec: &GroupSpec,
    level: u64,
    rank: &Rank,
    next_rank: &Rank,
    x: &F2Vector,
    bit_budget: u64,
) -> Result<SectionLetter> {
    if x.is_zero() {
        return Ok(SectionLetter::Directed);
    }
    match spec.rule_kind(level) {
        RuleKind::Bar => {
            if let Some(i) = bar_index(x, rank) {
                return Ok(SectionLetter::Rooted(
                    F2Vector::basis(i).normalized(next_rank),
                ));
            }
            // At rank 1 the vertex ē_0 coincides with the root letter; the
            // remaining vertex e_0 carries e_0, giving the infinite dihedral group.
            if rank.as_u64() == Some(1) {
                return Ok(SectionLetter::Rooted(
                    F2Vector::basis(0).normalized(next_rank),
                ));
            }
            Ok(SectionLetter::Identity)
        }
        RuleKind::Index => {
            let i = index_rule_target(x, rank, bit_budget)?;
            Ok(SectionLetter::Rooted(
                F2Vector::basis(i).normalized(next_rank),
            ))
        }
    }
}

/// Basis index `a_i ↦ e_{i mod (2^r - 1)}` used by the index rule.
fn index_rule_target(x: &F2Vector, rank: &Rank, bit_budget: u64) -> Result<Ix> {
    if x.polarity() == Polarity::Cosparse && x.support().is_empty() {
        return Ok(Ix::Small(0));
    }
    if x.polarity() == Polarity::Sparse {
        if let Some(m) = x.max_index().and_then(Ix::as_u64) {
            if m < 63 {
                let v = x.support().iter().fold(0u64, |v, ix| v | 1 << ix.as_u64().unwrap());
                return Ok(Ix::Small(v));
            }
        }
    }
    Ok(Ix::from_big(enumeration_index(x, rank, bit_budget)?))
}

/// Position of `x` in the fixed enumeration `a_0 = 1, a_1, …` of `A_rank`:
/// the binary number with bit `i` set iff `e_i` occurs in `x`.
pub fn enumeration_index(x: &F2Vector, rank: &Rank, bit_budget: u64) -> Result<BigUint> {
    match x.polarity() {
        Polarity::Sparse => x.sparse_value(bit_budget),
        Polarity::Cosparse => {
            let full = all_ones_value(rank, bit_budget)?;
            let clear = x.sparse_value(bit_budget)?;
            Ok(full - clear)
        }
    }
}

/// Inverse of [`enumeration_index`], normalized at `rank`.
pub fn enumeration_vector(i: &BigUint, rank: &Rank) -> Result<F2Vector> {
    if let Some(r) = rank.exact() {
        if i.bits() > r.to_u64().unwrap_or(u64::MAX) {
            return Err(Error::RankMismatch {
                index: i.to_string(),
                rank: rank.to_string(),
            });
        }
    }
    let bits = (0..i.bits()).filter(|b| i.bit(*b));
    Ok(F2Vector::sparse(bits).normalized(rank))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GenKind {
    /// Basis letters plus the directed generator (`𝔼_r`, `E_k`).
    E,
    /// All rooted letters plus all rooted conjugates of the directed generator (`𝕊_r`, `S_k`).
    S,
}

impl std::str::FromStr for GenKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "E" | "e" => Ok(GenKind::E),
            "S" | "s" => Ok(GenKind::S),
            _ => Err(Error::Parse(format!("unknown generating set {s:?}"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct GeneratingSet {
    pub kind: GenKind,
    pub spec: GroupSpec,
    pub level: u64,
    pub members: Vec<Word>,
}

impl GeneratingSet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Materializes a generating set. The `S` kind lists all `2^rank` rooted
/// elements (identity included) and then their conjugates of the directed
/// generator, both in enumeration order.
pub fn make_generators(
    spec: &GroupSpec,
    level: u64,
    kind: GenKind,
    limit: usize,
) -> Result<GeneratingSet> {
    let rank = spec.rank(level);
    let r = rank
        .as_u64()
        .ok_or_else(|| Error::budget("generating set", limit))?;
    let members = match kind {
        GenKind::E => {
            if r as usize + 1 > limit {
                return Err(Error::budget("generating set", limit));
            }
            let mut m: Vec<Word> = (0..r)
                .map(|i| Word::rooted(*spec, level, F2Vector::basis(i)))
                .collect();
            m.push(Word::directed(*spec, level));
            m
        }
        GenKind::S => {
            let size = rank
                .layer_size()
                .filter(|n| (*n as u128) * 2 <= limit as u128)
                .ok_or_else(|| Error::budget("generating set", limit))?;
            let verts: Vec<F2Vector> = (0..size)
                .map(|i| F2Vector::from_bits(i, r))
                .collect();
            let mut m: Vec<Word> = verts
                .iter()
                .map(|a| Word::rooted(*spec, level, a.clone()))
                .collect();
            m.extend(verts.iter().map(|a| Word::directed_conjugate(*spec, level, a.clone())));
            m
        }
    };
    Ok(GeneratingSet {
        kind,
        spec: *spec,
        level,
        members,
    })
}

/// Basis letter `e_t` of the next level realized as the section of the
/// directed generator at level `level` (an index-rule level) at `a`.
pub fn underline_generator(spec: &GroupSpec, level: u64, a: &F2Vector, bit_budget: u64) -> Result<F2Vector> {
    match directed_section_rule(spec, level, a, bit_budget)? {
        SectionLetter::Rooted(v) => Ok(v),
        other => Err(Error::Invalid(format!(
            "section at {a} is {other:?}, not a rooted letter"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::DEFAULT_BIT_BUDGET as B;

    #[test]
    fn spec_json_forms() {
        let k: GroupSpec = serde_json::from_str(r#"{"family":"Kr","r":5}"#).unwrap();
        assert_eq!(k, GroupSpec::Kr { r: 5 });
        let g: GroupSpec = serde_json::from_str(r#"{"family":"G","f0":3,"base":0}"#).unwrap();
        assert_eq!(g, GroupSpec::Growing { f0: 3, base: 0 });
        assert_eq!(
            serde_json::to_string(&g).unwrap(),
            r#"{"family":"G","f0":3,"base":0}"#
        );
    }

    #[test]
    fn growing_ranks() {
        let g = GroupSpec::Growing { f0: 3, base: 0 };
        let ranks: Vec<_> = (0..9).map(|l| g.rank(l).as_u64().unwrap()).collect();
        assert_eq!(ranks, [3, 3, 3, 7, 7, 7, 127, 127, 127]);
        assert!(matches!(g.rank(9), Rank::Big(_)));
        assert!(matches!(g.rank(12), Rank::Huge(_)));
        let g6 = GroupSpec::Growing { f0: 127, base: 0 };
        assert_eq!(g6.rank(2), Rank::Small(127));
        assert_eq!(g6.rank(3), g.rank(9));
    }

    #[test]
    fn kr_rule_examples() {
        let k3 = GroupSpec::Kr { r: 3 };
        let r = |x: F2Vector| directed_section_rule(&k3, 0, &x, B).unwrap();
        assert_eq!(r(F2Vector::cosparse([0])), SectionLetter::Rooted(F2Vector::basis(0)));
        assert_eq!(r(F2Vector::zero()), SectionLetter::Directed);
        assert_eq!(r(F2Vector::basis(0)), SectionLetter::Identity);
        assert_eq!(r(F2Vector::all_ones()), SectionLetter::Identity);
        assert!(directed_section_rule(&k3, 0, &F2Vector::basis(3), B).is_err());
    }

    #[test]
    fn index_rule_example() {
        let g = GroupSpec::Growing { f0: 3, base: 0 };
        let got = directed_section_rule(&g, 2, &F2Vector::sparse([0, 1]), B).unwrap();
        assert_eq!(got, SectionLetter::Rooted(F2Vector::basis(3)));
        // dense check at rank 3: every non-zero vertex maps to a distinct basis letter of rank 7
        let mut seen = std::collections::BTreeSet::new();
        for bits in 1..8u64 {
            let x = F2Vector::from_bits(bits, 3);
            let SectionLetter::Rooted(v) = directed_section_rule(&g, 2, &x, B).unwrap() else {
                panic!()
            };
            assert_eq!(v.weight(&Rank::Small(7)), Some(1));
            seen.insert(v);
        }
        assert_eq!(seen.len(), 7);
    }

    #[test]
    fn enumeration_examples() {
        let r3 = Rank::Small(3);
        let idx = |v: F2Vector| enumeration_index(&v, &r3, B).unwrap();
        assert_eq!(idx(F2Vector::zero()), BigUint::from(0u32));
        assert_eq!(idx(F2Vector::basis(0)), BigUint::from(1u32));
        assert_eq!(idx(F2Vector::basis(1)), BigUint::from(2u32));
        assert_eq!(idx(F2Vector::sparse([0, 1])), BigUint::from(3u32));
        assert_eq!(idx(F2Vector::all_ones()), BigUint::from(7u32));
        for i in 0..8u32 {
            let v = enumeration_vector(&BigUint::from(i), &r3).unwrap();
            assert_eq!(idx(v), BigUint::from(i));
        }
        let huge = Rank::huge_from_bits(200);
        assert!(enumeration_index(&F2Vector::all_ones(), &huge, B).is_err());
    }

    #[test]
    fn generator_counts() {
        let k3 = GroupSpec::Kr { r: 3 };
        assert_eq!(make_generators(&k3, 0, GenKind::E, 1 << 20).unwrap().len(), 4);
        assert_eq!(make_generators(&k3, 0, GenKind::S, 1 << 20).unwrap().len(), 16);
        let g = GroupSpec::Growing { f0: 3, base: 0 };
        assert_eq!(make_generators(&g, 0, GenKind::S, 1 << 20).unwrap().len(), 16);
        assert!(make_generators(&g, 6, GenKind::S, 1 << 20).is_err());
    }

    #[test]
    fn spec_shorthands() {
        assert_eq!("K5".parse::<GroupSpec>().unwrap(), GroupSpec::Kr { r: 5 });
        assert_eq!("Kr2".parse::<GroupSpec>().unwrap(), GroupSpec::Kr { r: 2 });
        assert_eq!("G127".parse::<GroupSpec>().unwrap(), GroupSpec::Growing { f0: 127, base: 0 });
        assert_eq!("G3+2".parse::<GroupSpec>().unwrap(), GroupSpec::Growing { f0: 3, base: 2 });
        assert_eq!(r#"{"family":"Kr","r":3}"#.parse::<GroupSpec>().unwrap(), GroupSpec::Kr { r: 3 });
        for bad in ["", "K", "Kx", "G3+", "H2", "K0"] {
            assert!(bad.parse::<GroupSpec>().is_err(), "{bad}");
        }
    }
}
