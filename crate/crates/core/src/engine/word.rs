//! Words in the rooted letters and the level's directed generator.

use std::fmt;
use std::hash::{Hash, Hasher};

use crate::arith::{F2Vector, Rank};
use crate::error::{Error, Result};
use crate::families::GroupSpec;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    Rooted(F2Vector),
    Directed,
}

/// A group element at a fixed level, kept in free normal form: no two
/// adjacent rooted letters, no identity rooted letters, no `DD`.
#[derive(Clone, Debug)]
pub struct Word {
    spec: GroupSpec,
    level: u64,
    rank: Rank,
    letters: Vec<Letter>,
}

impl PartialEq for Word {
    fn eq(&self, other: &Self) -> bool {
        self.level == other.level && self.spec == other.spec && self.letters == other.letters
    }
}

impl Eq for Word {}

impl Hash for Word {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.spec.hash(state);
        self.level.hash(state);
        self.letters.hash(state);
    }
}

/// Syllable decomposition `D^{p_1} ⋯ D^{p_k} · total` of a word, where
/// `D^p = p D p` and `p_j` is the sum of the rooted letters before the
/// `j`-th directed letter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Syllables {
    pub prefixes: Vec<F2Vector>,
    pub total: F2Vector,
}

impl Word {
    pub fn identity(spec: GroupSpec, level: u64) -> Word {
        Word {
            rank: spec.rank(level),
            spec,
            level,
            letters: Vec::new(),
        }
    }

    pub fn rooted(spec: GroupSpec, level: u64, v: F2Vector) -> Word {
        let mut w = Word::identity(spec, level);
        w.push(Letter::Rooted(v));
        w
    }

    pub fn directed(spec: GroupSpec, level: u64) -> Word {
        let mut w = Word::identity(spec, level);
        w.letters.push(Letter::Directed);
        w
    }

    /// `D^a = a D a`.
    pub fn directed_conjugate(spec: GroupSpec, level: u64, a: F2Vector) -> Word {
        let mut w = Word::identity(spec, level);
        w.push(Letter::Rooted(a.clone()));
        w.push(Letter::Directed);
        w.push(Letter::Rooted(a));
        w
    }

    /// Validates every rooted letter against the level's rank and reduces.
    pub fn from_letters(spec: GroupSpec, level: u64, letters: Vec<Letter>) -> Result<Word> {
        let mut w = Word::identity(spec, level);
        for l in letters {
            if let Letter::Rooted(v) = &l {
                v.validate(&w.rank)?;
            }
            w.push(l);
        }
        Ok(w)
    }

    /// Rebuilds `D^{p_1} ⋯ D^{p_k} · total`.
    pub fn from_syllables(spec: GroupSpec, level: u64, syl: &Syllables) -> Word {
        let mut w = Word::identity(spec, level);
        let mut cur = F2Vector::zero();
        for p in &syl.prefixes {
            w.push(Letter::Rooted(cur.add(p)));
            w.push(Letter::Directed);
            cur = p.clone();
        }
        w.push(Letter::Rooted(cur.add(&syl.total)));
        w
    }

    /// Appends a letter, reducing against the current last letter.
    pub(crate) fn push(&mut self, l: Letter) {
        match l {
            Letter::Directed => {
                if matches!(self.letters.last(), Some(Letter::Directed)) {
                    self.letters.pop();
                } else {
                    self.letters.push(Letter::Directed);
                }
            }
            Letter::Rooted(v) => {
                let v = v.normalized(&self.rank);
                if v.is_zero() {
                    return;
                }
                if let Some(Letter::Rooted(u)) = self.letters.last_mut() {
                    let s = u.add(&v).normalized(&self.rank);
                    if s.is_zero() {
                        self.letters.pop();
                    } else {
                        *u = s;
                    }
                } else {
                    self.letters.push(Letter::Rooted(v));
                }
            }
        }
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn rank(&self) -> &Rank {
        &self.rank
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.letters
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn directed_count(&self) -> usize {
        self.letters.iter().filter(|l| matches!(l, Letter::Directed)).count()
    }

    /// Sum of the rooted letters: the word acts on the first layer as `x ↦ x + s`.
    pub fn translation(&self) -> F2Vector {
        let mut s = F2Vector::zero();
        for l in &self.letters {
            if let Letter::Rooted(v) = l {
                s.add_assign(v);
            }
        }
        s.normalized(&self.rank)
    }

    pub fn same_group(&self, other: &Word) -> Result<()> {
        if self.spec != other.spec {
            return Err(Error::Invalid(format!(
                "words over {} and {}",
                self.spec.name(),
                other.spec.name()
            )));
        }
        if self.level != other.level {
            return Err(Error::LevelMismatch {
                expected: self.level,
                got: other.level,
            });
        }
        Ok(())
    }

    pub fn try_mul(&self, other: &Word) -> Result<Word> {
        self.same_group(other)?;
        Ok(self.mul(other))
    }

    /// Product `self · other`. Panics if the words live in different groups.
    pub fn mul(&self, other: &Word) -> Word {
        assert!(
            self.spec == other.spec && self.level == other.level,
            "product of words from different groups"
        );
        let mut w = self.clone();
        w.letters.reserve(other.letters.len());
        for l in &other.letters {
            w.push(l.clone());
        }
        w
    }

    /// Every letter is an involution, so the inverse is the reversal.
    pub fn inverse(&self) -> Word {
        let mut w = self.clone();
        w.letters.reverse();
        w
    }

    pub fn square(&self) -> Word {
        self.mul(self)
    }

    /// `self^n` by repeated squaring; fails once an intermediate word would
    /// exceed `max_letters`.
    pub fn pow(&self, n: u64, max_letters: usize) -> Result<Word> {
        let mut acc = Word::identity(self.spec, self.level);
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
                if acc.len() > max_letters {
                    return Err(Error::budget("word letters", max_letters));
                }
            }
            n >>= 1;
            if n > 0 {
                base = base.square();
                if base.len() > max_letters {
                    return Err(Error::budget("word letters", max_letters));
                }
            }
        }
        Ok(acc)
    }

    /// `self^{2^e}`.
    pub fn pow2(&self, e: u32, max_letters: usize) -> Result<Word> {
        let mut w = self.clone();
        for _ in 0..e {
            if w.is_identity() {
                break;
            }
            w = w.square();
            if w.len() > max_letters {
                return Err(Error::budget("word letters", max_letters));
            }
        }
        Ok(w)
    }

    /// `h⁻¹ · self · h`.
    pub fn conj(&self, h: &Word) -> Word {
        h.inverse().mul(self).mul(h)
    }

    /// `[self, other] = self⁻¹ other⁻¹ self other`.
    pub fn commutator(&self, other: &Word) -> Word {
        self.inverse().mul(&other.inverse()).mul(self).mul(other)
    }

    /// Left-normed commutator `[w_0, w_1, …, w_n]`.
    pub fn commutator_chain(ws: &[Word]) -> Word {
        let mut it = ws.iter();
        let mut acc = it.next().expect("empty commutator").clone();
        for w in it {
            acc = acc.commutator(w);
        }
        acc
    }

    pub fn syllables(&self) -> Syllables {
        let mut prefixes = Vec::new();
        let mut cur = F2Vector::zero();
        for l in &self.letters {
            match l {
                Letter::Rooted(v) => cur = cur.add(v).normalized(&self.rank),
                Letter::Directed => prefixes.push(cur.clone()),
            }
        }
        Syllables {
            prefixes,
            total: cur,
        }
    }

    /// Prefix sums in front of each directed letter.
    pub(crate) fn prefixes(&self) -> Vec<F2Vector> {
        self.syllables().prefixes
    }

    /// Length of the syllable form: one per directed letter plus one for a
    /// non-trivial trailing rooted part. An upper bound on the `S`-length.
    pub fn syllable_length_upper(&self) -> usize {
        let s = self.syllables();
        s.prefixes.len() + usize::from(!s.total.is_zero())
    }

    /// Replaces the level, keeping the letters; used to compare words of
    /// self-similar groups living at different depths.
    pub fn relevel(&self, level: u64) -> Result<Word> {
        let rank = self.spec.rank(level);
        for l in &self.letters {
            if let Letter::Rooted(v) = l {
                v.validate(&rank)?;
            }
        }
        Word::from_letters(self.spec, level, self.letters.clone())
    }
}

impl Word {
    /// Parses the [`fmt::Display`] form: `1`, or letters `D`, `s[..]`, `c[..]`
    /// separated by spaces.
    pub fn parse_text(spec: GroupSpec, level: u64, s: &str) -> Result<Word> {
        let s = s.trim();
        if s == "1" {
            return Ok(Word::identity(spec, level));
        }
        let letters = s
            .split_whitespace()
            .map(|t| match t {
                "D" => Ok(Letter::Directed),
                _ => t.parse().map(Letter::Rooted),
            })
            .collect::<Result<Vec<_>>>()?;
        Word::from_letters(spec, level, letters)
    }
}

impl VertexPath {
    /// Parses `[x_1, x_2, …]` with vectors in text form; `[]` is the root.
    pub fn parse_text(spec: GroupSpec, start_level: u64, s: &str) -> Result<VertexPath> {
        let inner = s
            .trim()
            .strip_prefix('[')
            .and_then(|t| t.strip_suffix(']'))
            .ok_or_else(|| Error::Parse(format!("bad vertex {s:?}")))?;
        let mut letters = Vec::new();
        let mut rest = inner.trim();
        while !rest.is_empty() {
            let end = rest
                .find(']')
                .ok_or_else(|| Error::Parse(format!("bad vertex {s:?}")))?;
            letters.push(rest[..=end].parse()?);
            rest = rest[end + 1..].trim_start().trim_start_matches(',').trim_start();
        }
        VertexPath::new(spec, start_level, letters)
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Letter::Rooted(v) => write!(f, "{v}"),
            Letter::Directed => f.write_str("D"),
        }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("1");
        }
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// A vertex below the root of the subtree at `start_level`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexPath {
    pub spec: GroupSpec,
    pub start_level: u64,
    pub letters: Vec<F2Vector>,
}

impl VertexPath {
    pub fn root(spec: GroupSpec, start_level: u64) -> VertexPath {
        VertexPath {
            spec,
            start_level,
            letters: Vec::new(),
        }
    }

    /// Validates and normalizes each component at its level's rank.
    pub fn new(spec: GroupSpec, start_level: u64, letters: Vec<F2Vector>) -> Result<VertexPath> {
        let mut out = Vec::with_capacity(letters.len());
        for (i, v) in letters.into_iter().enumerate() {
            let rank = spec.rank(start_level + i as u64);
            v.validate(&rank)?;
            out.push(v.normalized(&rank));
        }
        Ok(VertexPath {
            spec,
            start_level,
            letters: out,
        })
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }
}

impl fmt::Display for VertexPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, v) in self.letters.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k3() -> GroupSpec {
        GroupSpec::Kr { r: 3 }
    }

    fn e(i: u64) -> Letter {
        Letter::Rooted(F2Vector::basis(i))
    }

    #[test]
    fn normal_form_examples() {
        let w = Word::from_letters(k3(), 0, vec![e(0), e(0)]).unwrap();
        assert!(w.is_identity());
        let w = Word::from_letters(
            k3(),
            0,
            vec![Letter::Directed, Letter::Rooted(F2Vector::zero()), Letter::Directed],
        )
        .unwrap();
        assert!(w.is_identity());
        let w = Word::from_letters(
            k3(),
            0,
            vec![e(0), e(1), Letter::Directed, Letter::Directed, e(0)],
        )
        .unwrap();
        assert_eq!(w.letters(), &[e(1)]);
        assert!(Word::from_letters(k3(), 0, vec![e(3)]).is_err());
    }

    #[test]
    fn inverse_is_reversal() {
        let w = Word::from_letters(k3(), 0, vec![e(2), Letter::Directed]).unwrap();
        assert_eq!(w.inverse().letters(), &[Letter::Directed, e(2)]);
        assert!(w.mul(&w.inverse()).is_identity());
        assert_eq!(w.inverse().inverse(), w);
    }

    #[test]
    fn syllable_length_example() {
        let k5 = GroupSpec::Kr { r: 5 };
        let w = Word::from_letters(
            k5,
            0,
            vec![e(0), Letter::Directed, e(0), Letter::Directed, e(1)],
        )
        .unwrap();
        assert_eq!(w.syllable_length_upper(), 3);
        let s = w.syllables();
        assert_eq!(Word::from_syllables(k5, 0, &s), w);
        assert_eq!(Word::identity(k5, 0).syllable_length_upper(), 0);
        assert_eq!(Word::rooted(k5, 0, F2Vector::basis(3)).syllable_length_upper(), 1);
    }

    #[test]
    fn pow_matches_repeated_product() {
        let w = Word::from_letters(k3(), 0, vec![e(0), Letter::Directed]).unwrap();
        let mut acc = Word::identity(k3(), 0);
        for n in 0..9 {
            assert_eq!(w.pow(n, 1 << 10).unwrap(), acc);
            acc = acc.mul(&w);
        }
        assert!(w.pow(1 << 20, 64).is_err());
    }

    #[test]
    fn text_round_trip() {
        let w = Word::from_letters(k3(), 0, vec![e(0), Letter::Directed, Letter::Rooted(F2Vector::cosparse([1u64]))]).unwrap();
        assert_eq!(Word::parse_text(k3(), 0, &w.to_string()).unwrap(), w);
        assert!(Word::parse_text(k3(), 0, "1").unwrap().is_identity());
        assert!(Word::parse_text(k3(), 0, "D x[0]").is_err());
        let v = VertexPath::new(k3(), 0, vec![F2Vector::zero(), F2Vector::sparse([0u64, 2])]).unwrap();
        assert_eq!(VertexPath::parse_text(k3(), 0, &v.to_string()).unwrap(), v);
        assert!(VertexPath::parse_text(k3(), 0, "[]").unwrap().is_empty());
    }
}
