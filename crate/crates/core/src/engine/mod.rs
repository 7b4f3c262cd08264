//! Action and section calculus, active vertex sets and the word problem.

pub mod portrait;
pub mod word;

use std::collections::BTreeSet;

use crate::arith::{F2Vector, Ix, Rank};
use crate::budget::Budgets;
use crate::error::{Error, Result};
use crate::families::{section_rule, RuleKind};

pub use portrait::Portrait;
pub use word::{Letter, Syllables, VertexPath, Word};

/// Answer of the word problem. A non-trivial answer carries a vertex that
/// the element moves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Triviality {
    Trivial,
    NonTrivial(VertexPath),
    Unknown,
}

impl Triviality {
    pub fn is_trivial(&self) -> bool {
        matches!(self, Triviality::Trivial)
    }

    pub fn is_nontrivial(&self) -> bool {
        matches!(self, Triviality::NonTrivial(_))
    }

    /// `Some(true)` / `Some(false)`, or `None` when undecided.
    pub fn decided(&self) -> Option<bool> {
        match self {
            Triviality::Trivial => Some(true),
            Triviality::NonTrivial(_) => Some(false),
            Triviality::Unknown => None,
        }
    }
}

/// How much of the first layer an active set must spell out.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coverage {
    /// Every vertex with a possibly non-trivial section, explicitly.
    Full,
    /// Explicit vertices plus one representative per family of vertices
    /// whose sections agree up to relabelling of basis letters.
    Compressed,
}

/// Vertices outside the explicit list that share one section shape.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Family {
    /// `{base + ē_i : i ∉ excluded}`; the section there is `e_i^m`.
    BarBasis {
        base: F2Vector,
        excluded: Vec<Ix>,
        representative: F2Vector,
    },
    /// Every vertex not listed explicitly; the section there is rooted.
    Complement { representative: F2Vector },
}

impl Family {
    pub fn representative(&self) -> &F2Vector {
        match self {
            Family::BarBasis { representative, .. } | Family::Complement { representative } => {
                representative
            }
        }
    }
}

/// A superset of the first-layer vertices where a word has non-trivial sections.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ActiveSet {
    pub explicit: Vec<F2Vector>,
    pub families: Vec<Family>,
}

impl ActiveSet {
    /// Explicit vertices followed by one representative per family.
    pub fn representatives(&self) -> impl Iterator<Item = &F2Vector> {
        self.explicit
            .iter()
            .chain(self.families.iter().map(Family::representative))
    }

    pub fn is_empty(&self) -> bool {
        self.explicit.is_empty() && self.families.is_empty()
    }
}

#[derive(Clone, Debug, Default)]
pub struct Engine {
    pub budgets: Budgets,
}

impl Engine {
    pub fn new(budgets: Budgets) -> Engine {
        Engine { budgets }
    }

    /// Section `w|_x` at a first-layer vertex, a word one level down.
    pub fn section_first(&self, w: &Word, x: &F2Vector) -> Result<Word> {
        x.validate(w.rank())?;
        let x = x.clone().normalized(w.rank());
        self.section_first_unchecked(w, &x)
    }

    /// As [`Engine::section_first`] for a vertex already normalized at the word's rank.
    pub(crate) fn section_first_unchecked(&self, w: &Word, x: &F2Vector) -> Result<Word> {
        let spec = *w.spec();
        let level = w.level();
        let rank = w.rank();
        let mut out = Word::identity(spec, level + 1);
        let next_rank = out.rank().clone();
        let mut p = x.clone();
        for l in w.letters() {
            match l {
                Letter::Rooted(v) => {
                    p.add_assign(v);
                    p.normalize(rank);
                }
                Letter::Directed => {
                    if let Some(l) = section_rule(&spec, level, rank, &next_rank, &p, self.budgets.bits)?.to_letter() {
                        out.push(l);
                    }
                }
            }
        }
        for l in out.letters() {
            if let Letter::Rooted(v) = l {
                v.check_budget(self.budgets.support)?;
            }
        }
        Ok(out)
    }

    /// `w|_v` for a vertex path starting at the word's level.
    pub fn section(&self, w: &Word, v: &VertexPath) -> Result<Word> {
        check_path(w, v)?;
        let mut cur = w.clone();
        for x in &v.letters {
            if cur.is_identity() {
                return Ok(Word::identity(*w.spec(), w.level() + v.len() as u64));
            }
            cur = self.section_first(&cur, x)?;
        }
        Ok(cur)
    }

    /// Image of `v` under the right action of `w`.
    pub fn act(&self, w: &Word, v: &VertexPath) -> Result<VertexPath> {
        check_path(w, v)?;
        let mut cur = w.clone();
        let mut out = Vec::with_capacity(v.len());
        for x in &v.letters {
            let x = x.clone().normalized(cur.rank());
            let image = x.add(&cur.translation()).normalized(cur.rank());
            image.check_budget(self.budgets.support)?;
            out.push(image);
            cur = if cur.is_identity() {
                Word::identity(*cur.spec(), cur.level() + 1)
            } else {
                self.section_first_unchecked(&cur, &x)?
            };
        }
        Ok(VertexPath {
            spec: v.spec,
            start_level: v.start_level,
            letters: out,
        })
    }

    pub fn first_layer_translation(&self, w: &Word) -> F2Vector {
        w.translation()
    }

    /// First-layer vertices outside which every section of `w` is the identity.
    pub fn active_set(&self, w: &Word, coverage: Coverage) -> Result<ActiveSet> {
        let prefixes: Vec<F2Vector> = w
            .prefixes()
            .into_iter()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        if prefixes.is_empty() {
            return Ok(ActiveSet::default());
        }
        let rank = w.rank();
        match w.spec().rule_kind(w.level()) {
            RuleKind::Bar => self.bar_active(&prefixes, rank, coverage),
            RuleKind::Index => self.index_active(&prefixes, rank, coverage),
        }
    }

    fn bar_active(&self, prefixes: &[F2Vector], rank: &Rank, coverage: Coverage) -> Result<ActiveSet> {
        let vertex_limit = self.budgets.vertices;
        if let Some(r) = rank.as_u64().filter(|r| *r <= 64) {
            if r <= 2 {
                return Ok(ActiveSet {
                    explicit: all_vertices(r),
                    families: Vec::new(),
                });
            }
            if prefixes.len() as u64 * (r + 1) > vertex_limit {
                return Err(Error::budget("active vertices", vertex_limit));
            }
            let mut set = BTreeSet::new();
            for p in prefixes {
                set.insert(p.clone());
                for i in 0..r {
                    set.insert(p.add(&F2Vector::bar_basis(i)).normalized(rank));
                }
            }
            return Ok(ActiveSet {
                explicit: set.into_iter().collect(),
                families: Vec::new(),
            });
        }
        if coverage == Coverage::Full {
            let r = rank
                .as_u64()
                .filter(|r| prefixes.len() as u64 * (r + 1) <= vertex_limit)
                .ok_or_else(|| Error::budget("active vertices", vertex_limit))?;
            let mut set = BTreeSet::new();
            for p in prefixes {
                set.insert(p.clone());
                for i in 0..r {
                    set.insert(p.add(&F2Vector::bar_basis(i)).normalized(rank));
                }
            }
            return Ok(ActiveSet {
                explicit: set.into_iter().collect(),
                families: Vec::new(),
            });
        }
        // Large rank: ē_i + (p + q) can only hit 0 or some ē_k when i lies in
        // the stored support of p + q, so every other i behaves alike.
        let mut excluded = BTreeSet::new();
        for p in prefixes {
            for q in prefixes {
                let v = p.add(q).normalized(rank);
                excluded.extend(v.support().iter().cloned());
            }
        }
        if excluded.len() as u64 * prefixes.len() as u64 > vertex_limit {
            return Err(Error::budget("active vertices", vertex_limit));
        }
        let excluded: Vec<Ix> = excluded.into_iter().filter(|i| rank.contains_index(i)).collect();
        let mut generic = 0u64;
        for i in &excluded {
            if i.as_u64() == Some(generic) {
                generic += 1;
            }
        }
        let generic = Ix::Small(generic);
        let has_generic = rank.contains_index(&generic)
            && rank
                .exact()
                .is_none_or(|r| r > num_bigint::BigUint::from(excluded.len() as u64));
        let mut set = BTreeSet::new();
        let mut families = Vec::new();
        for p in prefixes {
            set.insert(p.clone());
            for i in &excluded {
                set.insert(p.add(&F2Vector::bar_basis(i.clone())).normalized(rank));
            }
            if has_generic {
                families.push(Family::BarBasis {
                    base: p.clone(),
                    excluded: excluded.clone(),
                    representative: p.add(&F2Vector::bar_basis(generic.clone())).normalized(rank),
                });
            }
        }
        Ok(ActiveSet {
            explicit: set.into_iter().collect(),
            families,
        })
    }

    fn index_active(&self, prefixes: &[F2Vector], rank: &Rank, coverage: Coverage) -> Result<ActiveSet> {
        let vertex_limit = self.budgets.vertices;
        if coverage == Coverage::Full {
            let size = rank
                .layer_size()
                .filter(|n| *n <= vertex_limit)
                .ok_or_else(|| Error::budget("active vertices", vertex_limit))?;
            return Ok(ActiveSet {
                explicit: all_vertices(size.trailing_zeros() as u64),
                families: Vec::new(),
            });
        }
        // Off the prefixes every directed letter contributes a distinct basis
        // letter, so all remaining vertices carry the same rooted section shape.
        let listed: BTreeSet<&F2Vector> = prefixes.iter().collect();
        let representative = match rank.layer_size() {
            Some(n) if n <= 64 * (prefixes.len() as u64 + 1) => (0..n)
                .map(|b| F2Vector::from_bits(b, rank.as_u64().unwrap()))
                .find(|x| !listed.contains(x)),
            _ => (0..=prefixes.len() as u64)
                .map(|i| F2Vector::basis(i).normalized(rank))
                .find(|x| !listed.contains(x)),
        };
        Ok(ActiveSet {
            explicit: prefixes.to_vec(),
            families: representative
                .map(|representative| Family::Complement { representative })
                .into_iter()
                .collect(),
        })
    }

    /// Explicit list of active first-layer vertices: those whose section has
    /// a non-empty normal form.
    pub fn active_vertices(&self, w: &Word) -> Result<Vec<F2Vector>> {
        let set = self.active_set(w, Coverage::Full)?;
        let mut out = Vec::new();
        for x in set.explicit {
            if !self.section_first_unchecked(w, &x)?.is_identity() {
                out.push(x);
            }
        }
        Ok(out)
    }

    /// Decides whether `w` is the identity automorphism.
    pub fn is_trivial(&self, w: &Word) -> Triviality {
        match self.trivial_rec(w, 0) {
            Ok(None) => Triviality::Trivial,
            Ok(Some(mut path)) => {
                path.reverse();
                match VertexPath::new(*w.spec(), w.level(), path) {
                    Ok(v) => Triviality::NonTrivial(v),
                    Err(_) => Triviality::Unknown,
                }
            }
            Err(_) => Triviality::Unknown,
        }
    }

    /// `Ok(None)`: trivial. `Ok(Some(path))`: moved vertex, stored leaf first.
    fn trivial_rec(&self, w: &Word, depth: usize) -> Result<Option<Vec<F2Vector>>> {
        if w.is_identity() {
            return Ok(None);
        }
        let s = w.translation();
        if !s.is_zero() {
            return Ok(Some(vec![F2Vector::zero()]));
        }
        if depth >= self.budgets.recursion {
            return Err(Error::budget("recursion", self.budgets.recursion));
        }
        if w.directed_count() == 1 {
            if let Some(p) = self.single_directed_witness(w)? {
                return Ok(Some(p));
            }
        }
        let active = self.active_set(w, Coverage::Compressed)?;
        let mut unknown = None;
        for x in active.representatives() {
            let sec = self.section_first_unchecked(w, x)?;
            match self.trivial_rec(&sec, depth + 1) {
                Ok(None) => {}
                Ok(Some(mut p)) => {
                    p.push(x.clone());
                    return Ok(Some(p));
                }
                Err(e) => unknown = Some(e),
            }
        }
        match unknown {
            Some(e) => Err(e),
            None => Ok(None),
        }
    }

    /// A conjugate `a D a` of the directed letter moves a vertex two levels down.
    fn single_directed_witness(&self, w: &Word) -> Result<Option<Vec<F2Vector>>> {
        let a = match w.letters().first() {
            Some(Letter::Rooted(v)) => v.clone(),
            _ => F2Vector::zero(),
        };
        let rank = w.rank();
        for c in [F2Vector::bar_basis(0u64), F2Vector::basis(0u64)] {
            let x = a.add(&c).normalized(rank);
            let sec = self.section_first_unchecked(w, &x)?;
            if let [Letter::Rooted(_)] = sec.letters() {
                return Ok(Some(vec![F2Vector::zero(), x]));
            }
        }
        Ok(None)
    }

    /// `w1 = w2` as automorphisms.
    pub fn equal(&self, w1: &Word, w2: &Word) -> Triviality {
        match w1.try_mul(&w2.inverse()) {
            Ok(q) => self.is_trivial(&q),
            Err(_) => Triviality::Unknown,
        }
    }

    /// Depth-limited portrait; children only where the section is non-trivial.
    pub fn portrait(&self, w: &Word, depth: u32) -> Result<Portrait> {
        let mut p = Portrait::leaf(w.translation());
        if depth == 0 || w.is_identity() {
            return Ok(p);
        }
        for x in self.active_vertices(w)? {
            let sec = self.section_first_unchecked(w, &x)?;
            if self.is_trivial(&sec).is_trivial() {
                continue;
            }
            p.children.insert(x, self.portrait(&sec, depth - 1)?);
        }
        Ok(p)
    }

    /// Hash of the depth-truncated portrait, where children whose truncated
    /// fingerprint equals the identity's are left out. Equal elements always
    /// get equal fingerprints.
    pub fn fingerprint(&self, w: &Word, depth: u32) -> Result<u64> {
        use std::hash::{Hash, Hasher};
        let mut h = std::collections::hash_map::DefaultHasher::new();
        w.translation().hash(&mut h);
        if depth > 0 && !w.is_identity() {
            let id = identity_fingerprint();
            let set = self.active_set(w, Coverage::Full)?;
            for x in &set.explicit {
                let sec = self.section_first_unchecked(w, x)?;
                let f = self.fingerprint(&sec, depth - 1)?;
                if f != id {
                    x.hash(&mut h);
                    f.hash(&mut h);
                }
            }
        }
        Ok(h.finish())
    }
}

pub(crate) fn identity_fingerprint() -> u64 {
    use std::hash::{Hash, Hasher};
    let mut h = std::collections::hash_map::DefaultHasher::new();
    F2Vector::zero().hash(&mut h);
    h.finish()
}

fn check_path(w: &Word, v: &VertexPath) -> Result<()> {
    if v.spec != *w.spec() {
        return Err(Error::Invalid("vertex and word belong to different trees".into()));
    }
    if v.start_level != w.level() {
        return Err(Error::LevelMismatch {
            expected: w.level(),
            got: v.start_level,
        });
    }
    for (i, x) in v.letters.iter().enumerate() {
        x.validate(&w.spec().rank(w.level() + i as u64))?;
    }
    Ok(())
}

/// All `2^r` first-layer vertices in enumeration order.
pub(crate) fn all_vertices(r: u64) -> Vec<F2Vector> {
    (0..1u64 << r).map(|b| F2Vector::from_bits(b, r)).collect()
}
