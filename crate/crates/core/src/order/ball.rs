use std::collections::HashMap;

use rayon::prelude::*;

use crate::engine::{Engine, Letter, Triviality, Word};
use crate::error::{Error, Result};
use crate::families::{make_generators, GenKind, GroupSpec};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BallEntry {
    pub word: Word,
    /// Exact word length: the radius at which the element first appeared.
    pub length: u32,
}

/// A Cayley ball grown one sphere at a time, with exactly one entry per
/// group element. Candidates are bucketed by portrait fingerprint and
/// merged only after the word problem confirms equality.
pub struct Ball {
    pub spec: GroupSpec,
    pub level: u64,
    pub kind: GenKind,
    pub fingerprint_depth: u32,
    radius: u32,
    generators: Vec<Word>,
    entries: Vec<BallEntry>,
    fingerprints: Vec<u64>,
    by_letters: HashMap<Vec<Letter>, usize>,
    by_fingerprint: HashMap<u64, Vec<usize>>,
    sphere_start: usize,
}

impl Ball {
    /// The radius-0 ball `{1}`.
    pub fn new(engine: &Engine, spec: GroupSpec, level: u64, kind: GenKind, fingerprint_depth: u32) -> Result<Ball> {
        let generators = make_generators(&spec, level, kind, engine.budgets.ball)?
            .members
            .into_iter()
            .filter(|g| !g.is_identity())
            .collect();
        let mut ball = Ball {
            spec,
            level,
            kind,
            fingerprint_depth,
            radius: 0,
            generators,
            entries: Vec::new(),
            fingerprints: Vec::new(),
            by_letters: HashMap::new(),
            by_fingerprint: HashMap::new(),
            sphere_start: 0,
        };
        let id = Word::identity(spec, level);
        let fp = engine.fingerprint(&id, fingerprint_depth)?;
        ball.insert(id, 0, fp);
        Ok(ball)
    }

    fn insert(&mut self, word: Word, length: u32, fp: u64) {
        let i = self.entries.len();
        self.by_letters.insert(word.letters().to_vec(), i);
        self.by_fingerprint.entry(fp).or_default().push(i);
        self.fingerprints.push(fp);
        self.entries.push(BallEntry { word, length });
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries in discovery order (by length, then by parent and generator).
    pub fn entries(&self) -> &[BallEntry] {
        &self.entries
    }

    pub fn generators(&self) -> &[Word] {
        &self.generators
    }

    /// Number of elements per length `0..=radius`.
    pub fn sphere_sizes(&self) -> Vec<usize> {
        let mut out = vec![0; self.radius as usize + 1];
        for e in &self.entries {
            out[e.length as usize] += 1;
        }
        out
    }

    /// Entries sorted by `(length, letters)`.
    pub fn canonical(&self) -> Vec<BallEntry> {
        let mut v = self.entries.clone();
        v.sort_by(|a, b| (a.length, a.word.letters()).cmp(&(b.length, b.word.letters())));
        v
    }

    /// Index of an entry equal to `w` among the given candidates.
    fn find_equal(&self, engine: &Engine, w: &Word, fp: u64) -> Result<Option<usize>> {
        if let Some(&i) = self.by_letters.get(w.letters()) {
            return Ok(Some(i));
        }
        if let Some(bucket) = self.by_fingerprint.get(&fp) {
            for &i in bucket {
                match engine.equal(w, &self.entries[i].word) {
                    Triviality::Trivial => return Ok(Some(i)),
                    Triviality::NonTrivial(_) => {}
                    Triviality::Unknown => {
                        return Err(Error::budget("recursion", engine.budgets.recursion))
                    }
                }
            }
        }
        Ok(None)
    }

    /// Exact length of `w` if it lies in the ball.
    pub fn lookup(&self, engine: &Engine, w: &Word) -> Result<Option<u32>> {
        w.same_group(&self.entries[0].word)?;
        let fp = engine.fingerprint(w, self.fingerprint_depth)?;
        Ok(self.find_equal(engine, w, fp)?.map(|i| self.entries[i].length))
    }

    /// Adds the next sphere. Returns the number of new elements.
    pub fn grow(&mut self, engine: &Engine) -> Result<usize> {
        let sphere: Vec<usize> = (self.sphere_start..self.entries.len()).collect();
        let pairs: Vec<(usize, usize)> = sphere
            .iter()
            .flat_map(|&i| (0..self.generators.len()).map(move |g| (i, g)))
            .collect();
        // Candidates that are new with respect to the existing ball, decided in parallel.
        let this = &*self;
        let fresh: Vec<Option<(Word, u64)>> = pairs
            .par_iter()
            .map(|&(i, g)| -> Result<Option<(Word, u64)>> {
                let w = this.entries[i].word.mul(&this.generators[g]);
                if this.by_letters.contains_key(w.letters()) {
                    return Ok(None);
                }
                let fp = engine.fingerprint(&w, this.fingerprint_depth)?;
                if this.find_equal(engine, &w, fp)?.is_some() {
                    return Ok(None);
                }
                Ok(Some((w, fp)))
            })
            .collect::<Result<Vec<_>>>()?;
        let start = self.entries.len();
        self.sphere_start = start;
        self.radius += 1;
        let length = self.radius;
        for (w, fp) in fresh.into_iter().flatten() {
            // only elements of the new sphere can still collide
            if let Some(&i) = self.by_letters.get(w.letters()) {
                if i >= start {
                    continue;
                }
            }
            let mut dup = false;
            if let Some(bucket) = self.by_fingerprint.get(&fp) {
                for &i in bucket.iter().filter(|&&i| i >= start) {
                    match engine.equal(&w, &self.entries[i].word) {
                        Triviality::Trivial => {
                            dup = true;
                            break;
                        }
                        Triviality::NonTrivial(_) => {}
                        Triviality::Unknown => {
                            return Err(Error::budget("recursion", engine.budgets.recursion))
                        }
                    }
                }
            }
            if !dup {
                if self.entries.len() >= engine.budgets.ball {
                    return Err(Error::budget("ball", engine.budgets.ball));
                }
                self.insert(w, length, fp);
            }
        }
        Ok(self.entries.len() - start)
    }
}

/// Ball of the given radius with one canonical representative per element.
pub fn ball_enumerate(
    engine: &Engine,
    spec: GroupSpec,
    level: u64,
    kind: GenKind,
    radius: u32,
    fingerprint_depth: u32,
) -> Result<Ball> {
    let mut ball = Ball::new(engine, spec, level, kind, fingerprint_depth)?;
    for _ in 0..radius {
        if ball.grow(engine)? == 0 {
            ball.radius = radius;
            break;
        }
    }
    Ok(ball)
}

/// Exact word length of `w`, or `None` if it exceeds `radius_limit`.
pub fn min_length(engine: &Engine, w: &Word, kind: GenKind, radius_limit: u32, fingerprint_depth: u32) -> Result<Option<u32>> {
    if w.is_identity() {
        return Ok(Some(0));
    }
    let mut ball = Ball::new(engine, *w.spec(), w.level(), kind, fingerprint_depth)?;
    let fp = engine.fingerprint(w, fingerprint_depth)?;
    for _ in 0..radius_limit {
        if ball.grow(engine)? == 0 {
            break;
        }
        if let Some(i) = ball.find_equal(engine, w, fp)? {
            return Ok(Some(ball.entries[i].length));
        }
    }
    Ok(None)
}
