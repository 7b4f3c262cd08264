use std::collections::HashMap;
use std::sync::Mutex;

use rayon::prelude::*;

use super::Counterexample;
use crate::arith::F2Vector;
use crate::engine::{Coverage, Engine, Triviality, Word};
use crate::error::Result;
use crate::families::GenKind;
use crate::order::period::SyllableCover;
use crate::order::Ball;

/// `[x, y] = x y x⁻¹ y⁻¹`, the convention of the section identities checked here.
pub(crate) fn comm(x: &Word, y: &Word) -> Word {
    x.mul(y).mul(&x.inverse()).mul(&y.inverse())
}

/// Left-normed `[x_0, x_1, …]` with [`comm`].
pub(crate) fn comm_chain(ws: &[Word]) -> Word {
    let mut acc = ws[0].clone();
    for w in &ws[1..] {
        acc = comm(&acc, w);
    }
    acc
}

pub(crate) fn decide(engine: &Engine, t: Triviality) -> Result<bool> {
    t.decided()
        .ok_or_else(|| crate::error::Error::budget("recursion", engine.budgets.recursion))
}

/// Sections at depth `depth` over the compressed active representatives,
/// skipping identity sections. Vertices outside the representatives either
/// have identity sections or share a rooted section with a representative.
pub(crate) fn layer_sections(engine: &Engine, w: &Word, depth: u32) -> Result<Vec<(Vec<F2Vector>, Word)>> {
    let mut out = Vec::new();
    let mut path = Vec::new();
    layer_rec(engine, w, depth, &mut path, &mut out)?;
    Ok(out)
}

fn layer_rec(
    engine: &Engine,
    w: &Word,
    depth: u32,
    path: &mut Vec<F2Vector>,
    out: &mut Vec<(Vec<F2Vector>, Word)>,
) -> Result<()> {
    if w.is_identity() {
        return Ok(());
    }
    if depth == 0 {
        out.push((path.clone(), w.clone()));
        return Ok(());
    }
    let active = engine.active_set(w, Coverage::Compressed)?;
    for x in active.representatives() {
        let sec = engine.section_first(w, x)?;
        path.push(x.clone());
        layer_rec(engine, &sec, depth - 1, path, out)?;
        path.pop();
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Verdict {
    Holds,
    Fails,
    /// The ball needed to decide was over the size cap.
    Unknown,
}

/// Decides `‖w‖ ≤ bound` in the `kind` generating set of `w`'s level, using
/// syllable counts first and exact balls (grown on demand) otherwise.
pub(crate) struct LengthOracle<'a> {
    engine: &'a Engine,
    kind: GenKind,
    fingerprint_depth: u32,
    cap: usize,
    balls: Mutex<HashMap<u64, Ball>>,
}

impl<'a> LengthOracle<'a> {
    pub(crate) fn new(engine: &'a Engine, kind: GenKind, cap: usize) -> LengthOracle<'a> {
        LengthOracle {
            engine,
            kind,
            fingerprint_depth: 4,
            cap,
            balls: Mutex::new(HashMap::new()),
        }
    }

    pub(crate) fn at_most(&self, w: &Word, bound: u32) -> Result<Verdict> {
        if w.is_identity() || w.syllable_length_upper() <= bound as usize {
            return Ok(Verdict::Holds);
        }
        if bound == 0 {
            return Ok(match decide(self.engine, self.engine.is_trivial(w))? {
                true => Verdict::Holds,
                false => Verdict::Fails,
            });
        }
        let class = w.spec().level_class(w.level());
        let mut balls = self.balls.lock().expect("ball cache poisoned");
        if let std::collections::hash_map::Entry::Vacant(e) = balls.entry(class) {
            let b = Ball::new(self.engine, *w.spec(), w.level(), self.kind, self.fingerprint_depth)?;
            e.insert(b);
        }
        let ball = balls.get_mut(&class).expect("inserted above");
        while ball.radius() < bound {
            let next = ball.len() * ball.generators().len();
            if next > self.cap * 4 {
                return Ok(Verdict::Unknown);
            }
            match ball.grow(self.engine) {
                Ok(0) => break,
                Ok(_) => {}
                Err(e) if e.is_budget() => return Ok(Verdict::Unknown),
                Err(e) => return Err(e),
            }
            if ball.len() > self.cap {
                return Ok(Verdict::Unknown);
            }
        }
        let w = if w.level() == ball.level { w.clone() } else { w.relevel(ball.level)? };
        Ok(match ball.lookup(self.engine, &w)? {
            Some(l) if l <= bound => Verdict::Holds,
            _ => Verdict::Fails,
        })
    }

    /// Exact length, if at most `limit`.
    pub(crate) fn exact(&self, w: &Word, limit: u32) -> Result<Option<u32>> {
        if w.is_identity() {
            return Ok(Some(0));
        }
        for b in 1..=limit {
            match self.at_most(w, b)? {
                Verdict::Holds => return Ok(Some(b)),
                Verdict::Fails => {}
                Verdict::Unknown => return Ok(None),
            }
        }
        Ok(None)
    }
}

/// Tally of one sweep: instances checked, undecided instances and the first
/// counterexample in enumeration order.
#[derive(Default)]
pub(crate) struct Tally {
    pub instances: u64,
    pub unknown: u64,
    pub counterexample: Option<Counterexample>,
}

impl Tally {
    pub(crate) fn merge(&mut self, other: Tally) {
        self.instances += other.instances;
        self.unknown += other.unknown;
        if self.counterexample.is_none() {
            self.counterexample = other.counterexample;
        }
    }
}

/// Applies `f` to every covering word, in parallel over work items; the
/// result is independent of the thread count.
pub(crate) fn sweep<F>(cover: &SyllableCover, f: F) -> Result<Tally>
where
    F: Fn(&Word, &mut Tally) -> Result<()> + Sync,
{
    let roots = cover.roots();
    let parts: Vec<Tally> = roots
        .par_iter()
        .map(|root| -> Result<Tally> {
            let mut t = Tally::default();
            let mut err = None;
            cover.visit(root, &mut |seq, c| {
                if err.is_some() || t.counterexample.is_some() {
                    return;
                }
                if let Err(e) = f(&cover.word(seq, c), &mut t) {
                    err = Some(e);
                }
            });
            match err {
                Some(e) => Err(e),
                None => Ok(t),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let mut total = Tally::default();
    for p in parts {
        total.merge(p);
    }
    Ok(total)
}
