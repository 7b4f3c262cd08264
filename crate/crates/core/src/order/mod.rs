//! Element orders, Cayley balls, exact word length and period growth.

pub mod ball;
pub mod period;

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::arith::F2Vector;
use crate::engine::{Coverage, Engine, Letter, Triviality, Word};
use crate::error::{Error, Result};

pub use ball::{ball_enumerate, min_length, Ball, BallEntry};
pub use period::{period_growth, PeriodOptions, PeriodRow, PeriodTable, PiMode};

/// Order of an element of a 2-group, as an exponent of 2.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderResult {
    /// The order is `2^exponent`.
    Finite { exponent: u32 },
    /// The search stopped. The order is at least `2^lower_exponent`; when
    /// `infinite` is set a self-reproducing section chain proves it infinite.
    ExceededBudget {
        lower_exponent: u32,
        infinite: bool,
        reason: String,
    },
}

impl OrderResult {
    pub fn exponent(&self) -> Option<u32> {
        match self {
            OrderResult::Finite { exponent } => Some(*exponent),
            OrderResult::ExceededBudget { .. } => None,
        }
    }

    /// `2^exponent` for finite orders.
    pub fn order(&self) -> Option<BigUint> {
        self.exponent().map(|e| BigUint::from(1u32) << e)
    }
}

impl fmt::Display for OrderResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrderResult::Finite { exponent } => write!(f, "{}", BigUint::from(1u32) << *exponent),
            OrderResult::ExceededBudget {
                lower_exponent,
                infinite,
                reason,
            } => {
                write!(f, "≥ 2^{lower_exponent} ({reason}")?;
                if *infinite {
                    f.write_str("; infinite")?;
                }
                f.write_str(")")
            }
        }
    }
}

type Key = (u64, Vec<Letter>);

enum Stop {
    /// A section chain returned to an element on the stack after squarings.
    Cycle,
    Budget(Error),
}

impl From<Error> for Stop {
    fn from(e: Error) -> Self {
        Stop::Budget(e)
    }
}

/// Order computation by first-layer orbit decomposition.
///
/// With `s` the first-layer translation: if `s ≠ 0` then `ord(w) = 2·ord(w²)`;
/// otherwise `w` fixes the first layer and `ord(w)` is the largest order
/// of a section. Results are memoized per level class, so one computer can
/// be reused across many words.
pub struct OrderComputer<'a> {
    engine: &'a Engine,
    memo: HashMap<Key, u32>,
    stack: Vec<u32>,
    on_stack: HashMap<Key, usize>,
    max_cum: u32,
}

const NO_BACK_EDGE: usize = usize::MAX;

impl<'a> OrderComputer<'a> {
    pub fn new(engine: &'a Engine) -> Self {
        OrderComputer {
            engine,
            memo: HashMap::new(),
            stack: Vec::new(),
            on_stack: HashMap::new(),
            max_cum: 0,
        }
    }

    /// Drops the memo table once it grows beyond `limit` entries.
    pub fn trim(&mut self, limit: usize) {
        if self.memo.len() > limit {
            self.memo.clear();
        }
    }

    pub fn order(&mut self, w: &Word) -> OrderResult {
        self.max_cum = 0;
        self.stack.clear();
        self.on_stack.clear();
        match self.eval(w, 0, None) {
            Ok((e, _)) => OrderResult::Finite { exponent: e },
            Err(Stop::Cycle) => OrderResult::ExceededBudget {
                lower_exponent: self.max_cum,
                infinite: true,
                reason: "section cycle with growing exponent".into(),
            },
            Err(Stop::Budget(e)) => OrderResult::ExceededBudget {
                lower_exponent: self.max_cum,
                infinite: false,
                reason: e.to_string(),
            },
        }
    }

    fn eval(&mut self, w: &Word, cum: u32, pair: Option<&F2Vector>) -> std::result::Result<(u32, usize), Stop> {
        self.max_cum = self.max_cum.max(cum);
        if w.is_identity() {
            return Ok((0, NO_BACK_EDGE));
        }
        let dc = w.directed_count();
        if dc == 0 {
            return Ok((1, NO_BACK_EDGE));
        }
        let s = w.translation();
        if s.is_zero() && dc == 1 {
            return Ok((1, NO_BACK_EDGE));
        }
        let key: Key = (w.spec().level_class(w.level()), w.letters().to_vec());
        if let Some(&e) = self.memo.get(&key) {
            return Ok((e, NO_BACK_EDGE));
        }
        if let Some(&i) = self.on_stack.get(&key) {
            return if cum > self.stack[i] {
                Err(Stop::Cycle)
            } else {
                Ok((0, i))
            };
        }
        let budgets = &self.engine.budgets;
        if self.stack.len() >= budgets.recursion {
            return Err(Error::budget("recursion", budgets.recursion).into());
        }
        let idx = self.stack.len();
        self.stack.push(cum);
        self.on_stack.insert(key.clone(), idx);
        let res = self.eval_inner(w, cum, &s, pair);
        self.stack.pop();
        self.on_stack.remove(&key);
        let (e, low) = res?;
        if low >= idx {
            self.memo.insert(key, e);
            Ok((e, NO_BACK_EDGE))
        } else {
            Ok((e, low))
        }
    }

    fn eval_inner(
        &mut self,
        w: &Word,
        cum: u32,
        s: &F2Vector,
        pair: Option<&F2Vector>,
    ) -> std::result::Result<(u32, usize), Stop> {
        let engine = self.engine;
        if !s.is_zero() {
            let w2 = w.square();
            if w2.len() > engine.budgets.word_letters {
                return Err(Error::budget("word letters", engine.budgets.word_letters).into());
            }
            let (e, low) = self.eval(&w2, cum + 1, Some(s))?;
            return Ok((e + 1, low));
        }
        let active = engine.active_set(w, Coverage::Compressed)?;
        let reps: Vec<&F2Vector> = active.representatives().collect();
        let listed: BTreeSet<&F2Vector> = match pair {
            Some(_) => reps.iter().copied().collect(),
            None => BTreeSet::new(),
        };
        let mut best = 0;
        let mut low = NO_BACK_EDGE;
        for x in reps {
            // sections at x and x + s of a square are conjugate
            if let Some(p) = pair {
                let y = x.add(p).normalized(w.rank());
                if y < *x && listed.contains(&y) {
                    continue;
                }
            }
            let sec = engine.section_first_unchecked(w, x)?;
            let (e, l) = self.eval(&sec, cum, None)?;
            best = best.max(e);
            low = low.min(l);
        }
        Ok((best, low))
    }
}

/// Order of `w` as a power of two.
pub fn order(engine: &Engine, w: &Word) -> OrderResult {
    OrderComputer::new(engine).order(w)
}

/// Reference order: the least `e ≤ max_exponent` with `w^{2^e} = 1`,
/// found by repeated squaring and the word problem.
pub fn doubling_order(engine: &Engine, w: &Word, max_exponent: u32) -> Result<Option<u32>> {
    let mut cur = w.clone();
    for e in 0..=max_exponent {
        match engine.is_trivial(&cur) {
            Triviality::Trivial => return Ok(Some(e)),
            Triviality::NonTrivial(_) => {}
            Triviality::Unknown => return Err(Error::budget("recursion", engine.budgets.recursion)),
        }
        cur = cur.square();
        if cur.len() > engine.budgets.word_letters {
            return Err(Error::budget("word letters", engine.budgets.word_letters));
        }
    }
    Ok(None)
}

/// Exponent of the order of `w` acting on the tree truncated at `depth` levels.
pub fn truncated_order(engine: &Engine, w: &Word, depth: u32) -> Result<u32> {
    if depth == 0 || w.is_identity() {
        return Ok(0);
    }
    let s = w.translation();
    if !s.is_zero() {
        let w2 = w.square();
        if w2.len() > engine.budgets.word_letters {
            return Err(Error::budget("word letters", engine.budgets.word_letters));
        }
        return Ok(1 + truncated_order(engine, &w2, depth)?);
    }
    let active = engine.active_set(w, Coverage::Compressed)?;
    let mut best = 0;
    for x in active.representatives() {
        let sec = engine.section_first_unchecked(w, x)?;
        best = best.max(truncated_order(engine, &sec, depth - 1)?);
    }
    Ok(best)
}
