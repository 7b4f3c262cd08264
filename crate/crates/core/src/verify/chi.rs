use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::support::decide;
use crate::engine::{Engine, Word};
use crate::error::{Error, Result};
use crate::families::{GenKind, GroupSpec};
use crate::order::ball_enumerate;

/// A group word in abstract variables: lowercase letters are variables,
/// uppercase letters their inverses (`"XYxy"` is `x⁻¹y⁻¹xy`).
/// Variables are numbered by first appearance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbstractWord {
    pub letters: Vec<(usize, bool)>,
    pub names: Vec<char>,
}

impl AbstractWord {
    pub fn variables(&self) -> usize {
        self.names.len()
    }

    /// `w(g_0, …, g_{m-1})`.
    pub fn evaluate(&self, values: &[&Word]) -> Word {
        let mut acc = Word::identity(*values[0].spec(), values[0].level());
        for &(v, inv) in &self.letters {
            acc = if inv { acc.mul(&values[v].inverse()) } else { acc.mul(values[v]) };
        }
        acc
    }
}

impl FromStr for AbstractWord {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let mut names: Vec<char> = Vec::new();
        let mut letters = Vec::new();
        for ch in s.chars().filter(|c| !c.is_whitespace()) {
            if !ch.is_ascii_alphabetic() {
                return Err(Error::Parse(format!("unexpected {ch:?} in word {s:?}")));
            }
            let lower = ch.to_ascii_lowercase();
            let v = match names.iter().position(|c| *c == lower) {
                Some(v) => v,
                None => {
                    names.push(lower);
                    names.len() - 1
                }
            };
            letters.push((v, ch.is_ascii_uppercase()));
        }
        if letters.is_empty() {
            return Err(Error::Parse("empty word".into()));
        }
        Ok(AbstractWord { letters, names })
    }
}

impl fmt::Display for AbstractWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &(v, inv) in &self.letters {
            let c = self.names[v];
            write!(f, "{}", if inv { c.to_ascii_uppercase() } else { c })?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "result")]
pub enum ChiResult {
    /// Least total length of a tuple on which the word is not the identity.
    Found { total: u32, witness: Vec<Word> },
    NotFound { radius: u32 },
}

/// Calls `f` on every `parts`-tuple of numbers in `0..=cap` summing to `total`,
/// in lexicographic order, until it returns `Some`.
fn compositions<T>(parts: usize, total: u32, cap: u32, f: &mut impl FnMut(&[u32]) -> Result<Option<T>>) -> Result<Option<T>> {
    fn rec<T>(
        cur: &mut Vec<u32>,
        parts: usize,
        left: u32,
        cap: u32,
        f: &mut impl FnMut(&[u32]) -> Result<Option<T>>,
    ) -> Result<Option<T>> {
        if cur.len() == parts {
            return if left == 0 { f(cur) } else { Ok(None) };
        }
        let rest = (parts - cur.len() - 1) as u32;
        for t in 0..=left.min(cap) {
            if left - t > rest * cap {
                continue;
            }
            cur.push(t);
            let r = rec(cur, parts, left - t, cap, f)?;
            cur.pop();
            if r.is_some() {
                return Ok(r);
            }
        }
        Ok(None)
    }
    rec(&mut Vec::with_capacity(parts), parts, total, cap, f)
}

/// Lawlessness complexity: the least `Σ ‖g_i‖` over tuples with `w(g) ≠ 1`,
/// searched over the ball of the given radius in order of total length, then
/// lengths, then ball order.
pub fn chi_complexity(
    engine: &Engine,
    spec: GroupSpec,
    level: u64,
    kind: GenKind,
    w: &AbstractWord,
    radius: u32,
) -> Result<ChiResult> {
    let ball = ball_enumerate(engine, spec, level, kind, radius, 4)?;
    let mut by_len: Vec<Vec<Word>> = vec![Vec::new(); radius as usize + 1];
    for e in ball.canonical() {
        by_len[e.length as usize].push(e.word);
    }
    let m = w.variables();
    let mut evaluated = 0usize;
    for total in 0..=(m as u32) * radius {
        let found = compositions(m, total, radius, &mut |lens: &[u32]| -> Result<Option<Vec<Word>>> {
            let pools: Vec<&Vec<Word>> = lens.iter().map(|&l| &by_len[l as usize]).collect();
            if pools.iter().any(|p| p.is_empty()) {
                return Ok(None);
            }
            let mut idx = vec![0usize; m];
            loop {
                evaluated += 1;
                if evaluated > engine.budgets.ball {
                    return Err(Error::budget("ball", engine.budgets.ball));
                }
                let values: Vec<&Word> = (0..m).map(|v| &pools[v][idx[v]]).collect();
                if !decide(engine, engine.is_trivial(&w.evaluate(&values)))? {
                    return Ok(Some(values.into_iter().cloned().collect()));
                }
                // odometer, last variable fastest
                let mut v = m;
                loop {
                    if v == 0 {
                        return Ok(None);
                    }
                    v -= 1;
                    idx[v] += 1;
                    if idx[v] < pools[v].len() {
                        break;
                    }
                    idx[v] = 0;
                }
            }
        })?;
        if let Some(witness) = found {
            return Ok(ChiResult::Found { total, witness });
        }
    }
    Ok(ChiResult::NotFound { radius })
}
