use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ball::ball_enumerate;
use super::{OrderComputer, OrderResult};
use crate::arith::F2Vector;
use crate::engine::{Engine, Syllables, Word};
use crate::error::{Error, Result};
use crate::families::{GenKind, GroupSpec};

/// Enumerates words `D^{p_1} ⋯ D^{p_k} · c` with `k + [c ≠ 0] ≤ max_len`,
/// consecutive `p_j` distinct, up to conjugation by rooted elements
/// (`p_1 = 0`) and, where the group allows it, coordinate permutations
/// (`p_2` has its set bits lowest).
///
/// Every element of the `S`-ball of radius `max_len` is conjugate to one
/// of these words, and conjugation preserves orders and the multiset of
/// section lengths on each layer.
#[derive(Clone, Debug)]
pub struct SyllableCover {
    pub spec: GroupSpec,
    pub level: u64,
    pub rank: u64,
    pub max_len: u32,
    /// Canonicalize `p_2` under permutations of basis letters.
    pub permutations: bool,
    /// Enumerate trailing rooted parts `c`; otherwise only `c = 0`.
    pub totals: bool,
    /// For each `p_2` value, the coordinate permutations (as lookup tables)
    /// taking it to its canonical form. Set by [`SyllableCover::with_orbit_reduction`].
    canon_perms: Option<Vec<Vec<Vec<u64>>>>,
}

/// Largest rank for which orbit reduction enumerates coordinate permutations.
const ORBIT_PERM_RANK: u64 = 6;

fn permutations_of(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations_of(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// Depth at which the enumeration tree is split into parallel work items.
const ROOT_DEPTH: usize = 3;

impl SyllableCover {
    pub fn new(spec: GroupSpec, level: u64, max_len: u32, totals: bool) -> Result<SyllableCover> {
        let rank = spec
            .rank(level)
            .as_u64()
            .filter(|r| *r <= 16)
            .ok_or_else(|| Error::budget("syllable enumeration rank", 16u64))?;
        Ok(SyllableCover {
            spec,
            level,
            rank,
            max_len,
            permutations: matches!(spec, GroupSpec::Kr { .. }),
            totals,
            canon_perms: None,
        })
    }

    /// Restricts [`SyllableCover::visit_orbits`] to one word per class under
    /// cyclic rotation of syllables and inversion, on top of the conjugations
    /// already factored out. These preserve orders but not sections.
    /// Returns the cover unchanged when the rank is too large to canonicalize.
    pub fn with_orbit_reduction(mut self) -> SyllableCover {
        if !self.permutations {
            self.canon_perms = Some(Vec::new());
        } else if self.rank <= ORBIT_PERM_RANK {
            let r = self.rank as usize;
            let tables: Vec<Vec<u64>> = permutations_of(r)
                .into_iter()
                .map(|perm| {
                    (0..1u64 << r)
                        .map(|x| (0..r).filter(|&i| x >> i & 1 == 1).fold(0, |acc, i| acc | 1 << perm[i]))
                        .collect()
                })
                .collect();
            let by_value = (0..1u64 << r)
                .map(|x| {
                    let canon = (1u64 << x.count_ones()) - 1;
                    tables.iter().filter(|t| t[x as usize] == canon).cloned().collect()
                })
                .collect();
            self.canon_perms = Some(by_value);
        }
        self
    }

    pub fn orbit_reduced(&self) -> bool {
        self.canon_perms.is_some()
    }

    /// Whether `(seq, c)` is the least member of its class among words in
    /// the enumeration's normal form. Always true without orbit reduction.
    pub fn is_orbit_representative(&self, seq: &[u64], c: u64) -> bool {
        let Some(canon) = &self.canon_perms else {
            return true;
        };
        let k = seq.len();
        if k < 2 {
            // only relabellings act: (0; c) is fixed by rotation and inversion
            return canon.is_empty() || c == (1u64 << c.count_ones()) - 1;
        }
        let mut cand = vec![0u64; k];
        // rotations: (p_1, …, p_k; c) ~ (p_2, …, p_k, p_1 + c; c); inversion
        // reverses and adds c to every prefix
        for inverse in [false, true] {
            for shift in 0..k {
                for (j, slot) in cand.iter_mut().enumerate() {
                    let (idx, wrap) = if inverse {
                        let t = (k - 1 + 2 * k - j - shift) % k;
                        (t, j + shift >= k)
                    } else {
                        ((j + shift) % k, j + shift >= k)
                    };
                    let mut v = seq[idx];
                    if wrap {
                        v ^= c;
                    }
                    if inverse {
                        v ^= c;
                    }
                    *slot = v;
                }
                if cand.windows(2).any(|w| w[0] == w[1]) {
                    continue;
                }
                let base = cand[0];
                for v in cand.iter_mut() {
                    *v ^= base;
                }
                if self.beats(&cand, c, seq, canon) {
                    return false;
                }
            }
        }
        true
    }

    /// Whether some allowed relabelling of `(cand, c)` (with `p_1 = 0`) is
    /// lexicographically smaller than `(seq, c)`.
    fn beats(&self, cand: &[u64], c: u64, seq: &[u64], canon: &[Vec<Vec<u64>>]) -> bool {
        if canon.is_empty() {
            return cand < seq;
        }
        let low = (1u64 << cand[1].count_ones()) - 1;
        if low != seq[1] {
            return low < seq[1];
        }
        let own = seq[2..].iter().copied().chain(std::iter::once(c));
        canon[cand[1] as usize].iter().any(|t| {
            cand[2..]
                .iter()
                .map(|&v| t[v as usize])
                .chain(std::iter::once(t[c as usize]))
                .lt(own.clone())
        })
    }

    fn second_choices(&self) -> Vec<u64> {
        if self.permutations {
            (1..=self.rank).map(|w| (1u64 << w) - 1).collect()
        } else {
            (1..1u64 << self.rank).collect()
        }
    }

    /// Work items: all prefix sequences of length `≤ ROOT_DEPTH`.
    pub fn roots(&self) -> Vec<Vec<u64>> {
        let mut out = vec![vec![]];
        if self.max_len == 0 {
            return out;
        }
        out.push(vec![0]);
        if self.max_len < 2 {
            return out;
        }
        let seconds = self.second_choices();
        for &p2 in &seconds {
            out.push(vec![0, p2]);
        }
        if self.max_len < 3 {
            return out;
        }
        for &p2 in &seconds {
            for p3 in 0..1u64 << self.rank {
                if p3 != p2 {
                    out.push(vec![0, p2, p3]);
                }
            }
        }
        out
    }

    /// Calls `f(prefixes, total)` for the root itself and, for roots of full
    /// depth, for every extension.
    pub fn visit<F: FnMut(&[u64], u64)>(&self, root: &[u64], f: &mut F) {
        let mut seq = root.to_vec();
        self.visit_rec(&mut seq, root.len() == ROOT_DEPTH, f);
    }

    fn visit_rec<F: FnMut(&[u64], u64)>(&self, seq: &mut Vec<u64>, extend: bool, f: &mut F) {
        let k = seq.len() as u32;
        if k > self.max_len {
            return;
        }
        f(seq, 0);
        if self.totals && k < self.max_len {
            for c in 1..1u64 << self.rank {
                f(seq, c);
            }
        }
        if extend && k < self.max_len {
            let last = *seq.last().expect("extension of a non-empty root");
            for p in 0..1u64 << self.rank {
                if p != last {
                    seq.push(p);
                    self.visit_rec(seq, true, f);
                    seq.pop();
                }
            }
        }
    }

    pub fn word(&self, prefixes: &[u64], total: u64) -> Word {
        let syl = Syllables {
            prefixes: prefixes.iter().map(|&p| F2Vector::from_bits(p, self.rank)).collect(),
            total: F2Vector::from_bits(total, self.rank),
        };
        Word::from_syllables(self.spec, self.level, &syl)
    }

    /// Number of words the enumeration visits.
    pub fn count(&self) -> u64 {
        let a = 1u64 << self.rank;
        let seconds = self.second_choices().len() as u64;
        let mut total = 0u64;
        for k in 0..=self.max_len as u64 {
            let seqs = match k {
                0 | 1 => 1,
                _ => seconds * (a - 1).pow(k as u32 - 2),
            };
            let with_c = if self.totals && (k as u32) < self.max_len { a } else { 1 };
            total += seqs * with_c;
        }
        total
    }
}

/// How a period-table row was obtained.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum PiMode {
    /// Maximum over an explicitly enumerated, deduplicated ball.
    Ball,
    /// Maximum over the syllable covering of the ball; exact.
    Covering,
    /// Maximum over random words of the given length; a lower bound only.
    Sampled { samples: u64, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodRow {
    pub n: u32,
    pub ball_size: Option<u64>,
    /// `π(n) = 2^pi_exponent`.
    pub pi_exponent: u32,
    pub witness: Word,
    pub mode: PiMode,
}

impl PeriodRow {
    pub fn pi(&self) -> num_bigint::BigUint {
        num_bigint::BigUint::from(1u32) << self.pi_exponent
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self.mode, PiMode::Sampled { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodTable {
    pub spec: GroupSpec,
    pub level: u64,
    pub kind: GenKind,
    pub rows: Vec<PeriodRow>,
}

impl PeriodTable {
    /// `n,ball_size,pi,witness_json` with one row per radius.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,ball_size,pi,witness_json\n");
        for r in &self.rows {
            let size = r.ball_size.map(|s| s.to_string()).unwrap_or_default();
            let w = r.witness.to_json_string().replace('"', "\"\"");
            out.push_str(&format!("{},{},{},\"{}\"\n", r.n, size, r.pi(), w));
        }
        out
    }

    pub fn row(&self, n: u32) -> Option<&PeriodRow> {
        self.rows.iter().find(|r| r.n == n)
    }
}

#[derive(Clone, Debug)]
pub struct PeriodOptions {
    /// Largest radius computed by explicit ball enumeration.
    pub ball_radius: u32,
    /// Largest radius computed exactly by the syllable covering (`S` sets only).
    pub covering_radius: u32,
    /// Random words per radius beyond the exact range; 0 stops the table there.
    pub samples: u64,
    pub seed: u64,
    pub fingerprint_depth: u32,
}

impl Default for PeriodOptions {
    fn default() -> Self {
        PeriodOptions {
            ball_radius: 2,
            covering_radius: 4,
            samples: 0,
            seed: 0,
            fingerprint_depth: 4,
        }
    }
}

/// Best `(exponent, witness)` so far; ties keep the earlier witness.
type Best = Option<(u32, Word)>;

fn better(a: Best, b: Best) -> Best {
    match (a, b) {
        (None, b) => b,
        (a, None) => a,
        (Some(a), Some(b)) => Some(if b.0 > a.0 { b } else { a }),
    }
}

fn finite(res: OrderResult, w: &Word) -> Result<u32> {
    match res {
        OrderResult::Finite { exponent } => Ok(exponent),
        OrderResult::ExceededBudget { reason, .. } => Err(Error::Invalid(format!(
            "order of {w} not determined: {reason}"
        ))),
    }
}

/// Per syllable length `m ≤ max_len`, the largest order among covering words
/// of exactly that length, with the first witness reached.
pub fn covering_orders(engine: &Engine, cover: &SyllableCover) -> Result<Vec<Best>> {
    let roots = cover.roots();
    let m_max = cover.max_len as usize;
    let per_root: Vec<Vec<Best>> = roots
        .par_iter()
        .map_init(
            || OrderComputer::new(engine),
            |oc, root| -> Result<Vec<Best>> {
                let mut best: Vec<Best> = vec![None; m_max + 1];
                let mut err = None;
                cover.visit(root, &mut |seq, c| {
                    if err.is_some() || !cover.is_orbit_representative(seq, c) {
                        return;
                    }
                    let m = seq.len() + usize::from(c != 0);
                    let w = cover.word(seq, c);
                    match finite(oc.order(&w), &w) {
                        Ok(e) => {
                            if best[m].as_ref().is_none_or(|b| e > b.0) {
                                best[m] = Some((e, w));
                            }
                        }
                        Err(e) => err = Some(e),
                    }
                });
                oc.trim(1 << 20);
                match err {
                    Some(e) => Err(e),
                    None => Ok(best),
                }
            },
        )
        .collect::<Result<Vec<_>>>()?;
    let mut out: Vec<Best> = vec![None; m_max + 1];
    for r in per_root {
        for (m, b) in r.into_iter().enumerate() {
            out[m] = better(out[m].take(), b);
        }
    }
    Ok(out)
}

/// Random word of syllable length exactly `n` (for `n ≥ 1`).
fn random_syllable_word(spec: GroupSpec, level: u64, rank: u64, n: u32, rng: &mut ChaCha8Rng) -> Word {
    let a = 1u64 << rank;
    let with_total = rng.gen_bool(0.5);
    let k = if with_total { n - 1 } else { n };
    let mut seq: Vec<u64> = Vec::with_capacity(k as usize);
    for _ in 0..k {
        loop {
            let p = rng.gen_range(0..a);
            if seq.last() != Some(&p) {
                seq.push(p);
                break;
            }
        }
    }
    let c = if with_total { rng.gen_range(1..a) } else { 0 };
    let syl = Syllables {
        prefixes: seq.iter().map(|&p| F2Vector::from_bits(p, rank)).collect(),
        total: F2Vector::from_bits(c, rank),
    };
    Word::from_syllables(spec, level, &syl)
}

/// Period growth `π(n) = max{ord(g) : |g| ≤ n}` for `n = 0..=n_max`.
///
/// Radii up to `ball_radius` come from explicit balls (with ball sizes),
/// radii up to `covering_radius` from the syllable covering (`S` sets), and
/// further radii from seeded random sampling when `samples > 0`.
pub fn period_growth(
    engine: &Engine,
    spec: GroupSpec,
    level: u64,
    kind: GenKind,
    n_max: u32,
    opts: &PeriodOptions,
) -> Result<PeriodTable> {
    let mut rows: Vec<PeriodRow> = Vec::new();
    let ball_n = opts.ball_radius.min(n_max);
    let ball = ball_enumerate(engine, spec, level, kind, ball_n, opts.fingerprint_depth)?;
    let orders: Vec<u32> = ball
        .entries()
        .par_iter()
        .map_init(
            || OrderComputer::new(engine),
            |oc, e| finite(oc.order(&e.word), &e.word),
        )
        .collect::<Result<Vec<_>>>()?;
    let canonical = ball.canonical();
    let index: std::collections::HashMap<&[crate::engine::Letter], usize> = ball
        .entries()
        .iter()
        .enumerate()
        .map(|(i, e)| (e.word.letters(), i))
        .collect();
    for n in 0..=ball_n {
        let mut best: Best = None;
        let mut size = 0u64;
        for e in canonical.iter().filter(|e| e.length <= n) {
            size += 1;
            let ord = orders[index[e.word.letters()]];
            best = better(best, Some((ord, e.word.clone())));
        }
        let (pi_exponent, witness) = best.expect("ball contains the identity");
        rows.push(PeriodRow {
            n,
            ball_size: Some(size),
            pi_exponent,
            witness,
            mode: PiMode::Ball,
        });
    }
    let mut last: Best = rows.last().map(|r| (r.pi_exponent, r.witness.clone()));
    if n_max > ball_n && kind == GenKind::S && opts.covering_radius > ball_n {
        let cov_n = opts.covering_radius.min(n_max);
        let cover = SyllableCover::new(spec, level, cov_n, true)?.with_orbit_reduction();
        let per_len = covering_orders(engine, &cover)?;
        let mut acc: Best = None;
        for (m, b) in per_len.into_iter().enumerate() {
            acc = better(acc, b);
            if m as u32 > ball_n {
                let (pi_exponent, witness) = acc.clone().expect("covering contains the identity");
                rows.push(PeriodRow {
                    n: m as u32,
                    ball_size: None,
                    pi_exponent,
                    witness,
                    mode: PiMode::Covering,
                });
            }
        }
        last = acc;
    }
    let done = rows.last().map_or(0, |r| r.n);
    if n_max > done && opts.samples > 0 && kind == GenKind::S {
        let rank = spec
            .rank(level)
            .as_u64()
            .filter(|r| *r <= 16)
            .ok_or_else(|| Error::budget("sampling rank", 16u64))?;
        for n in done + 1..=n_max {
            let seed = opts.seed ^ (u64::from(n) << 32);
            let words: Vec<Word> = {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..opts.samples)
                    .map(|_| random_syllable_word(spec, level, rank, n, &mut rng))
                    .collect()
            };
            let orders: Vec<u32> = words
                .par_iter()
                .map_init(|| OrderComputer::new(engine), |oc, w| finite(oc.order(w), w))
                .collect::<Result<Vec<_>>>()?;
            let mut best: Best = None;
            for (w, e) in words.into_iter().zip(orders) {
                best = better(best, Some((e, w)));
            }
            last = better(last, best);
            let (pi_exponent, witness) = last.clone().expect("non-empty sample");
            rows.push(PeriodRow {
                n,
                ball_size: None,
                pi_exponent,
                witness,
                mode: PiMode::Sampled {
                    samples: opts.samples,
                    seed,
                },
            });
        }
    }
    Ok(PeriodTable {
        spec,
        level,
        kind,
        rows,
    })
}
