use std::collections::{HashSet, VecDeque};
use std::time::Instant;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde_json::json;

use super::support::{layer_sections, sweep, LengthOracle, Verdict};
use super::{CheckMode, CheckReport, Counterexample};
use crate::arith::{f_value, tetr, FValue, TowerInt};
use crate::engine::{Engine, VertexPath, Word};
use crate::error::{Error, Result};
use crate::families::{make_generators, GenKind, GroupSpec};
use crate::order::ball_enumerate;
use crate::order::period::SyllableCover;

/// Size cap for balls built to decide section lengths.
const BALL_CAP: usize = 400_000;

fn ceil_div(a: u64, b: u64) -> u64 {
    a.div_ceil(b)
}

/// For every `g` with `‖g‖ ≤ radius` in `K_r` and every second-layer vertex
/// `u`: `‖g|_u‖ ≤ ⌈‖g‖ / r⌉`, all lengths with respect to the `S` set.
///
/// For `radius ≤ r` the right side is 1 for every `g ≠ 1`, and the elements
/// are covered up to conjugation by syllable words. Larger radii use the
/// explicit ball.
pub fn check_two_layer_reduction(engine: &Engine, r: u64, radius: u32) -> Result<CheckReport> {
    let started = Instant::now();
    let spec = GroupSpec::kr(r)?;
    let mut rep = CheckReport::new(
        "check_two_layer_reduction",
        json!({"spec": spec, "level": 0, "radius": radius}),
    );
    let oracle = LengthOracle::new(engine, GenKind::S, BALL_CAP);
    let fail = |g: &Word, path: Vec<_>, bound: u32| -> Result<Counterexample> {
        Ok(Counterexample::SectionLength {
            word: g.clone(),
            power: 1,
            vertex: VertexPath::new(spec, 0, path)?,
            gens: GenKind::S,
            bound,
        })
    };
    if u64::from(radius) <= r {
        let cover = SyllableCover::new(spec, 0, radius, false)?;
        let tally = sweep(&cover, |g, t| {
            // any non-trivial section shows g ≠ 1, so the bound is 1
            for (path, sec) in layer_sections(engine, g, 2)? {
                t.instances += 1;
                match oracle.at_most(&sec, 1)? {
                    Verdict::Holds => {}
                    Verdict::Unknown => t.unknown += 1,
                    Verdict::Fails => {
                        t.counterexample = Some(fail(g, path, 1)?);
                        return Ok(());
                    }
                }
            }
            Ok(())
        })?;
        rep.instances = tally.instances;
        rep.notes.push(format!(
            "{} syllable words cover the ball up to rooted conjugation and coordinate permutations",
            cover.count()
        ));
        if tally.unknown > 0 {
            rep.mode = CheckMode::Representative;
            rep.notes.push(format!("{} instances undecided", tally.unknown));
        }
        if let Some(c) = tally.counterexample {
            rep.fail(c);
        }
    } else {
        let ball = ball_enumerate(engine, spec, 0, GenKind::S, radius, 4)?;
        for e in ball.entries() {
            let bound = ceil_div(u64::from(e.length), r) as u32;
            for (path, sec) in layer_sections(engine, &e.word, 2)? {
                rep.instances += 1;
                match oracle.at_most(&sec, bound)? {
                    Verdict::Holds => {}
                    Verdict::Unknown => rep.mode = CheckMode::Representative,
                    Verdict::Fails => rep.fail(fail(&e.word, path, bound)?),
                }
            }
        }
        rep.notes.push(format!("explicit ball of {} elements", ball.len()));
    }
    Ok(rep.finish(started))
}

/// The three length reductions of the growing group at level 0, for every
/// `g` with `‖g‖ ≤ radius`:
/// second-layer sections shrink by `f(0)`, first-layer sections of `g²` grow
/// by at most one, third-layer sections of `g⁸` are at most `⌈4‖g‖/f(0)⌉ + 1`.
pub fn check_growing_reduction(engine: &Engine, f0: u64, radius: u32) -> Result<CheckReport> {
    let started = Instant::now();
    let spec = GroupSpec::growing(f0, 0)?;
    let mut rep = CheckReport::new(
        "check_growing_reduction",
        json!({"spec": spec, "level": 0, "radius": radius}),
    );
    let oracle = LengthOracle::new(engine, GenKind::S, BALL_CAP);
    let cover = SyllableCover::new(spec, 0, radius, true)?;
    let letters = engine.budgets.word_letters;
    let tally = sweep(&cover, |g, t| {
        let Some(len) = oracle.exact(g, radius)? else {
            t.unknown += 1;
            return Ok(());
        };
        let len = u64::from(len);
        let cases: [(u32, u32, u64); 3] = [
            (1, 2, ceil_div(len, f0)),
            (2, 1, len + 1),
            (8, 3, ceil_div(4 * len, f0) + 1),
        ];
        for (power, depth, bound) in cases {
            let p = g.pow(u64::from(power), letters)?;
            for (path, sec) in layer_sections(engine, &p, depth)? {
                t.instances += 1;
                match oracle.at_most(&sec, bound as u32)? {
                    Verdict::Holds => {}
                    Verdict::Unknown => t.unknown += 1,
                    Verdict::Fails => {
                        t.counterexample = Some(Counterexample::SectionLength {
                            word: g.clone(),
                            power,
                            vertex: VertexPath::new(spec, 0, path)?,
                            gens: GenKind::S,
                            bound: bound as u32,
                        });
                        return Ok(());
                    }
                }
            }
        }
        Ok(())
    })?;
    rep.instances = tally.instances;
    rep.notes.push(format!("{} syllable words up to rooted conjugation", cover.count()));
    if tally.unknown > 0 {
        rep.mode = CheckMode::Representative;
        rep.notes.push(format!("{} instances undecided", tally.unknown));
    }
    if let Some(c) = tally.counterexample {
        rep.fail(c);
    }
    Ok(rep.finish(started))
}

/// `f(0) f(1) f(2) > 2^10`, and every depth-10 section of every `g` with
/// `‖g‖ ≤ max_len` at level 0 has length at most 1, the bound obtained by
/// applying the two-layer reduction three times.
pub fn check_2667(engine: &Engine, f0: u64, max_len: u32) -> Result<CheckReport> {
    let started = Instant::now();
    let spec = GroupSpec::growing(f0, 0)?;
    let mut rep = CheckReport::new("check_2667", json!({"spec": spec, "level": 0, "max_len": max_len}));
    let statement = format!("f({f0},0)*f({f0},1)*f({f0},2) > 1024");
    rep.instances += 1;
    if !arithmetic_holds(&statement)? {
        rep.fail(Counterexample::Arithmetic { statement });
    }
    let product: u64 = (0..3).map(|k| f_exact(f0, k).and_then(|v| v.to_u64()).unwrap_or(u64::MAX)).product();
    rep.notes.push(format!("f(0)·f(1)·f(2) = {product}"));
    let chained = (1..=u64::from(max_len))
        .map(|l| (0..3).fold(l, |acc, k| ceil_div(acc, f_exact(f0, k).and_then(|v| v.to_u64()).unwrap_or(u64::MAX))))
        .max()
        .unwrap_or(0);
    let cover = SyllableCover::new(spec, 0, max_len, false)?;
    let tally = sweep(&cover, |g, t| {
        for (path, sec) in layer_sections(engine, g, 10)? {
            t.instances += 1;
            if sec.syllable_length_upper() as u64 > chained {
                t.counterexample = Some(Counterexample::SectionLength {
                    word: g.clone(),
                    power: 1,
                    vertex: VertexPath::new(spec, 0, path)?,
                    gens: GenKind::S,
                    bound: chained as u32,
                });
                return Ok(());
            }
        }
        Ok(())
    })?;
    rep.instances += tally.instances;
    rep.notes.push(format!("chained bound {chained}; {} syllable words", cover.count()));
    if let Some(c) = tally.counterexample {
        // syllable counts only bound the length from above
        rep.mode = CheckMode::Representative;
        rep.fail(c);
    }
    Ok(rep.finish(started))
}

fn f_exact(f0: u64, k: u64) -> Option<BigUint> {
    f_value(f0, k).exact().cloned()
}

/// `f(k) ≥ tetr_2(k)` and `f(k) - 1 ≥ tetr_2(k)` for `f(0) = 3`: exactly for
/// `k ≤ 3`, through tower bounds for `k ≤ 6`.
pub fn check_tetration() -> CheckReport {
    let started = Instant::now();
    let mut rep = CheckReport::new("check_tetration", json!({"f0": 3, "k_max": 6}));
    for k in 0..=6u64 {
        for s in [format!("f(3,{k}) >= tetr(2,{k})"), format!("f(3,{k}) - 1 >= tetr(2,{k})")] {
            rep.instances += 1;
            match arithmetic_holds(&s) {
                Ok(true) => {}
                _ => rep.fail(Counterexample::Arithmetic { statement: s }),
            }
        }
    }
    rep.notes.push("k ≤ 3 exact, 4 ≤ k ≤ 6 by tower lower bounds".into());
    rep.finish(started)
}

fn parse_call(s: &str, name: &str) -> Result<Vec<u64>> {
    let inner = s
        .trim()
        .strip_prefix(name)
        .and_then(|r| r.strip_prefix('('))
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| Error::Parse(format!("expected {name}(…) in {s:?}")))?;
    inner
        .split(',')
        .map(|a| a.trim().parse::<u64>().map_err(|e| Error::Parse(e.to_string())))
        .collect()
}

fn f_lower(f0: u64, k: u64, minus_one: bool) -> TowerInt {
    match f_value(f0, k) {
        FValue::Exact(v) => TowerInt::Exact(if minus_one { v - 1u32 } else { v }),
        // the lower tower already bounds f(k) - 1
        FValue::Bounded { lower, .. } => lower,
    }
}

/// Evaluates the arithmetic statements emitted by the checks:
/// `f(a,k) >= tetr(b,k)`, `f(a,k) - 1 >= tetr(b,k)` and
/// `f(a,0)*f(a,1)*f(a,2) > N`.
pub(crate) fn arithmetic_holds(statement: &str) -> Result<bool> {
    if let Some((lhs, rhs)) = statement.split_once(">=") {
        let t = parse_call(rhs, "tetr")?;
        let (lhs, minus) = match lhs.trim().strip_suffix("- 1") {
            Some(l) => (l, true),
            None => (lhs, false),
        };
        let f = parse_call(lhs, "f")?;
        if f.len() != 2 || t.len() != 2 {
            return Err(Error::Parse(statement.into()));
        }
        return Ok(f_lower(f[0], f[1], minus) >= tetr(t[0] as u32, t[1]));
    }
    if let Some((lhs, rhs)) = statement.split_once('>') {
        let bound: BigUint = rhs.trim().parse().map_err(|_| Error::Parse(statement.into()))?;
        let mut product = BigUint::from(1u32);
        for factor in lhs.split('*') {
            let a = parse_call(factor, "f")?;
            if a.len() != 2 {
                return Err(Error::Parse(statement.into()));
            }
            product *= f_exact(a[0], a[1]).ok_or_else(|| Error::budget("bits", 1u64 << 20))?;
        }
        return Ok(product > bound);
    }
    Err(Error::Parse(format!("unknown statement {statement:?}")))
}

/// Number of vertices on layer `layer` below `level`, if it fits a `u64`.
fn layer_size(spec: GroupSpec, level: u64, layer: u32) -> Option<u64> {
    (0..u64::from(layer)).try_fold(1u64, |acc, i| {
        let r = spec.rank(level + i).as_u64().filter(|r| *r < 64)?;
        acc.checked_mul(1u64 << r)
    })
}

/// Size of the orbit of the all-zero vertex of the given layer under the
/// `E` generators.
pub(crate) fn orbit_size(engine: &Engine, spec: GroupSpec, level: u64, layer: u32) -> Result<u64> {
    let limit = engine.budgets.ball as u64;
    match layer_size(spec, level, layer) {
        Some(n) if n <= limit => {}
        _ => return Err(Error::budget("ball", limit)),
    }
    let gens = make_generators(&spec, level, GenKind::E, engine.budgets.ball)?.members;
    let start = VertexPath::new(spec, level, vec![crate::arith::F2Vector::zero(); layer as usize])?;
    let mut seen: HashSet<Vec<crate::arith::F2Vector>> = HashSet::new();
    seen.insert(start.letters.clone());
    let mut queue = VecDeque::from([start]);
    while let Some(v) = queue.pop_front() {
        for g in &gens {
            let u = engine.act(g, &v)?;
            if seen.insert(u.letters.clone()) {
                queue.push_back(u);
            }
        }
    }
    Ok(seen.len() as u64)
}

/// The group acts transitively on each layer up to `max_layer` that can be enumerated.
pub fn check_transitivity(engine: &Engine, spec: GroupSpec, max_layer: u32) -> Result<CheckReport> {
    let started = Instant::now();
    spec.validate()?;
    let mut rep = CheckReport::new("check_transitivity", json!({"spec": spec, "level": 0, "max_layer": max_layer}));
    for layer in 0..=max_layer {
        let Some(size) = layer_size(spec, 0, layer).filter(|n| *n <= engine.budgets.ball as u64) else {
            rep.notes.push(format!("layer {layer} too large to enumerate"));
            break;
        };
        let orbit = orbit_size(engine, spec, 0, layer)?;
        rep.instances += 1;
        rep.notes.push(format!("layer {layer}: orbit {orbit} of {size}"));
        if orbit != size {
            rep.fail(Counterexample::Orbit {
                spec,
                level: 0,
                layer,
                orbit,
                layer_size: size,
            });
        }
    }
    Ok(rep.finish(started))
}
