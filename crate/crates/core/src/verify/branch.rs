use std::collections::BTreeSet;
use std::time::Instant;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde_json::json;

use super::support::{comm, comm_chain, decide};
use super::{CheckMode, CheckReport, Counterexample};
use crate::arith::{F2Vector, Ix};
use crate::engine::{Coverage, Engine, VertexPath, Word};
use crate::error::{Error, Result};
use crate::families::{enumeration_vector, underline_generator, GroupSpec, RuleKind};

/// Compares every first-layer section of `w` with `expected`, where vertices
/// not listed must carry trivial sections.
fn check_table(engine: &Engine, w: &Word, expected: &[(F2Vector, Word)]) -> Result<(u64, Option<Counterexample>)> {
    let rank = w.rank().clone();
    let mismatch = |x: &F2Vector, e: &Word| -> Result<Counterexample> {
        Ok(Counterexample::SectionMismatch {
            word: w.clone(),
            vertex: VertexPath::new(*w.spec(), w.level(), vec![x.clone()])?,
            expected: e.clone(),
        })
    };
    let mut listed = BTreeSet::new();
    let mut n = 0;
    for (x, e) in expected {
        let x = x.clone().normalized(&rank);
        n += 1;
        let s = engine.section_first(w, &x)?;
        if !decide(engine, engine.equal(&s, e))? {
            return Ok((n, Some(mismatch(&x, e)?)));
        }
        listed.insert(x);
    }
    let id = Word::identity(*w.spec(), w.level() + 1);
    for x in engine.active_set(w, Coverage::Compressed)?.representatives() {
        if listed.contains(x) {
            continue;
        }
        n += 1;
        let s = engine.section_first(w, x)?;
        if !decide(engine, engine.is_trivial(&s))? {
            return Ok((n, Some(mismatch(x, &id)?)));
        }
    }
    Ok((n, None))
}

/// Accumulates `(instances, counterexample)` results in input order.
fn absorb(rep: &mut CheckReport, parts: Vec<(u64, Option<Counterexample>)>) {
    for (n, c) in parts {
        rep.instances += n;
        if let Some(c) = c {
            rep.fail(c);
        }
    }
}

fn rooted(spec: GroupSpec, level: u64, v: F2Vector) -> Word {
    Word::rooted(spec, level, v)
}

fn basis(i: u64) -> F2Vector {
    F2Vector::basis(i)
}

fn pair(i: u64, j: u64) -> F2Vector {
    F2Vector::sparse([i.min(j), i.max(j)])
}

/// Section tables of `c_{i,j} = [b, e_i, e_j]` and of the commutators built
/// from them in `K_r`, for all admissible index tuples:
///
/// * `c_{i,j}` has section `b` on `{1, e_i, e_j, e_ie_j}`, `e_t` on
///   `ē_t·{1, e_i, e_j, e_ie_j}`, `e_ie_j` on `ē·{1, e_i, e_j, e_ie_j}`;
/// * `[c_{i,j}, c_{m,n}^{ē_k}]` has sections `[b, e_k]` at 1, `[e_k, b]` at `ē_k`;
/// * `[c_{i,j}, c_{m,n}^{ē_k}, c_{i,j}^{ē_l}]` has the single non-trivial
///   section `[b, e_k, e_l]` at 1;
///
/// and trivial sections elsewhere.
pub fn check_commutator_sections(engine: &Engine, r: u64) -> Result<CheckReport> {
    let started = Instant::now();
    if r < 6 {
        return Err(Error::Invalid("the tables need r ≥ 6".into()));
    }
    let spec = GroupSpec::kr(r)?;
    let mut rep = CheckReport::new("check_commutator_sections", json!({"spec": spec, "level": 0}));
    let b = Word::directed(spec, 0);
    let b1 = Word::directed(spec, 1);
    let e = |i: u64| rooted(spec, 0, basis(i));
    let e1 = |i: u64| rooted(spec, 1, basis(i));
    let bar = |i: u64| rooted(spec, 0, F2Vector::bar_basis(i));
    let c = |i: u64, j: u64| comm_chain(&[b.clone(), e(i), e(j)]);

    let pairs: Vec<(u64, u64)> = (0..r).flat_map(|i| (0..r).filter(move |&j| j != i).map(move |j| (i, j))).collect();
    let parts = pairs
        .par_iter()
        .map(|&(i, j)| {
            let quad = [F2Vector::zero(), basis(i), basis(j), pair(i, j)];
            let mut expected: Vec<(F2Vector, Word)> = quad.iter().map(|x| (x.clone(), b1.clone())).collect();
            for t in (0..r).filter(|t| *t != i && *t != j) {
                for q in &quad {
                    expected.push((q.add(&F2Vector::bar_basis(t)), e1(t)));
                }
            }
            for q in &quad {
                expected.push((q.translate_bar(), rooted(spec, 1, pair(i, j))));
            }
            check_table(engine, &c(i, j), &expected)
        })
        .collect::<Result<Vec<_>>>()?;
    absorb(&mut rep, parts);

    let mut tuples = Vec::new();
    for (i, j) in pairs.iter().copied() {
        for k in 0..r {
            for m in 0..r {
                for n in 0..r {
                    let t = [i, j, k, m, n];
                    if (0..5).all(|a| (a + 1..5).all(|z| t[a] != t[z])) {
                        tuples.push(t);
                    }
                }
            }
        }
    }
    let parts = tuples
        .par_iter()
        .map(|&[i, j, k, m, n]| -> Result<(u64, Option<Counterexample>)> {
            let inner = comm(&c(i, j), &c(m, n).conj(&bar(k)));
            let expected = vec![
                (F2Vector::zero(), comm(&b1, &e1(k))),
                (F2Vector::bar_basis(k), comm(&e1(k), &b1)),
            ];
            let (mut count, found) = check_table(engine, &inner, &expected)?;
            if found.is_some() {
                return Ok((count, found));
            }
            for l in (0..r).filter(|l| ![i, j, k].contains(l)) {
                let triple = comm(&inner, &c(i, j).conj(&bar(l)));
                let expected = vec![(F2Vector::zero(), comm_chain(&[b1.clone(), e1(k), e1(l)]))];
                let (n2, found) = check_table(engine, &triple, &expected)?;
                count += n2;
                if found.is_some() {
                    return Ok((count, found));
                }
            }
            Ok((count, None))
        })
        .collect::<Result<Vec<_>>>()?;
    absorb(&mut rep, parts);
    rep.notes.push(format!(
        "{} pairs, {} five-index tuples with every admissible l",
        pairs.len(),
        tuples.len()
    ));
    Ok(rep.finish(started))
}

#[derive(Clone, Debug)]
pub struct WeaklyBranchOptions {
    /// Conjugating indices `s` swept for each `(a_1, a_2)`; `None` sweeps all.
    pub conjugators: Option<u64>,
    /// Indices checked at the index-rule level from each end of the range.
    pub index_samples: u64,
    /// Triples `(i, j, l)` for the index-level commutator identity range over `[0, triple_range)`.
    pub triple_range: u64,
}

impl Default for WeaklyBranchOptions {
    fn default() -> Self {
        WeaklyBranchOptions {
            conjugators: None,
            index_samples: 4096,
            triple_range: 16,
        }
    }
}

fn rank_u64(spec: &GroupSpec, level: u64) -> Result<u64> {
    spec.rank(level)
        .as_u64()
        .filter(|r| *r <= 4096)
        .ok_or_else(|| Error::budget("rank", 4096u64))
}

/// Generators of the branching subgroups are non-trivial and the directed
/// generator's sections realize the next level's generators. For growing
/// groups also the section tables of `[[d, a_1], [d, a_2]^{ē_s}]` at a
/// bar level and of `c_{i,j}`, `[c_{i,j}, c_{i,l}]^{ĝ}` at the index level.
pub fn check_weakly_branch_generators(engine: &Engine, spec: GroupSpec, opts: &WeaklyBranchOptions) -> Result<CheckReport> {
    let started = Instant::now();
    spec.validate()?;
    if spec.rule_kind(0) != RuleKind::Bar || spec.rule_kind(1) != RuleKind::Bar {
        return Err(Error::Invalid("level 0 must start a pair of bar-rule levels".into()));
    }
    let r = rank_u64(&spec, 0)?;
    if r < 6 {
        return Err(Error::Invalid("needs rank ≥ 6 at level 0".into()));
    }
    let mut rep = CheckReport::new("check_weakly_branch_generators", json!({"spec": spec, "level": 0}));
    let d = Word::directed(spec, 0);
    let e = |i: u64| rooted(spec, 0, basis(i));

    // normal generators of N
    let pairs: Vec<(u64, u64)> = (0..r).flat_map(|i| (0..r).filter(move |&j| j != i).map(move |j| (i, j))).collect();
    let parts = pairs
        .par_iter()
        .map(|&(i, j)| -> Result<(u64, Option<Counterexample>)> {
            let w = comm_chain(&[d.clone(), e(i), e(j)]);
            Ok(match decide(engine, engine.is_trivial(&w))? {
                true => (1, Some(Counterexample::Trivial { word: w })),
                false => (1, None),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    absorb(&mut rep, parts);
    rep.notes.push(format!("[d, e_i, e_j] non-trivial for {} pairs", pairs.len()));

    // sections of d at the two bar levels
    for level in 0..2 {
        let rl = rank_u64(&spec, level)?;
        let dl = Word::directed(spec, level);
        let mut expected = vec![(F2Vector::zero(), Word::directed(spec, level + 1))];
        for i in 0..rl {
            expected.push((F2Vector::bar_basis(i), rooted(spec, level + 1, basis(i))));
        }
        let (n, c) = check_table(engine, &dl, &expected)?;
        rep.instances += n;
        if let Some(c) = c {
            rep.fail(c);
        }
    }
    rep.notes.push("sections of d at both bar levels realize every next-level generator".into());

    if spec.rule_kind(2) == RuleKind::Index {
        index_level_realization(engine, spec, opts, &mut rep)?;
        index_level_identities(engine, spec, opts, &mut rep)?;
    }
    if let Some(q) = (1..=12u64).find(|q| (1u64 << q) - 1 == r) {
        if q >= 6 {
            m_generators(engine, spec, q, opts, &mut rep)?;
        }
    } else {
        rep.notes.push(format!("rank {r} is not 2^q - 1; the M generators are skipped"));
    }
    Ok(rep.finish(started))
}

/// `d|_x = e_t` at the index level for `x` enumerating `t`, for the first and
/// last `index_samples` indices.
fn index_level_realization(engine: &Engine, spec: GroupSpec, opts: &WeaklyBranchOptions, rep: &mut CheckReport) -> Result<()> {
    let level = 2;
    let d = Word::directed(spec, level);
    let Some(top) = spec.rank(level + 1).exact() else {
        rep.notes.push("index level: next rank not exact, realization skipped".into());
        return Ok(());
    };
    let k = BigUint::from(opts.index_samples);
    let mut indices: Vec<BigUint> = Vec::new();
    let mut t = BigUint::from(0u32);
    while t < k && t < top {
        indices.push(t.clone());
        t += 1u32;
    }
    let low_end = t;
    let start = if top > &low_end + &k { &top - &k } else { low_end };
    let mut t = start;
    while t < top {
        indices.push(t.clone());
        t += 1u32;
    }
    let rank = spec.rank(level);
    let parts = indices
        .par_iter()
        .map(|t| -> Result<(u64, Option<Counterexample>)> {
            let x = if *t == BigUint::from(0u32) {
                F2Vector::all_ones()
            } else {
                enumeration_vector(t, &rank)?
            };
            let want = rooted(spec, level + 1, F2Vector::basis(Ix::from_big(t.clone())));
            let s = engine.section_first(&d, &x)?;
            if decide(engine, engine.equal(&s, &want))? {
                Ok((1, None))
            } else {
                Ok((
                    1,
                    Some(Counterexample::SectionMismatch {
                        word: d.clone(),
                        vertex: VertexPath::new(spec, level, vec![x])?,
                        expected: want,
                    }),
                ))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    rep.notes.push(format!(
        "index level: d|_x = e_t for {} of {} indices t (both ends of the range)",
        indices.len(),
        top
    ));
    absorb(rep, parts);
    Ok(())
}

/// At the index level (rank `R`, next rank `2^R - 1`), with `U_S = d|_{e_S}`:
/// `c_{i,j}|_1 = [d, e_i, e_j]|_1 = d' U_i U_j U_ij` and only `1, e_i, e_j, e_ie_j`
/// carry non-rooted sections; `[c_{i,j}, c_{i,l}]^{ĝ}|_1 = [d', U_j U_l U_ij U_il]`
/// for `ĝ = d^{e_i} d^{e_j} d^{e_ie_j}`, trivial outside `1, e_i, e_j, e_l, e_ie_j, e_ie_l`.
fn index_level_identities(engine: &Engine, spec: GroupSpec, opts: &WeaklyBranchOptions, rep: &mut CheckReport) -> Result<()> {
    let level = 2;
    let r = rank_u64(&spec, level)?;
    let d = Word::directed(spec, level);
    let d1 = Word::directed(spec, level + 1);
    let e = |i: u64| rooted(spec, level, basis(i));
    let bits = engine.budgets.bits;
    let u = |s: &[u64]| -> Result<F2Vector> { underline_generator(&spec, level, &F2Vector::sparse(s.iter().copied()), bits) };
    let dc = |a: F2Vector| Word::directed_conjugate(spec, level, a);
    let c = |i: u64, j: u64| comm_chain(&[d.clone(), e(i), e(j)]);

    let pairs: Vec<(u64, u64)> = (0..r).flat_map(|i| (0..r).filter(move |&j| j != i).map(move |j| (i, j))).collect();
    let parts = pairs
        .par_iter()
        .map(|&(i, j)| -> Result<(u64, Option<Counterexample>)> {
            let w = c(i, j);
            let u_sum = u(&[i])?.add(&u(&[j])?).add(&u(&[i, j])?);
            let want = d1.mul(&rooted(spec, level + 1, u_sum));
            let zero = F2Vector::zero();
            let s = engine.section_first(&w, &zero)?;
            let mismatch = |x: F2Vector, expected: Word| -> Result<Counterexample> {
                Ok(Counterexample::SectionMismatch {
                    word: w.clone(),
                    vertex: VertexPath::new(spec, level, vec![x])?,
                    expected,
                })
            };
            if !decide(engine, engine.equal(&s, &want))? {
                return Ok((1, Some(mismatch(zero, want)?)));
            }
            let special = [F2Vector::zero(), basis(i), basis(j), pair(i, j)];
            let mut n = 1;
            for x in engine.active_set(&w, Coverage::Compressed)?.representatives() {
                if special.contains(x) {
                    continue;
                }
                n += 1;
                if engine.section_first(&w, x)?.directed_count() != 0 {
                    let id = Word::identity(spec, level + 1);
                    return Ok((n, Some(mismatch(x.clone(), id)?)));
                }
            }
            Ok((n, None))
        })
        .collect::<Result<Vec<_>>>()?;
    absorb(rep, parts);

    let m = opts.triple_range.min(r);
    let mut triples = Vec::new();
    for i in 0..m {
        for j in 0..m {
            for l in 0..m {
                if i != j && i != l && j != l {
                    triples.push((i, j, l));
                }
            }
        }
    }
    let parts = triples
        .par_iter()
        .map(|&(i, j, l)| -> Result<(u64, Option<Counterexample>)> {
            let g0 = dc(basis(i)).mul(&dc(basis(j))).mul(&dc(pair(i, j)));
            let w = comm(&c(i, j), &c(i, l)).conj(&g0);
            let gamma = u(&[j])?.add(&u(&[l])?).add(&u(&[i, j])?).add(&u(&[i, l])?);
            let want = comm(&d1, &rooted(spec, level + 1, gamma));
            let zero = F2Vector::zero();
            let mut expected = vec![(zero.clone(), want)];
            // the remaining possibly non-trivial vertices are compared with themselves
            for x in [basis(i), basis(j), basis(l), pair(i, j), pair(i, l)] {
                let s = engine.section_first(&w, &x)?;
                expected.push((x, s));
            }
            check_table(engine, &w, &expected)
        })
        .collect::<Result<Vec<_>>>()?;
    absorb(rep, parts);
    rep.notes.push(format!(
        "index level: c_ij table for {} pairs, conjugated commutator identity for {} triples below {m}",
        pairs.len(),
        triples.len()
    ));
    Ok(())
}

/// `[[d, a_1], [d, a_2]^{ē_s}]` has sections `[d', e_s]` at 1 and `[e_s, d']` at
/// `ē_s` and no others, and is non-trivial, where
/// `a_1 = U_j U_ij U_l U_il`, `a_2 = U_n U_mn U_s' U_ms'` for pairwise distinct
/// indices below `q` and `U_S` the basis letter of index `Σ_{t ∈ S} 2^t mod (2^q - 1)`.
fn m_generators(engine: &Engine, spec: GroupSpec, q: u64, opts: &WeaklyBranchOptions, rep: &mut CheckReport) -> Result<()> {
    let r = rank_u64(&spec, 0)?;
    let source = GroupSpec::growing(q, 2)?;
    let bits = engine.budgets.bits;
    let u = |s: &[u64]| -> Result<F2Vector> { underline_generator(&source, 0, &F2Vector::sparse(s.iter().copied()), bits) };
    let d = Word::directed(spec, 0);
    let d1 = Word::directed(spec, 1);
    let mut tuples = Vec::new();
    for i in 0..q {
        for j in 0..q {
            for l in j + 1..q {
                for m in 0..q {
                    for n in 0..q {
                        for s in n + 1..q {
                            let t = [i, j, l, m, n, s];
                            if (0..6).all(|a| (a + 1..6).all(|z| t[a] != t[z])) {
                                tuples.push(t);
                            }
                        }
                    }
                }
            }
        }
    }
    let conj: Vec<u64> = match opts.conjugators {
        None => (0..r).collect(),
        Some(k) => (0..k.min(r)).collect(),
    };
    if (conj.len() as u64) < r {
        rep.mode = CheckMode::Sampled;
    }
    let parts = tuples
        .par_iter()
        .map(|&[i, j, l, m, n, s2]| -> Result<(u64, Option<Counterexample>)> {
            let a1 = u(&[j])?.add(&u(&[i, j])?).add(&u(&[l])?).add(&u(&[i, l])?);
            let a2 = u(&[n])?.add(&u(&[m, n])?).add(&u(&[s2])?).add(&u(&[m, s2])?);
            let x1 = comm(&d, &rooted(spec, 0, a1));
            let x2 = comm(&d, &rooted(spec, 0, a2));
            let mut count = 0;
            for &s in &conj {
                let w = comm(&x1, &x2.conj(&rooted(spec, 0, F2Vector::bar_basis(s))));
                // the conjugator must move a_2 off a_1: with g = 1 the commutator is trivial
                count += 1;
                if decide(engine, engine.is_trivial(&w))? {
                    return Ok((count, Some(Counterexample::Trivial { word: w })));
                }
                let es = rooted(spec, 1, basis(s));
                let expected = vec![
                    (F2Vector::zero(), comm(&d1, &es)),
                    (F2Vector::bar_basis(s), comm(&es, &d1)),
                ];
                let (n, found) = check_table(engine, &w, &expected)?;
                count += n;
                if found.is_some() {
                    return Ok((count, found));
                }
            }
            Ok((count, None))
        })
        .collect::<Result<Vec<_>>>()?;
    absorb(rep, parts);
    rep.notes.push(format!(
        "M generators: {} index tuples below {q}, {} conjugating indices each",
        tuples.len(),
        conj.len()
    ));
    Ok(())
}
