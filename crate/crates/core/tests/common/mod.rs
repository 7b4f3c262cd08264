//! Shared helpers for the integration tests, including a dense oracle that
//! represents group elements as explicit permutations of the leaves of a
//! truncated tree. It shares no code with the engine beyond the word type.

#![allow(dead_code)]

use std::collections::HashMap;

use branchwork::{Budgets, Engine, F2Vector, GroupSpec, Letter, VertexPath, Word};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn engine() -> Engine {
    Engine::new(Budgets::default())
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Rank at `level`, recomputed from the family definition.
pub fn rank_of(spec: GroupSpec, level: u64) -> u64 {
    match spec {
        GroupSpec::Kr { r } => r,
        GroupSpec::Growing { f0, base } => {
            let mut v = f0;
            for _ in 0..(base + level) / 3 {
                assert!(v < 20, "rank too large for the dense oracle");
                v = (1 << v) - 1;
            }
            v
        }
    }
}

fn index_level(spec: GroupSpec, level: u64) -> bool {
    match spec {
        GroupSpec::Kr { .. } => false,
        GroupSpec::Growing { base, .. } => (base + level) % 3 == 2,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Sec {
    Id,
    Dir,
    Rooted(u64),
}

/// The directed generator's section at first-layer vertex `x` (as a bit mask).
fn directed_rule(spec: GroupSpec, level: u64, x: u64) -> Sec {
    let r = rank_of(spec, level);
    let full = (1u64 << r) - 1;
    if x == 0 {
        return Sec::Dir;
    }
    if index_level(spec, level) {
        // a_i ↦ e_{i mod (2^r - 1)}, a_i the binary enumeration
        let next = full;
        return Sec::Rooted(1 << (x % next));
    }
    if r == 1 {
        return Sec::Rooted(1);
    }
    let c = full ^ x;
    if c.count_ones() == 1 {
        Sec::Rooted(c)
    } else {
        Sec::Id
    }
}

/// Leaves of the depth-`depth` subtree hanging at `level`, encoded with the
/// first coordinate most significant.
pub struct Dense {
    pub spec: GroupSpec,
    pub level: u64,
    pub depth: u32,
    radix: Vec<u64>,
    pub size: usize,
    directed: Vec<u32>,
    sub: Option<Box<Dense>>,
}

impl Dense {
    pub fn new(spec: GroupSpec, level: u64, depth: u32) -> Dense {
        assert!(depth >= 1);
        let radix: Vec<u64> = (0..depth as u64).map(|i| 1 << rank_of(spec, level + i)).collect();
        let size = radix.iter().product::<u64>() as usize;
        assert!(size <= 1 << 20);
        let sub = (depth > 1).then(|| Box::new(Dense::new(spec, level + 1, depth - 1)));
        let mut d = Dense {
            spec,
            level,
            depth,
            radix,
            size,
            directed: Vec::new(),
            sub,
        };
        d.directed = d.build_directed();
        d
    }

    fn block(&self) -> usize {
        self.size / self.radix[0] as usize
    }

    fn build_directed(&self) -> Vec<u32> {
        let block = self.block();
        let mut out = vec![0u32; self.size];
        for x in 0..self.radix[0] {
            let base = x as usize * block;
            let inner: Vec<u32> = match (&self.sub, directed_rule(self.spec, self.level, x)) {
                (None, _) | (_, Sec::Id) => (0..block as u32).collect(),
                (Some(s), Sec::Dir) => s.directed.clone(),
                (Some(s), Sec::Rooted(a)) => s.rooted(a),
            };
            for (u, img) in inner.into_iter().enumerate() {
                out[base + u] = (base + img as usize) as u32;
            }
        }
        out
    }

    pub fn identity(&self) -> Vec<u32> {
        (0..self.size as u32).collect()
    }

    /// The rooted element translating the first coordinate by `a`.
    pub fn rooted(&self, a: u64) -> Vec<u32> {
        let block = self.block();
        (0..self.size)
            .map(|i| {
                let x = (i / block) as u64;
                ((x ^ a) as usize * block + i % block) as u32
            })
            .collect()
    }

    pub fn directed(&self) -> Vec<u32> {
        self.directed.clone()
    }

    /// Permutation of a word; letters act on the right, first letter first.
    pub fn word(&self, w: &Word) -> Vec<u32> {
        assert_eq!(w.level(), self.level);
        let r = rank_of(self.spec, self.level);
        let mut p = self.identity();
        for l in w.letters() {
            let q = match l {
                Letter::Rooted(v) => self.rooted(v.to_bits(r).expect("small rank")),
                Letter::Directed => self.directed(),
            };
            p = p.iter().map(|&i| q[i as usize]).collect();
        }
        p
    }

    pub fn encode(&self, coords: &[u64]) -> usize {
        assert_eq!(coords.len(), self.depth as usize);
        coords.iter().zip(&self.radix).fold(0, |acc, (&c, &r)| acc * r as usize + c as usize)
    }

    pub fn decode(&self, mut i: usize) -> Vec<u64> {
        let mut out = vec![0; self.depth as usize];
        for k in (0..self.depth as usize).rev() {
            out[k] = i as u64 % self.radix[k];
            i /= self.radix[k] as usize;
        }
        out
    }

    pub fn ranks(&self) -> Vec<u64> {
        (0..self.depth as u64).map(|i| rank_of(self.spec, self.level + i)).collect()
    }

    /// Permutation induced below the prefix `v` (a vertex of depth `< depth`),
    /// that is, the section at `v` truncated to the remaining depth.
    pub fn induced(&self, perm: &[u32], v: &[u64]) -> Vec<u32> {
        let k = v.len();
        let below: usize = self.radix[k..].iter().product::<u64>() as usize;
        let start = v.iter().zip(&self.radix).fold(0usize, |acc, (&c, &r)| acc * r as usize + c as usize) * below;
        (0..below)
            .map(|u| perm[start + u] as usize % below)
            .map(|u| u as u32)
            .collect()
    }

    /// Image of the depth-`k` prefix `v`.
    pub fn image_prefix(&self, perm: &[u32], v: &[u64]) -> Vec<u64> {
        let mut full = v.to_vec();
        full.resize(self.depth as usize, 0);
        let img = self.decode(perm[self.encode(&full)] as usize);
        img[..v.len()].to_vec()
    }

    /// Oracle for a deeper subtree, reused for sections.
    pub fn below(&self, k: u32) -> &Dense {
        let mut d = self;
        for _ in 0..k {
            d = d.sub.as_ref().expect("depth");
        }
        d
    }
}

/// A random word of at most `max_len` letters (before reduction), each one
/// directed or a uniform non-identity rooted letter with equal odds.
pub fn random_word(spec: GroupSpec, level: u64, max_len: usize, rng: &mut ChaCha8Rng) -> Word {
    let r = rank_of(spec, level);
    let len = rng.gen_range(0..=max_len);
    let letters = (0..len)
        .map(|_| {
            if rng.gen_bool(0.5) {
                Letter::Directed
            } else {
                Letter::Rooted(F2Vector::from_bits(rng.gen_range(1..1u64 << r), r))
            }
        })
        .collect();
    Word::from_letters(spec, level, letters).unwrap()
}

pub fn vertex(spec: GroupSpec, level: u64, coords: &[u64]) -> VertexPath {
    let letters = coords
        .iter()
        .enumerate()
        .map(|(i, &c)| F2Vector::from_bits(c, rank_of(spec, level + i as u64)))
        .collect();
    VertexPath::new(spec, level, letters).unwrap()
}

pub fn coords(v: &VertexPath) -> Vec<u64> {
    v.letters
        .iter()
        .enumerate()
        .map(|(i, x)| x.to_bits(rank_of(v.spec, v.start_level + i as u64)).unwrap())
        .collect()
}

/// Order of a permutation, if it is a power of two.
pub fn perm_order(p: &[u32]) -> u64 {
    let mut seen = vec![false; p.len()];
    let mut lcm = 1u64;
    for s in 0..p.len() {
        if seen[s] {
            continue;
        }
        let mut len = 0u64;
        let mut i = s;
        while !seen[i] {
            seen[i] = true;
            i = p[i] as usize;
            len += 1;
        }
        lcm = num_lcm(lcm, len);
    }
    lcm
}

fn num_lcm(a: u64, b: u64) -> u64 {
    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 { a } else { gcd(b, a % b) }
    }
    a / gcd(a, b) * b
}

/// Prints the one-line result of an acceptance criterion.
pub fn report(id: u32, name: &str, ok: bool, detail: &str) {
    let tag = if ok { "PASS" } else { "FAIL" };
    println!("[{tag}] criterion {id:>2} {name}: {detail}");
}

/// Memo of dense oracles keyed by (spec, level, depth).
#[derive(Default)]
pub struct DenseCache(HashMap<(GroupSpec, u64, u32), Dense>);

impl DenseCache {
    pub fn get(&mut self, spec: GroupSpec, level: u64, depth: u32) -> &Dense {
        self.0.entry((spec, level, depth)).or_insert_with(|| Dense::new(spec, level, depth))
    }
}

/// Compares the engine with the dense oracle on one word: action on vertices
/// of every depth (all of them, or `leaf_samples` random leaves when the tree
/// is large), sections at every vertex above the leaves, and the word problem.
/// Returns the number of comparisons made.
pub fn dense_agreement(
    engine: &Engine,
    dense: &Dense,
    w: &Word,
    leaf_samples: usize,
    rng: &mut ChaCha8Rng,
) -> Result<u64, String> {
    let spec = dense.spec;
    let level = dense.level;
    let perm = dense.word(w);
    let mut checks = 0u64;
    let fail = |what: &str, v: &[u64]| Err(format!("{what} disagrees for {w} at {v:?}"));

    let leaves: Vec<usize> = if dense.size <= leaf_samples.max(4096) {
        (0..dense.size).collect()
    } else {
        (0..leaf_samples).map(|_| rng.gen_range(0..dense.size)).collect()
    };
    for i in leaves {
        let c = dense.decode(i);
        let img = engine.act(w, &vertex(spec, level, &c)).map_err(|e| e.to_string())?;
        if coords(&img) != dense.decode(perm[i] as usize) {
            return fail("act", &c);
        }
        checks += 1;
    }

    // every vertex strictly above the leaves, depth by depth
    let mut layer: Vec<Vec<u64>> = vec![Vec::new()];
    let ranks = dense.ranks();
    for (k, &rank) in ranks.iter().enumerate().take(dense.depth as usize) {
        for v in &layer {
            let img = engine.act(w, &vertex(spec, level, v)).map_err(|e| e.to_string())?;
            if coords(&img) != dense.image_prefix(&perm, v) {
                return fail("act", v);
            }
            let sec = engine.section(w, &vertex(spec, level, v)).map_err(|e| e.to_string())?;
            if sec.level() != level + k as u64 || dense.below(k as u32).word(&sec) != dense.induced(&perm, v) {
                return fail("section", v);
            }
            checks += 2;
        }
        if k + 1 < dense.depth as usize {
            layer = layer
                .iter()
                .flat_map(|v| {
                    (0..1u64 << rank).map(move |x| {
                        let mut u = v.clone();
                        u.push(x);
                        u
                    })
                })
                .collect();
        }
    }

    let moved = perm.iter().enumerate().any(|(i, &j)| i != j as usize);
    match engine.is_trivial(w) {
        branchwork::Triviality::Trivial if moved => return fail("is_trivial", &[]),
        branchwork::Triviality::NonTrivial(v) => {
            if engine.act(w, &v).map_err(|e| e.to_string())? == v {
                return fail("is_trivial witness", &coords(&v));
            }
        }
        branchwork::Triviality::Unknown => return fail("is_trivial (undecided)", &[]),
        _ => {}
    }
    Ok(checks + 1)
}

/// All E and S generators of a level.
pub fn all_generators(spec: GroupSpec, level: u64) -> Vec<Word> {
    let r = rank_of(spec, level);
    let mut out: Vec<Word> = (1..1u64 << r)
        .map(|a| Word::rooted(spec, level, F2Vector::from_bits(a, r)))
        .collect();
    out.extend((0..1u64 << r).map(|a| Word::directed_conjugate(spec, level, F2Vector::from_bits(a, r))));
    out
}
