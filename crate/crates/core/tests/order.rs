mod common;

use std::collections::HashSet;

use branchwork::order::{
    ball_enumerate, doubling_order, min_length, order, period_growth, truncated_order, OrderResult, PeriodOptions,
    PiMode,
};
use branchwork::{F2Vector, GenKind, GroupSpec, Word};
use common::{engine, perm_order, random_word, rng, Dense};

const K5: GroupSpec = GroupSpec::Kr { r: 5 };

#[test]
fn order_examples() {
    let eng = engine();
    for r in 2..=6 {
        let spec = GroupSpec::Kr { r };
        assert_eq!(order(&eng, &Word::directed(spec, 0)), OrderResult::Finite { exponent: 1 });
        assert_eq!(order(&eng, &Word::identity(spec, 0)), OrderResult::Finite { exponent: 0 });
    }
    let b5 = Word::directed(K5, 0);
    for a in 0..32u64 {
        let w = b5.mul(&Word::rooted(K5, 0, F2Vector::from_bits(a, 5)));
        let e = order(&eng, &w).exponent().expect("finite");
        assert_eq!(Some(e), doubling_order(&eng, &w, 16).unwrap(), "b_5·{a}");
    }
}

#[test]
fn dihedral_rank_one_has_infinite_order() {
    let eng = engine();
    let k1 = GroupSpec::Kr { r: 1 };
    let w = Word::directed(k1, 0).mul(&Word::rooted(k1, 0, F2Vector::basis(0u64)));
    match order(&eng, &w) {
        OrderResult::ExceededBudget { infinite, .. } => assert!(infinite),
        other => panic!("expected infinite order, got {other:?}"),
    }
    let mut prev = 0;
    for d in 2..=8 {
        let e = truncated_order(&eng, &w, d).unwrap();
        assert!(e > prev, "depth {d}");
        let dense = Dense::new(k1, 0, d);
        assert_eq!(perm_order(&dense.word(&w)), 1 << e);
        prev = e;
    }
}

#[test]
fn orders_agree_with_doubling_and_dense_truncations() {
    let eng = engine();
    let mut g = rng(3);
    for (spec, depth) in [
        (GroupSpec::Kr { r: 3 }, 4),
        (K5, 3),
        (GroupSpec::Growing { f0: 3, base: 0 }, 3),
    ] {
        let dense = Dense::new(spec, 0, depth);
        for _ in 0..150 {
            let w = random_word(spec, 0, 10, &mut g);
            let e = order(&eng, &w).exponent().expect("periodic");
            assert_eq!(Some(e), doubling_order(&eng, &w, 20).unwrap(), "{w}");
            let t = truncated_order(&eng, &w, depth).unwrap();
            assert_eq!(perm_order(&dense.word(&w)), 1 << t, "{w}");
            assert!(t <= e);
        }
    }
}

#[test]
fn ball_examples() {
    let eng = engine();
    let k3 = GroupSpec::Kr { r: 3 };
    let b = ball_enumerate(&eng, k3, 0, GenKind::E, 0, 4).unwrap();
    assert_eq!(b.len(), 1);
    let b = ball_enumerate(&eng, k3, 0, GenKind::E, 1, 4).unwrap();
    assert_eq!(b.len(), 5);
    let es = b.entries();
    for i in 0..es.len() {
        for j in i + 1..es.len() {
            assert!(eng.equal(&es[i].word, &es[j].word).is_nontrivial());
        }
    }
    let b4 = ball_enumerate(&eng, K5, 0, GenKind::S, 2, 4).unwrap();
    let b6 = ball_enumerate(&eng, K5, 0, GenKind::S, 2, 6).unwrap();
    assert_eq!(b4.sphere_sizes(), b6.sphere_sizes());
    assert_eq!(b4.sphere_sizes(), vec![1, 63, 1568]);

    // distinct depth-3 permutations of all products of two generators bound
    // the ball size from below; here the bound is attained
    let dense = Dense::new(K5, 0, 3);
    let gens: Vec<Vec<u32>> = common::all_generators(K5, 0).iter().map(|g| dense.word(g)).collect();
    let mut seen: HashSet<Vec<u32>> = gens.iter().cloned().collect();
    seen.insert(dense.identity());
    for a in &gens {
        for b in &gens {
            seen.insert(a.iter().map(|&i| b[i as usize]).collect());
        }
    }
    assert_eq!(seen.len(), b4.len());
}

#[test]
fn min_length_examples() {
    let eng = engine();
    assert_eq!(min_length(&eng, &Word::identity(K5, 0), GenKind::S, 3, 4).unwrap(), Some(0));
    let g = Word::directed_conjugate(K5, 0, F2Vector::basis(0u64));
    assert_eq!(min_length(&eng, &g, GenKind::S, 3, 4).unwrap(), Some(1));
    let g2 = g.mul(&Word::directed(K5, 0));
    assert_eq!(min_length(&eng, &g2, GenKind::S, 3, 4).unwrap(), Some(2));
    assert_eq!(min_length(&eng, &g2, GenKind::S, 1, 4).unwrap(), None);
    // lengths agree with the ball's depth of first discovery
    let ball = ball_enumerate(&eng, GroupSpec::Kr { r: 3 }, 0, GenKind::E, 4, 4).unwrap();
    for e in ball.entries().iter().step_by(7) {
        assert_eq!(min_length(&eng, &e.word, GenKind::E, 4, 4).unwrap(), Some(e.length));
    }
}

#[test]
fn period_growth_by_ball_and_by_covering_agree() {
    let eng = engine();
    let by_ball = period_growth(
        &eng,
        K5,
        0,
        GenKind::S,
        3,
        &PeriodOptions { ball_radius: 3, covering_radius: 3, ..Default::default() },
    )
    .unwrap();
    let by_cover = period_growth(
        &eng,
        K5,
        0,
        GenKind::S,
        3,
        &PeriodOptions { ball_radius: 0, covering_radius: 3, ..Default::default() },
    )
    .unwrap();
    let pis = |t: &branchwork::order::PeriodTable| t.rows.iter().map(|r| r.pi_exponent).collect::<Vec<_>>();
    assert_eq!(pis(&by_ball), pis(&by_cover));
    assert_eq!(by_ball.rows[0].pi_exponent, 0);
    assert_eq!(by_ball.rows[1].pi_exponent, 1);
    assert!(by_cover.rows[3].mode == PiMode::Covering);
    for row in &by_ball.rows {
        let e = order(&eng, &row.witness).exponent().unwrap();
        assert_eq!(e, row.pi_exponent);
        assert!(min_length(&eng, &row.witness, GenKind::S, row.n, 4).unwrap().is_some());
    }
    // brute force over the explicit ball
    let ball = ball_enumerate(&eng, K5, 0, GenKind::S, 3, 4).unwrap();
    for n in 0..=3 {
        let best = ball
            .entries()
            .iter()
            .filter(|e| e.length <= n)
            .map(|e| doubling_order(&eng, &e.word, 20).unwrap().unwrap())
            .max()
            .unwrap();
        assert_eq!(best, by_ball.rows[n as usize].pi_exponent, "n = {n}");
    }
    let csv = by_ball.to_csv();
    assert!(csv.starts_with("n,ball_size,pi,witness_json\n0,1,1,"));
}

#[test]
fn sampled_rows_are_marked_and_seeded() {
    let eng = engine();
    let opts = PeriodOptions { ball_radius: 1, covering_radius: 2, samples: 40, seed: 9, ..Default::default() };
    let a = period_growth(&eng, K5, 0, GenKind::S, 4, &opts).unwrap();
    let b = period_growth(&eng, K5, 0, GenKind::S, 4, &opts).unwrap();
    assert_eq!(a, b);
    assert!(matches!(a.rows[3].mode, PiMode::Sampled { samples: 40, .. }));
    assert!(!a.rows[4].is_exact());
    for w in a.rows.windows(2) {
        assert!(w[0].pi_exponent <= w[1].pi_exponent);
    }
}

fn perm_tables(r: u64) -> Vec<Vec<u64>> {
    fn rec(cur: &mut Vec<u64>, left: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if left.is_empty() {
            out.push(cur.clone());
            return;
        }
        for i in 0..left.len() {
            let v = left.remove(i);
            cur.push(v);
            rec(cur, left, out);
            cur.pop();
            left.insert(i, v);
        }
    }
    let mut perms = Vec::new();
    rec(&mut Vec::new(), &mut (0..r).collect(), &mut perms);
    perms
        .iter()
        .map(|p| (0..1u64 << r).map(|x| (0..r).filter(|i| x >> i & 1 == 1).map(|i| 1 << p[i as usize]).sum()).collect())
        .collect()
}

fn find(parent: &mut [usize], i: usize) -> usize {
    let mut i = i;
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

#[test]
fn orbit_reduction_picks_one_word_per_class() {
    use branchwork::order::period::SyllableCover;
    use std::collections::HashMap;
    for (spec, n) in [
        (GroupSpec::Kr { r: 3 }, 4),
        (GroupSpec::Kr { r: 2 }, 5),
        (K5, 3),
        (GroupSpec::Growing { f0: 3, base: 0 }, 3),
    ] {
        let cover = SyllableCover::new(spec, 0, n, true).unwrap().with_orbit_reduction();
        assert!(cover.orbit_reduced());
        let r = cover.rank;
        let mut words: Vec<(Vec<u64>, u64)> = Vec::new();
        for root in cover.roots() {
            cover.visit(&root, &mut |seq, c| words.push((seq.to_vec(), c)));
        }
        let index: HashMap<(Vec<u64>, u64), usize> = words.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
        let tables = if cover.permutations { perm_tables(r) } else { vec![(0..1u64 << r).collect()] };
        // every relabelling of a tuple that lands in the enumeration
        let members = |t: &[u64], c: u64| -> Vec<usize> {
            if t.windows(2).any(|w| w[0] == w[1]) {
                return vec![];
            }
            let t: Vec<u64> = t.iter().map(|v| v ^ t.first().copied().unwrap_or(0)).collect();
            tables
                .iter()
                .filter_map(|p| index.get(&(t.iter().map(|&v| p[v as usize]).collect(), p[c as usize])).copied())
                .collect()
        };
        let mut parent: Vec<usize> = (0..words.len()).collect();
        for (i, (seq, c)) in words.iter().enumerate() {
            let k = seq.len();
            let mut images = members(seq, *c);
            if k >= 2 {
                let mut rot: Vec<u64> = seq[1..].to_vec();
                rot.push(seq[0] ^ c);
                images.extend(members(&rot, *c));
                let inv: Vec<u64> = seq.iter().rev().map(|v| v ^ c).collect();
                images.extend(members(&inv, *c));
            }
            for j in images {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
        let mut reps_per_class: HashMap<usize, usize> = HashMap::new();
        let mut classes = std::collections::HashSet::new();
        for (i, (seq, c)) in words.iter().enumerate() {
            let root = find(&mut parent, i);
            classes.insert(root);
            if cover.is_orbit_representative(seq, *c) {
                *reps_per_class.entry(root).or_default() += 1;
            }
        }
        assert_eq!(reps_per_class.len(), classes.len(), "{spec:?}: a class without representative");
        assert!(reps_per_class.values().all(|&v| v == 1), "{spec:?}: duplicate representatives");
    }
}

#[test]
fn orbit_reduction_keeps_maximal_orders() {
    use branchwork::order::period::{covering_orders, SyllableCover};
    let eng = engine();
    for (spec, n) in [(K5, 4), (GroupSpec::Kr { r: 4 }, 4), (GroupSpec::Growing { f0: 3, base: 0 }, 4)] {
        let full = SyllableCover::new(spec, 0, n, true).unwrap();
        let reduced = full.clone().with_orbit_reduction();
        let exps = |c: &SyllableCover| -> Vec<u32> {
            covering_orders(&eng, c).unwrap().into_iter().map(|b| b.unwrap().0).collect()
        };
        assert_eq!(exps(&full), exps(&reduced), "{spec:?}");
    }
}
