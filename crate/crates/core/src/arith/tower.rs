//! Tower integers, level ranks and the bound functions `f`, `tetr`, `slog`, `u`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::f2::Ix;
use crate::error::{Error, Result};

/// Default size limit for exact values, in bits.
pub const DEFAULT_BIT_BUDGET: u64 = 1 << 20;

/// A non-negative integer that is either stored exactly or as a power tower
/// `base^base^…^top` (`height` exponentiations).
///
/// Towers are kept in canonical form: `top` is exact and `base^top` would
/// not fit the bit budget it was built with. Nested towers of one base are
/// flattened.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TowerInt {
    Exact(BigUint),
    Tower {
        base: u32,
        height: u32,
        top: Box<TowerInt>,
    },
}

impl TowerInt {
    pub fn exact(v: impl Into<BigUint>) -> TowerInt {
        TowerInt::Exact(v.into())
    }

    pub fn as_exact(&self) -> Option<&BigUint> {
        match self {
            TowerInt::Exact(v) => Some(v),
            _ => None,
        }
    }

    /// `base^(self)`, collapsing to an exact value when it fits `bit_budget`.
    pub fn exp_base(&self, base: u32, bit_budget: u64) -> TowerInt {
        match self {
            TowerInt::Exact(e) => match pow_fits(base, e, bit_budget) {
                Some(v) => TowerInt::Exact(v),
                None => TowerInt::Tower {
                    base,
                    height: 1,
                    top: Box::new(self.clone()),
                },
            },
            TowerInt::Tower {
                base: b,
                height,
                top,
            } if *b == base => TowerInt::Tower {
                base,
                height: height + 1,
                top: top.clone(),
            },
            other => TowerInt::Tower {
                base,
                height: 1,
                top: Box::new(other.clone()),
            },
        }
    }

    fn height(&self) -> u32 {
        match self {
            TowerInt::Exact(_) => 0,
            TowerInt::Tower { height, top, .. } => height + top.height(),
        }
    }
}

fn pow_fits(base: u32, e: &BigUint, bit_budget: u64) -> Option<BigUint> {
    if base == 1 || e.is_zero() {
        return Some(BigUint::one());
    }
    if base == 0 {
        return Some(BigUint::zero());
    }
    let e64 = e.to_u64()?;
    if (e64 as f64) * (base as f64).log2() > bit_budget as f64 {
        return None;
    }
    if base.is_power_of_two() {
        let shift = e64 * base.trailing_zeros() as u64;
        return Some(BigUint::one() << shift);
    }
    Some(BigUint::from(base).pow(e64 as u32))
}

impl Ord for TowerInt {
    /// Total order; exact whenever both sides are exact or share one base.
    /// Towers of different bases are ordered by total height, then by top.
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (TowerInt::Exact(a), TowerInt::Exact(b)) => a.cmp(b),
            // a canonical tower exceeds every value inside the bit budget
            (TowerInt::Exact(_), TowerInt::Tower { .. }) => Ordering::Less,
            (TowerInt::Tower { .. }, TowerInt::Exact(_)) => Ordering::Greater,
            (
                TowerInt::Tower {
                    base: b1, top: t1, ..
                },
                TowerInt::Tower {
                    base: b2, top: t2, ..
                },
            ) => self
                .height()
                .cmp(&other.height())
                .then_with(|| t1.cmp(t2))
                .then_with(|| b1.cmp(b2)),
        }
    }
}

impl PartialOrd for TowerInt {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for TowerInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TowerInt::Exact(v) if v.bits() <= 256 => write!(f, "{v}"),
            TowerInt::Exact(v) => write!(f, "<{}-bit integer>", v.bits()),
            TowerInt::Tower { base, height, top } => write!(f, "{base}^^{height}({top})"),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum TowerJson {
    Exact(String),
    Tower {
        base: u32,
        height: u32,
        top: Box<TowerJson>,
    },
}

impl From<&TowerInt> for TowerJson {
    fn from(t: &TowerInt) -> Self {
        match t {
            TowerInt::Exact(v) => TowerJson::Exact(v.to_string()),
            TowerInt::Tower { base, height, top } => TowerJson::Tower {
                base: *base,
                height: *height,
                top: Box::new(top.as_ref().into()),
            },
        }
    }
}

impl TryFrom<TowerJson> for TowerInt {
    type Error = Error;
    fn try_from(j: TowerJson) -> Result<Self> {
        Ok(match j {
            TowerJson::Exact(s) => TowerInt::Exact(
                BigUint::parse_bytes(s.as_bytes(), 10)
                    .ok_or_else(|| Error::Parse(format!("bad integer {s:?}")))?,
            ),
            TowerJson::Tower { base, height, top } => TowerInt::Tower {
                base,
                height,
                top: Box::new((*top).try_into()?),
            },
        })
    }
}

impl Serialize for TowerInt {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        TowerJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for TowerInt {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = TowerJson::deserialize(d)?;
        j.try_into().map_err(serde::de::Error::custom)
    }
}

/// Number of basis generators of a level's alphabet group.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Rank {
    Small(u64),
    Big(BigUint),
    /// Not exactly representable; carries a lower bound.
    Huge(TowerInt),
}

impl Rank {
    pub fn small(r: u64) -> Rank {
        Rank::Small(r)
    }

    pub fn from_tower(t: TowerInt) -> Rank {
        match t {
            TowerInt::Exact(v) => match v.to_u64() {
                Some(s) => Rank::Small(s),
                None => Rank::Big(v),
            },
            other => Rank::Huge(other),
        }
    }

    /// A non-exact rank above `2^bits`, for tests.
    pub fn huge_from_bits(bits: u32) -> Rank {
        Rank::Huge(TowerInt::Tower {
            base: 2,
            height: 1,
            top: Box::new(TowerInt::exact(bits)),
        })
    }

    pub fn as_u64(&self) -> Option<u64> {
        match self {
            Rank::Small(r) => Some(*r),
            _ => None,
        }
    }

    pub fn exact(&self) -> Option<BigUint> {
        match self {
            Rank::Small(r) => Some(BigUint::from(*r)),
            Rank::Big(b) => Some(b.clone()),
            Rank::Huge(_) => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self, Rank::Huge(_))
    }

    pub fn contains_index(&self, i: &Ix) -> bool {
        match (self, i) {
            (Rank::Small(r), Ix::Small(s)) => s < r,
            (Rank::Small(_), Ix::Big(_)) => false,
            (Rank::Big(r), i) => &i.to_big() < r,
            (Rank::Huge(_), _) => true,
        }
    }

    pub fn to_tower(&self) -> TowerInt {
        match self {
            Rank::Small(r) => TowerInt::exact(*r),
            Rank::Big(b) => TowerInt::Exact(b.clone()),
            Rank::Huge(t) => t.clone(),
        }
    }

    /// Number of vertices `2^rank` when it fits in a `u64`.
    pub fn layer_size(&self) -> Option<u64> {
        self.as_u64().filter(|r| *r < 64).map(|r| 1u64 << r)
    }
}

impl fmt::Display for Rank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rank::Small(r) => write!(f, "{r}"),
            Rank::Big(b) => write!(f, "{b}"),
            Rank::Huge(t) => write!(f, "≥{t}"),
        }
    }
}

/// Value of `f(k)` where `f(0) = f0` and `f(k+1) = 2^f(k) - 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FValue {
    Exact(BigUint),
    /// `lower ≤ f(k) ≤ upper`; the lower bound is a tower over `f(j) - 1`
    /// for the last exact `j`, the upper one a tower over `f(j)`.
    Bounded { lower: TowerInt, upper: TowerInt },
}

impl FValue {
    pub fn exact(&self) -> Option<&BigUint> {
        match self {
            FValue::Exact(v) => Some(v),
            FValue::Bounded { .. } => None,
        }
    }

    pub fn lower(&self) -> TowerInt {
        match self {
            FValue::Exact(v) => TowerInt::Exact(v.clone()),
            FValue::Bounded { lower, .. } => lower.clone(),
        }
    }

    pub fn upper(&self) -> TowerInt {
        match self {
            FValue::Exact(v) => TowerInt::Exact(v.clone()),
            FValue::Bounded { upper, .. } => upper.clone(),
        }
    }
}

pub fn f_value(f0: u64, k: u64) -> FValue {
    f_value_with_budget(f0, k, DEFAULT_BIT_BUDGET)
}

pub fn f_value_with_budget(f0: u64, k: u64, bit_budget: u64) -> FValue {
    let mut cur = BigUint::from(f0);
    let mut j = 0;
    while j < k {
        let Some(e) = cur.to_u64().filter(|e| *e <= bit_budget) else {
            break;
        };
        cur = (BigUint::one() << e) - 1u32;
        j += 1;
    }
    if j == k {
        return FValue::Exact(cur);
    }
    // f(k) - 1 ≥ 2^(f(k-1) - 1) gives the lower tower, f(k) ≤ 2^f(k-1) the upper one.
    let steps = k - j;
    let mut lower = TowerInt::Exact(&cur - 1u32);
    let mut upper = TowerInt::Exact(cur);
    for _ in 0..steps {
        lower = lower.exp_base(2, bit_budget);
        upper = upper.exp_base(2, bit_budget);
    }
    FValue::Bounded { lower, upper }
}

/// `f_3(k) = f(⌊k/3⌋)`.
pub fn f3_value(f0: u64, k: u64) -> FValue {
    f_value(f0, k / 3)
}

/// `tetr_base(n)`: `tetr(0) = 1`, `tetr(n+1) = base^tetr(n)`.
pub fn tetr(base: u32, n: u64) -> TowerInt {
    tetr_with_budget(base, n, DEFAULT_BIT_BUDGET)
}

pub fn tetr_with_budget(base: u32, n: u64, bit_budget: u64) -> TowerInt {
    let mut t = TowerInt::exact(1u32);
    for _ in 0..n {
        t = t.exp_base(base, bit_budget);
    }
    t
}

/// `slog_base(n) = max{ l | tetr_base(l) ≤ n }`.
pub fn slog(base: u32, n: &BigUint) -> Result<u64> {
    if base < 2 {
        return Err(Error::Invalid("slog needs base ≥ 2".into()));
    }
    if n.is_zero() {
        return Err(Error::Invalid("slog needs n ≥ 1".into()));
    }
    let n_t = TowerInt::Exact(n.clone());
    let mut l = 0;
    let mut t = TowerInt::exact(1u32);
    loop {
        let next = t.exp_base(base, DEFAULT_BIT_BUDGET);
        if next > n_t {
            return Ok(l);
        }
        t = next;
        l += 1;
    }
}

/// `v_l(m) = ⌈4m / f(l)⌉ + 1`.
pub fn v_step(m: &BigUint, f0: u64, l: u64) -> BigUint {
    match f_value(f0, l) {
        FValue::Exact(f) => {
            let num: BigUint = m * 4u32;
            num.div_ceil(&f) + 1u32
        }
        // f(l) exceeds any exact m here, so the ceiling is 1 (or 0 for m = 0)
        FValue::Bounded { .. } => {
            if m.is_zero() {
                BigUint::one()
            } else {
                BigUint::from(2u32)
            }
        }
    }
}

/// `u(n) = min{ l | v_l(v_{l-1}(…v_0(n)…)) = 2 }`.
pub fn collapse_depth(n: u64, f0: u64) -> Result<u64> {
    if n < 2 {
        return Err(Error::Invalid("u(n) needs n ≥ 2".into()));
    }
    if f0 < 3 {
        return Err(Error::Invalid("f(0) must be at least 3".into()));
    }
    let mut m = BigUint::from(n);
    let two = BigUint::from(2u32);
    for l in 0.. {
        m = v_step(&m, f0, l);
        if m == two {
            return Ok(l);
        }
    }
    unreachable!()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f_anchor_values() {
        let vals: Vec<_> = (0..4).map(|k| f_value(3, k).exact().cloned().unwrap()).collect();
        assert_eq!(vals[0], BigUint::from(3u32));
        assert_eq!(vals[1], BigUint::from(7u32));
        assert_eq!(vals[2], BigUint::from(127u32));
        // arbitrary-precision oracle for 2^127 - 1
        let oracle = (0..127).fold(BigUint::zero(), |acc, _| acc * 2u32 + 1u32);
        assert_eq!(vals[3], oracle);
        assert_eq!(f_value(127, 1).exact().cloned().unwrap(), oracle);
    }

    #[test]
    fn f_bounds_bracket_for_large_k() {
        let FValue::Bounded { lower, upper } = f_value(3, 5) else {
            panic!("f(5) is not exact")
        };
        assert!(lower <= upper);
        // f(4) = 2^(2^127 - 1) - 1 is exact (2^127 bits?) -- no: too big, so f(4) is bounded
        assert!(matches!(f_value(3, 4), FValue::Bounded { .. }));
    }

    #[test]
    fn tetration_table() {
        let t: Vec<_> = (0..5).map(|n| tetr(2, n)).collect();
        let want = [1u32, 2, 4, 16, 65536];
        for (t, w) in t.iter().zip(want) {
            assert_eq!(t, &TowerInt::exact(w));
        }
        // 2^65536 still fits the default budget, the next one does not
        assert!(tetr(2, 5).as_exact().is_some());
        assert!(tetr(2, 6).as_exact().is_none());
        assert!(tetr(2, 6) < tetr(2, 7));
        assert!(tetr(2, 5) < tetr(2, 6));
    }

    #[test]
    fn slog_inverts_tetr() {
        assert_eq!(slog(2, &BigUint::from(65536u32)).unwrap(), 4);
        assert_eq!(slog(2, &BigUint::from(65535u32)).unwrap(), 3);
        assert_eq!(slog(2, &BigUint::from(1u32)).unwrap(), 0);
        for l in 0..=5 {
            let t = tetr(2, l).as_exact().cloned().unwrap();
            assert_eq!(slog(2, &t).unwrap(), l);
        }
        assert_eq!(slog(3, &BigUint::from(27u32)).unwrap(), 2);
        assert_eq!(slog(3, &BigUint::from(26u32)).unwrap(), 1);
    }

    #[test]
    fn f_dominates_tetration_small_k() {
        for k in 0..=3 {
            let f = f_value(3, k).exact().cloned().unwrap();
            let t = tetr(2, k).as_exact().cloned().unwrap();
            assert!(f > t);
        }
        for k in 4..=6 {
            assert!(f_value(3, k).lower() >= tetr(2, k), "k = {k}");
        }
    }

    /// Direct evaluation of the composition with plain integer division.
    fn u_oracle(n: u64, f: &[u64]) -> u64 {
        let mut m = n;
        for (l, fl) in f.iter().enumerate() {
            m = (4 * m).div_ceil(*fl) + 1;
            if m == 2 {
                return l as u64;
            }
        }
        // f beyond the table is astronomically large: one more step reaches 2
        f.len() as u64
    }

    #[test]
    fn collapse_depth_values() {
        assert_eq!(collapse_depth(2, 3).unwrap(), u_oracle(2, &[3, 7, 127]));
        assert_eq!(collapse_depth(2, 3).unwrap(), 2);
        assert_eq!(collapse_depth(2, 127).unwrap(), 0);
        assert_eq!(collapse_depth(1000, 3).unwrap(), u_oracle(1000, &[3, 7, 127]));
    }

    #[test]
    fn collapse_depth_monotone() {
        let mut prev = 0;
        for n in 2..=1_000_000u64 {
            let u = collapse_depth(n, 3).unwrap();
            assert!(u >= prev, "u({n}) = {u} < {prev}");
            prev = u;
        }
    }

    #[test]
    fn tower_json_round_trip() {
        let t = tetr(2, 7);
        let s = serde_json::to_string(&t).unwrap();
        assert!(s.contains("\"tower\""));
        let back: TowerInt = serde_json::from_str(&s).unwrap();
        assert_eq!(back, t);
        let e: TowerInt = serde_json::from_str(r#"{"exact":"65536"}"#).unwrap();
        assert_eq!(e, TowerInt::exact(65536u32));
    }
}
