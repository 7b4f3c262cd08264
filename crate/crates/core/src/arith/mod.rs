//! Arithmetic substrate: sparse GF(2) vectors and tower integers.

pub mod f2;
pub mod tower;

pub use f2::{f2_add, translate_bar, F2Vector, Ix, Polarity};
pub use tower::{
    f3_value, f_value, slog, tetr, collapse_depth, FValue, Rank, TowerInt, DEFAULT_BIT_BUDGET,
};
