//! Exact computation in spinal groups acting on spherically homogeneous
//! rooted trees: the constant-rank groups `K_r` and the growing-rank groups `G_k`.
//!
//! Elements are [`Word`]s in rooted letters (vectors of `A_r = C_2^r`) and the
//! level's directed generator. The [`Engine`] computes actions, sections and
//! decides the word problem; [`order`] computes element orders and period
//! growth; [`verify`] checks the quantitative section-length bounds.

pub mod arith;
pub mod budget;
pub mod engine;
pub mod error;
pub mod families;
pub mod json;
pub mod order;
pub mod verify;

pub use arith::{F2Vector, Ix, Polarity, Rank, TowerInt};
pub use budget::Budgets;
pub use engine::{ActiveSet, Coverage, Engine, Letter, Portrait, Triviality, VertexPath, Word};
pub use error::{Error, Result};
pub use families::{GenKind, GeneratingSet, GroupSpec};
