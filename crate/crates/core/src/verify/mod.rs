//! Machine checks of the section-length, periodicity and branching statements,
//! each producing a replayable [`CheckReport`].

pub mod branch;
pub mod chi;
pub mod lemmas;
mod support;

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::{Engine, Triviality, VertexPath, Word};
use crate::error::{Error, Result};
use crate::families::{GenKind, GroupSpec};
use crate::order::min_length;

pub use branch::{check_commutator_sections, check_weakly_branch_generators, WeaklyBranchOptions};
pub use chi::{chi_complexity, AbstractWord, ChiResult};
pub use lemmas::{check_2667, check_growing_reduction, check_tetration, check_transitivity, check_two_layer_reduction};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckMode {
    /// Every instance decided with exact lengths and the word problem.
    Exact,
    /// A seeded random subset of the instances.
    Sampled,
    /// Some instances only bounded by representative lengths.
    Representative,
}

/// A concrete instance falsifying a check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Counterexample {
    /// `‖(word^power)|_vertex‖ > bound` in the `kind` generating set of the vertex's level.
    SectionLength {
        word: Word,
        power: u32,
        vertex: VertexPath,
        gens: GenKind,
        bound: u32,
    },
    /// `word|_vertex ≠ expected`.
    SectionMismatch {
        word: Word,
        vertex: VertexPath,
        expected: Word,
    },
    /// `word` was expected to be non-trivial.
    Trivial { word: Word },
    /// The orbit of the leftmost vertex on the given layer is not the whole layer.
    Orbit {
        spec: GroupSpec,
        level: u64,
        layer: u32,
        orbit: u64,
        layer_size: u64,
    },
    /// An arithmetic statement that evaluated to false.
    Arithmetic { statement: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub params: serde_json::Value,
    pub instances: u64,
    pub passed: bool,
    pub mode: CheckMode,
    pub counterexample: Option<Counterexample>,
    pub notes: Vec<String>,
    pub elapsed_ms: u64,
}

impl CheckReport {
    pub(crate) fn new(name: &str, params: serde_json::Value) -> CheckReport {
        CheckReport {
            name: name.into(),
            params,
            instances: 0,
            passed: true,
            mode: CheckMode::Exact,
            counterexample: None,
            notes: Vec::new(),
            elapsed_ms: 0,
        }
    }

    pub(crate) fn fail(&mut self, c: Counterexample) {
        self.passed = false;
        if self.counterexample.is_none() {
            self.counterexample = Some(c);
        }
    }

    pub(crate) fn finish(mut self, started: Instant) -> CheckReport {
        self.elapsed_ms = started.elapsed().as_millis() as u64;
        self
    }

    /// Passed with every instance decided exactly.
    pub fn verified(&self) -> bool {
        self.passed && self.mode == CheckMode::Exact && self.instances > 0
    }

    /// The report with timing removed; equal across runs and thread counts.
    pub fn deterministic(&self) -> CheckReport {
        CheckReport {
            elapsed_ms: 0,
            ..self.clone()
        }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

fn decided(t: Triviality, engine: &Engine) -> Result<bool> {
    t.decided()
        .ok_or_else(|| Error::budget("recursion", engine.budgets.recursion))
}

/// Re-evaluates a counterexample. `Ok(true)` means it still falsifies.
pub fn replay(engine: &Engine, c: &Counterexample) -> Result<bool> {
    match c {
        Counterexample::SectionLength {
            word,
            power,
            vertex,
            gens,
            bound,
        } => {
            let p = word.pow(u64::from(*power), engine.budgets.word_letters)?;
            let sec = engine.section(&p, vertex)?;
            Ok(min_length(engine, &sec, *gens, *bound, 4)?.is_none())
        }
        Counterexample::SectionMismatch {
            word,
            vertex,
            expected,
        } => {
            let sec = engine.section(word, vertex)?;
            Ok(!decided(engine.equal(&sec, expected), engine)?)
        }
        Counterexample::Trivial { word } => decided(engine.is_trivial(word), engine),
        Counterexample::Orbit {
            spec,
            level,
            layer,
            layer_size,
            ..
        } => {
            let orbit = lemmas::orbit_size(engine, *spec, *level, *layer)?;
            Ok(orbit < *layer_size)
        }
        Counterexample::Arithmetic { statement } => Ok(!lemmas::arithmetic_holds(statement)?),
    }
}

/// Checks run by [`run_suite`], with desk-scale parameters.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SuiteOptions {
    pub two_layer_r: u64,
    pub two_layer_radius: u32,
    pub growing_radius: u32,
    pub commutator_r: u64,
    pub transitivity_layers: u32,
    pub seed: u64,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            two_layer_r: 5,
            two_layer_radius: 5,
            growing_radius: 4,
            commutator_r: 6,
            transitivity_layers: 2,
            seed: 0,
        }
    }
}

/// Names accepted by [`run_check`].
pub const CHECK_NAMES: [&str; 8] = [
    "check_two_layer_reduction",
    "check_growing_reduction",
    "check_2667",
    "check_tetration",
    "check_commutator_sections",
    "check_weakly_branch_generators",
    "check_transitivity",
    "check_weakly_branch_generators_kr",
];

/// Runs one named check with the suite's parameters.
pub fn run_check(engine: &Engine, name: &str, opts: &SuiteOptions) -> Result<CheckReport> {
    match name {
        "check_two_layer_reduction" => check_two_layer_reduction(engine, opts.two_layer_r, opts.two_layer_radius),
        "check_growing_reduction" => check_growing_reduction(engine, 3, opts.growing_radius),
        "check_2667" => check_2667(engine, 3, 4),
        "check_tetration" => Ok(check_tetration()),
        "check_commutator_sections" => check_commutator_sections(engine, opts.commutator_r),
        "check_weakly_branch_generators" => check_weakly_branch_generators(
            engine,
            GroupSpec::Growing { f0: 127, base: 0 },
            &WeaklyBranchOptions::default(),
        ),
        "check_weakly_branch_generators_kr" => check_weakly_branch_generators(
            engine,
            GroupSpec::Kr { r: opts.commutator_r },
            &WeaklyBranchOptions::default(),
        ),
        "check_transitivity" => check_transitivity(engine, GroupSpec::Kr { r: 5 }, opts.transitivity_layers),
        other => Err(Error::Invalid(format!("unknown check {other:?}"))),
    }
}

/// Runs every check; reports come back in [`CHECK_NAMES`] order.
pub fn run_suite(engine: &Engine, opts: &SuiteOptions) -> Result<Vec<CheckReport>> {
    CHECK_NAMES
        .par_iter()
        .map(|name| run_check(engine, name, opts))
        .collect()
}
