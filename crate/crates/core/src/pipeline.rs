//! End-to-end runs: translation, normalization, preparation, generation and
//! a mandatory self-check of every witness against the raw schema.

use std::time::{Duration, Instant};

use crate::algebra::{Env, SchemaDoc, Store};
use crate::error::{Error, Result};
use crate::generate::{bottom_up, Outcome};
use crate::json::{to_canonical_string, JsonValue};
use crate::limits::Limits;
use crate::normalize::Normalizer;
use crate::prepare::Preparer;
use crate::reference::reference_validate;
use crate::translate::translate_into;

/// Intermediate forms that can be dumped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum DumpStage {
    Algebra,
    NotEliminated,
    Stratified,
    Gdnf,
    Canonical,
    Prepared,
}

impl DumpStage {
    pub const ALL: [DumpStage; 6] = [
        DumpStage::Algebra,
        DumpStage::NotEliminated,
        DumpStage::Stratified,
        DumpStage::Gdnf,
        DumpStage::Canonical,
        DumpStage::Prepared,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DumpStage::Algebra => "algebra",
            DumpStage::NotEliminated => "not-eliminated",
            DumpStage::Stratified => "stratified",
            DumpStage::Gdnf => "gdnf",
            DumpStage::Canonical => "canonical",
            DumpStage::Prepared => "prepared",
        }
    }

    /// Accepts full names and the short forms `not-elim`, `notelim`,
    /// `stratify`, `strat` and `canon`.
    pub fn parse(s: &str) -> Option<DumpStage> {
        match s {
            "not-elim" | "notelim" => Some(DumpStage::NotEliminated),
            "stratify" | "strat" => Some(DumpStage::Stratified),
            "canon" => Some(DumpStage::Canonical),
            _ => DumpStage::ALL.into_iter().find(|d| d.name() == s),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Options {
    pub limits: Limits,
    pub dumps: Vec<DumpStage>,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Timings {
    pub translate: Duration,
    pub normalize: Duration,
    pub prepare: Duration,
    pub generate: Duration,
}

impl Timings {
    pub fn total(&self) -> Duration {
        self.translate + self.normalize + self.prepare + self.generate
    }
}

#[derive(Debug, Clone)]
pub struct Run {
    pub outcome: Outcome,
    pub passes: usize,
    /// Variables taking part in the fixpoint.
    pub fixpoint_vars: usize,
    /// Every variable name allocated during the run.
    pub variables_created: usize,
    /// Unsatisfiable disjuncts dropped while pushing negations.
    pub bottom_disjuncts: usize,
    pub timings: Timings,
    pub dumps: Vec<(DumpStage, String)>,
}

/// Normalizes, prepares and generates for an already translated document.
pub fn run_doc(doc: SchemaDoc, opts: &Options, mut timings: Timings) -> Result<Run> {
    let mut dumps = Vec::new();
    let wants = |d: DumpStage| opts.dumps.contains(&d);
    if wants(DumpStage::Algebra) {
        dumps.push((DumpStage::Algebra, doc.show()));
    }
    let start = Instant::now();
    let mut norm = Normalizer::new(doc, opts.limits)?;
    let s = norm.not_complete()?;
    if wants(DumpStage::NotEliminated) {
        dumps.push((DumpStage::NotEliminated, norm.show_snapshot(&s)));
    }
    let s = norm.stratify()?;
    if wants(DumpStage::Stratified) {
        dumps.push((DumpStage::Stratified, norm.show_snapshot(&s)));
    }
    if wants(DumpStage::Gdnf) {
        let s = norm.gdnf_snapshot()?;
        dumps.push((DumpStage::Gdnf, norm.show_snapshot(&s)));
    }
    if wants(DumpStage::Canonical) {
        let s = norm.canonical_snapshot()?;
        dumps.push((DumpStage::Canonical, norm.show_snapshot(&s)));
    }
    timings.normalize = start.elapsed();
    let start = Instant::now();
    let prep = Preparer::run(norm)?;
    timings.prepare = start.elapsed();
    if wants(DumpStage::Prepared) {
        dumps.push((DumpStage::Prepared, prep.show()));
    }
    let start = Instant::now();
    let bu = bottom_up(&prep, prep.norm.root())?;
    timings.generate = start.elapsed();
    Ok(Run {
        outcome: bu.outcome,
        passes: bu.passes,
        fixpoint_vars: bu.vars,
        variables_created: prep.norm.store.num_vars(),
        bottom_disjuncts: prep.norm.stats.bottom_disjuncts,
        timings,
        dumps,
    })
}

fn fresh(opts: &Options) -> (Store, Env) {
    (Store::with_max_states(opts.limits.max_states), Env::new())
}

/// A witness for `schema`, or `Unsatisfiable`. Every witness is checked
/// against the raw schema before it is returned.
pub fn witness(schema: &JsonValue, opts: &Options) -> Result<Run> {
    let start = Instant::now();
    let (mut store, mut env) = fresh(opts);
    let root = translate_into(&mut store, &mut env, schema)?;
    let timings = Timings { translate: start.elapsed(), ..Timings::default() };
    let run = run_doc(SchemaDoc { store, env, root }, opts, timings)?;
    if let Outcome::Witness(j) = &run.outcome {
        if !reference_validate(schema, j)? {
            return Err(Error::SelfCheck(to_canonical_string(j)));
        }
    }
    Ok(run)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Containment {
    Included,
    /// Valid for the first schema and invalid for the second.
    CounterExample(JsonValue),
}

/// Decides `s1 ⊆ s2` through generation for `s1 ∧ ¬s2`.
pub fn check_containment(s1: &JsonValue, s2: &JsonValue, opts: &Options) -> Result<(Containment, Run)> {
    let start = Instant::now();
    let (mut store, mut env) = fresh(opts);
    let t1 = translate_into(&mut store, &mut env, s1)?;
    let t2 = translate_into(&mut store, &mut env, s2)?;
    let n2 = store.not(t2);
    let root = store.and([t1, n2]);
    let timings = Timings { translate: start.elapsed(), ..Timings::default() };
    let run = run_doc(SchemaDoc { store, env, root }, opts, timings)?;
    let verdict = match &run.outcome {
        Outcome::Unsatisfiable => Containment::Included,
        Outcome::Witness(j) => {
            if !reference_validate(s1, j)? || reference_validate(s2, j)? {
                return Err(Error::SelfCheck(to_canonical_string(j)));
            }
            Containment::CounterExample(j.clone())
        }
    };
    Ok((verdict, run))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Equivalence {
    Equivalent,
    /// `s1 ⊄ s2` when `left_not_in_right`, else `s2 ⊄ s1`.
    Differ {
        left_not_in_right: bool,
        counterexample: JsonValue,
    },
}

pub fn check_equivalence(s1: &JsonValue, s2: &JsonValue, opts: &Options) -> Result<(Equivalence, Vec<Run>)> {
    let (c1, r1) = check_containment(s1, s2, opts)?;
    if let Containment::CounterExample(j) = c1 {
        return Ok((Equivalence::Differ { left_not_in_right: true, counterexample: j }, vec![r1]));
    }
    let (c2, r2) = check_containment(s2, s1, opts)?;
    Ok(match c2 {
        Containment::Included => (Equivalence::Equivalent, vec![r1, r2]),
        Containment::CounterExample(j) => {
            (Equivalence::Differ { left_not_in_right: false, counterexample: j }, vec![r1, r2])
        }
    })
}
