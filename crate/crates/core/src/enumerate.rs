//! Bounded enumeration of toric systems and theorem-verification campaigns.
//!
//! Search space: sequences `A_1, …, A_n` with every coordinate in `[−B, B]`.
//! Every entry of a toric system of length `n ≥ 3` satisfies
//! `A_i·(−K) = A_i² + 2` (dot the sum axiom with `A_i`, it meets exactly two
//! neighbours), so candidates are the box vectors with `x² + x·K = −2`.
//!
//! The depth-first search fixes `A_1, …, A_k` and prunes with
//!
//! * the pairwise axioms on the prefix;
//! * the remainder `R_k = −K − (A_1 + … + A_k)`, a sum of `n − k` box
//!   vectors, so `|R_k|_∞ ≤ (n − k)·B`;
//! * `A_j·R_k` for `j ≤ k`, which must equal the number of positions
//!   after `k` cyclically adjacent to `j`.
//!
//! The last entry is `R_{n−1}` itself. Work is sharded over `A_1`.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::decompose::{decompose, toric_shadow_check};
use crate::error::{Error, Result};
use crate::lattice::{DivisorClass, ModelKind, SurfaceModel};
use crate::par::{self, Execution};
use crate::toric::{cyclically_adjacent, ToricSystem};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Dedup {
    /// One representative (the canonical form) per shift/reversal orbit.
    #[default]
    Orbit,
    Raw,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerationSpec {
    #[serde(with = "descriptor")]
    pub model: ModelKind,
    /// Largest absolute value of any coordinate.
    pub bound: i64,
    /// Defaults to `ρ + 2`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length: Option<usize>,
    #[serde(default)]
    pub dedup: Dedup,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_results: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_budget_ms: Option<u64>,
    #[serde(default)]
    pub execution: Execution,
}

mod descriptor {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::lattice::ModelKind;

    pub fn serialize<S: Serializer>(kind: &ModelKind, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&kind.descriptor())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<ModelKind, D::Error> {
        let text = String::deserialize(d)?;
        ModelKind::parse(&text).map_err(serde::de::Error::custom)
    }
}

impl EnumerationSpec {
    pub fn new(model: ModelKind, bound: i64) -> Self {
        EnumerationSpec {
            model,
            bound,
            length: None,
            dedup: Dedup::Orbit,
            max_results: None,
            time_budget_ms: None,
            execution: Execution::Parallel,
        }
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    pub fn with_dedup(mut self, dedup: Dedup) -> Self {
        self.dedup = dedup;
        self
    }

    pub fn with_length(mut self, length: usize) -> Self {
        self.length = Some(length);
        self
    }

    fn check(&self, model: &SurfaceModel) -> Result<usize> {
        if self.bound < 1 {
            return Err(Error::OutOfRange(format!("coefficient bound {} < 1", self.bound)));
        }
        let n = self.length.unwrap_or(model.rank() + 2);
        if n < 3 {
            return Err(Error::OutOfRange(format!("system length {n} < 3")));
        }
        Ok(n)
    }
}

#[derive(Clone, Debug)]
pub struct Enumeration {
    pub model: Arc<SurfaceModel>,
    /// Sorted lexicographically.
    pub systems: Vec<ToricSystem>,
    /// Set when a limit stopped the search; `systems` is then a subset.
    pub truncated: bool,
}

struct Search<'a> {
    model: &'a SurfaceModel,
    candidates: Vec<DivisorClass>,
    /// `ones[i]`: candidates `j` with `c_i·c_j = 1`.
    ones: Vec<Vec<usize>>,
    n: usize,
    bound: i64,
    stop: &'a AtomicBool,
    found: &'a AtomicUsize,
    max_results: Option<usize>,
    deadline: Option<Instant>,
}

impl Search<'_> {
    fn over_budget(&self) -> bool {
        if self.stop.load(Ordering::Relaxed) {
            return true;
        }
        if self.deadline.is_some_and(|d| Instant::now() >= d) {
            self.stop.store(true, Ordering::Relaxed);
            return true;
        }
        false
    }

    fn shard(&self, first: usize) -> Vec<Vec<DivisorClass>> {
        let mut out = Vec::new();
        let mut prefix = vec![self.candidates[first].clone()];
        let rest = &self.model.anticanonical() - &prefix[0];
        if self.remainder_ok(&prefix, &rest) {
            self.extend(&mut prefix, first, rest, &mut out);
        }
        out
    }

    fn remainder_ok(&self, prefix: &[DivisorClass], rest: &DivisorClass) -> bool {
        let k = prefix.len();
        let left = (self.n - k) as i64;
        if rest.max_abs() > left * self.bound {
            return false;
        }
        prefix.iter().enumerate().all(|(j, a)| {
            let want = (k..self.n).filter(|&l| cyclically_adjacent(j, l, self.n)).count() as i64;
            self.model.dot(a, rest) == want
        })
    }

    fn extend(
        &self,
        prefix: &mut Vec<DivisorClass>,
        last: usize,
        rest: DivisorClass,
        out: &mut Vec<Vec<DivisorClass>>,
    ) {
        if self.over_budget() {
            return;
        }
        let k = prefix.len();
        if k == self.n - 1 {
            // rest is the last entry; remainder_ok already forced its products
            if rest.max_abs() <= self.bound && self.model.square(&rest) + self.model.canonical_degree(&rest) == -2 {
                let mut system = prefix.clone();
                system.push(rest);
                out.push(system);
                let total = self.found.fetch_add(1, Ordering::Relaxed) + 1;
                if self.max_results.is_some_and(|m| total > m) {
                    self.stop.store(true, Ordering::Relaxed);
                }
            }
            return;
        }
        for &c in &self.ones[last] {
            let cand = &self.candidates[c];
            // A_{k+1} meets A_1 only when it is the last entry, which is never the case here.
            if (0..k - 1).any(|j| self.model.dot(&prefix[j], cand) != 0) {
                continue;
            }
            let next_rest = &rest - cand;
            prefix.push(cand.clone());
            if self.remainder_ok(prefix, &next_rest) {
                self.extend(prefix, c, next_rest, out);
            }
            prefix.pop();
        }
    }
}

/// All box vectors with `x² + x·K = −2`, in lexicographic order.
pub fn candidate_entries(model: &SurfaceModel, bound: i64) -> Vec<DivisorClass> {
    let rank = model.rank();
    let mut out = Vec::new();
    let mut x = vec![-bound; rank];
    loop {
        let d = DivisorClass::new(x.clone());
        if model.square(&d) + model.canonical_degree(&d) == -2 {
            out.push(d);
        }
        let mut i = rank;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if x[i] < bound {
                x[i] += 1;
                break;
            }
            x[i] = -bound;
        }
    }
}

pub fn enumerate_toric_systems(spec: &EnumerationSpec) -> Result<Enumeration> {
    let model = Arc::new(SurfaceModel::standard(spec.model)?);
    enumerate_on(model, spec)
}

/// As [`enumerate_toric_systems`] on an explicitly given model.
pub fn enumerate_on(model: Arc<SurfaceModel>, spec: &EnumerationSpec) -> Result<Enumeration> {
    let n = spec.check(&model)?;
    if model.chi() != 1 {
        return Err(Error::ChiNotOne(model.chi()));
    }
    let candidates = candidate_entries(&model, spec.bound);
    let ones = candidates
        .iter()
        .map(|a| (0..candidates.len()).filter(|&j| model.dot(a, &candidates[j]) == 1).collect())
        .collect();
    let stop = AtomicBool::new(false);
    let found = AtomicUsize::new(0);
    let search = Search {
        model: &model,
        candidates,
        ones,
        n,
        bound: spec.bound,
        stop: &stop,
        found: &found,
        max_results: spec.max_results,
        deadline: spec.time_budget_ms.map(|ms| Instant::now() + Duration::from_millis(ms)),
    };
    let shards = par::map(spec.execution, (0..search.candidates.len()).collect(), |i| search.shard(i));
    let truncated = stop.load(Ordering::Relaxed);

    let mut raw: Vec<Vec<DivisorClass>> = shards.into_iter().flatten().collect();
    if spec.dedup == Dedup::Orbit {
        raw = raw
            .into_iter()
            .map(|d| ToricSystem::new(model.clone(), d).map(|s| s.canonical_form().divisors().to_vec()))
            .collect::<Result<_>>()
            .map_err(|e| Error::Invariant(format!("enumeration produced an invalid system: {e}")))?;
    }
    raw.sort();
    raw.dedup();
    if let Some(m) = spec.max_results {
        raw.truncate(m);
    }
    let systems = raw
        .into_iter()
        .map(|d| ToricSystem::new(model.clone(), d))
        .collect::<Result<Vec<_>>>()
        .map_err(|e| Error::Invariant(format!("enumeration produced an invalid system: {e}")))?;
    Ok(Enumeration { model, systems, truncated })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub system: Vec<Vec<i64>>,
    pub error: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub model: String,
    pub bound: i64,
    pub length: usize,
    pub dedup: Dedup,
    pub systems_found: usize,
    pub decomposed: usize,
    pub failed: usize,
    pub not_numerically_exceptional: usize,
    pub shadow_failures: usize,
    /// Number of certificates per base model.
    pub bases: BTreeMap<String, usize>,
    pub truncated: bool,
    pub witnesses: Vec<Witness>,
    pub wall_time_ms: u64,
}

impl VerificationReport {
    pub fn is_clean(&self) -> bool {
        self.failed == 0 && self.shadow_failures == 0 && self.not_numerically_exceptional == 0 && !self.truncated
    }
}

enum Outcome {
    Ok { base: String, shadow: bool, exceptional: bool },
    Failed { exceptional: bool, shadow: bool, error: Error },
}

/// Decomposes every enumerated system and tallies the results.
pub fn verify_theorem(spec: &EnumerationSpec) -> Result<VerificationReport> {
    let start = Instant::now();
    let found = enumerate_toric_systems(spec)?;
    let outcomes = par::map(spec.execution, found.systems.clone(), |s| {
        let exceptional = s.is_num_exceptional().unwrap_or(false);
        let shadow = toric_shadow_check(&s).is_ok();
        match decompose(&s) {
            Ok(cert) => Outcome::Ok { base: cert.base_model().kind().descriptor(), shadow, exceptional },
            Err(error) => Outcome::Failed { exceptional, shadow, error },
        }
    });

    let mut report = VerificationReport {
        model: spec.model.descriptor(),
        bound: spec.bound,
        length: found.systems.first().map_or(spec.length.unwrap_or(found.model.rank() + 2), ToricSystem::len),
        dedup: spec.dedup,
        systems_found: found.systems.len(),
        decomposed: 0,
        failed: 0,
        not_numerically_exceptional: 0,
        shadow_failures: 0,
        bases: BTreeMap::new(),
        truncated: found.truncated,
        witnesses: Vec::new(),
        wall_time_ms: 0,
    };
    for (system, outcome) in found.systems.iter().zip(outcomes) {
        let coords = || system.divisors().iter().map(|d| d.coeffs().to_vec()).collect();
        let (exceptional, shadow) = match outcome {
            Outcome::Ok { base, shadow, exceptional } => {
                report.decomposed += 1;
                *report.bases.entry(base).or_default() += 1;
                (exceptional, shadow)
            }
            Outcome::Failed { exceptional, shadow, error } => {
                report.failed += 1;
                report.witnesses.push(Witness { system: coords(), error: error.to_string() });
                (exceptional, shadow)
            }
        };
        if !exceptional {
            report.not_numerically_exceptional += 1;
        }
        if !shadow {
            report.shadow_failures += 1;
        }
    }
    report.wall_time_ms = start.elapsed().as_millis() as u64;
    Ok(report)
}
