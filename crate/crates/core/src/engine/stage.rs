//! Stagewise iteration of the extension operator over a finite slice.

use std::fmt;
use std::sync::Arc;

use crate::cost::Meter;
use crate::element::HElement;
use crate::error::EvalError;
use crate::system::GnfSystem;
use crate::term::{eval_ground, substitute, Binding};

use super::instance::Instances;
use super::{EvalOptions, Evaluator, Universe};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Entry {
    Defined(HElement),
    /// Gamma gives `false` (or the wrong arity): undefined at every stage.
    Never,
}

impl fmt::Display for Entry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Entry::Defined(v) => write!(f, "{v}"),
            Entry::Never => f.write_str("false"),
        }
    }
}

impl Entry {
    pub fn value(&self) -> Option<&HElement> {
        match self {
            Entry::Defined(v) => Some(v),
            Entry::Never => None,
        }
    }
}

/// `g^(k)` on the slice. A missing entry means "not defined yet".
#[derive(Debug, Clone)]
pub struct StageTable {
    pub stage: usize,
    universe: Arc<Universe>,
    /// `entries[i - 1][position of w]`
    entries: Vec<Vec<Option<Entry>>>,
}

impl StageTable {
    /// Stage 0: the initial functions restricted to the slice.
    pub fn initial(sys: &GnfSystem, universe: Arc<Universe>) -> StageTable {
        let entries = sys
            .functions
            .iter()
            .map(|f| {
                universe
                    .elements()
                    .iter()
                    .map(|w| f.initial.get(w).map(Entry::Defined))
                    .collect()
            })
            .collect();
        StageTable {
            stage: 0,
            universe,
            entries,
        }
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn functions(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, i: usize, w: &HElement) -> Option<&Entry> {
        let n = self.universe.position(w)?;
        self.entries.get(i.checked_sub(1)?)?[n].as_ref()
    }

    pub fn defined_count(&self, i: usize) -> usize {
        self.entries[i - 1].iter().filter(|e| matches!(e, Some(Entry::Defined(_)))).count()
    }

    pub fn never_count(&self, i: usize) -> usize {
        self.entries[i - 1].iter().filter(|e| matches!(e, Some(Entry::Never))).count()
    }

    /// Same entries, regardless of stage number.
    pub fn same_entries(&self, other: &StageTable) -> bool {
        self.entries == other.entries
    }

    /// `(i, w, entry)` for every present entry.
    pub fn iter(&self) -> impl Iterator<Item = (usize, &HElement, &Entry)> {
        self.entries.iter().enumerate().flat_map(move |(n, row)| {
            row.iter()
                .zip(self.universe.elements())
                .filter_map(move |(e, w)| e.as_ref().map(|e| (n + 1, w, e)))
        })
    }

    /// Replaces the value of the last defined list entry, for fault-injection tests.
    #[doc(hidden)]
    pub fn inject_fault(&mut self) -> bool {
        for row in self.entries.iter_mut().rev() {
            for e in row.iter_mut().rev() {
                if let Some(Entry::Defined(v)) = e {
                    *v = HElement::list([v.clone()]);
                    return true;
                }
            }
        }
        false
    }
}

/// One application of the operator: defined entries are copied, missing
/// ones are computed from the current table.
pub fn iterate_stage(sys: &GnfSystem, table: &StageTable) -> Result<StageTable, EvalError> {
    let universe = Arc::clone(&table.universe);
    let mut entries = table.entries.clone();
    let mut instances = Instances::default();
    for (n, row) in entries.iter_mut().enumerate() {
        for (slot, w) in row.iter_mut().zip(universe.elements()) {
            if slot.is_none() {
                *slot = step(sys, table, &mut instances, n + 1, w)?;
            }
        }
    }
    Ok(StageTable {
        stage: table.stage + 1,
        universe,
        entries,
    })
}

fn step(
    sys: &GnfSystem,
    table: &StageTable,
    instances: &mut Instances,
    i: usize,
    w: &HElement,
) -> Result<Option<Entry>, EvalError> {
    let mut scratch = Meter::new();
    if let Some(v) = sys.initial_lookup(i, w, &mut scratch)? {
        return Ok(Some(Entry::Defined(v)));
    }
    let Some(inst) = instances.gamma(sys, i, w, &mut scratch)? else {
        return Ok(Some(Entry::Never));
    };
    let (stripped, calls) = inst.prepared(i, w)?;
    let comps = w.components();
    if inst.arity != comps.len() {
        return Ok(Some(Entry::Never));
    }
    let mut binding = Binding::new(comps.to_vec());
    for &(n, j) in calls {
        match table.get(j, &comps[n - 1]) {
            Some(Entry::Defined(v)) => {
                binding.y.insert(n, v.clone());
            }
            _ => return Ok(None),
        }
    }
    let ground = substitute(stripped, &binding, &mut scratch)?;
    let value = eval_ground(&ground, &sys.signature, &mut scratch)?;
    if !binding.y.is_empty() && value.size() > binding.x_size() + binding.y_size() {
        return Err(EvalError::RuntimeC5 {
            function: i,
            input: w.render(),
            term: format!("{} = {ground}", inst.term),
            value_size: value.size(),
            w_size: binding.x_size(),
            l_size: binding.y_size(),
        });
    }
    Ok(Some(if value.is_false() { Entry::Never } else { Entry::Defined(value) }))
}

#[derive(Debug, Clone)]
pub struct FixpointRun {
    pub stages: Vec<StageTable>,
    /// First `k` with `g^(k) = g^(k+1)`; `None` if the stage limit came first.
    pub stabilized_at: Option<usize>,
}

impl FixpointRun {
    pub fn last(&self) -> &StageTable {
        self.stages.last().expect("stage 0 is always present")
    }
}

/// Iterates from stage 0 for at most `max_stages` steps.
pub fn run_to_fixpoint(sys: &GnfSystem, universe: Arc<Universe>, max_stages: usize) -> Result<FixpointRun, EvalError> {
    let mut stages = vec![StageTable::initial(sys, universe)];
    for _ in 0..max_stages {
        let current = stages.last().expect("nonempty");
        let next = iterate_stage(sys, current)?;
        let done = next.same_entries(current);
        let k = current.stage;
        stages.push(next);
        if done {
            return Ok(FixpointRun {
                stages,
                stabilized_at: Some(k),
            });
        }
    }
    Ok(FixpointRun {
        stages,
        stabilized_at: None,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonotoneViolation {
    /// The later of the two stages compared.
    pub stage: usize,
    pub function: usize,
    pub input: HElement,
    pub before: Entry,
    pub after: Option<Entry>,
}

/// Every entry of each stage persists unchanged into the next.
pub fn verify_monotone(stages: &[StageTable]) -> Result<(), MonotoneViolation> {
    for pair in stages.windows(2) {
        let (prev, next) = (&pair[0], &pair[1]);
        for (i, w, before) in prev.iter() {
            let after = next.get(i, w);
            if after != Some(before) {
                return Err(MonotoneViolation {
                    stage: next.stage,
                    function: i,
                    input: w.clone(),
                    before: before.clone(),
                    after: after.cloned(),
                });
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub function: usize,
    pub input: HElement,
    pub table: Option<HElement>,
    pub evaluated: Option<HElement>,
}

/// Compares every `(i, w)` of the table against on-demand evaluation.
/// Missing and `Never` entries both stand for "undefined".
pub fn crosscheck_fixpoint(sys: &GnfSystem, table: &StageTable, opts: EvalOptions) -> Result<Vec<Mismatch>, EvalError> {
    let mut out = Vec::new();
    let mut evaluator = Evaluator::new(sys, opts);
    for i in 1..=table.functions() {
        for w in table.universe().elements() {
            let expected = table.get(i, w).and_then(Entry::value).cloned();
            let got = evaluator.evaluate(i, w)?.result;
            if got != expected {
                out.push(Mismatch {
                    function: i,
                    input: w.clone(),
                    table: expected,
                    evaluated: got,
                });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::element::Atom;
    use crate::fixtures;

    fn universe(names: &[&str], s: u64, r: u64) -> Arc<Universe> {
        let atoms: Vec<Atom> = names.iter().map(|n| Atom::new(n).unwrap()).collect();
        Arc::new(Universe::new(&atoms, s, r, 1_000_000).unwrap())
    }

    fn el(s: &str) -> HElement {
        s.parse().unwrap()
    }

    #[test]
    fn mirror_first_stage_over_a() {
        let sys = GnfSystem::parse(fixtures::MIRROR).unwrap();
        let t0 = StageTable::initial(&sys, universe(&["a"], 2, 1));
        assert_eq!(t0.defined_count(1), 1);
        let t1 = iterate_stage(&sys, &t0).unwrap();
        assert_eq!(t1.stage, 1);
        assert_eq!(t1.get(1, &el("<>")), Some(&Entry::Defined(el("<>"))));
        assert_eq!(t1.get(1, &el("<a>")), Some(&Entry::Defined(el("<a>"))));
        let t2 = iterate_stage(&sys, &t1).unwrap();
        assert!(t2.same_entries(&t1));
    }

    #[test]
    fn rank_bound_on_stabilization() {
        let sys = GnfSystem::parse(fixtures::MIRROR).unwrap();
        for r in 1..=4 {
            let run = run_to_fixpoint(&sys, universe(&["a", "b"], 6, r), 10).unwrap();
            let k = run.stabilized_at.unwrap();
            assert!(k as u64 <= r + 1, "rank {r}: stabilized at {k}");
            verify_monotone(&run.stages).unwrap();
            let bad = crosscheck_fixpoint(&sys, run.last(), EvalOptions::default()).unwrap();
            assert!(bad.is_empty(), "{bad:?}");
        }
    }

    #[test]
    fn initial_only_system_stabilizes_at_one() {
        let sys = GnfSystem::parse(fixtures::EMPTY).unwrap();
        let run = run_to_fixpoint(&sys, universe(&["a", "b"], 4, 2), 10).unwrap();
        assert_eq!(run.stabilized_at, Some(1));
        assert_eq!(run.stages[1].defined_count(1), run.stages[0].defined_count(1));
        verify_monotone(&run.stages).unwrap();
    }

    #[test]
    fn faults_are_detected() {
        let sys = GnfSystem::parse(fixtures::MIRROR).unwrap();
        let mut run = run_to_fixpoint(&sys, universe(&["a", "b"], 5, 3), 10).unwrap();
        let last = run.stages.len() - 1;
        assert!(run.stages[last].inject_fault());
        let v = verify_monotone(&run.stages).unwrap_err();
        assert_eq!(v.stage, run.stages[last].stage);

        let run = run_to_fixpoint(&sys, universe(&["a", "b"], 5, 3), 10).unwrap();
        let corrupt = EvalOptions {
            corrupt_memo: true,
            ..EvalOptions::default()
        };
        assert!(!crosscheck_fixpoint(&sys, run.last(), corrupt).unwrap().is_empty());
    }

    #[test]
    fn stage_limit_without_stabilization() {
        let sys = GnfSystem::parse(fixtures::MIRROR).unwrap();
        let run = run_to_fixpoint(&sys, universe(&["a"], 6, 4), 2).unwrap();
        assert_eq!(run.stabilized_at, None);
        assert_eq!(run.stages.len(), 3);
    }
}
