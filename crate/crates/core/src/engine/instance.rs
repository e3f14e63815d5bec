//! Rule templates instantiated once per arity and reused across calls.

use std::sync::Arc;

use rustc_hash::FxHashMap;

use crate::cost::{Charge, Meter};
use crate::element::HElement;
use crate::error::EvalError;
use crate::system::{check_instance, GnfSystem};
use crate::term::{Index, Term};

/// `(x index, symbol)` for each recursive call.
pub(crate) type Calls = Vec<(usize, usize)>;

#[derive(Debug)]
pub(crate) struct Instance {
    pub rule: usize,
    pub arity: usize,
    pub term: Term,
    /// The stripped term and its calls, or why the instance cannot be run.
    pub prepared: Result<(Term, Calls), String>,
}

impl Instance {
    fn new(sys: &GnfSystem, i: usize, rule: usize, components: usize) -> Instance {
        let (term, arity) = sys.functions[i - 1].rules[rule - 1].instantiate(components);
        let prepared = match check_instance(&term) {
            Err((cond, detail)) => Err(format!("violating {cond}: {detail}")),
            Ok((stripped, calls)) => calls
                .entries()
                .map(|(index, j, _)| match index {
                    Index::At(n) => Ok((n, j)),
                    Index::Each => Err("with an iteration index left".to_string()),
                })
                .collect::<Result<Vec<_>, _>>()
                .map(|calls| (stripped, calls)),
        };
        Instance {
            rule,
            arity,
            term,
            prepared,
        }
    }

    pub fn prepared(&self, i: usize, w: &HElement) -> Result<(&Term, &Calls), EvalError> {
        match &self.prepared {
            Ok((stripped, calls)) => Ok((stripped, calls)),
            Err(why) => Err(EvalError::Internal(format!(
                "f{i} rule {} emitted {} at {w}, {why}",
                self.rule, self.term
            ))),
        }
    }
}

#[derive(Debug, Default)]
pub(crate) struct Instances(FxHashMap<(usize, usize, usize), Arc<Instance>>);

impl Instances {
    /// Gamma at `w`, charged exactly as [`GnfSystem::apply_gamma`];
    /// `None` when no rule fires.
    pub fn gamma(
        &mut self,
        sys: &GnfSystem,
        i: usize,
        w: &HElement,
        meter: &mut Meter,
    ) -> Result<Option<Arc<Instance>>, EvalError> {
        let Some(rule) = sys.select_rule(i, w, meter)? else {
            return Ok(None);
        };
        let k = w.components().len();
        let inst = self
            .0
            .entry((i, rule, k))
            .or_insert_with(|| Arc::new(Instance::new(sys, i, rule, k)));
        meter.charge(Charge::Emission, inst.term.size());
        Ok(Some(Arc::clone(inst)))
    }
}
