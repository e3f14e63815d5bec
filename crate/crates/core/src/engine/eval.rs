use rustc_hash::FxHashMap as HashMap;
use std::fmt;

use crate::complexity::{bound_value_size, Measurement};
use crate::cost::{Charge, Meter};
use crate::element::HElement;
use crate::error::EvalError;
use crate::system::GnfSystem;
use crate::term::{eval_ground, substitute, Binding};
use crate::Bound;

use super::instance::Instances;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvalOptions {
    pub memo: bool,
    pub trace: bool,
    /// Run systems that failed their static checks. Runtime checks stay on.
    pub force: bool,
    #[doc(hidden)]
    pub corrupt_memo: bool,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            memo: true,
            trace: false,
            force: false,
            corrupt_memo: false,
        }
    }
}

/// Which branch decided a call.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Step {
    Initial,
    Rule(usize),
    False,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEvent {
    pub function: usize,
    pub input: HElement,
    pub step: Step,
}

impl fmt::Display for TraceEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "EVAL f{} {} => ", self.function, self.input)?;
        match self.step {
            Step::Initial => f.write_str("initial"),
            Step::Rule(r) => write!(f, "rule#{r}"),
            Step::False => f.write_str("false"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    /// `None` when the fixed point is undefined at the input.
    pub result: Option<HElement>,
    pub measurement: Measurement,
    pub meter: Meter,
    pub trace: Vec<TraceEvent>,
}

impl Outcome {
    /// The value, or `false` when undefined.
    pub fn render_result(&self) -> String {
        self.result.as_ref().map_or_else(|| "false".to_string(), HElement::render)
    }
}

/// Evaluates `f_i(w)` on demand. The memo lives for this one call.
pub fn evaluate(sys: &GnfSystem, i: usize, w: &HElement, opts: EvalOptions) -> Result<Outcome, EvalError> {
    Evaluator::new(sys, opts).evaluate(i, w)
}

/// Runs many evaluations against one system. Each call still gets a fresh
/// memo and meter; only the instantiated rule templates are shared.
pub struct Evaluator<'a> {
    sys: &'a GnfSystem,
    opts: EvalOptions,
    instances: Instances,
}

impl<'a> Evaluator<'a> {
    pub fn new(sys: &'a GnfSystem, opts: EvalOptions) -> Self {
        Evaluator {
            sys,
            opts,
            instances: Instances::default(),
        }
    }

    pub fn evaluate(&mut self, i: usize, w: &HElement) -> Result<Outcome, EvalError> {
        if !self.opts.force && !self.sys.accepted() {
            return Err(EvalError::NotAccepted);
        }
        let family = self.sys.function(i)?.family;
        let mut s = Session {
            sys: self.sys,
            opts: self.opts,
            instances: &mut self.instances,
            memo: HashMap::default(),
            meter: Meter::new(),
            trace: Vec::new(),
        };
        let result = s.call(i, w)?;
        Ok(Outcome {
            measurement: Measurement::new(family, w, result.as_ref(), s.meter.total()),
            result,
            meter: s.meter,
            trace: s.trace,
        })
    }
}

struct Session<'a> {
    sys: &'a GnfSystem,
    opts: EvalOptions,
    instances: &'a mut Instances,
    memo: HashMap<(usize, HElement), Option<HElement>>,
    meter: Meter,
    trace: Vec<TraceEvent>,
}

impl Session<'_> {
    fn call(&mut self, i: usize, w: &HElement) -> Result<Option<HElement>, EvalError> {
        self.meter.charge(Charge::Dispatch, 1);
        let key = (i, w.clone());
        if self.opts.memo {
            self.meter.charge(Charge::MemoProbe, 1 + w.size());
            if let Some(v) = self.memo.get(&key) {
                if self.opts.corrupt_memo {
                    return Ok(Some(v.as_ref().map_or_else(HElement::empty, |v| HElement::list([v.clone()]))));
                }
                return Ok(v.clone());
            }
        }
        let v = self.compute(i, w)?;
        if self.opts.memo {
            self.meter.charge(Charge::MemoInsert, 1 + w.size());
            self.memo.insert(key, v.clone());
        }
        Ok(v)
    }

    fn record(&mut self, function: usize, input: &HElement, step: Step) {
        if self.opts.trace {
            self.trace.push(TraceEvent {
                function,
                input: input.clone(),
                step,
            });
        }
    }

    /// Fails unless `actual <= C * max(1, base)^p` for `f_i`'s family.
    fn check_bound(&self, i: usize, w: &HElement, what: &str, actual: u64, base: u64) -> Result<(), EvalError> {
        let fam = self.sys.function(i)?.family;
        let small = bound_value_size(&u128::from(fam.c), fam.p, &u128::from(base.max(1)));
        if small.is_none_or(|b| u128::from(actual) <= b) {
            return Ok(());
        }
        let bound = bound_value_size(&Bound::from(fam.c), fam.p, &Bound::from(base.max(1))).expect("unbounded");
        if Bound::from(actual) > bound {
            return Err(EvalError::RuntimeBound {
                function: i,
                input: w.render(),
                what: what.to_string(),
                actual,
                bound: bound.to_string(),
            });
        }
        Ok(())
    }

    fn compute(&mut self, i: usize, w: &HElement) -> Result<Option<HElement>, EvalError> {
        let before = self.meter.total();
        let init = self.sys.initial_lookup(i, w, &mut self.meter)?;
        self.check_bound(i, w, "initial lookup cost", self.meter.total() - before, w.size())?;
        if let Some(v) = init {
            self.record(i, w, Step::Initial);
            return Ok(Some(v));
        }

        let before = self.meter.total();
        let gamma = self.instances.gamma(self.sys, i, w, &mut self.meter)?;
        self.check_bound(i, w, "gamma cost", self.meter.total() - before, w.size())?;
        let Some(inst) = gamma else {
            self.record(i, w, Step::False);
            return Ok(None);
        };
        let (stripped, calls) = inst.prepared(i, w)?;
        let comps = w.components();
        if inst.arity != comps.len() {
            self.record(i, w, Step::False);
            return Ok(None);
        }
        self.record(i, w, Step::Rule(inst.rule));

        let strip_cost = stripped.size();
        self.meter.charge(Charge::Strip, strip_cost);
        let mut binding = Binding::new(comps.to_vec());
        let input_rank = if calls.is_empty() { 0 } else { w.rank() };
        for &(n, j) in calls {
            let arg = &comps[n - 1];
            let arg_rank = arg.rank();
            if arg_rank >= input_rank {
                return Err(EvalError::RankDescent {
                    function: i,
                    input: w.render(),
                    arg: arg.render(),
                    arg_rank,
                    input_rank,
                });
            }
            match self.call(j, arg)? {
                Some(v) => {
                    binding.y.insert(n, v);
                }
                None => return Ok(None),
            }
        }

        let ground = substitute(stripped, &binding, &mut self.meter)?;
        let n_size = binding.x_size() + binding.y_size();
        self.check_bound(i, w, "stripping and substitution cost", strip_cost + ground.size(), n_size)?;
        let before = self.meter.total();
        let value = eval_ground(&ground, &self.sys.signature, &mut self.meter)?;
        self.check_bound(i, w, "base-operation cost", self.meter.total() - before, n_size)?;
        if !binding.y.is_empty() {
            let (w_size, l_size) = (binding.x_size(), binding.y_size());
            if value.size() > w_size + l_size {
                return Err(EvalError::RuntimeC5 {
                    function: i,
                    input: w.render(),
                    term: format!("{} = {ground}", inst.term),
                    value_size: value.size(),
                    w_size,
                    l_size,
                });
            }
        }
        Ok((!value.is_false()).then_some(value))
    }
}
