//! Recursion systems: the signature, per-symbol initial functions, guarded
//! gamma rules and family constants `(C, p)`, together with the static
//! condition checks run when a system is loaded.

mod analysis;
mod check;
mod parse;

use std::collections::BTreeMap;
use std::fmt;

pub use analysis::{
    c4_cost_poly, check_c5_bound, gamma_cost_poly, initial_cost_poly, substitution_cost_poly,
};
pub use check::{
    check_c1, check_c2, check_c3, check_c4_static, check_c5_static, check_instance, check_system, instance_violation,
    CheckReport, Condition, Finding, RuleCheck, Status, Verdict,
};

use crate::cost::{Charge, Meter};
use crate::element::{Atom, HElement};
use crate::error::{EvalError, SystemError};
use crate::signature::Signature;
use crate::term::Term;

/// Family constants of one recursive symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Family {
    pub c: u64,
    pub p: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GuardPrim {
    IsAtom,
    IsList,
    /// Component count equals `k` (atoms have zero components).
    ArityEq(usize),
    ArityGe(usize),
    /// First component is this atom.
    HeadIs(Atom),
}

impl GuardPrim {
    fn holds(&self, w: &HElement) -> bool {
        match self {
            GuardPrim::IsAtom => w.is_atom(),
            GuardPrim::IsList => w.is_list(),
            GuardPrim::ArityEq(k) => w.components().len() == *k,
            GuardPrim::ArityGe(k) => w.components().len() >= *k,
            GuardPrim::HeadIs(a) => matches!(w.components().first(), Some(HElement::Atom(h)) if h == a),
        }
    }
}

impl fmt::Display for GuardPrim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GuardPrim::IsAtom => f.write_str("is_atom"),
            GuardPrim::IsList => f.write_str("is_list"),
            GuardPrim::ArityEq(k) => write!(f, "arity = {k}"),
            GuardPrim::ArityGe(k) => write!(f, "arity >= {k}"),
            GuardPrim::HeadIs(a) => write!(f, "head_is {a}"),
        }
    }
}

/// A conjunction of primitives; the empty conjunction accepts everything.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Guard(pub Vec<GuardPrim>);

impl Guard {
    /// Short-circuit evaluation, charging one step per primitive evaluated.
    pub fn accepts(&self, w: &HElement, meter: &mut Meter) -> bool {
        for prim in &self.0 {
            meter.charge(Charge::GuardPrimitive, 1);
            if !prim.holds(w) {
                return false;
            }
        }
        true
    }

    /// Exact component count forced by the guard, if any.
    pub fn exact_arity(&self) -> Option<usize> {
        self.0.iter().find_map(|p| match p {
            GuardPrim::IsAtom => Some(0),
            GuardPrim::ArityEq(k) => Some(*k),
            _ => None,
        })
    }

    pub fn min_arity(&self) -> usize {
        self.0
            .iter()
            .map(|p| match p {
                GuardPrim::ArityEq(k) | GuardPrim::ArityGe(k) => *k,
                GuardPrim::HeadIs(_) => 1,
                _ => 0,
            })
            .max()
            .unwrap_or(0)
    }
}

impl fmt::Display for Guard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("any");
        }
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        f.write_str(&parts.join(" & "))
    }
}

/// How many x-variables the emitted term binds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TermArity {
    /// The term is `t(x1..xm)` regardless of the input.
    Exact(usize),
    /// A `listof` template: one variable per component, at least `min`.
    Variadic { min: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GammaRule {
    pub guard: Guard,
    pub template: Term,
}

impl GammaRule {
    pub fn arity_mode(&self) -> TermArity {
        if let Some(m) = self.guard.exact_arity() {
            TermArity::Exact(m)
        } else if self.template.is_variadic() {
            TermArity::Variadic {
                min: self.guard.min_arity().max(self.template.max_x_index()),
            }
        } else {
            TermArity::Exact(self.template.max_x_index())
        }
    }

    /// The family member emitted for an input with `components` children,
    /// together with its x-arity.
    pub fn instantiate(&self, components: usize) -> (Term, usize) {
        match self.arity_mode() {
            TermArity::Exact(m) => (self.template.expand(m), m),
            TermArity::Variadic { .. } => (self.template.expand(components), components),
        }
    }

    /// A member that exhibits every pattern of the template: all concrete
    /// indices are in range and the iteration index takes at least one value.
    pub fn representative(&self) -> Term {
        match self.arity_mode() {
            TermArity::Exact(m) => self.template.expand(m),
            TermArity::Variadic { min } => self.template.expand(min.max(1)),
        }
    }

    pub fn guard_len(&self) -> u64 {
        self.guard.0.len() as u64
    }
}

/// `f_i^(0)`: a finite table plus an optional identity rule on atoms.
/// Undefinedness is absence; table values are never `false`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct InitialFn {
    pub table: BTreeMap<HElement, HElement>,
    pub atoms_identity: bool,
}

impl InitialFn {
    pub fn get(&self, w: &HElement) -> Option<HElement> {
        if let Some(v) = self.table.get(w) {
            return Some(v.clone());
        }
        if self.atoms_identity && w.is_atom() && !w.is_false() {
            return Some(w.clone());
        }
        None
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecFunction {
    /// 1-based index `i` of `f_i`.
    pub index: usize,
    pub family: Family,
    pub initial: InitialFn,
    pub rules: Vec<GammaRule>,
}

impl RecFunction {
    pub fn name(&self) -> String {
        format!("f{}", self.index)
    }
}

/// Result of running `gamma_i` on an input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Gamma {
    False,
    Term {
        /// 1-based rule number.
        rule: usize,
        term: Term,
        /// `|x̄|` of the emitted term.
        arity: usize,
    },
}

#[derive(Debug, Clone)]
pub struct GnfSystem {
    pub signature: Signature,
    pub functions: Vec<RecFunction>,
    /// Opaque `meta:` lines, carried but never interpreted.
    pub meta: Vec<String>,
    report: CheckReport,
}

impl GnfSystem {
    /// Loads a system: syntax, symbol resolution, structural invariants and
    /// domination of the load-time costs by each family's `(C, p)`. The
    /// static condition checks run as well; their outcome is in [`Self::report`].
    pub fn parse(text: &str) -> Result<GnfSystem, SystemError> {
        let sys = parse::parse_unchecked(text)?;
        analysis::check_load_domination(&sys)?;
        Ok(sys)
    }

    /// Like [`Self::parse`] without the domination contract, for experiments
    /// on systems that are meant to fail their checks.
    pub fn parse_unchecked(text: &str) -> Result<GnfSystem, SystemError> {
        parse::parse_unchecked(text)
    }

    pub(crate) fn assemble(signature: Signature, functions: Vec<RecFunction>, meta: Vec<String>) -> GnfSystem {
        let mut sys = GnfSystem {
            signature,
            functions,
            meta,
            report: CheckReport::default(),
        };
        sys.report = check_system(&sys);
        sys
    }

    pub fn report(&self) -> &CheckReport {
        &self.report
    }

    pub fn accepted(&self) -> bool {
        self.report.accepted()
    }

    pub fn function(&self, i: usize) -> Result<&RecFunction, EvalError> {
        i.checked_sub(1)
            .and_then(|n| self.functions.get(n))
            .ok_or(EvalError::UnknownFunction(i))
    }

    /// Resolves `f<i>` to its index.
    pub fn symbol_index(&self, name: &str) -> Option<usize> {
        let i: usize = name.strip_prefix('f')?.parse().ok()?;
        self.function(i).ok().map(|_| i)
    }

    /// Table or atom-rule hit; charges `1 + |w|`.
    pub fn initial_lookup(&self, i: usize, w: &HElement, meter: &mut Meter) -> Result<Option<HElement>, EvalError> {
        let f = self.function(i)?;
        meter.charge(Charge::InitialLookup, 1 + w.size());
        Ok(f.initial.get(w))
    }

    /// First rule whose guard accepts `w`, instantiated at `w`'s component
    /// count; `Gamma::False` when none does. Charges one step per rule
    /// scanned, one per guard primitive evaluated and the emitted term's size.
    pub fn apply_gamma(&self, i: usize, w: &HElement, meter: &mut Meter) -> Result<Gamma, EvalError> {
        let Some(r) = self.select_rule(i, w, meter)? else {
            return Ok(Gamma::False);
        };
        let (term, arity) = self.functions[i - 1].rules[r - 1].instantiate(w.components().len());
        meter.charge(Charge::Emission, term.size());
        Ok(Gamma::Term { rule: r, term, arity })
    }

    /// The 1-based number of the first rule whose guard accepts `w`.
    /// Charges the scan and the guard primitives but not the emission.
    pub fn select_rule(&self, i: usize, w: &HElement, meter: &mut Meter) -> Result<Option<usize>, EvalError> {
        let f = self.function(i)?;
        for (n, rule) in f.rules.iter().enumerate() {
            meter.charge(Charge::RuleScan, 1);
            if rule.guard.accepts(w, meter) {
                return Ok(Some(n + 1));
            }
        }
        Ok(None)
    }
}
