//! A direct reading of the three-branch definition: no memo, no stripping,
//! recursive calls evaluated in place of their occurrences. Used as the
//! oracle for [`super::evaluate`].

use std::collections::BTreeMap;

use crate::complexity::Measurement;
use crate::cost::{Charge, Meter};
use crate::element::HElement;
use crate::error::EvalError;
use crate::system::{Gamma, GnfSystem};
use crate::term::{Index, Symbol, Term};

use super::Outcome;

pub fn evaluate_naive(sys: &GnfSystem, i: usize, w: &HElement, force: bool) -> Result<Outcome, EvalError> {
    if !force && !sys.accepted() {
        return Err(EvalError::NotAccepted);
    }
    let family = sys.function(i)?.family;
    let mut meter = Meter::new();
    let result = naive(sys, i, w, &mut meter)?;
    Ok(Outcome {
        measurement: Measurement::new(family, w, result.as_ref(), meter.total()),
        result,
        meter,
        trace: Vec::new(),
    })
}

fn naive(sys: &GnfSystem, i: usize, w: &HElement, meter: &mut Meter) -> Result<Option<HElement>, EvalError> {
    meter.charge(Charge::Dispatch, 1);
    if let Some(v) = sys.initial_lookup(i, w, meter)? {
        return Ok(Some(v));
    }
    let Gamma::Term { term, arity, .. } = sys.apply_gamma(i, w, meter)? else {
        return Ok(None);
    };
    let comps = w.components();
    if arity != comps.len() {
        return Ok(None);
    }
    // f_j(w_n) for every call in the term, by position
    let mut calls: Vec<(usize, usize)> = Vec::new();
    for (j, index, _) in term.recursive_calls() {
        match index {
            Index::At(n) => calls.push((n, j)),
            Index::Each => return Err(EvalError::Internal(format!("iteration index left in {term}"))),
        }
    }
    calls.sort_unstable();
    calls.dedup();
    let mut values = BTreeMap::new();
    for (n, j) in calls {
        match naive(sys, j, &comps[n - 1], meter)? {
            Some(v) => values.insert((j, n), v),
            None => return Ok(None),
        };
    }
    let value = direct(sys, &term, comps, &values, meter)?;
    if !values.is_empty() {
        let w_size: u64 = comps.iter().map(HElement::size).sum();
        let mut l: BTreeMap<usize, u64> = BTreeMap::new();
        for ((_, n), v) in &values {
            l.insert(*n, v.size());
        }
        let l_size: u64 = l.values().sum();
        if value.size() > w_size + l_size {
            return Err(EvalError::RuntimeC5 {
                function: i,
                input: w.render(),
                term: term.render(),
                value_size: value.size(),
                w_size,
                l_size,
            });
        }
    }
    Ok((!value.is_false()).then_some(value))
}

fn direct(
    sys: &GnfSystem,
    t: &Term,
    comps: &[HElement],
    values: &BTreeMap<(usize, usize), HElement>,
    meter: &mut Meter,
) -> Result<HElement, EvalError> {
    match t {
        Term::XVar(n) => Ok(comps[n - 1].clone()),
        Term::Const(e) => Ok(e.clone()),
        Term::App(Symbol::Rec(j), args) => match args.as_slice() {
            [Term::XVar(n)] => Ok(values[&(*j, *n)].clone()),
            _ => Err(EvalError::Internal(format!("f{j} applied to a non-variable in {t}"))),
        },
        Term::App(Symbol::Base(op), args) => {
            let decl = sys
                .signature
                .decl(*op)
                .ok_or_else(|| EvalError::Internal(format!("undeclared {op}")))?;
            let args = args
                .iter()
                .map(|a| direct(sys, a, comps, values, meter))
                .collect::<Result<Vec<_>, _>>()?;
            meter.charge(Charge::BaseOp, decl.cost.eval(args.iter().map(HElement::size).sum()));
            op.apply(&args).ok_or_else(|| EvalError::Domain {
                op: op.name().to_string(),
                args: args.iter().map(HElement::render).collect::<Vec<_>>().join(","),
            })
        }
        _ => Err(EvalError::Internal(format!("unexpanded term {t}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{evaluate, EvalOptions};
    use crate::fixtures;

    #[test]
    fn agrees_on_examples() {
        let s = GnfSystem::parse(fixtures::MIRROR).unwrap();
        for w in ["a", "<>", "<a,<b,c>>", "<<<a>>,b,<>>"] {
            let w: HElement = w.parse().unwrap();
            let memo = evaluate(&s, 1, &w, EvalOptions::default()).unwrap();
            let naive = evaluate_naive(&s, 1, &w, false).unwrap();
            assert_eq!(memo.result, naive.result);
        }
        let e = GnfSystem::parse(fixtures::EMPTY).unwrap();
        let w: HElement = "<a>".parse().unwrap();
        assert_eq!(evaluate_naive(&e, 1, &w, false).unwrap().result, None);
    }
}
