//! Symbolic size and cost bounds of stripped templates, and the
//! domination checks run at load time.
//!
//! Sizes are tracked as linear forms over the template's variables plus a
//! polynomial remainder; costs as polynomials in `n` (total size of the
//! bound variables) and `u` (size of the variables of one `listof`
//! iteration). Everything is an upper bound valid for every family member.

use std::collections::BTreeMap;

use num_bigint::BigInt;

use super::{GnfSystem, RecFunction, TermArity};
use crate::error::SystemError;
use crate::poly::{Poly, Poly2};
use crate::signature::{Builtin, SizeLaw, Signature};
use crate::term::{split_vars, strip_recursive, Index, Symbol, Term};

type Z = BigInt;

fn z(v: u64) -> Z {
    Z::from(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Slot {
    X(usize),
    Y(usize),
    XIter,
    YIter,
    /// `sum_i |x_i|` over all positions.
    XAll,
    YAll,
}

/// `c + k*K + sum a_s * |s|` where `K` is the arity of the family member.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
struct LinForm {
    c: u64,
    k: u64,
    vars: BTreeMap<Slot, u64>,
}

impl LinForm {
    fn constant(c: u64) -> Self {
        LinForm { c, ..LinForm::default() }
    }

    fn var(s: Slot) -> Self {
        LinForm {
            vars: BTreeMap::from([(s, 1)]),
            ..LinForm::default()
        }
    }

    fn coeff(&self, s: Slot) -> u64 {
        self.vars.get(&s).copied().unwrap_or(0)
    }

    fn plus(&self, o: &LinForm) -> LinForm {
        let mut out = self.clone();
        out.c += o.c;
        out.k += o.k;
        for (&s, &a) in &o.vars {
            *out.vars.entry(s).or_insert(0) += a;
        }
        out
    }

    fn max(&self, o: &LinForm) -> LinForm {
        let mut out = self.clone();
        out.c = out.c.max(o.c);
        out.k = out.k.max(o.k);
        for (&s, &a) in &o.vars {
            let e = out.vars.entry(s).or_insert(0);
            *e = (*e).max(a);
        }
        out
    }

    /// Largest total coefficient any single non-iteration variable receives.
    fn fixed_max(&self) -> u64 {
        let xa = self.coeff(Slot::XAll);
        let ya = self.coeff(Slot::YAll);
        self.vars.iter().fold(xa.max(ya), |m, (s, &a)| match s {
            Slot::X(_) => m.max(a + xa),
            Slot::Y(_) => m.max(a + ya),
            _ => m,
        })
    }

    fn iter_max(&self) -> u64 {
        self.coeff(Slot::XIter).max(self.coeff(Slot::YIter))
    }

    fn to_poly2(&self) -> Poly2<Z> {
        let mut p = Poly2::constant(z(self.c));
        p = &p + &Poly2::term(z(self.k + self.fixed_max()), 0, 1);
        &p + &Poly2::term(z(self.iter_max()), 1, 0)
    }
}

#[derive(Debug, Clone)]
struct SizeBound {
    lin: LinForm,
    extra: Poly2<Z>,
}

impl SizeBound {
    fn zero() -> Self {
        SizeBound {
            lin: LinForm::default(),
            extra: Poly2::zero(),
        }
    }

    fn poly(&self) -> Poly2<Z> {
        &self.lin.to_poly2() + &self.extra
    }

    fn plus(&self, o: &SizeBound) -> SizeBound {
        SizeBound {
            lin: self.lin.plus(&o.lin),
            extra: &self.extra + &o.extra,
        }
    }

    fn max(&self, o: &SizeBound) -> SizeBound {
        SizeBound {
            lin: self.lin.max(&o.lin),
            extra: self.extra.max_coeffwise(&o.extra),
        }
    }

    /// Sum of a `listof` body's bound over positions `1..=K`.
    fn summed(&self) -> SizeBound {
        let body = &self.lin;
        let mut lin = LinForm {
            c: 0,
            k: body.c,
            vars: BTreeMap::new(),
        };
        for (s, all) in [(Slot::XIter, Slot::XAll), (Slot::YIter, Slot::YAll)] {
            if body.coeff(s) > 0 {
                lin.vars.insert(all, body.coeff(s));
            }
        }
        let fixed = body
            .vars
            .iter()
            .filter(|(s, _)| matches!(s, Slot::X(_) | Slot::Y(_)))
            .map(|(_, &a)| a)
            .max()
            .unwrap_or(0);
        SizeBound {
            lin,
            extra: &self.extra.sum_over_iterations() + &Poly2::term(z(fixed), 0, 2),
        }
    }
}

struct NodeBound {
    size: SizeBound,
    cost: Poly2<Z>,
}

fn op_cost(sig: &Signature, op: Builtin, args: &SizeBound) -> Result<(Poly2<Z>, SizeLaw), String> {
    let decl = sig
        .decl(op)
        .ok_or_else(|| format!("base operation `{op}` is not declared"))?;
    let base = &Poly2::constant(z(decl.cost.c0)) + &(&Poly2::constant(z(decl.cost.c1)) * &args.poly());
    Ok((base.pow(decl.cost.degree), decl.size))
}

fn analyze(t: &Term, sig: &Signature) -> Result<NodeBound, String> {
    let leaf = |lin: LinForm| NodeBound {
        size: SizeBound {
            lin,
            extra: Poly2::zero(),
        },
        cost: Poly2::zero(),
    };
    match t {
        Term::XVar(n) => Ok(leaf(LinForm::var(Slot::X(*n)))),
        Term::YVar(n) => Ok(leaf(LinForm::var(Slot::Y(*n)))),
        Term::XIter => Ok(leaf(LinForm::var(Slot::XIter))),
        Term::YIter => Ok(leaf(LinForm::var(Slot::YIter))),
        Term::Const(e) => Ok(leaf(LinForm::constant(e.size()))),
        Term::App(Symbol::Rec(j), _) => Err(format!("unstripped call to f{j}")),
        Term::App(Symbol::Base(op), args) => {
            let args = args.iter().map(|a| analyze(a, sig)).collect::<Result<Vec<_>, _>>()?;
            let sum = args.iter().fold(SizeBound::zero(), |acc, a| acc.plus(&a.size));
            let (own, law) = op_cost(sig, *op, &sum)?;
            let cost = args.iter().fold(own, |acc, a| &acc + &a.cost);
            let size = match law {
                SizeLaw::Additive(c) => SizeBound {
                    lin: sum.lin.plus(&LinForm::constant(c)),
                    extra: sum.extra,
                },
                SizeLaw::Selective => args.iter().fold(SizeBound::zero(), |acc, a| acc.max(&a.size)),
                SizeLaw::Constant(c) => SizeBound {
                    lin: LinForm::constant(c),
                    extra: Poly2::zero(),
                },
            };
            Ok(NodeBound { size, cost })
        }
        Term::ListOf(body, _) => {
            let b = analyze(body, sig)?;
            let sum = b.size.summed();
            let (own, law) = op_cost(sig, Builtin::List, &sum)?;
            let SizeLaw::Additive(c) = law else {
                return Err(format!("`list` must have an additive size law, declared {law}"));
            };
            Ok(NodeBound {
                size: SizeBound {
                    lin: sum.lin.plus(&LinForm::constant(c)),
                    extra: sum.extra,
                },
                cost: &own + &b.cost.sum_over_iterations(),
            })
        }
    }
}

/// Upper bound, in `N = |x̄| + |ȳ|`, on the base-operation cost of
/// evaluating any ground instance of the stripped term.
pub fn c4_cost_poly(stripped: &Term, sig: &Signature) -> Result<Poly<Z>, String> {
    Ok(analyze(stripped, sig)?.cost.collapse())
}

/// Checks that the value of every instance with `V_y` non-empty has size at
/// most `|w| + |l|`, i.e. that the term adds no more nodes than the sizes of
/// the x-variables it drops. `stripped` is the template itself for variadic
/// rules and the expanded member for exact ones.
pub fn check_c5_bound(stripped: &Term, mode: TermArity, sig: &Signature) -> Result<(), String> {
    let (_, vy) = split_vars(stripped);
    if vy.is_empty() {
        return Ok(());
    }
    let size = analyze(stripped, sig)?.size;
    if !size.extra.is_zero() {
        return Err(format!("the size of {stripped} is not linear in its variables"));
    }
    let lin = size.lin;
    let ax = lin.coeff(Slot::XAll);
    let ay = lin.coeff(Slot::YAll);
    for (&s, &a) in &lin.vars {
        let (name, total) = match s {
            Slot::X(n) => (format!("x{n}"), a + ax),
            Slot::Y(n) => (format!("y{n}"), a + ay),
            Slot::XAll => ("x[i]".to_string(), a),
            Slot::YAll => ("y[i]".to_string(), a),
            Slot::XIter | Slot::YIter => unreachable!("iteration slots are summed away"),
        };
        if total > 1 {
            return Err(format!("{name} is counted {total} times in the size of {stripped}"));
        }
    }
    let overhead_err = |over: String, slack: String| {
        Err(format!(
            "{stripped} adds {over} node(s) beyond its variables but leaves out only {slack} x/y variable(s)"
        ))
    };
    match mode {
        TermArity::Exact(m) => {
            let zero_x = (1..=m).filter(|&n| lin.coeff(Slot::X(n)) == 0).count() as u64;
            let zero_y = vy
                .iter()
                .filter(|i| matches!(i, Index::At(n) if lin.coeff(Slot::Y(*n)) == 0))
                .count() as u64;
            let over = lin.c + lin.k * m as u64;
            if over > zero_x + zero_y {
                return overhead_err(over.to_string(), (zero_x + zero_y).to_string());
            }
        }
        TermArity::Variadic { min } => {
            let has_fixed_y = vy.iter().any(|i| matches!(i, Index::At(_)));
            let k_min = if has_fixed_y { min } else { min.max(1) } as i64;
            let used = |pick: fn(&Slot) -> bool| lin.vars.iter().filter(|(s, &a)| pick(s) && a > 0).count() as i64;
            let (mut s0, mut s1) = (0i64, 0i64);
            if ax == 0 {
                s0 -= used(|s| matches!(s, Slot::X(_)));
                s1 += 1;
            }
            if vy.contains(&Index::Each) {
                if ay == 0 {
                    s0 -= used(|s| matches!(s, Slot::Y(_)));
                    s1 += 1;
                }
            } else {
                s0 += vy
                    .iter()
                    .filter(|i| matches!(i, Index::At(n) if lin.coeff(Slot::Y(*n)) == 0))
                    .count() as i64;
            }
            let (c, k) = (lin.c as i64, lin.k as i64);
            if k > s1 || c + k * k_min > s0 + s1 * k_min {
                let over = if k == 0 { c.to_string() } else { format!("{c}+{k}k") };
                let slack = match (s0, s1) {
                    (s0, 0) => s0.to_string(),
                    (0, s1) => format!("{s1}k"),
                    (s0, s1) if s0 < 0 => format!("{s1}k-{}", -s0),
                    (s0, s1) => format!("{s1}k+{s0}"),
                };
                return overhead_err(over, slack);
            }
        }
    }
    Ok(())
}

/// `(all nodes, non-variable nodes)` as `fixed + per_k * K`.
fn node_counts(t: &Term) -> [u64; 4] {
    match t {
        Term::XVar(_) | Term::YVar(_) | Term::XIter | Term::YIter => [1, 0, 0, 0],
        Term::Const(e) => [e.size(), 0, e.size(), 0],
        Term::App(_, args) => args.iter().fold([1, 0, 1, 0], |acc, a| {
            let c = node_counts(a);
            [acc[0] + c[0], acc[1] + c[1], acc[2] + c[2], acc[3] + c[3]]
        }),
        Term::ListOf(body, _) => {
            let b = node_counts(body);
            [1, b[0], 1, b[2]]
        }
    }
}

fn occurrences(t: &Term) -> SizeBound {
    match t {
        Term::XVar(n) => SizeBound {
            lin: LinForm::var(Slot::X(*n)),
            extra: Poly2::zero(),
        },
        Term::YVar(n) => SizeBound {
            lin: LinForm::var(Slot::Y(*n)),
            extra: Poly2::zero(),
        },
        Term::XIter => SizeBound {
            lin: LinForm::var(Slot::XIter),
            extra: Poly2::zero(),
        },
        Term::YIter => SizeBound {
            lin: LinForm::var(Slot::YIter),
            extra: Poly2::zero(),
        },
        Term::Const(_) => SizeBound::zero(),
        Term::App(_, args) => args.iter().fold(SizeBound::zero(), |acc, a| acc.plus(&occurrences(a))),
        Term::ListOf(body, _) => occurrences(body).summed(),
    }
}

/// Bound in `N` on stripping plus substitution for a rule: the stripped
/// term's size plus the ground term's size.
pub fn substitution_cost_poly(stripped: &Term) -> Poly<Z> {
    let [all, all_k, nonvar, nonvar_k] = node_counts(stripped);
    let nodes = Poly::from_coeffs(vec![z(all + nonvar), z(all_k + nonvar_k)]);
    &nodes + &occurrences(stripped).poly().collapse()
}

/// Bound in `W = |w|` on running gamma up to and including rule `r`
/// (1-based) and emitting its term; `r = rules + 1` is the no-match case.
pub fn gamma_cost_poly(f: &RecFunction, r: usize) -> Poly<Z> {
    let scanned: u64 = f.rules.iter().take(r).map(|rule| 1 + rule.guard_len()).sum();
    let Some(rule) = f.rules.get(r.wrapping_sub(1)) else {
        return Poly::constant(z(scanned));
    };
    match rule.arity_mode() {
        TermArity::Exact(m) => Poly::constant(z(scanned + rule.template.expand(m).size())),
        TermArity::Variadic { .. } => {
            // A list of size W has at most W - 1 components.
            let a = rule.template.expand(0).size();
            let b = rule.template.expand(1).size() - a;
            Poly::from_coeffs(vec![z(scanned + a) - z(b), z(b)])
        }
    }
}

/// `1 + W`, the charge of an initial lookup or a memo probe.
pub fn initial_cost_poly() -> Poly<Z> {
    Poly::from_coeffs(vec![z(1), z(1)])
}

/// The stripped member analyzed for a rule: the template for variadic
/// rules, the fixed expansion otherwise.
pub(crate) fn analyzed_member(f: &RecFunction, r: usize) -> Result<(Term, TermArity), crate::error::StripError> {
    let rule = &f.rules[r - 1];
    let mode = rule.arity_mode();
    let member = match mode {
        TermArity::Exact(m) => rule.template.expand(m),
        TermArity::Variadic { .. } => rule.template.clone(),
    };
    Ok((strip_recursive(&member)?.0, mode))
}

pub(crate) fn check_load_domination(sys: &GnfSystem) -> Result<(), SystemError> {
    for f in &sys.functions {
        let (c, p) = (f.family.c, f.family.p);
        let fail = |what: String| {
            Err(SystemError::Domination {
                function: f.name(),
                c,
                p,
                what,
            })
        };
        let bound = z(c);
        let init = initial_cost_poly();
        if !init.dominated_by(&bound, p) {
            return fail(format!("the initial lookup cost {init}"));
        }
        for r in 1..=f.rules.len() + 1 {
            let g = gamma_cost_poly(f, r);
            if !g.dominated_by(&bound, p) {
                let which = if r > f.rules.len() {
                    "when no rule matches".to_string()
                } else {
                    format!("up to rule {r}")
                };
                return fail(format!("the gamma cost {g} {which}"));
            }
        }
        for (n, rule) in f.rules.iter().enumerate() {
            let Ok((stripped, _)) = analyzed_member(f, n + 1) else {
                continue;
            };
            let s = substitution_cost_poly(&stripped);
            if !s.dominated_by(&bound, p) {
                return fail(format!("the stripping and substitution cost {s} of rule {}", n + 1));
            }
            for op in rule.template.base_ops() {
                let Some(decl) = sys.signature.decl(op) else { continue };
                let cost = Poly::from_coeffs(vec![z(decl.cost.c0), z(decl.cost.c1)]).pow(decl.cost.degree);
                if !cost.dominated_by(&bound, p) {
                    return fail(format!("the cost {} of base operation {op}", decl.cost));
                }
            }
        }
    }
    Ok(())
}
