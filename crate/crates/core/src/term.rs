//! Terms over the signature: parsing, variable analysis, stripping of
//! recursive calls, substitution and metered ground evaluation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::cost::{Charge, Meter};
use crate::element::{Cursor, HElement};
use crate::error::{EvalError, StripError, SyntaxError, TermError};
use crate::signature::{Arity, Builtin, Signature};

/// A variable index: a concrete position, or the iteration index `[i]` of a
/// `listof` body.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Index {
    At(usize),
    Each,
}

impl fmt::Display for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Index::At(n) => write!(f, "{n}"),
            Index::Each => f.write_str("[i]"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    X(Index),
    Y(Index),
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::X(i) => write!(f, "x{i}"),
            Var::Y(i) => write!(f, "y{i}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Order {
    Asc,
    Desc,
}

impl Order {
    /// Positions `1..=k` in this order.
    pub fn positions(self, k: usize) -> Vec<usize> {
        match self {
            Order::Asc => (1..=k).collect(),
            Order::Desc => (1..=k).rev().collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Symbol {
    Base(Builtin),
    /// Recursive symbol `f<j>`, 1-based.
    Rec(usize),
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Base(b) => f.write_str(b.name()),
            Symbol::Rec(j) => write!(f, "f{j}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    XVar(usize),
    YVar(usize),
    /// `x[i]`, only inside a `listof` body.
    XIter,
    /// `y[i]`, only inside a `listof` body.
    YIter,
    /// A literal element: an atom constant in templates, any value once ground.
    Const(HElement),
    App(Symbol, Vec<Term>),
    /// One term per arity `k`: `list(body[1..k])` in the given order.
    ListOf(Box<Term>, Order),
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::XVar(n) => write!(f, "x{n}"),
            Term::YVar(n) => write!(f, "y{n}"),
            Term::XIter => f.write_str("x[i]"),
            Term::YIter => f.write_str("y[i]"),
            Term::Const(e) => write!(f, "{e}"),
            Term::App(sym, args) => {
                write!(f, "{sym}(")?;
                for (n, a) in args.iter().enumerate() {
                    if n > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
            Term::ListOf(body, order) => {
                let o = match order {
                    Order::Asc => "asc",
                    Order::Desc => "desc",
                };
                write!(f, "listof({body},{o})")
            }
        }
    }
}

/// Path from the root to a subterm as argument positions.
pub type TermPath = Vec<usize>;

pub fn render_path(path: &[usize]) -> String {
    if path.is_empty() {
        "root".to_string()
    } else {
        path.iter().map(|n| format!("/{n}")).collect()
    }
}

impl Term {
    pub fn app(op: Builtin, args: Vec<Term>) -> Term {
        Term::App(Symbol::Base(op), args)
    }

    pub fn call(j: usize, arg: Term) -> Term {
        Term::App(Symbol::Rec(j), vec![arg])
    }

    pub fn render(&self) -> String {
        self.to_string()
    }

    /// Node count; literal elements count their own size.
    pub fn size(&self) -> u64 {
        match self {
            Term::Const(e) => e.size(),
            Term::App(_, args) => 1 + args.iter().map(Term::size).sum::<u64>(),
            Term::ListOf(body, _) => 1 + body.size(),
            _ => 1,
        }
    }

    pub fn children(&self) -> &[Term] {
        match self {
            Term::App(_, args) => args,
            Term::ListOf(body, _) => std::slice::from_ref(body),
            _ => &[],
        }
    }

    /// Pre-order traversal with paths.
    pub fn walk<'a>(&'a self, visit: &mut impl FnMut(&'a Term, &TermPath)) {
        fn go<'a>(t: &'a Term, path: &mut TermPath, visit: &mut impl FnMut(&'a Term, &TermPath)) {
            visit(t, path);
            for (n, c) in t.children().iter().enumerate() {
                path.push(n);
                go(c, path, visit);
                path.pop();
            }
        }
        go(self, &mut Vec::new(), visit)
    }

    pub fn is_variadic(&self) -> bool {
        let mut found = false;
        self.walk(&mut |t, _| found |= matches!(t, Term::ListOf(..)));
        found
    }

    pub fn mentions_recursive(&self) -> bool {
        let mut found = false;
        self.walk(&mut |t, _| found |= matches!(t, Term::App(Symbol::Rec(_), _)));
        found
    }

    pub fn mentions_y(&self) -> bool {
        let mut found = false;
        self.walk(&mut |t, _| found |= matches!(t, Term::YVar(_) | Term::YIter));
        found
    }

    /// Largest concrete x-index, 0 when there is none.
    pub fn max_x_index(&self) -> usize {
        let mut m = 0;
        self.walk(&mut |t, _| {
            if let Term::XVar(n) = t {
                m = m.max(*n)
            }
        });
        m
    }

    /// Every application `f_j(v)` whose argument is a single x-variable.
    pub fn recursive_calls(&self) -> Vec<(usize, Index, TermPath)> {
        let mut out = Vec::new();
        self.walk(&mut |t, path| {
            if let Term::App(Symbol::Rec(j), args) = t {
                match args.as_slice() {
                    [Term::XVar(n)] => out.push((*j, Index::At(*n), path.clone())),
                    [Term::XIter] => out.push((*j, Index::Each, path.clone())),
                    _ => {}
                }
            }
        });
        out
    }

    /// The base operations the term applies, `list` included for `listof`.
    pub fn base_ops(&self) -> BTreeSet<Builtin> {
        let mut out = BTreeSet::new();
        self.walk(&mut |t, _| match t {
            Term::App(Symbol::Base(b), _) => {
                out.insert(*b);
            }
            Term::ListOf(..) => {
                out.insert(Builtin::List);
            }
            _ => {}
        });
        out
    }

    /// The member of the term family at arity `k`: every `listof` becomes a
    /// `list` application over positions `1..=k`.
    pub fn expand(&self, k: usize) -> Term {
        match self {
            Term::ListOf(body, order) => Term::App(
                Symbol::Base(Builtin::List),
                order.positions(k).into_iter().map(|n| body.instantiate_index(n)).collect(),
            ),
            Term::App(sym, args) => Term::App(*sym, args.iter().map(|a| a.expand(k)).collect()),
            other => other.clone(),
        }
    }

    fn instantiate_index(&self, n: usize) -> Term {
        match self {
            Term::XIter => Term::XVar(n),
            Term::YIter => Term::YVar(n),
            Term::App(sym, args) => Term::App(*sym, args.iter().map(|a| a.instantiate_index(n)).collect()),
            Term::ListOf(body, order) => Term::ListOf(Box::new(body.instantiate_index(n)), *order),
            other => other.clone(),
        }
    }
}

/// Free variables of a term (`V(t)`); iteration variables appear as `Index::Each`.
pub fn free_vars(t: &Term) -> BTreeSet<Var> {
    let mut out = BTreeSet::new();
    t.walk(&mut |s, _| match s {
        Term::XVar(n) => {
            out.insert(Var::X(Index::At(*n)));
        }
        Term::YVar(n) => {
            out.insert(Var::Y(Index::At(*n)));
        }
        Term::XIter => {
            out.insert(Var::X(Index::Each));
        }
        Term::YIter => {
            out.insert(Var::Y(Index::Each));
        }
        _ => {}
    });
    out
}

/// Free variables of the family member at arity `k`.
pub fn free_vars_at(t: &Term, k: usize) -> BTreeSet<Var> {
    free_vars(&t.expand(k))
}

/// `(V_x, V_y)` as index sets.
pub fn split_vars(t: &Term) -> (BTreeSet<Index>, BTreeSet<Index>) {
    let mut xs = BTreeSet::new();
    let mut ys = BTreeSet::new();
    for v in free_vars(t) {
        match v {
            Var::X(i) => xs.insert(i),
            Var::Y(i) => ys.insert(i),
        };
    }
    (xs, ys)
}

/// Records which recursive symbol each `y_i` stands for; `y_i` replaced `f_j(x_i)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CallMap {
    entries: BTreeMap<Index, usize>,
}

impl CallMap {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// `(y-index, j, x-index)` triples; the two indices always coincide.
    pub fn entries(&self) -> impl Iterator<Item = (Index, usize, Index)> + '_ {
        self.entries.iter().map(|(&i, &j)| (i, j, i))
    }

    pub fn symbol_for(&self, index: Index) -> Option<usize> {
        self.entries.get(&index).copied()
    }
}

/// `t ↦ t^y`: replaces every `f_j(x_i)` by `y_i`.
pub fn strip_recursive(t: &Term) -> Result<(Term, CallMap), StripError> {
    fn go(t: &Term, path: &mut TermPath, calls: &mut CallMap) -> Result<Term, StripError> {
        match t {
            Term::App(Symbol::Rec(j), args) => {
                let (index, stripped) = match args.as_slice() {
                    [Term::XVar(n)] => (Index::At(*n), Term::YVar(*n)),
                    [Term::XIter] => (Index::Each, Term::YIter),
                    _ => {
                        let arg = args.iter().map(Term::render).collect::<Vec<_>>().join(",");
                        path.push(0);
                        let p = render_path(path);
                        path.pop();
                        return Err(StripError::NotVariable { arg, path: p });
                    }
                };
                match calls.entries.insert(index, *j) {
                    Some(prev) if prev != *j => Err(StripError::ConflictingSymbols {
                        index: index.to_string(),
                        first: prev.min(*j),
                        second: prev.max(*j),
                    }),
                    _ => Ok(stripped),
                }
            }
            Term::App(sym, args) => {
                let mut out = Vec::with_capacity(args.len());
                for (n, a) in args.iter().enumerate() {
                    path.push(n);
                    out.push(go(a, path, calls)?);
                    path.pop();
                }
                Ok(Term::App(*sym, out))
            }
            Term::ListOf(body, order) => {
                path.push(0);
                let b = go(body, path, calls)?;
                path.pop();
                Ok(Term::ListOf(Box::new(b), *order))
            }
            other => Ok(other.clone()),
        }
    }
    let mut calls = CallMap::default();
    let stripped = go(t, &mut Vec::new(), &mut calls)?;
    Ok((stripped, calls))
}

/// Values for `x1..xk` (positionally) and for the y-variables in use.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Binding {
    pub x: Vec<HElement>,
    pub y: BTreeMap<usize, HElement>,
}

impl Binding {
    pub fn new(x: Vec<HElement>) -> Self {
        Binding { x, y: BTreeMap::new() }
    }

    pub fn x_size(&self) -> u64 {
        self.x.iter().map(HElement::size).sum()
    }

    pub fn y_size(&self) -> u64 {
        self.y.values().map(HElement::size).sum()
    }
}

/// Simultaneous substitution of bound values; charges the ground result's size.
pub fn substitute(t: &Term, b: &Binding, meter: &mut Meter) -> Result<Term, TermError> {
    fn go(t: &Term, b: &Binding) -> Result<Term, TermError> {
        Ok(match t {
            Term::XVar(n) => Term::Const(
                b.x.get(n.wrapping_sub(1))
                    .cloned()
                    .ok_or_else(|| TermError::UnboundVariable(format!("x{n}")))?,
            ),
            Term::YVar(n) => Term::Const(
                b.y.get(n)
                    .cloned()
                    .ok_or_else(|| TermError::UnboundVariable(format!("y{n}")))?,
            ),
            Term::XIter | Term::YIter => return Err(TermError::StrayIterVariable(t.render())),
            Term::ListOf(..) | Term::App(Symbol::Rec(_), _) => return Err(TermError::NotGround(t.render())),
            Term::Const(e) => Term::Const(e.clone()),
            Term::App(sym, args) => Term::App(*sym, args.iter().map(|a| go(a, b)).collect::<Result<_, _>>()?),
        })
    }
    let ground = go(t, b)?;
    meter.charge(Charge::Substitution, ground.size());
    Ok(ground)
}

/// Bottom-up, left-to-right evaluation of a ground term. Each base operation
/// charges its declared cost on the sum of its argument sizes.
pub fn eval_ground(t: &Term, sig: &Signature, meter: &mut Meter) -> Result<HElement, EvalError> {
    match t {
        Term::Const(e) => Ok(e.clone()),
        Term::App(Symbol::Base(op), args) => {
            let decl = sig
                .decl(*op)
                .ok_or_else(|| TermError::UnknownSymbol(op.name().to_string()))?;
            let values = args
                .iter()
                .map(|a| eval_ground(a, sig, meter))
                .collect::<Result<Vec<_>, _>>()?;
            let sum: u64 = values.iter().map(HElement::size).sum();
            meter.charge(Charge::BaseOp, decl.cost.eval(sum));
            op.apply(&values).ok_or_else(|| EvalError::Domain {
                op: op.name().to_string(),
                args: values.iter().map(HElement::render).collect::<Vec<_>>().join(","),
            })
        }
        other => Err(TermError::NotGround(other.render()).into()),
    }
}

/// Parses a term against a signature.
pub fn parse_term(text: &str, sig: &Signature) -> Result<Term, TermError> {
    let mut p = TermParser {
        cur: Cursor::new(text),
        sig,
        in_listof: false,
    };
    let t = p.term()?;
    p.cur.finish()?;
    Ok(t)
}

struct TermParser<'a> {
    cur: Cursor<'a>,
    sig: &'a Signature,
    in_listof: bool,
}

fn var_index(ident: &str, prefix: char) -> Option<usize> {
    let digits = ident.strip_prefix(prefix)?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) || digits.starts_with('0') {
        return None;
    }
    digits.parse().ok()
}

impl TermParser<'_> {
    fn term(&mut self) -> Result<Term, TermError> {
        if self.cur.peek() == Some('<') {
            let start = self.cur.pos();
            let e = self.cur.element()?;
            self.check_atoms(&e, start)?;
            return Ok(Term::Const(e));
        }
        let start = self.cur.pos();
        let ident = self.cur.ident()?;
        if self.cur.peek() == Some('[') {
            let iter = match ident {
                "x" => Term::XIter,
                "y" => Term::YIter,
                _ => return Err(self.cur.error("only `x[i]` and `y[i]` take an index").into()),
            };
            self.cur.expect('[')?;
            if self.cur.ident()? != "i" {
                return Err(self.cur.error("expected iteration index `i`").into());
            }
            self.cur.expect(']')?;
            if !self.in_listof {
                return Err(TermError::StrayIterVariable(iter.render()));
            }
            return Ok(iter);
        }
        if let Some(n) = var_index(ident, 'x') {
            return Ok(Term::XVar(n));
        }
        if let Some(n) = var_index(ident, 'y') {
            return Ok(Term::YVar(n));
        }
        if self.cur.peek() != Some('(') {
            let e = HElement::atom(ident).map_err(|e| SyntaxError::new(start, e.message))?;
            self.check_atoms(&e, start)?;
            return Ok(Term::Const(e));
        }
        self.cur.expect('(')?;
        if ident == "listof" {
            return self.listof();
        }
        let sym = if let Some(j) = var_index(ident, 'f') {
            if j > self.sig.recursive {
                return Err(TermError::UnknownSymbol(ident.to_string()));
            }
            Symbol::Rec(j)
        } else {
            match Builtin::from_name(ident).filter(|b| self.sig.decl(*b).is_some()) {
                Some(b) => Symbol::Base(b),
                None => return Err(TermError::UnknownSymbol(ident.to_string())),
            }
        };
        let mut args = Vec::new();
        if !self.cur.eat(')') {
            loop {
                args.push(self.term()?);
                if self.cur.eat(',') {
                    continue;
                }
                self.cur.expect(')')?;
                break;
            }
        }
        let arity = match sym {
            Symbol::Rec(_) => Arity::Fixed(1),
            Symbol::Base(b) => b.arity(),
        };
        if !arity.accepts(args.len()) {
            return Err(TermError::ArityMismatch {
                symbol: ident.to_string(),
                expected: arity.to_string(),
                got: args.len(),
            });
        }
        Ok(Term::App(sym, args))
    }

    fn listof(&mut self) -> Result<Term, TermError> {
        if self.in_listof {
            return Err(TermError::NestedListOf);
        }
        if self.sig.decl(Builtin::List).is_none() {
            return Err(TermError::UnknownSymbol("list (required by listof)".to_string()));
        }
        self.in_listof = true;
        let body = self.term();
        self.in_listof = false;
        let body = body?;
        self.cur.expect(',')?;
        let order = match self.cur.ident()? {
            "asc" => Order::Asc,
            "desc" => Order::Desc,
            other => return Err(self.cur.error(format!("expected `asc` or `desc`, got `{other}`")).into()),
        };
        self.cur.expect(')')?;
        Ok(Term::ListOf(Box::new(body), order))
    }

    fn check_atoms(&self, e: &HElement, pos: usize) -> Result<(), TermError> {
        self.sig
            .alphabet
            .admits(e)
            .map_err(|a| SyntaxError::new(pos, format!("unknown atom `{a}`")).into())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::element::Alphabet;
    use crate::signature::BaseOpDecl;
    use proptest::prelude::*;

    fn sig() -> Signature {
        Signature::new(
            Alphabet::new(["a", "b", "c"]).unwrap(),
            Builtin::ALL.into_iter().map(BaseOpDecl::reference),
            2,
        )
    }

    fn t(s: &str) -> Term {
        parse_term(s, &sig()).unwrap()
    }

    fn el(s: &str) -> HElement {
        s.parse().unwrap()
    }

    #[test]
    fn parse_examples() {
        assert_eq!(t("conc(x1,x2)"), Term::app(Builtin::Conc, vec![Term::XVar(1), Term::XVar(2)]));
        assert_eq!(t("f1(x2)"), Term::call(1, Term::XVar(2)));
        assert_eq!(t("listof(y[i], desc)"), Term::ListOf(Box::new(Term::YIter), Order::Desc));
        assert_eq!(t("a"), Term::Const(el("a")));
        assert_eq!(t("<a,<>>"), Term::Const(el("<a,<>>")));
    }

    #[test]
    fn parse_errors() {
        let s = sig();
        assert!(matches!(parse_term("foo(x1)", &s), Err(TermError::UnknownSymbol(_))));
        assert!(matches!(parse_term("f3(x1)", &s), Err(TermError::UnknownSymbol(_))));
        assert!(matches!(parse_term("conc(x1)", &s), Err(TermError::ArityMismatch { .. })));
        assert!(matches!(parse_term("f1(x1,x2)", &s), Err(TermError::ArityMismatch { .. })));
        assert!(matches!(parse_term("x[i]", &s), Err(TermError::StrayIterVariable(_))));
        assert!(matches!(
            parse_term("listof(listof(x[i],asc),asc)", &s),
            Err(TermError::NestedListOf)
        ));
        assert!(matches!(parse_term("d", &s), Err(TermError::Syntax(_))));
        assert!(matches!(parse_term("conc(x1,x2", &s), Err(TermError::Syntax(_))));
        assert!(matches!(parse_term("x0", &s), Err(TermError::Syntax(_))));
    }

    #[test]
    fn listof_requires_declared_list() {
        let s = Signature::new(Alphabet::new(["a"]).unwrap(), [BaseOpDecl::reference(Builtin::Conc)], 1);
        assert!(parse_term("listof(x[i],asc)", &s).is_err());
        assert!(parse_term("list(x1)", &s).is_err());
    }

    #[test]
    fn free_vars_examples() {
        assert_eq!(free_vars(&t("conc(x1,x1)")), BTreeSet::from([Var::X(Index::At(1))]));
        let ys: BTreeSet<Var> = (1..=3).map(|n| Var::Y(Index::At(n))).collect();
        assert_eq!(free_vars_at(&t("listof(y[i],desc)"), 3), ys);
        assert!(free_vars(&t("a")).is_empty());
    }

    #[test]
    fn split_vars_examples() {
        assert_eq!(
            split_vars(&t("conc(x1,y2)")),
            (BTreeSet::from([Index::At(1)]), BTreeSet::from([Index::At(2)]))
        );
        assert_eq!(split_vars(&t("a")), (BTreeSet::new(), BTreeSet::new()));
        assert_eq!(split_vars(&t("head(y1)")), (BTreeSet::new(), BTreeSet::from([Index::At(1)])));
    }

    #[test]
    fn strip_examples() {
        let (s, calls) = strip_recursive(&t("conc(f1(x2),x3)")).unwrap();
        assert_eq!(s, t("conc(y2,x3)"));
        assert_eq!(calls.entries().collect::<Vec<_>>(), vec![(Index::At(2), 1, Index::At(2))]);

        let (s, calls) = strip_recursive(&t("a")).unwrap();
        assert_eq!(s, t("a"));
        assert!(calls.is_empty());

        assert!(matches!(
            strip_recursive(&t("f1(f1(x1))")),
            Err(StripError::NotVariable { .. })
        ));
        assert!(matches!(
            strip_recursive(&t("f1(conc(x1,x2))")),
            Err(StripError::NotVariable { .. })
        ));
        assert!(matches!(
            strip_recursive(&t("conc(f1(x1),f2(x1))")),
            Err(StripError::ConflictingSymbols { .. })
        ));
        let (s, calls) = strip_recursive(&t("listof(f2(x[i]),desc)")).unwrap();
        assert_eq!(s, t("listof(y[i],desc)"));
        assert_eq!(calls.symbol_for(Index::Each), Some(2));
    }

    #[test]
    fn expansion_orders_positions() {
        assert_eq!(t("listof(f1(x[i]),desc)").expand(3), t("list(f1(x3),f1(x2),f1(x1))"));
        assert_eq!(t("listof(x[i],asc)").expand(2), t("list(x1,x2)"));
        assert_eq!(t("listof(x[i],asc)").expand(0), t("list()"));
    }

    #[test]
    fn substitute_examples() {
        let mut m = Meter::new();
        let mut b = Binding::new(vec![el("<a>")]);
        b.y.insert(1, el("<b>"));
        let g = substitute(&t("conc(x1,y1)"), &b, &mut m).unwrap();
        assert_eq!(g, Term::app(Builtin::Conc, vec![Term::Const(el("<a>")), Term::Const(el("<b>"))]));
        assert_eq!(m.total(), g.size());
        assert_eq!(g.size(), 5);

        assert_eq!(substitute(&t("a"), &b, &mut m).unwrap(), t("a"));

        let mut b = Binding::default();
        for (n, v) in ["a", "b", "c"].iter().enumerate() {
            b.y.insert(n + 1, el(v));
        }
        let g = substitute(&t("listof(y[i],desc)").expand(3), &b, &mut m).unwrap();
        assert_eq!(eval_ground(&g, &sig(), &mut m).unwrap(), el("<c,b,a>"));

        assert!(matches!(
            substitute(&t("x2"), &Binding::new(vec![el("a")]), &mut m),
            Err(TermError::UnboundVariable(_))
        ));
    }

    #[test]
    fn eval_ground_examples() {
        let s = sig();
        let mut m = Meter::new();
        assert_eq!(eval_ground(&t("conc(<a>,<b>)"), &s, &mut m).unwrap(), el("<a,b>"));
        assert_eq!(m.total(), 1 + 4);
        assert_eq!(eval_ground(&t("head(<a,b>)"), &s, &mut m).unwrap(), el("a"));
        assert!(matches!(eval_ground(&t("head(<>)"), &s, &mut m), Err(EvalError::Domain { .. })));
        assert!(eval_ground(&t("f1(<a>)"), &s, &mut m).is_err());
    }

    fn arb_template() -> impl Strategy<Value = Term> {
        let leaf = prop_oneof![
            (1usize..4).prop_map(Term::XVar),
            (1usize..4).prop_map(|n| Term::call(1, Term::XVar(n))),
            Just(Term::Const(el("a"))),
        ];
        leaf.prop_recursive(3, 16, 3, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::app(Builtin::Conc, vec![a, b])),
                inner.clone().prop_map(|a| Term::app(Builtin::Head, vec![a])),
                prop::collection::vec(inner, 0..3).prop_map(|v| Term::app(Builtin::List, v)),
            ]
        })
    }

    proptest! {
        #[test]
        fn strip_is_idempotent(template in arb_template()) {
            let (once, _) = strip_recursive(&template).unwrap();
            let (twice, calls) = strip_recursive(&once).unwrap();
            prop_assert_eq!(&twice, &once);
            prop_assert!(calls.is_empty());
            prop_assert!(!once.mentions_recursive());
        }

        #[test]
        fn strip_conserves_x_variables(template in arb_template()) {
            let (stripped, calls) = strip_recursive(&template).unwrap();
            let (vx, _) = split_vars(&stripped);
            let mut all: BTreeSet<Index> = vx;
            all.extend(calls.entries().map(|(_, _, i)| i));
            let (original, _) = split_vars(&template);
            prop_assert_eq!(all, original);
        }

        #[test]
        fn render_parse_round_trip(template in arb_template()) {
            prop_assert_eq!(parse_term(&template.render(), &sig()).unwrap(), template);
        }

        #[test]
        fn meter_counts_every_application(template in arb_template()) {
            let (stripped, calls) = strip_recursive(&template).unwrap();
            let mut b = Binding::new(vec![el("<a>"), el("<b,b>"), el("<>")]);
            for (y, _, _) in calls.entries() {
                if let Index::At(n) = y {
                    b.y.insert(n, el("<c>"));
                }
            }
            let mut m = Meter::new();
            let ground = substitute(&stripped, &b, &mut m).unwrap();
            let mut apps = 0u64;
            ground.walk(&mut |s, _| if matches!(s, Term::App(..)) { apps += 1 });
            let mut m = Meter::new();
            let first = eval_ground(&ground, &sig(), &mut m);
            if first.is_ok() {
                prop_assert!(m.total() >= apps);
            }
            let mut again = Meter::new();
            prop_assert_eq!(eval_ground(&ground, &sig(), &mut again), first);
            prop_assert_eq!(again.total(), m.total());
        }
    }
}
