//! Base operations of the signature: the shipped implementations and the
//! cost and size metadata a system declares for them.

use std::collections::BTreeMap;
use std::fmt;

use crate::element::{Alphabet, HElement};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Arity {
    Fixed(usize),
    Variadic,
}

impl Arity {
    pub fn accepts(self, n: usize) -> bool {
        match self {
            Arity::Fixed(k) => k == n,
            Arity::Variadic => true,
        }
    }
}

impl fmt::Display for Arity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Arity::Fixed(k) => write!(f, "{k}"),
            Arity::Variadic => f.write_str("*"),
        }
    }
}

/// The shipped base operations. There is no plugin interface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Builtin {
    /// `list(a1,..,ak)` builds `<a1,..,ak>`.
    List,
    /// Concatenation of two lists.
    Conc,
    /// Prepends an element to a list.
    Cons,
    Head,
    Tail,
    Last,
    Reverse,
    Id,
}

impl Builtin {
    pub const ALL: [Builtin; 8] = [
        Builtin::List,
        Builtin::Conc,
        Builtin::Cons,
        Builtin::Head,
        Builtin::Tail,
        Builtin::Last,
        Builtin::Reverse,
        Builtin::Id,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::List => "list",
            Builtin::Conc => "conc",
            Builtin::Cons => "cons",
            Builtin::Head => "head",
            Builtin::Tail => "tail",
            Builtin::Last => "last",
            Builtin::Reverse => "reverse",
            Builtin::Id => "id",
        }
    }

    pub fn from_name(name: &str) -> Option<Builtin> {
        Builtin::ALL.into_iter().find(|b| b.name() == name)
    }

    pub fn arity(self) -> Arity {
        match self {
            Builtin::List => Arity::Variadic,
            Builtin::Conc | Builtin::Cons => Arity::Fixed(2),
            _ => Arity::Fixed(1),
        }
    }

    /// The cheapest cost descriptor a declaration may use.
    pub fn reference_cost(self) -> CostFn {
        match self {
            Builtin::Head | Builtin::Id => CostFn::new(1, 0, 1),
            _ => CostFn::new(1, 1, 1),
        }
    }

    /// The tightest size law the implementation obeys.
    pub fn reference_size(self) -> SizeLaw {
        match self {
            Builtin::List => SizeLaw::Additive(1),
            Builtin::Conc | Builtin::Cons => SizeLaw::Additive(0),
            _ => SizeLaw::Selective,
        }
    }

    pub fn apply(self, args: &[HElement]) -> Option<HElement> {
        match (self, args) {
            (Builtin::List, _) => Some(HElement::list(args.iter().cloned())),
            (Builtin::Conc, [HElement::List(a), HElement::List(b)]) => {
                Some(HElement::list(a.iter().chain(b.iter()).cloned()))
            }
            (Builtin::Cons, [x, HElement::List(b)]) => {
                Some(HElement::list(std::iter::once(x.clone()).chain(b.iter().cloned())))
            }
            (Builtin::Head, [HElement::List(a)]) => a.first().cloned(),
            (Builtin::Tail, [HElement::List(a)]) if !a.is_empty() => {
                Some(HElement::list(a[1..].iter().cloned()))
            }
            (Builtin::Last, [HElement::List(a)]) => a.last().cloned(),
            (Builtin::Reverse, [HElement::List(a)]) => Some(HElement::list(a.iter().rev().cloned())),
            (Builtin::Id, [x]) => Some(x.clone()),
            _ => None,
        }
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Cost `(c0 + c1 * S)^degree` where `S` is the sum of argument sizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CostFn {
    pub c0: u64,
    pub c1: u64,
    pub degree: u32,
}

impl CostFn {
    pub const fn new(c0: u64, c1: u64, degree: u32) -> Self {
        CostFn { c0, c1, degree }
    }

    pub fn eval(&self, arg_size_sum: u64) -> u64 {
        self.c0
            .saturating_add(self.c1.saturating_mul(arg_size_sum))
            .saturating_pow(self.degree)
    }

    /// Sufficient pointwise domination: every builtin's reference has `c0 >= 1`,
    /// so the base stays at least 1 and a larger degree only grows it.
    pub fn dominates(&self, other: &CostFn) -> bool {
        self.c0 >= other.c0
            && self.c1 >= other.c1
            && self.degree >= other.degree
            && (self.degree == other.degree || other.c0 >= 1)
    }
}

impl fmt::Display for CostFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.c1, self.degree) {
            (0, 1) => write!(f, "{}", self.c0),
            (_, 1) => write!(f, "{}+{}*sum", self.c0, self.c1),
            (0, d) => write!(f, "({})^{d}", self.c0),
            (_, d) => write!(f, "({}+{}*sum)^{d}", self.c0, self.c1),
        }
    }
}

/// How the output size relates to the argument sizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SizeLaw {
    /// `|out| <= c + sum |args|`
    Additive(u64),
    /// `|out| <= max |args|`
    Selective,
    /// `|out| <= c`
    Constant(u64),
}

impl SizeLaw {
    pub fn admits(&self, out: &HElement, args: &[HElement]) -> bool {
        let out = out.size();
        match *self {
            SizeLaw::Additive(c) => out <= c + args.iter().map(HElement::size).sum::<u64>(),
            SizeLaw::Selective => out <= args.iter().map(HElement::size).max().unwrap_or(0),
            SizeLaw::Constant(c) => out <= c,
        }
    }

    /// True when every output allowed by `other` is allowed by `self`.
    pub fn at_least_as_loose(&self, other: &SizeLaw) -> bool {
        match (*self, *other) {
            (SizeLaw::Additive(a), SizeLaw::Additive(b)) => a >= b,
            (SizeLaw::Additive(_), SizeLaw::Selective) => true,
            (SizeLaw::Additive(a), SizeLaw::Constant(b)) => a >= b,
            (SizeLaw::Selective, SizeLaw::Selective) => true,
            (SizeLaw::Constant(a), SizeLaw::Constant(b)) => a >= b,
            _ => false,
        }
    }
}

impl fmt::Display for SizeLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SizeLaw::Additive(c) => write!(f, "additive({c})"),
            SizeLaw::Selective => f.write_str("selective"),
            SizeLaw::Constant(c) => write!(f, "constant({c})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaseOpDecl {
    pub op: Builtin,
    pub arity: Arity,
    pub cost: CostFn,
    pub size: SizeLaw,
}

impl BaseOpDecl {
    /// The declaration matching the builtin's own reference metadata.
    pub fn reference(op: Builtin) -> Self {
        BaseOpDecl {
            op,
            arity: op.arity(),
            cost: op.reference_cost(),
            size: op.reference_size(),
        }
    }
}

/// What a term may mention: declared base operations, recursive symbols
/// `f1..fn`, and atoms of the alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    pub alphabet: Alphabet,
    pub base_ops: BTreeMap<Builtin, BaseOpDecl>,
    pub recursive: usize,
}

impl Signature {
    pub fn new(alphabet: Alphabet, base_ops: impl IntoIterator<Item = BaseOpDecl>, recursive: usize) -> Self {
        Signature {
            alphabet,
            base_ops: base_ops.into_iter().map(|d| (d.op, d)).collect(),
            recursive,
        }
    }

    pub fn decl(&self, op: Builtin) -> Option<&BaseOpDecl> {
        self.base_ops.get(&op)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn el(s: &str) -> HElement {
        s.parse().unwrap()
    }

    #[test]
    fn base_op_semantics() {
        assert_eq!(Builtin::Conc.apply(&[el("<a>"), el("<b>")]), Some(el("<a,b>")));
        assert_eq!(Builtin::Head.apply(&[el("<a,b>")]), Some(el("a")));
        assert_eq!(Builtin::Head.apply(&[el("<>")]), None);
        assert_eq!(Builtin::Head.apply(&[el("a")]), None);
        assert_eq!(Builtin::Cons.apply(&[el("a"), el("<b>")]), Some(el("<a,b>")));
        assert_eq!(Builtin::Tail.apply(&[el("<a,b,c>")]), Some(el("<b,c>")));
        assert_eq!(Builtin::Tail.apply(&[el("<>")]), None);
        assert_eq!(Builtin::Last.apply(&[el("<a,b>")]), Some(el("b")));
        assert_eq!(Builtin::Reverse.apply(&[el("<a,<b>>")]), Some(el("<<b>,a>")));
        assert_eq!(Builtin::List.apply(&[]), Some(el("<>")));
        assert_eq!(Builtin::Conc.apply(&[el("a"), el("<b>")]), None);
    }

    #[test]
    fn cost_fn_eval_and_display() {
        let c = CostFn::new(1, 2, 2);
        assert_eq!(c.eval(3), 49);
        assert_eq!(c.to_string(), "(1+2*sum)^2");
        assert_eq!(CostFn::new(1, 0, 1).to_string(), "1");
        assert!(CostFn::new(2, 1, 2).dominates(&CostFn::new(1, 1, 1)));
        assert!(!CostFn::new(1, 0, 1).dominates(&CostFn::new(1, 1, 1)));
    }

    #[test]
    fn size_law_looseness() {
        assert!(SizeLaw::Additive(0).at_least_as_loose(&SizeLaw::Selective));
        assert!(!SizeLaw::Selective.at_least_as_loose(&SizeLaw::Additive(0)));
        assert!(!SizeLaw::Additive(0).at_least_as_loose(&SizeLaw::Additive(1)));
        assert!(SizeLaw::Constant(3).at_least_as_loose(&SizeLaw::Constant(2)));
    }

    /// Every shipped builtin respects its reference size law on all argument
    /// tuples drawn from a small exhaustive pool.
    #[test]
    fn builtins_respect_reference_size_laws() {
        let pool: Vec<HElement> = ["a", "b", "<>", "<a>", "<a,b>", "<<a>,b>", "<<>,<b,a>>", "<a,<a,<b>>>"]
            .iter()
            .map(|s| el(s))
            .collect();
        for op in Builtin::ALL {
            let law = op.reference_size();
            let tuples: Vec<Vec<HElement>> = match op.arity() {
                Arity::Fixed(1) => pool.iter().map(|x| vec![x.clone()]).collect(),
                Arity::Fixed(2) => pool
                    .iter()
                    .flat_map(|x| pool.iter().map(move |y| vec![x.clone(), y.clone()]))
                    .collect(),
                _ => (0..4).map(|n| pool[..n].to_vec()).collect(),
            };
            for args in tuples {
                if let Some(out) = op.apply(&args) {
                    assert!(law.admits(&out, &args), "{op} on {args:?} gave {out}");
                }
            }
        }
    }
}
