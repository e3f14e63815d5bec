//! The `.gnf` system-definition format.

use std::collections::BTreeMap;

use super::{Family, GammaRule, GnfSystem, Guard, GuardPrim, InitialFn, RecFunction, TermArity};
use crate::element::{parse_element, Alphabet, Atom, HElement};
use crate::error::SystemError;
use crate::signature::{Arity, BaseOpDecl, Builtin, CostFn, Signature, SizeLaw};
use crate::term::parse_term;

fn syntax(line: usize, message: impl Into<String>) -> SystemError {
    SystemError::Syntax {
        line,
        message: message.into(),
    }
}

#[derive(Default)]
struct RawFunction {
    line: usize,
    c: Option<u64>,
    p: Option<u32>,
    initial: Vec<(usize, String)>,
    rules: Vec<(usize, String)>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    None,
    Meta,
    BaseOps,
    Function(usize),
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Block {
    Header,
    Initial,
    Rules,
}

pub(super) fn parse_unchecked(text: &str) -> Result<GnfSystem, SystemError> {
    let mut atoms: Option<Vec<String>> = None;
    let mut meta = Vec::new();
    let mut ops: BTreeMap<Builtin, BaseOpDecl> = BTreeMap::new();
    let mut funcs: BTreeMap<usize, RawFunction> = BTreeMap::new();
    let mut section = Section::None;
    let mut block = Block::Header;

    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let indented = content.starts_with(char::is_whitespace);
        let content = content.trim();
        if !indented {
            section = top_level(content, line, &mut atoms, &mut funcs)?;
            block = Block::Header;
            continue;
        }
        match section {
            Section::None => return Err(syntax(line, "indented line outside of a section")),
            Section::Meta => meta.push(content.to_string()),
            Section::BaseOps => {
                let decl = base_op(content, line)?;
                if ops.insert(decl.op, decl.clone()).is_some() {
                    return Err(SystemError::Duplicate(decl.op.name().to_string()));
                }
            }
            Section::Function(i) => {
                let f = funcs.get_mut(&i).expect("section opened its function");
                match content {
                    "initial:" => block = Block::Initial,
                    "rules:" => block = Block::Rules,
                    _ if content.contains("->") && block == Block::Initial => {
                        f.initial.push((line, content.to_string()))
                    }
                    _ if content.contains("=>") && block == Block::Rules => f.rules.push((line, content.to_string())),
                    _ => {
                        for part in content.split(',') {
                            family_setting(part, line, f)?;
                        }
                        block = Block::Header;
                    }
                }
            }
        }
    }

    let atom_names = atoms.ok_or_else(|| SystemError::Invalid("missing `atoms:` section".into()))?;
    for name in &atom_names {
        if is_var_name(name) {
            return Err(SystemError::Invalid(format!("atom `{name}` would read as a variable")));
        }
    }
    let alphabet = Alphabet::new(atom_names.iter().map(String::as_str))
        .map_err(|e| SystemError::Invalid(format!("atoms: {e}")))?;
    if funcs.is_empty() {
        return Err(SystemError::Invalid("no `function` sections".into()));
    }
    for (expected, &i) in (1..).zip(funcs.keys()) {
        if i != expected {
            return Err(SystemError::Invalid(format!("f{expected} is missing (functions must be f1..fn)")));
        }
    }
    let signature = Signature::new(alphabet, ops.into_values(), funcs.len());

    let mut functions = Vec::with_capacity(funcs.len());
    for (i, raw) in funcs {
        functions.push(build_function(i, raw, &signature)?);
    }
    Ok(GnfSystem::assemble(signature, functions, meta))
}

fn is_var_name(name: &str) -> bool {
    let digits = name.strip_prefix('x').or_else(|| name.strip_prefix('y'));
    digits.is_some_and(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
}

fn top_level(
    content: &str,
    line: usize,
    atoms: &mut Option<Vec<String>>,
    funcs: &mut BTreeMap<usize, RawFunction>,
) -> Result<Section, SystemError> {
    if let Some(rest) = content.strip_prefix("atoms:") {
        if atoms.is_some() {
            return Err(SystemError::Duplicate("atoms".into()));
        }
        let names: Vec<String> = rest
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(String::from)
            .collect();
        *atoms = Some(names);
        return Ok(Section::None);
    }
    match content {
        "meta:" => return Ok(Section::Meta),
        "baseops:" => return Ok(Section::BaseOps),
        _ => {}
    }
    if let Some(name) = content.strip_prefix("function ").and_then(|r| r.strip_suffix(':')) {
        let name = name.trim();
        let i = name
            .strip_prefix('f')
            .and_then(|d| d.parse::<usize>().ok())
            .filter(|&i| i >= 1 && !name[1..].starts_with('0'))
            .ok_or_else(|| syntax(line, format!("bad function name `{name}`, expected f<i>")))?;
        if funcs.contains_key(&i) {
            return Err(SystemError::Duplicate(name.to_string()));
        }
        funcs.insert(
            i,
            RawFunction {
                line,
                ..RawFunction::default()
            },
        );
        return Ok(Section::Function(i));
    }
    Err(syntax(line, format!("unknown section `{content}`")))
}

fn family_setting(part: &str, line: usize, f: &mut RawFunction) -> Result<(), SystemError> {
    let (key, value) = part
        .split_once('=')
        .ok_or_else(|| syntax(line, format!("expected `C = <int>` or `p = <int>`, got `{}`", part.trim())))?;
    let value = value.trim();
    match key.trim() {
        "C" => {
            let c: u64 = value.parse().map_err(|_| syntax(line, format!("bad C `{value}`")))?;
            if c == 0 {
                return Err(syntax(line, "C must be positive"));
            }
            f.c = Some(c);
        }
        "p" => {
            let p: u32 = value.parse().map_err(|_| syntax(line, format!("bad p `{value}`")))?;
            if p == 0 {
                return Err(syntax(line, "p must be positive"));
            }
            f.p = Some(p);
        }
        other => return Err(syntax(line, format!("unknown function setting `{other}`"))),
    }
    Ok(())
}

fn base_op(content: &str, line: usize) -> Result<BaseOpDecl, SystemError> {
    let (name, rest) = content
        .split_once(':')
        .ok_or_else(|| syntax(line, "expected `<op>: arity=.., cost=.., size=..`"))?;
    let name = name.trim();
    let op = Builtin::from_name(name).ok_or_else(|| SystemError::UnknownSymbol(name.to_string()))?;
    let (mut arity, mut cost, mut size) = (None, None, None);
    for part in rest.split(',') {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| syntax(line, format!("expected key=value, got `{}`", part.trim())))?;
        let v = v.trim();
        match k.trim() {
            "arity" => {
                arity = Some(match v {
                    "*" => Arity::Variadic,
                    _ => Arity::Fixed(v.parse().map_err(|_| syntax(line, format!("bad arity `{v}`")))?),
                })
            }
            "cost" => cost = Some(cost_fn(v).ok_or_else(|| syntax(line, format!("bad cost `{v}`")))?),
            "size" => size = Some(size_law(v).ok_or_else(|| syntax(line, format!("bad size bound `{v}`")))?),
            other => return Err(syntax(line, format!("unknown base-op key `{other}`"))),
        }
    }
    let missing = |k: &str| syntax(line, format!("`{name}` needs `{k}=`"));
    let decl = BaseOpDecl {
        op,
        arity: arity.ok_or_else(|| missing("arity"))?,
        cost: cost.ok_or_else(|| missing("cost"))?,
        size: size.ok_or_else(|| missing("size"))?,
    };
    if decl.arity != op.arity() {
        return Err(SystemError::Invalid(format!("`{name}` has arity {}, declared {}", op.arity(), decl.arity)));
    }
    if !decl.cost.dominates(&op.reference_cost()) {
        return Err(SystemError::Invalid(format!(
            "declared cost {} of `{name}` is below its implementation cost {}",
            decl.cost,
            op.reference_cost()
        )));
    }
    if !decl.size.at_least_as_loose(&op.reference_size()) {
        return Err(SystemError::Invalid(format!(
            "declared size bound {} of `{name}` is tighter than its implementation {}",
            decl.size,
            op.reference_size()
        )));
    }
    Ok(decl)
}

/// `c0`, `c0+c1*sum`, `(c0+c1*sum)^d`; summands may repeat and `sum` may
/// appear without a coefficient.
fn cost_fn(text: &str) -> Option<CostFn> {
    let text: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let (inner, degree) = match text.strip_prefix('(') {
        Some(rest) => {
            let (inner, exp) = rest.split_once(")^")?;
            (inner.to_string(), exp.parse().ok()?)
        }
        None => (text, 1),
    };
    let (mut c0, mut c1) = (0u64, 0u64);
    for term in inner.split('+') {
        if term == "sum" {
            c1 += 1;
        } else if let Some(k) = term.strip_suffix("*sum") {
            c1 += k.parse::<u64>().ok()?;
        } else {
            c0 += term.parse::<u64>().ok()?;
        }
    }
    Some(CostFn::new(c0, c1, degree))
}

fn size_law(text: &str) -> Option<SizeLaw> {
    let arg = |prefix: &str| {
        text.strip_prefix(prefix)?
            .strip_prefix('(')?
            .strip_suffix(')')?
            .trim()
            .parse::<u64>()
            .ok()
    };
    if text == "selective" {
        Some(SizeLaw::Selective)
    } else if let Some(c) = arg("additive") {
        Some(SizeLaw::Additive(c))
    } else {
        arg("constant").map(SizeLaw::Constant)
    }
}

fn guard(text: &str, line: usize, alphabet: &Alphabet) -> Result<Guard, SystemError> {
    let text = text.trim();
    if text == "any" {
        return Ok(Guard::default());
    }
    let mut prims = Vec::new();
    for part in text.split('&') {
        let words: Vec<&str> = part.split_whitespace().collect();
        let int = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| syntax(line, format!("bad arity `{s}` in guard")))
        };
        let prim = match words.as_slice() {
            ["is_atom"] => GuardPrim::IsAtom,
            ["is_list"] => GuardPrim::IsList,
            ["arity", "=", k] => GuardPrim::ArityEq(int(k)?),
            ["arity", ">=", k] => GuardPrim::ArityGe(int(k)?),
            ["head_is", a] => {
                let atom = Atom::new(a).map_err(|e| syntax(line, e.to_string()))?;
                if !alphabet.contains(&atom) || atom.is_false() {
                    return Err(SystemError::UnknownSymbol(a.to_string()));
                }
                GuardPrim::HeadIs(atom)
            }
            _ => return Err(syntax(line, format!("bad guard primitive `{}`", part.trim()))),
        };
        prims.push(prim);
    }
    Ok(Guard(prims))
}

fn element(text: &str, line: usize, alphabet: &Alphabet) -> Result<HElement, SystemError> {
    parse_element(text.trim(), alphabet).map_err(|e| syntax(line, format!("`{}`: {e}", text.trim())))
}

fn build_function(i: usize, raw: RawFunction, sig: &Signature) -> Result<RecFunction, SystemError> {
    let name = format!("f{i}");
    let family = Family {
        c: raw
            .c
            .ok_or_else(|| syntax(raw.line, format!("{name} is missing `C =`")))?,
        p: raw
            .p
            .ok_or_else(|| syntax(raw.line, format!("{name} is missing `p =`")))?,
    };

    let mut initial = InitialFn::default();
    for (line, entry) in raw.initial {
        let (lhs, rhs) = entry.split_once("->").expect("entry contains ->");
        if lhs.trim() == "atoms" {
            if rhs.trim() != "identity" {
                return Err(syntax(line, "the only atom rule is `atoms -> identity`"));
            }
            initial.atoms_identity = true;
            continue;
        }
        let w = element(lhs, line, &sig.alphabet)?;
        let v = element(rhs, line, &sig.alphabet)?;
        if v.is_false() {
            return Err(syntax(line, "initial values cannot be `false`; leave the entry out instead"));
        }
        if w.is_false() {
            return Err(syntax(line, "`false` is not an input"));
        }
        if initial.table.insert(w.clone(), v).is_some() {
            return Err(SystemError::Duplicate(format!("{name} initial entry {w}")));
        }
    }

    let mut rules = Vec::new();
    for (line, entry) in raw.rules {
        let (g, t) = entry.split_once("=>").expect("entry contains =>");
        let guard = guard(g, line, &sig.alphabet)?;
        let template = parse_term(t.trim(), sig).map_err(|source| SystemError::Term { line, source })?;
        if template.mentions_y() {
            return Err(syntax(line, "y-variables only arise from stripping; write f<j>(x<i>) instead"));
        }
        let rule = GammaRule { guard, template };
        let max_x = rule.template.max_x_index();
        match rule.arity_mode() {
            TermArity::Exact(m) if max_x > m => {
                return Err(syntax(line, format!("template uses x{max_x} but the guard fixes arity {m}")));
            }
            TermArity::Exact(m) if rule.guard.min_arity() > m => {
                return Err(syntax(line, "guard can never hold"));
            }
            _ => {}
        }
        rules.push(rule);
    }
    Ok(RecFunction {
        index: i,
        family,
        initial,
        rules,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn fixtures_load() {
        for text in [
            fixtures::MIRROR,
            fixtures::IDENTITY,
            fixtures::DOUBLING,
            fixtures::EMPTY,
            fixtures::C1_NESTED,
            fixtures::C2_SHARED,
            fixtures::C3_COOCCUR,
            fixtures::ALL_OPS,
        ] {
            GnfSystem::parse(text).unwrap();
        }
        let m = GnfSystem::parse(fixtures::MIRROR).unwrap();
        assert_eq!(m.functions.len(), 1);
        assert_eq!(m.functions[0].family, Family { c: 4, p: 1 });
        assert!(m.functions[0].initial.atoms_identity);
        assert_eq!(m.functions[0].rules[0].template.render(), "listof(f1(x[i]),desc)");
        assert_eq!(m.functions[0].rules[0].arity_mode(), TermArity::Variadic { min: 0 });
        let all = GnfSystem::parse(fixtures::ALL_OPS).unwrap();
        assert_eq!(all.meta, vec!["sigma: lists over a and b".to_string()]);
        assert_eq!(all.signature.base_ops.len(), 8);
    }

    #[test]
    fn cost_and_size_syntax() {
        assert_eq!(cost_fn("1+1*sum"), Some(CostFn::new(1, 1, 1)));
        assert_eq!(cost_fn("(2 + 3*sum)^2"), Some(CostFn::new(2, 3, 2)));
        assert_eq!(cost_fn("1+sum"), Some(CostFn::new(1, 1, 1)));
        assert_eq!(cost_fn("4"), Some(CostFn::new(4, 0, 1)));
        assert_eq!(cost_fn("1+x"), None);
        assert_eq!(size_law("additive(1)"), Some(SizeLaw::Additive(1)));
        assert_eq!(size_law("constant( 3 )"), Some(SizeLaw::Constant(3)));
        assert_eq!(size_law("selective"), Some(SizeLaw::Selective));
        assert_eq!(size_law("additive"), None);
    }

    fn err(text: &str) -> SystemError {
        GnfSystem::parse(text).unwrap_err()
    }

    const HEAD: &str = "atoms: a, b\n";

    #[test]
    fn rejections() {
        let dup = format!("{HEAD}function f1:\n  C = 2\n  p = 1\nfunction f1:\n  C = 2\n  p = 1\n");
        assert_eq!(err(&dup), SystemError::Duplicate("f1".into()));
        let zero = format!("{HEAD}function f1:\n  C = 0\n  p = 1\n");
        assert!(err(&zero).to_string().contains("C must be positive"));
        let unknown = format!("{HEAD}sigma:\n  foo\n");
        assert!(err(&unknown).to_string().contains("unknown section `sigma:`"));
        let gap = format!("{HEAD}function f2:\n  C = 2\n  p = 1\n");
        assert!(err(&gap).to_string().contains("f1 is missing"));
        let sym = format!("{HEAD}function f1:\n  C = 2\n  p = 1\n  rules:\n    is_list => conc(x1,x2)\n");
        assert!(matches!(err(&sym), SystemError::Term { line: 6, .. }));
        let tight = format!("{HEAD}baseops:\n  conc: arity=2, cost=1, size=additive(0)\n");
        assert!(err(&tight).to_string().contains("below its implementation cost"));
        let loose = format!("{HEAD}baseops:\n  list: arity=*, cost=1+1*sum, size=additive(0)\n");
        assert!(err(&loose).to_string().contains("tighter"));
        let var_atom = "atoms: x1\nfunction f1:\n  C = 2\n  p = 1\n";
        assert!(err(var_atom).to_string().contains("read as a variable"));
        let fv = format!("{HEAD}function f1:\n  C = 2\n  p = 1\n  initial:\n    a -> false\n");
        assert!(err(&fv).to_string().contains("cannot be `false`"));
        let arity = format!("{HEAD}function f1:\n  C = 8\n  p = 1\n  rules:\n    arity = 1 => f1(x2)\n");
        assert!(err(&arity).to_string().contains("fixes arity 1"));
        let bad_el = format!("{HEAD}function f1:\n  C = 2\n  p = 1\n  initial:\n    <a,c> -> a\n");
        assert!(matches!(err(&bad_el), SystemError::Syntax { line: 6, .. }));
    }

    #[test]
    fn comments_and_inline_settings() {
        let text = format!("{HEAD}# top\nfunction f1: # trailing\n  C = 3, p = 2\n  initial:\n    a -> <b>\n");
        let s = GnfSystem::parse(&text).unwrap();
        assert_eq!(s.functions[0].family, Family { c: 3, p: 2 });
        assert_eq!(s.functions[0].initial.table.len(), 1);
    }
}
