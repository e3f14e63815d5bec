//! The five static conditions, checked rule by rule.

use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::analysis::{analyzed_member, c4_cost_poly, check_c5_bound};
use super::{GnfSystem, RecFunction};
use crate::error::StripError;
use crate::term::{render_path, split_vars, strip_recursive, CallMap, Symbol, Term};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Condition {
    C1,
    C2,
    C3,
    C4,
    C5,
}

impl Condition {
    pub const ALL: [Condition; 5] = [Condition::C1, Condition::C2, Condition::C3, Condition::C4, Condition::C5];

    pub fn describe(self) -> &'static str {
        match self {
            Condition::C1 => "recursive calls are only of the form f_j(x_i)",
            Condition::C2 => "no x_i is the argument of two different recursive symbols",
            Condition::C3 => "no x_i occurs together with its y_i",
            Condition::C4 => "base-operation cost is at most C*N^p",
            Condition::C5 => "values with recursive calls do not exceed |w̄|+|l̄|",
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Finding {
    pub function: String,
    /// 1-based rule number.
    pub rule: usize,
    pub template: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    pub detail: String,
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} rule {} `{}`", self.function, self.rule, self.template)?;
        if let Some(p) = &self.path {
            write!(f, " at {p}")?;
        }
        write!(f, ": {}", self.detail)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub condition: Condition,
    pub status: Status,
    pub failures: Vec<Finding>,
    /// Rules the condition could not be evaluated on.
    pub skipped: Vec<Finding>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub accepted: bool,
    pub conditions: Vec<Verdict>,
}

impl CheckReport {
    pub fn accepted(&self) -> bool {
        self.accepted
    }

    pub fn verdict(&self, c: Condition) -> &Verdict {
        &self.conditions[c as usize]
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.conditions {
            let status = match v.status {
                Status::Pass => "pass",
                Status::Fail => "FAIL",
                Status::Skipped => "skipped",
            };
            writeln!(f, "{} {status:<7} {}", v.condition, v.condition.describe())?;
            for x in &v.failures {
                writeln!(f, "  {x}")?;
            }
            for x in &v.skipped {
                writeln!(f, "  skipped {x}")?;
            }
        }
        writeln!(f, "{}", if self.accepted { "accepted" } else { "rejected" })
    }
}

/// Result of one condition on one rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RuleCheck {
    Pass,
    Fail { path: Option<String>, detail: String },
    Skipped(String),
}

fn fail(detail: String) -> RuleCheck {
    RuleCheck::Fail { path: None, detail }
}

fn not_variable_calls(t: &Term) -> Vec<(String, String)> {
    let mut out = Vec::new();
    t.walk(&mut |s, path| {
        if let Term::App(Symbol::Rec(j), args) = s {
            if !matches!(args.as_slice(), [Term::XVar(_)] | [Term::XIter]) {
                let arg = args.iter().map(Term::render).collect::<Vec<_>>().join(",");
                let mut arg_path = path.clone();
                arg_path.push(0);
                out.push((render_path(&arg_path), format!("f{j} is applied to `{arg}`, not to a single x-variable")));
            }
        }
    });
    out
}

/// Every recursive call has a single x-variable as its argument.
pub fn check_c1(f: &RecFunction, r: usize) -> RuleCheck {
    match not_variable_calls(&f.rules[r - 1].template).into_iter().next() {
        None => RuleCheck::Pass,
        Some((path, detail)) => RuleCheck::Fail {
            path: Some(path),
            detail,
        },
    }
}

/// No x-variable is the argument of two different recursive symbols.
pub fn check_c2(f: &RecFunction, r: usize) -> RuleCheck {
    if check_c1(f, r) != RuleCheck::Pass {
        return RuleCheck::Skipped("C1 fails".into());
    }
    let rule = &f.rules[r - 1];
    for t in [&rule.template, &rule.representative()] {
        if let Err(e @ StripError::ConflictingSymbols { .. }) = strip_recursive(t) {
            return fail(e.to_string());
        }
    }
    RuleCheck::Pass
}

/// No x-variable occurs both free and as a recursive-call argument.
pub fn check_c3(f: &RecFunction, r: usize) -> RuleCheck {
    if check_c2(f, r) != RuleCheck::Pass {
        return RuleCheck::Skipped("C1 or C2 fails".into());
    }
    let rep = f.rules[r - 1].representative();
    let (stripped, _) = strip_recursive(&rep).expect("C1 and C2 hold");
    match overlap(&stripped) {
        Some(detail) => fail(detail),
        None => RuleCheck::Pass,
    }
}

fn overlap(stripped: &Term) -> Option<String> {
    let (xs, ys) = split_vars(stripped);
    xs.intersection(&ys)
        .next()
        .map(|i| format!("x{i} occurs both free and as a recursive-call argument"))
}

fn member(f: &RecFunction, r: usize) -> Result<(Term, super::TermArity), RuleCheck> {
    if check_c2(f, r) != RuleCheck::Pass {
        return Err(RuleCheck::Skipped("C1 or C2 fails".into()));
    }
    analyzed_member(f, r).map_err(|e| RuleCheck::Skipped(e.to_string()))
}

/// The base-operation cost of every instance is at most `C * N^p`.
pub fn check_c4_static(sys: &GnfSystem, f: &RecFunction, r: usize) -> RuleCheck {
    let (stripped, _) = match member(f, r) {
        Ok(m) => m,
        Err(skip) => return skip,
    };
    match c4_cost_poly(&stripped, &sys.signature) {
        Err(e) => fail(e),
        Ok(poly) if poly.dominated_by(&BigInt::from(f.family.c), f.family.p) => RuleCheck::Pass,
        Ok(poly) => fail(format!(
            "base-operation cost {poly} of {stripped} is not bounded by {}*N^{}",
            f.family.c, f.family.p
        )),
    }
}

/// Values of instances with recursive calls have size at most `|w| + |l|`.
pub fn check_c5_static(sys: &GnfSystem, f: &RecFunction, r: usize) -> RuleCheck {
    let (stripped, mode) = match member(f, r) {
        Ok(m) => m,
        Err(skip) => return skip,
    };
    match check_c5_bound(&stripped, mode, &sys.signature) {
        Ok(()) => RuleCheck::Pass,
        Err(e) => fail(e),
    }
}

pub fn check_system(sys: &GnfSystem) -> CheckReport {
    let mut conditions: Vec<Verdict> = Condition::ALL
        .iter()
        .map(|&condition| Verdict {
            condition,
            status: Status::Pass,
            failures: Vec::new(),
            skipped: Vec::new(),
        })
        .collect();
    for f in &sys.functions {
        for r in 1..=f.rules.len() {
            let results = [
                check_c1(f, r),
                check_c2(f, r),
                check_c3(f, r),
                check_c4_static(sys, f, r),
                check_c5_static(sys, f, r),
            ];
            for (v, res) in conditions.iter_mut().zip(results) {
                let finding = |path, detail| Finding {
                    function: f.name(),
                    rule: r,
                    template: f.rules[r - 1].template.render(),
                    path,
                    detail,
                };
                match res {
                    RuleCheck::Pass => {}
                    RuleCheck::Fail { path, detail } => v.failures.push(finding(path, detail)),
                    RuleCheck::Skipped(why) => v.skipped.push(finding(None, why)),
                }
            }
        }
    }
    for v in &mut conditions {
        v.status = if !v.failures.is_empty() {
            Status::Fail
        } else if !v.skipped.is_empty() {
            Status::Skipped
        } else {
            Status::Pass
        };
    }
    CheckReport {
        accepted: conditions.iter().all(|v| v.status == Status::Pass),
        conditions,
    }
}

/// C1-C3 on a concrete emitted term, for the runtime instance checks.
pub fn instance_violation(term: &Term) -> Option<(Condition, String)> {
    check_instance(term).err()
}

/// Strips an emitted term, or names the first of C1-C3 it violates.
pub fn check_instance(term: &Term) -> Result<(Term, CallMap), (Condition, String)> {
    match strip_recursive(term) {
        Ok((stripped, calls)) => match overlap(&stripped) {
            Some(d) => Err((Condition::C3, d)),
            None => Ok((stripped, calls)),
        },
        Err(e) => match not_variable_calls(term).into_iter().next() {
            Some((path, detail)) => Err((Condition::C1, format!("{detail} at {path}"))),
            None => Err((Condition::C2, e.to_string())),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn report(text: &str) -> CheckReport {
        GnfSystem::parse(text).unwrap().report().clone()
    }

    #[test]
    fn shipped_fixtures_have_the_expected_verdicts() {
        for good in [fixtures::MIRROR, fixtures::IDENTITY, fixtures::EMPTY] {
            let r = report(good);
            assert!(r.accepted(), "{r}");
        }
        let expect_only = |text: &str, c: Condition| {
            let r = report(text);
            assert!(!r.accepted());
            for v in &r.conditions {
                assert_eq!(v.status == Status::Fail, v.condition == c, "{r}");
            }
            r
        };
        let r = expect_only(fixtures::C1_NESTED, Condition::C1);
        let f = &r.verdict(Condition::C1).failures[0];
        assert_eq!(f.path.as_deref(), Some("/0"));
        let r = expect_only(fixtures::C2_SHARED, Condition::C2);
        assert!(r.verdict(Condition::C2).failures[0].detail.contains("f1 and f2"));
        expect_only(fixtures::C3_COOCCUR, Condition::C3);
        let r = expect_only(fixtures::DOUBLING, Condition::C5);
        assert!(r.verdict(Condition::C5).failures[0].detail.contains("conc(y1,y1)"));
    }

    #[test]
    fn prerequisites_skip_dependent_conditions() {
        let r = report(fixtures::C1_NESTED);
        for c in [Condition::C2, Condition::C3, Condition::C4, Condition::C5] {
            assert_eq!(r.verdict(c).status, Status::Skipped);
        }
    }

    #[test]
    fn json_report_shape() {
        let v: serde_json::Value = serde_json::from_str(&report(fixtures::DOUBLING).to_json()).unwrap();
        assert_eq!(v["accepted"], false);
        assert_eq!(v["conditions"][4]["condition"], "C5");
        assert_eq!(v["conditions"][4]["status"], "fail");
        assert_eq!(v["conditions"][0]["status"], "pass");
        for text in [fixtures::MIRROR, fixtures::C1_NESTED, fixtures::C2_SHARED] {
            let r = report(text);
            assert_eq!(serde_json::from_str::<CheckReport>(&r.to_json()).unwrap(), r);
        }
    }

    #[test]
    fn instance_checks() {
        let sig = GnfSystem::parse(fixtures::ALL_OPS).unwrap().signature;
        let t = |s: &str| crate::term::parse_term(s, &sig).unwrap();
        assert_eq!(instance_violation(&t("list(f1(x2),f1(x1))")), None);
        assert_eq!(instance_violation(&t("f1(f1(x1))")).unwrap().0, Condition::C1);
        assert_eq!(instance_violation(&t("list(f1(x1),f2(x1))")).unwrap().0, Condition::C2);
        assert_eq!(instance_violation(&t("conc(f1(x1),x1)")).unwrap().0, Condition::C3);
    }

    #[test]
    fn variadic_c3_uses_a_member_with_the_iteration_in_range() {
        let text = fixtures::ALL_OPS.replace("is_list => x1", "arity >= 1 => list(x1,listof(f1(x[i]),asc))");
        let r = report(&text);
        assert_eq!(r.verdict(Condition::C3).status, Status::Fail, "{r}");
    }
}
