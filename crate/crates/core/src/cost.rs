//! The abstract cost model. Every charge is a positive integer and an
//! evaluation's step count is the sum of its charges.
//!
//! | event                      | charge                                   |
//! |----------------------------|------------------------------------------|
//! | recursive-call dispatch    | 1                                        |
//! | memo probe / memo insert   | 1 + \|w\|                                |
//! | initial-function lookup    | 1 + \|w\|                                |
//! | gamma: rule scanned        | 1                                        |
//! | gamma: guard primitive     | 1                                        |
//! | gamma: emitted term        | size of the emitted term                 |
//! | stripping                  | size of the stripped term                |
//! | substitution               | size of the ground result                |
//! | base operation             | its declared cost on the argument sizes  |

use serde::{Deserialize, Serialize};

pub const COST_MODEL_VERSION: &str = "gnf-cost-1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Charge {
    Dispatch,
    MemoProbe,
    MemoInsert,
    InitialLookup,
    RuleScan,
    GuardPrimitive,
    Emission,
    Strip,
    Substitution,
    BaseOp,
}

impl Charge {
    pub const ALL: [Charge; 10] = [
        Charge::Dispatch,
        Charge::MemoProbe,
        Charge::MemoInsert,
        Charge::InitialLookup,
        Charge::RuleScan,
        Charge::GuardPrimitive,
        Charge::Emission,
        Charge::Strip,
        Charge::Substitution,
        Charge::BaseOp,
    ];

    fn slot(self) -> usize {
        self as usize
    }
}

/// Per-evaluation accumulator. Never shared between evaluations.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Meter {
    total: u64,
    by_kind: [u64; 10],
}

impl Meter {
    pub fn new() -> Self {
        Meter::default()
    }

    pub fn charge(&mut self, kind: Charge, amount: u64) {
        self.total = self.total.saturating_add(amount);
        self.by_kind[kind.slot()] = self.by_kind[kind.slot()].saturating_add(amount);
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn of(&self, kind: Charge) -> u64 {
        self.by_kind[kind.slot()]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn totals_are_sums_of_charges() {
        let mut m = Meter::new();
        m.charge(Charge::Dispatch, 1);
        m.charge(Charge::BaseOp, 5);
        m.charge(Charge::BaseOp, 2);
        assert_eq!(m.total(), 8);
        assert_eq!(m.of(Charge::BaseOp), 7);
        assert_eq!(Charge::ALL.iter().map(|&k| m.of(k)).sum::<u64>(), m.total());
    }
}
