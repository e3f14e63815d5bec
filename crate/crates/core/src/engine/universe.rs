//! Finite slices of the universe: every element over an alphabet with
//! bounded size and rank.

use rustc_hash::FxHashMap as HashMap;
use std::ops::ControlFlow;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::element::{Atom, HElement};
use crate::error::UniverseError;

/// `counts[r][s]`: elements of size exactly `s` and rank at most `r`.
fn count_table(atoms: usize, max_size: u64, max_rank: u64) -> Vec<Vec<BigUint>> {
    let s_max = max_size as usize;
    let r_max = max_rank.min(max_size) as usize;
    let mut counts = vec![vec![BigUint::zero(); s_max + 1]; r_max + 1];
    if s_max >= 1 {
        counts[0][1] = BigUint::from(atoms);
    }
    for r in 1..=r_max {
        // sequences of rank <= r-1 children by total size
        let mut seq = vec![BigUint::zero(); s_max];
        if s_max >= 1 {
            seq[0] = BigUint::one();
        }
        for m in 1..s_max {
            let mut acc = BigUint::zero();
            for t in 1..=m {
                acc += &counts[r - 1][t] * &seq[m - t];
            }
            seq[m] = acc;
        }
        for s in 1..=s_max {
            counts[r][s] = &seq[s - 1] + if s == 1 { BigUint::from(atoms) } else { BigUint::zero() };
        }
    }
    counts
}

/// Number of elements with size `<= max_size` and rank `<= max_rank` over
/// `atoms` proper atoms.
pub fn count_universe(atoms: usize, max_size: u64, max_rank: u64) -> BigUint {
    let table = count_table(atoms, max_size, max_rank);
    table.last().map(|row| row.iter().sum()).unwrap_or_default()
}

fn check_bounds(max_size: u64, max_rank: u64) -> Result<(), UniverseError> {
    if max_size == 0 || max_rank == 0 {
        return Err(UniverseError::EmptyBounds { max_size, max_rank });
    }
    Ok(())
}

/// All elements in the slice, ordered by size, then by element order.
pub fn enumerate_universe(
    atoms: &[Atom],
    max_size: u64,
    max_rank: u64,
    cap: usize,
) -> Result<Vec<HElement>, UniverseError> {
    check_bounds(max_size, max_rank)?;
    let count = count_universe(atoms.len(), max_size, max_rank);
    if count > BigUint::from(cap) {
        return Err(UniverseError::TooLarge {
            count: count.to_string(),
            cap,
        });
    }
    let gen = Generator::new(atoms, max_size, max_rank, cap as u64);
    let mut out = Vec::with_capacity(count.to_usize().unwrap_or(0));
    for s in 1..=max_size {
        let mut bucket = gen.collect(s, gen.rank);
        bucket.sort();
        out.extend(bucket);
    }
    Ok(out)
}

/// Streams the slice in order of size without materializing it; visits
/// stop as soon as `f` breaks. Within one size the order is unspecified.
pub fn for_each_element(
    atoms: &[Atom],
    max_size: u64,
    max_rank: u64,
    mut f: impl FnMut(&HElement) -> ControlFlow<()>,
) -> Result<ControlFlow<()>, UniverseError> {
    check_bounds(max_size, max_rank)?;
    const CACHE: u64 = 1 << 20;
    let gen = Generator::new(atoms, max_size, max_rank, CACHE);
    for s in 1..=max_size {
        if gen.each(s, gen.rank, &mut f).is_break() {
            return Ok(ControlFlow::Break(()));
        }
    }
    Ok(ControlFlow::Continue(()))
}

/// Recursive generator with the small buckets precomputed.
struct Generator {
    atoms: Vec<HElement>,
    rank: u64,
    cache: HashMap<(u64, u64), Vec<HElement>>,
}

type Visit<'a> = dyn FnMut(&HElement) -> ControlFlow<()> + 'a;

impl Generator {
    fn new(atoms: &[Atom], max_size: u64, max_rank: u64, budget: u64) -> Self {
        let rank = max_rank.min(max_size);
        let mut gen = Generator {
            atoms: atoms.iter().cloned().map(HElement::Atom).collect(),
            rank,
            cache: HashMap::default(),
        };
        let counts = count_table(atoms.len(), max_size, rank);
        let mut spent = 0u64;
        'fill: for s in 1..=max_size {
            for r in 0..=rank {
                let n = counts[r as usize][s as usize].to_u64().unwrap_or(u64::MAX);
                if spent.saturating_add(n) > budget {
                    break 'fill;
                }
                spent += n;
                let bucket = gen.collect(s, r);
                gen.cache.insert((s, r), bucket);
            }
        }
        gen
    }

    fn collect(&self, s: u64, r: u64) -> Vec<HElement> {
        let mut out = Vec::new();
        let _ = self.each(s, r, &mut |e| {
            out.push(e.clone());
            ControlFlow::Continue(())
        });
        out
    }

    /// Elements of size exactly `s` and rank at most `r`.
    fn each(&self, s: u64, r: u64, f: &mut Visit<'_>) -> ControlFlow<()> {
        if let Some(bucket) = self.cache.get(&(s, r)) {
            for e in bucket {
                f(e)?;
            }
            return ControlFlow::Continue(());
        }
        if s == 1 {
            for a in &self.atoms {
                f(a)?;
            }
        }
        if r == 0 {
            return ControlFlow::Continue(());
        }
        self.lists(s - 1, r - 1, &mut Vec::new(), f)
    }

    fn lists(&self, remaining: u64, child_rank: u64, prefix: &mut Vec<HElement>, f: &mut Visit<'_>) -> ControlFlow<()> {
        if remaining == 0 {
            return f(&HElement::list(prefix.iter().cloned()));
        }
        for t in 1..=remaining {
            self.each(t, child_rank, &mut |c| {
                prefix.push(c.clone());
                let res = self.lists(remaining - t, child_rank, prefix, f);
                prefix.pop();
                res
            })?;
        }
        ControlFlow::Continue(())
    }
}

/// A materialized slice with positions for table lookups.
#[derive(Debug, Clone)]
pub struct Universe {
    pub atoms: Vec<Atom>,
    pub max_size: u64,
    pub max_rank: u64,
    elements: Vec<HElement>,
    index: HashMap<HElement, usize>,
}

impl Universe {
    pub fn new(atoms: &[Atom], max_size: u64, max_rank: u64, cap: usize) -> Result<Universe, UniverseError> {
        let elements = enumerate_universe(atoms, max_size, max_rank, cap)?;
        let index = elements.iter().enumerate().map(|(n, e)| (e.clone(), n)).collect();
        Ok(Universe {
            atoms: atoms.to_vec(),
            max_size,
            max_rank,
            elements,
            index,
        })
    }

    pub fn elements(&self) -> &[HElement] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn position(&self, w: &HElement) -> Option<usize> {
        self.index.get(w).copied()
    }
}
