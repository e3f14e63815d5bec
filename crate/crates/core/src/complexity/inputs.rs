//! Structured input families for audits and exponent fits.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::element::{Atom, HElement};

fn atom(atoms: &[Atom], n: usize) -> HElement {
    HElement::Atom(atoms[n % atoms.len()].clone())
}

/// `<a,b,a,...>` of size `n`, cycling through `atoms`.
pub fn flat(atoms: &[Atom], n: u64) -> HElement {
    assert!(n >= 1 && !atoms.is_empty());
    HElement::list((0..n as usize - 1).map(|k| atom(atoms, k)))
}

/// `<<...<>...>>` of size and rank `n`.
pub fn chain(n: u64) -> HElement {
    assert!(n >= 1);
    (1..n).fold(HElement::empty(), |e, _| HElement::list([e]))
}

/// A binary tree of size `n`, leaves drawn from `atoms`.
pub fn balanced(atoms: &[Atom], n: u64) -> HElement {
    fn go(atoms: &[Atom], n: u64, next: &mut usize) -> HElement {
        match n {
            1 => {
                *next += 1;
                atom(atoms, *next - 1)
            }
            2 => HElement::list([go(atoms, 1, next)]),
            _ => {
                let left = (n - 1) / 2;
                HElement::list([go(atoms, left, next), go(atoms, n - 1 - left, next)])
            }
        }
    }
    assert!(n >= 1 && !atoms.is_empty());
    go(atoms, n, &mut 0)
}

/// A random element of size exactly `n`. Leaves are atoms or `<>`.
pub fn random(atoms: &[Atom], n: u64, rng: &mut ChaCha8Rng) -> HElement {
    assert!(n >= 1 && !atoms.is_empty());
    if n == 1 {
        let k = rng.gen_range(0..=atoms.len());
        return if k == atoms.len() { HElement::empty() } else { atom(atoms, k) };
    }
    let budget = n - 1;
    let parts = rng.gen_range(1..=budget);
    // composition of `budget` into `parts` positive sizes
    let mut cuts: Vec<u64> = rand::seq::index::sample(rng, budget as usize - 1, parts as usize - 1)
        .into_iter()
        .map(|c| c as u64 + 1)
        .collect();
    cuts.sort_unstable();
    cuts.push(budget);
    let mut prev = 0;
    let mut children = Vec::with_capacity(parts as usize);
    for c in cuts {
        children.push(random(atoms, c - prev, rng));
        prev = c;
    }
    HElement::list(children)
}

/// `samples` random elements per size in `sizes`, from one seeded stream.
pub fn random_family(atoms: &[Atom], sizes: impl IntoIterator<Item = u64>, samples: usize, seed: u64) -> Vec<HElement> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sizes
        .into_iter()
        .flat_map(|n| (0..samples).map(move |_| n).collect::<Vec<_>>())
        .map(|n| random(atoms, n, &mut rng))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ab() -> Vec<Atom> {
        vec![Atom::new("a").unwrap(), Atom::new("b").unwrap()]
    }

    #[test]
    fn shapes() {
        assert_eq!(flat(&ab(), 4).render(), "<a,b,a>");
        assert_eq!(flat(&ab(), 1).render(), "<>");
        assert_eq!(chain(3).render(), "<<<>>>");
        assert_eq!(chain(3).rank(), 3);
        assert_eq!(balanced(&ab(), 5).render(), "<<a>,<b>>");
    }

    #[test]
    fn seeded_streams_repeat() {
        assert_eq!(random_family(&ab(), 1..10, 3, 7), random_family(&ab(), 1..10, 3, 7));
        assert_ne!(random_family(&ab(), 5..10, 3, 7), random_family(&ab(), 5..10, 3, 8));
    }

    proptest! {
        #[test]
        fn families_hit_the_requested_size(n in 1u64..80, seed: u64) {
            prop_assert_eq!(flat(&ab(), n).size(), n);
            prop_assert_eq!(chain(n).size(), n);
            prop_assert_eq!(balanced(&ab(), n).size(), n);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            prop_assert_eq!(random(&ab(), n, &mut rng).size(), n);
        }
    }
}
