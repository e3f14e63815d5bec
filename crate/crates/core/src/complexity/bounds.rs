//! The two polynomial bounds, computed exactly.

use num_traits::{checked_pow, CheckedAdd, CheckedMul, One};
use serde::{Deserialize, Serialize};

use crate::element::HElement;
use crate::system::Family;
use crate::Bound;

/// `C * size^p`, or `None` if `T` overflows.
pub fn bound_value_size<T: Clone + One + CheckedMul>(c: &T, p: u32, size: &T) -> Option<T> {
    checked_pow(size.clone(), p as usize)?.checked_mul(c)
}

/// `36 * C^(p+1) * (rank+1) * size^(p^2+1)`, or `None` if `T` overflows.
pub fn bound_time<T: Clone + One + CheckedMul + CheckedAdd + From<u8>>(c: &T, p: u32, rank: &T, size: &T) -> Option<T> {
    let c_pow = checked_pow(c.clone(), p as usize + 1)?;
    let s_pow = checked_pow(size.clone(), (p as usize).checked_mul(p as usize)?.checked_add(1)?)?;
    T::from(36)
        .checked_mul(&c_pow)?
        .checked_mul(&rank.checked_add(&T::one())?)?
        .checked_mul(&s_pow)
}

pub fn value_size_bound(family: Family, w: &HElement) -> Bound {
    bound_value_size(&Bound::from(family.c), family.p, &Bound::from(w.size())).expect("big integers do not overflow")
}

pub fn time_bound(family: Family, w: &HElement) -> Bound {
    let sr = w.size_rank();
    bound_time(&Bound::from(family.c), family.p, &Bound::from(sr.rank), &Bound::from(sr.size))
        .expect("big integers do not overflow")
}

/// Decimal-string (de)serialization for [`Bound`] fields.
pub mod decimal {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::Bound;

    pub fn serialize<S: Serializer>(b: &Bound, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&b.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Bound, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// One evaluation under the cost model, with the bounds it is held to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Measurement {
    pub input_size: u64,
    pub input_rank: u64,
    /// 0 when the result is undefined.
    pub output_size: u64,
    pub steps: u64,
    pub c: u64,
    pub p: u32,
    #[serde(with = "decimal")]
    pub bound_size: Bound,
    #[serde(with = "decimal")]
    pub bound_time: Bound,
}

impl Measurement {
    pub fn new(family: Family, w: &HElement, output: Option<&HElement>, steps: u64) -> Self {
        let sr = w.size_rank();
        Measurement {
            input_size: sr.size,
            input_rank: sr.rank,
            output_size: output.map_or(0, HElement::size),
            steps,
            c: family.c,
            p: family.p,
            bound_size: value_size_bound(family, w),
            bound_time: time_bound(family, w),
        }
    }

    pub fn size_ok(&self) -> bool {
        Bound::from(self.output_size) <= self.bound_size
    }

    pub fn time_ok(&self) -> bool {
        Bound::from(self.steps) <= self.bound_time
    }

    pub fn time_ratio(&self) -> f64 {
        ratio(self.steps, &self.bound_time)
    }

    pub fn size_ratio(&self) -> f64 {
        ratio(self.output_size, &self.bound_size)
    }
}

fn ratio(n: u64, d: &Bound) -> f64 {
    use num_traits::ToPrimitive;
    n as f64 / d.to_f64().unwrap_or(f64::INFINITY)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn size_bound_examples() {
        assert_eq!(bound_value_size(&1u64, 1, &7), Some(7));
        assert_eq!(bound_value_size(&2u64, 2, &5), Some(50));
        let a: HElement = "a".parse().unwrap();
        assert_eq!(value_size_bound(Family { c: 3, p: 1 }, &a), Bound::from(3u32));
    }

    #[test]
    fn time_bound_examples() {
        assert_eq!(bound_time(&2u64, 1, &3, &5), Some(14400));
        assert_eq!(bound_time(&1u64, 1, &0, &1), Some(36));
        assert_eq!(bound_time(&1u64, 2, &1, &2), Some(2304));
    }

    #[test]
    fn machine_integers_report_overflow() {
        assert_eq!(bound_time(&1000u32, 3, &5, &1000), None);
        assert_eq!(bound_value_size(&u64::MAX, 1, &2), None);
        let big = bound_time(&Bound::from(1000u32), 3, &Bound::from(5u32), &Bound::from(1000u32)).unwrap();
        assert_eq!(big.to_string(), format!("{}{}", 36 * 6, "0".repeat(12 + 30)));
    }

    proptest! {
        #[test]
        fn machine_and_big_integers_agree(c in 1u64..50, p in 1u32..4, r in 0u64..20, s in 1u64..200) {
            let big = bound_time(&Bound::from(c), p, &Bound::from(r), &Bound::from(s)).unwrap();
            match bound_time(&c, p, &r, &s) {
                Some(v) => prop_assert_eq!(Bound::from(v), big),
                None => prop_assert!(big > Bound::from(u64::MAX)),
            }
        }

        #[test]
        fn time_bound_is_monotone(c in 1u64..20, p in 1u32..4, r in 0u64..10, s in 1u64..100) {
            let b = |c: u64, p: u32, r: u64, s: u64| {
                bound_time(&Bound::from(c), p, &Bound::from(r), &Bound::from(s)).unwrap()
            };
            let base = b(c, p, r, s);
            prop_assert!(b(c + 1, p, r, s) >= base);
            prop_assert!(b(c, p + 1, r, s) >= base);
            prop_assert!(b(c, p, r + 1, s) >= base);
            prop_assert!(b(c, p, r, s + 1) >= base);
        }
    }
}
