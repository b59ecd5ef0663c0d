//! Ground sets and bitmask subsets.
//!
//! Subsets are stored as `u32` masks over element indices, so a ground set
//! holds at most 32 elements. Anything that walks the power set is further
//! capped at [`ENUMERATION_CAP`] elements.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest ground set for which power-set enumeration is allowed.
pub const ENUMERATION_CAP: usize = 20;

/// Hard limit imposed by the `u32` mask representation.
pub const MAX_ELEMENTS: usize = 32;

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct SubsetKey(u32);

impl SubsetKey {
    pub const EMPTY: SubsetKey = SubsetKey(0);

    pub const fn from_mask(mask: u32) -> Self {
        SubsetKey(mask)
    }

    pub fn singleton(element: usize) -> Self {
        SubsetKey(1 << element)
    }

    /// The full ground set of `n` elements.
    pub fn full(n: usize) -> Self {
        if n >= 32 {
            SubsetKey(u32::MAX)
        } else {
            SubsetKey((1u32 << n) - 1)
        }
    }

    pub fn from_elements<I: IntoIterator<Item = usize>>(elements: I) -> Self {
        SubsetKey(elements.into_iter().fold(0, |m, e| m | (1 << e)))
    }

    pub const fn mask(self) -> u32 {
        self.0
    }

    pub const fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub const fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub const fn contains(self, element: usize) -> bool {
        self.0 >> element & 1 == 1
    }

    #[must_use]
    pub const fn with(self, element: usize) -> Self {
        SubsetKey(self.0 | (1 << element))
    }

    #[must_use]
    pub const fn without(self, element: usize) -> Self {
        SubsetKey(self.0 & !(1 << element))
    }

    pub const fn is_subset_of(self, other: SubsetKey) -> bool {
        self.0 & !other.0 == 0
    }

    #[must_use]
    pub const fn union(self, other: SubsetKey) -> Self {
        SubsetKey(self.0 | other.0)
    }

    #[must_use]
    pub const fn difference(self, other: SubsetKey) -> Self {
        SubsetKey(self.0 & !other.0)
    }

    /// Element indices in ascending order.
    pub fn elements(self) -> Elements {
        Elements(self.0)
    }

    /// Subsets obtained by removing exactly one element, in ascending mask
    /// order.
    pub fn maximal_proper_subsets(self) -> impl Iterator<Item = SubsetKey> {
        let mut subs: Vec<_> = self.elements().map(|e| self.without(e)).collect();
        subs.sort_unstable();
        subs.into_iter()
    }

    /// Checks that only bits `0..n` are set.
    pub fn check_within(self, n: usize) -> Result<Self> {
        if n < 32 && self.0 >> n != 0 {
            Err(Error::InvalidSubset { mask: self.0, n })
        } else {
            Ok(self)
        }
    }

    /// Ordering key used everywhere: cardinality first, then mask.
    pub const fn order_key(self) -> (u32, u32) {
        (self.0.count_ones(), self.0)
    }
}

impl fmt::Display for SubsetKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, e) in self.elements().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str("}")
    }
}

/// Iterator over the set bits of a mask.
#[derive(Debug, Clone)]
pub struct Elements(u32);

impl Iterator for Elements {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let e = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(e)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Elements {}

/// All `k`-element subsets of an `n`-element ground set in ascending mask
/// order (Gosper's hack).
pub fn subsets_of_size(n: usize, k: usize) -> impl Iterator<Item = SubsetKey> {
    let limit: u64 = 1u64 << n;
    let mut next: Option<u64> = if k > n { None } else { Some((1u64 << k) - 1) };
    std::iter::from_fn(move || {
        let cur = next?;
        if cur >= limit {
            next = None;
            return None;
        }
        next = if cur == 0 {
            None
        } else {
            let c = cur & cur.wrapping_neg();
            let r = cur + c;
            Some((((r ^ cur) >> 2) / c) | r)
        };
        Some(SubsetKey(cur as u32))
    })
}

/// Every subset of an `n`-element ground set in (cardinality, mask) order.
pub fn all_subsets(n: usize) -> impl Iterator<Item = SubsetKey> {
    (0..=n).flat_map(move |k| subsets_of_size(n, k))
}

/// Every subset of `set` (including `set` itself) in (cardinality, mask) order.
pub fn subsets_within(set: SubsetKey) -> Vec<SubsetKey> {
    let elems: Vec<usize> = set.elements().collect();
    let mut out: Vec<SubsetKey> = all_subsets(elems.len())
        .map(|local| SubsetKey::from_elements(local.elements().map(|i| elems[i])))
        .collect();
    out.sort_unstable_by_key(|s| s.order_key());
    out
}

pub fn check_enumerable(n: usize) -> Result<()> {
    if n > ENUMERATION_CAP {
        Err(Error::SizeCap {
            n,
            cap: ENUMERATION_CAP,
        })
    } else {
        Ok(())
    }
}

/// Ordered, labelled ground set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundSet {
    labels: Vec<String>,
}

impl GroundSet {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::InvalidParameter("ground set is empty".into()));
        }
        if labels.len() > MAX_ELEMENTS {
            return Err(Error::SizeCap {
                n: labels.len(),
                cap: MAX_ELEMENTS,
            });
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::InvalidParameter(format!("duplicate label {l:?}")));
            }
        }
        Ok(GroundSet { labels })
    }

    /// Ground set labelled `prefix1, prefix2, ...`.
    pub fn numbered(prefix: &str, n: usize) -> Result<Self> {
        GroundSet::new((1..=n).map(|i| format!("{prefix}{i}")))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, element: usize) -> &str {
        &self.labels[element]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn full(&self) -> SubsetKey {
        SubsetKey::full(self.len())
    }

    /// Builds a subset from labels; unknown labels are reported by name.
    pub fn subset<S: AsRef<str>>(&self, labels: &[S]) -> Result<SubsetKey> {
        labels.iter().try_fold(SubsetKey::EMPTY, |acc, l| {
            let l = l.as_ref();
            self.index_of(l)
                .map(|i| acc.with(i))
                .ok_or_else(|| Error::InvalidParameter(format!("unknown element label {l:?}")))
        })
    }

    pub fn labels_of(&self, set: SubsetKey) -> Vec<String> {
        set.elements().map(|e| self.labels[e].clone()).collect()
    }

    pub fn render(&self, set: SubsetKey) -> String {
        format!("{{{}}}", self.labels_of(set).join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gosper_counts_match_binomials() {
        for n in 0..=8 {
            for k in 0..=n {
                let subs: Vec<_> = subsets_of_size(n, k).collect();
                let binom = (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64);
                assert_eq!(subs.len() as u64, binom, "n={n} k={k}");
                assert!(subs.windows(2).all(|w| w[0] < w[1]));
                assert!(subs.iter().all(|s| s.len() == k));
            }
        }
    }

    #[test]
    fn all_subsets_is_ordered_and_complete() {
        let subs: Vec<_> = all_subsets(5).collect();
        assert_eq!(subs.len(), 32);
        assert!(subs.windows(2).all(|w| w[0].order_key() < w[1].order_key()));
    }

    #[test]
    fn subsets_within_respects_order() {
        let s = SubsetKey::from_elements([1, 3, 4]);
        let subs = subsets_within(s);
        assert_eq!(subs.len(), 8);
        assert_eq!(subs[0], SubsetKey::EMPTY);
        assert_eq!(*subs.last().unwrap(), s);
        assert!(subs.iter().all(|x| x.is_subset_of(s)));
    }

    #[test]
    fn out_of_range_mask_is_rejected() {
        assert!(SubsetKey::from_mask(0b1000).check_within(3).is_err());
        assert!(SubsetKey::from_mask(0b111).check_within(3).is_ok());
    }

    #[test]
    fn ground_set_rejects_duplicates_and_empty() {
        assert!(GroundSet::new(["a", "b", "a"]).is_err());
        assert!(GroundSet::new(Vec::<String>::new()).is_err());
        let g = GroundSet::numbered("a", 4).unwrap();
        assert_eq!(
            g.subset(&["a2", "a4"]).unwrap(),
            SubsetKey::from_mask(0b1010)
        );
        assert_eq!(g.render(SubsetKey::from_mask(0b1010)), "{a2,a4}");
    }

    #[test]
    fn size_cap() {
        assert!(check_enumerable(20).is_ok());
        assert!(matches!(check_enumerable(21), Err(Error::SizeCap { .. })));
    }
}
