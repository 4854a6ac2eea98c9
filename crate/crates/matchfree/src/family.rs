use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::params::MAX_GROUND;

/// A subset of the ground set `[n]` as a machine word: bit `k-1` set iff
/// element `k` is present. `n <= 62`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SetMask(pub u64);

impl SetMask {
    pub const EMPTY: SetMask = SetMask(0);

    /// Mask from 1-based elements.
    pub fn from_elements(elements: &[u32]) -> SetMask {
        let mut bits = 0u64;
        for &e in elements {
            assert!((1..=MAX_GROUND).contains(&e), "element out of range: {e}");
            bits |= 1 << (e - 1);
        }
        SetMask(bits)
    }

    /// 1-based elements in increasing order.
    pub fn elements(self) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.len());
        let mut bits = self.0;
        while bits != 0 {
            let b = bits.trailing_zeros();
            out.push(b + 1);
            bits &= bits - 1;
        }
        out
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, element: u32) -> bool {
        element >= 1 && element <= 64 && self.0 >> (element - 1) & 1 == 1
    }

    pub fn insert(self, element: u32) -> SetMask {
        SetMask(self.0 | 1 << (element - 1))
    }

    pub fn remove(self, element: u32) -> SetMask {
        SetMask(self.0 & !(1 << (element - 1)))
    }

    pub fn intersect(self, other: SetMask) -> SetMask {
        SetMask(self.0 & other.0)
    }

    pub fn is_disjoint(self, other: SetMask) -> bool {
        self.0 & other.0 == 0
    }

    pub fn is_subset_of(self, other: SetMask) -> bool {
        self.0 & !other.0 == 0
    }

    /// Full ground set `[n]` (prefix mask; also used for interval `[1,n]`).
    pub fn full(n: u32) -> SetMask {
        debug_assert!(n <= MAX_GROUND);
        SetMask(if n == 0 { 0 } else { (1 << n) - 1 })
    }

    /// Interval `[a, b]` as a mask; empty when `a > b`.
    pub fn interval(a: u32, b: u32) -> SetMask {
        if a > b {
            SetMask(0)
        } else {
            SetMask(SetMask::full(b).0 & !SetMask::full(a - 1).0)
        }
    }
}

impl fmt::Display for SetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, e) in self.elements().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "}}")
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FamilyError {
    #[error("ground set size {0} exceeds {MAX_GROUND}")]
    TooWide(u32),
    #[error("member {0} has an element above the ground set size")]
    OutOfRange(u64),
    #[error("duplicate member in family input")]
    Duplicate,
    #[error("element {0} out of range for ground set of size {1}")]
    BadElement(u32, u32),
    #[error("the empty set is not allowed here")]
    EmptySetPresent,
}

/// A canonical collection of subsets of `[n]`: members strictly increasing
/// by numeric mask value, so equal families have bitwise-equal encodings.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Family {
    n: u32,
    members: Vec<SetMask>,
}

impl Family {
    /// Canonicalizes (sorts) `members`; rejects duplicates and out-of-range bits.
    pub fn new(n: u32, mut members: Vec<SetMask>) -> Result<Family, FamilyError> {
        if n > MAX_GROUND {
            return Err(FamilyError::TooWide(n));
        }
        let full = SetMask::full(n);
        if let Some(bad) = members.iter().find(|m| !m.is_subset_of(full)) {
            return Err(FamilyError::OutOfRange(bad.0));
        }
        members.sort_unstable();
        if members.windows(2).any(|w| w[0] == w[1]) {
            return Err(FamilyError::Duplicate);
        }
        Ok(Family { n, members })
    }

    pub fn empty(n: u32) -> Family {
        Family {
            n,
            members: Vec::new(),
        }
    }

    /// All nonempty subsets `A` of `[n]` with `predicate(A)`.
    ///
    /// Walks all `2^n` masks, so only sensible for small `n`.
    pub fn from_predicate(n: u32, predicate: impl Fn(SetMask) -> bool) -> Family {
        assert!(n <= 26, "2^{n} masks is too large to materialize");
        let members = (1..1u64 << n)
            .map(SetMask)
            .filter(|&m| predicate(m))
            .collect();
        Family { n, members }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[SetMask] {
        &self.members
    }

    pub fn contains(&self, m: SetMask) -> bool {
        self.members.binary_search(&m).is_ok()
    }

    pub fn contains_empty_set(&self) -> bool {
        self.members.first() == Some(&SetMask::EMPTY)
    }

    /// Keeps the members satisfying `keep`.
    pub fn filter(&self, keep: impl Fn(SetMask) -> bool) -> Family {
        Family {
            n: self.n,
            members: self.members.iter().copied().filter(|&m| keep(m)).collect(),
        }
    }

    /// Members entirely inside `window`, re-read as a family over the same `[n]`.
    pub fn restrict_to(&self, window: SetMask) -> Family {
        self.filter(|m| m.is_subset_of(window))
    }

    /// The `i`-th layer sizes are implicit in `y_profile`; this returns layer `k`.
    pub fn layer(&self, k: usize) -> Family {
        self.filter(|m| m.len() == k)
    }

    /// Layer deficits `y(i) = C(n, i) - |F^{ (i) }|` for `i = 0..=n`.
    pub fn y_profile(&self) -> Vec<u64> {
        let mut present = vec![0u64; self.n as usize + 1];
        for m in &self.members {
            present[m.len()] += 1;
        }
        (0..=self.n as u64)
            .map(|i| crate::binom64(self.n as u64, i) - present[i as usize])
            .collect()
    }

    /// True iff every superset (within `[n]`) of a member is a member.
    pub fn is_upset(&self) -> bool {
        let set: HashSet<SetMask> = self.members.iter().copied().collect();
        for &m in &self.members {
            for e in 1..=self.n {
                if !m.contains(e) && !set.contains(&m.insert(e)) {
                    return false;
                }
            }
        }
        true
    }

    /// Minimal up-set containing the family.
    pub fn upset_closure(&self) -> Family {
        let mut seen: HashSet<SetMask> = self.members.iter().copied().collect();
        let mut queue: Vec<SetMask> = self.members.clone();
        while let Some(m) = queue.pop() {
            for e in 1..=self.n {
                if !m.contains(e) {
                    let up = m.insert(e);
                    if seen.insert(up) {
                        queue.push(up);
                    }
                }
            }
        }
        let mut members: Vec<SetMask> = seen.into_iter().collect();
        members.sort_unstable();
        Family { n: self.n, members }
    }

    /// Inclusion-minimal members. Matchings are preserved under replacing a
    /// member by a member contained in it, so for `∅`-free families
    /// `nu(F) = nu(minimal_members(F))`.
    pub fn minimal_members(&self) -> Family {
        let mut by_size = self.members.clone();
        by_size.sort_unstable_by_key(|m| (m.len(), m.0));
        let mut minimal: Vec<SetMask> = Vec::new();
        'outer: for m in by_size {
            for &b in &minimal {
                if b.is_subset_of(m) {
                    continue 'outer;
                }
            }
            minimal.push(m);
        }
        minimal.sort_unstable();
        Family {
            n: self.n,
            members: minimal,
        }
    }

    /// Lifts the family over `[n]` to `{F ⊆ [n+1] : F ∩ [n] ∈ self}`:
    /// doubles the size and (for `∅`-free families) preserves the
    /// matching number.
    pub fn doubling(&self) -> Result<Family, FamilyError> {
        if self.contains_empty_set() {
            return Err(FamilyError::EmptySetPresent);
        }
        let n = self.n + 1;
        if n > MAX_GROUND {
            return Err(FamilyError::TooWide(n));
        }
        let top = 1u64 << (n - 1);
        let mut members = Vec::with_capacity(self.members.len() * 2);
        for &m in &self.members {
            members.push(m);
            members.push(SetMask(m.0 | top));
        }
        members.sort_unstable();
        Ok(Family { n, members })
    }
}

/// A set of pairwise disjoint, distinct members witnessing a matching.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchingWitness {
    pub sets: Vec<SetMask>,
}

impl MatchingWitness {
    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    /// Checks the witness against the family it claims to come from.
    pub fn is_valid_for(&self, family: &Family) -> bool {
        let mut union = 0u64;
        let mut seen = HashSet::new();
        for &m in &self.sets {
            if !family.contains(m) || !seen.insert(m) {
                return false;
            }
            if union & m.0 != 0 {
                return false;
            }
            union |= m.0;
        }
        true
    }
}

/// Interchange document: `{"n": int, "sets": [[int,...],...]}` with 1-based
/// elements. Emitted in canonical order; accepted in any order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FamilyDoc {
    pub n: u32,
    pub sets: Vec<Vec<u32>>,
}

impl From<&Family> for FamilyDoc {
    fn from(f: &Family) -> FamilyDoc {
        FamilyDoc {
            n: f.n,
            sets: f.members.iter().map(|m| m.elements()).collect(),
        }
    }
}

impl TryFrom<FamilyDoc> for Family {
    type Error = FamilyError;

    fn try_from(doc: FamilyDoc) -> Result<Family, FamilyError> {
        if doc.n > MAX_GROUND {
            return Err(FamilyError::TooWide(doc.n));
        }
        let mut members = Vec::with_capacity(doc.sets.len());
        for set in &doc.sets {
            let mut mask = SetMask::EMPTY;
            for &e in set {
                if e < 1 || e > doc.n {
                    return Err(FamilyError::BadElement(e, doc.n));
                }
                mask = mask.insert(e);
            }
            members.push(mask);
        }
        Family::new(doc.n, members)
    }
}
