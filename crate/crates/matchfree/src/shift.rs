//! Shifting (compression) of sets and families, and the counting lemma for
//! 2-sets reachable by shifts.

use std::collections::HashSet;

use thiserror::Error;

use crate::family::{Family, SetMask};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ShiftError {
    #[error("shift indices must satisfy 1 <= i < j <= n, got i={i}, j={j}, n={n}")]
    BadIndices { i: u32, j: u32, n: u32 },
}

/// `S_{i<-j}(A)`: replaces `j` by `i` when `i ∉ A` and `j ∈ A`, else `A`.
pub fn shift_set(a: SetMask, i: u32, j: u32) -> SetMask {
    if a.contains(i) || !a.contains(j) {
        a
    } else {
        a.remove(j).insert(i)
    }
}

/// The `(i<-j)`-shift of a family:
/// `{S(A) : A ∈ F} ∪ {A : A, S(A) ∈ F}`. Preserves the family size.
pub fn shift_once(f: &Family, i: u32, j: u32) -> Result<Family, ShiftError> {
    let n = f.n();
    if i < 1 || i >= j || j > n {
        return Err(ShiftError::BadIndices { i, j, n });
    }
    let mut members = Vec::with_capacity(f.len());
    for &a in f.members() {
        let b = shift_set(a, i, j);
        if b == a || f.contains(b) {
            members.push(a);
        } else {
            members.push(b);
        }
    }
    let out = Family::new(n, members).expect("shift image is duplicate-free");
    debug_assert_eq!(out.len(), f.len());
    Ok(out)
}

/// True iff every `(i<-j)`-shift with `i < j` fixes the family.
pub fn is_shifted(f: &Family) -> bool {
    let n = f.n();
    for j in 2..=n {
        for i in 1..j {
            for &a in f.members() {
                let b = shift_set(a, i, j);
                if b != a && !f.contains(b) {
                    return false;
                }
            }
        }
    }
    true
}

/// Applies all `(i, j)` shifts in lexicographic order, looping to a fixpoint.
///
/// Terminates because each proper shift strictly decreases the sum of
/// element sums over the members.
pub fn shift_closure(f: &Family) -> Family {
    let n = f.n();
    let mut cur = f.clone();
    loop {
        let mut changed = false;
        for i in 1..n {
            for j in (i + 1)..=n {
                let next = shift_once(&cur, i, j).expect("indices in range");
                if next != cur {
                    cur = next;
                    changed = true;
                }
            }
        }
        if !changed {
            return cur;
        }
    }
}

/// True iff `a` can be transformed into `b` by a sequence of `(i<-j)`-shifts
/// with `i < j` (the empty sequence included).
///
/// Uses the coordinatewise characterization: with both sets sorted
/// increasingly, every element of `a` must be >= the corresponding element
/// of `b`. Validated against BFS reachability in tests.
pub fn can_shift_to(a: SetMask, b: SetMask) -> bool {
    if a.len() != b.len() {
        return false;
    }
    a.elements()
        .iter()
        .zip(b.elements().iter())
        .all(|(x, y)| x >= y)
}

/// BFS oracle for `can_shift_to`: explores single shifts from `a`.
pub fn can_shift_to_bfs(a: SetMask, b: SetMask, n: u32) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut seen = HashSet::from([a]);
    let mut queue = vec![a];
    while let Some(m) = queue.pop() {
        if m == b {
            return true;
        }
        for j in 2..=n {
            for i in 1..j {
                let t = shift_set(m, i, j);
                if t != m && seen.insert(t) {
                    queue.push(t);
                }
            }
        }
    }
    false
}

/// Number of 2-sets `{a, b}`, `a < b`, with `a >= i` and `b >= j` — exactly
/// the 2-sets that can be shifted to `{i, j}`. Computed by direct count;
/// equals `(n + j - 2i)(n - j + 1)/2` on the whole index grid (asserted).
pub fn shiftable_pair_count(n: u32, i: u32, j: u32) -> Result<u64, ShiftError> {
    if i < 1 || i >= j || j > n {
        return Err(ShiftError::BadIndices { i, j, n });
    }
    let (n, i, j) = (n as u64, i as u64, j as u64);
    let direct: u64 = (j..=n).map(|b| b - i).sum();
    debug_assert_eq!(direct, (n + j - 2 * i) * (n - j + 1) / 2);
    Ok(direct)
}
