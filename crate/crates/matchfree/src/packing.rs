//! Exact maximum-matching (set packing) solver over bitmask families.
//!
//! Branch and bound on the candidate list sorted by popcount ascending,
//! with a greedy packing lower bound and an element-budget upper bound:
//! any further packing into `free` untouched elements can use at most as
//! many candidates as fit by total size, smallest sizes first.

use thiserror::Error;

use crate::family::{Family, MatchingWitness, SetMask};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PackingError {
    #[error("the empty set is not a matchable member; drop it or use the explicit policy")]
    EmptySetPresent,
}

/// How matching-sensitive operations treat a family holding the empty set.
///
/// Families are collections of distinct sets, so at most one copy of `∅`
/// can occur; under the distinct-sets convention it is disjoint from
/// everything and adds exactly one to the matching number.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmptySetPolicy {
    Reject,
    CountsAsMember,
}

struct Search<'a> {
    cands: &'a [u64],
    sizes: &'a [u32],
    n_free_total: u32,
}

impl Search<'_> {
    /// Upper bound on how many further candidates from `cands[start..]`
    /// can be packed into the elements outside `used`.
    fn budget_bound(&self, start: usize, used: u64) -> usize {
        let mut budget = self.n_free_total - (used.count_ones());
        let mut count = 0;
        for (i, &c) in self.cands[start..].iter().enumerate() {
            if c & used == 0 {
                let sz = self.sizes[start + i];
                if sz <= budget {
                    budget -= sz;
                    count += 1;
                } else {
                    break;
                }
            }
        }
        count
    }

    fn maximize(&self, start: usize, used: u64, cur: &mut Vec<u64>, best: &mut Vec<u64>) {
        if cur.len() > best.len() {
            *best = cur.clone();
        }
        if cur.len() + self.budget_bound(start, used) <= best.len() {
            return;
        }
        for i in start..self.cands.len() {
            let c = self.cands[i];
            if c & used == 0 {
                cur.push(c);
                self.maximize(i + 1, used | c, cur, best);
                cur.pop();
            }
        }
    }

    fn find_exact(&self, target: usize, start: usize, used: u64, cur: &mut Vec<u64>) -> bool {
        if cur.len() == target {
            return true;
        }
        if cur.len() + self.budget_bound(start, used) < target {
            return false;
        }
        for i in start..self.cands.len() {
            let c = self.cands[i];
            if c & used == 0 {
                cur.push(c);
                if self.find_exact(target, i + 1, used | c, cur) {
                    return true;
                }
                cur.pop();
            }
        }
        false
    }
}

fn sorted_candidates(f: &Family) -> (Vec<u64>, Vec<u32>) {
    // Replacing each member by a minimal member inside it preserves all
    // matchings of distinct nonempty sets, so solve on the minimal members.
    let reduced = if f.len() > 64 {
        f.minimal_members()
    } else {
        f.clone()
    };
    let mut cands: Vec<u64> = reduced.members().iter().map(|m| m.0).collect();
    cands.sort_unstable_by_key(|c| (c.count_ones(), *c));
    let sizes = cands.iter().map(|c| c.count_ones()).collect();
    (cands, sizes)
}

/// Ground sets small enough for the exact subset dynamic program.
const DP_GROUND_LIMIT: u32 = 22;

/// Exact maximum matching by dynamic programming over element subsets:
/// `best(S)` either skips the lowest element of `S` or spends a candidate
/// containing it. Runs in `O(2^n)` states and is immune to the branching
/// blow-ups dense families cause in the search tree.
struct SubsetDp {
    table: Vec<u8>,
    by_lowest: Vec<Vec<u64>>,
}

impl SubsetDp {
    fn solve(n: u32, cands: &[u64]) -> SubsetDp {
        let mut by_lowest: Vec<Vec<u64>> = vec![Vec::new(); n as usize];
        for &c in cands {
            by_lowest[c.trailing_zeros() as usize].push(c);
        }
        let mut table = vec![0u8; 1 << n];
        for s_mask in 1u64..1 << n {
            let e = s_mask.trailing_zeros() as usize;
            let mut best = table[(s_mask & (s_mask - 1)) as usize];
            for &c in &by_lowest[e] {
                if c & !s_mask == 0 {
                    best = best.max(1 + table[(s_mask & !c) as usize]);
                }
            }
            table[s_mask as usize] = best;
        }
        SubsetDp { table, by_lowest }
    }

    fn value(&self) -> usize {
        *self.table.last().expect("table covers the full ground set") as usize
    }

    fn witness(&self, n: u32) -> Vec<u64> {
        let mut out = Vec::new();
        let mut s_mask = (1u64 << n) - 1;
        while s_mask != 0 {
            let e = s_mask.trailing_zeros() as usize;
            let without = s_mask & (s_mask - 1);
            if self.table[s_mask as usize] == self.table[without as usize] {
                s_mask = without;
                continue;
            }
            let chosen = self.by_lowest[e]
                .iter()
                .copied()
                .find(|&c| {
                    c & !s_mask == 0
                        && self.table[s_mask as usize] == 1 + self.table[(s_mask & !c) as usize]
                })
                .expect("table value must be witnessed");
            out.push(chosen);
            s_mask &= !chosen;
        }
        out.sort_unstable();
        out
    }
}

fn greedy(cands: &[u64]) -> Vec<u64> {
    let mut used = 0u64;
    let mut out = Vec::new();
    for &c in cands {
        if c & used == 0 {
            out.push(c);
            used |= c;
        }
    }
    out
}

/// Exact matching number with a witness attaining it.
///
/// The empty set is rejected; use [`matching_number_with_policy`] to opt in.
pub fn matching_number(f: &Family) -> Result<(usize, MatchingWitness), PackingError> {
    if f.contains_empty_set() {
        return Err(PackingError::EmptySetPresent);
    }
    let (cands, sizes) = sorted_candidates(f);
    let best = if f.n() <= DP_GROUND_LIMIT && cands.len() > 24 {
        let dp = SubsetDp::solve(f.n(), &cands);
        dp.witness(f.n())
    } else {
        let search = Search {
            cands: &cands,
            sizes: &sizes,
            n_free_total: f.n(),
        };
        let mut best = greedy(&cands);
        search.maximize(0, 0, &mut Vec::new(), &mut best);
        best
    };
    let witness = MatchingWitness {
        sets: best.into_iter().map(SetMask).collect(),
    };
    debug_assert!(witness.is_valid_for(f));
    Ok((witness.len(), witness))
}

/// Matching number under an explicit empty-set policy.
pub fn matching_number_with_policy(
    f: &Family,
    policy: EmptySetPolicy,
) -> Result<(usize, MatchingWitness), PackingError> {
    if !f.contains_empty_set() {
        return matching_number(f);
    }
    match policy {
        EmptySetPolicy::Reject => Err(PackingError::EmptySetPresent),
        EmptySetPolicy::CountsAsMember => {
            let rest = f.filter(|m| !m.is_empty());
            let (size, mut witness) = matching_number(&rest)?;
            witness.sets.insert(0, SetMask::EMPTY);
            Ok((size + 1, witness))
        }
    }
}

/// A witness of `s` pairwise disjoint members if one exists (early exit).
///
/// Agrees with `matching_number(f).0 >= s`.
pub fn find_matching(f: &Family, s: usize) -> Result<Option<MatchingWitness>, PackingError> {
    assert!(s >= 1, "a matching size must be positive");
    if f.contains_empty_set() {
        return Err(PackingError::EmptySetPresent);
    }
    if s > f.n() as usize || s > f.len() {
        return Ok(None);
    }
    let (cands, sizes) = sorted_candidates(f);
    let found = if f.n() <= DP_GROUND_LIMIT && cands.len() > 600 {
        let dp = SubsetDp::solve(f.n(), &cands);
        if dp.value() >= s {
            Some(dp.witness(f.n())[..s].to_vec())
        } else {
            None
        }
    } else {
        let search = Search {
            cands: &cands,
            sizes: &sizes,
            n_free_total: f.n(),
        };
        let mut cur = Vec::with_capacity(s);
        search.find_exact(s, 0, 0, &mut cur).then_some(cur)
    };
    match found {
        Some(sets) => {
            let witness = MatchingWitness {
                sets: sets.into_iter().map(SetMask).collect(),
            };
            debug_assert!(witness.is_valid_for(f));
            Ok(Some(witness))
        }
        None => Ok(None),
    }
}
