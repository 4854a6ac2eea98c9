//! Generators for the named families and their fractional-cover certificates.
//!
//! On the ground set `[n]` with `n = 2s + c = 3s - l`:
//!
//! * `P`  = all `A` with `|A| + |A ∩ [l-1]| >= 3`;
//! * `P'` = all sets of size >= 3, plus the 2-sets inside `[2l-1]`;
//! * `Q`  = all sets of size >= 3, plus the 2-sets inside `[s+l-1]`,
//!   minus the 3-sets inside `[s+l, n]` (the removal binds last; it only
//!   ever removes 3-sets, so the reading is unambiguous);
//! * `W`  = all `A` with `|A ∩ [2s-1]| >= 2`.
//!
//! None of these families contain the empty set or singletons, and each
//! comes with nonnegative element weights summing below `s` under which
//! every member weighs at least 1 — certifying that no `s`-matching exists.

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::family::{Family, SetMask};
use crate::packing::{find_matching, matching_number};
use crate::params::{Params, MAX_GROUND};
use crate::{binom, Rat};

/// The four candidate extremal family kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ExtremalKind {
    P,
    Pprime,
    Q,
    W,
}

impl ExtremalKind {
    pub const ALL: [ExtremalKind; 4] = [
        ExtremalKind::P,
        ExtremalKind::Pprime,
        ExtremalKind::Q,
        ExtremalKind::W,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExtremalKind::P => "P",
            ExtremalKind::Pprime => "Pprime",
            ExtremalKind::Q => "Q",
            ExtremalKind::W => "W",
        }
    }
}

impl std::str::FromStr for ExtremalKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "p" => Ok(ExtremalKind::P),
            "pprime" | "p'" | "pp" => Ok(ExtremalKind::Pprime),
            "q" => Ok(ExtremalKind::Q),
            "w" => Ok(ExtremalKind::W),
            other => Err(format!("unknown family kind: {other}")),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstructError {
    #[error("parameter out of range: {0}")]
    BadParameter(String),
    #[error("family too large to materialize ({0} members)")]
    TooLarge(u128),
    #[error("weight vector has {got} entries for a ground set of size {want}")]
    DimensionMismatch { got: usize, want: usize },
}

/// Membership predicate for the four kinds; total over all masks in `[n]`.
pub fn kind_contains(kind: ExtremalKind, p: &Params, a: SetMask) -> bool {
    match kind {
        ExtremalKind::P => a.len() as u32 + a.intersect(SetMask::full(p.l - 1)).len() as u32 >= 3,
        ExtremalKind::Pprime => {
            a.len() >= 3 || (a.len() == 2 && a.is_subset_of(SetMask::full(2 * p.l - 1)))
        }
        ExtremalKind::Q => {
            let clique = SetMask::full(p.s + p.l - 1);
            let top = SetMask::interval(p.s + p.l, p.n);
            let base = a.len() >= 3 || (a.len() == 2 && a.is_subset_of(clique));
            base && !(a.len() == 3 && a.is_subset_of(top))
        }
        ExtremalKind::W => a.intersect(SetMask::full(2 * p.s - 1)).len() >= 2,
    }
}

const MATERIALIZE_LIMIT: u32 = 24;

/// Explicit member list of the family; only for `n <= 24`.
pub fn materialize(kind: ExtremalKind, p: &Params) -> Result<Family, ConstructError> {
    if p.n > MATERIALIZE_LIMIT {
        return Err(ConstructError::TooLarge(1u128 << p.n));
    }
    Ok(Family::from_predicate(p.n, |a| kind_contains(kind, p, a)))
}

/// Iterates all `k`-element subsets of `[n]` in colex order (Gosper's hack).
pub fn for_each_k_subset(n: u32, k: u32, mut visit: impl FnMut(SetMask)) {
    if k > n {
        return;
    }
    if k == 0 {
        visit(SetMask::EMPTY);
        return;
    }
    let limit = 1u64 << n;
    let mut v: u64 = (1 << k) - 1;
    while v < limit {
        visit(SetMask(v));
        let u = v & v.wrapping_neg();
        let w = v + u;
        v = w | (((v ^ w) / u) >> 2);
    }
}

/// Number of missing `k`-sets of the family, by direct enumeration of the
/// `k`-th layer. Cheap for `k <= 3` at any `n <= 62`.
pub fn missing_in_layer(kind: ExtremalKind, p: &Params, k: u32) -> u64 {
    let mut missing = 0;
    for_each_k_subset(p.n, k, |a| {
        if !kind_contains(kind, p, a) {
            missing += 1;
        }
    });
    missing
}

/// Exact complement size `2^n - |family|` without materializing the family.
///
/// `P`, `P'` and `Q` contain every set of size >= 4 by construction, so
/// their complements are enumerated layer by layer up to 3. A set is
/// outside `W` exactly when it has at most one element of `[2s-1]`, so
/// `W`'s complement is walked as a choice of at most one head element
/// plus any subset of `[2s, n]`, each candidate checked against the
/// membership predicate. The `W` walk visits `2^(c+2) s` sets; keep it to
/// cells where that is affordable.
pub fn complement_size_enumerated(kind: ExtremalKind, p: &Params) -> u128 {
    match kind {
        ExtremalKind::P | ExtremalKind::Pprime | ExtremalKind::Q => {
            (0..=3).map(|k| missing_in_layer(kind, p, k) as u128).sum()
        }
        ExtremalKind::W => {
            let head_len = 2 * p.s - 1;
            let mut count = 0u128;
            for t in 0..1u64 << (p.n - head_len) {
                let tail = SetMask(t << head_len);
                if !kind_contains(kind, p, tail) {
                    count += 1;
                }
                for x in 1..=head_len {
                    if !kind_contains(kind, p, tail.insert(x)) {
                        count += 1;
                    }
                }
            }
            count
        }
    }
}

/// `P(s, m, l) = {A ⊆ [n] : |A| + |A ∩ [l-1]| >= m + 1}` on `n = sm + s - l`.
pub fn family_p_general(s: u32, m: u32, l: u32) -> Result<Family, ConstructError> {
    if l == 0 || l > s || m == 0 {
        return Err(ConstructError::BadParameter(format!(
            "need 0 < l <= s and m >= 1, got s={s}, m={m}, l={l}"
        )));
    }
    let n = s * m + s - l;
    if n > MAX_GROUND {
        return Err(ConstructError::BadParameter(format!(
            "n = {n} exceeds {MAX_GROUND}"
        )));
    }
    if n > MATERIALIZE_LIMIT {
        return Err(ConstructError::TooLarge(1u128 << n));
    }
    let head = SetMask::full(l - 1);
    Ok(Family::from_predicate(n, |a| {
        a.len() as u32 + a.intersect(head).len() as u32 >= m + 1
    }))
}

/// `A_i(n, s-1) = {F ∈ C([n], k) : |F ∩ [si-1]| >= i}`; `nu <= s - 1`.
pub fn family_a(n: u32, k: u32, i: u32, s: u32) -> Result<Family, ConstructError> {
    if i == 0 || i > k || n < s * k || n > MAX_GROUND {
        return Err(ConstructError::BadParameter(format!(
            "need 1 <= i <= k and sk <= n <= {MAX_GROUND}, got n={n}, k={k}, i={i}, s={s}"
        )));
    }
    let size = binom(n as u64, k as u64);
    if size > 10_000_000 {
        return Err(ConstructError::TooLarge(size));
    }
    let head = SetMask::full(s * i - 1);
    let mut members = Vec::new();
    for_each_k_subset(n, k, |a| {
        if a.intersect(head).len() as u32 >= i {
            members.push(a);
        }
    });
    Ok(Family::new(n, members).expect("k-subsets are distinct"))
}

/// Kleitman's extremal family: for `n = sm - 1` all sets of size >= m; for
/// `n = sm` the doubling of the `n - 1` case.
pub fn family_kleitman(n: u32, s: u32) -> Result<Family, ConstructError> {
    if s == 0 || n == 0 || n > MAX_GROUND {
        return Err(ConstructError::BadParameter(format!(
            "need s >= 1, 1 <= n <= {MAX_GROUND}"
        )));
    }
    if n > MATERIALIZE_LIMIT {
        return Err(ConstructError::TooLarge(1u128 << n));
    }
    if (n + 1) % s == 0 {
        let m = (n + 1) / s;
        Ok(Family::from_predicate(n, |a| a.len() as u32 >= m))
    } else if n % s == 0 {
        let m = n / s;
        let base = Family::from_predicate(n - 1, |a| a.len() as u32 >= m);
        Ok(base.doubling().expect("base family holds no empty set"))
    } else {
        Err(ConstructError::BadParameter(format!(
            "n = {n} is neither sm - 1 nor sm for s = {s}"
        )))
    }
}

/// Exact nonnegative element weights; a valid cover sums below `s` while
/// every member of the certified family weighs at least 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FractionalCover {
    pub weights: Vec<Rat>,
}

impl FractionalCover {
    pub fn sum(&self) -> Rat {
        self.weights.iter().sum()
    }

    pub fn weight_of(&self, a: SetMask) -> Rat {
        a.elements()
            .iter()
            .map(|&e| self.weights[e as usize - 1])
            .sum()
    }
}

/// Head length and the two weight values of each certificate vector:
/// a high weight on an initial interval, a low weight on the rest.
fn certificate_shape(kind: ExtremalKind, p: &Params) -> (u32, Rat, Rat) {
    match kind {
        ExtremalKind::P => (p.l - 1, Rat::new(2, 3), Rat::new(1, 3)),
        ExtremalKind::Pprime => (2 * p.l - 1, Rat::new(1, 2), Rat::new(1, 3)),
        ExtremalKind::Q => (2 * p.s - p.c - 1, Rat::new(1, 2), Rat::new(1, 4)),
        ExtremalKind::W => (2 * p.s - 1, Rat::new(1, 2), Rat::zero()),
    }
}

/// The certificate vector for each kind.
pub fn certificate_for(kind: ExtremalKind, p: &Params) -> FractionalCover {
    let (head_len, head, tail) = certificate_shape(kind, p);
    let weights = (1..=p.n)
        .map(|e| if e <= head_len { head } else { tail })
        .collect();
    FractionalCover { weights }
}

/// Exact check of the weak-duality certificate on an explicit family:
/// all weights nonnegative, total below `s`, every member at least 1.
/// A `true` result implies `nu(f) < s`.
pub fn verify_cover(f: &Family, x: &FractionalCover, s: u32) -> Result<bool, ConstructError> {
    if x.weights.len() != f.n() as usize {
        return Err(ConstructError::DimensionMismatch {
            got: x.weights.len(),
            want: f.n() as usize,
        });
    }
    if x.weights.iter().any(|w| w < &Rat::zero()) {
        return Ok(false);
    }
    if x.sum() >= Rat::from_integer(s as i64) {
        return Ok(false);
    }
    let one = Rat::from_integer(1);
    Ok(f.members().iter().all(|&m| x.weight_of(m) >= one))
}

/// Inclusion-minimal members of the generator, without materializing it.
///
/// Every member contains a member of size at most 4: members of `P`, `P'`
/// of size >= 4 contain a 3-subset, and all 3-sets are members; members of
/// `Q` of size >= 5 contain a 4-subset, and all 4-sets are members; a
/// member of `W` contains one of its 2-subsets inside `[2s-1]`. So the
/// minimal members all live in layers 1..=4 and are found by scanning
/// those layers.
pub fn minimal_generator_members(kind: ExtremalKind, p: &Params) -> Family {
    let mut members = Vec::new();
    for k in 1..=4u32.min(p.n) {
        for_each_k_subset(p.n, k, |a| {
            if kind_contains(kind, p, a) {
                // minimal iff no proper nonempty subset is a member
                let mut sub = (a.0 - 1) & a.0;
                let mut minimal = true;
                while sub != 0 {
                    if kind_contains(kind, p, SetMask(sub)) {
                        minimal = false;
                        break;
                    }
                    sub = (sub - 1) & a.0;
                }
                if minimal {
                    members.push(a);
                }
            }
        });
    }
    Family::new(p.n, members).expect("layer scan yields distinct sets")
}

/// Exact matching number of the generator via the minimal-member reduction
/// (valid because generators are `∅`-free and matchings survive replacing
/// each member by a minimal member inside it).
pub fn generator_matching_number(kind: ExtremalKind, p: &Params) -> usize {
    let minimals = minimal_generator_members(kind, p);
    matching_number(&minimals)
        .expect("generators are empty-set-free")
        .0
}

/// Whether the generator contains an `s`-matching, via the same reduction.
pub fn generator_has_matching(kind: ExtremalKind, p: &Params, s: u32) -> bool {
    let minimals = minimal_generator_members(kind, p);
    find_matching(&minimals, s as usize)
        .expect("generators are empty-set-free")
        .is_some()
}

/// Certificate audit that scales to `n <= 62`: the weight sum must stay
/// below `s` and the minimum member weight must reach 1. The minimum over
/// all members equals the minimum over members of size <= 4, because
/// weights are nonnegative and every member contains a member of size <= 4
/// (see [`minimal_generator_members`]).
#[derive(Debug, Clone, Serialize)]
pub struct CertificateReport {
    pub kind: ExtremalKind,
    pub s: u32,
    pub c: u32,
    pub sum_num: i64,
    pub sum_den: i64,
    pub min_member_weight_num: i64,
    pub min_member_weight_den: i64,
    pub ok: bool,
}

pub fn certify_generator(kind: ExtremalKind, p: &Params) -> CertificateReport {
    let (head_len, head, tail) = certificate_shape(kind, p);
    let head_mask = SetMask::full(head_len);
    // all weights are twelfths, so member weights compare in integers
    let twelve = Rat::from_integer(12);
    let head12 = *(head * twelve).numer();
    let tail12 = *(tail * twelve).numer();
    let sum = head * Rat::from_integer(head_len as i64)
        + tail * Rat::from_integer((p.n - head_len) as i64);
    let mut min12: Option<i64> = None;
    for k in 1..=4u32.min(p.n) {
        for_each_k_subset(p.n, k, |a| {
            if kind_contains(kind, p, a) {
                let in_head = a.intersect(head_mask).len() as i64;
                let w12 = in_head * head12 + (a.len() as i64 - in_head) * tail12;
                if min12.map_or(true, |m| w12 < m) {
                    min12 = Some(w12);
                }
            }
        });
    }
    let min_weight = Rat::new(min12.expect("generators are nonempty"), 12);
    let ok = sum < Rat::from_integer(p.s as i64) && min_weight >= Rat::from_integer(1);
    CertificateReport {
        kind,
        s: p.s,
        c: p.c,
        sum_num: *sum.numer(),
        sum_den: *sum.denom(),
        min_member_weight_num: *min_weight.numer(),
        min_member_weight_den: *min_weight.denom(),
        ok,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shift::{is_shifted, shift_closure};

    fn p(s: u32, c: u32) -> Params {
        Params::new(s, c).unwrap()
    }

    #[test]
    fn generator_sizes_at_3_1() {
        let p31 = p(3, 1);
        assert_eq!(materialize(ExtremalKind::P, &p31).unwrap().len(), 105);
        assert_eq!(materialize(ExtremalKind::Pprime, &p31).unwrap().len(), 102);
        assert_eq!(materialize(ExtremalKind::Q, &p31).unwrap().len(), 104);
        assert_eq!(materialize(ExtremalKind::W, &p31).unwrap().len(), 104);
    }

    #[test]
    fn complement_enumeration_matches_materialized() {
        for (s, c) in [(2, 1), (3, 1), (3, 2), (4, 1), (4, 2), (4, 3), (5, 2)] {
            let pr = p(s, c);
            for kind in ExtremalKind::ALL {
                let full = materialize(kind, &pr).unwrap().len() as u128;
                assert_eq!(
                    complement_size_enumerated(kind, &pr),
                    (1u128 << pr.n) - full,
                    "{kind:?} at ({s},{c})"
                );
            }
        }
    }

    #[test]
    fn generators_have_no_small_sets_and_are_shifted_upsets() {
        for pr in Params::grid(12) {
            for kind in ExtremalKind::ALL {
                let f = materialize(kind, &pr).unwrap();
                assert!(f.members().iter().all(|m| m.len() >= 2));
                assert!(f.is_upset(), "{kind:?} at ({},{}) not an up-set", pr.s, pr.c);
                assert!(is_shifted(&f), "{kind:?} at ({},{}) not shifted", pr.s, pr.c);
            }
        }
    }

    #[test]
    fn p_general_specializations() {
        let p31 = p(3, 1);
        assert_eq!(
            family_p_general(3, 2, 2).unwrap(),
            materialize(ExtremalKind::P, &p31).unwrap()
        );
        let f = family_p_general(2, 3, 1).unwrap();
        assert_eq!(f.n(), 7);
        assert!(f.members().iter().all(|m| m.len() >= 4));
        assert_eq!(f.len() as u128, (4..=7).map(|k| binom(7, k)).sum::<u128>());
        let (nu, _) = matching_number(&family_p_general(3, 2, 2).unwrap()).unwrap();
        assert!(nu < 3);
        assert!(family_p_general(3, 0, 2).is_err());
        assert!(family_p_general(3, 2, 4).is_err());
    }

    #[test]
    fn family_a_counts_and_nu() {
        assert_eq!(family_a(6, 2, 2, 3).unwrap().len(), 10);
        assert_eq!(family_a(6, 2, 1, 3).unwrap().len(), 9);
        let (nu, _) = matching_number(&family_a(6, 2, 2, 3).unwrap()).unwrap();
        assert_eq!(nu, 2);
        assert!(family_a(6, 2, 3, 3).is_err());
        assert!(family_a(5, 2, 1, 3).is_err());
    }

    #[test]
    fn kleitman_families() {
        let f = family_kleitman(5, 2).unwrap();
        assert_eq!(f.len(), 16);
        let (nu, _) = matching_number(&f).unwrap();
        assert_eq!(nu, 1);
        assert_eq!(family_kleitman(6, 2).unwrap().len(), 32);
        assert!(family_kleitman(7, 3).is_err());
        // the doubled construction's size equals the closed form on both
        // shapes; asserted, never assumed
        for (n, s) in [(5, 2), (6, 2), (6, 3), (8, 4), (9, 3), (11, 4), (7, 4)] {
            let f = family_kleitman(n, s).unwrap();
            let expected = crate::formulas::kleitman_value(n, s).unwrap();
            assert_eq!(f.len() as u128, expected, "size at ({n},{s})");
        }
    }

    #[test]
    fn w_is_iterated_doubling() {
        for pr in Params::grid(16) {
            let mut f = Family::from_predicate(2 * pr.s - 1, |a| a.len() >= 2);
            for _ in 0..=pr.c {
                f = f.doubling().unwrap();
            }
            assert_eq!(
                f,
                materialize(ExtremalKind::W, &pr).unwrap(),
                "W at ({},{})",
                pr.s,
                pr.c
            );
        }
    }

    #[test]
    fn certificates_verify_on_materialized_families() {
        for (s, c) in [(2, 1), (3, 1), (3, 2), (4, 1), (4, 2), (4, 3)] {
            let pr = p(s, c);
            for kind in ExtremalKind::ALL {
                let f = materialize(kind, &pr).unwrap();
                let cover = certificate_for(kind, &pr);
                assert_eq!(
                    verify_cover(&f, &cover, s),
                    Ok(true),
                    "{kind:?} at ({s},{c})"
                );
            }
        }
    }

    #[test]
    fn certificate_sums_at_3_1() {
        let p31 = p(3, 1);
        assert_eq!(certificate_for(ExtremalKind::P, &p31).sum(), Rat::new(8, 3));
        assert_eq!(certificate_for(ExtremalKind::W, &p31).sum(), Rat::new(5, 2));
        let q = certificate_for(ExtremalKind::Q, &p31);
        assert_eq!(q.sum(), Rat::new(11, 4));
        assert_eq!(q.weights[3], Rat::new(1, 2));
        assert_eq!(q.weights[4], Rat::new(1, 4));
    }

    #[test]
    fn verify_cover_rejects_uncovered_member() {
        let p31 = p(3, 1);
        let f = Family::new(7, vec![SetMask::from_elements(&[2, 3])]).unwrap();
        let cover = certificate_for(ExtremalKind::P, &p31);
        assert_eq!(verify_cover(&f, &cover, 3), Ok(false));
    }

    #[test]
    fn verify_cover_vacuous_on_empty_family() {
        let f = Family::empty(4);
        let cover = FractionalCover {
            weights: vec![Rat::zero(); 4],
        };
        assert_eq!(verify_cover(&f, &cover, 1), Ok(true));
        let bad = FractionalCover {
            weights: vec![Rat::zero(); 3],
        };
        assert!(verify_cover(&f, &bad, 1).is_err());
    }

    #[test]
    fn minimal_members_match_materialized_reduction() {
        for (s, c) in [(2, 1), (3, 1), (3, 2), (4, 1), (4, 2)] {
            let pr = p(s, c);
            for kind in ExtremalKind::ALL {
                let f = materialize(kind, &pr).unwrap();
                assert_eq!(
                    minimal_generator_members(kind, &pr),
                    f.minimal_members(),
                    "{kind:?} at ({s},{c})"
                );
                let via_minimals = generator_matching_number(kind, &pr);
                let (direct, _) = matching_number(&f).unwrap();
                assert_eq!(via_minimals, direct, "{kind:?} at ({s},{c})");
            }
        }
    }

    #[test]
    fn certify_generator_agrees_with_explicit_check() {
        for (s, c) in [(2, 1), (3, 2), (4, 1), (5, 4)] {
            let pr = p(s, c);
            for kind in ExtremalKind::ALL {
                let report = certify_generator(kind, &pr);
                assert!(report.ok, "{kind:?} at ({s},{c})");
                assert_eq!(
                    Rat::new(report.min_member_weight_num, report.min_member_weight_den),
                    Rat::from_integer(1),
                    "head weights make the cheapest member weigh exactly 1"
                );
            }
        }
    }

    #[test]
    fn pprime_equals_p_when_l_is_1() {
        for s in 2..=6 {
            let pr = p(s, s - 1);
            assert_eq!(pr.l, 1);
            if pr.n <= 16 {
                assert_eq!(
                    materialize(ExtremalKind::P, &pr).unwrap(),
                    materialize(ExtremalKind::Pprime, &pr).unwrap()
                );
            }
        }
    }

    #[test]
    fn shift_closure_fixes_generators() {
        let pr = p(3, 1);
        let f = materialize(ExtremalKind::P, &pr).unwrap();
        assert_eq!(shift_closure(&f), f);
    }
}
