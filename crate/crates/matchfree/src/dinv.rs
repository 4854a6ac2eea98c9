//! The half-integral 2-layer invariant `d(F)`, the menu of `y(2)`/`y(3)`
//! lower bounds driven by it, per-family bound audits, and the exhaustive
//! checks of the two technical claims used by the case analysis.

use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::family::{Family, SetMask};
use crate::formulas;
use crate::packing::{find_matching, matching_number};
use crate::params::Params;
use crate::shift::is_shifted;
use crate::{binom, Rat, RatDoc};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DError {
    #[error("condition indices exceed the ground set before any offset qualifies")]
    Unbounded,
    #[error("offset {d} has the wrong parity for this mode")]
    BadParity { d: u32 },
    #[error("offset {d} exceeds the admissible range {max}")]
    OutOfRange { d: u32, max: u32 },
}

/// Evaluates the defining condition at offset `d`:
///
/// * `d` even: some `i` in `[1, l + d/2]` has `{i, 2l+d+1-i}` missing;
/// * `d` odd: `{1, 2l+d}` missing, or some `i` in `[3, l + (d+1)/2]` has
///   `{i, 2l+d+2-i}` missing.
///
/// Pairs reaching beyond `[n]` are not consulted. Returns
/// `(any_pair_in_range, condition_fired)`.
fn condition_at(n: u32, l: u32, d: u32, contains: &dyn Fn(SetMask) -> bool) -> (bool, bool) {
    let pair = |a: u32, b: u32| SetMask::EMPTY.insert(a).insert(b);
    let mut any = false;
    if d % 2 == 0 {
        for i in 1..=l + d / 2 {
            let j = 2 * l + d + 1 - i;
            if j <= n {
                any = true;
                if !contains(pair(i, j)) {
                    return (true, true);
                }
            }
        }
    } else {
        if 2 * l + d <= n {
            any = true;
            if !contains(pair(1, 2 * l + d)) {
                return (true, true);
            }
        }
        for i in 3..=l + (d + 1) / 2 {
            let j = 2 * l + d + 2 - i;
            if j <= n && i < j {
                any = true;
                if !contains(pair(i, j)) {
                    return (true, true);
                }
            }
        }
    }
    (any, false)
}

/// `d_of` driven by a membership predicate: only 2-sets are consulted, so
/// this scales to families far beyond materialization.
pub fn d_of_by(n: u32, l: u32, contains: impl Fn(SetMask) -> bool) -> Result<u32, DError> {
    for d in 0.. {
        let (any, fired) = condition_at(n, l, d, &contains);
        if fired {
            return Ok(d);
        }
        if !any {
            return Err(DError::Unbounded);
        }
    }
    unreachable!()
}

/// The smallest `d >= 0` whose condition fires. Families without an
/// `s`-matching always satisfy `d(F) <= 2c`: the pairs `{i, 2s+1-i}`,
/// `i in [s]`, form an `s`-matching, so one of them is missing and the
/// even condition fires at `d = 2c`.
pub fn d_of(f: &Family, p: &Params) -> Result<u32, DError> {
    assert_eq!(f.n(), p.n, "family ground set disagrees with parameters");
    d_of_by(p.n, p.l, |m| f.contains(m))
}

/// The defining condition evaluated at exactly `d`.
///
/// For shifted families the condition propagates upward: it holds iff
/// `d >= d_of(f)` (each firing cell pushes to the next offset under
/// shifts), which is the form the `y(2)` bounds consume.
pub fn monotone_condition(f: &Family, p: &Params, d: u32) -> bool {
    assert_eq!(f.n(), p.n);
    condition_at(p.n, p.l, d, &|m| f.contains(m)).1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParityMode {
    Even,
    Odd,
    /// Parity-free form: with `ceil(d/2)` the second expression coincides
    /// with both parity forms, so this is their common min-of-two shape.
    /// (A max-of-two variant would be refuted at `(l, c, d) = (2, 1, 0)`
    /// by the family missing exactly the 2-sets inside `[l, n]`.)
    Universal,
}

fn half_product(a: i64, b: i64) -> Rat {
    Rat::new(a * b, 2)
}

/// Lower bound on `y(2)` for a shifted family in terms of `d`:
/// `min{ (4l+3c+d-2)(3c-d+1)/2, (l+3c-ceil(d/2)+1)(l+3c-ceil(d/2))/2 }`
/// with the ceiling replaced per parity mode.
pub fn y2_lower(l: u32, c: u32, d: u32, mode: ParityMode) -> Result<Rat, DError> {
    let (li, ci, di) = (l as i64, c as i64, d as i64);
    let first = half_product(4 * li + 3 * ci + di - 2, 3 * ci - di + 1);
    let half = match mode {
        ParityMode::Even => {
            if d % 2 != 0 {
                return Err(DError::BadParity { d });
            }
            di / 2
        }
        ParityMode::Odd => {
            if d % 2 != 1 {
                return Err(DError::BadParity { d });
            }
            if d > 2 * c {
                return Err(DError::OutOfRange { d, max: 2 * c });
            }
            (di + 1) / 2
        }
        ParityMode::Universal => (di + 1) / 2,
    };
    let second = half_product(li + 3 * ci - half + 1, li + 3 * ci - half);
    Ok(first.min(second))
}

/// The two slack budgets `((4l+d-3)d/2, (2l+6c-ceil(d/2)+1)ceil(d/2)/2)`:
/// for a shifted up-set without singletons and `d = d(F) <= 2c`, the gap
/// between `|comp P'|` (resp. `|comp P|`) and `y(0)+y(1)+y(2)` is at most
/// the first (resp. second) budget in at least one of the two cases.
pub fn y2_gap(l: u32, c: u32, d: u32) -> Result<(Rat, Rat), DError> {
    if d > 2 * c {
        return Err(DError::OutOfRange { d, max: 2 * c });
    }
    let (li, ci, di) = (l as i64, c as i64, d as i64);
    let ceil_half = (di + 1) / 2;
    Ok((
        half_product(4 * li + di - 3, di),
        half_product(2 * li + 6 * ci - ceil_half + 1, ceil_half),
    ))
}

/// One entry of the `y(3)` lower-bound menu.
#[derive(Debug, Clone, Serialize)]
pub struct Y3MenuEntry {
    pub name: &'static str,
    pub hypothesis: String,
    pub hypothesis_ok: bool,
    pub value: RatDoc,
}

fn rat_binom(n: i64, k: i64) -> Rat {
    if n < 0 || k < 0 || k > n {
        Rat::zero()
    } else {
        Rat::from_integer(binom(n as u64, k as u64) as i64)
    }
}

/// The cubic `(2d+1)(3c-d)(3c-d-1)/6`, equal to
/// `C(3c-d+1, 3) - (c-d) C(3c-d, 2)`: the missing 3-sets forced inside a
/// `(3c-d+1)`-element tail whose 3-layer packs fewer than `c-d+1` sets.
pub fn sparse_top_cubic(c: u32, d: u32) -> Rat {
    let (ci, di) = (c as i64, d as i64);
    Rat::new((2 * di + 1) * (3 * ci - di) * (3 * ci - di - 1), 6)
}

/// All `y(3)` lower bounds as formula values, each with its parameter
/// hypothesis recorded. `xsize` defaults to `2l + d - 2`, the guaranteed
/// deletable-vertex range for even `d`.
pub fn y3_lower_menu(l: u32, c: u32, d: u32, xsize: Option<u32>) -> Vec<Y3MenuEntry> {
    let (li, ci, di) = (l as i64, c as i64, d as i64);
    let s = l + c;
    let mut out = Vec::new();

    out.push(Y3MenuEntry {
        name: "y3_any_positive_d",
        hypothesis: "d >= 1".into(),
        hypothesis_ok: d >= 1,
        value: rat_binom(3 * ci - 1, 2).into(),
    });

    out.push(Y3MenuEntry {
        name: "y3_random_matching_odd",
        hypothesis: "d odd, d <= c+1, packed 3-layer on the tail".into(),
        hypothesis_ok: d % 2 == 1 && d <= c + 1,
        value: Rat::from_integer((2 * li + di - 1) * (2 * di - 3)).into(),
    });

    let x = xsize.unwrap_or((2 * l + d).saturating_sub(2));
    let even_x_value = if d >= 2 && x >= 1 {
        let xi = x as i64;
        let shrink = Rat::new((2 * li + di - 2) * (di - 2), (di - 2) * xi + 2 * li);
        rat_binom(2 * di - 2, 2) * Rat::from_integer(xi) * (Rat::from_integer(1) - shrink)
    } else {
        Rat::zero()
    };
    out.push(Y3MenuEntry {
        name: "y3_random_matching_even_x",
        hypothesis: format!(
            "d even, 2 <= d <= c+1, |X| = {x} <= 2l+d-1, per-x matchings exist, packed tail"
        ),
        hypothesis_ok: d % 2 == 0 && (2..=c + 1).contains(&d) && x as i64 <= 2 * li + di - 1,
        value: even_x_value.into(),
    });

    let even_value = if d >= 2 {
        let damp = Rat::from_integer(1) + Rat::new((di - 2) * (di - 2), 2 * li * (di - 1));
        Rat::from_integer((2 * li + di - 2) * (2 * di - 3)) / damp
    } else {
        Rat::zero()
    };
    out.push(Y3MenuEntry {
        name: "y3_random_matching_even",
        hypothesis: "d even, 2 <= d <= c+1, packed 3-layer on the tail".into(),
        hypothesis_ok: d % 2 == 0 && (2..=c + 1).contains(&d),
        value: even_value.into(),
    });

    out.push(Y3MenuEntry {
        name: "y3_large_d",
        hypothesis: "d >= c+2".into(),
        hypothesis_ok: d >= c + 2,
        value: Rat::from_integer((2 * li + ci) * (2 * ci - 1)).into(),
    });

    out.push(Y3MenuEntry {
        name: "y3_left_anchored_matching",
        hypothesis: "2 <= d <= c, left pairs present, packed tail beyond 2l+d".into(),
        hypothesis_ok: (2..=c).contains(&d),
        value: Rat::from_integer((2 * di - 1) * (s as i64 + 2 * ci - 2 * di) + 1).into(),
    });

    out.push(Y3MenuEntry {
        name: "y3_sparse_top_cubic",
        hypothesis: "1 <= d <= c, tail 3-layer packs fewer than c-d+1 sets".into(),
        hypothesis_ok: (1..=c).contains(&d),
        value: sparse_top_cubic(c, d).into(),
    });

    out
}

/// Outcome of one audited inequality on a concrete family.
#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub bound_name: String,
    pub hypothesis_ok: bool,
    pub bound_value: RatDoc,
    pub observed: i64,
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl BoundReport {
    fn new(name: &str, hypothesis_ok: bool, bound: Rat, observed: i64) -> BoundReport {
        let holds = !hypothesis_ok || Rat::from_integer(observed) >= bound;
        BoundReport {
            bound_name: name.to_string(),
            hypothesis_ok,
            bound_value: bound.into(),
            observed,
            holds,
            note: None,
        }
    }

    fn with_note(mut self, note: String) -> BoundReport {
        self.note = Some(note);
        self
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AuditError {
    #[error("family fails audit preconditions: {0:?}")]
    Preconditions(Vec<String>),
    #[error("d-invariant failed: {0}")]
    D(#[from] DError),
}

const CUBIC_NOTE: &str = "cubic uses denominator 6: C(3c-d+1,3) - (c-d)*C(3c-d,2) \
     = (2d+1)(3c-d)(3c-d-1)/6 exactly; a denominator-2 variant of the same bound \
     triples it and is inconsistent with the endpoint identity f(c) = y_Q(2)+y_Q(3), \
     which holds for the /6 form only";

/// Largest matching made of 3-sets of `f` lying inside `window`.
fn tail_3layer_nu_at_least(f: &Family, window: SetMask, target: i64) -> bool {
    if target <= 0 {
        return true;
    }
    let restricted = f.filter(|m| m.len() == 3 && m.is_subset_of(window));
    find_matching(&restricted, target as usize)
        .expect("3-sets are nonempty")
        .is_some()
}

/// Runs every applicable lower bound against the enumerated layer deficits
/// of a shifted, `∅`-free, singleton-free up-set with `nu(f) < s`.
/// Precondition violations are reported, not silently skipped.
pub fn audit_family(f: &Family, p: &Params) -> Result<Vec<BoundReport>, AuditError> {
    let mut violations = Vec::new();
    if f.n() != p.n {
        violations.push(format!("ground set {} does not match n = {}", f.n(), p.n));
        return Err(AuditError::Preconditions(violations));
    }
    if f.contains_empty_set() {
        violations.push("family contains the empty set".into());
    }
    if f.members().iter().any(|m| m.len() == 1) {
        violations.push("family contains a singleton".into());
    }
    if !f.is_upset() {
        violations.push("family is not an up-set".into());
    }
    if !is_shifted(f) {
        violations.push("family is not shifted".into());
    }
    if !violations.is_empty() {
        return Err(AuditError::Preconditions(violations));
    }
    let (nu, _) = matching_number(f).expect("empty set excluded above");
    if nu >= p.s as usize {
        return Err(AuditError::Preconditions(vec![format!(
            "matching number {nu} is not below s = {}",
            p.s
        )]));
    }

    let d = d_of(f, p)?;
    let profile = f.y_profile();
    let y2 = profile[2] as i64;
    let y3 = profile[3] as i64;
    let (l, c, n) = (p.l, p.c, p.n as i64);
    let mut reports = Vec::new();

    reports.push(BoundReport::new(
        "d_within_two_c",
        true,
        Rat::from_integer(d as i64),
        2 * c as i64,
    ));

    let parity = if d % 2 == 0 {
        ParityMode::Even
    } else {
        ParityMode::Odd
    };
    let y2_bound = y2_lower(l, c, d, parity).expect("parity matches d");
    reports.push(BoundReport::new("y2_parity_floor", true, y2_bound, y2));

    let cs = formulas::comp_sizes(p);
    let (gap_pprime, gap_p) = y2_gap(l, c, d).expect("d <= 2c was just checked");
    let slack_bound = (Rat::from_integer(cs.comp_pprime as i64 - 1 - n) - gap_pprime)
        .min(Rat::from_integer(cs.comp_p as i64 - 1 - n) - gap_p);
    reports.push(BoundReport::new(
        "y2_slack_disjunction",
        true,
        slack_bound,
        y2,
    ));

    // y(3) bounds; the family-level tail hypotheses are decided exactly
    // with the packing solver before anything is asserted.
    let menu = y3_lower_menu(l, c, d, None);
    let tail = SetMask::interval(2 * l + d, p.n);
    let tail_next = SetMask::interval(2 * l + d + 1, p.n);
    let packed_tail = tail_3layer_nu_at_least(f, tail, c as i64 - d as i64 + 1);

    for entry in &menu {
        let hyp_ok = match entry.name {
            "y3_any_positive_d" => entry.hypothesis_ok,
            "y3_random_matching_odd" | "y3_random_matching_even" => {
                entry.hypothesis_ok && packed_tail
            }
            "y3_random_matching_even_x" => {
                entry.hypothesis_ok && packed_tail && {
                    let k = (l + (d.saturating_sub(2)) / 2) as i64;
                    (2..=2 * l + d - 1).all(|x| {
                        let window = SetMask::interval(1, 2 * l + d - 1).remove(x);
                        let restricted = f.filter(|m| m.len() == 2 && m.is_subset_of(window));
                        find_matching(&restricted, k as usize)
                            .expect("2-sets are nonempty")
                            .is_some()
                    })
                }
            }
            "y3_large_d" => entry.hypothesis_ok,
            "y3_left_anchored_matching" => {
                entry.hypothesis_ok
                    && (1..=l)
                        .all(|i| f.contains(SetMask::EMPTY.insert(i).insert(2 * l + d + 1 - i)))
                    && tail_3layer_nu_at_least(f, tail_next, c as i64 - d as i64)
            }
            "y3_sparse_top_cubic" => entry.hypothesis_ok && !packed_tail,
            other => unreachable!("unknown menu entry {other}"),
        };
        let mut report = BoundReport::new(
            entry.name,
            hyp_ok,
            Rat::new(entry.value.num, entry.value.den),
            y3,
        );
        if entry.name == "y3_sparse_top_cubic" {
            report = report.with_note(CUBIC_NOTE.to_string());
        }
        reports.push(report);
    }

    // uniform-layer count cap: a k-uniform family on n >= k*sigma points
    // with no sigma-matching has at most (sigma-1) C(n-1, k-1) members
    for k in [2u32, 3u32] {
        let layer = f.layer(k as usize);
        let nu_k = matching_number(&layer).expect("layers are nonempty sets").0 as i64;
        let hyp = n >= k as i64 * (nu_k + 1);
        let bound =
            rat_binom(n, k as i64) - Rat::from_integer(nu_k) * rat_binom(n - 1, k as i64 - 1);
        let observed = profile[k as usize] as i64;
        reports.push(BoundReport::new(
            &format!("layer{k}_count_cap"),
            hyp,
            bound,
            observed,
        ));
    }

    Ok(reports)
}

/// Counterexample cell for the disjunction check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ClaimA2Cell {
    pub c: u32,
    pub d: u32,
    pub l: u32,
}

/// Exhaustively checks, over `c <= c_max`, odd `d <= 2c` and
/// `1 <= l <= 12c + 12` with `l + (d+1)/2 >= 4`, that at least one of
///
/// * `(4l+3c+d-2)(3c-d+1) < (4l+3c+d-7)(3c-d+2)`
/// * `(l+3c-(d-1)/2)(l+3c-(d+1)/2) < (4l+3c+d-7)(3c-d+2)`
///
/// holds (common factor 1/2 dropped).
pub fn check_claim_a2(c_max: u32) -> Result<(), ClaimA2Cell> {
    for c in 1..=c_max {
        let ci = c as i128;
        for d in (1..=2 * c).step_by(2) {
            let di = d as i128;
            for l in 1..=12 * c + 12 {
                let li = l as i128;
                if l + (d + 1) / 2 < 4 {
                    continue;
                }
                let rhs = (4 * li + 3 * ci + di - 7) * (3 * ci - di + 2);
                let first = (4 * li + 3 * ci + di - 2) * (3 * ci - di + 1) < rhs;
                let second = (li + 3 * ci - (di - 1) / 2) * (li + 3 * ci - (di + 1) / 2) < rhs;
                if !(first || second) {
                    return Err(ClaimA2Cell { c, d, l });
                }
            }
        }
    }
    Ok(())
}

/// Endpoint and concavity report for the two case-analysis envelopes
/// `f(d) = cubic(d) + (4l+3c+d-2)(3c-d+1)/2` and
/// `g(d) = cubic(d) + (l+3c-d/2+1/2)(l+3c-d/2-1/2)/2` on `d in [0, c]`.
#[derive(Debug, Clone, Serialize)]
pub struct FgReport {
    pub l: u32,
    pub c: u32,
    /// With the /6 cubic, `f(c)` equals `y_Q(2) + y_Q(3)` exactly.
    pub f_sixth_at_c_equals_yq: bool,
    /// With the /2 cubic, `f(0)` exceeds `y_{P'}(2) + y_{P'}(3)` by exactly
    /// `3c(3c-1)/2`; the /6 cubic shifts by `c(3c-1)/2` instead.
    pub f_half_gap_at_zero: bool,
    pub f_concave: bool,
    pub g_concave: bool,
    pub ok: bool,
    pub note: &'static str,
}

pub fn fg_endpoints(l: u32, c: u32) -> FgReport {
    let (li, ci) = (l as i64, c as i64);
    let cubic6 = |d: i64| Rat::new((2 * d + 1) * (3 * ci - d) * (3 * ci - d - 1), 6);
    let cubic2 = |d: i64| Rat::new((2 * d + 1) * (3 * ci - d) * (3 * ci - d - 1), 2);
    let first = |d: i64| Rat::new((4 * li + 3 * ci + d - 2) * (3 * ci - d + 1), 2);
    let second = |d: i64| {
        (Rat::from_integer(li + 3 * ci) - Rat::new(d, 2) + Rat::new(1, 2))
            * (Rat::from_integer(li + 3 * ci) - Rat::new(d, 2) - Rat::new(1, 2))
            / Rat::from_integer(2)
    };
    let f6 = |d: i64| cubic6(d) + first(d);
    let f2 = |d: i64| cubic2(d) + first(d);
    let g6 = |d: i64| cubic6(d) + second(d);
    let g2 = |d: i64| cubic2(d) + second(d);

    let (_, y_pprime, y_q) = formulas::y23_totals_lc(l, c);
    let f_sixth_at_c_equals_yq = f6(ci) == Rat::from_integer(y_q as i64);
    let f_half_gap_at_zero =
        f2(0) - Rat::from_integer(y_pprime as i64) == Rat::new(3 * ci * (3 * ci - 1), 2);

    let concave = |h: &dyn Fn(i64) -> Rat| {
        (1..ci).all(|d| h(d + 1) - h(d) * Rat::from_integer(2) + h(d - 1) <= Rat::zero())
    };
    let f_concave = concave(&f6) && concave(&f2);
    let g_concave = concave(&g6) && concave(&g2);

    FgReport {
        l,
        c,
        f_sixth_at_c_equals_yq,
        f_half_gap_at_zero,
        f_concave,
        g_concave,
        ok: f_sixth_at_c_equals_yq && f_half_gap_at_zero && f_concave && g_concave,
        note: CUBIC_NOTE,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{materialize, ExtremalKind};

    fn p(s: u32, c: u32) -> Params {
        Params::new(s, c).unwrap()
    }

    fn gen(kind: ExtremalKind, s: u32, c: u32) -> Family {
        materialize(kind, &p(s, c)).unwrap()
    }

    #[test]
    fn d_anchors_at_3_1() {
        let pr = p(3, 1);
        assert_eq!(d_of(&gen(ExtremalKind::P, 3, 1), &pr), Ok(0));
        assert_eq!(d_of(&gen(ExtremalKind::Pprime, 3, 1), &pr), Ok(0));
        assert_eq!(d_of(&gen(ExtremalKind::Q, 3, 1), &pr), Ok(1));
        assert_eq!(d_of(&gen(ExtremalKind::W, 3, 1), &pr), Ok(2));
    }

    #[test]
    fn d_unbounded_on_full_power_set() {
        let pr = p(3, 1);
        let full = Family::from_predicate(7, |_| true);
        assert_eq!(d_of(&full, &pr), Err(DError::Unbounded));
    }

    #[test]
    fn monotone_condition_propagates_upward() {
        let pr = p(3, 1);
        let q = gen(ExtremalKind::Q, 3, 1);
        assert!(!monotone_condition(&q, &pr, 0));
        assert!(monotone_condition(&q, &pr, 1));
        assert!(monotone_condition(&q, &pr, 2));
        let f = gen(ExtremalKind::P, 3, 1);
        assert!(monotone_condition(&f, &pr, 0));
    }

    #[test]
    fn y2_lower_anchor_values() {
        assert_eq!(
            y2_lower(2, 1, 0, ParityMode::Even).unwrap(),
            Rat::from_integer(15)
        );
        assert_eq!(
            y2_lower(2, 1, 1, ParityMode::Odd).unwrap(),
            Rat::from_integer(10)
        );
        assert_eq!(
            y2_lower(2, 1, 1, ParityMode::Universal).unwrap(),
            y2_lower(2, 1, 1, ParityMode::Odd).unwrap()
        );
        assert!(y2_lower(2, 1, 1, ParityMode::Even).is_err());
        assert!(y2_lower(2, 1, 3, ParityMode::Odd).is_err());
    }

    #[test]
    fn y2_lower_even_d0_hits_both_generators() {
        // at d = 0 the two arguments are exactly the P' and P two-layer deficits
        for pr in Params::grid(16) {
            let (li, ci) = (pr.l as i64, pr.c as i64);
            let first = Rat::new((4 * li + 3 * ci - 2) * (3 * ci + 1), 2);
            let second = Rat::new((li + 3 * ci + 1) * (li + 3 * ci), 2);
            let y_pprime = gen(ExtremalKind::Pprime, pr.s, pr.c).y_profile()[2] as i64;
            let y_p = gen(ExtremalKind::P, pr.s, pr.c).y_profile()[2] as i64;
            if pr.n <= 16 {
                assert_eq!(first, Rat::from_integer(y_pprime));
                assert_eq!(second, Rat::from_integer(y_p));
            }
            assert_eq!(
                y2_lower(pr.l, pr.c, 0, ParityMode::Even).unwrap(),
                first.min(second)
            );
        }
    }

    #[test]
    fn y2_gap_anchor_values() {
        assert_eq!(y2_gap(2, 1, 0).unwrap(), (Rat::zero(), Rat::zero()));
        assert_eq!(
            y2_gap(2, 1, 2).unwrap(),
            (Rat::from_integer(7), Rat::from_integer(5))
        );
        assert_eq!(
            y2_gap(2, 1, 1).unwrap(),
            (Rat::from_integer(3), Rat::from_integer(5))
        );
        assert!(y2_gap(2, 1, 3).is_err());
    }

    #[test]
    fn y3_menu_anchor_values() {
        let entry = |l, c, d, name: &str| {
            y3_lower_menu(l, c, d, None)
                .into_iter()
                .find(|e| e.name == name)
                .unwrap()
        };
        assert_eq!(
            entry(2, 1, 1, "y3_any_positive_d").value,
            RatDoc { num: 1, den: 1 }
        );
        assert_eq!(
            entry(2, 3, 1, "y3_any_positive_d").value,
            RatDoc { num: 28, den: 1 }
        );
        assert_eq!(
            entry(2, 3, 3, "y3_random_matching_odd").value,
            RatDoc { num: 18, den: 1 }
        );
        // cubic at d = c equals (2c+1)(2c)(2c-1)/6
        for c in 1..=8 {
            assert_eq!(
                sparse_top_cubic(c, c),
                Rat::new((2 * c as i64 + 1) * (2 * c as i64) * (2 * c as i64 - 1), 6)
            );
        }
    }

    #[test]
    fn audit_anchors_at_3_1() {
        let pr = p(3, 1);
        let reports = audit_family(&gen(ExtremalKind::Q, 3, 1), &pr).unwrap();
        assert!(reports.iter().all(|r| r.holds), "{reports:#?}");
        let y2 = reports
            .iter()
            .find(|r| r.bound_name == "y2_parity_floor")
            .unwrap();
        assert_eq!(y2.observed, 15);
        let l17 = reports
            .iter()
            .find(|r| r.bound_name == "y3_any_positive_d")
            .unwrap();
        assert!(l17.hypothesis_ok);
        assert_eq!(l17.observed, 1);
        assert_eq!(l17.bound_value, RatDoc { num: 1, den: 1 });

        let reports = audit_family(&gen(ExtremalKind::P, 3, 1), &pr).unwrap();
        assert!(reports.iter().all(|r| r.holds));
        let y2 = reports
            .iter()
            .find(|r| r.bound_name == "y2_parity_floor")
            .unwrap();
        assert_eq!(y2.bound_value, RatDoc { num: 15, den: 1 });
        assert_eq!(y2.observed, 15); // equality case at d = 0
    }

    #[test]
    fn audit_rejects_bad_preconditions() {
        let pr = p(3, 1);
        let with_singleton = Family::new(7, vec![SetMask::from_elements(&[1])])
            .unwrap()
            .upset_closure();
        match audit_family(&with_singleton, &pr) {
            Err(AuditError::Preconditions(v)) => {
                assert!(v.iter().any(|m| m.contains("singleton")))
            }
            other => panic!("expected precondition failure, got {other:?}"),
        }
        let full = Family::from_predicate(7, |m| m.len() >= 2);
        match audit_family(&full, &pr) {
            Err(AuditError::Preconditions(v)) => {
                assert!(v.iter().any(|m| m.contains("matching number")))
            }
            other => panic!("expected matching-number failure, got {other:?}"),
        }
    }

    #[test]
    fn claim_a2_exhaustive_and_single_cell() {
        assert!(check_claim_a2(10).is_ok());
        // single cell (c=3, d=5, l=2): evaluate both branches directly
        let (c, d, l) = (3i128, 5i128, 2i128);
        let rhs = (4 * l + 3 * c + d - 7) * (3 * c - d + 2);
        let first = (4 * l + 3 * c + d - 2) * (3 * c - d + 1) < rhs;
        let second = (l + 3 * c - (d - 1) / 2) * (l + 3 * c - (d + 1) / 2) < rhs;
        assert!(first || second);
    }

    #[test]
    fn fg_endpoints_anchor() {
        let r = fg_endpoints(2, 1);
        assert!(r.ok, "{r:?}");
        // f6(1) = 1 + 15 = 16 = y_Q total at (3,1)
        assert!(r.note.contains("denominator 6"));
        assert!(r.note.contains("denominator-2"));
        for c in 1..=10 {
            for l in 1..=20 {
                assert!(fg_endpoints(l, c).ok, "l={l} c={c}");
            }
        }
    }
}
