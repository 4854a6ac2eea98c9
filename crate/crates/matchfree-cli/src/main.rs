//! `matchfree` — constructions, certificates, invariants and exact search
//! for set families with bounded matching number.
//!
//! JSON goes to stdout, diagnostics to stderr. Exit codes: 0 success,
//! 1 verification failure or `--expect` mismatch, 2 bad input.

use std::fs;
use std::io::Read;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use matchfree::constructions::{
    certificate_for, certify_generator, family_a, family_kleitman, family_p_general, materialize,
    verify_cover, ExtremalKind,
};
use matchfree::dinv::{audit_family, check_claim_a2, d_of, fg_endpoints, BoundReport};
use matchfree::family::{Family, FamilyDoc, MatchingWitness};
use matchfree::formulas::{
    comp_sizes, kleitman_value, nkm_minima, regime_classify, threshold_pprime_vs_p, w_leq3,
    y23_totals,
};
use matchfree::mc::{mc_even, mc_odd, McEstimate};
use matchfree::oracle::{e_exact, verify_main_theorem, verify_truncated, OracleMode};
use matchfree::packing::{find_matching, matching_number_with_policy, EmptySetPolicy};
use matchfree::sample::{random_bounded_matching_family, rng_from};
use matchfree::shift::{is_shifted, shift_closure, shift_once};
use matchfree::{Params, RatDoc};

const DEFAULT_SEED: u64 = 0x5EED;

#[derive(Parser)]
#[command(name = "matchfree", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit a named family as a Family JSON document
    Construct(ConstructArgs),
    /// Exact matching number of a family document
    Nu(NuArgs),
    /// Apply a single (i <- j) shift, or the full shift closure
    Shift(ShiftArgs),
    /// The 2-layer invariant d of a family document
    D(DArgs),
    /// Build and check the fractional-cover certificate of a family kind
    Certify(CertifyArgs),
    /// All closed-form values for one (s, c) cell
    Formulas(CellArgs),
    /// Closed-form grid over s in [2, s_max]: complement sizes and winners
    RegimeMap(RegimeMapArgs),
    /// Exact optimum e(n, s) with a minimum blocker witness
    Oracle(OracleArgs),
    /// Run every applicable bound on the generators of a cell, plus the
    /// Monte Carlo estimates of the randomized matching procedures
    AuditBounds(AuditArgs),
    /// Batch verification suites (exit 1 on the first failure)
    Verify(VerifyArgs),
}

#[derive(Args)]
struct ConstructArgs {
    /// p | pprime | q | w | pgen | a | kleitman
    #[arg(long)]
    family: String,
    #[arg(long)]
    s: Option<u32>,
    #[arg(long)]
    c: Option<u32>,
    #[arg(long)]
    m: Option<u32>,
    #[arg(long)]
    l: Option<u32>,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    k: Option<u32>,
    #[arg(long)]
    i: Option<u32>,
}

#[derive(Args)]
struct NuArgs {
    /// Family JSON file (defaults to stdin)
    #[arg(long)]
    input: Option<String>,
    /// Decide nu >= s instead of computing nu exactly
    #[arg(long)]
    s: Option<u32>,
    /// Count an empty-set member as matchable instead of rejecting it
    #[arg(long)]
    allow_empty: bool,
}

#[derive(Args)]
struct ShiftArgs {
    #[arg(long)]
    input: Option<String>,
    /// Source index of a single (i <- j) shift; omit both for the closure
    #[arg(long)]
    i: Option<u32>,
    #[arg(long)]
    j: Option<u32>,
}

#[derive(Args)]
struct DArgs {
    #[arg(long)]
    input: Option<String>,
    #[arg(long)]
    s: u32,
    #[arg(long)]
    c: u32,
}

#[derive(Args)]
struct CertifyArgs {
    /// p | pprime | q | w
    #[arg(long)]
    family: String,
    #[arg(long)]
    s: u32,
    #[arg(long)]
    c: u32,
    /// Verify the vector against this family document instead of the
    /// generator's own members
    #[arg(long)]
    input: Option<String>,
}

#[derive(Args)]
struct CellArgs {
    #[arg(long)]
    s: u32,
    #[arg(long)]
    c: u32,
}

#[derive(Clone, Copy, ValueEnum)]
enum MapFormat {
    Csv,
    Json,
}

#[derive(Args)]
struct RegimeMapArgs {
    #[arg(long)]
    s_max: u32,
    #[arg(long, value_enum, default_value = "csv")]
    format: MapFormat,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    s: u32,
    /// full | shifted | truncated
    #[arg(long, default_value = "shifted")]
    mode: String,
    #[arg(long)]
    max_layer: Option<u32>,
    /// Exit 1 unless the optimum equals this value
    #[arg(long)]
    expect: Option<u64>,
}

#[derive(Args)]
struct AuditArgs {
    #[arg(long)]
    s: u32,
    #[arg(long)]
    c: u32,
    #[arg(long, default_value_t = 1_000_000)]
    trials: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Args)]
struct VerifyArgs {
    /// theorem | bounds | claims
    #[arg(long)]
    suite: String,
    #[arg(long, default_value_t = 4)]
    s_max: u32,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value_t = 200_000)]
    trials: u64,
}

fn main() -> ExitCode {
    configure_threads();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

/// MATCHFREE_THREADS caps the worker count for grid fan-out.
fn configure_threads() {
    if let Ok(raw) = std::env::var("MATCHFREE_THREADS") {
        if let Ok(threads) = raw.parse::<usize>() {
            if threads >= 1 {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build_global();
            }
        } else {
            eprintln!("warning: ignoring unparseable MATCHFREE_THREADS={raw}");
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Construct(args) => construct(args),
        Command::Nu(args) => nu(args),
        Command::Shift(args) => shift(args),
        Command::D(args) => d_invariant(args),
        Command::Certify(args) => certify(args),
        Command::Formulas(args) => formulas(args),
        Command::RegimeMap(args) => regime_map(args),
        Command::Oracle(args) => oracle(args),
        Command::AuditBounds(args) => audit_bounds(args),
        Command::Verify(args) => verify(args),
    }
}

fn read_family(input: &Option<String>) -> Result<Family> {
    let text = match input.as_deref() {
        None | Some("-") => {
            let mut buf = String::new();
            std::io::stdin()
                .read_to_string(&mut buf)
                .context("reading stdin")?;
            buf
        }
        Some(path) => fs::read_to_string(path).with_context(|| format!("reading {path}"))?,
    };
    let doc: FamilyDoc = serde_json::from_str(&text).context("parsing family document")?;
    Ok(Family::try_from(doc)?)
}

fn emit<T: Serialize>(value: &T) -> Result<ExitCode> {
    println!("{}", serde_json::to_string(value)?);
    Ok(ExitCode::SUCCESS)
}

fn params(s: u32, c: u32) -> Result<Params> {
    Params::new(s, c).map_err(|e| anyhow!(e))
}

fn construct(args: ConstructArgs) -> Result<ExitCode> {
    let need = |x: Option<u32>, name: &str| {
        x.ok_or_else(|| anyhow!("--{name} is required for this family"))
    };
    let family = match args.family.to_ascii_lowercase().as_str() {
        "p" | "pprime" | "q" | "w" => {
            let kind: ExtremalKind = args.family.parse().map_err(|e: String| anyhow!(e))?;
            let p = params(need(args.s, "s")?, need(args.c, "c")?)?;
            materialize(kind, &p)?
        }
        "pgen" | "p-general" => {
            family_p_general(need(args.s, "s")?, need(args.m, "m")?, need(args.l, "l")?)?
        }
        "a" => family_a(
            need(args.n, "n")?,
            need(args.k, "k")?,
            need(args.i, "i")?,
            need(args.s, "s")?,
        )?,
        "kleitman" => family_kleitman(need(args.n, "n")?, need(args.s, "s")?)?,
        other => bail!("unknown family: {other}"),
    };
    emit(&FamilyDoc::from(&family))
}

fn nu(args: NuArgs) -> Result<ExitCode> {
    let family = read_family(&args.input)?;
    let policy = if args.allow_empty {
        EmptySetPolicy::CountsAsMember
    } else {
        EmptySetPolicy::Reject
    };
    match args.s {
        None => {
            let (size, witness) = matching_number_with_policy(&family, policy)?;
            let sets: Vec<Vec<u32>> = witness.sets.iter().map(|m| m.elements()).collect();
            emit(&json!({"size": size, "witness": sets}))
        }
        Some(0) => bail!("--s must be at least 1"),
        Some(s) => {
            let witness = if family.contains_empty_set() {
                // the decision form goes through the full computation when
                // the empty set participates, keeping the policy in one place
                let (size, witness) = matching_number_with_policy(&family, policy)?;
                (size >= s as usize).then(|| MatchingWitness {
                    sets: witness.sets[..s as usize].to_vec(),
                })
            } else {
                find_matching(&family, s as usize)?
            };
            let found = witness.is_some();
            let sets: Vec<Vec<u32>> = witness
                .map(|w| w.sets.iter().map(|m| m.elements()).collect())
                .unwrap_or_default();
            emit(&json!({"s": s, "found": found, "witness": sets}))
        }
    }
}

fn shift(args: ShiftArgs) -> Result<ExitCode> {
    let family = read_family(&args.input)?;
    let out = match (args.i, args.j) {
        (Some(i), Some(j)) => shift_once(&family, i, j)?,
        (None, None) => shift_closure(&family),
        _ => bail!("--i and --j must be given together"),
    };
    emit(&FamilyDoc::from(&out))
}

fn d_invariant(args: DArgs) -> Result<ExitCode> {
    let p = params(args.s, args.c)?;
    let family = read_family(&args.input)?;
    if family.n() != p.n {
        bail!(
            "family ground set {} does not match n = 2s + c = {}",
            family.n(),
            p.n
        );
    }
    let d = d_of(&family, &p)?;
    emit(&json!({
        "s": p.s, "c": p.c, "d": d,
        "shifted": is_shifted(&family),
        "within_two_c": d <= 2 * p.c,
    }))
}

fn certify(args: CertifyArgs) -> Result<ExitCode> {
    let kind: ExtremalKind = args.family.parse().map_err(|e: String| anyhow!(e))?;
    let p = params(args.s, args.c)?;
    let cover = certificate_for(kind, &p);
    let weights: Vec<RatDoc> = cover.weights.iter().map(|&w| RatDoc::from(w)).collect();
    let (ok, report) = match &args.input {
        Some(_) => {
            let family = read_family(&args.input)?;
            let ok = verify_cover(&family, &cover, p.s)?;
            (
                ok,
                json!({"kind": kind, "s": p.s, "c": p.c, "weights": weights, "ok": ok}),
            )
        }
        None => {
            let r = certify_generator(kind, &p);
            let ok = r.ok;
            (
                ok,
                json!({
                    "kind": kind, "s": p.s, "c": p.c, "weights": weights,
                    "sum": RatDoc { num: r.sum_num, den: r.sum_den },
                    "min_member_weight": RatDoc {
                        num: r.min_member_weight_num,
                        den: r.min_member_weight_den,
                    },
                    "ok": ok,
                }),
            )
        }
    };
    println!("{}", serde_json::to_string(&report)?);
    Ok(if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn formulas(args: CellArgs) -> Result<ExitCode> {
    let p = params(args.s, args.c)?;
    let cs = comp_sizes(&p);
    let (y_p, y_pprime, y_q) = y23_totals(&p);
    let nkm = nkm_minima(&p);
    let verdict = regime_classify(&p);
    let threshold = threshold_pprime_vs_p(&p).ok();
    let kleitman = [p.n, p.n + 1]
        .into_iter()
        .filter_map(|n| kleitman_value(n, p.s).ok().map(|v| (n, v)))
        .collect::<Vec<_>>();
    emit(&json!({
        "params": {"s": p.s, "c": p.c, "l": p.l, "n": p.n},
        "complement_sizes": cs,
        "y23_totals": {"P": y_p, "Pprime": y_pprime, "Q": y_q},
        "w_leq3": w_leq3(&p),
        "minima": nkm,
        "winners": verdict.winners_tag(),
        "pprime_not_above_p": threshold,
        "kleitman_nearby": kleitman,
    }))
}

fn regime_map(args: RegimeMapArgs) -> Result<ExitCode> {
    if args.s_max < 2 {
        bail!("--s-max must be at least 2");
    }
    // fan out by column; collection preserves (s, c) order
    use rayon::prelude::*;
    let rows: Vec<_> = (2..=args.s_max)
        .into_par_iter()
        .flat_map_iter(matchfree::formulas::regime_rows_for_s)
        .collect();
    match args.format {
        MapFormat::Json => {
            println!("{}", serde_json::to_string(&rows)?);
        }
        MapFormat::Csv => {
            println!("s,c,l,n,compP,compPprime,compQ,compW,winners");
            for r in rows {
                println!(
                    "{},{},{},{},{},{},{},{},{}",
                    r.s, r.c, r.l, r.n, r.comp_p, r.comp_pprime, r.comp_q, r.comp_w, r.winners
                );
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn oracle(args: OracleArgs) -> Result<ExitCode> {
    let mode: OracleMode = args.mode.parse().map_err(|e: String| anyhow!(e))?;
    let result = e_exact(args.n, args.s, mode, args.max_layer)?;
    emit(&json!({
        "n": args.n, "s": args.s, "mode": mode,
        "value": result.value,
        "blocker": FamilyDoc::from(&result.blocker),
        "iterations": result.iterations,
    }))?;
    match args.expect {
        Some(want) if want != result.value => {
            eprintln!("expected optimum {want}, found {}", result.value);
            Ok(ExitCode::from(1))
        }
        _ => Ok(ExitCode::SUCCESS),
    }
}

#[derive(Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum AuditItem {
    Bound {
        family: &'static str,
        #[serde(flatten)]
        report: BoundReport,
    },
    Mc {
        procedure: &'static str,
        d: u32,
        #[serde(flatten)]
        estimate: McEstimate,
    },
}

fn audit_bounds(args: AuditArgs) -> Result<ExitCode> {
    let p = params(args.s, args.c)?;
    if p.n > 16 {
        bail!("audit materializes the four generators; supported for n <= 16");
    }
    let mut items = Vec::new();
    let mut violations = 0usize;
    for kind in ExtremalKind::ALL {
        let family = materialize(kind, &p)?;
        for report in audit_family(&family, &p)? {
            if !report.holds {
                violations += 1;
            }
            items.push(AuditItem::Bound {
                family: kind.name(),
                report,
            });
        }
    }
    for d in (1..=p.c + 1).filter(|d| d % 2 == 1) {
        let estimate = mc_odd(p.l, p.c, d, args.trials, args.seed)?;
        if estimate.z_score.abs() > 4.0 {
            violations += 1;
        }
        items.push(AuditItem::Mc {
            procedure: "odd",
            d,
            estimate,
        });
    }
    for d in (2..=p.c + 1).filter(|d| d % 2 == 0) {
        let xsize = 2 * p.l + d - 2;
        let estimate = mc_even(p.l, p.c, d, xsize, args.trials, args.seed)?;
        if estimate.z_score.abs() > 4.0 {
            violations += 1;
        }
        items.push(AuditItem::Mc {
            procedure: "even",
            d,
            estimate,
        });
    }
    println!("{}", serde_json::to_string(&items)?);
    if violations > 0 {
        eprintln!("{violations} violated checks");
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}

fn verify(args: VerifyArgs) -> Result<ExitCode> {
    let outcome = match args.suite.as_str() {
        "theorem" => verify_theorem_suite(args.s_max),
        "bounds" => verify_bounds_suite(args.seed, args.trials),
        "claims" => verify_claims_suite(),
        other => bail!("unknown suite: {other}"),
    }?;
    let pass = outcome.failures.is_empty();
    println!("{}", serde_json::to_string(&outcome)?);
    Ok(if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

#[derive(Serialize)]
struct SuiteOutcome {
    suite: &'static str,
    checks: usize,
    failures: Vec<String>,
}

fn verify_theorem_suite(s_max: u32) -> Result<SuiteOutcome> {
    let mut checks = 0;
    let mut failures = Vec::new();
    for s in 2..=s_max {
        for c in 1..s {
            let Ok(p) = Params::new(s, c) else { continue };
            if p.n <= 9 {
                eprintln!("verify_main_theorem({s}, {c}) ...");
                checks += 1;
                if !verify_main_theorem(s, c)? {
                    failures.push(format!("main theorem at ({s}, {c})"));
                    return Ok(SuiteOutcome {
                        suite: "theorem",
                        checks,
                        failures,
                    });
                }
            }
            if p.n <= 10 {
                eprintln!("verify_truncated({s}, {c}) ...");
                checks += 1;
                if !verify_truncated(s, c)? {
                    failures.push(format!("truncated theorem at ({s}, {c})"));
                    return Ok(SuiteOutcome {
                        suite: "theorem",
                        checks,
                        failures,
                    });
                }
            }
        }
    }
    Ok(SuiteOutcome {
        suite: "theorem",
        checks,
        failures,
    })
}

fn verify_bounds_suite(seed: u64, _trials: u64) -> Result<SuiteOutcome> {
    let mut checks = 0;
    let mut failures = Vec::new();
    let cells = [
        Params::new(2, 1),
        Params::new(3, 1),
        Params::new(3, 2),
        Params::new(4, 1),
    ]
    .map(|p| p.expect("cells are valid"));
    for p in &cells {
        for kind in ExtremalKind::ALL {
            let family = materialize(kind, p)?;
            for report in audit_family(&family, p)? {
                checks += 1;
                if !report.holds {
                    failures.push(format!(
                        "{} on {} at ({}, {})",
                        report.bound_name,
                        kind.name(),
                        p.s,
                        p.c
                    ));
                    return Ok(SuiteOutcome {
                        suite: "bounds",
                        checks,
                        failures,
                    });
                }
            }
        }
    }
    let mut rng = rng_from(seed);
    for i in 0..200 {
        let p = cells[i % cells.len()];
        let family = random_bounded_matching_family(&p, &mut rng);
        for report in audit_family(&family, &p)? {
            checks += 1;
            if !report.holds {
                failures.push(format!(
                    "{} on random family #{i} at ({}, {})",
                    report.bound_name, p.s, p.c
                ));
                return Ok(SuiteOutcome {
                    suite: "bounds",
                    checks,
                    failures,
                });
            }
        }
    }
    Ok(SuiteOutcome {
        suite: "bounds",
        checks,
        failures,
    })
}

fn verify_claims_suite() -> Result<SuiteOutcome> {
    let mut checks = 0;
    let mut failures = Vec::new();

    checks += 1;
    if let Err(cell) = check_claim_a2(10) {
        failures.push(format!("disjunction claim at {cell:?}"));
        return Ok(SuiteOutcome {
            suite: "claims",
            checks,
            failures,
        });
    }

    checks += 1;
    if let Some((s, c)) = matchfree::formulas::pprime_wins_despite_small_c(60) {
        failures.push(format!(
            "P' attains the minimum at ({s}, {c}) despite c <= 9"
        ));
        return Ok(SuiteOutcome {
            suite: "claims",
            checks,
            failures,
        });
    }

    for c in 1..=10u32 {
        for l in 1..=20u32 {
            checks += 1;
            let r = fg_endpoints(l, c);
            if !r.ok {
                failures.push(format!("fg endpoints at (l={l}, c={c})"));
                return Ok(SuiteOutcome {
                    suite: "claims",
                    checks,
                    failures,
                });
            }
        }
    }

    for s in 2..=60u32 {
        for c in 1..s {
            let Ok(p) = Params::new(s, c) else { continue };
            if p.l >= 2 {
                checks += 1;
                if threshold_pprime_vs_p(&p).expect("l >= 2") != (s >= 7 * c + 2) {
                    failures.push(format!("threshold at ({s}, {c})"));
                    return Ok(SuiteOutcome {
                        suite: "claims",
                        checks,
                        failures,
                    });
                }
            }
            // no-singleton reduction monotonicity: the (s-1, l-2) instance,
            // when valid, has a strictly larger three-way minimum
            if s <= 40 && p.l >= 3 && s >= 3 {
                if let Ok(prev) = Params::new(s - 1, c + 1) {
                    checks += 1;
                    if nkm_minima(&prev).m_min <= nkm_minima(&p).m_min {
                        failures.push(format!("reduction monotonicity at ({s}, {c})"));
                        return Ok(SuiteOutcome {
                            suite: "claims",
                            checks,
                            failures,
                        });
                    }
                }
            }
        }
    }
    Ok(SuiteOutcome {
        suite: "claims",
        checks,
        failures,
    })
}
