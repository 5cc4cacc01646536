//! Subcommand implementations.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use clap::Args;
use modinv::annihilators::{
    nilpotency_search, pstar_invariance_check, recheck_certificate, windowed_annihilator, NilpotencyOutcome,
};
use modinv::cohomology::Cohomology;
use modinv::homology::{annihilation_check_colon, annihilation_check_koszul, depth_estimate, AnnihilationReport, KoszulComplex};
use modinv::invariants::{check_invariant, dickson_family, dickson_top, validate_hsop, DicksonClass, InvariantRing};
use modinv::localcoh::{
    cm_short_circuit, ext_lower_degree, ext_slice, ext_slices, free_resolution, induced_on_ext, lift_action, local_nilpotency,
    present_over_hsop, LocalOutcome,
};
use modinv::steenrod::steenrod_p;
use modinv::Polynomial;
use serde_json::{json, Value};

use crate::ledger::{Ledger, LedgerEntry};
use crate::report::{envelope, matrix, poly, polys, sparse};
use crate::spec::{self, Problem};
use crate::{CliError, ModelArg, EXIT_AUDIT, EXIT_EXHAUSTED, EXIT_PASS};

pub struct Options {
    pub with_witnesses: bool,
    pub allow_slow: bool,
}

pub struct Outcome {
    pub report: Value,
    pub code: u8,
}

type CmdResult = Result<Outcome, CliError>;

fn pass(report: Value) -> CmdResult {
    Ok(Outcome { report, code: EXIT_PASS })
}

fn inputs(problem: &Problem, args: Value) -> Value {
    json!({ "spec": problem.spec, "args": args })
}

fn degree_of(f: &Polynomial) -> Result<usize, CliError> {
    Ok(f.homogeneous_degree()?.unwrap_or(0))
}

/// The element to test: the given text, or the Dickson top class.
fn element(problem: &Problem, text: Option<&str>) -> Result<Polynomial, CliError> {
    match text {
        Some(t) => problem.parse_poly("element", t),
        None => Ok(dickson_top(problem.group.context())?.poly),
    }
}

pub fn invariants(path: &Path, max_degree: Option<usize>) -> CmdResult {
    let problem = spec::load(path)?;
    let n_max = max_degree.or(problem.windows().max_degree).unwrap_or(6);
    let s = InvariantRing::new(problem.group.clone());
    let mut rows = Vec::new();
    for n in 0..=n_max {
        let slice = s.slice(n)?;
        rows.push(json!({ "n": n, "dim": slice.dim(), "basis": polys(slice.basis()) }));
    }
    let args = json!({ "max_degree": n_max });
    let result = json!({ "group_order": problem.group.order(), "slices": rows });
    pass(envelope("invariants", inputs(&problem, args), "pass", result))
}

pub fn dickson(path: &Path) -> CmdResult {
    let problem = spec::load(path)?;
    let ctx = problem.group.context();
    let top = dickson_top(ctx)?;
    let family = dickson_family(ctx)?;
    for f in &family.elements {
        check_invariant(&problem.group, f).map_err(|e| CliError::audit(format!("Dickson invariant {f}: {e}")))?;
    }
    let hsop_valid = validate_hsop(&problem.group, &family.elements)?;
    if !hsop_valid {
        return Err(CliError::audit("the Dickson family is not an hsop"));
    }
    let members: Vec<Value> =
        family.elements.iter().zip(&family.degrees).map(|(f, n)| json!({ "degree": n, "poly": poly(f) })).collect();
    let result = json!({
        "top": { "degree": top.degree, "poly": poly(&top.poly) },
        "family": members,
        "hsop_valid": hsop_valid,
    });
    pass(envelope("dickson", inputs(&problem, json!({})), "pass", result))
}

pub fn steenrod(path: &Path, text: &str, max_i: Option<usize>) -> CmdResult {
    let problem = spec::load(path)?;
    let f = problem.parse_poly("poly", text)?;
    let top = max_i.unwrap_or(degree_of(&f)?);
    let invariant = check_invariant(&problem.group, &f).is_ok();
    let mut rows = Vec::new();
    for i in 0..=top {
        let image = steenrod_p(i, &f);
        if invariant {
            check_invariant(&problem.group, &image).map_err(|e| CliError::audit(format!("P^{i} of an invariant: {e}")))?;
        }
        rows.push(json!({ "i": i, "image": poly(&image) }));
    }
    let args = json!({ "poly": poly(&f), "max_i": top });
    let result = json!({ "invariant": invariant, "operations": rows });
    pass(envelope("steenrod", inputs(&problem, args), "pass", result))
}

pub fn cohomology(path: &Path, i: usize, max_degree: Option<usize>, model: ModelArg, opts: &Options) -> CmdResult {
    let problem = spec::load(path)?;
    let n_max = max_degree.or(problem.windows().max_degree).unwrap_or(6);
    let coh = Cohomology::new(problem.group.clone());
    let field = problem.group.field();
    let mut rows = Vec::new();
    for m in 0..=n_max {
        let slice = coh.slice(model.model(), i, m)?;
        let mut row = json!({
            "m": m,
            "dim": slice.dim(),
            "cocycle_dim": slice.cocycle_dim,
            "coboundary_rank": slice.coboundary_rank,
        });
        if opts.with_witnesses {
            row["cocycle_reps"] = Value::Array(slice.reps().iter().map(|v| sparse(field, v)).collect());
            row["layout"] = json!({ "blocks": slice.blocks, "block": slice.block });
        }
        rows.push(row);
    }
    let args = json!({ "i": i, "max_degree": n_max, "model": model.name() });
    pass(envelope("cohomology", inputs(&problem, args), "pass", json!({ "slices": rows })))
}

#[derive(Args)]
pub struct MainArgs {
    #[command(flatten)]
    spec: crate::SpecArg,
    /// Cohomology index (at least 1).
    #[arg(long)]
    i: usize,
    /// Largest internal degree m.
    #[arg(long)]
    window: Option<usize>,
    #[arg(long)]
    max_power: Option<usize>,
    #[arg(long, value_enum, default_value = "bar")]
    model: ModelArg,
    /// Invariant to test instead of the Dickson top class.
    #[arg(long)]
    element: Option<String>,
    /// Also compute the annihilator of the window up to this degree and check it under P^*.
    #[arg(long)]
    annihilator_degree: Option<usize>,
    /// Largest P^j used by the P^* check.
    #[arg(long, default_value_t = 3)]
    pstar_max: usize,
}

pub fn verify_main(a: &MainArgs, opts: &Options) -> CmdResult {
    let problem = spec::load(&a.spec.spec)?;
    let w = problem.windows();
    let window = a.window.or(w.window).unwrap_or(8);
    let max_power = a.max_power.or(w.max_power).unwrap_or(4);
    let s = element(&problem, a.element.as_deref())?;
    let field = problem.group.field();
    let model = a.model.model();
    let coh = Cohomology::new(problem.group.clone());
    let args = json!({
        "i": a.i, "window": window, "max_power": max_power, "model": a.model.name(), "element": poly(&s),
        "annihilator_degree": a.annihilator_degree, "pstar_max": a.pstar_max,
    });
    let started = Instant::now();
    let outcome = nilpotency_search(&coh, model, a.i, &s, window, max_power)?;
    let (status, code, mut result) = match &outcome {
        NilpotencyOutcome::Certificate(cert) => {
            recheck_certificate(&coh, cert).map_err(|e| CliError::audit(e.to_string()))?;
            let mut slices = Vec::new();
            for w in &cert.slices {
                let mut row = json!({ "m": w.m, "dim": w.dim, "exponent": w.exponent });
                if opts.with_witnesses {
                    let slice = coh.slice(model, a.i, w.m)?;
                    row["cocycle_reps"] = Value::Array(slice.reps().iter().map(|v| sparse(field, v)).collect());
                    row["steps"] = Value::Array(w.steps.iter().map(|m| matrix(field, m)).collect());
                }
                slices.push(row);
            }
            let cert_json = json!({
                "i": cert.i, "window": cert.window, "s": poly(&cert.s), "s_degree": cert.s_degree, "a": cert.a,
                "minimality_degree": cert.minimality_degree, "slices": slices, "recheck": "pass",
            });
            ("certificate", EXIT_PASS, json!({ "certificate": cert_json }))
        }
        NilpotencyOutcome::Exhausted(ex) => {
            let survivors: Vec<Value> = ex.survivors.iter().map(|&(m, r)| json!({ "m": m, "rank": r })).collect();
            let ex_json = json!({
                "i": ex.i, "window": ex.window, "max_power": ex.max_power,
                "largest_surviving_degree": ex.largest_surviving_degree, "survivors": survivors,
            });
            ("exhausted", EXIT_EXHAUSTED, json!({ "exhaustion": ex_json }))
        }
    };
    if let Some(k) = a.annihilator_degree {
        let ring = InvariantRing::new(problem.group.clone());
        let ann = windowed_annihilator(&coh, &ring, model, a.i, window, k)?;
        let degrees: Vec<Value> =
            ann.degrees.iter().map(|(n, dim, basis)| json!({ "degree": n, "dim_s": dim, "basis": polys(basis) })).collect();
        let mut checks = Vec::new();
        for t in ann.elements() {
            let rep = pstar_invariance_check(&coh, model, a.i, t, a.pstar_max, window)?;
            if !rep.all_pass() {
                return Err(CliError::audit(format!("P^* image of annihilator element {t} leaves the annihilator")));
            }
            let entries: Vec<Value> = rep
                .entries
                .iter()
                .map(|e| json!({ "power": e.power, "image": poly(&e.image), "checked_up_to": e.checked_up_to, "pass": e.pass }))
                .collect();
            checks.push(json!({ "t": poly(t), "entries": entries, "top_power_is_frobenius": rep.top_power_is_frobenius }));
        }
        result["annihilator"] = json!({ "degree_window": k, "degrees": degrees, "pstar": checks });
    }
    eprintln!("verify-main: {:.2} s", started.elapsed().as_secs_f64());
    Ok(Outcome { report: envelope("verify-main", inputs(&problem, args), status, result), code })
}

#[derive(Args)]
pub struct LocArgs {
    #[command(flatten)]
    spec: crate::SpecArg,
    /// Local cohomology index, 0 <= j <= d - 1.
    #[arg(long)]
    j: usize,
    /// Hsop file (JSON array or one polynomial per line); defaults to the spec, then the Dickson family.
    #[arg(long)]
    hsop: Option<PathBuf>,
    /// Largest internal degree used to present and resolve S.
    #[arg(long)]
    window: Option<usize>,
    /// Smallest and largest degree of Ext checked; defaults to 12 degrees from the lowest possible one.
    #[arg(long, num_args = 2, allow_negative_numbers = true, value_names = ["LO", "HI"])]
    ext_window: Option<Vec<i64>>,
    #[arg(long)]
    max_power: Option<usize>,
    #[arg(long)]
    element: Option<String>,
    /// Record a_j here (created if missing).
    #[arg(long)]
    ledger: Option<PathBuf>,
}

/// Dense coefficient count through the window, times the group order.
fn work_estimate(problem: &Problem, window: usize) -> u128 {
    let d = problem.group.d();
    let order = problem.group.order() as u128;
    (0..=window).map(|n| problem.ring().basis(n).len() as u128).sum::<u128>() * order * d as u128
}

pub fn verify_loc(a: &LocArgs, opts: &Options) -> CmdResult {
    let problem = spec::load(&a.spec.spec)?;
    let d = problem.group.d();
    if a.j >= d {
        return Err(CliError::input(format!("j = {} is outside 0..={}", a.j, d - 1)));
    }
    let w = problem.windows();
    let window = a.window.or(w.resolution_window).unwrap_or(16);
    let max_power = a.max_power.or(w.max_power).unwrap_or(4);
    let s = element(&problem, a.element.as_deref())?;
    let s_text = s.to_string();
    check_invariant(&problem.group, &s)?;
    let mut args = json!({
        "j": a.j, "window": window, "max_power": max_power, "element": s_text,
        "hsop_file": a.hsop.as_ref().map(|p| p.display().to_string()),
    });

    let mut ledger = match &a.ledger {
        Some(path) => Some(Ledger::open_or_new(path, &problem.spec, &s_text)?),
        None => None,
    };

    if let Some(reason) = cm_short_circuit(&problem.group) {
        let result = json!({ "j": a.j, "short_circuit": reason, "statement": format!("CM short-circuit: H^{} = 0", a.j), "a": 1 });
        if let (Some(l), Some(path)) = (ledger.as_mut(), &a.ledger) {
            l.exponents.insert(a.j, LedgerEntry { a: 1, source: "cm-short-circuit".into(), ext_window: None, resolution_window: None });
            l.write(path)?;
        }
        return pass(envelope("verify-loc", inputs(&problem, args), "cm-short-circuit", result));
    }

    let estimate = work_estimate(&problem, window);
    eprintln!("estimate: about {estimate} coefficient operations per linear-algebra pass (window {window})");
    if !opts.allow_slow {
        return Err(CliError::input("this group needs the full local cohomology pipeline; rerun with --allow-slow"));
    }

    let theta = match problem.hsop(a.hsop.as_deref())? {
        Some(t) => t,
        None => dickson_family(problem.group.context())?.elements,
    };
    args["hsop"] = polys(&theta);
    let started = Instant::now();
    let ring = Arc::new(InvariantRing::new(problem.group.clone()));
    let pres = present_over_hsop(ring, &theta, window)?;
    let res = free_resolution(&pres, d)?;
    let ext_index = d - a.j;
    let (lo, hi) = match (&a.ext_window, w.ext_window) {
        (Some(v), _) => (v[0], v[1]),
        (None, Some(pair)) => pair,
        (None, None) => {
            let lo = ext_lower_degree(&res, ext_index);
            (lo, lo + 12)
        }
    };
    args["ext_window"] = json!([lo, hi]);
    let ext = ext_slices(&res, ext_index, lo..=hi)?;
    let dims: Vec<Value> = ext.dims().iter().map(|&(m, n)| json!({ "m": m, "dim": n })).collect();
    let levels: Vec<Value> = (0..=res.length()).map(|l| json!(res.twists(l))).collect();
    let mut result = json!({
        "presentation": { "generator_degrees": pres.generator_degrees(), "relation_degrees": pres.relation_degrees() },
        "resolution": { "length": res.length(), "twists": levels, "alternating_rank": res.alternating_rank() },
        "ext": { "index": ext_index, "dims": dims },
    });
    let outcome = local_nilpotency(&res, &s, a.j, lo..=hi, max_power)?;
    let (status, code) = match &outcome {
        LocalOutcome::Certificate(cert) => {
            let slices: Vec<Value> =
                cert.slices.iter().map(|w| json!({ "m": w.m, "dim": w.dim, "exponent": w.exponent })).collect();
            result["certificate"] = json!({
                "j": cert.j, "ext_index": cert.ext_index, "window": [cert.window.0, cert.window.1], "s": poly(&cert.s),
                "s_degree": cert.s_degree, "a": cert.a, "minimality_degree": cert.minimality_degree, "slices": slices,
            });
            if opts.with_witnesses {
                result["witnesses"] = local_witnesses(&res, &s, ext_index, lo, hi, degree_of(&s)?)?;
            }
            if let (Some(l), Some(path)) = (ledger.as_mut(), &a.ledger) {
                l.exponents.insert(
                    a.j,
                    LedgerEntry { a: cert.a, source: "certificate".into(), ext_window: Some((lo, hi)), resolution_window: Some(window) },
                );
                l.write(path)?;
            }
            ("certificate", EXIT_PASS)
        }
        LocalOutcome::Exhausted { j, max_power, survivors } => {
            let survivors: Vec<Value> = survivors.iter().map(|&(m, r)| json!({ "m": m, "rank": r })).collect();
            result["exhaustion"] = json!({ "j": j, "max_power": max_power, "survivors": survivors });
            ("exhausted", EXIT_EXHAUSTED)
        }
    };
    eprintln!("verify-loc: {:.2} s", started.elapsed().as_secs_f64());
    Ok(Outcome { report: envelope("verify-loc", inputs(&problem, args), status, result), code })
}

/// Ext representatives and the matrices of multiplication by `s` between slices.
fn local_witnesses(
    res: &modinv::localcoh::GradedResolution,
    s: &Polynomial,
    i: usize,
    lo: i64,
    hi: i64,
    k: usize,
) -> Result<Value, CliError> {
    let field = res.algebra.field();
    let lift = lift_action(res, s, i, None)?;
    let mut rows = Vec::new();
    for m in lo..=hi {
        let from = ext_slice(res, i, m)?;
        let mut row = json!({ "m": m, "reps": from.quotient.reps().iter().map(|v| sparse(field, v)).collect::<Vec<_>>() });
        if from.dim() > 0 {
            let to = ext_slice(res, i, m + k as i64)?;
            row["action"] = matrix(field, &induced_on_ext(res, &lift, i, &from, &to)?);
        }
        rows.push(row);
    }
    Ok(Value::Array(rows))
}

#[derive(Args)]
pub struct CorollaryArgs {
    #[command(flatten)]
    spec: crate::SpecArg,
    /// Hsop file; defaults to the hsop in the spec.
    #[arg(long)]
    hsop: Option<PathBuf>,
    /// Ledger written by verify-loc.
    #[arg(long)]
    ledger: Option<PathBuf>,
    /// Largest internal degree of the tables.
    #[arg(long)]
    window: Option<usize>,
    #[arg(long)]
    element: Option<String>,
}

fn table(rep: &AnnihilationReport) -> Value {
    let rows: Vec<Value> = rep
        .rows
        .iter()
        .map(|r| json!({ "degree": r.degree, "dim": r.dim, "factors_used": r.factors_used, "pass": r.pass }))
        .collect();
    json!({ "label": rep.label, "power": rep.power, "pass": rep.all_pass(), "vacuous": rep.vacuous(), "rows": rows })
}

pub fn verify_corollaries(a: &CorollaryArgs, _opts: &Options) -> CmdResult {
    let problem = spec::load(&a.spec.spec)?;
    let d = problem.group.d();
    let window = a.window.or(problem.windows().max_degree).unwrap_or(10);
    let theta = problem.hsop(a.hsop.as_deref())?.ok_or_else(|| CliError::input("an hsop is required (--hsop or \"hsop\" in the spec)"))?;
    if !validate_hsop(&problem.group, &theta)? {
        return Err(modinv::Error::HsopInvalid("sequence is not zero-dimensional".into()).into());
    }
    let path = a.ledger.as_ref().ok_or_else(|| CliError::input("a ledger file is required (--ledger)"))?;
    let s = element(&problem, a.element.as_deref())?;
    let ledger = Ledger::read(path)?;
    ledger.check(&problem.spec, &s.to_string())?;
    let exponents: BTreeMap<usize, usize> = ledger.exponents.iter().map(|(&j, e)| (j, e.a)).collect();
    let top = DicksonClass { degree: degree_of(&s)?, poly: s.clone() };
    let q = modinv::annihilators::exponent_ledger(&top, &exponents, d - 1)?;

    let ring = Arc::new(InvariantRing::new(problem.group.clone()));
    let k = KoszulComplex::new(ring.clone(), theta.clone())?;
    let mut colon = Vec::new();
    let mut koszul = Vec::new();
    for t in 1..=d {
        colon.push(annihilation_check_colon(&k, t, &s, q.power(d - 1), 0..=window)?);
    }
    for i in 1..=d {
        koszul.push(annihilation_check_koszul(&k, i, &s, q.power(d - i), 0..=window)?);
    }
    let depth = depth_estimate(ring, &theta, window)?;
    let all_pass = colon.iter().chain(&koszul).all(|r| r.all_pass());
    let ledger_rows: Vec<Value> = (0..d)
        .map(|i| json!({ "i": i, "a": q.exponents[i], "power": q.power(i), "degree": q.degree(i) }))
        .collect();
    let result = json!({
        "ledger": ledger_rows,
        "colon_quotients": colon.iter().map(table).collect::<Vec<_>>(),
        "koszul_homology": koszul.iter().map(table).collect::<Vec<_>>(),
        "depth": {
            "upper": depth.upper, "lower": depth.lower, "fixed_dim": depth.fixed_dim, "sylow_order": depth.sylow_order,
            "nonzero": depth.nonzero.iter().map(|&(i, n, dim)| json!({ "i": i, "n": n, "dim": dim })).collect::<Vec<_>>(),
        },
    });
    let args = json!({ "window": window, "hsop": polys(&theta), "element": poly(&s), "ledger": path.display().to_string() });
    let (status, code) = if all_pass { ("pass", EXIT_PASS) } else { ("fail", EXIT_AUDIT) };
    Ok(Outcome { report: envelope("verify-corollaries", inputs(&problem, args), status, result), code })
}
