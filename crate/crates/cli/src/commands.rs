//! The five subcommands. Each returns an `Outcome` whose result goes into
//! the JSON envelope; partial results are kept when a later step fails.

use std::fmt::Write as _;

use gi_core::closed_forms::{gi_soliton, plane_wave, SolutionProfile};
use gi_core::matrix::Matrix2;
use gi_core::omega::OmegaEvaluator;
use gi_core::params::{self, derive_invariants_with_tol, soliton_parameters, CaseLabel, ParameterTriple};
use gi_core::region::{
    build_region_map, contour_csv, default_half_width, extract_contour, lemma_obstruction_test, region_svg, ContourTag,
    DEFAULT_RESOLUTION,
};
use gi_core::sampling::d1_disk_points;
use gi_core::scattering::{compute_s_boundary, compute_s_column, ScatteringConfig};
use gi_core::suites::{global_relation_suite, identities_suite, lax_suite, pde_suite, SuiteReport};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::output::{write_file, Failure, Outcome, EXIT_OK};
use crate::{Common, Format, GridArgs, Solution, Suite, TripleArgs};

/// Coarse resolution of the obstruction test; it is repeated at twice this.
const OBSTRUCTION_RESOLUTION: usize = 256;
const IDENTITY_SAMPLES: usize = 1000;
const LAX_SAMPLES: usize = 20;
const GLOBAL_SAMPLES: usize = 50;
const GLOBAL_RADIUS: f64 = 3.0;

fn require_format(common: &Common, command: &str, allowed: &[Format]) -> Result<(), Failure> {
    if allowed.contains(&common.format) {
        Ok(())
    } else {
        Err(Failure::input(format!("{command} does not support --format {}", format_name(common.format))))
    }
}

fn format_name(f: Format) -> &'static str {
    match f {
        Format::Json => "json",
        Format::Csv => "csv",
        Format::Svg => "svg",
    }
}

fn check_positive(name: &str, v: f64) -> Result<(), Failure> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Failure::input(format!("{name} must be positive, got {v}")))
    }
}

fn explicit_triple(args: &TripleArgs) -> Result<ParameterTriple, Failure> {
    let missing = |flag: &str| Failure::input(format!("a triple needs {flag}"));
    let alpha = args.alpha.ok_or_else(|| missing("--alpha"))?;
    let omega = args.omega.ok_or_else(|| missing("--omega"))?;
    let c = args.c.ok_or_else(|| missing("--c"))?;
    Ok(ParameterTriple::new(alpha, omega, c)?)
}

/// The triple under study and, when a closed-form solution is named, its
/// profile. Without `--alpha` and `--c` the soliton is assumed.
fn resolve(solution: Option<Solution>, args: &TripleArgs, tol: f64) -> Result<(ParameterTriple, Option<SolutionProfile>), Failure> {
    let explicit = args.alpha.is_some() || args.c.is_some();
    match solution {
        Some(Solution::Soliton) if explicit => {
            Err(Failure::input("the soliton is fixed by --omega alone; drop --alpha and --c"))
        }
        Some(Solution::Soliton) => soliton(args.omega),
        None if !explicit => soliton(args.omega),
        None => Ok((explicit_triple(args)?, None)),
        Some(Solution::PlaneWave) => {
            let alpha = args.alpha.ok_or_else(|| Failure::input("--solution plane-wave needs --alpha"))?;
            let c = args.c.ok_or_else(|| Failure::input("--solution plane-wave needs --c 0,αb"))?;
            if c.re.abs() > tol * alpha.abs().powi(3).max(1.0) {
                return Err(Failure::input(format!("a plane wave has purely imaginary c, got {c}")));
            }
            let b = c.im / alpha;
            let triple = ParameterTriple::plane_wave(alpha, b)?;
            if let Some(w) = args.omega {
                if (w - triple.omega).abs() > tol * triple.scale() {
                    return Err(Failure::input(format!("--omega {w} differs from the plane-wave frequency {}", triple.omega)));
                }
            }
            Ok((triple, Some(plane_wave(alpha, b)?)))
        }
    }
}

fn soliton(omega: Option<f64>) -> Result<(ParameterTriple, Option<SolutionProfile>), Failure> {
    let omega = omega.unwrap_or(1.0);
    Ok((soliton_parameters(omega)?, Some(gi_soliton(omega)?)))
}

fn evaluator(triple: ParameterTriple, tol: f64) -> Result<OmegaEvaluator, Failure> {
    Ok(OmegaEvaluator::with_layout(triple, tol, Default::default())?)
}

fn half_width(ev: &OmegaEvaluator, grid: &GridArgs) -> Result<f64, Failure> {
    match grid.bounds {
        Some(r) => check_positive("--bounds", r).map(|()| r),
        None => Ok(default_half_width(ev)),
    }
}

pub fn classify(args: &TripleArgs, geometry: bool, grid: &GridArgs, common: &Common) -> Result<Outcome, Failure> {
    require_format(common, "classify", &[Format::Json])?;
    check_positive("--tol", common.tol)?;
    classify_triple(explicit_triple(args)?, geometry, grid, common)
}

fn classify_triple(triple: ParameterTriple, geometry: bool, grid: &GridArgs, common: &Common) -> Result<Outcome, Failure> {
    let invariants = derive_invariants_with_tol(&triple, common.tol);
    let mut result = json!({ "triple": triple, "invariants": invariants });
    let verdict = match params::classify(&triple, common.tol) {
        Ok(v) => v,
        Err(e) => return Ok(Outcome::with_failure(result, e.into())),
    };
    result["case_label"] = json!(verdict.case_label);
    result["admissible_candidate"] = json!(verdict.admissible_candidate);
    result["family_ids"] = json!(verdict.family_ids);
    result["witness"] = json!(verdict.witness);
    result["obstruction"] = Value::Null;
    if !geometry {
        return Ok(Outcome::ok(result));
    }
    if verdict.case_label == CaseLabel::OutsideScope {
        let mut o = Outcome::ok(result);
        o.notes.push("no spectral geometry outside the soliton and plane-wave constraints".into());
        return Ok(o);
    }
    let ev = OmegaEvaluator::for_case(triple, verdict.case_label, common.tol, Default::default())?;
    let hw = half_width(&ev, grid)?;
    let resolution = grid.resolution.unwrap_or(OBSTRUCTION_RESOLUTION);
    match lemma_obstruction_test(&ev, hw, resolution) {
        Ok(r) => {
            let contradiction = r.obstructed == verdict.admissible_candidate;
            result["obstruction"] = json!(r);
            if contradiction {
                let msg = format!(
                    "geometric obstruction = {} contradicts the algebraic verdict {}",
                    r.obstructed, verdict.case_label
                );
                return Ok(Outcome::with_failure(result, Failure::verification(msg)));
            }
            Ok(Outcome::ok(result))
        }
        Err(e) => Ok(Outcome::with_failure(result, e.into())),
    }
}

pub fn contour(args: &TripleArgs, grid: &GridArgs, common: &Common) -> Result<Outcome, Failure> {
    check_positive("--tol", common.tol)?;
    contour_triple(explicit_triple(args)?, grid, common, true)
}

fn contour_triple(triple: ParameterTriple, grid: &GridArgs, common: &Common, with_polylines: bool) -> Result<Outcome, Failure> {
    let ev = evaluator(triple, common.tol)?;
    let hw = half_width(&ev, grid)?;
    let resolution = grid.resolution.unwrap_or(DEFAULT_RESOLUTION);
    let set = extract_contour(&ev, hw, resolution)?;
    let map = build_region_map(&ev, hw, resolution)?;
    let csv = contour_csv(&set);
    let title = format!("{triple} {}", ev.case_label);
    let svg = region_svg(&map, Some(&set), &ev.cuts, &title);
    let mut files = Vec::new();
    if let Some(dir) = &common.out {
        files.push(write_file(dir, "contour.csv", &csv)?);
        files.push(write_file(dir, "region.svg", &svg)?);
    }
    let count = |tag: ContourTag| set.classification.iter().filter(|&&t| t == tag).count();
    let mut result = json!({
        "triple": triple,
        "case_label": ev.case_label,
        "half_width": hw,
        "resolution": resolution,
        "rays": count(ContourTag::Ray),
        "loops": count(ContourTag::Loop),
        "arcs": count(ContourTag::Arc),
        "exit_angles": set.exit_angles(),
        "branch_points": ev.cuts.branch_points,
        "files": files,
    });
    if with_polylines {
        result["polylines"] = json!(set.polylines);
        result["tags"] = json!(set.classification);
    }
    let mut o = Outcome::ok(result);
    o.raw = match common.format {
        Format::Json => None,
        Format::Csv => Some(csv),
        Format::Svg => Some(svg),
    };
    Ok(o)
}

pub fn verify(
    suite: Suite,
    solution: Option<Solution>,
    perturb: Option<f64>,
    args: &TripleArgs,
    common: &Common,
) -> Result<Outcome, Failure> {
    require_format(common, "verify", &[Format::Json])?;
    check_positive("--tol", common.tol)?;
    let (triple, mut profile) = resolve(solution, args, common.tol)?;
    if let Some(f) = perturb {
        if !f.is_finite() {
            return Err(Failure::input(format!("--perturb must be finite, got {f}")));
        }
        let q = profile.ok_or_else(|| Failure::input("--perturb needs a solution profile"))?;
        profile = Some(q.scaled(Complex64::new(f, 0.0)));
    }
    run_suites(suite, triple, profile.as_ref(), common)
}

fn run_suites(suite: Suite, triple: ParameterTriple, profile: Option<&SolutionProfile>, common: &Common) -> Result<Outcome, Failure> {
    let selected = match suite {
        Suite::All => vec![Suite::Identities, Suite::Pde, Suite::Lax, Suite::GlobalRelation],
        s => vec![s],
    };
    let mut reports: Vec<SuiteReport> = Vec::new();
    let mut notes = Vec::new();
    for s in selected {
        let needs = |what: &str| -> Result<&SolutionProfile, Failure> {
            profile.ok_or_else(|| Failure::input(format!("the {what} suite needs --solution")))
        };
        let report = match s {
            Suite::Identities => identities_suite(&evaluator(triple, common.tol)?, IDENTITY_SAMPLES, common.seed),
            Suite::Pde | Suite::Lax | Suite::GlobalRelation if profile.is_none() && suite == Suite::All => {
                notes.push(format!("{} suite skipped: no --solution", suite_name(s)));
                continue;
            }
            Suite::Pde => pde_suite(needs("pde")?)?,
            Suite::Lax => lax_suite(needs("lax")?, LAX_SAMPLES, common.seed),
            Suite::GlobalRelation => {
                let q = needs("global-relation")?;
                if !q.is_schwartz() {
                    if suite == Suite::All {
                        notes.push("global-relation suite skipped: the profile does not decay".into());
                        continue;
                    }
                    return Err(Failure::input("the global-relation suite needs a decaying profile"));
                }
                global_relation_suite(&evaluator(triple, common.tol)?, q, GLOBAL_SAMPLES, GLOBAL_RADIUS, common.seed)?
            }
            Suite::All => unreachable!("expanded above"),
        };
        reports.push(report);
    }
    let passed = reports.iter().all(|r| r.passed);
    let failure = reports.iter().find_map(|r| {
        r.first_failure().map(|c| {
            Failure::verification(format!(
                "suite {}: check \"{}\" = {:e} is outside [{:e}, {:e})",
                r.suite, c.name, c.value, c.bounds.0, c.bounds.1
            ))
        })
    });
    let result = json!({ "triple": triple, "passed": passed, "suites": reports });
    let mut o = match failure {
        Some(f) => Outcome::with_failure(result, f),
        None => Outcome::ok(result),
    };
    o.notes = notes;
    Ok(o)
}

fn suite_name(s: Suite) -> &'static str {
    match s {
        Suite::Identities => "identities",
        Suite::Pde => "pde",
        Suite::Lax => "lax",
        Suite::GlobalRelation => "global-relation",
        Suite::All => "all",
    }
}

#[derive(Serialize)]
struct ScatterPoint {
    k: Complex64,
    in_d1_closure: bool,
    /// Columns of `s(k)` integrated in their validity regions; `null`
    /// outside them.
    s_column0: Option<[Complex64; 2]>,
    s_column1: Option<[Complex64; 2]>,
    #[serde(rename = "S")]
    big_s: Option<Matrix2>,
    residual_global: Option<f64>,
}

fn column(q: &SolutionProfile, k: Complex64, j: usize, cfg: &ScatteringConfig) -> Result<Option<[Complex64; 2]>, Failure> {
    match compute_s_column(q, k, j, cfg) {
        Ok(c) => Ok(Some(c)),
        Err(gi_core::error::Error::Validity(_)) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

pub fn scatter(
    solution: Option<Solution>,
    args: &TripleArgs,
    points: &[Complex64],
    samples: usize,
    radius: f64,
    common: &Common,
) -> Result<Outcome, Failure> {
    require_format(common, "scatter", &[Format::Json, Format::Csv])?;
    check_positive("--tol", common.tol)?;
    check_positive("--radius", radius)?;
    let (triple, profile) = resolve(solution, args, common.tol)?;
    let q = profile.ok_or_else(|| Failure::input("scatter needs --solution (or no triple flags for the soliton)"))?;
    if !q.is_schwartz() {
        return Err(Failure::input("scatter needs a decaying profile"));
    }
    let ev = evaluator(triple, common.tol)?;
    let map = build_region_map(&ev, default_half_width(&ev).max(1.5 * radius), DEFAULT_RESOLUTION)?;
    let ks = if points.is_empty() { d1_disk_points(&map, radius, samples, common.seed)? } else { points.to_vec() };
    let cfg = ScatteringConfig::default();
    let mut rows = Vec::with_capacity(ks.len());
    for k in ks {
        let big_s = compute_s_boundary(&ev, &q, k).ok();
        let s_column0 = column(&q, k, 0, &cfg)?;
        let s_column1 = column(&q, k, 1, &cfg)?;
        let in_d1_closure = map.in_unbounded_d1_closure(k);
        let residual_global = match (in_d1_closure, &big_s, s_column1) {
            (true, Some(s), Some([b, a])) => Some((s.m[1][1] * b - a * s.m[0][1]).norm()),
            _ => None,
        };
        rows.push(ScatterPoint { k, in_d1_closure, s_column0, s_column1, big_s, residual_global });
    }
    let mut csv = String::from("k_re,k_im,a_re,a_im,b_re,b_im,A_re,A_im,B_re,B_im,residual_global\n");
    for r in &rows {
        let pair = |z: Option<Complex64>| z.map(|z| format!("{:.12e},{:.12e}", z.re, z.im)).unwrap_or_else(|| ",".into());
        let (a, b) = (r.s_column1.map(|c| c[1]), r.s_column1.map(|c| c[0]));
        let (big_a, big_b) = (r.big_s.map(|s| s.m[1][1]), r.big_s.map(|s| s.m[0][1]));
        let res = r.residual_global.map(|v| format!("{v:.6e}")).unwrap_or_default();
        let _ = writeln!(csv, "{:.12e},{:.12e},{},{},{},{},{res}", r.k.re, r.k.im, pair(a), pair(b), pair(big_a), pair(big_b));
    }
    let mut files = Vec::new();
    if let Some(dir) = &common.out {
        files.push(write_file(dir, "scatter.csv", &csv)?);
    }
    let mut o = Outcome::ok(json!({ "triple": triple, "points": rows, "files": files }));
    if common.format == Format::Csv {
        o.raw = Some(csv);
    }
    Ok(o)
}

pub fn report(solution: Option<Solution>, args: &TripleArgs, grid: &GridArgs, common: &Common) -> Result<Outcome, Failure> {
    require_format(common, "report", &[Format::Json])?;
    check_positive("--tol", common.tol)?;
    let (triple, profile) = resolve(solution, args, common.tol)?;
    let coarse = GridArgs { bounds: grid.bounds, resolution: grid.resolution.map(|r| r / 2) };
    let sections = [
        ("classification", classify_triple(triple, true, &coarse, common)),
        ("contour", contour_triple(triple, grid, common, false)),
        ("verification", run_suites(Suite::All, triple, profile.as_ref(), common)),
    ];
    let mut result = json!({ "triple": triple });
    let mut code = EXIT_OK;
    let mut errors = Vec::new();
    let mut notes = Vec::new();
    for (name, section) in sections {
        let o = section.unwrap_or_else(|f| Outcome::with_failure(Value::Null, f));
        if code == EXIT_OK {
            code = o.code;
        }
        if let Some(e) = o.error {
            errors.push(format!("{name}: {e}"));
        }
        notes.extend(o.notes.into_iter().map(|n| format!("{name}: {n}")));
        result[name] = o.result;
    }
    if let Some(dir) = &common.out {
        let text = serde_json::to_string_pretty(&result).expect("JSON values serialize");
        result["files"] = json!([write_file(dir, "report.json", &text)?]);
    }
    Ok(Outcome { result, code, error: (!errors.is_empty()).then(|| errors.join("; ")), notes, raw: None })
}
