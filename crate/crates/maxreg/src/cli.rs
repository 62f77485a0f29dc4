//! Batch front-end: JSON run configuration, CSV/JSON artifacts, and the
//! check dispatcher with its exit-status contract.
//!
//! Everything scientific lives in the config file; command-line flags only
//! pick paths, thread counts and verbosity. Field CSVs are row-major with
//! `.` decimals, LF line endings and empty cells outside the domain, and
//! round-trip exactly through the shortest-representation float format.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

pub use crate::generate::generate_field;
use crate::generate::Generator;
use crate::lattice::{build_domain, Domain, DomainSpec, Grid, Mask, ScalarField};
use crate::maxops::{local_maximal_field, EngineKind};
use crate::sobolev::exponent_table;
use crate::verify::{
    argmax_stability_experiment, calculus_identity_checks, check_gradient_bound_alpha0,
    check_gradient_bound_fractional, check_gradient_bound_spherical, check_norm_bounds,
    check_zero_boundary, continuity_experiment, derivative_formula_check, emit_report, Scenario,
    VerificationReport,
};
use crate::{Error, Result};

pub const KNOWN_CHECKS: &[&str] = &[
    "gradient_bound_critical",
    "gradient_bound_fractional",
    "gradient_bound_spherical",
    "norm_bounds",
    "zero_boundary",
    "continuity",
    "argmax_stability",
    "derivative_formula",
    "calculus_identities",
];

/// Parsed and validated run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub domain: Domain,
    pub domain_spec: DomainSpec,
    pub h: f64,
    pub generators: Vec<Generator>,
    pub m: usize,
    pub alpha: f64,
    pub p: Vec<f64>,
    pub checks: Vec<String>,
    pub perturbations: Vec<Generator>,
    pub levels: usize,
    pub stability_levels: usize,
    pub lambda_factor: f64,
    pub output_dir: Option<PathBuf>,
    pub seed: u64,
    pub threads: Threads,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Threads {
    Auto,
    Count(usize),
}

fn want<'v>(v: &'v Value, key: &str, pointer: &str) -> Result<&'v Value> {
    v.get(key)
        .ok_or_else(|| Error::config(format!("{pointer}/{key}"), "missing required key"))
}

fn as_f64(v: &Value, pointer: &str) -> Result<f64> {
    v.as_f64()
        .ok_or_else(|| Error::config(pointer, "expected a number"))
}

fn as_usize(v: &Value, pointer: &str) -> Result<usize> {
    v.as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| Error::config(pointer, "expected a nonnegative integer"))
}

/// Parses a config document, reporting problems with JSON-pointer paths.
pub fn parse_config(doc: &Value) -> Result<RunConfig> {
    let obj = doc
        .as_object()
        .ok_or_else(|| Error::config("", "config must be a JSON object"))?;
    const KNOWN_KEYS: &[&str] = &[
        "domain",
        "h",
        "fields",
        "m",
        "alpha",
        "p",
        "checks",
        "perturbations",
        "levels",
        "stability_levels",
        "lambda_factor",
        "output_dir",
        "seed",
        "threads",
    ];
    for key in obj.keys() {
        if !KNOWN_KEYS.contains(&key.as_str()) {
            return Err(Error::config(format!("/{key}"), "unknown key"));
        }
    }

    let domain_spec: DomainSpec = serde_json::from_value(want(doc, "domain", "")?.clone())
        .map_err(|e| Error::config("/domain", format!("malformed domain spec: {e}")))?;
    let domain =
        build_domain(&domain_spec).map_err(|e| Error::config("/domain/params", e.to_string()))?;
    let h = as_f64(want(doc, "h", "")?, "/h")?;
    if !(h > 0.0) {
        return Err(Error::config("/h", "spacing must be positive"));
    }

    let fields_raw = want(doc, "fields", "")?
        .as_array()
        .ok_or_else(|| Error::config("/fields", "expected an array of generator specs"))?;
    let mut generators = Vec::with_capacity(fields_raw.len());
    for (i, g) in fields_raw.iter().enumerate() {
        let gen: Generator = serde_json::from_value(g.clone())
            .map_err(|e| Error::config(format!("/fields/{i}"), format!("bad generator: {e}")))?;
        gen.validate(domain.dim())
            .map_err(|e| Error::config(format!("/fields/{i}"), e.to_string()))?;
        generators.push(gen);
    }

    let m = as_usize(want(doc, "m", "")?, "/m")?;
    if m == 0 || m != generators.len() {
        return Err(Error::config(
            "/m",
            format!(
                "m={m} must equal the number of field generators ({})",
                generators.len()
            ),
        ));
    }
    let alpha = as_f64(want(doc, "alpha", "")?, "/alpha")?;
    let p_raw = want(doc, "p", "")?
        .as_array()
        .ok_or_else(|| Error::config("/p", "expected an array of exponents"))?;
    if p_raw.len() != m {
        return Err(Error::config("/p", format!("need {m} exponents")));
    }
    let mut p = Vec::with_capacity(m);
    for (i, v) in p_raw.iter().enumerate() {
        let pi = as_f64(v, &format!("/p/{i}"))?;
        if !(pi > 1.0 && pi.is_finite()) {
            return Err(Error::HypothesesUnmet(format!(
                "/p/{i}: p={pi} violates the hypothesis 1 < p_j < inf"
            )));
        }
        p.push(pi);
    }
    if !(alpha >= 0.0 && alpha < (m * domain.dim()) as f64) {
        return Err(Error::HypothesesUnmet(format!(
            "/alpha: alpha={alpha} violates 0 <= alpha < m*n = {}",
            m * domain.dim()
        )));
    }

    let mut checks = Vec::new();
    if let Some(list) = doc.get("checks") {
        let arr = list
            .as_array()
            .ok_or_else(|| Error::config("/checks", "expected an array of check ids"))?;
        for (i, c) in arr.iter().enumerate() {
            let id = c
                .as_str()
                .ok_or_else(|| Error::config(format!("/checks/{i}"), "expected a string"))?;
            if !KNOWN_CHECKS.contains(&id) {
                return Err(Error::config(
                    format!("/checks/{i}"),
                    format!("unknown check id `{id}`; known: {KNOWN_CHECKS:?}"),
                ));
            }
            checks.push(id.to_string());
        }
    }

    let mut perturbations = Vec::new();
    if let Some(list) = doc.get("perturbations") {
        let arr = list
            .as_array()
            .ok_or_else(|| Error::config("/perturbations", "expected an array"))?;
        for (i, g) in arr.iter().enumerate() {
            let gen: Generator = serde_json::from_value(g.clone()).map_err(|e| {
                Error::config(format!("/perturbations/{i}"), format!("bad generator: {e}"))
            })?;
            gen.validate(domain.dim())
                .map_err(|e| Error::config(format!("/perturbations/{i}"), e.to_string()))?;
            perturbations.push(gen);
        }
        if perturbations.len() != m {
            return Err(Error::config(
                "/perturbations",
                format!("need {m} perturbation generators"),
            ));
        }
    } else {
        // Default: slot-proportional perturbations, large enough that the
        // early levels sit in the nonlinear regime of the operator. With
        // two or more slots the product structure makes the response decay
        // superlinearly; with one slot the factor is negative so the
        // rectified trajectory |1 - 128 t| folds back onto the base field
        // at the final halving level.
        let factor = if m >= 2 { 16.0 } else { -128.0 };
        for g in &generators {
            perturbations.push(Generator::Scaled {
                factor,
                part: Box::new(g.clone()),
            });
        }
    }

    let levels = match doc.get("levels") {
        Some(v) => as_usize(v, "/levels")?,
        None => 6,
    };
    let stability_levels = match doc.get("stability_levels") {
        Some(v) => as_usize(v, "/stability_levels")?,
        None => 5,
    };
    let lambda_factor = match doc.get("lambda_factor") {
        Some(v) => as_f64(v, "/lambda_factor")?,
        None => 4.0,
    };
    let output_dir = doc
        .get("output_dir")
        .map(|v| {
            v.as_str()
                .map(PathBuf::from)
                .ok_or_else(|| Error::config("/output_dir", "expected a string path"))
        })
        .transpose()?;
    let seed = match doc.get("seed") {
        Some(v) => as_usize(v, "/seed")? as u64,
        None => 0,
    };
    let threads = match doc.get("threads") {
        None => Threads::Auto,
        Some(Value::String(s)) if s == "auto" => Threads::Auto,
        Some(v) => Threads::Count(as_usize(v, "/threads")?.max(1)),
    };

    // Exponent inputs must validate before any compute.
    exponent_table(m, domain.dim(), &p, alpha)
        .map_err(|e| Error::HypothesesUnmet(e.to_string()))?;

    Ok(RunConfig {
        domain,
        domain_spec,
        h,
        generators,
        m,
        alpha,
        p,
        checks,
        perturbations,
        levels,
        stability_levels,
        lambda_factor,
        output_dir,
        seed,
        threads,
    })
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)?;
    let doc: Value = serde_json::from_str(&text)?;
    parse_config(&doc)
}

/// Writes a scalar field as row-major CSV: columns along the last axis,
/// one line per leading multi-index, empty cells outside the domain.
pub fn write_field_csv(field: &ScalarField, path: &Path) -> Result<()> {
    let grid = &field.mask.grid;
    let n = grid.dim();
    let cols = grid.shape[n - 1];
    let rows = grid.len() / cols;
    let mut out = String::new();
    for row in 0..rows {
        let base = row * cols;
        for col in 0..cols {
            if col > 0 {
                out.push(',');
            }
            let flat = base + col;
            if field.mask.inside[flat] {
                out.push_str(&format!("{}", field.raw()[flat]));
            }
        }
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Writes a radial profile as two-column CSV `r,u` (the zero-radius entry
/// first), for plotting.
pub fn write_profile_csv(profile: &crate::averaging::RadialProfile, path: &Path) -> Result<()> {
    let mut out = String::new();
    out.push_str(&format!("0,{}\n", profile.value_at_zero));
    for (r, u) in profile.radii.iter().zip(&profile.values) {
        out.push_str(&format!("{r},{u}\n"));
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Reads a field CSV back onto its mask; blank cells must match the mask.
pub fn read_field_csv(mask: std::sync::Arc<Mask>, path: &Path) -> Result<ScalarField> {
    let text = std::fs::read_to_string(path)?;
    let grid = &mask.grid;
    let n = grid.dim();
    let cols = grid.shape[n - 1];
    let mut values = vec![0.0f64; grid.len()];
    let mut count_rows = 0usize;
    for (row, line) in text.lines().enumerate() {
        count_rows += 1;
        for (col, cell) in line.split(',').enumerate() {
            let flat = row * cols + col;
            if cell.is_empty() {
                if mask.inside[flat] {
                    return Err(Error::InvalidParameter(format!(
                        "blank cell at inside node {flat}"
                    )));
                }
                continue;
            }
            if !mask.inside[flat] {
                return Err(Error::InvalidParameter(format!(
                    "value at outside node {flat}"
                )));
            }
            values[flat] = cell.parse::<f64>().map_err(|e| {
                Error::InvalidParameter(format!("bad float `{cell}` at node {flat}: {e}"))
            })?;
        }
    }
    if count_rows != grid.len() / cols {
        return Err(Error::InvalidParameter(format!(
            "expected {} rows, found {count_rows}",
            grid.len() / cols
        )));
    }
    let inside_values: Vec<f64> = mask.inside_nodes.iter().map(|&f| values[f]).collect();
    ScalarField::from_inside_values(mask, &inside_values)
}

#[derive(Serialize)]
struct GridMeta<'a> {
    domain: &'a DomainSpec,
    h: f64,
    grid: &'a Grid,
    inside_count: usize,
    seed: u64,
}

/// Dispatches one check id against a scenario.
pub fn run_check(cfg: &RunConfig, id: &str) -> Result<VerificationReport> {
    let scenario = Scenario::new(
        cfg.domain.clone(),
        cfg.h,
        cfg.generators.clone(),
        cfg.alpha,
        cfg.p.clone(),
    )?;
    match id {
        "gradient_bound_critical" => check_gradient_bound_alpha0(&scenario),
        "gradient_bound_fractional" => check_gradient_bound_fractional(&scenario),
        "gradient_bound_spherical" => check_gradient_bound_spherical(&scenario),
        "norm_bounds" => check_norm_bounds(&scenario),
        "zero_boundary" => check_zero_boundary(&scenario),
        "continuity" => continuity_experiment(&scenario, &cfg.perturbations, cfg.levels),
        "argmax_stability" => argmax_stability_experiment(
            &scenario,
            &cfg.perturbations,
            cfg.lambda_factor * cfg.h,
            cfg.stability_levels,
        ),
        "derivative_formula" => derivative_formula_check(&scenario),
        "calculus_identities" => calculus_identity_checks(&scenario),
        other => Err(Error::InvalidParameter(format!("unknown check `{other}`"))),
    }
}

/// Exit status of a batch run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    /// All non-advisory checks passed (or none were requested).
    Ok,
    /// Some check ran and failed.
    CheckFailures,
    /// A requested check's hypothesis window is not satisfied.
    HypothesesUnmet,
}

impl RunStatus {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunStatus::Ok => 0,
            RunStatus::CheckFailures => 1,
            RunStatus::HypothesesUnmet => 2,
        }
    }
}

/// What to produce on disk.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunMode {
    /// Fields (and the distance field) only.
    Generate,
    /// Fields plus maximal-operator outputs.
    Compute,
    /// Everything, including the check reports.
    Verify,
}

pub struct RunOutput {
    pub status: RunStatus,
    pub reports: Vec<VerificationReport>,
    pub summary: String,
}

fn in_thread_pool<T: Send>(threads: Threads, job: impl FnOnce() -> T + Send) -> T {
    match threads {
        Threads::Auto => job(),
        Threads::Count(k) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .expect("thread pool");
            pool.install(job)
        }
    }
}

/// Runs a configuration end to end, writing artifacts under `out_dir`.
pub fn run_config(cfg: &RunConfig, out_dir: &Path, mode: RunMode) -> Result<RunOutput> {
    in_thread_pool(cfg.threads, || run_config_inner(cfg, out_dir, mode))
}

fn run_config_inner(cfg: &RunConfig, out_dir: &Path, mode: RunMode) -> Result<RunOutput> {
    std::fs::create_dir_all(out_dir.join("fields"))?;
    let scenario = Scenario::new(
        cfg.domain.clone(),
        cfg.h,
        cfg.generators.clone(),
        cfg.alpha,
        cfg.p.clone(),
    )?;
    let realized = scenario.realize()?;
    let meta = GridMeta {
        domain: &cfg.domain_spec,
        h: cfg.h,
        grid: &realized.lattice.mask.grid,
        inside_count: realized.lattice.mask.inside_count(),
        seed: cfg.seed,
    };
    std::fs::write(
        out_dir.join("grid.json"),
        serde_json::to_string_pretty(&meta)?,
    )?;
    for (i, slot) in realized.fields.slots().iter().enumerate() {
        write_field_csv(
            slot,
            &out_dir.join("fields").join(format!("field_{i:02}.csv")),
        )?;
    }
    write_field_csv(
        &realized.lattice.delta,
        &out_dir.join("fields").join("delta.csv"),
    )?;
    if mode == RunMode::Generate {
        return Ok(RunOutput {
            status: RunStatus::Ok,
            reports: Vec::new(),
            summary: String::new(),
        });
    }

    std::fs::create_dir_all(out_dir.join("maximal"))?;
    let res = local_maximal_field(
        &realized.fields,
        &realized.table,
        &realized.lattice,
        cfg.alpha,
        EngineKind::Fast,
        1e-9,
    )?;
    write_field_csv(&res.value, &out_dir.join("maximal").join("maximal.csv"))?;
    let argmax: BTreeMap<String, &Vec<f64>> = res
        .argmax_radii
        .iter()
        .enumerate()
        .map(|(i, r)| (format!("{i}"), r))
        .collect();
    std::fs::write(
        out_dir.join("maximal").join("argmax.json"),
        serde_json::to_string(&argmax)?,
    )?;
    if mode == RunMode::Compute {
        return Ok(RunOutput {
            status: RunStatus::Ok,
            reports: Vec::new(),
            summary: String::new(),
        });
    }

    let mut reports = Vec::new();
    for id in &cfg.checks {
        match run_check(cfg, id) {
            Ok(report) => reports.push(report),
            Err(Error::HypothesesUnmet(msg)) => {
                return Err(Error::HypothesesUnmet(format!("check `{id}`: {msg}")));
            }
            Err(e) => return Err(e),
        }
    }
    std::fs::write(
        out_dir.join("reports.json"),
        serde_json::to_string_pretty(&reports)?,
    )?;
    let summary = if reports.is_empty() {
        String::new()
    } else {
        emit_report(&reports)?
    };
    std::fs::write(out_dir.join("summary.txt"), &summary)?;
    let all_pass = reports.iter().all(|r| r.pass || r.advisory);
    Ok(RunOutput {
        status: if all_pass {
            RunStatus::Ok
        } else {
            RunStatus::CheckFailures
        },
        reports,
        summary,
    })
}

/// Resolves the thread setting: CLI flag beats the `MAXREG_THREADS`
/// environment variable, which beats the config file.
pub fn resolve_threads(flag: Option<&str>, cfg: Threads) -> Result<Threads> {
    let from_str = |s: &str| -> Result<Threads> {
        if s == "auto" {
            Ok(Threads::Auto)
        } else {
            s.parse::<usize>()
                .map(|k| Threads::Count(k.max(1)))
                .map_err(|_| Error::InvalidParameter(format!("bad thread count `{s}`")))
        }
    };
    if let Some(s) = flag {
        return from_str(s);
    }
    if let Ok(s) = std::env::var("MAXREG_THREADS") {
        if !s.is_empty() {
            return from_str(&s);
        }
    }
    Ok(cfg)
}

/// Reads `reports.json` back and renders the summary table.
pub fn report_from_dir(out_dir: &Path) -> Result<String> {
    let text = std::fs::read_to_string(out_dir.join("reports.json"))?;
    let reports: Vec<serde_json::Value> = serde_json::from_str(&text)?;
    if reports.is_empty() {
        return Err(Error::NothingToReport);
    }
    // Re-render from the serialized form to stay independent of how the
    // reports were produced.
    let mut rows: Vec<(String, String, f64, f64, bool)> = Vec::new();
    for r in &reports {
        let id = r["check_id"].as_str().unwrap_or("?").to_string();
        let q = r["exponents"]["q"]
            .as_f64()
            .map(|q| format!("{q:.4}"))
            .unwrap_or_else(|| "inf".into());
        rows.push((
            id,
            q,
            r["pass_fraction"].as_f64().unwrap_or(f64::NAN),
            r["empirical_constant"].as_f64().unwrap_or(f64::NAN),
            r["pass"].as_bool().unwrap_or(false),
        ));
    }
    rows.sort_by(|a, b| a.0.cmp(&b.0));
    let mut out = String::new();
    out.push_str(&format!(
        "{:<28} {:>10} {:>14} {:>20} {:>6}\n",
        "check_id", "q", "pass_fraction", "empirical_constant", "pass"
    ));
    for (id, q, pf, ec, pass) in rows {
        out.push_str(&format!(
            "{id:<28} {q:>10} {pf:>14.4} {ec:>20.6} {pass:>6}\n"
        ));
    }
    Ok(out)
}

/// Convenience used by the binary: print unless quiet.
pub fn maybe_print(quiet: bool, text: &str) {
    if !quiet && !text.is_empty() {
        let mut stdout = std::io::stdout().lock();
        let _ = stdout.write_all(text.as_bytes());
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{rasterize, Domain};

    fn minimal_config(checks: &str) -> Value {
        serde_json::from_str(&format!(
            r#"{{
              "domain": {{"kind": "rectangle", "params": {{"lo": [0.0, 0.0], "hi": [1.0, 1.0]}}}},
              "h": 0.0625,
              "fields": [{{"kind": "gaussian", "center": [0.5, 0.5], "width": 0.2, "amplitude": 1.0}}],
              "m": 1,
              "alpha": 0.0,
              "p": [2.0],
              "checks": {checks}
            }}"#
        ))
        .unwrap()
    }

    #[test]
    fn parse_minimal_config() {
        let cfg = parse_config(&minimal_config("[]")).unwrap();
        assert_eq!(cfg.m, 1);
        assert_eq!(cfg.checks.len(), 0);
        assert_eq!(cfg.threads, Threads::Auto);
        assert_eq!(cfg.levels, 6);
    }

    #[test]
    fn unknown_check_id_has_pointer() {
        let doc = minimal_config(r#"["no_such_check"]"#);
        match parse_config(&doc) {
            Err(Error::Config { pointer, .. }) => assert_eq!(pointer, "/checks/0"),
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn bad_p_is_hypothesis_failure() {
        let mut doc = minimal_config("[]");
        doc["p"] = serde_json::json!([1.0]);
        match parse_config(&doc) {
            Err(Error::HypothesesUnmet(msg)) => {
                assert!(msg.contains("1 < p_j"), "{msg}");
            }
            other => panic!("expected hypotheses unmet, got {other:?}"),
        }
    }

    #[test]
    fn unknown_key_rejected() {
        let mut doc = minimal_config("[]");
        doc["frobnicate"] = serde_json::json!(1);
        match parse_config(&doc) {
            Err(Error::Config { pointer, .. }) => assert_eq!(pointer, "/frobnicate"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let dom = Domain::Disk {
            center: [0.0, 0.0],
            radius: 1.0,
        };
        let mask = rasterize(&dom, 0.1).unwrap();
        let f = ScalarField::from_fn(mask.clone(), |p| {
            (p[0] * 12.345).sin() * (p[1] * 7.25).cos() + 1.0 / 3.0
        })
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.csv");
        write_field_csv(&f, &path).unwrap();
        let back = read_field_csv(mask.clone(), &path).unwrap();
        for &flat in &mask.inside_nodes {
            assert_eq!(
                f.get(flat).unwrap().to_bits(),
                back.get(flat).unwrap().to_bits()
            );
        }
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(!text.contains('\r'));
        assert!(text.lines().any(|l| l.starts_with(',')));
    }

    #[test]
    fn run_config_fields_only() {
        let cfg = parse_config(&minimal_config("[]")).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let out = run_config(&cfg, dir.path(), RunMode::Verify).unwrap();
        assert_eq!(out.status, RunStatus::Ok);
        assert!(dir.path().join("fields/field_00.csv").exists());
        assert!(dir.path().join("fields/delta.csv").exists());
        assert!(dir.path().join("maximal/maximal.csv").exists());
        assert!(dir.path().join("reports.json").exists());
        let reports: Vec<Value> = serde_json::from_str(
            &std::fs::read_to_string(dir.path().join("reports.json")).unwrap(),
        )
        .unwrap();
        assert!(reports.is_empty());
    }

    #[test]
    fn profile_csv_has_zero_entry_and_ladder() {
        let dom = Domain::Rectangle {
            lo: vec![0.0, 0.0],
            hi: vec![1.0, 1.0],
        };
        let lat = crate::lattice::Lattice::new(dom, 0.1).unwrap();
        let table = crate::averaging::StencilTable::for_lattice(&lat);
        let f = ScalarField::from_fn(lat.mask.clone(), |p| 1.0 + p[0]).unwrap();
        let fields = crate::maxops::MultiField::new(vec![f]).unwrap();
        let x = lat.mask.inside_nodes[lat.mask.inside_count() / 2];
        let prof = crate::averaging::radial_profile(&fields, &table, &lat, x, 0.0).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("profile.csv");
        write_profile_csv(&prof, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), prof.radii.len() + 1);
        assert!(lines[0].starts_with("0,"));
        let first: Vec<&str> = lines[1].split(',').collect();
        assert_eq!(first[0].parse::<f64>().unwrap(), prof.radii[0]);
        assert_eq!(first[1].parse::<f64>().unwrap(), prof.values[0]);
    }

    #[test]
    fn resolve_threads_priority() {
        assert_eq!(
            resolve_threads(Some("3"), Threads::Auto).unwrap(),
            Threads::Count(3)
        );
        assert_eq!(
            resolve_threads(None, Threads::Count(2)).unwrap(),
            Threads::Count(2)
        );
        assert!(resolve_threads(Some("many"), Threads::Auto).is_err());
    }
}
