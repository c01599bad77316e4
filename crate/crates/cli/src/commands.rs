use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde_json::{json, Value};
use toddsum::ehrhart::{ehrhart_sum, expansion_stability_check, symbol_expansion, StabilityOptions};
use toddsum::emcore::{convergence_study, em_expansion_simple, lattice_counts, riemann_sum_polytope};
use toddsum::{ExpansionOptions, ExpansionSeries, HPolytope, SumValue};

use crate::config::{Command, RunConfig};
use crate::error::{CliError, CliResult};
use crate::plot::emit_plot;

pub const SCHEMA_VERSION: u32 = 1;
pub const CSV_HEADER: [&str; 4] = ["N", "riemann", "estimate", "abs_error"];

/// A finished report, plus a failure that should still set the exit code
/// after the report is written.
pub struct Output {
    pub report: Value,
    pub failure: Option<CliError>,
}

impl From<Value> for Output {
    fn from(report: Value) -> Self {
        Output { report, failure: None }
    }
}

fn header(cfg: &RunConfig) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("schema_version".into(), json!(SCHEMA_VERSION));
    m.insert("command".into(), json!(cfg.command.name()));
    m
}

fn report(cfg: &RunConfig, body: Value) -> Value {
    let mut m = header(cfg);
    if let Value::Object(b) = body {
        m.extend(b);
    }
    Value::Object(m)
}

pub fn run(cfg: &RunConfig) -> CliResult<Output> {
    match cfg.command {
        Command::Validate => validate(cfg),
        Command::Count => count(cfg).map(Into::into),
        Command::Sum => sum(cfg).map(Into::into),
        Command::Expand => expand(cfg).map(Into::into),
        Command::Estimate => estimate(cfg).map(Into::into),
        Command::Converge => converge(cfg).map(Into::into),
        Command::Ehrhart => ehrhart(cfg).map(Into::into),
    }
}

fn options(cfg: &RunConfig) -> ExpansionOptions {
    let mut opts = ExpansionOptions::default();
    if let Some(m) = cfg.order {
        opts.order = m;
    }
    opts.backend = cfg.backend;
    opts
}

fn validate(cfg: &RunConfig) -> CliResult<Output> {
    let p = cfg.polytope()?;
    let simple = p.is_simple();
    let (regular, faces) = if simple {
        let faces = p.faces()?;
        let rows: Vec<Value> = faces
            .iter()
            .map(|f| {
                json!({
                    "facets": f.facets,
                    "dim": f.dim,
                    "gamma": f.torsion.order(),
                    "gamma_sharp": f.starred.len(),
                    "invariants": f.torsion.invariants.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
                })
            })
            .collect();
        (json!(p.is_regular()?), rows)
    } else {
        (Value::Null, Vec::new())
    };
    let body = json!({
        "dim": p.dim(),
        "facets": p.num_facets(),
        "vertices": p.vertices().len(),
        "simple": simple,
        "regular": regular,
        "lattice": p.is_lattice(),
        "faces": faces,
    });
    let failure = (!simple).then(|| CliError::Validation("polytope is not simple".into()));
    Ok(Output { report: report(cfg, body), failure })
}

fn count(cfg: &RunConfig) -> CliResult<Value> {
    let p = cfg.polytope()?;
    let counts = lattice_counts(&p, cfg.require_ns()?);
    let rows: Vec<Value> = counts.iter().map(|(n, c)| json!({"N": n, "count": c})).collect();
    Ok(report(cfg, json!({"dim": p.dim(), "counts": rows})))
}

fn sum(cfg: &RunConfig) -> CliResult<Value> {
    let p = cfg.polytope()?;
    let f = cfg.integrand(p.dim())?;
    let ns = cfg.require_ns()?;
    let values: Vec<SumValue> =
        ns.par_iter().map(|&n| riemann_sum_polytope(&p, &f, n)).collect::<toddsum::Result<_>>()?;
    let rows: Vec<Value> = ns.iter().zip(&values).map(|(n, v)| json!({"N": n, "riemann": v.to_json()})).collect();
    Ok(report(cfg, json!({"sums": rows})))
}

/// One series per residue class of `N` modulo the series period.
fn series_classes<F>(build: F) -> CliResult<Vec<ExpansionSeries>>
where
    F: Fn(u64) -> toddsum::Result<ExpansionSeries>,
{
    let first = build(0)?;
    let mut out = vec![first];
    for r in 1..out[0].period {
        out.push(build(r)?);
    }
    Ok(out)
}

fn classes_json(classes: &[ExpansionSeries]) -> Value {
    let items: Vec<Value> =
        classes.iter().map(|s| json!({"residue": s.residue, "coefficients": s.to_json()})).collect();
    json!(items)
}

fn polytope_series(p: &HPolytope, cfg: &RunConfig) -> CliResult<Vec<ExpansionSeries>> {
    let f = cfg.integrand(p.dim())?;
    let opts = options(cfg);
    series_classes(|r| em_expansion_simple(p, &f, &opts.clone().at_residue(r)))
}

fn expand(cfg: &RunConfig) -> CliResult<Value> {
    let p = cfg.polytope()?;
    let classes = polytope_series(&p, cfg)?;
    let s = &classes[0];
    Ok(report(
        cfg,
        json!({
            "order": s.order,
            "backend": s.backend.to_string(),
            "variable": "1/N",
            "period": s.period,
            "series": classes_json(&classes),
        }),
    ))
}

fn estimate(cfg: &RunConfig) -> CliResult<Value> {
    let p = cfg.polytope()?;
    let ns = cfg.require_ns()?;
    let classes = polytope_series(&p, cfg)?;
    let period = classes[0].period;
    let rows: Vec<Value> =
        ns.iter().map(|&n| json!({"N": n, "estimate": classes[(n % period) as usize].evaluate(n).to_json()})).collect();
    Ok(report(
        cfg,
        json!({
            "order": classes[0].order,
            "backend": classes[0].backend.to_string(),
            "estimates": rows,
        }),
    ))
}

fn write_csv(path: &Path, rows: &[[String; 4]]) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    let io = |e: csv::Error| CliError::config(format!("{}: {e}", path.display()));
    w.write_record(CSV_HEADER).map_err(io)?;
    for r in rows {
        w.write_record(r).map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

fn converge(cfg: &RunConfig) -> CliResult<Value> {
    let p = cfg.polytope()?;
    let f = cfg.integrand(p.dim())?;
    let ns = cfg.require_ns()?;
    let opts = options(cfg);
    let study = convergence_study(&p, &f, ns, &opts)?;
    let table: Vec<[String; 4]> = study
        .rows
        .iter()
        .map(|r| [r.n.to_string(), r.riemann.to_string(), r.estimate.to_string(), r.abs_error.to_string()])
        .collect();
    if let Some(path) = &cfg.csv {
        write_csv(path, &table)?;
    }
    let mut plot_path = Value::Null;
    if let Some(path) = &cfg.plot {
        let points: Vec<(u64, f64)> = study.rows.iter().map(|r| (r.n, r.abs_error.to_f64())).collect();
        let title = format!("Euler-Maclaurin error, M = {}", study.order);
        match emit_plot(&points, &title) {
            Some(plot) => {
                fs::write(path, plot.svg)?;
                plot_path = json!(path.display().to_string());
            }
            None => eprintln!("notice: plot skipped, fewer than two nonzero errors"),
        }
    }
    let rows: Vec<Value> = study
        .rows
        .iter()
        .map(|r| {
            json!({
                "N": r.n,
                "riemann": r.riemann.to_json(),
                "estimate": r.estimate.to_json(),
                "abs_error": r.abs_error.to_json(),
            })
        })
        .collect();
    Ok(report(
        cfg,
        json!({
            "order": study.order,
            "backend": opts.backend.map_or_else(
                || if f.as_poly().is_some() { "exact".to_string() } else { "numeric".to_string() },
                |b| b.to_string()
            ),
            "slope": study.slope,
            "intercept": study.intercept,
            "zero_errors": study.zero_errors,
            "rows": rows,
            "csv": cfg.csv.as_ref().map(|p| p.display().to_string()),
            "plot": plot_path,
        }),
    ))
}

fn ehrhart(cfg: &RunConfig) -> CliResult<Value> {
    let p = cfg.polytope()?;
    let sym = cfg.symbol(p.dim() + 1)?;
    let opts = options(cfg);
    let classes = series_classes(|r| symbol_expansion(&sym, &p, &opts.clone().at_residue(r)))?;
    let period = classes[0].period;

    let mut sums = Vec::new();
    if let Some(ns) = &cfg.ns {
        let values: Vec<SumValue> = ns.iter().map(|&n| ehrhart_sum(&sym, &p, n)).collect::<toddsum::Result<_>>()?;
        for (&n, v) in ns.iter().zip(&values) {
            let e = classes[(n % period) as usize].evaluate(n);
            sums.push(
                json!({"N": n, "sum": v.to_json(), "expansion": e.to_json(), "abs_diff": v.abs_diff(&e).to_json()}),
            );
        }
    }

    let [a, b] = cfg.ranges.clone().unwrap_or_else(|| [(20..=40).collect(), (41..=80).collect()]);
    let st = expansion_stability_check(&sym, &p, [&a, &b], &StabilityOptions::default())?;
    let stability = json!({
        "ranges": [[a[0], a[a.len() - 1]], [b[0], b[b.len() - 1]]],
        "powers": st.powers,
        "first": st.first,
        "second": st.second,
        "rel_disagreement": st.rel_disagreement,
        "condition": st.condition,
        "ill_conditioned": st.ill_conditioned,
    });
    Ok(report(
        cfg,
        json!({
            "order": classes[0].order,
            "backend": classes[0].backend.to_string(),
            "variable": "N",
            "top_degree": sym.top_degree(),
            "truncation_depth": sym.truncation_depth(),
            "period": period,
            "series": classes_json(&classes),
            "sums": sums,
            "stability": stability,
        }),
    ))
}
