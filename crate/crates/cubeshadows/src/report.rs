//! Report serialization: JSON, CSV, and human-readable text.
//!
//! JSON documents carry every exact rational as `{num, den, decimal}` object
//! with numerator/denominator strings; the six-significant-digit decimal is
//! display-only and never used in comparisons. Map keys are sorted, CSV uses
//! comma separators, `.` decimal points, a header row, and LF line endings,
//! so all outputs are byte-stable given the same inputs.

use crate::bounds::{self, LogBase};
use crate::constructions::{majority, GoldenRatioPartition};
use crate::error::Result;
use crate::geometry::CoordSet;
use crate::measure::{evaluate, EvalReport};
use crate::rational::{decimal_string, rational, rational_to_f64, Rational, RationalJson};
use crate::search::{CoverSearchResult, SearchResult};
use num::BigInt;
use num::One;
use serde_json::{json, Map, Value};
use std::fmt::Write as _;

fn rational_value(r: &Rational) -> Value {
    let j = RationalJson::from(r);
    json!({ "num": j.num, "den": j.den, "decimal": j.decimal })
}

fn coords_value(s: &CoordSet) -> Value {
    Value::Array(s.coords().iter().map(|&c| json!(c)).collect())
}

/// Space-separated 1-based coordinates, e.g. `"1 3"`; CSV-friendly.
fn coords_field(s: &CoordSet) -> String {
    s.coords()
        .iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn eval_report_json(report: &EvalReport) -> Value {
    let mut volumes = Map::new();
    for (color, vol) in &report.part_volumes {
        volumes.insert(color.to_string(), rational_value(vol));
    }
    let mut projections = Map::new();
    for (color, s, vol) in &report.projections {
        projections.insert(format!("{color}:{s}"), rational_value(vol));
    }
    let mut doc = json!({
        "geometry": { "n": report.dimension, "grid": report.resolution },
        "colors": report.colors,
        "d": report.d,
        "part_volumes": Value::Object(volumes),
        "projections": Value::Object(projections),
        "mpv": rational_value(&report.mpv),
        "witness": { "part": report.witness.0.get(), "coords": coords_value(&report.witness.1) },
        "balance_deviation": rational_value(&report.balance_deviation),
    });
    let obj = doc.as_object_mut().unwrap();
    if let Some(inf) = &report.influence {
        let mut rows = Map::new();
        for (s, v) in &inf.rows {
            rows.insert(s.to_string(), rational_value(v));
        }
        obj.insert(
            "influence".into(),
            json!({
                "k": inf.k,
                "table": Value::Object(rows),
                "max": rational_value(&inf.max),
                "witness": coords_value(&inf.witness),
            }),
        );
    }
    if !report.notes.is_empty() {
        obj.insert("notes".into(), json!(report.notes));
    }
    doc
}

/// One CSV row per (part, S) projection table entry.
pub fn eval_report_csv(report: &EvalReport) -> Result<String> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(["part", "coords", "num", "den", "decimal"])
        .map_err(csv_err)?;
    for (color, s, vol) in &report.projections {
        let j = RationalJson::from(vol);
        w.write_record([
            color.to_string(),
            coords_field(s),
            j.num,
            j.den,
            j.decimal,
        ])
        .map_err(csv_err)?;
    }
    finish_csv(w)
}

pub fn eval_report_human(report: &EvalReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "grid: n={} N={} colors={}  (projection dimension d={})",
        report.dimension, report.resolution, report.colors, report.d
    );
    let _ = writeln!(out, "part volumes:");
    for (color, vol) in &report.part_volumes {
        let _ = writeln!(out, "  part {color}: {} = {}", vol, decimal_string(vol, 6));
    }
    let _ = writeln!(out, "projection volumes:");
    for (color, s, vol) in &report.projections {
        let _ = writeln!(
            out,
            "  part {color} on {s}: {} = {}",
            vol,
            decimal_string(vol, 6)
        );
    }
    let _ = writeln!(
        out,
        "mpv: {} = {} at part {} on {}",
        report.mpv,
        decimal_string(&report.mpv, 6),
        report.witness.0,
        report.witness.1
    );
    let _ = writeln!(
        out,
        "balance deviation: {} = {}",
        report.balance_deviation,
        decimal_string(&report.balance_deviation, 6)
    );
    if let Some(inf) = &report.influence {
        let _ = writeln!(out, "influence of coalitions of size {}:", inf.k);
        for (s, v) in &inf.rows {
            let _ = writeln!(out, "  {s}: {} = {}", v, decimal_string(v, 6));
        }
        let _ = writeln!(
            out,
            "max influence: {} = {} at {}",
            inf.max,
            decimal_string(&inf.max, 6),
            inf.witness
        );
    }
    for note in &report.notes {
        let _ = writeln!(out, "note: {note}");
    }
    out
}

pub fn search_result_json(r: &SearchResult, n: u32, resolution: u32, colors: u8, d: u32) -> Value {
    json!({
        "params": { "n": n, "grid": resolution, "colors": colors, "d": d },
        "best": rational_value(&r.best),
        "nodes": r.nodes,
        "evaluated": r.evaluated,
        "canonical_skipped": r.canonical_skipped,
        "optimal": r.optimal,
        "space": r.space,
        "witness_labels": r.partition.labels().iter().map(|&l| json!(l)).collect::<Vec<_>>(),
    })
}

pub fn cover_search_result_json(
    r: &CoverSearchResult,
    n: u32,
    resolution: u32,
    colors: u8,
    d: u32,
) -> Value {
    json!({
        "params": { "n": n, "grid": resolution, "colors": colors, "d": d, "space": "covers" },
        "best": rational_value(&r.best),
        "nodes": r.nodes,
        "optimal": r.optimal,
        "space": r.space,
    })
}

/// One row of the planar one-dimensional table: the least achievable max
/// projection for `c` parts, cross-checked against the iterated ceiling.
#[derive(Debug, Clone)]
pub struct Rho21Row {
    pub colors: u64,
    pub value: Rational,
    pub crosscheck_ok: bool,
}

pub fn rho21_table(c_min: u64, c_max: u64) -> Vec<Rho21Row> {
    (c_min.max(1)..=c_max)
        .map(|c| {
            let value = bounds::rho_2_1(c);
            // The value is achievable (iterated ceiling at most c) and tight
            // (any smaller epsilon needs more than c parts).
            let at_value = bounds::iterated_ceiling(&value.recip(), 2)
                .map(|v| v <= BigInt::from(c))
                .unwrap_or(false);
            let step = rational(1, (c * (c + 1)) as i64);
            let tighter = &value - step;
            let below = if tighter > Rational::from(BigInt::from(0)) {
                bounds::iterated_ceiling(&tighter.recip(), 2)
                    .map(|v| v > BigInt::from(c))
                    .unwrap_or(false)
            } else {
                true
            };
            Rho21Row {
                colors: c,
                value,
                crosscheck_ok: at_value && below,
            }
        })
        .collect()
}

pub fn rho21_csv(rows: &[Rho21Row]) -> Result<String> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(["c", "num", "den", "decimal", "ceiling_crosscheck"])
        .map_err(csv_err)?;
    for row in rows {
        let j = RationalJson::from(&row.value);
        w.write_record([
            row.colors.to_string(),
            j.num,
            j.den,
            j.decimal,
            if row.crosscheck_ok { "ok" } else { "FAIL" }.to_string(),
        ])
        .map_err(csv_err)?;
    }
    finish_csv(w)
}

/// Measured-vs-reference comparison for the three-dimensional, two-projection
/// table.
#[derive(Debug, Clone)]
pub struct N3d2Row {
    pub name: &'static str,
    pub colors: u8,
    pub measured: Rational,
    pub reference_decimal: f64,
    /// Exact when the reference value is rational.
    pub reference_exact: Option<Rational>,
    pub matches: bool,
    pub reference_lower_bound: &'static str,
}

/// Builds the n=3, d=2 comparison rows: the two-color majority partition and
/// the three-color golden-ratio partition at the given grid, against the best
/// known reference values (3/4 for two colors, 1/phi for three).
pub fn n3_d2_table(resolution: u32) -> Result<Vec<N3d2Row>> {
    let mut rows = Vec::new();

    let maj = majority(3)?;
    let maj_eval = evaluate(&maj, 2, None)?;
    let reference = rational(3, 4);
    rows.push(N3d2Row {
        name: "majority",
        colors: 2,
        matches: maj_eval.mpv == reference,
        measured: maj_eval.mpv,
        reference_decimal: 0.75,
        reference_exact: Some(reference),
        reference_lower_bound: "3/4",
    });

    let gr = GoldenRatioPartition::new(resolution)?;
    let gr_eval = evaluate(&gr, 2, None)?;
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let tolerance = 2.0 / resolution as f64;
    rows.push(N3d2Row {
        name: "golden-ratio",
        colors: 3,
        matches: (rational_to_f64(&gr_eval.mpv) - inv_phi).abs() <= tolerance,
        measured: gr_eval.mpv,
        reference_decimal: inv_phi,
        reference_exact: None,
        reference_lower_bound: "0.526",
    });

    Ok(rows)
}

pub fn n3_d2_csv(rows: &[N3d2Row]) -> Result<String> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record([
        "construction",
        "colors",
        "measured_num",
        "measured_den",
        "measured_decimal",
        "reference_decimal",
        "matches",
        "reference_lower_bound",
    ])
    .map_err(csv_err)?;
    for row in rows {
        let j = RationalJson::from(&row.measured);
        w.write_record([
            row.name.to_string(),
            row.colors.to_string(),
            j.num,
            j.den,
            j.decimal,
            format!("{:.6}", row.reference_decimal),
            if row.matches { "yes" } else { "no" }.to_string(),
            row.reference_lower_bound.to_string(),
        ])
        .map_err(csv_err)?;
    }
    finish_csv(w)
}

/// Bound report assembled by the `bounds` CLI subcommand.
pub fn bounds_json(
    n: u32,
    d: u32,
    c: u64,
    eps: Option<&Rational>,
    b: Option<&Rational>,
    delta: Option<&Rational>,
    log_base: LogBase,
) -> Result<Value> {
    let mut rows = Vec::new();
    let glb = bounds::general_lower_bound(n, d, c)?;
    rows.push(json!({
        "bound": "general-lower-bound",
        "params": { "n": n, "d": d, "c": c },
        "value_decimal": format!("{:.6}", glb.value),
        "taylor_floor_decimal": format!("{:.6}", glb.taylor_floor),
        "exact_form": "mpv^n >= (1/c)^d",
    }));
    if let Some(eps) = eps {
        if eps >= &Rational::one() || eps.numer() <= &BigInt::from(0) {
            return Err(crate::error::Error::BadParams(
                "eps must be in (0, 1)".into(),
            ));
        }
        let lower = bounds::iterated_ceiling(&eps.recip(), n)?;
        rows.push(json!({
            "bound": "iterated-ceiling-cover-size",
            "params": { "n": n, "eps": RationalJson::from(eps) },
            "value": lower.to_string(),
            "meaning": "minimum parts for mpv(.,1) <= eps is at least this",
        }));
    }
    if n == 2 && d == 1 {
        let rho = bounds::rho_2_1(c);
        rows.push(json!({
            "bound": "rho-2-1",
            "params": { "c": c },
            "value": rational_value(&rho),
        }));
    }
    if let (Some(b), Some(delta)) = (b, delta) {
        let t = bounds::conjecture_j_threshold(b, n, delta, log_base)?;
        rows.push(conjecture_json(&t, b, delta, log_base));
    }
    let mut doc = json!({ "bounds": rows });
    if let Some(advisory) = bounds::asymptotic_advisory(n, d, c) {
        doc.as_object_mut()
            .unwrap()
            .insert("advisory".into(), json!(advisory));
    }
    Ok(doc)
}

pub fn conjecture_json(
    t: &bounds::ConjectureThreshold,
    b: &Rational,
    delta: &Rational,
    log_base: LogBase,
) -> Value {
    json!({
        "bound": "conjectured-excess-threshold",
        "params": {
            "b": RationalJson::from(b),
            "delta": RationalJson::from(delta),
            "log_base": match log_base { LogBase::Two => "2", LogBase::Natural => "e" },
        },
        "colors": t.colors,
        "threshold_exact": t.threshold_exact.as_ref().map(rational_value),
        "threshold_decimal": format!("{:.6}", t.threshold_approx),
        "excess_term_decimal": format!("{:.6}", t.excess_term_approx),
        "note": "diagnostic only: conjectured, no pass/fail semantics",
    })
}

fn csv_err(e: csv::Error) -> crate::error::Error {
    crate::error::Error::BadParams(format!("csv write failed: {e}"))
}

fn finish_csv(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w
        .into_inner()
        .map_err(|e| crate::error::Error::BadParams(format!("csv flush failed: {e}")))?;
    String::from_utf8(bytes).map_err(|e| crate::error::Error::BadParams(e.to_string()))
}

/// Reference golden-ratio note used by eval on that construction.
pub fn golden_ratio_note(resolution: u32) -> String {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    format!(
        "reference claim for the three-color golden-ratio partition: max \
         2-projection 1/phi ~= {inv_phi:.6}; measured values above are \
         reported from the literal construction at grid N={resolution} \
         without asserting equality"
    )
}
