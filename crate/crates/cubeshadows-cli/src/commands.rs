//! Subcommand implementations.

use crate::kinds::Built;
use crate::output::{emit, json_string, Format};
use crate::{
    BoundsArgs, ConjectureArgs, ConstructArgs, EvalArgs, SearchArgs, TableArgs, VerifyArgs,
};
use anyhow::{bail, Context, Result};
use cubeshadows::bounds::{self, LogBase};
use cubeshadows::constructions::GoldenRatioPartition;
use cubeshadows::measure::{evaluate, mpv, EvalReport, PartFamily};
use cubeshadows::partition::GridPartition;
use cubeshadows::rational::{decimal_string, rational_to_f64, Rational, RationalJson};
use cubeshadows::report;
use cubeshadows::search::{
    exhaustive_min_mpv, full_projection_witness, min_mpv_over_covers, random_partition,
    SearchOptions,
};
use cubeshadows::spart;
use cubeshadows::verify::{run_suite, Suite};
use num::{One, ToPrimitive};
use serde_json::json;
use std::process::ExitCode;
use std::str::FromStr;

fn parse_rational(text: &str, what: &str) -> Result<Rational> {
    Rational::from_str(text.trim())
        .map_err(|e| anyhow::anyhow!("cannot parse {what} '{text}' as a rational (p/q): {e}"))
}

fn parse_log_base(text: &str) -> Result<LogBase> {
    match text {
        "2" => Ok(LogBase::Two),
        "e" => Ok(LogBase::Natural),
        other => bail!("--log-base must be 2 or e, got '{other}'"),
    }
}

pub fn construct(args: ConstructArgs) -> Result<ExitCode> {
    let partition = match args.kind.build()? {
        Built::Partition(p) => p,
        Built::Cover(cover) => cover.into_partition().context(
            "this slab cover has overlapping parts and cannot be written as a \
             partition file; evaluate it directly with `eval --kind sauer-shelah`",
        )?,
    };
    spart::write_to_path(&args.out, &partition)
        .with_context(|| format!("writing {}", args.out.display()))?;
    eprintln!(
        "wrote {} (n={} N={} c={}, {} cells)",
        args.out.display(),
        partition.geometry().dimension(),
        partition.geometry().resolution(),
        partition.colors(),
        partition.geometry().cell_count()
    );
    Ok(ExitCode::SUCCESS)
}

/// Bound checks appended to an eval report. Each entry is (name, pass).
struct BoundChecks {
    rows: Vec<(String, bool, String)>,
}

impl BoundChecks {
    fn all_pass(&self) -> bool {
        self.rows.iter().all(|(_, pass, _)| *pass)
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.rows
                .iter()
                .map(|(name, pass, detail)| {
                    json!({ "check": name, "pass": pass, "detail": detail })
                })
                .collect(),
        )
    }
}

fn check_bounds_for<F: PartFamily>(
    family: &F,
    partition: Option<&GridPartition>,
    report: &EvalReport,
) -> Result<BoundChecks> {
    let n = report.dimension;
    let c = report.colors as u64;
    let d = report.d;
    let mut rows = Vec::new();

    let glb = bounds::general_lower_bound(n, d, c)?;
    let holds = bounds::general_lower_bound_holds(&report.mpv, n, d, c);
    rows.push((
        "general-lower-bound".to_string(),
        holds,
        format!(
            "mpv {} >= (1/{c})^({d}/{n}) ~= {:.6}",
            decimal_string(&report.mpv, 6),
            glb.value
        ),
    ));

    if d <= n / c as u32 {
        let witness = full_projection_witness(family, d)?;
        rows.push((
            "full-projection-witness".to_string(),
            witness.is_some(),
            match witness {
                Some((color, s)) => format!("part {color} has full projection on {s}"),
                None => "no full projection found (violates the pigeonhole bound)".into(),
            },
        ));
    }

    if let Some(p) = partition {
        if p.geometry().resolution() == 2 {
            let chk = bounds::boolean_partition_upper_bound(p)?;
            rows.push((
                "boolean-upper-bound".to_string(),
                chk.holds,
                format!(
                    "mpv {} <= (1/c)(1 + c*gamma/2 + c*eps) = {} (gamma={}, eps={})",
                    decimal_string(&chk.measured, 6),
                    decimal_string(&chk.bound, 6),
                    decimal_string(&chk.gamma, 6),
                    decimal_string(&chk.epsilon, 6)
                ),
            ));
        }
    }

    Ok(BoundChecks { rows })
}

pub fn eval(args: EvalArgs) -> Result<ExitCode> {
    enum Target {
        Partition(GridPartition),
        Cover(cubeshadows::GridCover),
        Golden(GoldenRatioPartition),
    }

    let target = if let Some(path) = &args.r#in {
        Target::Partition(
            spart::read_from_path(path)
                .with_context(|| format!("reading {}", path.display()))?,
        )
    } else if args.kind.is_golden_ratio() {
        // Procedural labeling: works at any grid, including past the
        // materialization cap.
        let grid = args
            .kind
            .grid_or_default()
            .context("golden-ratio needs --grid")?;
        Target::Golden(GoldenRatioPartition::new(grid)?)
    } else {
        match args.kind.build()? {
            Built::Partition(p) => Target::Partition(p),
            Built::Cover(c) => Target::Cover(c),
        }
    };

    let (mut report, checks) = match &target {
        Target::Partition(p) => {
            let report = evaluate(p, args.d, args.influence)?;
            let checks = if args.check_bounds {
                Some(check_bounds_for(p, Some(p), &report)?)
            } else {
                None
            };
            (report, checks)
        }
        Target::Cover(c) => {
            let report = evaluate(c, args.d, args.influence)?;
            let checks = if args.check_bounds {
                Some(check_bounds_for(c, None, &report)?)
            } else {
                None
            };
            (report, checks)
        }
        Target::Golden(g) => {
            let report = evaluate(g, args.d, args.influence)?;
            let checks = if args.check_bounds {
                Some(check_bounds_for(g, None, &report)?)
            } else {
                None
            };
            (report, checks)
        }
    };

    if matches!(target, Target::Golden(_)) {
        report
            .notes
            .push(report::golden_ratio_note(report.resolution));
    }
    if matches!(target, Target::Cover(_)) {
        let n = report.dimension;
        let c = report.colors as u32;
        if report.d as u64 * c as u64 > n as u64 {
            // Two published exponents exist for this cover's projection
            // bound; the d-exponent is the guaranteed one.
            let bound = |e: u32| {
                let v = Rational::one()
                    - cubeshadows::rational::rational(1, (c as i64).pow(e));
                decimal_string(&v, 6)
            };
            report.notes.push(format!(
                "slab-cover projection bounds at d={}: guaranteed 1-(1/{c})^{} = {}; \
                 the ceiling-exponent variant 1-(1/{c})^{} = {} is reported for \
                 comparison only",
                report.d,
                report.d,
                bound(report.d),
                n.div_ceil(c),
                bound(n.div_ceil(c)),
            ));
        }
    }

    let all_pass = checks.as_ref().is_none_or(BoundChecks::all_pass);
    let content = match args.format {
        Format::Json => {
            let mut doc = report::eval_report_json(&report);
            if let Some(checks) = &checks {
                doc.as_object_mut()
                    .unwrap()
                    .insert("bounds".into(), checks.to_json());
            }
            json_string(&doc)
        }
        Format::Csv => report::eval_report_csv(&report)?,
        Format::Human => {
            let mut text = report::eval_report_human(&report);
            if let Some(checks) = &checks {
                for (name, pass, detail) in &checks.rows {
                    text.push_str(&format!(
                        "bound {}: {} ({})\n",
                        name,
                        if *pass { "pass" } else { "FAIL" },
                        detail
                    ));
                }
            }
            text
        }
    };
    emit(&args.out, &content)?;
    Ok(if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

pub fn bounds(args: BoundsArgs) -> Result<ExitCode> {
    let eps = args
        .eps
        .as_deref()
        .map(|t| parse_rational(t, "--eps"))
        .transpose()?;
    let b = args
        .b
        .as_deref()
        .map(|t| parse_rational(t, "--b"))
        .transpose()?;
    let delta = args
        .delta
        .as_deref()
        .map(|t| parse_rational(t, "--delta"))
        .transpose()?;
    let log_base = parse_log_base(&args.log_base)?;
    let doc = report::bounds_json(
        args.n,
        args.d,
        args.c,
        eps.as_ref(),
        b.as_ref(),
        delta.as_ref(),
        log_base,
    )?;
    let content = match args.format {
        Format::Json | Format::Csv => json_string(&doc),
        Format::Human => {
            let mut text = String::new();
            for row in doc["bounds"].as_array().unwrap() {
                text.push_str(&serde_json::to_string(row).unwrap());
                text.push('\n');
            }
            if let Some(adv) = doc.get("advisory") {
                text.push_str(adv.as_str().unwrap());
                text.push('\n');
            }
            text
        }
    };
    emit(&args.out, &content)?;
    Ok(ExitCode::SUCCESS)
}

pub fn search(args: SearchArgs) -> Result<ExitCode> {
    if args.covers {
        let result = min_mpv_over_covers(args.n, args.grid, args.c, args.d, args.budget)?;
        let mut doc =
            report::cover_search_result_json(&result, args.n, args.grid, args.c, args.d);
        match result.cover.into_partition() {
            Ok(p) => {
                if let Some(path) = &args.out_witness {
                    spart::write_to_path(path, &p)?;
                }
            }
            Err(_) => {
                doc.as_object_mut().unwrap().insert(
                    "witness_note".into(),
                    json!("best cover overlaps; no SPART1 witness written"),
                );
            }
        }
        emit(&args.out, &json_string(&doc))?;
        return Ok(ExitCode::SUCCESS);
    }

    if let Some(samples) = args.sample {
        if samples == 0 {
            bail!("--sample must be >= 1");
        }
        let mut best: Option<(Rational, GridPartition)> = None;
        for i in 0..samples {
            let p = random_partition(args.n, args.grid, args.c, args.seed.wrapping_add(i))?;
            let (v, _, _) = mpv(&p, args.d)?;
            if best.as_ref().is_none_or(|(bv, _)| v < *bv) {
                best = Some((v, p));
            }
        }
        let (value, partition) = best.unwrap();
        if let Some(path) = &args.out_witness {
            spart::write_to_path(path, &partition)?;
        }
        let doc = json!({
            "params": { "n": args.n, "grid": args.grid, "colors": args.c, "d": args.d,
                        "mode": "sample", "samples": samples, "seed": args.seed },
            "best": RationalJson::from(&value),
            "optimal": false,
        });
        emit(&args.out, &json_string(&doc))?;
        return Ok(ExitCode::SUCCESS);
    }

    let opts = SearchOptions {
        budget: args.budget,
        prune: !args.no_prune,
    };
    let result = exhaustive_min_mpv(args.n, args.grid, args.c, args.d, opts)?;
    if let Some(path) = &args.out_witness {
        spart::write_to_path(path, &result.partition)?;
    }
    let doc = report::search_result_json(&result, args.n, args.grid, args.c, args.d);
    let content = match args.format {
        Format::Json | Format::Csv => json_string(&doc),
        Format::Human => format!(
            "minimum mpv over {} colorings: {} = {} ({}optimal; {} nodes, {} evaluated, {} skipped by symmetry)\n",
            result.space,
            result.best,
            decimal_string(&result.best, 6),
            if result.optimal { "" } else { "NOT " },
            result.nodes,
            result.evaluated,
            result.canonical_skipped,
        ),
    };
    emit(&args.out, &content)?;
    Ok(ExitCode::SUCCESS)
}

pub fn table(args: TableArgs) -> Result<ExitCode> {
    let content = match args.kind.as_str() {
        "rho21" => {
            let rows = report::rho21_table(args.c_min, args.c_max);
            report::rho21_csv(&rows)?
        }
        "n3d2" => {
            let rows = report::n3_d2_table(args.grid)?;
            report::n3_d2_csv(&rows)?
        }
        other => bail!("unknown table kind '{other}', expected rho21 or n3d2"),
    };
    emit(&args.out, &content)?;
    Ok(ExitCode::SUCCESS)
}

pub fn conjecture(args: ConjectureArgs) -> Result<ExitCode> {
    let b = parse_rational(&args.b, "--b")?;
    let delta = parse_rational(&args.delta, "--delta")?;
    let log_base = parse_log_base(&args.log_base)?;
    let threshold = bounds::conjecture_j_threshold(&b, args.n, &delta, log_base)?;
    let mut doc = report::conjecture_json(&threshold, &b, &delta, log_base);

    if let Some(path) = &args.r#in {
        let p = spart::read_from_path(path)
            .with_context(|| format!("reading {}", path.display()))?;
        let n = p.geometry().dimension();
        if n < 2 {
            bail!("partition must have n >= 2 for an (n-1)-projection");
        }
        let (measured, _, _) = mpv(&p, n - 1)?;
        let c_actual = p.colors() as i64;
        let excess = measured.clone() * Rational::from(num::BigInt::from(c_actual))
            - Rational::from(num::BigInt::from(1));
        let obj = doc.as_object_mut().unwrap();
        obj.insert(
            "partition".into(),
            json!({
                "file": path.display().to_string(),
                "n": n,
                "colors": p.colors(),
                "measured_mpv": RationalJson::from(&measured),
                "measured_excess": RationalJson::from(&excess),
                "measured_excess_decimal": format!("{:.6}", rational_to_f64(&excess)),
                "conjectured_excess_term_decimal": format!("{:.6}", threshold.excess_term_approx * delta.to_f64().unwrap_or(f64::NAN)),
            }),
        );
    }
    emit(&args.out, &json_string(&doc))?;
    Ok(ExitCode::SUCCESS)
}

pub fn verify(args: VerifyArgs) -> Result<ExitCode> {
    let suites: Vec<Suite> = if args.suite == "all" {
        Suite::ALL.to_vec()
    } else {
        vec![args
            .suite
            .parse::<Suite>()
            .map_err(|e| anyhow::anyhow!(e))?]
    };
    let mut failed = false;
    for suite in suites {
        let outcome = run_suite(suite, args.count, args.seed)?;
        if let Some(failure) = &outcome.failure {
            failed = true;
            println!(
                "{}: {}/{} passed, FAILED",
                suite, outcome.passed, outcome.requested
            );
            println!("  {failure}");
        } else {
            println!("{}: {}/{} passed", suite, outcome.passed, outcome.requested);
        }
    }
    Ok(if failed {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}
