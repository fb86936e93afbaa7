//! Acceptance suite: one test per shipping criterion, each printing a
//! PASS/FAIL line and enforcing its stated tolerance (exact unless noted)
//! and runtime budget. Run with `cargo test -p cubeshadows-cli --test
//! acceptance -- --nocapture` to see the lines.

use cubeshadows::bounds::{general_lower_bound_holds, iterated_ceiling, rho_2_1};
use cubeshadows::constructions::{
    adjust_to_balanced, majority, power, sauer_shelah_cover, tribes, GoldenRatioPartition,
};
use cubeshadows::geometry::CoordSet;
use cubeshadows::measure::{
    balance_deviation, evaluate, max_influence_k, mpv, projection_scan,
};
use cubeshadows::rational::{cells_fraction, rational, rational_pow, rational_to_f64, Rational};
use cubeshadows::search::{exhaustive_min_mpv, SearchOptions};
use cubeshadows::verify::{run_suite, Suite};
use num::{BigInt, One, Signed};
use std::time::{Duration, Instant};

fn pass(criterion: u32, detail: &str, elapsed: Duration, budget: Duration) {
    println!("ACCEPTANCE {criterion} PASS: {detail} [{elapsed:?}, budget {budget:?}]");
    assert!(
        elapsed < budget,
        "criterion {criterion} exceeded its runtime budget: {elapsed:?} >= {budget:?}"
    );
}

#[test]
fn criterion_1_majority_eval() {
    let t0 = Instant::now();
    let p = majority(3).unwrap();
    let report = evaluate(&p, 2, None).unwrap();
    assert_eq!(report.mpv, rational(3, 4));
    // Every entry of the projection table is 3/4 for this partition.
    assert!(report
        .projections
        .iter()
        .all(|(_, _, v)| *v == rational(3, 4)));
    pass(
        1,
        "majority n=3 eval reports mpv(d=2) = 3/4 exactly",
        t0.elapsed(),
        Duration::from_millis(100),
    );
}

#[test]
fn criterion_2_exhaustive_optimum() {
    let t0 = Instant::now();
    // Without pruning: literally all 256 colorings.
    let plain = exhaustive_min_mpv(
        3,
        2,
        2,
        2,
        SearchOptions {
            prune: false,
            ..Default::default()
        },
    )
    .unwrap();
    assert_eq!(plain.nodes, 256);
    assert!(plain.optimal);
    assert_eq!(plain.best, rational(3, 4));
    // With pruning: same minimum and witness.
    let pruned = exhaustive_min_mpv(3, 2, 2, 2, SearchOptions::default()).unwrap();
    assert_eq!(pruned.best, plain.best);
    assert_eq!(pruned.partition, plain.partition);
    // The witness achieves the value and matches the majority construction's
    // mpv.
    assert_eq!(mpv(&plain.partition, 2).unwrap().0, rational(3, 4));
    assert_eq!(mpv(&majority(3).unwrap(), 2).unwrap().0, plain.best);
    pass(
        2,
        "exhaustive minimum over all 256 colorings of the 2x2x2 grid is 3/4",
        t0.elapsed(),
        Duration::from_secs(1),
    );
}

#[test]
fn criterion_3_rho21_table() {
    let t0 = Instant::now();
    let expected: Vec<Rational> = [
        (1i64, 1i64),
        (1, 1),
        (2, 3),
        (1, 2),
        (1, 2),
        (1, 2),
        (3, 7),
        (3, 8),
        (1, 3),
        (1, 3),
        (1, 3),
        (1, 3),
        (4, 13),
        (4, 14),
        (4, 15),
    ]
    .iter()
    .map(|&(p, q)| rational(p, q))
    .collect();
    let rows = cubeshadows::report::rho21_table(1, 15);
    assert_eq!(rows.len(), 15);
    for (row, want) in rows.iter().zip(&expected) {
        assert_eq!(&row.value, want, "c = {}", row.colors);
        // Cross-check against the iterated ceiling for every row: the value
        // is achievable with c parts and nothing smaller is.
        assert!(row.crosscheck_ok, "c = {}", row.colors);
        let at = iterated_ceiling(&row.value.recip(), 2).unwrap();
        assert!(at <= BigInt::from(row.colors));
        assert_eq!(rho_2_1(row.colors), row.value);
    }
    let elapsed = t0.elapsed();

    // End to end through the binary (untimed: includes process startup).
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_cubeshadows"))
        .args(["table", "--kind", "rho21", "--c-min", "1", "--c-max", "15"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "c,num,den,decimal,ceiling_crosscheck"
    );
    for (line, want) in lines.zip(&expected) {
        let fields: Vec<&str> = line.split(',').collect();
        let got = rational(fields[1].parse().unwrap(), fields[2].parse().unwrap());
        assert_eq!(&got, want, "CSV row {line}");
        assert_eq!(fields[4], "ok");
    }

    pass(
        3,
        "rho_{2,1,c} table for c=1..15 matches the fifteen reference values \
         and cross-checks against the iterated ceiling",
        elapsed,
        Duration::from_millis(100),
    );
}

#[test]
fn criterion_4_product_of_majority() {
    let t0 = Instant::now();
    let m5 = majority(5).unwrap();
    let cube = power(&m5, 3).unwrap();
    assert_eq!(cube.geometry().dimension(), 15);
    assert_eq!(cube.colors(), 8);
    // Full scan over all 2^15 cells and all fifteen 14-subsets.
    let (measured, _, _) = mpv(&cube, 14).unwrap();
    assert_eq!(measured, rational(11, 64));
    // c * mpv = 11/8, strictly between the general lower bound and 2/c:
    // strict lower: (11/64)^15 * 8^14 > 1, strict upper: 11/64 < 2/8.
    let c_mpv = measured.clone() * BigInt::from(8);
    assert_eq!(c_mpv, rational(11, 8));
    let lower_strict = rational_pow(&measured, 15) * BigInt::from(8u64).pow(14);
    assert!(lower_strict > Rational::one());
    assert!(general_lower_bound_holds(&measured, 15, 14, 8));
    assert!(measured < rational(2, 8));
    pass(
        4,
        "(majority_5)^3 on n=15 has mpv(d=14) = 11/64 exactly, strictly \
         between the general lower bound and 2/c",
        t0.elapsed(),
        Duration::from_secs(2),
    );
}

#[test]
fn criterion_5_tribes_pipeline() {
    let t0 = Instant::now();
    let t = tribes(2, 2).unwrap();
    assert_eq!(
        t.part_volume(t.color(2).unwrap()).unwrap(),
        rational(7, 16)
    );
    let (gamma, _) = max_influence_k(&t, 1).unwrap();
    assert_eq!(gamma, rational(3, 8));
    let eps = balance_deviation(&t).unwrap();
    assert_eq!(eps, rational(1, 16));

    let adjusted = adjust_to_balanced(&t).unwrap();
    assert_eq!(balance_deviation(&adjusted).unwrap(), rational(0, 1));
    let (gamma_adjusted, _) = max_influence_k(&adjusted, 1).unwrap();
    let limit = gamma + rational(2, 1) * eps; // 3/8 + 2/16
    assert!(gamma_adjusted <= limit);
    pass(
        5,
        "tribes(2,2): part volume 7/16, max influence 3/8; adjusted version \
         is exactly balanced with max influence <= 3/8 + 2/16",
        t0.elapsed(),
        Duration::from_secs(1),
    );
}

#[test]
fn criterion_6_property_suites() {
    let t0 = Instant::now();
    const SEED: u64 = 0x00C0_FFEE;
    const COUNT: u32 = 500;
    for suite in Suite::ALL {
        let outcome = run_suite(suite, COUNT, SEED).unwrap();
        assert!(
            outcome.ok(),
            "suite {suite} failed: {}",
            outcome.failure.unwrap()
        );
        assert_eq!(outcome.passed, COUNT);
    }
    pass(
        6,
        "all five randomized suites pass 500/500 seeded instances with zero \
         tolerance",
        t0.elapsed(),
        Duration::from_secs(30),
    );
}

#[test]
fn criterion_7_sauer_shelah_converse_cover() {
    let t0 = Instant::now();
    let cover = sauer_shelah_cover(3, 2, 2).unwrap();
    let subsets: Vec<CoordSet> = CoordSet::subsets_of_size(3, 2).collect();
    let scan = projection_scan(&cover, &subsets).unwrap();
    // Every 2-dimensional projection of every part is exactly
    // 3/4 = 1 - (1/c)^d.
    let want = Rational::one() - rational(1, 4);
    for per_part in &scan.counts {
        for &count in per_part {
            assert_eq!(cells_fraction(count, 2, 2), want);
        }
    }
    pass(
        7,
        "slab cover at n=3, c=2 has every 2-projection of every part \
         exactly 3/4 = 1 - (1/c)^2",
        t0.elapsed(),
        Duration::from_secs(1),
    );
}

#[test]
fn criterion_8_golden_ratio_grid_stability() {
    let t0 = Instant::now();
    let coarse = GoldenRatioPartition::new(610).unwrap();
    let fine = GoldenRatioPartition::new(1220).unwrap();
    let report_coarse = evaluate(&coarse, 2, None).unwrap();
    let report_coarse_again = evaluate(&coarse, 2, None).unwrap();
    // Deterministic: identical reports on repeated evaluation.
    assert_eq!(report_coarse.projections, report_coarse_again.projections);
    assert_eq!(report_coarse.mpv, report_coarse_again.mpv);

    let report_fine = evaluate(&fine, 2, None).unwrap();
    // Grid-refinement stability: matching projection entries agree within
    // 6/N (they are exactly equal here because the thresholds are shared).
    let tolerance = rational(6, 610);
    assert_eq!(report_coarse.projections.len(), report_fine.projections.len());
    for ((c1, s1, v1), (c2, s2, v2)) in report_coarse
        .projections
        .iter()
        .zip(&report_fine.projections)
    {
        assert_eq!((c1, s1), (c2, s2));
        assert!(
            (v1.clone() - v2.clone()).abs() <= tolerance,
            "projection {c1}:{s1} moved by more than 6/N between grids"
        );
    }

    let claimed = (5f64.sqrt() - 1.0) / 2.0;
    let measured = rational_to_f64(&report_coarse.mpv);
    println!(
        "  golden-ratio diagnostic: measured mpv(d=2) = {} ~= {:.6}; \
         reference claim 1/phi ~= {claimed:.6} (reported, not asserted)",
        report_coarse.mpv, measured
    );
    pass(
        8,
        "golden-ratio eval is deterministic and stable under grid refinement \
         610 -> 1220; reference value printed alongside measurement",
        t0.elapsed(),
        Duration::from_secs(5),
    );
}
