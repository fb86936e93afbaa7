//! Randomized verification suites for the exact inequalities.
//!
//! Every suite draws seeded random instances and checks an exact theorem with
//! zero tolerance; a single failure aborts the suite and carries a
//! reproducer (root seed, instance index, and full instance parameters).

use crate::bitset::BitSet;
use crate::bounds::{
    boolean_partition_upper_bound, influence_projection_check, uniform_cover_check,
};
use crate::constructions::product;
use crate::error::Result;
use crate::geometry::{CoordSet, GridGeometry};
use crate::measure::projection_volume;
use crate::partition::{ColorIndex, GridPartition};
use crate::rational::cells_fraction;
use crate::search::{full_projection_witness, SplitMix64};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    InfluenceProjection,
    UniformCover,
    SauerShelah,
    ProductFactorization,
    BooleanUpperBound,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::InfluenceProjection,
        Suite::UniformCover,
        Suite::SauerShelah,
        Suite::ProductFactorization,
        Suite::BooleanUpperBound,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::InfluenceProjection => "influence-projection",
            Suite::UniformCover => "uniform-cover",
            Suite::SauerShelah => "sauer-shelah",
            Suite::ProductFactorization => "product-factorization",
            Suite::BooleanUpperBound => "boolean-upper-bound",
        }
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Suite::ALL
            .iter()
            .copied()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Suite::ALL.iter().map(|s| s.name()).collect();
                format!("unknown suite '{s}', expected one of: {}", names.join(", "))
            })
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone)]
pub struct FailureReport {
    pub suite: Suite,
    pub instance: u32,
    pub seed: u64,
    pub description: String,
}

impl fmt::Display for FailureReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "suite {} failed at instance {} (rerun with --seed {} --count {}): {}",
            self.suite,
            self.instance,
            self.seed,
            self.instance + 1,
            self.description
        )
    }
}

#[derive(Debug, Clone)]
pub struct SuiteOutcome {
    pub suite: Suite,
    pub requested: u32,
    pub passed: u32,
    pub failure: Option<FailureReport>,
}

impl SuiteOutcome {
    pub fn ok(&self) -> bool {
        self.failure.is_none()
    }
}

/// Runs `count` random instances of one suite from a root seed.
pub fn run_suite(suite: Suite, count: u32, seed: u64) -> Result<SuiteOutcome> {
    let mut rng = SplitMix64::new(seed);
    let mut outcome = SuiteOutcome {
        suite,
        requested: count,
        passed: 0,
        failure: None,
    };
    for instance in 0..count {
        let verdict = match suite {
            Suite::InfluenceProjection => influence_projection_instance(&mut rng),
            Suite::UniformCover => uniform_cover_instance(&mut rng),
            Suite::SauerShelah => sauer_shelah_instance(&mut rng),
            Suite::ProductFactorization => product_factorization_instance(&mut rng),
            Suite::BooleanUpperBound => boolean_upper_bound_instance(&mut rng),
        }?;
        match verdict {
            None => outcome.passed += 1,
            Some(description) => {
                outcome.failure = Some(FailureReport {
                    suite,
                    instance,
                    seed,
                    description,
                });
                break;
            }
        }
    }
    Ok(outcome)
}

fn labels_string(p: &GridPartition) -> String {
    p.labels().iter().map(|l| l.to_string()).collect()
}

fn random_labels(rng: &mut SplitMix64, geometry: &GridGeometry, colors: u8) -> Result<GridPartition> {
    let labels = (0..geometry.cell_count())
        .map(|_| rng.next_below(colors as u64) as u8 + 1)
        .collect();
    GridPartition::new(geometry.clone(), colors, labels)
}

/// Random partition with n in 2..=4, N in 2..=3, c in 1..=3.
fn draw_partition(rng: &mut SplitMix64) -> Result<(GridPartition, u32, u32, u8)> {
    let n = 2 + rng.next_below(3) as u32;
    let resolution = 2 + rng.next_below(2) as u32;
    let colors = 1 + rng.next_below(3) as u8;
    let p = random_labels(rng, &GridGeometry::new(n, resolution)?, colors)?;
    Ok((p, n, resolution, colors))
}

/// Exact check `c * rho >= 1 + gamma` on a random partition and a random
/// nonempty proper coordinate set.
fn influence_projection_instance(rng: &mut SplitMix64) -> Result<Option<String>> {
    let (p, n, resolution, colors) = draw_partition(rng)?;
    let s = loop {
        let bits = rng.next_below(1u64 << n);
        if bits != 0 && bits != (1u64 << n) - 1 {
            break CoordSet::from_axes(
                &(0..n).filter(|&a| bits & (1 << a) != 0).collect::<Vec<_>>(),
            );
        }
    };
    let chk = influence_projection_check(&p, s)?;
    if chk.holds {
        Ok(None)
    } else {
        Ok(Some(format!(
            "c*rho = {} < 1 + gamma = {} (n={n} N={resolution} c={colors} S={s} labels={})",
            chk.c_rho,
            chk.one_plus_gamma,
            labels_string(&p)
        )))
    }
}

/// Exact check `|K|^k <= prod |K_A|` with D = all d-subsets and
/// k = C(n-1, d-1) on a random cell set.
fn uniform_cover_instance(rng: &mut SplitMix64) -> Result<Option<String>> {
    let n = 1 + rng.next_below(4) as u32;
    let resolution = 2 + rng.next_below(2) as u32;
    let d = 1 + rng.next_below(n as u64) as u32;
    let geometry = GridGeometry::new(n, resolution)?;
    let mut cells = BitSet::new(geometry.cell_count());
    for cell in 0..geometry.cell_count() {
        if rng.next_below(2) == 1 {
            cells.set(cell);
        }
    }
    let multiset: Vec<CoordSet> = CoordSet::subsets_of_size(n, d).collect();
    let k = binomial(n - 1, d - 1);
    let chk = uniform_cover_check(&geometry, &cells, &multiset, k)?;
    if chk.holds {
        Ok(None)
    } else {
        Ok(Some(format!(
            "|K|^{k} = {} > {} = product of projections (n={n} N={resolution} d={d} cells={:?})",
            chk.lhs,
            chk.rhs,
            cells.iter_ones().collect::<Vec<_>>()
        )))
    }
}

fn binomial(n: u32, k: u32) -> u32 {
    if k > n {
        return 0;
    }
    let mut acc = 1u64;
    for i in 0..k.min(n - k) {
        acc = acc * (n - i) as u64 / (i + 1) as u64;
    }
    acc as u32
}

/// For d <= floor(n/c) some part must have a full d-projection.
fn sauer_shelah_instance(rng: &mut SplitMix64) -> Result<Option<String>> {
    let n = 2 + rng.next_below(3) as u32;
    let colors = (1 + rng.next_below(3.min(n as u64))) as u8;
    let dmax = n / colors as u32; // >= 1 since c <= n
    let d = 1 + rng.next_below(dmax as u64) as u32;
    let resolution = 2 + rng.next_below(2) as u32;
    let p = random_labels(rng, &GridGeometry::new(n, resolution)?, colors)?;
    match full_projection_witness(&p, d)? {
        Some(_) => Ok(None),
        None => Ok(Some(format!(
            "no full {d}-projection found with n={n} N={resolution} c={colors} labels={}",
            labels_string(&p)
        ))),
    }
}

/// Exact factorization of product-partition projections:
/// dropping an axis of one factor projects that factor and leaves the other
/// whole.
fn product_factorization_instance(rng: &mut SplitMix64) -> Result<Option<String>> {
    let resolution = 2 + rng.next_below(2) as u32;
    let n1 = 1 + rng.next_below(2) as u32;
    let n2 = 1 + rng.next_below(2) as u32;
    let c1 = 1 + rng.next_below(2) as u8;
    let c2 = 1 + rng.next_below(2) as u8;
    let f1 = random_labels(rng, &GridGeometry::new(n1, resolution)?, c1)?;
    let f2 = random_labels(rng, &GridGeometry::new(n2, resolution)?, c2)?;
    let f = product(&f1, &f2)?;
    let n = n1 + n2;
    for a in 1..=c1 {
        for b in 1..=c2 {
            let pair = ColorIndex::new((a - 1) * c2 + b, f.colors())?;
            for axis in 0..n {
                let s = CoordSet::singleton(axis).complement(n);
                let lhs = projection_volume(&f, pair, s)?;
                let rhs = if axis < n1 {
                    let s1 = CoordSet::singleton(axis).complement(n1);
                    let vol2 = cells_fraction(
                        f2.labels().iter().filter(|&&l| l == b).count() as u64,
                        resolution,
                        n2,
                    );
                    if n1 == 1 {
                        // Projecting away the only axis of f1: the factor
                        // contributes 1 exactly when color a is nonempty.
                        let nonempty = f1.labels().contains(&a);
                        if nonempty {
                            vol2
                        } else {
                            cells_fraction(0, resolution, n2)
                        }
                    } else {
                        projection_volume(&f1, ColorIndex::new(a, c1)?, s1)? * vol2
                    }
                } else {
                    let axis2 = axis - n1;
                    let s2 = CoordSet::singleton(axis2).complement(n2);
                    let vol1 = cells_fraction(
                        f1.labels().iter().filter(|&&l| l == a).count() as u64,
                        resolution,
                        n1,
                    );
                    if n2 == 1 {
                        let nonempty = f2.labels().contains(&b);
                        if nonempty {
                            vol1
                        } else {
                            cells_fraction(0, resolution, n1)
                        }
                    } else {
                        vol1 * projection_volume(&f2, ColorIndex::new(b, c2)?, s2)?
                    }
                };
                if lhs != rhs {
                    return Ok(Some(format!(
                        "factorization broke at color ({a},{b}) axis {} : {lhs} != {rhs} \
                         (N={resolution} n1={n1} n2={n2} labels1={} labels2={})",
                        axis + 1,
                        labels_string(&f1),
                        labels_string(&f2)
                    )));
                }
            }
        }
    }
    Ok(None)
}

/// `mpv(f; n, n-1) <= (1/c)(1 + c*gamma/2 + c*eps)` on random boolean-cube
/// partitions.
fn boolean_upper_bound_instance(rng: &mut SplitMix64) -> Result<Option<String>> {
    let n = 2 + rng.next_below(3) as u32;
    let colors = 1 + rng.next_below(3) as u8;
    let p = random_labels(rng, &GridGeometry::new(n, 2)?, colors)?;
    let chk = boolean_partition_upper_bound(&p)?;
    if chk.holds {
        Ok(None)
    } else {
        Ok(Some(format!(
            "mpv {} exceeds bound {} (gamma={} eps={} n={n} c={colors} labels={})",
            chk.measured,
            chk.bound,
            chk.gamma,
            chk.epsilon,
            labels_string(&p)
        )))
    }
}
