//! Computable lower/upper bounds and exact inequality checkers.
//!
//! Checks with fractional exponents are recast as integer-exponent rational
//! comparisons (both sides raised to the n-th power), so every verdict is
//! exact. Decimal values are for display only.

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::geometry::{CoordSet, GridGeometry};
use crate::measure::{
    self, influence, max_influence_k, mpv, projection_scan, CellSetPart, PartFamily,
};
use crate::partition::GridPartition;
use crate::rational::{
    cells_fraction, rational, rational_ceil, rational_pow, Rational,
};
use num::bigint::BigInt;
use num::{One, Signed, ToPrimitive, Zero};

/// `(1/c)^(d/n)` with its first-order floor `1 - d ln(c) / n`.
#[derive(Debug, Clone, Copy)]
pub struct GeneralLowerBound {
    pub value: f64,
    pub taylor_floor: f64,
}

pub fn general_lower_bound(n: u32, d: u32, c: u64) -> Result<GeneralLowerBound> {
    if n == 0 || d == 0 || d > n || c == 0 {
        return Err(Error::BadParams(format!(
            "need 1 <= d <= n and c >= 1, got n={n} d={d} c={c}"
        )));
    }
    let exponent = d as f64 / n as f64;
    Ok(GeneralLowerBound {
        value: (1.0 / c as f64).powf(exponent),
        taylor_floor: 1.0 - exponent * (c as f64).ln(),
    })
}

/// Exact form of the general lower bound: `mpv^n >= (1/c)^d`.
pub fn general_lower_bound_holds(measured_mpv: &Rational, n: u32, d: u32, c: u64) -> bool {
    let lhs = rational_pow(measured_mpv, n) * BigInt::from(c).pow(d);
    lhs >= Rational::one()
}

/// Both sides of an exact inequality check, with an optional witness subset.
#[derive(Debug, Clone)]
pub struct InequalityCheck {
    pub lhs: Rational,
    pub rhs: Rational,
    pub holds: bool,
    pub witness: Option<CoordSet>,
}

/// Verifies `|K|^k <= prod_{A in D} |K_A|` for a cell set `K` and a multiset
/// `D` of coordinate sets covering every axis exactly `k` times.
pub fn uniform_cover_check(
    geometry: &GridGeometry,
    cells: &BitSet,
    multiset: &[CoordSet],
    k: u32,
) -> Result<InequalityCheck> {
    let n = geometry.dimension();
    for a in 0..n {
        let count = multiset.iter().filter(|s| s.contains(a)).count() as u32;
        if count != k {
            return Err(Error::NotUniformCover {
                coord: a + 1,
                count,
                expected: k,
            });
        }
    }
    let family = CellSetPart { geometry, cells };
    let scan = projection_scan(&family, multiset)?;
    let volume = cells_fraction(cells.count_ones(), geometry.resolution(), n);
    let lhs = rational_pow(&volume, k);
    let mut rhs = Rational::one();
    for (j, s) in multiset.iter().enumerate() {
        rhs *= cells_fraction(scan.counts[j][0], geometry.resolution(), s.len());
    }
    let holds = lhs <= rhs;
    Ok(InequalityCheck {
        lhs,
        rhs,
        holds,
        witness: None,
    })
}

/// Verifies `max_A |K_A|^n >= |K|^d` over all size-`d` subsets, returning the
/// maximizing subset.
pub fn volume_projection_floor(
    geometry: &GridGeometry,
    cells: &BitSet,
    d: u32,
) -> Result<InequalityCheck> {
    let n = geometry.dimension();
    if d == 0 || d > n {
        return Err(Error::BadDimension { d, n });
    }
    let family = CellSetPart { geometry, cells };
    let (max_proj, _, witness) = mpv(&family, d)?;
    let volume = cells_fraction(cells.count_ones(), geometry.resolution(), n);
    let lhs = rational_pow(&max_proj, n);
    let rhs = rational_pow(&volume, d);
    Ok(InequalityCheck {
        holds: lhs >= rhs,
        lhs,
        rhs,
        witness: Some(witness),
    })
}

/// The iterated ceiling `ceil(x)^(i) = ceil(x * ceil(x)^(i-1))` with
/// `ceil(x)^(0) = 1`, computed in exact rational arithmetic.
pub fn iterated_ceiling(x: &Rational, n: u32) -> Result<BigInt> {
    if x < &Rational::one() {
        return Err(Error::BadParams(format!("iterated ceiling needs x >= 1, got {x}")));
    }
    let mut acc = BigInt::one();
    for _ in 0..n {
        acc = rational_ceil(&(x * Rational::from(acc)));
    }
    Ok(acc)
}

/// Least achievable one-dimensional max projection volume for `c` parts in
/// the plane: `min over q in 1..=c of max(q/c, 1/q)`.
pub fn rho_2_1(c: u64) -> Rational {
    assert!(c >= 1);
    (1..=c)
        .map(|q| {
            let a = rational(q as i64, c as i64);
            let b = rational(1, q as i64);
            if a > b {
                a
            } else {
                b
            }
        })
        .min()
        .unwrap()
}

/// Both sides of `c * rho >= 1 + gamma` where `rho` is the largest
/// `S`-projection of any part and `gamma` the influence of the complement.
#[derive(Debug, Clone)]
pub struct InfluenceProjectionCheck {
    pub c_rho: Rational,
    pub one_plus_gamma: Rational,
    pub holds: bool,
}

pub fn influence_projection_check<F: PartFamily>(
    family: &F,
    s: CoordSet,
) -> Result<InfluenceProjectionCheck> {
    let geometry = family.geometry();
    let n = geometry.dimension();
    if s.is_empty() {
        return Err(Error::EmptyCoordSet);
    }
    if s == CoordSet::full(n) {
        return Err(Error::FullCoordSet);
    }
    geometry.check_axes(s)?;
    let scan = projection_scan(family, &[s])?;
    let rho_count = *scan.counts[0].iter().max().expect("at least one part");
    let rho = cells_fraction(rho_count, geometry.resolution(), s.len());
    let gamma = influence(family, s.complement(n))?;
    let c_rho = rho * BigInt::from(family.part_count() as u64);
    let one_plus_gamma = gamma + Rational::one();
    Ok(InfluenceProjectionCheck {
        holds: c_rho >= one_plus_gamma,
        c_rho,
        one_plus_gamma,
    })
}

/// `mpv(f; n, n-1) <= (1/c)(1 + c*gamma/2 + c*eps)` for boolean-cube
/// partitions, with every quantity measured exactly.
#[derive(Debug, Clone)]
pub struct BooleanUpperBoundCheck {
    pub gamma: Rational,
    pub epsilon: Rational,
    pub bound: Rational,
    pub measured: Rational,
    pub holds: bool,
}

pub fn boolean_partition_upper_bound(partition: &GridPartition) -> Result<BooleanUpperBoundCheck> {
    let geometry = partition.geometry();
    if geometry.resolution() != 2 {
        return Err(Error::NotBooleanGrid {
            resolution: geometry.resolution(),
        });
    }
    let n = geometry.dimension();
    let c = partition.colors() as i64;
    let gamma = if n >= 2 {
        max_influence_k(partition, 1)?.0
    } else {
        // One axis: the single coordinate is the whole coordinate set, and a
        // two-cell grid is pivotal exactly when the labels differ.
        if partition.labels()[0] != partition.labels()[1] {
            Rational::one()
        } else {
            Rational::zero()
        }
    };
    let epsilon = measure::balance_deviation(partition)?;
    let bound = rational(1, c)
        * (Rational::one()
            + gamma.clone() * rational(c, 2)
            + epsilon.clone() * BigInt::from(c));
    let measured = if n >= 2 {
        mpv(partition, n - 1)?.0
    } else {
        mpv(partition, 1)?.0
    };
    Ok(BooleanUpperBoundCheck {
        holds: measured <= bound,
        gamma,
        epsilon,
        bound,
        measured,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogBase {
    Two,
    Natural,
}

/// Diagnostic threshold for the conjectured excess at `c = 2^(b n)`:
/// `(1/c)(1 + delta * b * log(1/b))`. Exact when the log is rational in the
/// chosen base; decimal otherwise.
#[derive(Debug, Clone)]
pub struct ConjectureThreshold {
    pub colors_exponent: u32,
    pub colors: u64,
    pub threshold_exact: Option<Rational>,
    pub threshold_approx: f64,
    pub excess_term_approx: f64,
}

pub fn conjecture_j_threshold(
    b: &Rational,
    n: u32,
    delta: &Rational,
    log_base: LogBase,
) -> Result<ConjectureThreshold> {
    if b <= &Rational::zero() || b >= &Rational::one() {
        return Err(Error::BadParams(format!("need 0 < b < 1, got {b}")));
    }
    if delta.is_negative() {
        return Err(Error::BadParams("delta must be >= 0".into()));
    }
    if n == 0 {
        return Err(Error::BadParams("n must be >= 1".into()));
    }
    // c = 2^(b n) with the exponent rounded to the nearest integer, ties up.
    let exponent_rounded = ((b * BigInt::from(n)) + rational(1, 2)).floor().to_integer();
    let colors_exponent = exponent_rounded
        .to_u32()
        .filter(|&e| e <= 62)
        .ok_or_else(|| Error::BadParams("rounded exponent b*n out of range".into()))?;
    let colors = 1u64 << colors_exponent;

    let inv_b = b.recip();
    let log_exact = match log_base {
        LogBase::Two => exact_log2(&inv_b),
        LogBase::Natural => None,
    };
    let log_approx = {
        let v = inv_b.to_f64().unwrap_or(f64::NAN).ln();
        match log_base {
            LogBase::Two => v / std::f64::consts::LN_2,
            LogBase::Natural => v,
        }
    };
    let b_f = b.to_f64().unwrap_or(f64::NAN);
    let delta_f = delta.to_f64().unwrap_or(f64::NAN);
    let excess_term_approx = b_f * log_approx;
    let threshold_exact = if delta.is_zero() {
        Some(rational(1, colors as i64))
    } else {
        log_exact.map(|lg| {
            rational(1, colors as i64)
                * (Rational::one() + delta * b * Rational::from(BigInt::from(lg)))
        })
    };
    Ok(ConjectureThreshold {
        colors_exponent,
        colors,
        threshold_exact,
        threshold_approx: (1.0 + delta_f * excess_term_approx) / colors as f64,
        excess_term_approx,
    })
}

/// `log2(r)` when `r` is an exact power of two, else `None`.
fn exact_log2(r: &Rational) -> Option<u64> {
    if !r.denom().is_one() {
        return None;
    }
    let n = r.numer().to_u64()?;
    if n.is_power_of_two() {
        Some(n.trailing_zeros() as u64)
    } else {
        None
    }
}

/// Advisory text for the influence-based asymptotic lower bound at `c = 2`,
/// `d = n - 1`; the constants are unspecified, so it is never a pass/fail
/// check.
pub fn asymptotic_advisory(n: u32, d: u32, c: u64) -> Option<String> {
    if c == 2 && n >= 2 && d == n - 1 {
        Some(format!(
            "advisory: for c=2, d=n-1 the influence-based bound gives \
             rho >= 1/2 (1 + Omega(log n / n)); at n={n} the asymptotic \
             constant is unspecified, so no pass/fail check is made"
        ))
    } else {
        None
    }
}
