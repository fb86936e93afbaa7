//! Exact measurement of projection volumes, influences, and balance.
//!
//! Everything here is a pure read over an immutable part family. Projection
//! scans mark one bitmap per (part, coordinate set) while walking the grid in
//! row-major run-length order; results are exact rationals and bit-identical
//! regardless of thread count (the only parallel reduction is bitmap union).

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::geometry::{CoordSet, GridGeometry};
use crate::partition::{ColorIndex, GridCover, GridPartition};
use crate::rational::{cells_fraction, Rational};
use num::Zero;
use rayon::prelude::*;
use std::ops::Range;

/// Cap on total bitmap bits allocated by a single projection scan (1 GiB).
const SCAN_BIT_CAP: u128 = 1 << 33;

/// A family of parts over a common grid: a partition, a cover, or a
/// procedurally labeled partition too large to materialize.
///
/// Implementations enumerate (cell, part) incidences as runs of consecutive
/// cells that never cross a last-axis row boundary, with non-decreasing run
/// starts. For partitions the runs are maximal label runs; covers may emit
/// several single-cell runs per cell.
pub trait PartFamily: Sync {
    fn geometry(&self) -> &GridGeometry;

    fn part_count(&self) -> usize;

    fn for_each_run_in<V: FnMut(u64, u64, usize)>(&self, range: Range<u64>, visit: V);
}

impl PartFamily for GridPartition {
    fn geometry(&self) -> &GridGeometry {
        self.geometry()
    }

    fn part_count(&self) -> usize {
        self.colors() as usize
    }

    fn for_each_run_in<V: FnMut(u64, u64, usize)>(&self, range: Range<u64>, mut visit: V) {
        let res = self.geometry().resolution() as u64;
        let labels = self.labels();
        let mut i = range.start;
        while i < range.end {
            let row_end = ((i / res) + 1) * res;
            let stop = row_end.min(range.end);
            while i < stop {
                let l = labels[i as usize];
                let mut j = i + 1;
                while j < stop && labels[j as usize] == l {
                    j += 1;
                }
                visit(i, j - i, l as usize - 1);
                i = j;
            }
        }
    }
}

impl PartFamily for GridCover {
    fn geometry(&self) -> &GridGeometry {
        self.geometry()
    }

    fn part_count(&self) -> usize {
        self.part_count()
    }

    fn for_each_run_in<V: FnMut(u64, u64, usize)>(&self, range: Range<u64>, mut visit: V) {
        for cell in range {
            for (p, part) in self.parts().iter().enumerate() {
                if part.get(cell) {
                    visit(cell, 1, p);
                }
            }
        }
    }
}

/// A single cell set viewed as a one-part family, for bound checks on
/// arbitrary bodies.
pub struct CellSetPart<'a> {
    pub geometry: &'a GridGeometry,
    pub cells: &'a BitSet,
}

impl PartFamily for CellSetPart<'_> {
    fn geometry(&self) -> &GridGeometry {
        self.geometry
    }

    fn part_count(&self) -> usize {
        1
    }

    fn for_each_run_in<V: FnMut(u64, u64, usize)>(&self, range: Range<u64>, mut visit: V) {
        // Emit maximal membership runs within rows.
        let res = self.geometry.resolution() as u64;
        let mut i = range.start;
        while i < range.end {
            let stop = (((i / res) + 1) * res).min(range.end);
            while i < stop {
                if self.cells.get(i) {
                    let mut j = i + 1;
                    while j < stop && self.cells.get(j) {
                        j += 1;
                    }
                    visit(i, j - i, 0);
                    i = j;
                } else {
                    i += 1;
                }
            }
        }
    }
}

struct SubsetPlan {
    proj_len: u64,
    contains_last_axis: bool,
    /// Row-major stride contributed by each axis `0..n-1` (0 if absent).
    stride_by_axis: Vec<u64>,
}

fn plan_subset(geometry: &GridGeometry, s: CoordSet) -> Result<SubsetPlan> {
    if s.is_empty() {
        return Err(Error::EmptyCoordSet);
    }
    geometry.check_axes(s)?;
    let n = geometry.dimension();
    let d = s.len();
    let res = geometry.resolution() as u64;
    let mut stride_by_axis = vec![0u64; n as usize];
    for (k, a) in s.axes().enumerate() {
        stride_by_axis[a as usize] = res.pow(d - 1 - k as u32);
    }
    Ok(SubsetPlan {
        proj_len: geometry.projected_cells(d),
        contains_last_axis: s.contains(n - 1),
        stride_by_axis,
    })
}

/// Counts of occupied projected cells, per subset and per part, plus the raw
/// cell count of each part.
pub struct ProjectionCounts {
    pub subsets: Vec<CoordSet>,
    /// `counts[j][p]` = occupied cells of subset `j`'s grid for part `p`.
    pub counts: Vec<Vec<u64>>,
    /// `proj_len[j]` = total cells of subset `j`'s grid.
    pub proj_len: Vec<u64>,
    pub part_cells: Vec<u64>,
}

struct ScanAcc {
    bitmaps: Vec<Vec<BitSet>>,
    part_cells: Vec<u64>,
    bases: Vec<u64>,
    digits: Vec<u32>,
}

/// One pass over the grid marking every requested projection at once.
pub fn projection_scan<F: PartFamily>(family: &F, subsets: &[CoordSet]) -> Result<ProjectionCounts> {
    let geometry = family.geometry();
    let parts = family.part_count();
    let plans: Vec<SubsetPlan> = subsets
        .iter()
        .map(|&s| plan_subset(geometry, s))
        .collect::<Result<_>>()?;

    let bits_needed: u128 = plans
        .iter()
        .map(|p| p.proj_len as u128 * parts as u128)
        .sum();
    if bits_needed > SCAN_BIT_CAP {
        return Err(Error::ScanTooLarge {
            bits: bits_needed,
            cap: SCAN_BIT_CAP,
        });
    }

    let n = geometry.dimension();
    let res = geometry.resolution() as u64;
    let rows = geometry.cell_count() / res;

    let make_acc = || ScanAcc {
        bitmaps: plans
            .iter()
            .map(|p| (0..parts).map(|_| BitSet::new(p.proj_len)).collect())
            .collect(),
        part_cells: vec![0u64; parts],
        bases: vec![0u64; plans.len()],
        digits: vec![0u32; n as usize - 1],
    };

    let scan_row = |acc: &mut ScanAcc, row: u64| {
        geometry_decompose_prefix(res, &mut acc.digits, row);
        for (j, plan) in plans.iter().enumerate() {
            let mut base = 0u64;
            for (a, &dg) in acc.digits.iter().enumerate() {
                base += plan.stride_by_axis[a] * dg as u64;
            }
            acc.bases[j] = base;
        }
        let row_start = row * res;
        let (bitmaps, part_cells, bases) = (&mut acc.bitmaps, &mut acc.part_cells, &acc.bases);
        family.for_each_run_in(row_start..row_start + res, |start, len, part| {
            let z = start - row_start;
            part_cells[part] += len;
            for (j, plan) in plans.iter().enumerate() {
                let bm = &mut bitmaps[j][part];
                if plan.contains_last_axis {
                    bm.set_range(bases[j] + z, len);
                } else {
                    bm.set(bases[j]);
                }
            }
        });
    };

    let merge = |mut a: ScanAcc, b: ScanAcc| {
        for (ja, jb) in a.bitmaps.iter_mut().zip(&b.bitmaps) {
            for (pa, pb) in ja.iter_mut().zip(jb) {
                pa.or_assign(pb);
            }
        }
        for (ca, cb) in a.part_cells.iter_mut().zip(&b.part_cells) {
            *ca += cb;
        }
        a
    };

    let acc = (0..usize::try_from(rows).expect("row count fits the address space"))
        .into_par_iter()
        .with_min_len(4096)
        .fold(make_acc, |mut acc, row| {
            scan_row(&mut acc, row as u64);
            acc
        })
        .reduce(make_acc, merge);

    Ok(ProjectionCounts {
        subsets: subsets.to_vec(),
        counts: acc
            .bitmaps
            .iter()
            .map(|per_part| per_part.iter().map(|b| b.count_ones()).collect())
            .collect(),
        proj_len: plans.iter().map(|p| p.proj_len).collect(),
        part_cells: acc.part_cells,
    })
}

fn geometry_decompose_prefix(res: u64, digits: &mut [u32], mut row: u64) {
    for a in (0..digits.len()).rev() {
        digits[a] = (row % res) as u32;
        row /= res;
    }
}

/// Exact fraction of the `S`-grid above which `color` appears.
pub fn projection_volume<F: PartFamily>(family: &F, color: ColorIndex, s: CoordSet) -> Result<Rational> {
    let parts = family.part_count();
    if color.part() >= parts {
        return Err(Error::BadColor {
            color: color.get(),
            colors: parts as u8,
        });
    }
    let scan = projection_scan(family, &[s])?;
    Ok(cells_fraction(
        scan.counts[0][color.part()],
        family.geometry().resolution(),
        s.len(),
    ))
}

/// Maximum `d`-dimensional projection volume over all parts and all size-`d`
/// coordinate sets, with the lexicographically first `(color, S)` maximizer.
/// `d = n` is allowed and yields the maximum part volume.
pub fn mpv<F: PartFamily>(family: &F, d: u32) -> Result<(Rational, ColorIndex, CoordSet)> {
    let n = family.geometry().dimension();
    if d == 0 || d > n {
        return Err(Error::BadDimension { d, n });
    }
    let subsets: Vec<CoordSet> = CoordSet::subsets_of_size(n, d).collect();
    let scan = projection_scan(family, &subsets)?;
    let (count, color, s) = max_projection(&scan);
    Ok((
        cells_fraction(count, family.geometry().resolution(), d),
        color,
        s,
    ))
}

/// Picks the maximum count with ties broken by smallest `(color, S)`.
pub(crate) fn max_projection(scan: &ProjectionCounts) -> (u64, ColorIndex, CoordSet) {
    let parts = scan.part_cells.len();
    let mut best: Option<(u64, usize, usize)> = None;
    for p in 0..parts {
        for (j, per_part) in scan.counts.iter().enumerate() {
            let v = per_part[p];
            let better = match best {
                None => true,
                Some((bv, bp, bj)) => {
                    v > bv || (v == bv && (p, &scan.subsets[j]) < (bp, &scan.subsets[bj]))
                }
            };
            if better {
                best = Some((v, p, j));
            }
        }
    }
    let (v, p, j) = best.expect("at least one part and one subset");
    (v, ColorIndex::from_label(p as u8 + 1), scan.subsets[j])
}

/// The set of colors above a projected cell: colors with some preimage cell
/// agreeing with `s_coords` on the axes of `s`.
pub fn colors_above(
    partition: &GridPartition,
    s: CoordSet,
    s_coords: &[u32],
) -> Result<Vec<ColorIndex>> {
    let geometry = partition.geometry();
    if s.is_empty() {
        return Err(Error::EmptyCoordSet);
    }
    geometry.check_axes(s)?;
    if s_coords.len() != s.len() as usize
        || s_coords.iter().any(|&c| c >= geometry.resolution())
    {
        return Err(Error::BadCell {
            coords: s_coords.to_vec(),
        });
    }
    let n = geometry.dimension();
    let base: u64 = s
        .axes()
        .zip(s_coords)
        .map(|(a, &c)| geometry.stride(a) * c as u64)
        .sum();
    let free: Vec<u32> = s.complement(n).axes().collect();
    let mut seen = vec![false; partition.colors() as usize];
    let mut assignment = vec![0u32; free.len()];
    loop {
        let cell = base
            + free
                .iter()
                .zip(&assignment)
                .map(|(&a, &v)| geometry.stride(a) * v as u64)
                .sum::<u64>();
        seen[partition.label(cell).part()] = true;
        // Odometer over the free axes.
        let mut k = free.len();
        loop {
            if k == 0 {
                let out = seen
                    .iter()
                    .enumerate()
                    .filter(|(_, &s)| s)
                    .map(|(i, _)| ColorIndex::from_label(i as u8 + 1))
                    .collect();
                return Ok(out);
            }
            k -= 1;
            assignment[k] += 1;
            if assignment[k] < geometry.resolution() {
                break;
            }
            assignment[k] = 0;
        }
    }
}

const MULTI: u16 = u16::MAX;

/// Influence of a coalition `S`: the fraction of cells of the grid on the
/// complementary axes above which more than one color appears.
pub fn influence<F: PartFamily>(family: &F, coalition: CoordSet) -> Result<Rational> {
    let geometry = family.geometry();
    let n = geometry.dimension();
    if coalition.is_empty() {
        return Err(Error::EmptyCoordSet);
    }
    geometry.check_axes(coalition)?;
    if coalition == CoordSet::full(n) {
        return Err(Error::FullCoordSet);
    }
    let observed = coalition.complement(n);
    let counts = above_multiplicity(family, observed)?;
    let multi = counts.iter().filter(|&&s| s == MULTI).count() as u64;
    Ok(cells_fraction(
        multi,
        geometry.resolution(),
        observed.len(),
    ))
}

/// Per projected cell on `observed`: 0 if no color above (impossible for
/// covers), `color` if exactly one, `MULTI` if at least two.
fn above_multiplicity<F: PartFamily>(family: &F, observed: CoordSet) -> Result<Vec<u16>> {
    let geometry = family.geometry();
    let plan = plan_subset(geometry, observed)?;
    let entries = plan.proj_len;
    if entries as u128 * 2 > SCAN_BIT_CAP / 8 {
        return Err(Error::ScanTooLarge {
            bits: entries as u128 * 16,
            cap: SCAN_BIT_CAP,
        });
    }
    let mut state = vec![0u16; entries as usize];
    let n = geometry.dimension();
    let res = geometry.resolution() as u64;
    let rows = geometry.cell_count() / res;
    let mut digits = vec![0u32; n as usize - 1];
    for row in 0..rows {
        geometry_decompose_prefix(res, &mut digits, row);
        let mut base = 0u64;
        for (a, &dg) in digits.iter().enumerate() {
            base += plan.stride_by_axis[a] * dg as u64;
        }
        let row_start = row * res;
        family.for_each_run_in(row_start..row_start + res, |start, len, part| {
            let tag = part as u16 + 1;
            if plan.contains_last_axis {
                let z = start - row_start;
                for slot in &mut state[(base + z) as usize..(base + z + len) as usize] {
                    combine_above(slot, tag);
                }
            } else {
                combine_above(&mut state[base as usize], tag);
            }
        });
    }
    Ok(state)
}

#[inline]
fn combine_above(slot: &mut u16, tag: u16) {
    if *slot == 0 {
        *slot = tag;
    } else if *slot != tag {
        *slot = MULTI;
    }
}

/// Maximum influence over all coalitions of size `k`, with the
/// lexicographically first witness.
pub fn max_influence_k<F: PartFamily>(family: &F, k: u32) -> Result<(Rational, CoordSet)> {
    let n = family.geometry().dimension();
    if k == 0 || k >= n {
        return Err(Error::BadCoalitionSize {
            k,
            max: n.saturating_sub(1),
        });
    }
    let mut best: Option<(Rational, CoordSet)> = None;
    for s in CoordSet::subsets_of_size(n, k) {
        let inf = influence(family, s)?;
        let better = match &best {
            None => true,
            Some((bv, _)) => inf > *bv,
        };
        if better {
            best = Some((inf, s));
        }
    }
    Ok(best.expect("n >= 2 implies at least one coalition"))
}

/// Smallest `eps` such that every part volume lies in `[1/c - eps, 1/c + eps]`.
pub fn balance_deviation<F: PartFamily>(family: &F) -> Result<Rational> {
    let geometry = family.geometry();
    let parts = family.part_count() as u64;
    let counts = part_cell_counts(family);
    let target = Rational::new(1.into(), (parts as i64).into());
    let mut worst = Rational::zero();
    for c in counts {
        let vol = cells_fraction(c, geometry.resolution(), geometry.dimension());
        let dev = if vol >= target {
            vol - target.clone()
        } else {
            target.clone() - vol
        };
        if dev > worst {
            worst = dev;
        }
    }
    Ok(worst)
}

pub fn part_cell_counts<F: PartFamily>(family: &F) -> Vec<u64> {
    let mut counts = vec![0u64; family.part_count()];
    family.for_each_run_in(0..family.geometry().cell_count(), |_, len, part| {
        counts[part] += len;
    });
    counts
}

/// Everything `eval` reports about one family at one projection dimension.
#[derive(Debug, Clone)]
pub struct EvalReport {
    pub dimension: u32,
    pub resolution: u32,
    pub colors: u8,
    pub d: u32,
    pub part_volumes: Vec<(ColorIndex, Rational)>,
    /// Rows ordered by (color, S).
    pub projections: Vec<(ColorIndex, CoordSet, Rational)>,
    pub mpv: Rational,
    pub witness: (ColorIndex, CoordSet),
    pub balance_deviation: Rational,
    pub influence: Option<InfluenceTable>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct InfluenceTable {
    pub k: u32,
    pub rows: Vec<(CoordSet, Rational)>,
    pub max: Rational,
    pub witness: CoordSet,
}

/// Full evaluation: projection table, mpv with witness, balance, and an
/// optional influence table for coalitions of size `influence_k`.
pub fn evaluate<F: PartFamily>(family: &F, d: u32, influence_k: Option<u32>) -> Result<EvalReport> {
    let geometry = family.geometry();
    let n = geometry.dimension();
    if d == 0 || d > n {
        return Err(Error::BadDimension { d, n });
    }
    let res = geometry.resolution();
    let subsets: Vec<CoordSet> = CoordSet::subsets_of_size(n, d).collect();
    let scan = projection_scan(family, &subsets)?;
    let (best_count, color, witness_s) = max_projection(&scan);

    let part_volumes: Vec<(ColorIndex, Rational)> = scan
        .part_cells
        .iter()
        .enumerate()
        .map(|(p, &c)| (ColorIndex::from_label(p as u8 + 1), cells_fraction(c, res, n)))
        .collect();

    let mut projections = Vec::with_capacity(scan.counts.len() * family.part_count());
    for p in 0..family.part_count() {
        for (j, s) in scan.subsets.iter().enumerate() {
            projections.push((
                ColorIndex::from_label(p as u8 + 1),
                *s,
                cells_fraction(scan.counts[j][p], res, d),
            ));
        }
    }

    let influence_table = match influence_k {
        None => None,
        Some(k) => {
            if k == 0 || k >= n {
                return Err(Error::BadCoalitionSize {
                    k,
                    max: n.saturating_sub(1),
                });
            }
            let mut rows = Vec::new();
            let mut best: Option<(Rational, CoordSet)> = None;
            for s in CoordSet::subsets_of_size(n, k) {
                let v = influence(family, s)?;
                if best.as_ref().is_none_or(|(bv, _)| v > *bv) {
                    best = Some((v.clone(), s));
                }
                rows.push((s, v));
            }
            let (max, witness) = best.expect("k < n implies at least one coalition");
            Some(InfluenceTable {
                k,
                rows,
                max,
                witness,
            })
        }
    };

    Ok(EvalReport {
        dimension: n,
        resolution: res,
        colors: family.part_count() as u8,
        d,
        part_volumes,
        projections,
        mpv: cells_fraction(best_count, res, d),
        witness: (color, witness_s),
        balance_deviation: balance_deviation(family)?,
        influence: influence_table,
        notes: Vec::new(),
    })
}
