//! Grid-exact partition and cover constructions.
//!
//! Every constructor validates its output through the ordinary
//! `GridPartition` / `GridCover` paths, so the partition and cover invariants
//! hold by construction.

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::geometry::GridGeometry;
use crate::measure::PartFamily;
use crate::partition::{ColorIndex, GridCover, GridPartition};
use crate::rational::isqrt_u64;
use std::ops::Range;

/// Majority on `n` boolean inputs: color 2 where the input weight exceeds
/// `n/2`, color 1 where it is below. For even `n`, tie cells take color
/// `1 + x_1`, which keeps the output exactly balanced for every `n`.
pub fn majority(n: u32) -> Result<GridPartition> {
    let geometry = GridGeometry::new(n, 2)?;
    let labels = (0..geometry.cell_count())
        .map(|cell| {
            let weight = 2 * cell.count_ones();
            if weight > n {
                2
            } else if weight < n {
                1
            } else {
                // Tie: axis 0 is the most significant bit of the cell index.
                1 + (cell >> (n - 1)) as u8
            }
        })
        .collect();
    GridPartition::new(geometry, 2, labels)
}

/// Tribes with `tribe_count` tribes of `width` inputs each: color 2 exactly
/// when some tribe is unanimously 1.
pub fn tribes(width: u32, tribe_count: u32) -> Result<GridPartition> {
    if width == 0 || tribe_count == 0 {
        return Err(Error::BadParams("tribes needs width, count >= 1".into()));
    }
    let n = width * tribe_count;
    let geometry = GridGeometry::new(n, 2)?;
    // Axis a corresponds to bit n-1-a of the cell index.
    let masks: Vec<u64> = (0..tribe_count)
        .map(|t| {
            let high = n - t * width; // one past the tribe's top bit
            ((1u64 << width) - 1) << (high - width)
        })
        .collect();
    let labels = (0..geometry.cell_count())
        .map(|cell| {
            // (not a containment test: the mask appears on both sides)
            #[allow(clippy::manual_contains)]
            let unanimous = masks.iter().any(|&m| cell & m == m);
            if unanimous {
                2
            } else {
                1
            }
        })
        .collect();
    GridPartition::new(geometry, 2, labels)
}

/// Rebalances a two-color boolean-cube partition by flipping exactly the
/// deficit's worth of cells from the larger part to the smaller one, taking
/// the lexicographically smallest cells of the larger part. The result is
/// exactly balanced, and the maximum single-coordinate influence grows by at
/// most twice the flipped fraction.
pub fn adjust_to_balanced(partition: &GridPartition) -> Result<GridPartition> {
    let geometry = partition.geometry();
    if geometry.resolution() != 2 {
        return Err(Error::NotBooleanGrid {
            resolution: geometry.resolution(),
        });
    }
    if partition.colors() != 2 {
        return Err(Error::NotTwoColors {
            colors: partition.colors(),
        });
    }
    let total = geometry.cell_count();
    let count2 = partition.labels().iter().filter(|&&l| l == 2).count() as u64;
    let half = total / 2;
    if count2 == half {
        return Ok(partition.clone());
    }
    let (from, to, mut need) = if count2 < half {
        (1u8, 2u8, half - count2)
    } else {
        (2u8, 1u8, count2 - half)
    };
    let mut labels = partition.labels().to_vec();
    for l in labels.iter_mut() {
        if need == 0 {
            break;
        }
        if *l == from {
            *l = to;
            need -= 1;
        }
    }
    GridPartition::new(geometry.clone(), 2, labels)
}

/// Product partition: cells of the combined grid carry the color pair
/// `(a, b) -> (a-1)*c_2 + b`, with the left factor on the leading axes.
pub fn product(left: &GridPartition, right: &GridPartition) -> Result<GridPartition> {
    let (gl, gr) = (left.geometry(), right.geometry());
    if gl.resolution() != gr.resolution() {
        return Err(Error::GridMismatch {
            left: gl.resolution(),
            right: gr.resolution(),
        });
    }
    let colors = left.colors() as u64 * right.colors() as u64;
    if colors > ColorIndex::MAX_COLORS as u64 {
        return Err(Error::TooManyColors {
            needed: colors,
            cap: ColorIndex::MAX_COLORS as u64,
        });
    }
    let geometry = GridGeometry::new(gl.dimension() + gr.dimension(), gl.resolution())?;
    let c2 = right.colors();
    let mut labels = Vec::with_capacity(geometry.cell_count() as usize);
    for &a in left.labels() {
        let base = (a - 1) * c2;
        for &b in right.labels() {
            labels.push(base + b);
        }
    }
    GridPartition::new(geometry, colors as u8, labels)
}

/// `k`-fold product of a partition with itself.
pub fn power(partition: &GridPartition, k: u32) -> Result<GridPartition> {
    if k == 0 {
        return Err(Error::BadParams("power needs k >= 1".into()));
    }
    let mut acc = partition.clone();
    for _ in 1..k {
        acc = product(&acc, partition)?;
    }
    Ok(acc)
}

/// Level-set partition: cells sorted by (coordinate sum, cell index) and cut
/// into `c` consecutive blocks as equal as possible (earlier colors take the
/// extra cell).
pub fn level_set(n: u32, resolution: u32, colors: u8) -> Result<GridPartition> {
    let geometry = GridGeometry::new(n, resolution)?;
    if colors == 0 {
        return Err(Error::BadParams("color count must be >= 1".into()));
    }
    let distinct_sums = n as u64 * (resolution as u64 - 1) + 1;
    if colors as u64 > distinct_sums {
        return Err(Error::TooManyColors {
            needed: colors as u64,
            cap: distinct_sums,
        });
    }
    let total = geometry.cell_count();
    let mut digits = vec![0u32; n as usize];
    let mut order: Vec<(u32, u64)> = (0..total)
        .map(|cell| {
            geometry.decompose_into(cell, &mut digits);
            (digits.iter().sum::<u32>(), cell)
        })
        .collect();
    order.sort_unstable();
    let mut labels = vec![0u8; total as usize];
    let base = total / colors as u64;
    let extra = total % colors as u64;
    let mut idx = 0usize;
    for color in 1..=colors {
        let size = base + u64::from((color as u64) <= extra);
        for _ in 0..size {
            labels[order[idx].1 as usize] = color;
            idx += 1;
        }
    }
    GridPartition::new(geometry, colors, labels)
}

/// Two-color halfspace partition split at coordinate-center sum `n/2`:
/// color 2 where the sum of cell centers exceeds `n/2`, color 1 otherwise.
pub fn halfspace(n: u32, resolution: u32) -> Result<GridPartition> {
    let geometry = GridGeometry::new(n, resolution)?;
    let threshold = n as u64 * resolution as u64; // sum of (2i+1) vs n*N
    let mut digits = vec![0u32; n as usize];
    let labels = (0..geometry.cell_count())
        .map(|cell| {
            geometry.decompose_into(cell, &mut digits);
            let doubled: u64 = digits.iter().map(|&d| 2 * d as u64 + 1).sum();
            if doubled > threshold {
                2
            } else {
                1
            }
        })
        .collect();
    GridPartition::new(geometry, 2, labels)
}

/// Equipartition into `r^n` axis-aligned subcubes of side `1/r`. Every
/// `d`-dimensional projection of every part is exactly `r^-d`.
pub fn hypercube_equipartition(n: u32, resolution: u32, r: u32) -> Result<GridPartition> {
    if r == 0 {
        return Err(Error::BadParams("side count must be >= 1".into()));
    }
    if !resolution.is_multiple_of(r) {
        return Err(Error::DivisibilityError {
            value: resolution,
            divisor: r,
        });
    }
    let colors = (0..n).try_fold(1u64, |acc, _| acc.checked_mul(r as u64));
    match colors {
        Some(c) if c <= ColorIndex::MAX_COLORS as u64 => {}
        _ => {
            return Err(Error::TooManyColors {
                needed: colors.unwrap_or(u64::MAX),
                cap: ColorIndex::MAX_COLORS as u64,
            })
        }
    }
    let geometry = GridGeometry::new(n, resolution)?;
    let block = (resolution / r) as u64;
    let mut digits = vec![0u32; n as usize];
    let labels = (0..geometry.cell_count())
        .map(|cell| {
            geometry.decompose_into(cell, &mut digits);
            let idx = digits
                .iter()
                .fold(0u64, |acc, &d| acc * r as u64 + d as u64 / block);
            (idx + 1) as u8
        })
        .collect();
    GridPartition::new(geometry, colors.unwrap() as u8, labels)
}

/// Cover whose `i`-th part holds the cells with at most `n/c` coordinates in
/// the `i`-th of `c` equal half-open slabs. The parts always cover the grid;
/// for every `S` with `|S| = d > n/c` each part's `S`-projection is at most
/// `1 - (1/c)^d`.
pub fn sauer_shelah_cover(n: u32, resolution: u32, colors: u8) -> Result<GridCover> {
    if colors == 0 {
        return Err(Error::BadParams("color count must be >= 1".into()));
    }
    if !resolution.is_multiple_of(colors as u32) {
        return Err(Error::DivisibilityError {
            value: resolution,
            divisor: colors as u32,
        });
    }
    let geometry = GridGeometry::new(n, resolution)?;
    let block = resolution / colors as u32;
    let allowed = n / colors as u32; // floor(n/c); counts are integers
    let total = geometry.cell_count();
    let mut parts: Vec<BitSet> = (0..colors).map(|_| BitSet::new(total)).collect();
    let mut digits = vec![0u32; n as usize];
    let mut in_slab = vec![0u32; colors as usize];
    for cell in 0..total {
        geometry.decompose_into(cell, &mut digits);
        in_slab.iter_mut().for_each(|v| *v = 0);
        for &d in &digits {
            in_slab[(d / block) as usize] += 1;
        }
        for (i, &count) in in_slab.iter().enumerate() {
            if count <= allowed {
                parts[i].set(cell);
            }
        }
    }
    GridCover::new(geometry, parts)
}

/// The largest `t` with `t/N <= 1/phi`, i.e. `floor(N/phi)` computed exactly
/// from the integer square root of `5 N^2`.
pub fn golden_section_cells(resolution: u32) -> u32 {
    let n = resolution as u64;
    ((isqrt_u64(5 * n * n) - n) / 2) as u32
}

/// Three-color partition of the cube at `n = 3` defined by greater-than-psi
/// tests on the first two coordinates and a half cut on the third, with
/// `psi = 1/phi` rounded down to the grid. Procedural labeling; materialize
/// with [`golden_ratio`] when the grid fits the cell cap.
#[derive(Debug, Clone)]
pub struct GoldenRatioPartition {
    geometry: GridGeometry,
    threshold: u64,
    half: u64,
}

impl GoldenRatioPartition {
    pub fn new(resolution: u32) -> Result<Self> {
        if resolution < 2 {
            return Err(Error::BadParams(
                "golden-ratio partition needs resolution >= 2".into(),
            ));
        }
        // Procedural: no labels are stored, so allow grids past the
        // materialization cap (scan memory is still guarded per scan).
        let geometry = GridGeometry::with_cell_cap(3, resolution, 1 << 40)?;
        Ok(GoldenRatioPartition {
            geometry,
            threshold: golden_section_cells(resolution) as u64,
            half: resolution as u64 / 2,
        })
    }

    pub fn threshold_cells(&self) -> u32 {
        self.threshold as u32
    }

    pub fn label_of(&self, x: u64, y: u64, z: u64) -> u8 {
        let t = self.threshold;
        if x >= t && y >= t {
            1
        } else if x < t && y < t && z < self.half {
            2
        } else {
            3
        }
    }
}

impl PartFamily for GoldenRatioPartition {
    fn geometry(&self) -> &GridGeometry {
        &self.geometry
    }

    fn part_count(&self) -> usize {
        3
    }

    fn for_each_run_in<V: FnMut(u64, u64, usize)>(&self, range: Range<u64>, mut visit: V) {
        let res = self.geometry.resolution() as u64;
        let t = self.threshold;
        let mut i = range.start;
        while i < range.end {
            let row = i / res;
            let row_start = row * res;
            let stop = (row_start + res).min(range.end);
            let (x, y) = (row / res, row % res);
            if x >= t && y >= t {
                visit(i, stop - i, 0);
            } else if x < t && y < t {
                // Part 2 below the half cut, part 3 above it.
                let cut = row_start + self.half;
                if i < cut {
                    let lo_end = stop.min(cut);
                    visit(i, lo_end - i, 1);
                    if stop > cut {
                        visit(cut, stop - cut, 2);
                    }
                } else {
                    visit(i, stop - i, 2);
                }
            } else {
                visit(i, stop - i, 2);
            }
            i = stop;
        }
    }
}

/// Materialized golden-ratio partition; requires the grid to fit the default
/// cell cap.
pub fn golden_ratio(resolution: u32) -> Result<GridPartition> {
    let family = GoldenRatioPartition::new(resolution)?;
    let geometry = GridGeometry::new(3, resolution)?;
    let mut labels = vec![0u8; geometry.cell_count() as usize];
    family.for_each_run_in(0..geometry.cell_count(), |start, len, part| {
        for l in &mut labels[start as usize..(start + len) as usize] {
            *l = part as u8 + 1;
        }
    });
    GridPartition::new(geometry, 3, labels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rational;

    #[test]
    fn majority_small() {
        let p = majority(1).unwrap();
        assert_eq!(p.labels(), &[1, 2]); // dictator
        let p = majority(3).unwrap();
        let counts = p.part_cell_counts();
        assert_eq!(counts, vec![4, 4]);
        // n=2 tie rule: wt=1 cells are 01 (x1=0 -> color 1) and 10 (x1=1 -> color 2).
        let p = majority(2).unwrap();
        assert_eq!(p.labels(), &[1, 1, 2, 2]);
        assert_eq!(p.part_cell_counts(), vec![2, 2]);
        // Exact balance for a larger even n.
        let p = majority(4).unwrap();
        assert_eq!(p.part_cell_counts(), vec![8, 8]);
    }

    #[test]
    fn tribes_small() {
        let p = tribes(1, 1).unwrap();
        assert_eq!(p.labels(), &[1, 2]); // dictator
        let p = tribes(2, 2).unwrap();
        assert_eq!(p.geometry().dimension(), 4);
        // 1 - (3/4)^2 = 7/16 cells of color 2.
        assert_eq!(p.part_cell_counts(), vec![9, 7]);
        // Spot-check: x = 1100 (first tribe unanimous) is color 2.
        assert_eq!(p.label(0b1100).get(), 2);
        assert_eq!(p.label(0b1010).get(), 1);
        assert_eq!(p.label(0b0011).get(), 2);
    }

    #[test]
    fn adjust_balances_tribes() {
        let p = tribes(2, 2).unwrap();
        let q = adjust_to_balanced(&p).unwrap();
        assert_eq!(q.part_cell_counts(), vec![8, 8]);
        // Exactly one flip, at the lexicographically smallest cell of part 1.
        let flips: Vec<usize> = p
            .labels()
            .iter()
            .zip(q.labels())
            .enumerate()
            .filter(|(_, (a, b))| a != b)
            .map(|(i, _)| i)
            .collect();
        assert_eq!(flips, vec![0]);
        // Already balanced input is returned unchanged.
        let m = majority(3).unwrap();
        assert_eq!(adjust_to_balanced(&m).unwrap(), m);
        // Rejections.
        assert!(matches!(
            adjust_to_balanced(&level_set(2, 3, 2).unwrap()),
            Err(Error::NotBooleanGrid { .. })
        ));
        assert!(matches!(
            adjust_to_balanced(&hypercube_equipartition(2, 2, 2).unwrap()),
            Err(Error::NotTwoColors { .. })
        ));
    }

    #[test]
    fn product_layout() {
        let m = majority(3).unwrap();
        let pp = product(&m, &m).unwrap();
        assert_eq!(pp.geometry().dimension(), 6);
        assert_eq!(pp.colors(), 4);
        // All four parts have volume 1/4 (product of balanced is balanced).
        assert_eq!(pp.part_cell_counts(), vec![16, 16, 16, 16]);
        // Color pairing is row-major: cell (a-cell, b-cell) -> (a-1)*c2 + b.
        for c1 in 0..8u64 {
            for c2 in 0..8u64 {
                let expect = (m.label(c1).get() - 1) * 2 + m.label(c2).get();
                assert_eq!(pp.label(c1 * 8 + c2).get(), expect);
            }
        }
        // power(f, 2) matches product(f, f) cell for cell.
        assert_eq!(power(&m, 2).unwrap(), pp);
        assert_eq!(power(&m, 1).unwrap(), m);
        // Mismatched grids rejected.
        let fine = level_set(1, 4, 2).unwrap();
        assert!(matches!(
            product(&m, &fine),
            Err(Error::GridMismatch { .. })
        ));
    }

    #[test]
    fn level_set_small() {
        let p = level_set(3, 2, 2).unwrap();
        // Majority-like halfspace: weight <= 1 is color 1.
        assert_eq!(p.labels(), &[1, 1, 1, 2, 1, 2, 2, 2]);
        let p = level_set(1, 4, 2).unwrap();
        assert_eq!(p.labels(), &[1, 1, 2, 2]);
        assert!(matches!(
            level_set(1, 2, 3),
            Err(Error::TooManyColors { .. })
        ));
    }

    #[test]
    fn hypercube_small() {
        let p = hypercube_equipartition(2, 2, 2).unwrap();
        assert_eq!(p.colors(), 4);
        assert_eq!(p.labels(), &[1, 2, 3, 4]);
        let p = hypercube_equipartition(1, 1, 1).unwrap();
        assert_eq!(p.colors(), 1);
        assert!(matches!(
            hypercube_equipartition(3, 2, 3),
            Err(Error::DivisibilityError { .. })
        ));
        let p = hypercube_equipartition(2, 4, 2).unwrap();
        // Cell (1,2) is in block (0,1) -> color 2.
        assert_eq!(p.label(p.geometry().cell_at(&[1, 2]).unwrap()).get(), 2);
    }

    #[test]
    fn sauer_shelah_n3() {
        let cover = sauer_shelah_cover(3, 2, 2).unwrap();
        // Part 1 = cells with at most one 0-coordinate (weight >= 2),
        // part 2 = cells with at most one 1-coordinate (weight <= 1).
        let p1: Vec<u64> = cover.parts()[0].iter_ones().collect();
        let p2: Vec<u64> = cover.parts()[1].iter_ones().collect();
        assert_eq!(p1, vec![3, 5, 6, 7]);
        assert_eq!(p2, vec![0, 1, 2, 4]);
        // This instance is disjoint, so it converts to a partition.
        let p = cover.into_partition().unwrap();
        assert_eq!(p.colors(), 2);
        // Single-color degenerate case: one full part.
        let c = sauer_shelah_cover(2, 2, 1).unwrap();
        assert_eq!(c.parts()[0].count_ones(), 4);
    }

    #[test]
    fn golden_ratio_threshold_and_labels() {
        assert_eq!(golden_section_cells(610), 377);
        assert_eq!(golden_section_cells(1220), 754);
        let p = golden_ratio(10).unwrap();
        let fam = GoldenRatioPartition::new(10).unwrap();
        assert_eq!(fam.threshold_cells(), 6);
        // Materialized labels agree with the procedural rule cell by cell.
        let g = p.geometry();
        for cell in 0..g.cell_count() {
            let c = g.coords_of(cell);
            let expect = fam.label_of(c[0] as u64, c[1] as u64, c[2] as u64);
            assert_eq!(p.label(cell).get(), expect, "cell {cell}");
        }
        assert!(GoldenRatioPartition::new(1).is_err());
    }

    #[test]
    fn halfspace_small() {
        let p = halfspace(1, 2).unwrap();
        assert_eq!(p.labels(), &[1, 2]);
        let p = halfspace(2, 2).unwrap();
        // Center sums 2,4,4,6 against threshold 4: only (1,1) is above.
        assert_eq!(p.labels(), &[1, 1, 1, 2]);
    }

    #[test]
    fn constructions_have_valid_volumes() {
        use crate::measure::part_cell_counts;
        for p in [
            majority(4).unwrap(),
            tribes(2, 3).unwrap(),
            level_set(2, 3, 3).unwrap(),
            hypercube_equipartition(2, 4, 2).unwrap(),
            golden_ratio(6).unwrap(),
        ] {
            let total: u64 = part_cell_counts(&p).iter().sum();
            assert_eq!(total, p.geometry().cell_count());
        }
        let _ = rational(1, 1);
    }
}
