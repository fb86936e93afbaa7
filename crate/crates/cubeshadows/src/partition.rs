//! Partitions and covers of the discretized cube.
//!
//! A `GridPartition` assigns every cell exactly one color in `1..=c`; a
//! `GridCover` is a family of cell sets whose union is the whole grid, with
//! overlaps allowed. Both are immutable after construction and safe to share
//! across threads.

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::geometry::GridGeometry;
use crate::rational::{cells_fraction, Rational};
use std::fmt;

/// A 1-based color in `1..=c`. Storage is one byte, so at most 255 colors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ColorIndex(u8);

impl ColorIndex {
    pub const MAX_COLORS: u8 = u8::MAX;

    pub fn new(value: u8, colors: u8) -> Result<Self> {
        if value == 0 || value > colors {
            return Err(Error::BadColor {
                color: value,
                colors,
            });
        }
        Ok(ColorIndex(value))
    }

    pub(crate) fn from_label(label: u8) -> Self {
        debug_assert!(label >= 1);
        ColorIndex(label)
    }

    pub fn get(self) -> u8 {
        self.0
    }

    /// 0-based part index.
    pub fn part(self) -> usize {
        self.0 as usize - 1
    }
}

impl fmt::Display for ColorIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A total coloring of the grid cells with colors in `1..=colors`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridPartition {
    geometry: GridGeometry,
    colors: u8,
    labels: Vec<u8>,
}

impl GridPartition {
    /// Validates and builds a partition from a full label vector
    /// (row-major cell order, values in `1..=colors`).
    pub fn new(geometry: GridGeometry, colors: u8, labels: Vec<u8>) -> Result<Self> {
        if colors == 0 {
            return Err(Error::BadParams("color count must be >= 1".into()));
        }
        if labels.len() as u64 != geometry.cell_count() {
            return Err(Error::LabelCountMismatch {
                expected: geometry.cell_count(),
                got: labels.len() as u64,
            });
        }
        for (cell, &label) in labels.iter().enumerate() {
            if label == 0 || label > colors {
                return Err(Error::OutOfRangeLabel {
                    cell: cell as u64,
                    label,
                    colors,
                });
            }
        }
        Ok(GridPartition {
            geometry,
            colors,
            labels,
        })
    }

    /// Builds the `N = 2` partition of a boolean function from its truth
    /// table. Index bits follow cell order (first input is the most
    /// significant bit); output `v` becomes color `v + 1`.
    pub fn from_truth_table(table: &[u8]) -> Result<Self> {
        let len = table.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::BadLength { len });
        }
        if let Some((index, &value)) = table.iter().enumerate().find(|(_, &v)| v > 1) {
            return Err(Error::BadTruthValue { index, value });
        }
        let n = len.trailing_zeros();
        let geometry = GridGeometry::new(n, 2)?;
        let labels = table.iter().map(|&v| v + 1).collect();
        GridPartition::new(geometry, 2, labels)
    }

    pub fn geometry(&self) -> &GridGeometry {
        &self.geometry
    }

    pub fn colors(&self) -> u8 {
        self.colors
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn label(&self, cell: u64) -> ColorIndex {
        ColorIndex::from_label(self.labels[cell as usize])
    }

    pub fn color(&self, value: u8) -> Result<ColorIndex> {
        ColorIndex::new(value, self.colors)
    }

    /// Cell count of every part, indexed by `color - 1`.
    pub fn part_cell_counts(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.colors as usize];
        for &l in &self.labels {
            counts[l as usize - 1] += 1;
        }
        counts
    }

    pub fn part_volume(&self, color: ColorIndex) -> Result<Rational> {
        if color.get() > self.colors {
            return Err(Error::BadColor {
                color: color.get(),
                colors: self.colors,
            });
        }
        let count = self.labels.iter().filter(|&&l| l == color.get()).count() as u64;
        Ok(cells_fraction(
            count,
            self.geometry.resolution(),
            self.geometry.dimension(),
        ))
    }

    pub fn part_cells(&self, color: ColorIndex) -> Result<BitSet> {
        if color.get() > self.colors {
            return Err(Error::BadColor {
                color: color.get(),
                colors: self.colors,
            });
        }
        let mut set = BitSet::new(self.geometry.cell_count());
        for (cell, &l) in self.labels.iter().enumerate() {
            if l == color.get() {
                set.set(cell as u64);
            }
        }
        Ok(set)
    }

    /// Views the partition as a cover with pairwise-disjoint parts.
    pub fn to_cover(&self) -> GridCover {
        let parts = (1..=self.colors)
            .map(|c| self.part_cells(ColorIndex::from_label(c)).unwrap())
            .collect();
        GridCover {
            geometry: self.geometry.clone(),
            parts,
        }
    }
}

/// An ordered family of cell sets covering the whole grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridCover {
    geometry: GridGeometry,
    parts: Vec<BitSet>,
}

impl GridCover {
    /// Validates the cover property: the union of the parts is the full grid.
    pub fn new(geometry: GridGeometry, parts: Vec<BitSet>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::BadParams("a cover needs at least one part".into()));
        }
        if parts.len() > ColorIndex::MAX_COLORS as usize {
            return Err(Error::TooManyColors {
                needed: parts.len() as u64,
                cap: ColorIndex::MAX_COLORS as u64,
            });
        }
        let mut union = BitSet::new(geometry.cell_count());
        for p in &parts {
            if p.len() != geometry.cell_count() {
                return Err(Error::BadParams(
                    "part universe does not match the grid".into(),
                ));
            }
            union.or_assign(p);
        }
        if let Some(missing_cell) = union.first_unset() {
            return Err(Error::NotACover { missing_cell });
        }
        Ok(GridCover { geometry, parts })
    }

    pub fn geometry(&self) -> &GridGeometry {
        &self.geometry
    }

    pub fn parts(&self) -> &[BitSet] {
        &self.parts
    }

    pub fn part_count(&self) -> usize {
        self.parts.len()
    }

    /// Converts a cover with pairwise-disjoint parts into a partition.
    /// Fails with a witness cell if any two parts overlap.
    pub fn into_partition(&self) -> Result<GridPartition> {
        let total = self.geometry.cell_count();
        let mut labels = vec![0u8; total as usize];
        for (p, part) in self.parts.iter().enumerate() {
            for cell in part.iter_ones() {
                if labels[cell as usize] != 0 {
                    return Err(Error::OverlappingParts { cell });
                }
                labels[cell as usize] = (p + 1) as u8;
            }
        }
        // The cover property guarantees no zero label remains.
        GridPartition::new(self.geometry.clone(), self.parts.len() as u8, labels)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geom(n: u32, res: u32) -> GridGeometry {
        GridGeometry::new(n, res).unwrap()
    }

    #[test]
    fn smallest_nontrivial_partition() {
        let p = GridPartition::new(geom(1, 2), 2, vec![1, 2]).unwrap();
        assert_eq!(p.part_cell_counts(), vec![1, 1]);
        assert_eq!(
            p.part_volume(p.color(1).unwrap()).unwrap(),
            crate::rational::rational(1, 2)
        );
    }

    #[test]
    fn out_of_range_label_rejected() {
        let err = GridPartition::new(geom(2, 2), 2, vec![1, 1, 1, 3]).unwrap_err();
        assert!(matches!(
            err,
            Error::OutOfRangeLabel {
                cell: 3,
                label: 3,
                colors: 2
            }
        ));
        assert!(GridPartition::new(geom(2, 2), 2, vec![1, 1, 0, 1]).is_err());
        assert!(matches!(
            GridPartition::new(geom(2, 2), 2, vec![1, 1, 1]),
            Err(Error::LabelCountMismatch { .. })
        ));
    }

    #[test]
    fn truth_table_roundtrip() {
        // Dictator on the first input: two axis slabs.
        let p = GridPartition::from_truth_table(&[0, 0, 1, 1]).unwrap();
        assert_eq!(p.geometry().dimension(), 2);
        assert_eq!(p.labels(), &[1, 1, 2, 2]);
        // Majority of three: parts of size 4 and 4.
        let maj: Vec<u8> = (0..8u32)
            .map(|x| u8::from(x.count_ones() >= 2))
            .collect();
        let p = GridPartition::from_truth_table(&maj).unwrap();
        assert_eq!(p.part_cell_counts(), vec![4, 4]);
        // Constant zero: one empty part.
        let p = GridPartition::from_truth_table(&[0, 0, 0, 0]).unwrap();
        assert_eq!(p.part_cell_counts(), vec![4, 0]);
        assert!(matches!(
            GridPartition::from_truth_table(&[0, 1, 0]),
            Err(Error::BadLength { len: 3 })
        ));
        assert!(matches!(
            GridPartition::from_truth_table(&[0, 2]),
            Err(Error::BadTruthValue { .. })
        ));
    }

    #[test]
    fn cover_roundtrip_and_overlap() {
        let p = GridPartition::new(geom(1, 2), 2, vec![1, 2]).unwrap();
        let cover = p.to_cover();
        let q = cover.into_partition().unwrap();
        assert_eq!(p, q);

        let full = {
            let mut s = BitSet::new(4);
            s.set_range(0, 4);
            s
        };
        let overlapping = GridCover::new(geom(2, 2), vec![full.clone(), full]).unwrap();
        assert!(matches!(
            overlapping.into_partition(),
            Err(Error::OverlappingParts { cell: 0 })
        ));

        let partial = BitSet::new(4);
        assert!(matches!(
            GridCover::new(geom(2, 2), vec![partial]),
            Err(Error::NotACover { missing_cell: 0 })
        ));
    }
}
