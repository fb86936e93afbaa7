//! Grid geometry and coordinate subsets.
//!
//! The solid cube is discretized into `N^n` half-open cells: cell
//! `(i_1, ..., i_n)` is the box `prod_j [i_j/N, (i_j+1)/N)`, so cells tile the
//! cube exactly and every cell has volume `N^-n`. Cells are addressed by a
//! single row-major index with axis 1 slowest.

use crate::error::{Error, Result};
use crate::rational::{cells_fraction, Rational};
use std::cmp::Ordering;
use std::fmt;

/// Dimension and per-axis resolution of a discretized cube.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridGeometry {
    dimension: u32,
    resolution: u32,
    cells: u64,
}

impl GridGeometry {
    /// Default cap on the total cell count; keeps every exhaustive scan at
    /// desk scale. Use [`GridGeometry::with_cell_cap`] to raise it.
    pub const DEFAULT_CELL_CAP: u64 = 1 << 28;

    pub fn new(dimension: u32, resolution: u32) -> Result<Self> {
        Self::with_cell_cap(dimension, resolution, Self::DEFAULT_CELL_CAP)
    }

    pub fn with_cell_cap(dimension: u32, resolution: u32, cap: u64) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::BadParams("dimension must be >= 1".into()));
        }
        if resolution == 0 {
            return Err(Error::BadParams("resolution must be >= 1".into()));
        }
        if dimension > 64 {
            return Err(Error::BadParams("dimension must be <= 64".into()));
        }
        let cells = (0..dimension).try_fold(1u64, |acc, _| acc.checked_mul(resolution as u64));
        match cells {
            Some(cells) if cells <= cap => Ok(GridGeometry {
                dimension,
                resolution,
                cells,
            }),
            _ => Err(Error::SizeCapExceeded {
                dimension,
                resolution,
                cap,
            }),
        }
    }

    pub fn dimension(&self) -> u32 {
        self.dimension
    }

    pub fn resolution(&self) -> u32 {
        self.resolution
    }

    pub fn cell_count(&self) -> u64 {
        self.cells
    }

    pub fn cell_volume(&self) -> Rational {
        cells_fraction(1, self.resolution, self.dimension)
    }

    /// Row-major stride of an axis (axis 0 is slowest).
    pub fn stride(&self, axis: u32) -> u64 {
        debug_assert!(axis < self.dimension);
        (self.resolution as u64).pow(self.dimension - 1 - axis)
    }

    /// Number of cells in the grid induced on `d` axes.
    pub fn projected_cells(&self, d: u32) -> u64 {
        (self.resolution as u64).pow(d)
    }

    pub fn coords_of(&self, cell: u64) -> Vec<u32> {
        let mut out = vec![0u32; self.dimension as usize];
        self.decompose_into(cell, &mut out);
        out
    }

    pub fn decompose_into(&self, mut cell: u64, digits: &mut [u32]) {
        debug_assert_eq!(digits.len(), self.dimension as usize);
        let res = self.resolution as u64;
        for a in (0..self.dimension as usize).rev() {
            digits[a] = (cell % res) as u32;
            cell /= res;
        }
        debug_assert_eq!(cell, 0);
    }

    pub fn cell_at(&self, coords: &[u32]) -> Result<u64> {
        if coords.len() != self.dimension as usize
            || coords.iter().any(|&c| c >= self.resolution)
        {
            return Err(Error::BadCell {
                coords: coords.to_vec(),
            });
        }
        let res = self.resolution as u64;
        Ok(coords.iter().fold(0u64, |acc, &c| acc * res + c as u64))
    }

    /// Validates that every axis of `s` exists in this grid.
    pub fn check_axes(&self, s: CoordSet) -> Result<()> {
        match s.axes().find(|&a| a >= self.dimension) {
            Some(axis) => Err(Error::AxisOutOfRange {
                axis,
                n: self.dimension,
            }),
            None => Ok(()),
        }
    }
}

/// A subset of the axes `{0, ..., n-1}`, stored as a bitmask. In rendered
/// output coordinates are 1-based, matching the usual `[n]` convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CoordSet(u64);

impl CoordSet {
    pub fn empty() -> Self {
        CoordSet(0)
    }

    pub fn full(n: u32) -> Self {
        debug_assert!(n <= 64);
        if n == 64 {
            CoordSet(!0)
        } else {
            CoordSet((1u64 << n) - 1)
        }
    }

    pub fn singleton(axis: u32) -> Self {
        CoordSet(1u64 << axis)
    }

    pub fn from_axes(axes: &[u32]) -> Self {
        CoordSet(axes.iter().fold(0u64, |m, &a| m | (1u64 << a)))
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn len(self) -> u32 {
        self.0.count_ones()
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, axis: u32) -> bool {
        axis < 64 && self.0 & (1u64 << axis) != 0
    }

    pub fn with(self, axis: u32) -> Self {
        CoordSet(self.0 | (1u64 << axis))
    }

    pub fn complement(self, n: u32) -> Self {
        CoordSet(Self::full(n).0 & !self.0)
    }

    /// Axes in ascending order.
    pub fn axes(self) -> impl Iterator<Item = u32> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let a = bits.trailing_zeros();
                bits &= bits - 1;
                Some(a)
            }
        })
    }

    /// 1-based coordinates, ascending; the rendering convention everywhere.
    pub fn coords(self) -> Vec<u32> {
        self.axes().map(|a| a + 1).collect()
    }

    /// All size-`d` subsets of `{0..n-1}` in lexicographic order of their
    /// ascending coordinate tuples.
    pub fn subsets_of_size(n: u32, d: u32) -> SubsetIter {
        let current = if d <= n {
            Some((0..d).collect())
        } else {
            None
        };
        SubsetIter { n, d, current }
    }
}

impl fmt::Display for CoordSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, c) in self.coords().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "}}")
    }
}

impl Ord for CoordSet {
    fn cmp(&self, other: &Self) -> Ordering {
        // Lexicographic on the ascending coordinate sequence, so the order
        // matches the order `subsets_of_size` enumerates.
        self.axes().cmp(other.axes())
    }
}

impl PartialOrd for CoordSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub struct SubsetIter {
    n: u32,
    d: u32,
    current: Option<Vec<u32>>,
}

impl Iterator for SubsetIter {
    type Item = CoordSet;

    fn next(&mut self) -> Option<CoordSet> {
        let cur = self.current.as_mut()?;
        let out = CoordSet::from_axes(cur);
        if self.d == 0 {
            self.current = None;
            return Some(out);
        }
        // Advance to the next combination in lexicographic order.
        let d = self.d as usize;
        let mut i = d;
        loop {
            if i == 0 {
                self.current = None;
                break;
            }
            i -= 1;
            if cur[i] < self.n - (d - i) as u32 {
                cur[i] += 1;
                for j in i + 1..d {
                    cur[j] = cur[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}
