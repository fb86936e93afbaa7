//! Partitions of the discretized solid cube, their axis-parallel projection
//! volumes, influences, and every bound that can be checked exactly at desk
//! scale.
//!
//! The cube `[0,1]^n` is discretized into `N^n` half-open cells. A partition
//! colors each cell with one of `c` colors; a cover assigns each cell to at
//! least one of `c` parts. The central quantity is the maximum `d`-dimensional
//! projection volume over all parts and all size-`d` coordinate sets, computed
//! exactly in arbitrary-precision rationals.
//!
//! Modules:
//! - [`geometry`], [`partition`]: grids, coordinate sets, partitions, covers.
//! - [`measure`]: projection volumes, influence, balance, full evaluation.
//! - [`constructions`]: majority, tribes, products, level sets, subcube
//!   equipartitions, slab covers, golden-ratio partition.
//! - [`bounds`]: exact inequality checks and closed-form bounds.
//! - [`search`]: exhaustive minimum projection search with symmetry pruning.
//! - [`verify`]: seeded randomized suites for the exact theorems.
//! - [`spart`]: the SPART1 partition file format.
//! - [`report`]: JSON/CSV/human rendering of results.

pub mod bitset;
pub mod bounds;
pub mod constructions;
pub mod error;
pub mod geometry;
pub mod measure;
pub mod partition;
pub mod rational;
pub mod report;
pub mod search;
pub mod spart;
pub mod verify;

pub use error::{Error, Result};
pub use geometry::{CoordSet, GridGeometry};
pub use partition::{ColorIndex, GridCover, GridPartition};
pub use rational::Rational;
