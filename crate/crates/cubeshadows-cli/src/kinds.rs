//! Constructions addressable from the command line by kind tag and
//! parameters.

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use cubeshadows::constructions;
use cubeshadows::partition::{GridCover, GridPartition};
use cubeshadows::spart;
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Majority,
    Tribes,
    Adjusted,
    Product,
    Power,
    LevelSet,
    Halfspace,
    Hypercube,
    SauerShelah,
    GoldenRatio,
    Random,
}

#[derive(Args)]
pub struct KindArgs {
    /// Construction to build in memory.
    #[arg(long, value_enum)]
    pub kind: Option<Kind>,
    /// Dimension n.
    #[arg(long)]
    pub n: Option<u32>,
    /// Grid resolution N.
    #[arg(long)]
    pub grid: Option<u32>,
    /// Number of colors c.
    #[arg(long)]
    pub c: Option<u8>,
    /// Tribe width w (tribes).
    #[arg(long)]
    pub w: Option<u32>,
    /// Tribe count s (tribes).
    #[arg(long)]
    pub s: Option<u32>,
    /// Power exponent k (power).
    #[arg(long)]
    pub k: Option<u32>,
    /// Subcubes per axis r (hypercube).
    #[arg(long)]
    pub r: Option<u32>,
    /// Seed (random).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Base construction for adjusted/power: majority or tribes.
    #[arg(long, value_enum)]
    pub base: Option<BaseKind>,
    /// Base dimension (base majority).
    #[arg(long)]
    pub base_n: Option<u32>,
    /// Base tribe width (base tribes).
    #[arg(long)]
    pub base_w: Option<u32>,
    /// Base tribe count (base tribes).
    #[arg(long)]
    pub base_s: Option<u32>,
    /// Base partition file for adjusted/power (alternative to --base).
    #[arg(long)]
    pub base_file: Option<PathBuf>,
    /// Left factor file (product).
    #[arg(long)]
    pub lhs: Option<PathBuf>,
    /// Right factor file (product).
    #[arg(long)]
    pub rhs: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BaseKind {
    Majority,
    Tribes,
}

/// Either a partition or a cover; the slab cover is the one construction
/// that can genuinely overlap.
pub enum Built {
    Partition(GridPartition),
    Cover(GridCover),
}

impl KindArgs {
    fn base_partition(&self) -> Result<GridPartition> {
        if let Some(path) = &self.base_file {
            return spart::read_from_path(path)
                .with_context(|| format!("reading base partition {}", path.display()));
        }
        match self.base {
            Some(BaseKind::Majority) => {
                let n = self.base_n.context("--base majority needs --base-n")?;
                Ok(constructions::majority(n)?)
            }
            Some(BaseKind::Tribes) => {
                let w = self.base_w.context("--base tribes needs --base-w")?;
                let s = self.base_s.context("--base tribes needs --base-s")?;
                Ok(constructions::tribes(w, s)?)
            }
            None => bail!("this kind needs --base <majority|tribes> or --base-file <path>"),
        }
    }

    pub fn build(&self) -> Result<Built> {
        let kind = self.kind.context("missing --kind (or --in for eval)")?;
        let built = match kind {
            Kind::Majority => {
                let n = self.n.context("majority needs --n")?;
                Built::Partition(constructions::majority(n)?)
            }
            Kind::Tribes => {
                let w = self.w.context("tribes needs --w")?;
                let s = self.s.context("tribes needs --s")?;
                Built::Partition(constructions::tribes(w, s)?)
            }
            Kind::Adjusted => Built::Partition(constructions::adjust_to_balanced(
                &self.base_partition()?,
            )?),
            Kind::Product => {
                let lhs = self.lhs.as_ref().context("product needs --lhs <file>")?;
                let rhs = self.rhs.as_ref().context("product needs --rhs <file>")?;
                let left = spart::read_from_path(lhs)
                    .with_context(|| format!("reading {}", lhs.display()))?;
                let right = spart::read_from_path(rhs)
                    .with_context(|| format!("reading {}", rhs.display()))?;
                Built::Partition(constructions::product(&left, &right)?)
            }
            Kind::Power => {
                let k = self.k.context("power needs --k")?;
                Built::Partition(constructions::power(&self.base_partition()?, k)?)
            }
            Kind::LevelSet => {
                let n = self.n.context("level-set needs --n")?;
                let grid = self.grid.context("level-set needs --grid")?;
                let c = self.c.context("level-set needs --c")?;
                Built::Partition(constructions::level_set(n, grid, c)?)
            }
            Kind::Halfspace => {
                let n = self.n.context("halfspace needs --n")?;
                let grid = self.grid.context("halfspace needs --grid")?;
                Built::Partition(constructions::halfspace(n, grid)?)
            }
            Kind::Hypercube => {
                let n = self.n.context("hypercube needs --n")?;
                let r = self.r.context("hypercube needs --r")?;
                let grid = self.grid.unwrap_or(r);
                Built::Partition(constructions::hypercube_equipartition(n, grid, r)?)
            }
            Kind::SauerShelah => {
                let n = self.n.context("sauer-shelah needs --n")?;
                let grid = self.grid.context("sauer-shelah needs --grid")?;
                let c = self.c.context("sauer-shelah needs --c")?;
                Built::Cover(constructions::sauer_shelah_cover(n, grid, c)?)
            }
            Kind::GoldenRatio => {
                let grid = self.grid.context("golden-ratio needs --grid")?;
                Built::Partition(constructions::golden_ratio(grid)?)
            }
            Kind::Random => {
                let n = self.n.context("random needs --n")?;
                let grid = self.grid.context("random needs --grid")?;
                let c = self.c.context("random needs --c")?;
                let seed = self.seed.unwrap_or(0);
                Built::Partition(cubeshadows::search::random_partition(n, grid, c, seed)?)
            }
        };
        Ok(built)
    }

    pub fn is_golden_ratio(&self) -> bool {
        self.kind == Some(Kind::GoldenRatio)
    }

    pub fn grid_or_default(&self) -> Option<u32> {
        self.grid
    }
}
