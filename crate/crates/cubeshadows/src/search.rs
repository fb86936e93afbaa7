//! Exhaustive and randomized search over small grid partitions.
//!
//! The exhaustive search enumerates label vectors in lexicographic order
//! (cell 0 most significant), optionally skipping non-canonical
//! representatives under the group generated by coordinate permutations and
//! color relabelings. The enumeration space is split into fixed chunks with
//! fixed per-chunk budgets, so the reported minimum and witness are
//! independent of thread count even when the budget binds.

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::geometry::{CoordSet, GridGeometry};
use crate::measure::{projection_scan, PartFamily};
use crate::partition::{ColorIndex, GridCover, GridPartition};
use crate::rational::{cells_fraction, Rational};
use num::bigint::BigInt;
use rayon::prelude::*;

/// SplitMix64: a fixed 64-bit mixing sequence, identical on every platform.
/// Constants are the standard ones (0x9E3779B97F4A7C15 increment,
/// 0xBF58476D1CE4E5B9 / 0x94D049BB133111EB multipliers).
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform draw from `0..bound` by rejection, so there is no modulo bias.
    pub fn next_below(&mut self, bound: u64) -> u64 {
        debug_assert!(bound >= 1);
        let zone = u64::MAX - (u64::MAX % bound + 1) % bound;
        loop {
            let v = self.next_u64();
            if v <= zone {
                return v % bound;
            }
        }
    }
}

/// I.i.d. uniform color per cell from a seeded deterministic generator.
pub fn random_partition(n: u32, resolution: u32, colors: u8, seed: u64) -> Result<GridPartition> {
    if colors == 0 {
        return Err(Error::BadParams("color count must be >= 1".into()));
    }
    let geometry = GridGeometry::new(n, resolution)?;
    let mut rng = SplitMix64::new(seed);
    let labels = (0..geometry.cell_count())
        .map(|_| rng.next_below(colors as u64) as u8 + 1)
        .collect();
    GridPartition::new(geometry, colors, labels)
}

#[derive(Debug, Clone, Copy)]
pub struct SearchOptions {
    /// Maximum number of label vectors enumerated before giving up.
    pub budget: u64,
    /// Skip label vectors that are not the lexicographic minimum of their
    /// orbit under coordinate permutations and color relabelings.
    pub prune: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            budget: 1 << 30,
            prune: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    pub best: Rational,
    pub best_count: u64,
    pub partition: GridPartition,
    /// Label vectors enumerated (including ones skipped as non-canonical).
    pub nodes: u64,
    /// Label vectors whose max projection was actually measured.
    pub evaluated: u64,
    pub canonical_skipped: u64,
    /// False when the budget cut the enumeration short; `best` is then only
    /// the best value seen, not a proven minimum.
    pub optimal: bool,
    /// Total size of the enumeration space, as a decimal string.
    pub space: String,
}

/// Exact minimum of `mpv(., d)` over all `colors`-colorings of the grid,
/// with the lexicographically first minimizing label vector as witness.
pub fn exhaustive_min_mpv(
    n: u32,
    resolution: u32,
    colors: u8,
    d: u32,
    opts: SearchOptions,
) -> Result<SearchResult> {
    if colors == 0 {
        return Err(Error::BadParams("color count must be >= 1".into()));
    }
    if opts.budget == 0 {
        return Err(Error::BadParams("search budget must be >= 1".into()));
    }
    let geometry = GridGeometry::new(n, resolution)?;
    if d == 0 || d > n {
        return Err(Error::BadDimension { d, n });
    }
    let total = geometry.cell_count();
    if total > 64 {
        return Err(Error::BadParams(format!(
            "search space c^(N^n) with N^n = {total} cells is far beyond enumeration"
        )));
    }
    let cells = total as usize;
    let eval = ProjectionEvaluator::new(&geometry, colors, d);
    let canon = if opts.prune {
        Some(CanonicalTest::new(&geometry, colors))
    } else {
        None
    };

    let space = BigInt::from(colors).pow(cells as u32);

    // Fixed chunking by a leading-digit prefix keeps results independent of
    // thread count: chunk boundaries and per-chunk budgets never move.
    let mut prefix_len = 0usize;
    let mut chunks = 1u64;
    while prefix_len < cells && chunks < 64 {
        chunks *= colors as u64;
        prefix_len += 1;
    }
    let base_budget = opts.budget / chunks;
    let extra = opts.budget % chunks;

    let chunk_results: Vec<ChunkOutcome> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let budget = base_budget + u64::from(chunk < extra);
            enumerate_chunk(
                chunk,
                prefix_len,
                cells,
                colors,
                budget,
                &eval,
                canon.as_ref(),
            )
        })
        .collect();

    let mut nodes = 0u64;
    let mut evaluated = 0u64;
    let mut canonical_skipped = 0u64;
    let mut optimal = true;
    let mut best: Option<(u64, Vec<u8>)> = None;
    for c in chunk_results {
        nodes += c.nodes;
        evaluated += c.evaluated;
        canonical_skipped += c.canonical_skipped;
        optimal &= c.exhausted;
        if let Some((count, labels)) = c.best {
            let better = match &best {
                None => true,
                // Chunks are ordered by prefix, so the first strictly
                // smaller count wins and ties keep the earlier labels.
                Some((bc, _)) => count < *bc,
            };
            if better {
                best = Some((count, labels));
            }
        }
    }
    let (best_count, labels) =
        best.expect("chunked enumeration always evaluates at least one labeling");
    let partition = GridPartition::new(geometry.clone(), colors, labels)?;
    Ok(SearchResult {
        best: cells_fraction(best_count, resolution, d),
        best_count,
        partition,
        nodes,
        evaluated,
        canonical_skipped,
        optimal,
        space: space.to_string(),
    })
}

struct ChunkOutcome {
    best: Option<(u64, Vec<u8>)>,
    nodes: u64,
    evaluated: u64,
    canonical_skipped: u64,
    exhausted: bool,
}

fn enumerate_chunk(
    chunk: u64,
    prefix_len: usize,
    cells: usize,
    colors: u8,
    budget: u64,
    eval: &ProjectionEvaluator,
    canon: Option<&CanonicalTest>,
) -> ChunkOutcome {
    let mut labels = vec![1u8; cells];
    // Seed the prefix from the chunk number (most significant digit first).
    let mut v = chunk;
    for i in (0..prefix_len).rev() {
        labels[i] = (v % colors as u64) as u8 + 1;
        v /= colors as u64;
    }
    let mut out = ChunkOutcome {
        best: None,
        nodes: 0,
        evaluated: 0,
        canonical_skipped: 0,
        exhausted: true,
    };
    let mut scratch = eval.scratch();
    loop {
        if out.nodes >= budget {
            out.exhausted = false;
            return out;
        }
        out.nodes += 1;
        let skip = canon.is_some_and(|c| !c.is_canonical(&labels));
        if skip {
            out.canonical_skipped += 1;
        } else {
            out.evaluated += 1;
            let abort_at = out.best.as_ref().map(|(c, _)| *c);
            if let Some(count) = eval.max_projection_count(&labels, abort_at, &mut scratch) {
                if out.best.as_ref().is_none_or(|(bc, _)| count < *bc) {
                    out.best = Some((count, labels.clone()));
                }
            }
        }
        // Advance the suffix odometer; the prefix stays fixed.
        let mut i = cells;
        loop {
            if i == prefix_len {
                return out;
            }
            i -= 1;
            if labels[i] < colors {
                labels[i] += 1;
                break;
            }
            labels[i] = 1;
        }
    }
}

/// Measures the max projected-cell count of a label vector over all size-`d`
/// subsets, with small preallocated bitmaps and early abort.
struct ProjectionEvaluator {
    proj_index: Vec<Vec<u32>>, // [subset][cell] -> projected cell
    parts: usize,
    words: usize,
}

struct EvalScratch {
    bits: Vec<u64>,
    counts: Vec<u64>,
}

impl ProjectionEvaluator {
    fn new(geometry: &GridGeometry, colors: u8, d: u32) -> Self {
        let n = geometry.dimension();
        let res = geometry.resolution() as u64;
        let proj_cells = geometry.projected_cells(d);
        let mut proj_index = Vec::new();
        for s in CoordSet::subsets_of_size(n, d) {
            let axes: Vec<u32> = s.axes().collect();
            let table = (0..geometry.cell_count())
                .map(|cell| {
                    let coords = geometry.coords_of(cell);
                    axes.iter()
                        .fold(0u64, |acc, &a| acc * res + coords[a as usize] as u64)
                        as u32
                })
                .collect();
            proj_index.push(table);
        }
        ProjectionEvaluator {
            proj_index,
            parts: colors as usize,
            words: proj_cells.div_ceil(64) as usize,
        }
    }

    fn scratch(&self) -> EvalScratch {
        EvalScratch {
            bits: vec![0u64; self.words * self.parts],
            counts: vec![0u64; self.parts],
        }
    }

    /// Max occupied projected-cell count over parts and subsets, or `None`
    /// if it provably reaches `abort_at` (i.e. cannot strictly improve).
    fn max_projection_count(
        &self,
        labels: &[u8],
        abort_at: Option<u64>,
        scratch: &mut EvalScratch,
    ) -> Option<u64> {
        let mut overall = 0u64;
        for table in &self.proj_index {
            scratch.bits.fill(0);
            scratch.counts.fill(0);
            for (cell, &label) in labels.iter().enumerate() {
                let part = label as usize - 1;
                let idx = table[cell] as usize;
                let w = &mut scratch.bits[part * self.words + (idx >> 6)];
                let bit = 1u64 << (idx & 63);
                if *w & bit == 0 {
                    *w |= bit;
                    scratch.counts[part] += 1;
                    if scratch.counts[part] > overall {
                        overall = scratch.counts[part];
                        if abort_at.is_some_and(|b| overall >= b) {
                            return None;
                        }
                    }
                }
            }
        }
        Some(overall)
    }
}

/// Lexicographic canonicity under coordinate permutations x color
/// relabelings.
struct CanonicalTest {
    cell_maps: Vec<Vec<u32>>,
    color_maps: Vec<Vec<u8>>,
}

impl CanonicalTest {
    fn new(geometry: &GridGeometry, colors: u8) -> Self {
        let n = geometry.dimension() as usize;
        let total = geometry.cell_count();
        let mut cell_maps = Vec::new();
        for perm in permutations(n) {
            let map = (0..total)
                .map(|cell| {
                    let coords = geometry.coords_of(cell);
                    let permuted: Vec<u32> = (0..n).map(|a| coords[perm[a]]).collect();
                    geometry.cell_at(&permuted).unwrap() as u32
                })
                .collect();
            cell_maps.push(map);
        }
        let color_maps = permutations(colors as usize)
            .into_iter()
            .map(|p| p.into_iter().map(|c| c as u8 + 1).collect())
            .collect();
        CanonicalTest {
            cell_maps,
            color_maps,
        }
    }

    fn is_canonical(&self, labels: &[u8]) -> bool {
        for cell_map in &self.cell_maps {
            for color_map in &self.color_maps {
                // Compare sigma(labels[pi(cell)]) against labels, lexicographically.
                for (i, &src) in cell_map.iter().enumerate() {
                    let mapped = color_map[labels[src as usize] as usize - 1];
                    match mapped.cmp(&labels[i]) {
                        std::cmp::Ordering::Less => return false,
                        std::cmp::Ordering::Greater => break,
                        std::cmp::Ordering::Equal => continue,
                    }
                }
            }
        }
        true
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut arr: Vec<usize> = (0..n).collect();
    heap_permute(n, &mut arr, &mut out);
    out
}

fn heap_permute(k: usize, arr: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if k <= 1 {
        out.push(arr.clone());
        return;
    }
    for i in 0..k {
        heap_permute(k - 1, arr, out);
        if k.is_multiple_of(2) {
            arr.swap(i, k - 1);
        } else {
            arr.swap(0, k - 1);
        }
    }
}

/// First `(color, S)` pair whose `S`-projection covers the whole `d`-grid,
/// scanning subsets in lexicographic order and colors in ascending order
/// within each subset.
pub fn full_projection_witness<F: PartFamily>(
    family: &F,
    d: u32,
) -> Result<Option<(ColorIndex, CoordSet)>> {
    let n = family.geometry().dimension();
    if d == 0 || d > n {
        return Err(Error::BadDimension { d, n });
    }
    let subsets: Vec<CoordSet> = CoordSet::subsets_of_size(n, d).collect();
    let scan = projection_scan(family, &subsets)?;
    for (j, s) in scan.subsets.iter().enumerate() {
        for p in 0..family.part_count() {
            if scan.counts[j][p] == scan.proj_len[j] {
                return Ok(Some((ColorIndex::new(p as u8 + 1, family.part_count() as u8)?, *s)));
            }
        }
    }
    Ok(None)
}

#[derive(Debug, Clone)]
pub struct CoverSearchResult {
    pub best: Rational,
    pub best_count: u64,
    pub cover: GridCover,
    pub nodes: u64,
    pub optimal: bool,
    pub space: String,
}

/// Exact minimum of `mpv(., d)` over all `colors`-covers of the grid: every
/// cell is assigned a nonempty subset of the colors. Only sensible for very
/// small grids (the space has `(2^c - 1)^(N^n)` points).
pub fn min_mpv_over_covers(
    n: u32,
    resolution: u32,
    colors: u8,
    d: u32,
    budget: u64,
) -> Result<CoverSearchResult> {
    if colors == 0 || colors > 16 {
        return Err(Error::BadParams("cover search needs 1 <= c <= 16".into()));
    }
    let geometry = GridGeometry::new(n, resolution)?;
    if d == 0 || d > n {
        return Err(Error::BadDimension { d, n });
    }
    if n as u64 * resolution as u64 > 8 {
        return Err(Error::BadParams(
            "cover search is limited to n*N <= 8".into(),
        ));
    }
    let cells = geometry.cell_count() as usize;
    let eval = ProjectionEvaluator::new(&geometry, colors, d);
    let mut scratch = eval.scratch();
    let masks_per_cell = (1u16 << colors) - 1; // nonempty subsets
    let space = BigInt::from(masks_per_cell).pow(cells as u32);

    let mut masks = vec![1u16; cells]; // mask value k encodes subset k (1-based)
    let mut nodes = 0u64;
    let mut optimal = true;
    let mut best: Option<(u64, Vec<u16>)> = None;
    'outer: loop {
        if nodes >= budget {
            optimal = false;
            break;
        }
        nodes += 1;
        let abort = best.as_ref().map(|(c, _)| *c);
        if let Some(count) = max_cover_projection(&eval, &masks, abort, &mut scratch) {
            if best.as_ref().is_none_or(|(bc, _)| count < *bc) {
                best = Some((count, masks.clone()));
            }
        }
        let mut i = cells;
        loop {
            if i == 0 {
                break 'outer;
            }
            i -= 1;
            if masks[i] < masks_per_cell {
                masks[i] += 1;
                break;
            }
            masks[i] = 1;
        }
    }
    let (best_count, masks) = best.expect("cover enumeration evaluates at least one cover");
    let mut parts: Vec<BitSet> = (0..colors)
        .map(|_| BitSet::new(geometry.cell_count()))
        .collect();
    for (cell, &mask) in masks.iter().enumerate() {
        for (p, part) in parts.iter_mut().enumerate() {
            if mask & (1 << p) != 0 {
                part.set(cell as u64);
            }
        }
    }
    let cover = GridCover::new(geometry, parts)?;
    Ok(CoverSearchResult {
        best: cells_fraction(best_count, resolution, d),
        best_count,
        cover,
        nodes,
        optimal,
        space: space.to_string(),
    })
}

fn max_cover_projection(
    eval: &ProjectionEvaluator,
    masks: &[u16],
    abort_at: Option<u64>,
    scratch: &mut EvalScratch,
) -> Option<u64> {
    let mut overall = 0u64;
    for table in &eval.proj_index {
        scratch.bits.fill(0);
        scratch.counts.fill(0);
        for (cell, &mask) in masks.iter().enumerate() {
            let idx = table[cell] as usize;
            let bit = 1u64 << (idx & 63);
            let word = idx >> 6;
            let mut m = mask;
            while m != 0 {
                let part = m.trailing_zeros() as usize;
                m &= m - 1;
                let w = &mut scratch.bits[part * eval.words + word];
                if *w & bit == 0 {
                    *w |= bit;
                    scratch.counts[part] += 1;
                    if scratch.counts[part] > overall {
                        overall = scratch.counts[part];
                        if abort_at.is_some_and(|b| overall >= b) {
                            return None;
                        }
                    }
                }
            }
        }
    }
    Some(overall)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rational;

    #[test]
    fn splitmix_is_deterministic() {
        let mut a = SplitMix64::new(42);
        let mut b = SplitMix64::new(42);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
        // Known first output for seed 0 (reference value of the standard
        // splitmix64 sequence).
        assert_eq!(SplitMix64::new(0).next_u64(), 0xE220_A839_7B1D_CDAF);
    }

    #[test]
    fn random_partition_reproducible() {
        let a = random_partition(2, 2, 2, 7).unwrap();
        let b = random_partition(2, 2, 2, 7).unwrap();
        assert_eq!(a, b);
        let c = random_partition(2, 2, 2, 8).unwrap();
        assert!(a != c || a.labels() == c.labels());
        let one = random_partition(2, 2, 1, 3).unwrap();
        assert!(one.labels().iter().all(|&l| l == 1));
    }

    #[test]
    fn exhaustive_small_instances() {
        // n=2, N=2, c=2, d=1: a full projection is forced, minimum 1.
        let r = exhaustive_min_mpv(2, 2, 2, 1, SearchOptions::default()).unwrap();
        assert_eq!(r.best, rational(1, 1));
        assert!(r.optimal);
        // n=1, N=4, c=2, d=1: best is two half-intervals.
        let r = exhaustive_min_mpv(1, 4, 2, 1, SearchOptions::default()).unwrap();
        assert_eq!(r.best, rational(1, 2));
        assert!(r.optimal);
        assert_eq!(r.space, "16");
    }

    #[test]
    fn random_partition_volume_statistics() {
        // Mean part-1 volume over many seeds concentrates at 1/2.
        let mut sum = 0.0f64;
        let trials = 10_000u64;
        for seed in 0..trials {
            let p = random_partition(2, 2, 2, seed).unwrap();
            let ones = p.labels().iter().filter(|&&l| l == 1).count();
            sum += ones as f64 / 4.0;
        }
        let mean = sum / trials as f64;
        assert!((mean - 0.5).abs() < 0.02, "mean part-1 volume {mean}");
    }

    #[test]
    fn prune_matches_no_prune() {
        for (n, res, c, d) in [
            (2u32, 2u32, 2u8, 1u32),
            (1, 4, 2, 1),
            (2, 2, 3, 1),
            (3, 2, 2, 2),
            (2, 3, 2, 1),
        ] {
            let pruned = exhaustive_min_mpv(
                n,
                res,
                c,
                d,
                SearchOptions {
                    prune: true,
                    ..Default::default()
                },
            )
            .unwrap();
            let plain = exhaustive_min_mpv(
                n,
                res,
                c,
                d,
                SearchOptions {
                    prune: false,
                    ..Default::default()
                },
            )
            .unwrap();
            assert_eq!(pruned.best, plain.best, "({n},{res},{c},{d})");
            assert_eq!(
                pruned.partition, plain.partition,
                "witness must not depend on pruning"
            );
            assert!(pruned.canonical_skipped > 0);
            assert_eq!(plain.canonical_skipped, 0);
        }
    }

    #[test]
    fn budget_flags_non_optimal() {
        let r = exhaustive_min_mpv(
            3,
            2,
            2,
            2,
            SearchOptions {
                budget: 10,
                prune: false,
            },
        )
        .unwrap();
        assert!(!r.optimal);
        assert!(r.nodes <= 10);
    }

    #[test]
    fn full_projection_witness_examples() {
        use crate::constructions::sauer_shelah_cover;
        // Two colors in the plane at d = 1: a full projection is forced.
        let p = random_partition(2, 2, 2, 99).unwrap();
        assert!(full_projection_witness(&p, 1).unwrap().is_some());
        // The slab cover avoids full 2-projections entirely.
        let cover = sauer_shelah_cover(3, 2, 2).unwrap();
        assert_eq!(full_projection_witness(&cover, 2).unwrap(), None);
        // A single full part is a witness for every d.
        let one = GridPartition::new(GridGeometry::new(2, 2).unwrap(), 1, vec![1; 4]).unwrap();
        for d in 1..=2 {
            let (color, _) = full_projection_witness(&one, d).unwrap().unwrap();
            assert_eq!(color.get(), 1);
        }
    }

    #[test]
    fn cover_search_matches_partition_search_tiny() {
        let p = exhaustive_min_mpv(2, 2, 2, 1, SearchOptions::default()).unwrap();
        let c = min_mpv_over_covers(2, 2, 2, 1, 1 << 30).unwrap();
        assert!(c.optimal);
        assert_eq!(c.best, p.best);
        assert!(min_mpv_over_covers(3, 3, 2, 1, 1 << 20).is_err());
    }
}
