//! SPART1 partition file format.
//!
//! Layout: magic bytes `SPART1\n`, then three 32-bit little-endian unsigned
//! integers `n`, `N`, `c`, then `N^n` label bytes (values `1..=c`) in
//! row-major cell order with axis 1 slowest. The encoding is bit-exact: a
//! write/read round trip reproduces the partition and the byte stream.

use crate::error::{Error, Result};
use crate::geometry::GridGeometry;
use crate::partition::GridPartition;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

pub const MAGIC: &[u8; 7] = b"SPART1\n";

pub fn write_partition<W: Write>(mut w: W, partition: &GridPartition) -> Result<()> {
    let g = partition.geometry();
    w.write_all(MAGIC)?;
    w.write_all(&g.dimension().to_le_bytes())?;
    w.write_all(&g.resolution().to_le_bytes())?;
    w.write_all(&(partition.colors() as u32).to_le_bytes())?;
    w.write_all(partition.labels())?;
    w.flush()?;
    Ok(())
}

pub fn read_partition<R: Read>(mut r: R) -> Result<GridPartition> {
    let mut magic = [0u8; 7];
    read_exact(&mut r, &mut magic, "magic")?;
    if &magic != MAGIC {
        return Err(Error::CorruptFile("bad magic bytes".into()));
    }
    let n = read_u32(&mut r, "dimension")?;
    let resolution = read_u32(&mut r, "resolution")?;
    let colors = read_u32(&mut r, "colors")?;
    if colors == 0 || colors > 255 {
        return Err(Error::CorruptFile(format!(
            "color count {colors} outside 1..=255"
        )));
    }
    let geometry = GridGeometry::new(n, resolution)?;
    let mut labels = vec![0u8; geometry.cell_count() as usize];
    read_exact(&mut r, &mut labels, "labels")?;
    let mut trailing = [0u8; 1];
    if r.read(&mut trailing)? != 0 {
        return Err(Error::CorruptFile("trailing data after labels".into()));
    }
    GridPartition::new(geometry, colors as u8, labels)
}

pub fn write_to_path<P: AsRef<Path>>(path: P, partition: &GridPartition) -> Result<()> {
    write_partition(BufWriter::new(File::create(path)?), partition)
}

pub fn read_from_path<P: AsRef<Path>>(path: P) -> Result<GridPartition> {
    read_partition(BufReader::new(File::open(path)?))
}

fn read_exact<R: Read>(r: &mut R, buf: &mut [u8], what: &str) -> Result<()> {
    r.read_exact(buf)
        .map_err(|_| Error::CorruptFile(format!("truncated {what}")))
}

fn read_u32<R: Read>(r: &mut R, what: &str) -> Result<u32> {
    let mut b = [0u8; 4];
    read_exact(r, &mut b, what)?;
    Ok(u32::from_le_bytes(b))
}
