//! Square periodic grid and its partition into aligned square blocks.

use crate::error::{Error, Result};

/// L x L periodic square grid, L >= 2. Sites are indexed row-major.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridShape {
    size: usize,
}

impl GridShape {
    pub fn new(size: usize) -> Result<Self> {
        if size < 2 {
            return Err(Error::Config(format!("grid size must be >= 2, got {size}")));
        }
        Ok(Self { size })
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn num_sites(&self) -> usize {
        self.size * self.size
    }

    #[inline]
    pub fn index(&self, row: usize, col: usize) -> usize {
        row * self.size + col
    }

    /// Von Neumann neighbours with periodic wrap, order: +row, -row, +col, -col.
    #[inline]
    pub fn neighbors(&self, row: usize, col: usize) -> [(usize, usize); 4] {
        let n = self.size;
        [
            ((row + 1) % n, col),
            ((row + n - 1) % n, col),
            (row, (col + 1) % n),
            (row, (col + n - 1) % n),
        ]
    }
}

/// Partition of a grid into (L/b)^2 aligned b x b blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockPartition {
    shape: GridShape,
    block: usize,
    per_side: usize,
}

impl BlockPartition {
    pub fn new(shape: GridShape, block: usize) -> Result<Self> {
        if block == 0 || shape.size() % block != 0 {
            return Err(Error::NonDividingBlock { size: shape.size(), block });
        }
        Ok(Self { shape, block, per_side: shape.size() / block })
    }

    #[inline]
    pub fn shape(&self) -> GridShape {
        self.shape
    }

    #[inline]
    pub fn block_size(&self) -> usize {
        self.block
    }

    #[inline]
    pub fn blocks_per_side(&self) -> usize {
        self.per_side
    }

    #[inline]
    pub fn num_blocks(&self) -> usize {
        self.per_side * self.per_side
    }

    #[inline]
    pub fn sites_per_block(&self) -> usize {
        self.block * self.block
    }

    /// Block owning the site at (row, col).
    #[inline]
    pub fn block_of(&self, row: usize, col: usize) -> usize {
        (row / self.block) * self.per_side + col / self.block
    }

    /// Row-major site indices of one block.
    pub fn sites_of(&self, block_idx: usize) -> impl Iterator<Item = usize> + '_ {
        let r0 = (block_idx / self.per_side) * self.block;
        let c0 = (block_idx % self.per_side) * self.block;
        (0..self.block).flat_map(move |dr| {
            (0..self.block).map(move |dc| self.shape.index(r0 + dr, c0 + dc))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_degenerate_grid() {
        assert!(GridShape::new(1).is_err());
        assert!(GridShape::new(0).is_err());
    }

    #[test]
    fn partition_counts() {
        let g = GridShape::new(64).unwrap();
        assert_eq!(BlockPartition::new(g, 16).unwrap().num_blocks(), 16);
        assert_eq!(BlockPartition::new(g, 1).unwrap().num_blocks(), 4096);
        assert_eq!(BlockPartition::new(g, 64).unwrap().num_blocks(), 1);
        assert_eq!(
            BlockPartition::new(g, 48).unwrap_err(),
            Error::NonDividingBlock { size: 64, block: 48 }
        );
        assert!(BlockPartition::new(g, 0).is_err());
    }

    #[test]
    fn blocks_tile_the_grid_exactly() {
        let g = GridShape::new(64).unwrap();
        for b in [1, 2, 4, 8, 16, 32] {
            let p = BlockPartition::new(g, b).unwrap();
            let mut owner = vec![usize::MAX; g.num_sites()];
            for blk in 0..p.num_blocks() {
                for site in p.sites_of(blk) {
                    assert_eq!(owner[site], usize::MAX, "site {site} covered twice at b={b}");
                    owner[site] = blk;
                }
            }
            assert!(owner.iter().all(|&o| o != usize::MAX), "uncovered site at b={b}");
            for row in 0..g.size() {
                for col in 0..g.size() {
                    assert_eq!(owner[g.index(row, col)], p.block_of(row, col));
                }
            }
        }
    }

    #[test]
    fn neighbors_wrap() {
        let g = GridShape::new(4).unwrap();
        assert_eq!(g.neighbors(0, 0), [(1, 0), (3, 0), (0, 1), (0, 3)]);
        assert_eq!(g.neighbors(3, 3), [(0, 3), (2, 3), (3, 0), (3, 2)]);
    }
}
