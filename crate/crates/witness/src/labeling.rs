//! Vertex labelings of a doubled torus induced by a periodic tiling.
//!
//! A periodic a x b tiling labels the vertices of the 2a x 2b torus: each
//! tile cell covers a 2 x 2 block of vertices, the position within the
//! block picks one of four label groups, and the label value encodes
//! (tile, group). Two mirror copies of the torus carry the same values with
//! opposite signs. The labeling is what the torus-shaped witness
//! distribution reads its head variables from.

use ciwb_predicates::labels::{decode_t, encode_t, LabelScheme};
use ciwb_tiling::system::TilingGrid;

use crate::error::WitnessError;

/// Labels for the doubled 2a x 2b torus over a replicated tiling.
#[derive(Clone, Debug)]
pub struct TorusLabeling {
    pub a: usize,
    pub b: usize,
    scheme: LabelScheme,
    /// Tile at torus cell (i, j), row-major by j.
    tiles: Vec<u32>,
}

impl TorusLabeling {
    /// Replicates `grid` onto an a x b cell torus and labels it. Both sides
    /// must be multiples of the grid sides and at least 2: a single-cell
    /// side wraps onto itself and collapses the vertex cycles into doubled
    /// edges, which no valid witness can two-color.
    pub fn new(
        grid: &TilingGrid,
        scheme: LabelScheme,
        a: usize,
        b: usize,
    ) -> Result<Self, WitnessError> {
        let (gw, gh) = (grid.width(), grid.height());
        if a < 2 || b < 2 || a % gw != 0 || b % gh != 0 {
            return Err(WitnessError::TorusTooSmall {
                max: a.min(b) as u64,
            });
        }
        let mut tiles = Vec::with_capacity(a * b);
        for j in 0..b {
            for i in 0..a {
                tiles.push(grid.get(i % gw, j % gh));
            }
        }
        Ok(TorusLabeling {
            a,
            b,
            scheme,
            tiles,
        })
    }

    pub fn k(&self) -> usize {
        self.scheme.k
    }

    pub fn tile(&self, i: usize, j: usize) -> u32 {
        self.tiles[(j % self.b) * self.a + (i % self.a)]
    }

    /// Cell column covering vertex column `p` (1-based, `1..=2a`).
    pub fn cell_col(&self, p: usize) -> usize {
        ((p - 1) / 2) % self.a
    }

    pub fn cell_row(&self, q: usize) -> usize {
        ((q - 1) / 2) % self.b
    }

    /// Label group of vertex (p, q): which corner of its 2 x 2 cell block
    /// the vertex occupies. Group 0 sits at odd (p, q).
    pub fn group(&self, p: usize, q: usize) -> usize {
        match (p % 2, q % 2) {
            (1, 1) => 0,
            (0, 1) => 1,
            (0, 0) => 2,
            (1, 0) => 3,
            _ => unreachable!(),
        }
    }

    /// Label value at vertex (p, q), 1-based in `1..=4*n_tiles`.
    pub fn value(&self, p: usize, q: usize) -> usize {
        let tile = self.tile(self.cell_col(p), self.cell_row(q)) as usize;
        self.scheme.value(tile, self.group(p, q))
    }

    /// The k-bit label string at vertex (p, q) on torus copy `z`; the z = 1
    /// copy carries the negative sign.
    pub fn label_bits(&self, p: usize, q: usize, z: usize) -> Vec<u8> {
        encode_t(self.scheme.k, self.value(p, q), z == 1)
    }

    /// Recovers the tiling from the group-0 labels; the decoded grid is the
    /// replicated torus, periodic.
    pub fn decode_grid(&self) -> Result<TilingGrid, WitnessError> {
        let mut rows = Vec::with_capacity(self.b);
        for j in 0..self.b {
            let mut row = Vec::with_capacity(self.a);
            for i in 0..self.a {
                let (p, q) = (2 * i + 1, 2 * j + 1);
                let bits = self.label_bits(p, q, 0);
                let (value, negative) =
                    decode_t(&bits).ok_or(WitnessError::InvalidTiling)?;
                if negative || self.scheme.group_of(value) != 0 {
                    return Err(WitnessError::InvalidTiling);
                }
                row.push(self.scheme.tile_of(value) as u32);
            }
            rows.push(row);
        }
        let mut grid = TilingGrid::from_rows(rows).map_err(WitnessError::Tiling)?;
        grid.periodic = true;
        Ok(grid)
    }

    /// Structural facts every labeling of this shape satisfies: the two
    /// torus copies carry equal values with opposite signs, edges along the
    /// x direction join groups {0, 1} or {2, 3}, and edges along the y
    /// direction join groups {0, 3} or {1, 2}.
    pub fn structure_ok(&self) -> bool {
        let (w, h) = (2 * self.a, 2 * self.b);
        for q in 1..=h {
            for p in 1..=w {
                let value = self.value(p, q);
                let pos = self.label_bits(p, q, 0);
                let neg = self.label_bits(p, q, 1);
                if decode_t(&pos) != Some((value, false))
                    || decode_t(&neg) != Some((value, true))
                {
                    return false;
                }
            }
        }
        for q in 1..=h {
            for i in 1..=self.a {
                let g1 = self.group(2 * i - 1, q);
                let g2 = self.group(2 * i, q);
                let pair = if g1 < g2 { (g1, g2) } else { (g2, g1) };
                if pair != (0, 1) && pair != (2, 3) {
                    return false;
                }
            }
        }
        for p in 1..=w {
            for j in 1..=self.b {
                let g1 = self.group(p, 2 * j - 1);
                let g2 = self.group(p, 2 * j);
                let pair = if g1 < g2 { (g1, g2) } else { (g2, g1) };
                if pair != (0, 3) && pair != (1, 2) {
                    return false;
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ciwb_tiling::system::TilingGrid;

    fn checkerboard() -> TilingGrid {
        let mut g = TilingGrid::from_rows(vec![vec![0, 1], vec![1, 0]]).unwrap();
        g.periodic = true;
        g
    }

    #[test]
    fn groups_follow_parity() {
        let lab = TorusLabeling::new(&checkerboard(), LabelScheme::new(2), 2, 2).unwrap();
        assert_eq!(lab.group(1, 1), 0);
        assert_eq!(lab.group(2, 1), 1);
        assert_eq!(lab.group(2, 2), 2);
        assert_eq!(lab.group(1, 2), 3);
    }

    #[test]
    fn values_encode_tile_and_group() {
        let lab = TorusLabeling::new(&checkerboard(), LabelScheme::new(2), 2, 2).unwrap();
        // Cell (0,0) holds tile 0: group-0 corner (1,1) gets value 1.
        assert_eq!(lab.value(1, 1), 1);
        // Cell (1,0) holds tile 1: its group-0 corner (3,1) gets 4*1+1 = 5.
        assert_eq!(lab.value(3, 1), 5);
        // Group shifts within the same cell.
        assert_eq!(lab.value(2, 1), 2);
        assert_eq!(lab.value(2, 2), 3);
        assert_eq!(lab.value(1, 2), 4);
    }

    #[test]
    fn single_tile_replicates_to_fit() {
        let mut g = TilingGrid::new_filled(1, 1, 0);
        g.periodic = true;
        let lab = TorusLabeling::new(&g, LabelScheme::new(1), 2, 2).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(lab.tile(i, j), 0);
            }
        }
        assert!(lab.structure_ok());
    }

    #[test]
    fn undersized_torus_rejected() {
        let mut g = TilingGrid::new_filled(1, 1, 0);
        g.periodic = true;
        assert!(TorusLabeling::new(&g, LabelScheme::new(1), 1, 2).is_err());
        // Side not a multiple of the grid side.
        assert!(TorusLabeling::new(&checkerboard(), LabelScheme::new(2), 3, 2).is_err());
    }

    #[test]
    fn decode_round_trips_the_replicated_grid() {
        let grid = checkerboard();
        let lab = TorusLabeling::new(&grid, LabelScheme::new(2), 4, 2).unwrap();
        let back = lab.decode_grid().unwrap();
        assert_eq!(back.width(), 4);
        assert_eq!(back.height(), 2);
        for j in 0..2 {
            for i in 0..4 {
                assert_eq!(back.get(i, j), grid.get(i % 2, j % 2));
            }
        }
    }

    #[test]
    fn structure_holds_on_checkerboard() {
        let lab = TorusLabeling::new(&checkerboard(), LabelScheme::new(2), 2, 2).unwrap();
        assert!(lab.structure_ok());
    }
}
