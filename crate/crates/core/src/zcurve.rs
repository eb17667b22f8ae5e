// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The glin-rs Authors

//! Z-order (Morton) addressing of geometries.
//!
//! Coordinates are translated to the non-negative quadrant and divided into
//! square cells of `cell_size` degrees. A cell `(x, y)` gets the Morton code
//! with bit `i` of `x` at position `2i` and bit `i` of `y` at `2i + 1`.
//!
//! A geometry's interval is the pair of codes of its MBR corners. Because the
//! code is monotone under dominance, that interval covers the code of every
//! point inside the geometry.

use serde::{Deserialize, Serialize};

use crate::error::{GlinError, Result};
use crate::geometry::{Coordinate, Geometry, Mbr};

/// Largest x cell (exclusive) that still fits the 64-bit code.
pub const MAX_X_CELLS: u64 = 1 << 30;
/// Largest y cell (exclusive) that still fits the 64-bit code.
pub const MAX_Y_CELLS: u64 = 1 << 29;

pub const DEFAULT_CELL_SIZE: f64 = 5e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CellCoord {
    pub x: u32,
    pub y: u32,
}

impl CellCoord {
    pub const fn new(x: u32, y: u32) -> Self {
        Self { x, y }
    }
}

/// Morton code of a cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ZAddress(pub u64);

impl ZAddress {
    pub const MIN: ZAddress = ZAddress(0);
    pub const MAX: ZAddress = ZAddress(u64::MAX);

    pub fn value(self) -> u64 {
        self.0
    }
}

impl From<u64> for ZAddress {
    fn from(v: u64) -> Self {
        ZAddress(v)
    }
}

/// Closed interval `[zmin, zmax]` of Z-addresses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ZInterval {
    pub zmin: ZAddress,
    pub zmax: ZAddress,
}

impl ZInterval {
    pub fn new(zmin: impl Into<ZAddress>, zmax: impl Into<ZAddress>) -> Self {
        let (zmin, zmax) = (zmin.into(), zmax.into());
        debug_assert!(zmin <= zmax, "inverted interval");
        Self { zmin, zmax }
    }

    /// Both endpoints of `other` fall inside `self`.
    pub fn contains(&self, other: &ZInterval) -> bool {
        interval_contains(self, other)
    }

    pub fn intersects(&self, other: &ZInterval) -> bool {
        interval_intersects(self, other)
    }
}

/// Grid configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveConfig {
    cell_size: f64,
    max_x: u32,
    max_y: u32,
}

impl Default for CurveConfig {
    fn default() -> Self {
        Self::new(DEFAULT_CELL_SIZE).expect("default cell size is valid")
    }
}

impl CurveConfig {
    /// Fails when the cell size is not positive or so small that the grid
    /// needs more than 30 bits in x or 29 bits in y.
    pub fn new(cell_size: f64) -> Result<Self> {
        if !(cell_size.is_finite() && cell_size > 0.0) {
            return Err(GlinError::Config(format!(
                "cell size must be positive, got {cell_size}"
            )));
        }
        let x_cells = (360.0 / cell_size).ceil();
        let y_cells = (180.0 / cell_size).ceil();
        if x_cells > MAX_X_CELLS as f64 || y_cells > MAX_Y_CELLS as f64 {
            return Err(GlinError::Config(format!(
                "cell size {cell_size} needs {x_cells} x {y_cells} cells, \
                 exceeding the 2^30 x 2^29 grid"
            )));
        }
        Ok(Self {
            cell_size,
            max_x: (x_cells as u32).saturating_sub(1),
            max_y: (y_cells as u32).saturating_sub(1),
        })
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    /// Highest cell index on each axis.
    pub fn max_cell(&self) -> CellCoord {
        CellCoord::new(self.max_x, self.max_y)
    }
}

/// Fraction of a cell added before flooring so that offsets that are exact
/// multiples of the cell size in decimal land on their own cell despite
/// binary rounding (`1e-6 / 5e-7` evaluates just below 2).
const CELL_SNAP: f64 = 1e-6;

/// Maps a coordinate to its grid cell. Values on the upper domain edge clamp
/// to the last cell.
pub fn coord_to_cell(c: Coordinate, cfg: &CurveConfig) -> Result<CellCoord> {
    if !(-180.0..=180.0).contains(&c.lon) || !(-90.0..=90.0).contains(&c.lat) {
        return Err(GlinError::Config(format!(
            "coordinate ({}, {}) is outside the grid domain",
            c.lon, c.lat
        )));
    }
    let x = (((c.lon + 180.0) / cfg.cell_size) + CELL_SNAP).floor() as u64;
    let y = (((c.lat + 90.0) / cfg.cell_size) + CELL_SNAP).floor() as u64;
    Ok(CellCoord::new(
        x.min(cfg.max_x as u64) as u32,
        y.min(cfg.max_y as u64) as u32,
    ))
}

#[inline]
fn spread_bits(v: u32) -> u64 {
    let mut x = v as u64;
    x = (x | (x << 16)) & 0x0000_FFFF_0000_FFFF;
    x = (x | (x << 8)) & 0x00FF_00FF_00FF_00FF;
    x = (x | (x << 4)) & 0x0F0F_0F0F_0F0F_0F0F;
    x = (x | (x << 2)) & 0x3333_3333_3333_3333;
    x = (x | (x << 1)) & 0x5555_5555_5555_5555;
    x
}

#[inline]
fn compact_bits(v: u64) -> u32 {
    let mut x = v & 0x5555_5555_5555_5555;
    x = (x | (x >> 1)) & 0x3333_3333_3333_3333;
    x = (x | (x >> 2)) & 0x0F0F_0F0F_0F0F_0F0F;
    x = (x | (x >> 4)) & 0x00FF_00FF_00FF_00FF;
    x = (x | (x >> 8)) & 0x0000_FFFF_0000_FFFF;
    x = (x | (x >> 16)) & 0x0000_0000_FFFF_FFFF;
    x as u32
}

/// Interleaves `x` into the even bits and `y` into the odd bits.
#[inline]
pub fn morton_encode(cell: CellCoord) -> ZAddress {
    ZAddress(spread_bits(cell.x) | (spread_bits(cell.y) << 1))
}

#[inline]
pub fn morton_decode(z: ZAddress) -> CellCoord {
    CellCoord::new(compact_bits(z.0), compact_bits(z.0 >> 1))
}

pub fn coord_to_zaddress(c: Coordinate, cfg: &CurveConfig) -> Result<ZAddress> {
    coord_to_cell(c, cfg).map(morton_encode)
}

/// Interval from the codes of an MBR's two corners.
pub fn mbr_zitvl(mbr: &Mbr, cfg: &CurveConfig) -> Result<ZInterval> {
    let zmin = coord_to_zaddress(mbr.p_min(), cfg)?;
    let zmax = coord_to_zaddress(mbr.p_max(), cfg)?;
    Ok(ZInterval { zmin, zmax })
}

/// Z-address interval of a geometry.
pub fn zitvl(g: &Geometry, cfg: &CurveConfig) -> Result<ZInterval> {
    mbr_zitvl(&g.mbr(), cfg)
}

/// `q` contains `g` when both of `g`'s endpoints fall inside `q`.
pub fn interval_contains(q: &ZInterval, g: &ZInterval) -> bool {
    q.zmin <= g.zmin && g.zmin <= q.zmax && q.zmin <= g.zmax && g.zmax <= q.zmax
}

/// The intervals share at least one address.
pub fn interval_intersects(q: &ZInterval, g: &ZInterval) -> bool {
    (q.zmin <= g.zmin && g.zmin <= q.zmax)
        || (q.zmin <= g.zmax && g.zmax <= q.zmax)
        || (g.zmin <= q.zmin && q.zmax <= g.zmax)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Bit-by-bit reference interleave.
    fn interleave_loop(x: u32, y: u32) -> u64 {
        let mut z = 0u64;
        for i in 0..32 {
            z |= (((x >> i) & 1) as u64) << (2 * i);
            z |= (((y >> i) & 1) as u64) << (2 * i + 1);
        }
        z
    }

    #[test]
    fn morton_fixed_points() {
        assert_eq!(morton_encode(CellCoord::new(0, 0)).0, 0);
        assert_eq!(morton_encode(CellCoord::new(0, 1)).0, 2);
        assert_eq!(morton_encode(CellCoord::new(1, 3)).0, 11);
        assert_eq!(interleave_loop(2, 3), 14);
        assert_eq!(morton_encode(CellCoord::new(2, 3)).0, 14);
    }

    #[test]
    fn cell_mapping() {
        let any = CurveConfig::new(0.25).unwrap();
        assert_eq!(
            coord_to_cell(Coordinate::new(-180.0, -90.0), &any).unwrap(),
            CellCoord::new(0, 0)
        );
        let half = CurveConfig::new(0.5).unwrap();
        assert_eq!(
            coord_to_cell(Coordinate::new(0.0, 0.0), &half).unwrap(),
            CellCoord::new(360, 180)
        );
        let def = CurveConfig::default();
        assert_eq!(
            coord_to_cell(Coordinate::new(-180.0 + 1e-6, -90.0), &def).unwrap(),
            CellCoord::new(2, 0)
        );
    }

    #[test]
    fn upper_edge_clamps() {
        let half = CurveConfig::new(0.5).unwrap();
        assert_eq!(
            coord_to_cell(Coordinate::new(180.0, 90.0), &half).unwrap(),
            CellCoord::new(719, 359)
        );
        let def = CurveConfig::default();
        let top = coord_to_cell(Coordinate::new(180.0, 90.0), &def).unwrap();
        assert_eq!(top, def.max_cell());
        assert!((top.x as u64) < MAX_X_CELLS && (top.y as u64) < MAX_Y_CELLS);
    }

    #[test]
    fn config_rejects_tiny_cells() {
        assert!(CurveConfig::new(0.0).is_err());
        assert!(CurveConfig::new(-1.0).is_err());
        assert!(CurveConfig::new(1e-7).is_err());
        assert!(CurveConfig::new(5e-8 * 10.0).is_ok());
    }

    #[test]
    fn zitvl_of_small_window() {
        // cell size 1: p_min in cell (0,1), p_max in cell (1,3)
        let cfg = CurveConfig::new(1.0).unwrap();
        let q = Geometry::rect(-180.0 + 0.2, -90.0 + 1.2, -180.0 + 1.8, -90.0 + 3.8).unwrap();
        assert_eq!(zitvl(&q, &cfg).unwrap(), ZInterval::new(2, 11));
        let p = Geometry::point(12.5, -3.25).unwrap();
        let z = zitvl(&p, &CurveConfig::default()).unwrap();
        assert_eq!(z.zmin, z.zmax);
    }

    #[test]
    fn zitvl_covers_all_mbr_cells() {
        // enumerate every cell touched by the MBR at a coarse grid
        let cfg = CurveConfig::new(1.0).unwrap();
        let g = crate::geometry::parse_wkt(
            "POLYGON ((-170.5 -80.2, -160.1 -85.7, -150.9 -70.3, -165.2 -60.8, -170.5 -80.2))",
        )
        .unwrap();
        let z = zitvl(&g, &cfg).unwrap();
        let m = g.mbr();
        let lo = coord_to_cell(m.p_min(), &cfg).unwrap();
        let hi = coord_to_cell(m.p_max(), &cfg).unwrap();
        let mut codes = vec![];
        for x in lo.x..=hi.x {
            for y in lo.y..=hi.y {
                codes.push(interleave_loop(x, y));
            }
        }
        assert_eq!(*codes.iter().min().unwrap(), z.zmin.0);
        assert_eq!(*codes.iter().max().unwrap(), z.zmax.0);
    }

    #[test]
    fn interval_relations() {
        let q = ZInterval::new(2, 11);
        assert!(interval_contains(&q, &ZInterval::new(3, 9)));
        assert!(!interval_contains(&q, &ZInterval::new(1, 9)));
        assert!(interval_contains(&ZInterval::new(5, 5), &ZInterval::new(5, 5)));
        assert!(interval_intersects(&q, &ZInterval::new(10, 14)));
        assert!(interval_intersects(&q, &ZInterval::new(0, 3)));
        assert!(interval_intersects(&q, &ZInterval::new(0, 20)));
        assert!(!interval_intersects(&ZInterval::new(4, 5), &ZInterval::new(6, 9)));
    }

    proptest! {
        #[test]
        fn encode_matches_loop(x in 0u32..(1 << 30), y in 0u32..(1 << 29)) {
            prop_assert_eq!(morton_encode(CellCoord::new(x, y)).0, interleave_loop(x, y));
        }

        #[test]
        fn decode_inverts_encode(x in any::<u32>(), y in any::<u32>()) {
            let c = CellCoord::new(x, y);
            prop_assert_eq!(morton_decode(morton_encode(c)), c);
        }

        #[test]
        fn dominance_preserves_order(
            x in 0u32..(1 << 30), y in 0u32..(1 << 29),
            dx in 0u32..(1 << 20), dy in 0u32..(1 << 20),
        ) {
            let a = CellCoord::new(x, y);
            let b = CellCoord::new(x.saturating_add(dx), y.saturating_add(dy));
            prop_assert!(morton_encode(a) <= morton_encode(b));
        }

        #[test]
        fn inner_points_fall_in_interval(
            x0 in -179.0f64..179.0, y0 in -89.0f64..89.0,
            w in 0.0f64..1.0, h in 0.0f64..1.0,
            fx in 0.0f64..=1.0, fy in 0.0f64..=1.0,
        ) {
            let cfg = CurveConfig::default();
            let g = Geometry::rect(x0, y0, x0 + w, y0 + h).unwrap();
            let z = zitvl(&g, &cfg).unwrap();
            let p = Coordinate::new(x0 + w * fx, y0 + h * fy);
            let zp = coord_to_zaddress(p, &cfg).unwrap();
            prop_assert!(z.zmin <= zp && zp <= z.zmax);
        }
    }
}
