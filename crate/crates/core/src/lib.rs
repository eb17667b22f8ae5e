// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The glin-rs Authors

//! A learned index for complex geometries.
//!
//! Geometries are mapped to intervals of Z-order addresses, sorted by the
//! lower end of the interval and indexed by a hierarchy of linear models.
//! Queries scan a key range, skip leaves whose bounding box misses the
//! window, and refine candidates with exact predicates. A small piecewise
//! summary of the stored intervals widens Intersects windows so nothing that
//! starts before the window is missed.
//!
//! ```
//! use glin::prelude::*;
//!
//! let data = vec![
//!     (Geometry::rect(0.0, 0.0, 1.0, 1.0).unwrap(), 1),
//!     (Geometry::rect(0.5, 0.5, 3.0, 3.0).unwrap(), 2),
//! ];
//! let index = GlinIndex::bulk_load_with_piecewise(
//!     data,
//!     CurveConfig::default(),
//!     BuildParams::default(),
//!     DEFAULT_PIECE_LIMITATION,
//! )
//! .unwrap();
//! let window = Geometry::rect(0.9, 0.9, 1.5, 1.5).unwrap();
//! let mut hits = index.range_query(&window, Relationship::Intersects).unwrap();
//! hits.sort();
//! assert_eq!(hits, vec![1, 2]);
//! ```

pub mod augment;
pub mod bench;
pub mod error;
pub mod geometry;
pub mod index;
pub mod oracle;
pub mod zcurve;

pub use error::{GlinError, Result};

/// Common imports.
pub mod prelude {
    pub use crate::augment::{PiecewiseFunction, DEFAULT_PIECE_LIMITATION};
    pub use crate::error::{GlinError, Result};
    pub use crate::geometry::{parse_wkt, Coordinate, Geometry, Mbr};
    pub use crate::index::{BuildParams, GeomId, GlinIndex, QueryOptions, Relationship};
    pub use crate::zcurve::{CurveConfig, ZAddress, ZInterval};
}
