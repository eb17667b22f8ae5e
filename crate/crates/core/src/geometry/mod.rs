// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The glin-rs Authors

//! Planar geometry model in degree space.
//!
//! Three geometry kinds are supported: points, linestrings and polygons with
//! optional holes. Geometries are validated on construction and immutable
//! afterwards. [`contains`] and [`intersects`] are the exact predicates used
//! by the refinement phase of every engine in this crate.

mod predicates;
mod wkt;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{GlinError, Result};

pub use predicates::{contains, intersects, mbr_intersects, PointLocation, COLLINEAR_EPS};
pub use wkt::parse_wkt;

/// A longitude/latitude pair in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coordinate {
    pub lon: f64,
    pub lat: f64,
}

impl Coordinate {
    pub const fn new(lon: f64, lat: f64) -> Self {
        Self { lon, lat }
    }

    fn validate(&self) -> Result<()> {
        if !self.lon.is_finite() || !self.lat.is_finite() {
            return Err(GlinError::InvalidGeometry(format!(
                "non-finite coordinate ({}, {})",
                self.lon, self.lat
            )));
        }
        if !(-180.0..=180.0).contains(&self.lon) || !(-90.0..=90.0).contains(&self.lat) {
            return Err(GlinError::InvalidGeometry(format!(
                "coordinate ({}, {}) outside lon [-180, 180] / lat [-90, 90]",
                self.lon, self.lat
            )));
        }
        Ok(())
    }
}

/// Minimum bounding rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mbr {
    pub xmin: f64,
    pub ymin: f64,
    pub xmax: f64,
    pub ymax: f64,
}

impl Mbr {
    pub fn new(xmin: f64, ymin: f64, xmax: f64, ymax: f64) -> Self {
        debug_assert!(xmin <= xmax && ymin <= ymax, "inverted MBR");
        Self { xmin, ymin, xmax, ymax }
    }

    pub fn of_point(c: Coordinate) -> Self {
        Self::new(c.lon, c.lat, c.lon, c.lat)
    }

    /// Bounding box of a non-empty coordinate sequence.
    pub fn of_coords<'a>(coords: impl IntoIterator<Item = &'a Coordinate>) -> Option<Self> {
        let mut it = coords.into_iter();
        let first = *it.next()?;
        let mut mbr = Self::of_point(first);
        for c in it {
            mbr.expand_to(*c);
        }
        Some(mbr)
    }

    pub fn p_min(&self) -> Coordinate {
        Coordinate::new(self.xmin, self.ymin)
    }

    pub fn p_max(&self) -> Coordinate {
        Coordinate::new(self.xmax, self.ymax)
    }

    pub fn center(&self) -> Coordinate {
        Coordinate::new((self.xmin + self.xmax) * 0.5, (self.ymin + self.ymax) * 0.5)
    }

    pub fn width(&self) -> f64 {
        self.xmax - self.xmin
    }

    pub fn height(&self) -> f64 {
        self.ymax - self.ymin
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn expand_to(&mut self, c: Coordinate) {
        self.xmin = self.xmin.min(c.lon);
        self.ymin = self.ymin.min(c.lat);
        self.xmax = self.xmax.max(c.lon);
        self.ymax = self.ymax.max(c.lat);
    }

    pub fn union(&self, other: &Mbr) -> Mbr {
        Mbr {
            xmin: self.xmin.min(other.xmin),
            ymin: self.ymin.min(other.ymin),
            xmax: self.xmax.max(other.xmax),
            ymax: self.ymax.max(other.ymax),
        }
    }

    /// Boxes overlap; touching boundaries count.
    pub fn intersects(&self, other: &Mbr) -> bool {
        self.xmin <= other.xmax && other.xmin <= self.xmax && self.ymin <= other.ymax && other.ymin <= self.ymax
    }

    /// `other` lies inside `self` (boundaries inclusive).
    pub fn contains_mbr(&self, other: &Mbr) -> bool {
        self.xmin <= other.xmin && self.ymin <= other.ymin && other.xmax <= self.xmax && other.ymax <= self.ymax
    }

    pub fn contains_coord(&self, c: Coordinate) -> bool {
        self.xmin <= c.lon && c.lon <= self.xmax && self.ymin <= c.lat && c.lat <= self.ymax
    }

    pub fn inflate(&self, by: f64) -> Mbr {
        Mbr {
            xmin: self.xmin - by,
            ymin: self.ymin - by,
            xmax: self.xmax + by,
            ymax: self.ymax + by,
        }
    }

    /// The rectangle as a closed polygon (counter-clockwise from `p_min`).
    pub fn to_polygon(&self) -> Geometry {
        Geometry::Polygon(Polygon {
            exterior: vec![
                Coordinate::new(self.xmin, self.ymin),
                Coordinate::new(self.xmax, self.ymin),
                Coordinate::new(self.xmax, self.ymax),
                Coordinate::new(self.xmin, self.ymax),
                Coordinate::new(self.xmin, self.ymin),
            ],
            interiors: Vec::new(),
        })
    }
}

/// Polygon with one exterior ring and zero or more holes. Rings are closed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polygon {
    exterior: Vec<Coordinate>,
    interiors: Vec<Vec<Coordinate>>,
}

impl Polygon {
    pub fn new(exterior: Vec<Coordinate>, interiors: Vec<Vec<Coordinate>>) -> Result<Self> {
        validate_ring(&exterior, "exterior ring")?;
        for (i, ring) in interiors.iter().enumerate() {
            validate_ring(ring, &format!("interior ring {i}"))?;
        }
        Ok(Self { exterior, interiors })
    }

    pub fn exterior(&self) -> &[Coordinate] {
        &self.exterior
    }

    pub fn interiors(&self) -> &[Vec<Coordinate>] {
        &self.interiors
    }

    pub fn rings(&self) -> impl Iterator<Item = &[Coordinate]> {
        std::iter::once(self.exterior.as_slice()).chain(self.interiors.iter().map(Vec::as_slice))
    }

    /// Enclosed area: exterior minus holes.
    pub fn area(&self) -> f64 {
        let holes: f64 = self.interiors.iter().map(|r| ring_area(r).abs()).sum();
        (ring_area(&self.exterior).abs() - holes).max(0.0)
    }
}

fn ring_area(ring: &[Coordinate]) -> f64 {
    ring.windows(2)
        .map(|w| w[0].lon * w[1].lat - w[1].lon * w[0].lat)
        .sum::<f64>()
        * 0.5
}

fn validate_ring(ring: &[Coordinate], what: &str) -> Result<()> {
    if ring.len() < 4 {
        return Err(GlinError::InvalidGeometry(format!(
            "{what} has {} coordinates, at least 4 required",
            ring.len()
        )));
    }
    for c in ring {
        c.validate()?;
    }
    if ring.first() != ring.last() {
        return Err(GlinError::InvalidGeometry(format!("{what} is not closed")));
    }
    Ok(())
}

/// Kind tag of a [`Geometry`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GeometryKind {
    Point,
    LineString,
    Polygon,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Geometry {
    Point(Coordinate),
    LineString(Vec<Coordinate>),
    Polygon(Polygon),
}

impl Geometry {
    pub fn point(lon: f64, lat: f64) -> Result<Self> {
        let c = Coordinate::new(lon, lat);
        c.validate()?;
        Ok(Geometry::Point(c))
    }

    pub fn line_string(coords: Vec<Coordinate>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(GlinError::InvalidGeometry(format!(
                "linestring has {} coordinates, at least 2 required",
                coords.len()
            )));
        }
        for c in &coords {
            c.validate()?;
        }
        Ok(Geometry::LineString(coords))
    }

    pub fn polygon(exterior: Vec<Coordinate>, interiors: Vec<Vec<Coordinate>>) -> Result<Self> {
        Polygon::new(exterior, interiors).map(Geometry::Polygon)
    }

    /// Axis-aligned rectangle polygon.
    pub fn rect(xmin: f64, ymin: f64, xmax: f64, ymax: f64) -> Result<Self> {
        if !(xmin <= xmax && ymin <= ymax) {
            return Err(GlinError::InvalidGeometry(format!(
                "inverted rectangle ({xmin}, {ymin}, {xmax}, {ymax})"
            )));
        }
        let g = Mbr::new(xmin, ymin, xmax, ymax).to_polygon();
        if let Geometry::Polygon(p) = &g {
            validate_ring(&p.exterior, "exterior ring")?;
        }
        Ok(g)
    }

    pub fn kind(&self) -> GeometryKind {
        match self {
            Geometry::Point(_) => GeometryKind::Point,
            Geometry::LineString(_) => GeometryKind::LineString,
            Geometry::Polygon(_) => GeometryKind::Polygon,
        }
    }

    /// Every coordinate of the geometry, rings included.
    pub fn coords(&self) -> Box<dyn Iterator<Item = &Coordinate> + '_> {
        match self {
            Geometry::Point(c) => Box::new(std::iter::once(c)),
            Geometry::LineString(cs) => Box::new(cs.iter()),
            Geometry::Polygon(p) => Box::new(p.rings().flatten()),
        }
    }

    pub fn mbr(&self) -> Mbr {
        match self {
            Geometry::Point(c) => Mbr::of_point(*c),
            Geometry::LineString(cs) => Mbr::of_coords(cs).expect("validated linestring"),
            // holes lie inside the exterior ring
            Geometry::Polygon(p) => Mbr::of_coords(&p.exterior).expect("validated polygon"),
        }
    }

    pub fn to_wkt(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Geometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn seq(f: &mut fmt::Formatter<'_>, cs: &[Coordinate]) -> fmt::Result {
            f.write_str("(")?;
            for (i, c) in cs.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{} {}", c.lon, c.lat)?;
            }
            f.write_str(")")
        }
        match self {
            Geometry::Point(c) => write!(f, "POINT ({} {})", c.lon, c.lat),
            Geometry::LineString(cs) => {
                f.write_str("LINESTRING ")?;
                seq(f, cs)
            }
            Geometry::Polygon(p) => {
                f.write_str("POLYGON (")?;
                for (i, ring) in p.rings().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    seq(f, ring)?;
                }
                f.write_str(")")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(lon: f64, lat: f64) -> Coordinate {
        Coordinate::new(lon, lat)
    }

    #[test]
    fn mbr_of_point_is_degenerate() {
        let g = Geometry::point(3.0, 7.0).unwrap();
        assert_eq!(g.mbr(), Mbr::new(3.0, 7.0, 3.0, 7.0));
    }

    #[test]
    fn mbr_of_linestring() {
        let g = Geometry::line_string(vec![c(0.0, 0.0), c(4.0, 2.0), c(1.0, 5.0)]).unwrap();
        assert_eq!(g.mbr(), Mbr::new(0.0, 0.0, 4.0, 5.0));
    }

    #[test]
    fn mbr_of_polygon() {
        let ring = vec![c(0.0, 0.0), c(4.0, 0.0), c(4.0, 4.0), c(0.0, 4.0), c(0.0, 0.0)];
        let g = Geometry::polygon(ring, vec![]).unwrap();
        assert_eq!(g.mbr(), Mbr::new(0.0, 0.0, 4.0, 4.0));
    }

    #[test]
    fn polygon_validation() {
        let open = vec![c(0.0, 0.0), c(4.0, 0.0), c(4.0, 4.0), c(0.0, 4.0)];
        assert!(Geometry::polygon(open, vec![]).is_err());
        let short = vec![c(0.0, 0.0), c(4.0, 0.0), c(0.0, 0.0)];
        assert!(Geometry::polygon(short, vec![]).is_err());
        assert!(Geometry::line_string(vec![c(1.0, 1.0)]).is_err());
        assert!(Geometry::point(f64::NAN, 0.0).is_err());
        assert!(Geometry::point(181.0, 0.0).is_err());
    }

    #[test]
    fn polygon_area_subtracts_holes() {
        let ext = vec![c(0.0, 0.0), c(4.0, 0.0), c(4.0, 4.0), c(0.0, 4.0), c(0.0, 0.0)];
        let hole = vec![c(1.0, 1.0), c(2.0, 1.0), c(2.0, 2.0), c(1.0, 2.0), c(1.0, 1.0)];
        let p = Polygon::new(ext, vec![hole]).unwrap();
        assert_eq!(p.area(), 15.0);
    }

    #[test]
    fn display_is_wkt() {
        let g = Geometry::rect(0.0, 0.0, 1.5, 2.0).unwrap();
        assert_eq!(g.to_wkt(), "POLYGON ((0 0, 1.5 0, 1.5 2, 0 2, 0 0))");
        assert_eq!(Geometry::point(30.0, 10.0).unwrap().to_wkt(), "POINT (30 10)");
    }
}
