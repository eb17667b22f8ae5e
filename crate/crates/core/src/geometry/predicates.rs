// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The glin-rs Authors

//! Exact Contains / Intersects predicates.
//!
//! Orientation tests run on doubles. A point closer than [`COLLINEAR_EPS`]
//! degrees to a line is treated as lying on it. Points on a polygon boundary
//! are "not in the exterior", so a geometry touching the query boundary from
//! inside is still contained.

use super::{Coordinate, Geometry, Mbr, Polygon};

/// Collinearity tolerance, as a perpendicular distance in degrees.
pub const COLLINEAR_EPS: f64 = 1e-12;

/// Location of a point relative to a polygon.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointLocation {
    Interior,
    Boundary,
    Exterior,
}

/// Box overlap test; touching boundaries count as intersecting.
pub fn mbr_intersects(a: &Mbr, b: &Mbr) -> bool {
    a.intersects(b)
}

#[inline]
fn cross(o: Coordinate, a: Coordinate, b: Coordinate) -> f64 {
    (a.lon - o.lon) * (b.lat - o.lat) - (a.lat - o.lat) * (b.lon - o.lon)
}

/// Sign of the turn a→b→c, zero when c is within `COLLINEAR_EPS` of line ab.
#[inline]
fn orient(a: Coordinate, b: Coordinate, c: Coordinate) -> i8 {
    let len = (b.lon - a.lon).hypot(b.lat - a.lat);
    if len == 0.0 {
        return 0;
    }
    let cr = cross(a, b, c);
    if cr.abs() <= COLLINEAR_EPS * len {
        0
    } else if cr > 0.0 {
        1
    } else {
        -1
    }
}

#[inline]
fn in_segment_box(p: Coordinate, a: Coordinate, b: Coordinate) -> bool {
    p.lon >= a.lon.min(b.lon) - COLLINEAR_EPS
        && p.lon <= a.lon.max(b.lon) + COLLINEAR_EPS
        && p.lat >= a.lat.min(b.lat) - COLLINEAR_EPS
        && p.lat <= a.lat.max(b.lat) + COLLINEAR_EPS
}

#[inline]
fn on_segment(p: Coordinate, a: Coordinate, b: Coordinate) -> bool {
    in_segment_box(p, a, b) && orient(a, b, p) == 0
}

fn segments_intersect(p1: Coordinate, p2: Coordinate, q1: Coordinate, q2: Coordinate) -> bool {
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    if d1 * d2 < 0 && d3 * d4 < 0 {
        return true;
    }
    on_segment(p1, q1, q2) || on_segment(p2, q1, q2) || on_segment(q1, p1, p2) || on_segment(q2, p1, p2)
}

fn segments(ring: &[Coordinate]) -> impl Iterator<Item = (Coordinate, Coordinate)> + '_ {
    ring.windows(2).map(|w| (w[0], w[1]))
}

/// Classifies `p` against a polygon, holes included (even-odd rule).
pub(crate) fn locate(poly: &Polygon, p: Coordinate) -> PointLocation {
    let mut inside = false;
    for ring in poly.rings() {
        for (a, b) in segments(ring) {
            if on_segment(p, a, b) {
                return PointLocation::Boundary;
            }
            if (a.lat > p.lat) != (b.lat > p.lat) {
                let x = (b.lon - a.lon) * (p.lat - a.lat) / (b.lat - a.lat) + a.lon;
                if p.lon < x {
                    inside = !inside;
                }
            }
        }
    }
    if inside {
        PointLocation::Interior
    } else {
        PointLocation::Exterior
    }
}

/// Checks whether segment p0-p1 stays inside the closed polygon.
///
/// Returns `None` when some part of the segment is exterior, otherwise
/// `Some(true)` when part of it lies in the polygon interior.
fn segment_in_closed(poly: &Polygon, p0: Coordinate, p1: Coordinate) -> Option<bool> {
    let start = locate(poly, p0);
    let end = locate(poly, p1);
    if start == PointLocation::Exterior || end == PointLocation::Exterior {
        return None;
    }
    let dx = p1.lon - p0.lon;
    let dy = p1.lat - p0.lat;
    let len2 = dx * dx + dy * dy;
    if len2 == 0.0 {
        return Some(start == PointLocation::Interior);
    }
    let project = |c: Coordinate| ((c.lon - p0.lon) * dx + (c.lat - p0.lat) * dy) / len2;

    // Split the segment at every contact with the boundary; each open piece
    // is then uniformly interior, boundary or exterior.
    let mut ts = vec![0.0, 1.0];
    for ring in poly.rings() {
        for (a, b) in segments(ring) {
            if !segments_intersect(p0, p1, a, b) {
                continue;
            }
            let ex = b.lon - a.lon;
            let ey = b.lat - a.lat;
            let denom = dx * ey - dy * ex;
            if (orient(p0, p1, a) != 0 || orient(p0, p1, b) != 0) && denom != 0.0 {
                let t = ((a.lon - p0.lon) * ey - (a.lat - p0.lat) * ex) / denom;
                ts.push(t.clamp(0.0, 1.0));
            }
            for c in [a, b] {
                if on_segment(c, p0, p1) {
                    ts.push(project(c).clamp(0.0, 1.0));
                }
            }
        }
    }
    ts.sort_by(|a, b| a.total_cmp(b));
    ts.dedup();

    let mut interior = false;
    for w in ts.windows(2) {
        if w[1] - w[0] <= f64::EPSILON {
            continue;
        }
        let t = (w[0] + w[1]) * 0.5;
        let mid = Coordinate::new(p0.lon + dx * t, p0.lat + dy * t);
        match locate(poly, mid) {
            PointLocation::Exterior => return None,
            PointLocation::Interior => interior = true,
            PointLocation::Boundary => {}
        }
    }
    Some(interior)
}

/// Walks a chain of segments; `None` if any part leaves the closed polygon,
/// otherwise whether any part touched the interior.
fn chain_in_closed(poly: &Polygon, chain: &[Coordinate]) -> Option<bool> {
    let mut interior = false;
    for (a, b) in segments(chain) {
        interior |= segment_in_closed(poly, a, b)?;
    }
    Some(interior)
}

/// True iff no point of `gm` lies in the exterior of `q` and at least one
/// interior point of `gm` lies in the interior of `q`.
///
/// Only polygonal query windows can contain anything; other kinds of `q`
/// yield `false`.
pub fn contains(q: &Geometry, gm: &Geometry) -> bool {
    let Geometry::Polygon(qp) = q else {
        return false;
    };
    if !q.mbr().inflate(COLLINEAR_EPS).contains_mbr(&gm.mbr()) {
        return false;
    }
    match gm {
        Geometry::Point(p) => locate(qp, *p) == PointLocation::Interior,
        Geometry::LineString(cs) => {
            if cs.windows(2).all(|w| w[0] == w[1]) {
                return locate(qp, cs[0]) == PointLocation::Interior;
            }
            chain_in_closed(qp, cs).unwrap_or(false)
        }
        Geometry::Polygon(gp) => {
            let mut interior = false;
            for ring in gp.rings() {
                match chain_in_closed(qp, ring) {
                    Some(i) => interior |= i,
                    None => return false,
                }
            }
            // A hole of q enclosed by gm puts part of gm in q's exterior.
            for hole in qp.interiors() {
                let probes = hole
                    .iter()
                    .copied()
                    .chain(segments(hole).map(|(a, b)| Coordinate::new((a.lon + b.lon) * 0.5, (a.lat + b.lat) * 0.5)));
                for p in probes {
                    if locate(gp, p) == PointLocation::Interior {
                        return false;
                    }
                }
            }
            interior || gp.area() > 0.0
        }
    }
}

fn point_intersects(p: Coordinate, g: &Geometry) -> bool {
    match g {
        Geometry::Point(o) => (p.lon - o.lon).hypot(p.lat - o.lat) <= COLLINEAR_EPS,
        Geometry::LineString(cs) => segments(cs).any(|(a, b)| on_segment(p, a, b)),
        Geometry::Polygon(poly) => locate(poly, p) != PointLocation::Exterior,
    }
}

fn chain_crosses_polygon_boundary(chain: &[Coordinate], poly: &Polygon) -> bool {
    segments(chain).any(|(p1, p2)| {
        poly.rings()
            .any(|ring| segments(ring).any(|(q1, q2)| segments_intersect(p1, p2, q1, q2)))
    })
}

/// True iff `a` and `b` share at least one point. Symmetric.
pub fn intersects(a: &Geometry, b: &Geometry) -> bool {
    if !a.mbr().inflate(COLLINEAR_EPS).intersects(&b.mbr()) {
        return false;
    }
    match (a, b) {
        (Geometry::Point(p), other) | (other, Geometry::Point(p)) => point_intersects(*p, other),
        (Geometry::LineString(l1), Geometry::LineString(l2)) => {
            segments(l1).any(|(p1, p2)| segments(l2).any(|(q1, q2)| segments_intersect(p1, p2, q1, q2)))
        }
        (Geometry::LineString(l), Geometry::Polygon(poly)) | (Geometry::Polygon(poly), Geometry::LineString(l)) => {
            chain_crosses_polygon_boundary(l, poly) || locate(poly, l[0]) != PointLocation::Exterior
        }
        (Geometry::Polygon(pa), Geometry::Polygon(pb)) => {
            pa.rings().any(|ring| chain_crosses_polygon_boundary(ring, pb))
                || locate(pb, pa.exterior()[0]) != PointLocation::Exterior
                || locate(pa, pb.exterior()[0]) != PointLocation::Exterior
        }
    }
}
